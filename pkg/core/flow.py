"""
Flow Module

Classical max-flow/min-cut on networks: integer max flow through the
directed doubling of every undirected edge, the quantum min-cut through
fixed-point log capacities, edge-disjoint input/output paths, and the
power-of-d expansion and thinning transforms.
"""

import math
from dataclasses import dataclass
from decimal import ROUND_FLOOR, Decimal, localcontext
from typing import Dict, List, Mapping, Optional, Tuple

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from config import get_config
from core.errors import ParameterError, PowerOfBaseError, PrecisionEscalationError
from core.netgraph import (Edge, EdgeCut, Endpoint, Network, Port, Side, Terminal, Vertex,
                           enumerate_cuts, with_capacities)
from logger import get_logger


logger = get_logger(__name__)

# Super-terminal node names; vertex ids never contain a dot.
SOURCE = "S.*"
SINK = "T.*"


@dataclass(frozen=True)
class EdgeFlow:
    """Flow along one edge, from ``tail`` to ``head``."""
    edge_id: int
    amount: int
    tail: Endpoint
    head: Endpoint


@dataclass(frozen=True)
class FlowResult:
    """
    Maximum flow from all inputs to all outputs.

    Attributes:
        value: Total flow |f|
        flows: One EdgeFlow per edge carrying positive flow, by edge id
    """
    value: int
    flows: Tuple[EdgeFlow, ...]

    def amount(self, edge_id: int) -> int:
        for f in self.flows:
            if f.edge_id == edge_id:
                return f.amount
        return 0


@dataclass(frozen=True)
class Path:
    """Input-to-output path: terminal, edges, visited vertices, terminal."""
    input_terminal: int
    output_terminal: int
    edges: Tuple[int, ...]
    vertices: Tuple[str, ...]


@dataclass(frozen=True)
class PathSet:
    paths: Tuple[Path, ...]

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    @property
    def edge_ids(self) -> List[int]:
        return [eid for path in self.paths for eid in path.edges]


def _node(end: Endpoint) -> str:
    if isinstance(end, Terminal):
        return SOURCE if end.side is Side.INPUT else SINK
    return end.vertex


def _build_digraph(net: Network, weights: Mapping[int, int],
                   orientation: Optional[Mapping[int, bool]] = None) -> Tuple[nx.DiGraph, Dict]:
    """
    Directed flow graph with super source and sink.

    Every undirected edge becomes an arc pair (or one arc when an
    orientation is given); arcs into the source or out of the sink are
    dropped and parallel arcs merge by summing capacities.

    Returns:
        (graph, arcs) where arcs maps (u, v) to the edges behind that arc
    """
    graph = nx.DiGraph()
    graph.add_node(SOURCE)
    graph.add_node(SINK)
    graph.add_nodes_from(net.vertex_ids)
    arcs: Dict[Tuple[str, str], List[Edge]] = {}

    def add_arc(u: str, v: str, edge: Edge):
        if u == v or u == SINK or v == SOURCE:
            return
        weight = weights.get(edge.id, 0)
        if graph.has_edge(u, v):
            graph[u][v]["capacity"] += weight
        else:
            graph.add_edge(u, v, capacity=weight)
        arcs.setdefault((u, v), []).append(edge)

    for edge in net.edges:
        if edge.is_self_loop:
            continue
        u, v = _node(edge.a), _node(edge.b)
        both = orientation is None or SOURCE in (u, v) or SINK in (u, v)
        forward = both or orientation.get(edge.id, True)
        if both or forward:
            add_arc(u, v, edge)
        if both or not forward:
            add_arc(v, u, edge)
    return graph, arcs


def _edge_flows(net: Network, flow_dict: Dict, arcs: Dict, weights: Mapping[int, int]) -> Tuple[EdgeFlow, ...]:
    """Net the two directions of each node pair and spread it over the parallel edges."""
    result = []
    for (u, v), edges in arcs.items():
        net_amount = flow_dict[u][v] - flow_dict.get(v, {}).get(u, 0)
        if net_amount <= 0:
            continue
        for edge in sorted(edges, key=lambda e: e.id):
            if net_amount <= 0:
                break
            amount = min(net_amount, weights.get(edge.id, 0))
            if amount <= 0:
                continue
            net_amount -= amount
            tail, head = (edge.a, edge.b) if _node(edge.a) == u else (edge.b, edge.a)
            result.append(EdgeFlow(edge_id=edge.id, amount=amount, tail=tail, head=head))
    return tuple(sorted(result, key=lambda f: f.edge_id))


def max_flow(net: Network, weights: Optional[Mapping[int, int]] = None) -> FlowResult:
    """
    Maximum integer flow from a super source on the inputs to a super sink on the outputs.

    Args:
        net: Network
        weights: Nonnegative integer weight per edge id (unit weights when omitted)

    Returns:
        FlowResult whose per-edge flows never use both directions of an edge
    """
    if weights is None:
        weights = {e.id: 1 for e in net.edges}
    if any(w < 0 for w in weights.values()):
        raise ParameterError("flow weights must be nonnegative")
    graph, arcs = _build_digraph(net, weights)
    value, flow_dict = nx.maximum_flow(graph, SOURCE, SINK, flow_func=edmonds_karp)
    flows = _edge_flows(net, flow_dict, arcs, weights)
    logger.debug(f"Max flow | Network: {net.label} | Value: {value}")
    return FlowResult(value=int(value), flows=flows)


def unit_min_cut_cardinality(net: Network) -> int:
    """Fewest edges whose removal separates inputs from outputs."""
    return max_flow(net).value


# -- quantum min-cut --------------------------------------------------------------

def log_weights(net: Network, bits: int, base: int = 2) -> Dict[int, int]:
    """floor(log_base(c_e) * 2^bits) for every edge, computed in high precision decimal."""
    with localcontext() as ctx:
        ctx.prec = bits // 3 + 30
        scale = Decimal(2) ** bits
        log_base = Decimal(base).ln()
        cache: Dict[int, int] = {}
        weights = {}
        for edge in net.edges:
            c = edge.capacity
            if c not in cache:
                cache[c] = int((Decimal(c).ln() / log_base * scale).to_integral_value(rounding=ROUND_FLOOR))
            weights[edge.id] = cache[c]
    return weights


def _cut_from_partition(net: Network, source_side: set) -> EdgeCut:
    def on_source(end: Endpoint) -> bool:
        if isinstance(end, Terminal):
            return end.side is Side.INPUT
        return end.vertex in source_side

    edges = frozenset(e.id for e in net.edges
                      if not e.is_self_loop and on_source(e.a) != on_source(e.b))
    value = math.prod(net.edges[eid].capacity for eid in edges)
    return EdgeCut(edges=edges, source_side=frozenset(v for v in source_side if v != SOURCE), value=value)


def _log_min_cut(net: Network, bits: int) -> EdgeCut:
    graph, _ = _build_digraph(net, log_weights(net, bits))
    _, (reachable, _) = nx.minimum_cut(graph, SOURCE, SINK, flow_func=edmonds_karp)
    return _cut_from_partition(net, set(reachable))


def min_product_cut(net: Network) -> EdgeCut:
    """
    Edge cut minimizing the product of capacities.

    The min cut under fixed-point log weights is confirmed against cut
    enumeration on small networks and against a rerun at doubled precision
    otherwise; precision doubles until the candidate is confirmed.

    Raises:
        PrecisionEscalationError: No confirmation within min_cut.max_doublings
    """
    config = get_config()
    bits = config.get("min_cut", "fractional_bits") or 40
    doublings = config.get("min_cut", "max_doublings")
    doublings = 4 if doublings is None else doublings
    verify_vertices = config.get("limits", "verify_vertices") or 12
    use_oracle = len(net.vertices) <= verify_vertices

    oracle_value = None
    if use_oracle:
        oracle_value = enumerate_cuts(net, max_vertices=verify_vertices)[0].value

    for attempt in range(doublings + 1):
        candidate = _log_min_cut(net, bits)
        if use_oracle:
            confirmed = candidate.value == oracle_value
        else:
            confirmed = _log_min_cut(net, 2 * bits).value == candidate.value
        if confirmed:
            logger.debug(f"Min cut confirmed | Network: {net.label} | Value: {candidate.value} | Bits: {bits}")
            return candidate
        logger.warning(f"Min cut not confirmed, doubling precision | Network: {net.label} | "
                       f"Candidate: {candidate.value} | Bits: {bits}")
        bits *= 2

    raise PrecisionEscalationError(
        f"{net.label}: log-weight min cut unconfirmed after {doublings} doublings")


def quantum_min_cut(net: Network) -> int:
    """Minimum over edge cuts of the product of cut capacities, as an exact integer."""
    value = min_product_cut(net).value
    logger.info(f"Quantum min-cut | Network: {net.label} | QMC: {value}")
    return value


# -- paths ------------------------------------------------------------------------

def menger_paths(net: Network) -> PathSet:
    """
    Maximum set of pairwise edge-disjoint input-to-output paths.

    Decomposes a unit-weight maximum flow: each path starts on a flowing
    input edge and follows unused flowing edges until an output terminal,
    cutting out any cycle it closes.

    Returns:
        PathSet with as many paths as the unit min-cut cardinality
    """
    flow = max_flow(net)
    outgoing: Dict[str, List[EdgeFlow]] = {}
    starts: List[EdgeFlow] = []
    for f in flow.flows:
        if isinstance(f.tail, Terminal):
            starts.append(f)
        else:
            outgoing.setdefault(f.tail.vertex, []).append(f)
    used = set()
    starts.sort(key=lambda f: f.tail.index)

    paths = []
    for start in starts:
        edges = [start.edge_id]
        vertices: List[str] = []
        current = start
        while isinstance(current.head, Port):
            vertex = current.head.vertex
            if vertex in vertices:
                # drop the cycle that just closed
                cut_at = vertices.index(vertex)
                vertices = vertices[:cut_at]
                edges = edges[:cut_at + 1]
            vertices.append(vertex)
            nxt = next(f for f in outgoing.get(vertex, []) if f.edge_id not in used)
            used.add(nxt.edge_id)
            edges.append(nxt.edge_id)
            current = nxt
        paths.append(Path(input_terminal=start.tail.index, output_terminal=current.head.index,
                          edges=tuple(edges), vertices=tuple(vertices)))

    logger.debug(f"Menger paths | Network: {net.label} | Paths: {len(paths)}")
    return PathSet(paths=tuple(paths))


# -- capacity transforms ------------------------------------------------------------

def exact_power(c: int, d: int) -> Optional[int]:
    """m with d**m == c, or None."""
    m, value = 0, 1
    while value < c:
        value *= d
        m += 1
    return m if value == c else None


def largest_power_at_most(c: int, d: int) -> int:
    value = 1
    while value * d <= c:
        value *= d
    return value


def _check_base(d: int):
    if not isinstance(d, int) or d < 2:
        raise ParameterError(f"base d must be an integer >= 2, got {d!r}")


def expand_uniform(net: Network, d: int) -> Network:
    """
    Replace every capacity-d^m edge by m parallel capacity-d edges.

    Port i of a vertex becomes m_i consecutive ports in the same relative
    position; terminal indices are renumbered the same way on each side,
    and copy j of an edge joins copy j at both ends. Edges of capacity 1
    disappear.

    Raises:
        PowerOfBaseError: Some capacity is not a power of d
    """
    _check_base(d)
    multiplicity = {}
    for edge in net.edges:
        m = exact_power(edge.capacity, d)
        if m is None:
            raise PowerOfBaseError(edge.id, edge.capacity, d)
        multiplicity[edge.id] = m

    port_offset: Dict[Tuple[str, int], int] = {}
    degrees = {}
    for vid in net.vertex_ids:
        offset = 0
        for port, eid in enumerate(net.port_edges[vid], start=1):
            port_offset[(vid, port)] = offset
            offset += multiplicity[eid]
        degrees[vid] = offset

    terminal_offset: Dict[Tuple[Side, int], int] = {}
    for side in Side:
        offset = 0
        for index, eid in enumerate(net.terminal_edges[side], start=1):
            terminal_offset[(side, index)] = offset
            offset += multiplicity[eid]

    def copy_of(end: Endpoint, j: int) -> Endpoint:
        if isinstance(end, Terminal):
            return Terminal(end.side, terminal_offset[(end.side, end.index)] + j)
        return Port(end.vertex, port_offset[(end.vertex, end.port)] + j)

    edges = []
    for edge in net.edges:
        for j in range(1, multiplicity[edge.id] + 1):
            edges.append(Edge(len(edges), d, copy_of(edge.a, j), copy_of(edge.b, j)))

    vertices = tuple(Vertex(vid, degrees[vid]) for vid in net.vertex_ids)
    expanded = Network(vertices, tuple(edges), name=f"{net.name}/d{d}" if net.name else "")
    logger.debug(f"Expanded | Network: {net.label} | Base: {d} | Edges: {len(net.edges)} -> {len(edges)}")
    return expanded


def thin_network(net: Network, d: int) -> Network:
    """Lower every capacity to the largest power of d not above it."""
    _check_base(d)
    caps = {e.id: largest_power_at_most(e.capacity, d) for e in net.edges}
    return with_capacities(net, caps, name=f"{net.name}~{d}" if net.name else "")


# -- loop-free log flows ---------------------------------------------------------------

@dataclass(frozen=True)
class LoopFreeFlowReport:
    """
    Outcome of the loop-free integral log-flow test for one orientation.

    ``holds`` certifies QMF = QMC; a False verdict only means the flow found
    for this orientation does not certify it.
    """
    holds: bool
    max_flow_matches_cut: bool
    integral: bool
    acyclic: bool
    flow_value: float
    log_qmc: float
    flows: Dict[int, float]


def has_loopfree_power_flow(net: Network, orientation: Optional[Mapping[int, bool]] = None,
                            d: int = 2, bits: Optional[int] = None) -> LoopFreeFlowReport:
    """
    Check the loop-free integral log-flow condition on an oriented network.

    Capacities become log_d c_e in fixed point. The network is oriented as
    given (True keeps a->b, False reverses, missing edges keep a->b). The
    condition holds when the oriented max flow equals log_d QMC, every edge
    flow is log_d of an integer and the flowing edges contain no directed
    cycle.

    Args:
        net: Network
        orientation: Edge id to forward flag
        d: Logarithm base
        bits: Fractional bits (defaults to min_cut.fractional_bits)

    Returns:
        LoopFreeFlowReport
    """
    _check_base(d)
    if bits is None:
        bits = get_config().get("min_cut", "fractional_bits") or 40
    scale = float(1 << bits)
    weights = log_weights(net, bits, base=d)
    graph, arcs = _build_digraph(net, weights, orientation=orientation or {})
    value, flow_dict = nx.maximum_flow(graph, SOURCE, SINK, flow_func=edmonds_karp)
    edge_flows = _edge_flows(net, flow_dict, arcs, weights)

    qmc = quantum_min_cut(net)
    log_qmc = math.log(qmc, d)
    tolerance = (len(net.edges) + 1) / scale
    matches = abs(value / scale - log_qmc) <= tolerance

    flows = {f.edge_id: f.amount / scale for f in edge_flows}
    integral = True
    for amount in flows.values():
        lifted = d ** amount
        if abs(lifted - round(lifted)) > 1e-6 * lifted:
            integral = False
            break

    support = nx.DiGraph()
    for f in edge_flows:
        support.add_edge(_node(f.tail), _node(f.head))
    acyclic = nx.is_directed_acyclic_graph(support)

    report = LoopFreeFlowReport(holds=matches and integral and acyclic, max_flow_matches_cut=matches,
                                integral=integral, acyclic=acyclic, flow_value=value / scale,
                                log_qmc=log_qmc, flows=flows)
    logger.info(f"Loop-free flow check | Network: {net.label} | Holds: {report.holds} | "
                f"Matches: {matches} | Integral: {integral} | Acyclic: {acyclic}")
    return report
