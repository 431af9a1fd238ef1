"""
Network Data Model

Capacity-labelled undirected multigraphs with ordered ports per vertex and
typed open terminals, plus the text format, side swapping, valence types and
brute-force cut enumeration used as an oracle by the flow module.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx

from config import get_config
from core.errors import NetworkSyntaxError, NetworkValidationError, OracleSizeError
from logger import get_logger


logger = get_logger(__name__)


class Side(Enum):
    """Terminal side of an open edge end."""
    INPUT = "S"
    OUTPUT = "T"

    def flipped(self) -> "Side":
        return Side.OUTPUT if self is Side.INPUT else Side.INPUT


@dataclass(frozen=True, order=True)
class Port:
    """Edge end attached to port ``port`` (1-based) of a vertex."""
    vertex: str
    port: int

    def __str__(self) -> str:
        return f"{self.vertex}.{self.port}"


@dataclass(frozen=True)
class Terminal:
    """Open edge end; inputs are S.1..S.|S|, outputs T.1..T.|T|."""
    side: Side
    index: int

    def __str__(self) -> str:
        return f"{self.side.value}.{self.index}"


Endpoint = Union[Port, Terminal]

# Port capacities of a vertex in local order.
ValenceType = Tuple[int, ...]


@dataclass(frozen=True)
class Vertex:
    id: str
    degree: int


@dataclass(frozen=True)
class Edge:
    """An edge; ``id`` is its position in declaration order."""
    id: int
    capacity: int
    a: Endpoint
    b: Endpoint

    @property
    def endpoints(self) -> Tuple[Endpoint, Endpoint]:
        return (self.a, self.b)

    @property
    def is_self_loop(self) -> bool:
        return (isinstance(self.a, Port) and isinstance(self.b, Port)
                and self.a.vertex == self.b.vertex)


@dataclass(frozen=True)
class EdgeCut:
    """
    Edge cut induced by a vertex partition.

    Attributes:
        edges: Ids of the edges crossing the partition
        source_side: Vertices placed with the inputs
        value: Product of the cut edges' capacities (exact)
    """
    edges: FrozenSet[int]
    source_side: FrozenSet[str]
    value: int


@dataclass(frozen=True)
class ValenceTypes:
    """Valence type of every vertex and the distinct types in first-seen order."""
    by_vertex: Dict[str, ValenceType]
    distinct: Tuple[ValenceType, ...]


@dataclass(frozen=True)
class Network:
    """
    Immutable, validated tensor network template.

    Construction validates every invariant and raises NetworkValidationError
    naming the one that failed.
    """
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        _validate(self)

    # -- lookups ---------------------------------------------------------

    @cached_property
    def vertex_ids(self) -> Tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    @cached_property
    def degrees(self) -> Dict[str, int]:
        return {v.id: v.degree for v in self.vertices}

    @cached_property
    def port_edges(self) -> Dict[str, Tuple[int, ...]]:
        """Edge id at each port of each vertex, in port order."""
        table = {v.id: [None] * v.degree for v in self.vertices}
        for edge in self.edges:
            for end in edge.endpoints:
                if isinstance(end, Port):
                    table[end.vertex][end.port - 1] = edge.id
        return {vid: tuple(ids) for vid, ids in table.items()}

    @cached_property
    def terminal_edges(self) -> Dict[Side, Tuple[int, ...]]:
        """Edge id of each terminal, ordered by terminal index."""
        found = {Side.INPUT: {}, Side.OUTPUT: {}}
        for edge in self.edges:
            for end in edge.endpoints:
                if isinstance(end, Terminal):
                    found[end.side][end.index] = edge.id
        return {side: tuple(found[side][k] for k in sorted(found[side])) for side in Side}

    @property
    def inputs(self) -> Tuple[int, ...]:
        return self.terminal_edges[Side.INPUT]

    @property
    def outputs(self) -> Tuple[int, ...]:
        return self.terminal_edges[Side.OUTPUT]

    def edge(self, edge_id: int) -> Edge:
        return self.edges[edge_id]

    def port_capacities(self, vertex_id: str) -> ValenceType:
        return tuple(self.edges[e].capacity for e in self.port_edges[vertex_id])

    def port_of(self, edge_id: int, vertex_id: str) -> int:
        """Port (1-based) where a non-loop edge meets a vertex."""
        for end in self.edges[edge_id].endpoints:
            if isinstance(end, Port) and end.vertex == vertex_id:
                return end.port
        raise KeyError(f"edge {edge_id} does not touch vertex {vertex_id}")

    def terminal_dimension(self, side: Side) -> int:
        dim = 1
        for edge_id in self.terminal_edges[side]:
            dim *= self.edges[edge_id].capacity
        return dim

    @property
    def input_dim(self) -> int:
        return self.terminal_dimension(Side.INPUT)

    @property
    def output_dim(self) -> int:
        return self.terminal_dimension(Side.OUTPUT)

    @property
    def label(self) -> str:
        return self.name or f"<{len(self.vertices)}v/{len(self.edges)}e>"


def _validate(net: Network):
    """Check every Network invariant."""
    degrees = {}
    for vertex in net.vertices:
        if vertex.id in degrees:
            raise NetworkValidationError("unique-vertex", f"vertex {vertex.id!r} declared twice")
        if vertex.id in ("S", "T") or "." in vertex.id or not vertex.id:
            raise NetworkValidationError("vertex-id", f"invalid vertex id {vertex.id!r}")
        if vertex.degree < 0:
            raise NetworkValidationError("vertex-degree", f"vertex {vertex.id!r} has negative degree")
        degrees[vertex.id] = vertex.degree

    used_ports = set()
    terminals = {Side.INPUT: set(), Side.OUTPUT: set()}
    for position, edge in enumerate(net.edges):
        if edge.id != position:
            raise NetworkValidationError("edge-id", f"edge at position {position} has id {edge.id}")
        if not isinstance(edge.capacity, int) or edge.capacity < 1:
            raise NetworkValidationError("capacity", f"edge {edge.id} has capacity {edge.capacity!r} < 1")
        for end in edge.endpoints:
            if isinstance(end, Port):
                if end.vertex not in degrees:
                    raise NetworkValidationError("unknown-vertex", f"edge {edge.id} references {end.vertex!r}")
                if not 1 <= end.port <= degrees[end.vertex]:
                    raise NetworkValidationError(
                        "port-range", f"port {end} outside 1..{degrees[end.vertex]}")
                if (end.vertex, end.port) in used_ports:
                    raise NetworkValidationError("duplicate-port", f"port {end} used by two edge ends")
                used_ports.add((end.vertex, end.port))
            elif isinstance(end, Terminal):
                if end.index in terminals[end.side]:
                    raise NetworkValidationError("duplicate-terminal", f"terminal {end} used twice")
                terminals[end.side].add(end.index)
            else:
                raise NetworkValidationError("endpoint", f"edge {edge.id} has endpoint {end!r}")

    for vid, degree in degrees.items():
        for port in range(1, degree + 1):
            if (vid, port) not in used_ports:
                raise NetworkValidationError("unused-port", f"port {vid}.{port} has no edge")

    for side, indices in terminals.items():
        if indices != set(range(1, len(indices) + 1)):
            raise NetworkValidationError(
                "terminal-gap", f"{side.value} terminal indices {sorted(indices)} are not 1..{len(indices)}")


# -- text format -----------------------------------------------------------

def _parse_endpoint(token: str, line_no: int) -> Endpoint:
    head, sep, tail = token.rpartition(".")
    if not sep or not head:
        raise NetworkSyntaxError(line_no, f"endpoint {token!r} is not <vertex>.<port>, S.<k> or T.<k>")
    try:
        index = int(tail)
    except ValueError:
        raise NetworkSyntaxError(line_no, f"endpoint {token!r} has non-integer index") from None
    if head == "S":
        return Terminal(Side.INPUT, index)
    if head == "T":
        return Terminal(Side.OUTPUT, index)
    return Port(head, index)


def parse_network(text: Union[str, bytes], name: str = "") -> Network:
    """
    Parse the line-oriented network format.

    Lines are ``v <id> <degree>`` and ``e <cap> <endpoint> <endpoint>``;
    ``#`` starts a comment.

    Args:
        text: File contents (bytes are decoded as UTF-8)
        name: Optional label carried by the Network

    Returns:
        Validated Network

    Raises:
        NetworkSyntaxError: Malformed line (with line number)
        NetworkValidationError: A Network invariant is violated
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    vertices: List[Vertex] = []
    edges: List[Edge] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "v":
            if len(tokens) != 3:
                raise NetworkSyntaxError(line_no, "expected 'v <id> <degree>'")
            try:
                degree = int(tokens[2])
            except ValueError:
                raise NetworkSyntaxError(line_no, f"degree {tokens[2]!r} is not an integer") from None
            vertices.append(Vertex(tokens[1], degree))
        elif kind == "e":
            if len(tokens) != 4:
                raise NetworkSyntaxError(line_no, "expected 'e <cap> <endpoint> <endpoint>'")
            try:
                capacity = int(tokens[1])
            except ValueError:
                raise NetworkSyntaxError(line_no, f"capacity {tokens[1]!r} is not an integer") from None
            a = _parse_endpoint(tokens[2], line_no)
            b = _parse_endpoint(tokens[3], line_no)
            edges.append(Edge(len(edges), capacity, a, b))
        else:
            raise NetworkSyntaxError(line_no, f"unknown record type {kind!r}")

    net = Network(tuple(vertices), tuple(edges), name=name)
    logger.debug(f"Network parsed | Name: {net.label} | Vertices: {len(vertices)} | Edges: {len(edges)}")
    return net


def serialize_network(net: Network) -> str:
    """Emit vertices then edges in declaration order."""
    lines = [f"v {v.id} {v.degree}" for v in net.vertices]
    lines += [f"e {e.capacity} {e.a} {e.b}" for e in net.edges]
    return "\n".join(lines) + "\n"


# -- transformations -------------------------------------------------------

def _flip(end: Endpoint) -> Endpoint:
    if isinstance(end, Terminal):
        return Terminal(end.side.flipped(), end.index)
    return end


def swap_sides(net: Network) -> Network:
    """Exchange the roles of input and output terminals."""
    edges = tuple(replace(e, a=_flip(e.a), b=_flip(e.b)) for e in net.edges)
    return Network(net.vertices, edges, name=net.name)


def with_capacities(net: Network, capacities: Mapping[int, int], name: Optional[str] = None) -> Network:
    """Copy of ``net`` with the given edge capacities replaced."""
    edges = tuple(replace(e, capacity=capacities.get(e.id, e.capacity)) for e in net.edges)
    return Network(net.vertices, edges, name=net.name if name is None else name)


def scale_capacities(net: Network, factor: int) -> Network:
    """Multiply every capacity by ``factor``."""
    return with_capacities(net, {e.id: e.capacity * factor for e in net.edges},
                           name=f"{net.name}*{factor}" if net.name else "")


def valence_types(net: Network) -> ValenceTypes:
    """
    Port-capacity sequence of every vertex under its local ordering.

    Returns:
        ValenceTypes with the per-vertex map and the distinct types
    """
    by_vertex = {vid: net.port_capacities(vid) for vid in net.vertex_ids}
    distinct = tuple(dict.fromkeys(by_vertex.values()))
    return ValenceTypes(by_vertex=by_vertex, distinct=distinct)


# -- cuts --------------------------------------------------------------------

def _endpoint_code(end: Endpoint, index: Dict[str, int]) -> int:
    """-1 for inputs, -2 for outputs, vertex position otherwise."""
    if isinstance(end, Terminal):
        return -1 if end.side is Side.INPUT else -2
    return index[end.vertex]


def enumerate_cuts(net: Network, max_vertices: Optional[int] = None) -> List[EdgeCut]:
    """
    Enumerate the cuts induced by every input/output vertex partition.

    Cuts are deduplicated by edge set and sorted by value, then edge ids.

    Args:
        net: Network to enumerate
        max_vertices: Size guard (defaults to limits.oracle_vertices)

    Returns:
        List of EdgeCut, ascending by value

    Raises:
        OracleSizeError: More vertices than the guard allows
    """
    if max_vertices is None:
        max_vertices = get_config().get("limits", "oracle_vertices") or 20
    n = len(net.vertices)
    if n > max_vertices:
        raise OracleSizeError(f"{n} vertices exceed the oracle limit of {max_vertices}")

    index = {vid: i for i, vid in enumerate(net.vertex_ids)}
    coded = [(e.id, e.capacity, _endpoint_code(e.a, index), _endpoint_code(e.b, index))
             for e in net.edges if not e.is_self_loop]

    seen: Dict[FrozenSet[int], EdgeCut] = {}
    for mask in range(1 << n):
        # bit set -> vertex on the output side
        def side(code: int) -> int:
            if code == -1:
                return 0
            if code == -2:
                return 1
            return (mask >> code) & 1

        cut = frozenset(eid for eid, _, a, b in coded if side(a) != side(b))
        if cut in seen:
            continue
        value = 1
        for eid, cap, _, _ in coded:
            if eid in cut:
                value *= cap
        source_side = frozenset(vid for vid, i in index.items() if not (mask >> i) & 1)
        seen[cut] = EdgeCut(edges=cut, source_side=source_side, value=value)

    cuts = sorted(seen.values(), key=lambda c: (c.value, sorted(c.edges)))
    logger.debug(f"Cuts enumerated | Network: {net.label} | Partitions: {1 << n} | Distinct: {len(cuts)}")
    return cuts


def is_separating(net: Network, removed: Iterable[int]) -> bool:
    """True when removing the given edges leaves no input-to-output path."""
    removed = set(removed)
    graph = nx.MultiGraph()
    for edge in net.edges:
        if edge.id in removed:
            continue
        graph.add_edge(str(edge.a) if isinstance(edge.a, Terminal) else edge.a.vertex,
                       str(edge.b) if isinstance(edge.b, Terminal) else edge.b.vertex)
    sources = [f"S.{k}" for k in range(1, len(net.inputs) + 1)]
    sinks = [f"T.{k}" for k in range(1, len(net.outputs) + 1)]
    for s in sources:
        if s not in graph:
            continue
        reachable = nx.node_connected_component(graph, s)
        if any(t in reachable for t in sinks):
            return False
    return True
