"""
Tensor Contraction Engine

Dense vertex tensors over a prime field or complex doubles, random and
shared-by-valence-type assignments, greedy contraction planning and the
contraction that turns a (Network, TensorAssignment) pair into the matrix
from the input space to the output space.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np

from config import get_config
from core import linalg
from core.errors import DomainMismatchError, InputError, ResourceLimitError, ShapeMismatchError
from core.netgraph import Network, Port, Terminal, valence_types
from logger import get_logger
from utils.seeding import rng_for


logger = get_logger(__name__)


# -- scalar domains ----------------------------------------------------------

@dataclass(frozen=True)
class PrimeField:
    """Exact arithmetic mod an odd prime p < 2^62 (entries stored as Python ints)."""
    p: int = 2305843009213693951

    name = "field"
    exact = True

    def __post_init__(self):
        if self.p == 2 or not linalg.is_field_prime(self.p):
            raise InputError(f"prime {self.p} is not an odd prime below 2^62")

    def random(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        return np.asarray(rng.integers(0, self.p, size=shape, dtype=np.int64)).astype(object)

    def coerce(self, values) -> np.ndarray:
        return np.mod(np.asarray(values, dtype=object), self.p)

    def reduce(self, values: np.ndarray) -> np.ndarray:
        return values % self.p

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64).astype(object)

    def one(self) -> np.ndarray:
        return np.ones((), dtype=np.int64).astype(object)

    def rank(self, matrix: np.ndarray, rtol: Optional[float] = None) -> int:
        return linalg.rank_exact(matrix, self.p)

    def accepts(self, values: np.ndarray) -> bool:
        return values.dtype == object or values.dtype.kind in "iub"

    def format_entry(self, value) -> str:
        return str(int(value))

    def parse_entry(self, token: str):
        return int(token) % self.p


@dataclass(frozen=True)
class ComplexFloat:
    """IEEE double-precision complex numbers."""

    name = "complex"
    exact = False

    def random(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        re = rng.standard_normal(size=shape)
        im = rng.standard_normal(size=shape)
        return np.asarray((re + 1j * im) / math.sqrt(2.0), dtype=np.complex128)

    def coerce(self, values) -> np.ndarray:
        return np.asarray(values, dtype=np.complex128)

    def reduce(self, values: np.ndarray) -> np.ndarray:
        return values

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.complex128)

    def one(self) -> np.ndarray:
        return np.ones((), dtype=np.complex128)

    def rank(self, matrix: np.ndarray, rtol: Optional[float] = None) -> int:
        return linalg.rank_numeric(matrix, rtol)

    def accepts(self, values: np.ndarray) -> bool:
        return values.dtype.kind in "fciub"

    def format_entry(self, value) -> str:
        value = complex(value)
        return f"{value.real!r},{value.imag!r}"

    def parse_entry(self, token: str):
        re, _, im = token.partition(",")
        return complex(float(re), float(im or 0.0))


ScalarDomain = Union[PrimeField, ComplexFloat]


def domain_from_name(name: str, prime: Optional[int] = None) -> ScalarDomain:
    """Build a domain from its CLI/config name ("field" or "complex")."""
    if name == "complex":
        return ComplexFloat()
    if name == "field":
        return PrimeField(int(prime or get_config().get("sampling", "prime") or PrimeField.p))
    raise InputError(f"unknown scalar domain {name!r}")


# -- assignments ---------------------------------------------------------------

@dataclass(frozen=True)
class TensorAssignment:
    """
    Vertex id to dense tensor, all over one scalar domain.

    Tensors are stored read-only; Version II assignments share one array
    between all vertices of a valence type.
    """
    domain: ScalarDomain
    tensors: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        frozen = {}
        for vid, values in self.tensors.items():
            arr = np.asarray(values)
            arr.setflags(write=False)
            frozen[vid] = arr
        object.__setattr__(self, "tensors", frozen)

    def __getitem__(self, vertex_id: str) -> np.ndarray:
        return self.tensors[vertex_id]

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def __len__(self) -> int:
        return len(self.tensors)

    def items(self):
        return self.tensors.items()

    def scaled(self, factor) -> "TensorAssignment":
        """Every tensor multiplied by ``factor`` (reduced in the domain)."""
        return TensorAssignment(self.domain, {
            vid: self.domain.reduce(t * factor) for vid, t in self.tensors.items()})

    def replaced(self, updates: Mapping[str, np.ndarray]) -> "TensorAssignment":
        tensors = dict(self.tensors)
        tensors.update(updates)
        return TensorAssignment(self.domain, tensors)


def random_assignment(net: Network, domain: ScalarDomain, seed: int) -> TensorAssignment:
    """
    Independent random tensor at every vertex.

    Each vertex draws from its own stream seeded by (seed, vertex id), so a
    vertex's tensor does not depend on the other vertices.

    Args:
        net: Network whose valence types fix the shapes
        domain: PrimeField (uniform residues) or ComplexFloat (complex Gaussian)
        seed: Base seed

    Returns:
        TensorAssignment
    """
    tensors = {vid: domain.random(rng_for(seed, "vertex", vid), net.port_capacities(vid))
               for vid in net.vertex_ids}
    return TensorAssignment(domain, tensors)


def shared_random_assignment(net: Network, domain: ScalarDomain, seed: int) -> TensorAssignment:
    """
    One random tensor per valence type, shared by every vertex of that type.

    The stream depends only on (seed, valence type), so two networks sampled
    with one seed agree on every common type.
    """
    types = valence_types(net)
    by_type = {vt: domain.random(rng_for(seed, "valence", ",".join(map(str, vt))), vt)
               for vt in types.distinct}
    tensors = {vid: by_type[vt] for vid, vt in types.by_vertex.items()}
    return TensorAssignment(domain, tensors)


def dump_assignment(assign: TensorAssignment) -> str:
    """One ``t <vertex> <shape> <entries...>`` line per vertex; shape is ``AxBxC`` or ``-``."""
    lines = []
    for vid, tensor in assign.items():
        shape = "x".join(str(s) for s in tensor.shape) or "-"
        entries = " ".join(assign.domain.format_entry(v) for v in tensor.reshape(-1))
        lines.append(f"t {vid} {shape} {entries}".rstrip())
    return "\n".join(lines) + "\n"


def load_assignment(text: str, domain: Optional[ScalarDomain] = None) -> TensorAssignment:
    """
    Parse a dump produced by dump_assignment.

    Without an explicit domain, ``re,im`` entries select ComplexFloat and
    plain integers select the configured PrimeField.
    """
    records = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "t" or len(tokens) < 3:
            raise InputError(f"line {line_no}: expected 't <vertex> <shape> <entries...>'")
        shape = () if tokens[2] == "-" else tuple(int(s) for s in tokens[2].split("x"))
        if len(tokens) - 3 != math.prod(shape):
            raise InputError(f"line {line_no}: {len(tokens) - 3} entries for shape {shape}")
        records.append((tokens[1], shape, tokens[3:]))

    if domain is None:
        is_complex = any("," in tok for _, _, entries in records for tok in entries)
        domain = ComplexFloat() if is_complex else domain_from_name("field")

    tensors = {}
    for vid, shape, entries in records:
        values = [domain.parse_entry(tok) for tok in entries]
        tensors[vid] = domain.coerce(np.array(values, dtype=object).reshape(shape))
    return TensorAssignment(domain, tensors)


# -- planning ------------------------------------------------------------------

@dataclass(frozen=True)
class ContractionStep:
    """Merge of two current tensors (identified by their vertex groups)."""
    left: Tuple[str, ...]
    right: Tuple[str, ...]
    edges: Tuple[int, ...]
    entries: int


@dataclass(frozen=True)
class ContractionPlan:
    steps: Tuple[ContractionStep, ...]
    peak_entries: int


def _vertex_legs(net: Network, vid: str) -> List[int]:
    return list(net.port_edges[vid])


def _open_legs(net: Network, group: Tuple[str, ...]) -> Dict[int, int]:
    """Edges with exactly one end in ``group``, mapped to their capacity."""
    inside = set(group)
    legs = {}
    for vid in group:
        for eid in net.port_edges[vid]:
            edge = net.edges[eid]
            ends_inside = sum(1 for end in edge.endpoints
                              if isinstance(end, Port) and end.vertex in inside)
            if ends_inside == 1:
                legs[eid] = edge.capacity
    return legs


def _size(legs: Mapping[int, int]) -> int:
    return math.prod(legs.values())


def _plan_from_merges(net: Network, choose) -> ContractionPlan:
    """Build a plan by repeatedly merging the pair picked by ``choose``."""
    order = {vid: i for i, vid in enumerate(net.vertex_ids)}
    groups: List[Tuple[str, ...]] = [(vid,) for vid in net.vertex_ids]
    legs = {g: _open_legs(net, g) for g in groups}
    peak = max((_size(l) for l in legs.values()), default=1)
    steps = []
    while len(groups) > 1:
        left, right = choose(groups, legs, order)
        shared = tuple(sorted(set(legs[left]) & set(legs[right])))
        merged = tuple(sorted(left + right, key=order.get))
        merged_legs = _open_legs(net, merged)
        entries = _size(merged_legs)
        steps.append(ContractionStep(left=left, right=right, edges=shared, entries=entries))
        peak = max(peak, entries)
        groups = [g for g in groups if g not in (left, right)] + [merged]
        groups.sort(key=lambda g: order[g[0]])
        legs[merged] = merged_legs
    return ContractionPlan(steps=tuple(steps), peak_entries=peak)


def _greedy_choice(groups, legs, order):
    best = None
    for i, a in enumerate(groups):
        for b in groups[i + 1:]:
            shared = set(legs[a]) & set(legs[b])
            if not shared:
                continue
            size = _size({e: c for e, c in {**legs[a], **legs[b]}.items() if e not in shared})
            key = (size, order[a[0]], order[b[0]])
            if best is None or key < best[0]:
                best = (key, a, b)
    if best is None:
        # Disconnected components: outer product in declaration order.
        return groups[0], groups[1]
    return best[1], best[2]


def plan_contraction(net: Network) -> ContractionPlan:
    """
    Greedy plan: always merge the adjacent pair with the smallest result.

    Ties go to the pair whose first vertices come earliest in declaration
    order. Components that share no edge are joined last by outer products.
    """
    plan = _plan_from_merges(net, _greedy_choice)
    logger.debug(f"Plan built | Network: {net.label} | Steps: {len(plan.steps)} | Peak: {plan.peak_entries}")
    return plan


def naive_plan(net: Network) -> ContractionPlan:
    """Fold vertices into one tensor in declaration order."""
    def choose(groups, legs, order):
        return groups[0], groups[1]
    return _plan_from_merges(net, choose)


# -- contraction -----------------------------------------------------------------

@dataclass(frozen=True)
class ContractionResult:
    """
    Matrix of the contracted network.

    Rows follow the output multi-index (T.1 most significant), columns the
    input multi-index (S.1 most significant).
    """
    matrix: np.ndarray
    domain: ScalarDomain
    output_dims: Tuple[int, ...]
    input_dims: Tuple[int, ...]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    def rank(self, rtol: Optional[float] = None) -> int:
        return self.domain.rank(self.matrix, rtol)


def check_dimension(net: Network, max_dim: Optional[int] = None):
    """Raise ResourceLimitError when dim(V_S)·dim(V_T) exceeds the cap."""
    if max_dim is None:
        max_dim = get_config().get("limits", "max_dim") or 2 ** 20
    entries = net.input_dim * net.output_dim
    if entries > max_dim:
        raise ResourceLimitError(
            f"{net.label}: {net.output_dim}x{net.input_dim} matrix exceeds max-dim {max_dim}")


def _leg_label(net: Network, eid: int):
    """Terminal label for terminal edges, the edge id otherwise."""
    edge = net.edges[eid]
    for end in edge.endpoints:
        if isinstance(end, Terminal):
            return str(end)
    return eid


def _validate_assignment(net: Network, assign: TensorAssignment):
    domain = assign.domain
    for vid in net.vertex_ids:
        if vid not in assign.tensors:
            raise ShapeMismatchError(f"no tensor for vertex {vid!r}")
        tensor = assign[vid]
        expected = net.port_capacities(vid)
        if tensor.shape != expected:
            raise ShapeMismatchError(f"vertex {vid!r}: tensor shape {tensor.shape}, valence type {expected}")
        if not domain.accepts(tensor):
            raise DomainMismatchError(f"vertex {vid!r}: {tensor.dtype} entries in a {domain.name} assignment")


def _trace_self_loops(tensor: np.ndarray, labels: list) -> Tuple[np.ndarray, list]:
    """Sum over the diagonal of every pair of axes carrying the same edge."""
    while True:
        seen = {}
        pair = None
        for axis, label in enumerate(labels):
            if label in seen:
                pair = (seen[label], axis)
                break
            seen[label] = axis
        if pair is None:
            return tensor, labels
        i, j = pair
        tensor = np.diagonal(tensor, axis1=i, axis2=j).sum(axis=-1)
        labels = [l for k, l in enumerate(labels) if k not in (i, j)]


def _merge(a: np.ndarray, la: list, b: np.ndarray, lb: list, domain) -> Tuple[np.ndarray, list]:
    shared = [l for l in la if l in lb]
    axes = ([la.index(l) for l in shared], [lb.index(l) for l in shared])
    result = np.tensordot(a, b, axes=axes)
    labels = [l for l in la if l not in shared] + [l for l in lb if l not in shared]
    return domain.reduce(np.asarray(result)), labels


def contract(net: Network, assign: TensorAssignment,
             plan: Optional[ContractionPlan] = None) -> ContractionResult:
    """
    Contract the network into its output-by-input matrix.

    Entry (I_T, I_S) is the sum over internal-edge indices of the product
    of the vertex tensor entries. Pass-through edges between two terminals
    contribute identity factors.

    Args:
        net: Network
        assign: Tensor per vertex, shaped by valence type
        plan: Contraction order (greedy plan when omitted)

    Returns:
        ContractionResult with a dim(V_T) x dim(V_S) matrix

    Raises:
        ShapeMismatchError: A tensor does not fit its vertex
        DomainMismatchError: A tensor's entries do not belong to the domain
    """
    _validate_assignment(net, assign)
    domain = assign.domain
    if plan is None:
        plan = plan_contraction(net)

    current: Dict[Tuple[str, ...], Tuple[np.ndarray, list]] = {}
    for vid in net.vertex_ids:
        labels = [_leg_label(net, eid) for eid in _vertex_legs(net, vid)]
        tensor = domain.coerce(assign[vid])
        traced, labels = _trace_self_loops(tensor, labels)
        current[(vid,)] = (domain.reduce(traced), labels)

    order = {vid: i for i, vid in enumerate(net.vertex_ids)}
    for step in plan.steps:
        a, la = current.pop(step.left)
        b, lb = current.pop(step.right)
        merged = tuple(sorted(step.left + step.right, key=order.get))
        current[merged] = _merge(a, la, b, lb, domain)

    pieces = list(current.values())
    for edge in net.edges:
        if isinstance(edge.a, Terminal) and isinstance(edge.b, Terminal):
            pieces.append((domain.identity(edge.capacity), [str(edge.a), str(edge.b)]))

    if pieces:
        tensor, labels = pieces[0]
        for piece, piece_labels in pieces[1:]:
            tensor, labels = _merge(tensor, labels, piece, piece_labels, domain)
    else:
        tensor, labels = domain.one(), []

    out_labels = [f"T.{k}" for k in range(1, len(net.outputs) + 1)]
    in_labels = [f"S.{k}" for k in range(1, len(net.inputs) + 1)]
    if sorted(labels) != sorted(out_labels + in_labels):
        raise ShapeMismatchError(f"contraction left legs {labels}, expected terminals only")
    tensor = np.transpose(tensor, [labels.index(l) for l in out_labels + in_labels])

    output_dims = tuple(net.edges[e].capacity for e in net.outputs)
    input_dims = tuple(net.edges[e].capacity for e in net.inputs)
    matrix = np.reshape(tensor, (math.prod(output_dims), math.prod(input_dims)))
    logger.debug(f"Contracted | Network: {net.label} | Shape: {matrix.shape} | Domain: {domain.name}")
    return ContractionResult(matrix=matrix, domain=domain, output_dims=output_dims, input_dims=input_dims)
