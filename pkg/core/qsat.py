"""
Generic Quantum Satisfiability

Instances of ranked projector constraints on qudits, the generic kernel
dimension of their Hamiltonian over a prime field, a complex Hamiltonian
for inspection, and the checks tying kernel dimensions of qudit chains to
the max flow of matching tensor networks.
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import get_config
from core.errors import InconsistentKernelError, ParameterError, QsatSyntaxError, ResourceLimitError
from core.linalg import rank_exact, rank_numeric
from core.qmf import estimate_qmf
from core.tensor import ComplexFloat, PrimeField, domain_from_name
from logger import get_logger
from utils.fixtures import four_qudit_network, three_qudit_network
from utils.seeding import derive_seed, rng_for


logger = get_logger(__name__)


@dataclass(frozen=True)
class Constraint:
    """Rank-``rank`` projector on the listed qudits (0-based, in tensor order)."""
    qudits: Tuple[int, ...]
    rank: int


@dataclass(frozen=True)
class QsatInstance:
    dims: Tuple[int, ...]
    constraints: Tuple[Constraint, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if any(d < 1 for d in self.dims):
            raise ParameterError(f"qudit dimensions must be positive, got {self.dims}")
        for c in self.constraints:
            if not c.qudits:
                raise ParameterError("constraint on an empty set of qudits")
            if len(set(c.qudits)) != len(c.qudits):
                raise ParameterError(f"constraint repeats a qudit: {c.qudits}")
            if any(not 0 <= q < len(self.dims) for q in c.qudits):
                raise ParameterError(f"constraint qudits {c.qudits} outside 0..{len(self.dims) - 1}")
            if not 0 <= c.rank <= self.constraint_dim(c):
                raise ParameterError(f"rank {c.rank} outside 0..{self.constraint_dim(c)} on {c.qudits}")

    @classmethod
    def chain(cls, dims: Sequence[int], ranks: Sequence[int]) -> "QsatInstance":
        """Nearest-neighbour chain: constraint i acts on qudits i and i+1."""
        if len(ranks) != len(dims) - 1:
            raise ParameterError(f"a chain of {len(dims)} qudits takes {len(dims) - 1} ranks, got {len(ranks)}")
        return cls(tuple(dims), tuple(Constraint((i, i + 1), int(r)) for i, r in enumerate(ranks)))

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def constraint_dim(self, constraint: Constraint) -> int:
        return math.prod(self.dims[q] for q in constraint.qudits)


def parse_qsat(text: str) -> QsatInstance:
    """
    Parse ``q <dims...>`` followed by ``c <rank> <qudits...>`` lines (qudits 1-based).

    Raises:
        QsatSyntaxError: Malformed line or out-of-range values
    """
    dims = None
    constraints = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            values = [int(tok) for tok in tokens[1:]]
        except ValueError:
            raise QsatSyntaxError(line_no, "expected integers") from None
        if tokens[0] == "q":
            if dims is not None:
                raise QsatSyntaxError(line_no, "qudit dimensions declared twice")
            if not values or min(values) < 1:
                raise QsatSyntaxError(line_no, "dimensions must be positive integers")
            dims = tuple(values)
        elif tokens[0] == "c":
            if dims is None:
                raise QsatSyntaxError(line_no, "constraint before the 'q' line")
            if len(values) < 2:
                raise QsatSyntaxError(line_no, "expected 'c <rank> <qudit> ...'")
            rank, qudits = values[0], tuple(q - 1 for q in values[1:])
            if any(not 0 <= q < len(dims) for q in qudits) or len(set(qudits)) != len(qudits):
                raise QsatSyntaxError(line_no, f"bad qudit list {values[1:]}")
            if not 0 <= rank <= math.prod(dims[q] for q in qudits):
                raise QsatSyntaxError(line_no, f"rank {rank} out of bounds")
            constraints.append(Constraint(qudits, rank))
        else:
            raise QsatSyntaxError(line_no, f"unknown record type {tokens[0]!r}")
    if dims is None:
        raise QsatSyntaxError(0, "missing 'q' line")
    return QsatInstance(dims, tuple(constraints))


def serialize_qsat(inst: QsatInstance) -> str:
    lines = ["q " + " ".join(str(d) for d in inst.dims)]
    lines += [f"c {c.rank} " + " ".join(str(q + 1) for q in c.qudits) for c in inst.constraints]
    return "\n".join(lines) + "\n"


def _natural_order(inst: QsatInstance, constraint: Constraint) -> Tuple[Tuple[int, ...], Tuple[int, ...], List[int]]:
    """(constraint qudits, complement, axis permutation back to qudit order)."""
    rest = tuple(q for q in range(len(inst.dims)) if q not in constraint.qudits)
    order = list(constraint.qudits) + list(rest)
    return constraint.qudits, rest, [order.index(q) for q in range(len(inst.dims))]


def _embed_rows(inst: QsatInstance, constraint: Constraint, rows: np.ndarray) -> np.ndarray:
    """Rows acting on the constraint's qudits, tensored with identity on the rest."""
    _, rest, perm = _natural_order(inst, constraint)
    comp = math.prod(inst.dims[q] for q in rest)
    block = np.kron(rows, np.eye(comp, dtype=rows.dtype))
    shape = [inst.dims[q] for q in constraint.qudits] + [inst.dims[q] for q in rest]
    block = block.reshape([block.shape[0]] + shape)
    block = block.transpose([0] + [1 + axis for axis in perm])
    return block.reshape(block.shape[0], inst.total_dim)


def constraint_matrix(inst: QsatInstance, seed: int, prime: int) -> np.ndarray:
    """Stacked random constraint rows over F_p, one block per constraint."""
    blocks = []
    for index, c in enumerate(inst.constraints):
        if c.rank == 0:
            continue
        rng = rng_for(seed, "constraint", index)
        rows = rng.integers(0, prime, size=(c.rank, inst.constraint_dim(c)), dtype=np.int64)
        blocks.append(_embed_rows(inst, c, rows))
    if not blocks:
        return np.zeros((0, inst.total_dim), dtype=np.int64)
    return np.vstack(blocks)


def _check_size(inst: QsatInstance, max_entries: Optional[int]):
    if max_entries is None:
        max_entries = get_config().get("limits", "qsat_max_entries") or 2 ** 20
    rows = sum(c.rank * inst.total_dim // inst.constraint_dim(c) for c in inst.constraints)
    if rows * inst.total_dim > max_entries:
        raise ResourceLimitError(f"{rows}x{inst.total_dim} constraint matrix exceeds {max_entries} entries")


def generic_kernel_dim(inst: QsatInstance, seed: Optional[int] = None, domain: Optional[PrimeField] = None,
                       max_entries: Optional[int] = None) -> int:
    """
    Kernel dimension of the Hamiltonian for generic constraints.

    A state is in the kernel exactly when every constraint annihilates it,
    so the answer is the total dimension minus the rank of the stacked
    constraint rows (each tensored with identity on the other qudits).

    Args:
        inst: QSAT instance
        seed: Seed for the random constraint rows
        domain: PrimeField to sample in (configured prime by default)
        max_entries: Cap on rows*columns of the stacked matrix

    Returns:
        Generic kernel dimension

    Raises:
        ResourceLimitError: The stacked matrix is too large
    """
    if domain is None:
        domain = domain_from_name("field")
    if seed is None:
        seed = get_config().get("sampling", "seed") or 0
    _check_size(inst, max_entries)
    stacked = constraint_matrix(inst, seed, domain.p)
    dim = inst.total_dim - rank_exact(stacked, domain.p)
    logger.debug(f"Kernel dimension | Dims: {inst.dims} | Rows: {stacked.shape[0]} | Kernel: {dim}")
    return dim


def stable_kernel_dim(inst: QsatInstance, seed: Optional[int] = None, domain: Optional[PrimeField] = None,
                      max_entries: Optional[int] = None) -> int:
    """
    generic_kernel_dim agreed on by independent seeds.

    Two seeds are tried; if they disagree a third decides by majority.

    Raises:
        InconsistentKernelError: All three seeds disagree
    """
    if seed is None:
        seed = get_config().get("sampling", "seed") or 0
    values = [generic_kernel_dim(inst, derive_seed(seed, "kernel", i), domain, max_entries) for i in range(2)]
    if values[0] == values[1]:
        return values[0]
    logger.warning(f"Kernel dimension seeds disagree, trying a third | Dims: {inst.dims} | Values: {values}")
    values.append(generic_kernel_dim(inst, derive_seed(seed, "kernel", 2), domain, max_entries))
    for value in values:
        if values.count(value) >= 2:
            return value
    raise InconsistentKernelError(f"kernel dimensions {values} from three seeds")


def kernel_dim_bound(inst: QsatInstance) -> int:
    """max(0, D - sum of rank * D / constraint dimension)."""
    total = inst.total_dim
    return max(0, total - sum(c.rank * total // inst.constraint_dim(c) for c in inst.constraints))


def hamiltonian_matrix(inst: QsatInstance, seed: int) -> np.ndarray:
    """
    Complex Hamiltonian sum of Pi_e tensored with identity, Pi_e = M^dagger M.

    M is a random complex Gaussian matrix of the constraint's rank, so each
    term is positive semidefinite with that rank.
    """
    domain = ComplexFloat()
    total = inst.total_dim
    hamiltonian = np.zeros((total, total), dtype=np.complex128)
    for index, c in enumerate(inst.constraints):
        if c.rank == 0:
            continue
        m = domain.random(rng_for(seed, "projector", index), (c.rank, inst.constraint_dim(c)))
        projector = m.conj().T @ m
        _, rest, perm = _natural_order(inst, c)
        comp = math.prod(inst.dims[q] for q in rest)
        term = np.kron(projector, np.eye(comp))
        shape = [inst.dims[q] for q in c.qudits] + [inst.dims[q] for q in rest]
        term = term.reshape(shape + shape)
        n = len(inst.dims)
        term = term.transpose(perm + [n + axis for axis in perm])
        hamiltonian += term.reshape(total, total)
    return hamiltonian


def kernel_dim_numeric(inst: QsatInstance, seed: int, rtol: Optional[float] = None) -> int:
    """Numeric nullity of hamiltonian_matrix."""
    return inst.total_dim - rank_numeric(hamiltonian_matrix(inst, seed), rtol)


# -- chain claims -----------------------------------------------------------------

@dataclass(frozen=True)
class ClaimReport:
    """
    Kernel dimension of a qudit chain against its network's sampled max flow.

    ``holds`` compares the kernel dimension with the input dimension minus
    the sampled max flow; ``implied_qmf`` is the max flow the kernel
    dimension certifies.
    """
    params: Dict[str, int]
    gqsat: int
    qmf: int
    qmc: int
    input_dim: int
    expected_gqsat: int
    implied_qmf: int
    holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _network_qmf(net, trials: Optional[int], seed: Optional[int]) -> Tuple[int, int]:
    if net is None:
        return 0, 0
    estimate = estimate_qmf(net, trials=trials, seed=seed, domain=domain_from_name("field"))
    return estimate.best, estimate.qmc


def _claim(params: Dict[str, int], inst: QsatInstance, net, input_dim: int,
           trials: Optional[int], seed: Optional[int]) -> ClaimReport:
    gqsat = stable_kernel_dim(inst, seed)
    qmf, qmc = _network_qmf(net, trials, seed)
    report = ClaimReport(params=params, gqsat=gqsat, qmf=qmf, qmc=qmc, input_dim=input_dim,
                         expected_gqsat=input_dim - qmf, implied_qmf=input_dim - gqsat,
                         holds=gqsat == input_dim - qmf)
    logger.info(f"Claim check | Params: {params} | GQSAT: {gqsat} | QMF: {qmf} | Holds: {report.holds}")
    return report


def _check_positive(**values):
    for name, value in values.items():
        if value < 1:
            raise ParameterError(f"{name} must be >= 1, got {value}")


def check_claim_three_qudit(d1: int, d2: int, d3: int, r1: int, r2: int,
                            trials: Optional[int] = None, seed: Optional[int] = None) -> ClaimReport:
    """
    Chain (d1, d2, d3) with ranks (r1, r2): GQSAT = d3 (d1 d2 - r1) - QMF.

    Raises:
        ParameterError: Dimensions below 1 or ranks out of bounds
    """
    _check_positive(d1=d1, d2=d2, d3=d3)
    if not (0 <= r1 <= d1 * d2 and 0 <= r2 <= d2 * d3):
        raise ParameterError(f"ranks ({r1}, {r2}) out of bounds for dims ({d1}, {d2}, {d3})")
    inst = QsatInstance.chain((d1, d2, d3), (r1, r2))
    net = three_qudit_network(d1, d2, d3, r1, r2)
    params = {"d1": d1, "d2": d2, "d3": d3, "r1": r1, "r2": r2}
    return _claim(params, inst, net, d3 * (d1 * d2 - r1), trials, seed)


def check_claim_four_qudit(d1: int, d2: int, d3: int, d4: int, r1: int, r2: int, r3: int,
                           trials: Optional[int] = None, seed: Optional[int] = None) -> ClaimReport:
    """
    Chain (d1..d4) with ranks (r1, r2, r3): GQSAT = (d1 d2 - r1)(d3 d4 - r3) - QMF.

    Raises:
        ParameterError: Dimensions below 1 or ranks out of bounds
    """
    _check_positive(d1=d1, d2=d2, d3=d3, d4=d4)
    if not (0 <= r1 <= d1 * d2 and 0 <= r2 <= d2 * d3 and 0 <= r3 <= d3 * d4):
        raise ParameterError(f"ranks ({r1}, {r2}, {r3}) out of bounds for dims ({d1}, {d2}, {d3}, {d4})")
    inst = QsatInstance.chain((d1, d2, d3, d4), (r1, r2, r3))
    net = four_qudit_network(d1, d2, d3, d4, r1, r2, r3)
    params = {"d1": d1, "d2": d2, "d3": d3, "d4": d4, "r1": r1, "r2": r2, "r3": r3}
    return _claim(params, inst, net, (d1 * d2 - r1) * (d3 * d4 - r3), trials, seed)
