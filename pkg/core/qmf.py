"""
Quantum Max-Flow Estimation

Randomized rank sampling for both versions of the quantum max flow, the
path-tensor construction that attains the min cut on power-of-d networks,
lower bounds by thinning, the GHZ-form decomposition of 2x2x2 tensors, the
rank-3 symmetry check and the parametrized example families.
"""

import itertools
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from config import get_config
from core.errors import DegenerateTensorError, InvariantViolation, ParameterError
from core.flow import expand_uniform, menger_paths, quantum_min_cut, thin_network, unit_min_cut_cardinality
from core.netgraph import Network, parse_network, scale_capacities
from core.tensor import (PrimeField, ScalarDomain, TensorAssignment, check_dimension,
                         contract, domain_from_name, plan_contraction, random_assignment,
                         shared_random_assignment)
from logger import get_logger, log_estimate
from utils.fixtures import fig7_family
from utils.seeding import derive_seed, rng_for, trial_seeds


logger = get_logger(__name__)


@dataclass(frozen=True)
class QmfEstimate:
    """
    Best sampled rank, a certified lower bound on the quantum max flow.

    Attributes:
        best: Largest rank seen
        trials: Trials actually run (sampling stops once a rank reaches the min cut)
        seeds: Seed of every trial, in order
        ranks: Rank of every trial, in order
        qmc: Quantum min-cut of the network
        version: 1 (independent tensors) or 2 (shared per valence type)
    """
    best: int
    trials: int
    seeds: Tuple[int, ...]
    ranks: Tuple[int, ...]
    qmc: int
    version: int = 1
    domain: str = "field"

    lower_bound_on_qmf = True

    @property
    def equals_qmc(self) -> bool:
        return self.best == self.qmc

    def to_dict(self) -> dict:
        return {
            "best": self.best,
            "trials": self.trials,
            "qmc": self.qmc,
            "equals_qmc": self.equals_qmc,
            "seeds": list(self.seeds),
        }


def _sampling_defaults(trials: Optional[int], seed: Optional[int], domain: Optional[ScalarDomain],
                       trials_key: str) -> Tuple[int, int, ScalarDomain]:
    config = get_config()
    if trials is None:
        trials = config.get("sampling", trials_key) or 20
    if seed is None:
        seed = config.get("sampling", "seed")
        seed = 42 if seed is None else seed
    if domain is None:
        domain = domain_from_name(config.get("sampling", "domain") or "field")
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    return int(trials), int(seed), domain


def _estimate(net: Network, trials: int, seed: int, domain: ScalarDomain,
              sampler: Callable, version: int, rtol: Optional[float], stop_at_qmc: bool,
              max_dim: Optional[int]) -> QmfEstimate:
    check_dimension(net, max_dim)
    qmc = quantum_min_cut(net)
    plan = plan_contraction(net)
    seeds: List[int] = []
    ranks: List[int] = []
    for trial_seed in trial_seeds(seed, trials):
        rank = contract(net, sampler(net, domain, trial_seed), plan).rank(rtol)
        if rank > qmc:
            raise InvariantViolation("rank-at-most-qmc", f"{net.label}: trial rank {rank} > QMC {qmc}")
        seeds.append(trial_seed)
        ranks.append(rank)
        logger.debug(f"Trial | Network: {net.label} | Version: {version} | Seed: {trial_seed} | Rank: {rank}")
        if stop_at_qmc and rank == qmc:
            break

    estimate = QmfEstimate(best=max(ranks), trials=len(ranks), seeds=tuple(seeds), ranks=tuple(ranks),
                           qmc=qmc, version=version, domain=domain.name)
    log_estimate(f"qmf_v{version}", net.label, estimate.best, qmc)
    return estimate


def estimate_qmf(net: Network, trials: Optional[int] = None, seed: Optional[int] = None,
                 domain: Optional[ScalarDomain] = None, rtol: Optional[float] = None,
                 stop_at_qmc: bool = True, max_dim: Optional[int] = None) -> QmfEstimate:
    """
    Sample independent random tensors and keep the largest contracted rank.

    Args:
        net: Network
        trials: Number of assignments (defaults to sampling.trials)
        seed: Base seed (defaults to sampling.seed)
        domain: PrimeField (exact rank) or ComplexFloat (numeric rank)
        rtol: Relative threshold for numeric rank
        stop_at_qmc: Stop early once a trial reaches the min cut

    Returns:
        QmfEstimate

    Raises:
        InvariantViolation: A trial rank exceeded the quantum min-cut
    """
    trials, seed, domain = _sampling_defaults(trials, seed, domain, "trials")
    return _estimate(net, trials, seed, domain, random_assignment, 1, rtol, stop_at_qmc, max_dim)


def estimate_qmf_v2(net: Network, trials: Optional[int] = None, seed: Optional[int] = None,
                    domain: Optional[ScalarDomain] = None, rtol: Optional[float] = None,
                    stop_at_qmc: bool = True, max_dim: Optional[int] = None) -> QmfEstimate:
    """As estimate_qmf, with one shared tensor per valence type (defaults to sampling.trials_v2)."""
    trials, seed, domain = _sampling_defaults(trials, seed, domain, "trials_v2")
    return _estimate(net, trials, seed, domain, shared_random_assignment, 2, rtol, stop_at_qmc, max_dim)


# -- path tensors --------------------------------------------------------------

def construct_path_tensors(net: Network, d: int = 2, domain: Optional[ScalarDomain] = None) -> TensorAssignment:
    """
    0/1 tensors whose contraction has rank exactly the quantum min-cut.

    On the power-of-d expansion, each vertex tensor is 1 exactly when the
    two ports of every path through the vertex carry equal indices and
    every port off the paths carries index 0. The expanded tensors are
    reshaped back onto the original ports, copy 1 most significant.

    Args:
        net: Network with every capacity a power of d
        d: Base
        domain: Scalar domain of the result (PrimeField by default)

    Returns:
        TensorAssignment for ``net``

    Raises:
        PowerOfBaseError: Some capacity is not a power of d
    """
    if domain is None:
        domain = PrimeField(get_config().get("sampling", "prime") or PrimeField.p)
    expanded = expand_uniform(net, d)
    paths = menger_paths(expanded)

    through: Dict[str, List[Tuple[int, int]]] = {vid: [] for vid in expanded.vertex_ids}
    for path in paths:
        for position, vid in enumerate(path.vertices):
            port_in = expanded.port_of(path.edges[position], vid)
            port_out = expanded.port_of(path.edges[position + 1], vid)
            through[vid].append((port_in - 1, port_out - 1))

    tensors = {}
    for vid in expanded.vertex_ids:
        degree = expanded.degrees[vid]
        tensor = np.zeros((d,) * degree, dtype=np.int64)
        pairs = through[vid]
        for values in itertools.product(range(d), repeat=len(pairs)):
            index = [0] * degree
            for (a, b), value in zip(pairs, values):
                index[a] = value
                index[b] = value
            tensor[tuple(index)] = 1
        tensors[vid] = domain.coerce(tensor.reshape(net.port_capacities(vid)))

    logger.info(f"Path tensors built | Network: {net.label} | Base: {d} | Paths: {len(paths)}")
    return TensorAssignment(domain, tensors)


# -- lower bounds ----------------------------------------------------------------

def min_capacity_bound(net: Network) -> int:
    """Smallest capacity raised to the unit min-cut cardinality."""
    if not net.edges:
        return 1
    d_min = min(e.capacity for e in net.edges)
    return d_min ** unit_min_cut_cardinality(net)


def qmf_lower_bound(net: Network) -> int:
    """
    Best certified lower bound on QMF from thinning.

    Thinning to powers of any base d in 2..max capacity gives a network
    whose max flow equals its min cut; the bound is the largest such min
    cut, and never below min_capacity_bound.
    """
    best = min_capacity_bound(net)
    best_base = None
    max_cap = max((e.capacity for e in net.edges), default=1)
    for d in range(2, max_cap + 1):
        value = quantum_min_cut(thin_network(net, d))
        if value > best:
            best, best_base = value, d
    logger.info(f"Lower bound | Network: {net.label} | Bound: {best} | Base: {best_base}")
    return best


# -- GHZ form ---------------------------------------------------------------------

def ghz_tensor(domain: Optional[ScalarDomain] = None) -> np.ndarray:
    """2x2x2 tensor with ones on i=j=k."""
    tensor = np.zeros((2, 2, 2), dtype=np.int64)
    tensor[0, 0, 0] = tensor[1, 1, 1] = 1
    return tensor if domain is None else domain.coerce(tensor)


@dataclass(frozen=True)
class GhzDecomposition:
    """
    t[x, j, k] = sum_a a[x, a] * b[a, j] * c[a, k].

    ``a_phi``/``b_phi`` are the slices t[0] and t[1]; ``eigenvalues`` those of
    a_phi^-1 b_phi; ``u``/``v`` the rank-one factors of lambda_i I - a_phi^-1 b_phi.
    """
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    eigenvalues: np.ndarray
    u: np.ndarray
    v: np.ndarray
    a_phi: np.ndarray
    b_phi: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("ia,abc,bj,ck->ijk", self.a, ghz_tensor().astype(float), self.b, self.c)

    def relative_error(self, t: np.ndarray) -> float:
        t = np.asarray(t, dtype=np.complex128)
        return float(np.linalg.norm(self.reconstruct() - t) / np.linalg.norm(t))


def ghz_decompose(t, tolerance: Optional[float] = None) -> GhzDecomposition:
    """
    Change bases on the three legs of a generic 2x2x2 tensor to reach the GHZ tensor.

    Args:
        t: Tensor of shape (2, 2, 2)
        tolerance: Relative threshold for the three conditions (numeric.ghz_tolerance)

    Returns:
        GhzDecomposition

    Raises:
        DegenerateTensorError: Condition 1 (singular first slice), 2 (repeated
            eigenvalue) or 3 (vanishing off-diagonal) fails
    """
    if tolerance is None:
        tolerance = get_config().get("numeric", "ghz_tolerance") or 1e-9
    t = np.asarray(t, dtype=np.complex128)
    if t.shape != (2, 2, 2):
        raise ParameterError(f"expected a 2x2x2 tensor, got shape {t.shape}")
    scale = np.linalg.norm(t)
    if scale == 0:
        raise DegenerateTensorError(1, 0.0)

    a_phi, b_phi = t[0], t[1]
    det = np.linalg.det(a_phi)
    if abs(det) <= tolerance * scale ** 2:
        raise DegenerateTensorError(1, abs(det))

    m = np.linalg.solve(a_phi, b_phi)
    m_scale = max(np.linalg.norm(m), 1.0)
    trace, det_m = np.trace(m), np.linalg.det(m)
    discriminant = trace ** 2 - 4 * det_m
    if abs(discriminant) <= tolerance * m_scale ** 2:
        raise DegenerateTensorError(2, abs(discriminant))
    if min(abs(m[0, 1]), abs(m[1, 0])) <= tolerance * m_scale:
        raise DegenerateTensorError(3, min(abs(m[0, 1]), abs(m[1, 0])))

    root = np.sqrt(discriminant + 0j)
    eigenvalues = np.array([(trace + root) / 2, (trace - root) / 2])
    us, vs = [], []
    for lam in eigenvalues:
        d_i = lam * np.eye(2) - m
        us.append(d_i[:, 0])
        vs.append(d_i[0, :] / d_i[0, 0])
    u, v = np.array(us), np.array(vs)

    p = np.array([[eigenvalues[0], eigenvalues[1]], [-1.0, -1.0]])
    a = np.linalg.inv(p).T
    b = np.array([a_phi @ u[i] for i in range(2)])
    c = v.copy()

    decomposition = GhzDecomposition(a=a, b=b, c=c, eigenvalues=eigenvalues, u=u, v=v,
                                     a_phi=a_phi, b_phi=b_phi)
    logger.debug(f"GHZ form | Error: {decomposition.relative_error(t):.3e}")
    return decomposition


# -- rank-3 symmetry ------------------------------------------------------------------

def rk3_network() -> Network:
    """
    Reduced square network: GHZ vertices at the corners joined through D vertices.

    D1 joins lower-left to lower-right, D2 lower-right to upper-left, D3
    upper-left to upper-right and D4 upper-right to lower-left; port 1 of a
    D vertex is its first matrix index.
    """
    return parse_network("\n".join([
        "v SBL 3", "v STL 3", "v SBR 3", "v STR 3",
        "v D1 2", "v D2 2", "v D3 2", "v D4 2",
        "e 2 S.1 SBL.1",
        "e 2 S.2 STL.1",
        "e 2 SBR.1 T.1",
        "e 2 STR.1 T.2",
        "e 2 SBL.2 D1.1", "e 2 D1.2 SBR.2",
        "e 2 SBR.3 D2.1", "e 2 D2.2 STL.2",
        "e 2 STL.3 D3.1", "e 2 D3.2 STR.2",
        "e 2 STR.3 D4.1", "e 2 D4.2 SBL.3",
    ]) + "\n", name="rk3_reduced")


def rk3_assignment(d_matrix, domain: ScalarDomain) -> TensorAssignment:
    ghz = ghz_tensor(domain)
    dm = domain.coerce(d_matrix)
    tensors = {vid: ghz for vid in ("SBL", "STL", "SBR", "STR")}
    tensors.update({vid: dm for vid in ("D1", "D2", "D3", "D4")})
    return TensorAssignment(domain, tensors)


def rk3_closed_form(d_matrix, p: int) -> np.ndarray:
    """Matrix with entry F(i,j;k,l) = D_ik D_kj D_jl D_li at row 2k+l, column 2i+j."""
    dm = [[int(x) % p for x in row] for row in np.asarray(d_matrix, dtype=object)]
    phi = np.zeros((4, 4), dtype=object)
    for i, j, k, l in itertools.product(range(2), repeat=4):
        phi[2 * k + l, 2 * i + j] = dm[i][k] * dm[k][j] * dm[j][l] * dm[l][i] % p
    return phi


@dataclass
class Rk3Report:
    seeds: int
    symmetric: int
    closed_form_matches: int
    rank_counts: Dict[int, int] = field(default_factory=dict)
    violations: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        result = asdict(self)
        result["rank_counts"] = {str(k): v for k, v in sorted(self.rank_counts.items())}
        result["passed"] = self.passed
        return result


def random_invertible_2x2(rng: np.random.Generator, p: int) -> np.ndarray:
    while True:
        d = rng.integers(0, p, size=(2, 2), dtype=np.int64).astype(object)
        if (d[0, 0] * d[1, 1] - d[0, 1] * d[1, 0]) % p:
            return d


def verify_rk3_symmetry(seed_count: int, seed: Optional[int] = None, prime: Optional[int] = None) -> Rk3Report:
    """
    Check that the reduced square network maps |0,1> and |1,0> to the same vector.

    For each seed a random invertible D is drawn over F_p, the reduced
    network is contracted and compared with the closed form, and the
    columns for inputs (0,1) and (1,0) are compared exactly.

    Args:
        seed_count: Number of random D matrices
        seed: Base seed
        prime: Field modulus

    Returns:
        Rk3Report (violations lists the failing seeds)
    """
    if seed_count < 1:
        raise ParameterError(f"seed count must be >= 1, got {seed_count}")
    config = get_config()
    seed = config.get("sampling", "seed") if seed is None else seed
    domain = PrimeField(int(prime or config.get("sampling", "prime") or PrimeField.p))
    net = rk3_network()
    plan = plan_contraction(net)

    report = Rk3Report(seeds=seed_count, symmetric=0, closed_form_matches=0)
    for index in range(seed_count):
        trial_seed = derive_seed(seed, "rk3", index)
        d_matrix = random_invertible_2x2(rng_for(trial_seed), domain.p)
        phi = contract(net, rk3_assignment(d_matrix, domain), plan).matrix
        symmetric = bool(np.all(phi[:, 1] == phi[:, 2]))
        matches = bool(np.all(phi == rk3_closed_form(d_matrix, domain.p)))
        rank = domain.rank(phi)
        report.symmetric += symmetric
        report.closed_form_matches += matches
        report.rank_counts[rank] = report.rank_counts.get(rank, 0) + 1
        if not (symmetric and matches and rank <= 3):
            report.violations.append(trial_seed)
            logger.warning(f"Rank-3 symmetry violated | Seed: {trial_seed} | Rank: {rank}")

    logger.info(f"Rank-3 symmetry | Seeds: {seed_count} | Symmetric: {report.symmetric} | "
                f"Ranks: {report.rank_counts}")
    return report


# -- example families ---------------------------------------------------------------

@dataclass(frozen=True)
class FamilyReport:
    n: int
    j: int
    k: int
    qmc: int
    expected_qmc: int
    bound: int
    sampled: int
    trials: int

    @property
    def ratio(self) -> float:
        return self.sampled / self.qmc

    @property
    def bound_ratio(self) -> float:
        return self.bound / self.qmc

    def to_dict(self) -> dict:
        result = asdict(self)
        result.update(ratio=self.ratio, bound_ratio=self.bound_ratio)
        return result


def qmf_family_2n2jk(n: int, j: int, k: int, trials: Optional[int] = None, seed: Optional[int] = None,
                     domain: Optional[ScalarDomain] = None) -> FamilyReport:
    """
    Min cut, sampled max flow and the 2n^2 - jk bound for the three-vertex family.

    Raises:
        ParameterError: Unless n >= 2 and 0 <= j, k < n
    """
    if n < 2 or not (0 <= j < n and 0 <= k < n):
        raise ParameterError(f"need n >= 2 and 0 <= j,k < n, got n={n} j={j} k={k}")
    net = fig7_family(n, j, k)
    estimate = estimate_qmf(net, trials=trials, seed=seed, domain=domain)
    report = FamilyReport(n=n, j=j, k=k, qmc=estimate.qmc,
                          expected_qmc=min(2 * n * n, (2 * n - j) * (2 * n - k)),
                          bound=2 * n * n - j * k, sampled=estimate.best, trials=estimate.trials)
    if report.qmc != report.expected_qmc:
        raise InvariantViolation("family-qmc", f"computed {report.qmc}, closed form {report.expected_qmc}")
    logger.info(f"Family | n: {n} | j: {j} | k: {k} | QMC: {report.qmc} | Bound: {report.bound} | "
                f"Sampled: {report.sampled}")
    return report


def qmf_family_grid(n_max: int, trials: Optional[int] = None, seed: Optional[int] = None,
                    domain: Optional[ScalarDomain] = None) -> List[FamilyReport]:
    """qmf_family_2n2jk for every 2 <= n <= n_max and 0 <= j, k < n."""
    return [qmf_family_2n2jk(n, j, k, trials=trials, seed=seed, domain=domain)
            for n in range(2, n_max + 1) for j in range(n) for k in range(n)]


def best_ratio_family(n: int, trials: Optional[int] = None, seed: Optional[int] = None,
                      domain: Optional[ScalarDomain] = None) -> FamilyReport:
    """The j = k member of the family with the smallest bound / QMC ratio."""
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    best_j = min(range(n), key=lambda j: ((2 * n * n - j * j) / min(2 * n * n, (2 * n - j) ** 2), j))
    return qmf_family_2n2jk(n, best_j, best_j, trials=trials, seed=seed, domain=domain)


# -- capacity scaling ------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingRow:
    n: int
    qmc: int
    qmf_sampled: int

    @property
    def gap(self) -> int:
        return self.qmc - self.qmf_sampled

    def to_dict(self) -> dict:
        return {"n": self.n, "qmc": self.qmc, "qmf_sampled": self.qmf_sampled, "gap": self.gap}


SCALING_HEADER = ("n", "qmc", "qmf_sampled", "gap")


def scaling_experiment(net: Network, n_max: int, trials: Optional[int] = None, seed: Optional[int] = None,
                       domain: Optional[ScalarDomain] = None, max_dim: Optional[int] = None) -> List[ScalingRow]:
    """
    Min cut and sampled max flow of the network with every capacity multiplied by n.

    Raises:
        ParameterError: n_max < 1
        ResourceLimitError: A scaled matrix exceeds the max-dim cap
    """
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    scaled = [net if n == 1 else scale_capacities(net, n) for n in range(1, n_max + 1)]
    for candidate in scaled:
        check_dimension(candidate, max_dim)

    rows = []
    for n, candidate in enumerate(scaled, start=1):
        estimate = estimate_qmf(candidate, trials=trials, seed=seed, domain=domain, max_dim=max_dim)
        rows.append(ScalingRow(n=n, qmc=estimate.qmc, qmf_sampled=estimate.best))
        logger.info(f"Scaling | Network: {net.label} | n: {n} | QMC: {estimate.qmc} | QMF: {estimate.best}")
    return rows
