"""
Entanglement Entropy

Von Neumann entropy of the normalized contracted state across the
input/output split, from the singular values of the contraction matrix,
and the maximum over random complex assignments.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.stats import entropy as shannon_entropy

from config import get_config
from core.errors import DomainMismatchError, InvariantViolation, ParameterError, ZeroNetworkError
from core.flow import quantum_min_cut
from core.linalg import singular_values
from core.netgraph import Network
from core.tensor import ComplexFloat, TensorAssignment, contract, random_assignment
from logger import get_logger, log_estimate
from utils.seeding import trial_seeds


logger = get_logger(__name__)


@dataclass(frozen=True)
class EntropyReport:
    """
    Entropy of one contracted state (or the best of several).

    Attributes:
        entropy_bits: Entropy with log base 2
        entropy_nats: Entropy with the natural log
        eigenvalues: Spectrum of the reduced density matrix, descending
        rank: Number of nonzero eigenvalues
        qmc_log2_bound: log2 of the quantum min-cut, when computed
        trials: Assignments evaluated
        skipped: Trials whose contraction was the zero map
        seed: Seed of the reported assignment, when sampled
    """
    entropy_bits: float
    entropy_nats: float
    eigenvalues: Tuple[float, ...]
    rank: int
    qmc_log2_bound: Optional[float] = None
    trials: int = 1
    skipped: int = 0
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "entropy_bits": self.entropy_bits,
            "entropy_nats": self.entropy_nats,
            "eigenvalues": list(self.eigenvalues),
            "qmc_log2_bound": self.qmc_log2_bound,
            "rank": self.rank,
            "trials": self.trials,
            "skipped": self.skipped,
        }


def entropy_of_matrix(matrix, eigen_cutoff: Optional[float] = None) -> EntropyReport:
    """
    Entropy of C C^dagger / Tr(C C^dagger) computed from the singular values of C.

    Eigenvalues below ``eigen_cutoff`` times the largest are set to zero.

    Raises:
        ZeroNetworkError: C is zero
    """
    if eigen_cutoff is None:
        eigen_cutoff = get_config().get("numeric", "eigen_cutoff") or 1e-14
    sigma = singular_values(matrix)
    weights = sigma ** 2
    total = float(weights.sum())
    if sigma.size == 0 or total <= 0.0 or not math.isfinite(total):
        raise ZeroNetworkError("contraction is the zero map; entropy is undefined")

    eigenvalues = weights / total
    eigenvalues[eigenvalues < eigen_cutoff * eigenvalues[0]] = 0.0
    nats = float(shannon_entropy(eigenvalues))
    return EntropyReport(entropy_bits=nats / math.log(2), entropy_nats=nats,
                         eigenvalues=tuple(float(x) for x in eigenvalues),
                         rank=int(np.count_nonzero(eigenvalues)))


def entanglement_entropy(net: Network, assign: TensorAssignment,
                         eigen_cutoff: Optional[float] = None) -> EntropyReport:
    """
    Entanglement entropy between inputs and outputs of a contracted network.

    Args:
        net: Network
        assign: Complex tensor assignment
        eigen_cutoff: Relative cutoff for zero eigenvalues (numeric.eigen_cutoff)

    Returns:
        EntropyReport

    Raises:
        DomainMismatchError: The assignment is not over ComplexFloat
        ZeroNetworkError: The contraction is zero
    """
    if not isinstance(assign.domain, ComplexFloat):
        raise DomainMismatchError(f"entropy needs a complex assignment, got {assign.domain.name}")
    report = entropy_of_matrix(contract(net, assign).matrix, eigen_cutoff)
    logger.debug(f"Entropy | Network: {net.label} | Bits: {report.entropy_bits:.6f} | Rank: {report.rank}")
    return report


def estimate_mee(net: Network, trials: Optional[int] = None, seed: Optional[int] = None,
                 eigen_cutoff: Optional[float] = None) -> EntropyReport:
    """
    Largest entanglement entropy over random complex Gaussian assignments.

    Zero contractions are skipped and counted. The result never exceeds
    log2 of the quantum min-cut.

    Raises:
        InvariantViolation: Some trial exceeded log2 QMC
    """
    config = get_config()
    if trials is None:
        trials = config.get("sampling", "trials") or 20
    if seed is None:
        seed = config.get("sampling", "seed")
        seed = 42 if seed is None else seed
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")

    bound = math.log2(quantum_min_cut(net))
    domain = ComplexFloat()
    best, best_seed, skipped = None, None, 0
    for trial_seed in trial_seeds(seed, trials):
        try:
            report = entanglement_entropy(net, random_assignment(net, domain, trial_seed), eigen_cutoff)
        except ZeroNetworkError:
            skipped += 1
            logger.warning(f"Zero contraction skipped | Network: {net.label} | Seed: {trial_seed}")
            continue
        if report.entropy_bits > bound + 1e-8:
            raise InvariantViolation("entropy-at-most-log-qmc",
                                     f"{net.label}: {report.entropy_bits} bits > log2 QMC {bound}")
        if best is None or report.entropy_bits > best.entropy_bits:
            best, best_seed = report, trial_seed

    if best is None:
        raise ZeroNetworkError(f"{net.label}: every trial contracted to zero")
    result = EntropyReport(entropy_bits=best.entropy_bits, entropy_nats=best.entropy_nats,
                           eigenvalues=best.eigenvalues, rank=best.rank, qmc_log2_bound=bound,
                           trials=trials, skipped=skipped, seed=best_seed)
    log_estimate("mee_bits", net.label, round(result.entropy_bits, 6), round(bound, 6))
    return result
