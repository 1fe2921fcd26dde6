"""Multi-qubit Pauli basis, measurement simulation, and tomographic estimators.

Measurement outcomes for each basis operator are Bernoulli in its +1/-1
eigenbasis, so a record stores one binomial count per operator.  Sampling is
deterministic given (seed, operator index): every operator draws from its own
substream, which also makes trials embarrassingly parallel without sharing
generator state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operator_core import (
    DensityOperator,
    HermitianOperator,
    as_matrix,
    eig_hermitian,
    project_to_simplex,
)
from .frechet import build_divided_differences, frechet1

__all__ = [
    "PAULI_MATRICES",
    "PauliBasisSet",
    "BlochVector",
    "MeasurementRecord",
    "build_pauli_basis",
    "bloch_coefficients",
    "reconstruct",
    "substream",
    "sample_record",
    "record_bloch_estimate",
    "estimate_rho",
    "estimate_sigma",
    "was_projected",
    "variance_v1",
    "variance_v2",
    "sample_gaussian_limit",
]

PAULI_MATRICES = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

MAX_QUBITS = 6


@dataclass(frozen=True)
class PauliBasisSet:
    """The d^2 - 1 nontrivial N-qubit Pauli operators with base-4 labels."""

    qubits: int
    labels: tuple[str, ...]
    operators: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return 2**self.qubits

    @property
    def size(self) -> int:
        return len(self.operators)

    def __repr__(self) -> str:
        return f"PauliBasisSet(qubits={self.qubits}, size={self.size})"


def build_pauli_basis(n_qubits: int) -> PauliBasisSet:
    """Tensor products of the single-qubit Pauli matrices, identity excluded."""
    if not (1 <= n_qubits <= MAX_QUBITS):
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n_qubits}")
    labels = []
    ops = []
    for code in range(1, 4**n_qubits):
        digits = np.base_repr(code, base=4).zfill(n_qubits)
        g = PAULI_MATRICES[int(digits[0])]
        for ch in digits[1:]:
            g = np.kron(g, PAULI_MATRICES[int(ch)])
        g.setflags(write=False)
        labels.append(digits)
        ops.append(g)
    return PauliBasisSet(qubits=n_qubits, labels=tuple(labels), operators=tuple(ops))


@dataclass(frozen=True)
class BlochVector:
    """Expansion coefficients s_j = Tr[rho gamma_j]; |s_j| <= 1 for states."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))

    def __len__(self) -> int:
        return len(self.coeffs)


def bloch_coefficients(rho, basis: PauliBasisSet) -> BlochVector:
    mat = as_matrix(rho)
    if mat.shape[0] != basis.dim:
        raise ValueError("state dimension does not match the basis")
    s = np.array([float(np.trace(mat @ g).real) for g in basis.operators])
    return BlochVector(s)


def reconstruct(s: BlochVector | np.ndarray, basis: PauliBasisSet) -> HermitianOperator:
    """(1/d)(I + sum_j s_j gamma_j): Hermitian, unit trace, not necessarily PSD."""
    coeffs = s.coeffs if isinstance(s, BlochVector) else np.asarray(s, dtype=float)
    if len(coeffs) != basis.size:
        raise ValueError(f"expected {basis.size} coefficients, got {len(coeffs)}")
    d = basis.dim
    acc = np.eye(d, dtype=complex)
    for c, g in zip(coeffs, basis.operators):
        acc += c * g
    return HermitianOperator(acc / d)


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for (seed, path); the splittable-RNG contract."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(path)))


@dataclass(frozen=True)
class MeasurementRecord:
    """Counts of +1 outcomes: plus_counts[j] out of n shots on gamma_j."""

    n: int
    plus_counts: np.ndarray
    seed: int

    def __post_init__(self):
        counts = np.asarray(self.plus_counts, dtype=np.int64)
        if np.any(counts < 0) or np.any(counts > self.n):
            raise ValueError("counts must lie in [0, n]")
        object.__setattr__(self, "plus_counts", counts)


def sample_record(rho, basis: PauliBasisSet, n: int, seed: int,
                  per_shot: bool = False) -> MeasurementRecord:
    """Simulate n measurement shots per Pauli operator on independent copies.

    plus_counts[j] ~ Binomial(n, (1 + s_j)/2), independent across j, each from
    its own substream of ``seed``.  ``per_shot`` draws the n outcomes one by
    one instead (same law, kept for demonstration purposes).
    """
    if n < 1:
        raise ValueError("need at least one shot per operator")
    s = bloch_coefficients(rho, basis).coeffs
    p_plus = np.clip((1.0 + s) / 2.0, 0.0, 1.0)
    counts = np.empty(basis.size, dtype=np.int64)
    for j, p in enumerate(p_plus):
        rng = substream(seed, j)
        if per_shot:
            counts[j] = int(np.sum(rng.random(n) < p))
        else:
            counts[j] = int(rng.binomial(n, p))
    return MeasurementRecord(n=n, plus_counts=counts, seed=seed)


def record_bloch_estimate(record: MeasurementRecord) -> BlochVector:
    """s_hat_j = (#plus - #minus)/n, in [-1, 1]."""
    return BlochVector((2.0 * record.plus_counts - record.n) / record.n)


def estimate_rho(record: MeasurementRecord, basis: PauliBasisSet,
                 psd_atol: float = 1e-12) -> DensityOperator:
    """Tomographic estimator: raw reconstruction if PSD, nearest density operator otherwise."""
    raw = reconstruct(record_bloch_estimate(record), basis)
    S = eig_hermitian(raw)
    if float(S.eigenvalues[0]) >= -psd_atol:
        return DensityOperator(raw)
    return DensityOperator(S.reassemble(project_to_simplex(S.eigenvalues)))


def estimate_sigma(record: MeasurementRecord, basis: PauliBasisSet) -> DensityOperator:
    """Second-argument estimator with the I/(nd) floor that keeps it strictly positive."""
    base = estimate_rho(record, basis)
    n, d = record.n, basis.dim
    mat = np.eye(d) / (n * d) + (1.0 - 1.0 / n) * base.mat
    return DensityOperator(mat)


def was_projected(record: MeasurementRecord, basis: PauliBasisSet,
                  psd_atol: float = 1e-12) -> bool:
    """Whether the raw reconstruction was infeasible and took the projection branch."""
    raw = reconstruct(record_bloch_estimate(record), basis)
    return float(np.linalg.eigvalsh(raw.mat)[0]) < -psd_atol


def _bernoulli_weights(rho, basis: PauliBasisSet) -> np.ndarray:
    """4 s_j^+ s_j^- / d^2: the per-operator CLT variances of s_hat_j scaled by 1/d^2."""
    s = bloch_coefficients(rho, basis).coeffs
    sp = (1.0 + s) / 2.0
    sm = (1.0 - s) / 2.0
    return 4.0 * sp * sm / basis.dim**2


def variance_v1(rho, sigma, basis: PauliBasisSet) -> float:
    """One-sample asymptotic variance of the scaled relative-entropy estimation error."""
    _require_full_rank(rho, "rho")
    _require_full_rank(sigma, "sigma")
    weights = _bernoulli_weights(rho, basis)
    diff = _log_psd(rho) - _log_psd(sigma)
    terms = np.array([float(np.trace(g @ diff).real) ** 2 for g in basis.operators])
    return float(np.sum(weights * terms))


def variance_v2(rho, sigma, basis: PauliBasisSet) -> float:
    """Two-sample asymptotic variance: v1^2 plus the sigma-estimation contribution."""
    _require_full_rank(rho, "rho")
    _require_full_rank(sigma, "sigma")
    weights = _bernoulli_weights(sigma, basis)
    table = build_divided_differences(as_matrix(sigma), "log")
    R = as_matrix(rho)
    terms = np.array([float(np.trace(R @ frechet1(table, g).mat).real) ** 2
                      for g in basis.operators])
    return variance_v1(rho, sigma, basis) + float(np.sum(weights * terms))


def sample_gaussian_limit(rho, basis: PauliBasisSet, rng: np.random.Generator) -> np.ndarray:
    """One draw of the Gaussian weak limit sum_j gamma_j Z_j of the scaled estimator error."""
    std = np.sqrt(_bernoulli_weights(rho, basis))
    z = rng.normal(size=basis.size) * std
    d = basis.dim
    acc = np.zeros((d, d), dtype=complex)
    for c, g in zip(z, basis.operators):
        acc += c * g
    return acc


def _require_full_rank(rho, name: str) -> None:
    lo = float(np.linalg.eigvalsh(as_matrix(rho))[0])
    if lo <= 0:
        raise ValueError(f"{name} must be strictly positive definite (min eig {lo:.3e})")


def _log_psd(rho) -> np.ndarray:
    S = eig_hermitian(rho)
    return S.reassemble(np.log(S.eigenvalues))
