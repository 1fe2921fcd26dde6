"""Quantum divergence functionals.

Umegaki relative entropy, von Neumann entropy, classical KL, Petz-Renyi and
sandwiched Renyi divergences (with the dual-form optimizer), fidelity,
max-divergence, and measured relative entropy over finite POVM families.

All logarithms are natural; values are in nats.  Support conventions are
realized with masked spectral functions: +infinity is a tagged value on the
returned :class:`DivergenceValue`, never a float that enters arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operator_core import (
    DEFAULT_SUPPORT_RTOL,
    HermitianOperator,
    as_matrix,
    eig_hermitian,
    support_contained,
)

__all__ = [
    "DivergenceValue",
    "Povm",
    "umegaki",
    "von_neumann_entropy",
    "classical_kl",
    "petz_renyi",
    "sandwiched_renyi",
    "sandwiched_dual_optimizer",
    "sandwiched_variational_objective",
    "fidelity",
    "max_divergence",
    "measured_relative_entropy",
    "povm_apply",
    "eigenbasis_povm",
    "trivial_povm",
    "masked_power",
    "masked_log_trace",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class DivergenceValue:
    """A divergence evaluation: finite value or a tagged +infinity."""

    value: float
    support_ok: bool = True
    diagnostics: str | None = None

    def __post_init__(self):
        if math.isinf(self.value) == self.support_ok:
            raise ValueError("value must be +inf exactly when the support condition fails")

    @classmethod
    def infinite(cls, diagnostics: str | None = None) -> "DivergenceValue":
        return cls(value=math.inf, support_ok=False, diagnostics=diagnostics)

    @property
    def is_finite(self) -> bool:
        return self.support_ok

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"DivergenceValue({'inf' if not self.support_ok else self.value})"


class Povm:
    """A positive operator-valued measure: PSD elements summing to the identity."""

    __slots__ = ("elements",)

    def __init__(self, elements, *, atol: float = 1e-10):
        ops = [HermitianOperator(as_matrix(E)) for E in elements]
        if not ops:
            raise ValueError("a POVM needs at least one element")
        d = ops[0].dim
        total = np.zeros((d, d), dtype=complex)
        for E in ops:
            if E.dim != d:
                raise ValueError("POVM elements have mixed dimensions")
            if float(np.linalg.eigvalsh(E.mat)[0]) < -atol:
                raise ValueError("POVM element is not PSD")
            total += E.mat
        if np.max(np.abs(total - np.eye(d))) > atol:
            raise ValueError("POVM elements do not sum to the identity")
        self.elements = tuple(ops)

    @property
    def outcome_count(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __repr__(self) -> str:
        return f"Povm(outcomes={self.outcome_count}, dim={self.dim})"


def trivial_povm(dim: int) -> Povm:
    return Povm([np.eye(dim)])


def eigenbasis_povm(A) -> Povm:
    """Projective measurement onto the eigenbasis of a Hermitian operator."""
    S = eig_hermitian(A)
    U = S.eigenvectors
    return Povm([np.outer(U[:, k], U[:, k].conj()) for k in range(S.dim)])


def povm_apply(M: Povm, A) -> np.ndarray:
    """Outcome vector (Tr[M_i A])_i; sums to Tr A."""
    mat = as_matrix(A)
    if mat.shape[0] != M.dim:
        raise ValueError(f"operator dim {mat.shape[0]} does not match POVM dim {M.dim}")
    return np.array([float(np.trace(E.mat @ mat).real) for E in M.elements])


def _sym(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def masked_power(A, p: float, rel_tol: float = DEFAULT_SUPPORT_RTOL) -> np.ndarray:
    """A^p on the support of A; kernel eigenvalues map to zero."""
    S = eig_hermitian(A)
    lam = S.eigenvalues
    top = float(np.max(np.abs(lam), initial=0.0))
    keep = lam > rel_tol * top
    vals = np.zeros_like(lam)
    vals[keep] = lam[keep] ** p
    return S.reassemble(vals)


def masked_log_trace(rho, B, rel_tol: float = DEFAULT_SUPPORT_RTOL) -> float:
    """Tr[rho log B] restricted to the support of B (0 log 0 = 0 convention)."""
    S = eig_hermitian(B)
    lam = S.eigenvalues
    top = float(np.max(np.abs(lam), initial=0.0))
    keep = lam > rel_tol * top
    diag = np.real(np.einsum("ij,ji->i", S.eigenvectors.conj().T, as_matrix(rho) @ S.eigenvectors))
    return float(np.sum(diag[keep] * np.log(lam[keep])))


def umegaki(rho, sigma, tol: float = DEFAULT_TOL) -> DivergenceValue:
    """Quantum relative entropy Tr[rho (log rho - log sigma)], +inf without support containment."""
    if not support_contained(rho, sigma, tol):
        return DivergenceValue.infinite("supp(rho) not contained in supp(sigma)")
    value = masked_log_trace(rho, rho) - masked_log_trace(rho, sigma)
    return DivergenceValue(value)


def von_neumann_entropy(rho) -> float:
    """-Tr[rho log rho] in nats, with 0 log 0 = 0."""
    return max(0.0, -masked_log_trace(rho, rho))


def _check_prob_vector(P: np.ndarray, tol: float, name: str) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 1:
        raise ValueError(f"{name} must be a vector")
    if np.any(P < -tol):
        raise ValueError(f"{name} has a negative entry beyond tolerance")
    if abs(P.sum() - 1.0) > max(tol, 1e-8):
        raise ValueError(f"{name} does not sum to 1 within tolerance")
    return np.clip(P, 0.0, None)


def classical_kl(P, Q, tol: float = DEFAULT_TOL) -> DivergenceValue:
    """Kullback-Leibler divergence of discrete distributions, with the support convention."""
    P = _check_prob_vector(P, tol, "P")
    Q = _check_prob_vector(Q, tol, "Q")
    if P.shape != Q.shape:
        raise ValueError("distributions have different lengths")
    live = P > tol
    if np.any(Q[live] <= tol):
        return DivergenceValue.infinite("P puts mass where Q vanishes")
    value = float(np.sum(P[live] * np.log(P[live] / Q[live])))
    return DivergenceValue(value)


def petz_renyi(rho, sigma, alpha: float, tol: float = DEFAULT_TOL) -> DivergenceValue:
    """Petz-Renyi divergence (alpha - 1)^-1 log Tr[rho^alpha sigma^(1-alpha)]."""
    if not (0 < alpha < 1 or 1 < alpha <= 2):
        raise ValueError(f"alpha {alpha} outside (0,1) u (1,2]")
    if alpha > 1 and not support_contained(rho, sigma, tol):
        return DivergenceValue.infinite("supp(rho) not contained in supp(sigma)")
    Q = float(np.trace(masked_power(rho, alpha) @ masked_power(sigma, 1 - alpha)).real)
    if Q <= tol:
        # orthogonal states: the trace functional carries no overlap
        return DivergenceValue.infinite("rho and sigma are orthogonal")
    return DivergenceValue(math.log(Q) / (alpha - 1))


def _sandwich_base(rho, sigma, alpha: float) -> np.ndarray:
    """rho^(1/2) sigma^((1-alpha)/alpha) rho^(1/2)."""
    q = (1 - alpha) / alpha
    root = masked_power(rho, 0.5)
    mid = masked_power(sigma, q) if q != 1 else as_matrix(sigma)
    return _sym(root @ mid @ root)


def sandwiched_renyi(rho, sigma, alpha: float, tol: float = DEFAULT_TOL) -> DivergenceValue:
    """Sandwiched Renyi divergence alpha/(alpha-1) log ||rho^(1/2) sigma^((1-alpha)/alpha) rho^(1/2)||_alpha."""
    if not (0.5 <= alpha < 1 or alpha > 1):
        raise ValueError(f"alpha {alpha} outside [1/2,1) u (1,inf)")
    if alpha > 1 and not support_contained(rho, sigma, tol):
        return DivergenceValue.infinite("supp(rho) not contained in supp(sigma)")
    lam = np.clip(np.linalg.eigvalsh(_sandwich_base(rho, sigma, alpha)), 0.0, None)
    total = float(np.sum(lam**alpha))
    if total <= tol:
        return DivergenceValue.infinite("rho and sigma are orthogonal")
    # alpha/(alpha-1) * log ||T||_alpha with ||T||_alpha = total**(1/alpha)
    return DivergenceValue(math.log(total) / (alpha - 1))


def sandwiched_dual_optimizer(rho, sigma, alpha: float,
                              rel_tol: float = DEFAULT_SUPPORT_RTOL) -> HermitianOperator:
    """Maximizer of the variational (dual Schatten-norm) form of the sandwiched divergence.

    Returns T^(alpha-1) / ||T||_alpha^(alpha-1) for T = rho^(1/2) sigma^((1-alpha)/alpha) rho^(1/2),
    which is PSD with unit alpha/(alpha-1) (quasi-)norm and attains the divergence when
    plugged into the variational objective.
    """
    if not (0.5 <= alpha < 1 or alpha > 1):
        raise ValueError(f"alpha {alpha} outside [1/2,1) u (1,inf)")
    T = _sandwich_base(rho, sigma, alpha)
    lam = np.linalg.eigvalsh(T)
    top = float(np.max(np.abs(lam), initial=0.0))
    if top <= 0 or np.sum(lam > rel_tol * top) == 0:
        raise ValueError("degenerate sigma support: variational base operator vanishes")
    norm_alpha = float(np.sum(np.clip(lam, 0.0, None) ** alpha)) ** (1.0 / alpha)
    num = masked_power(T, alpha - 1, rel_tol)
    return HermitianOperator(num / norm_alpha ** (alpha - 1))


def sandwiched_variational_objective(rho, sigma, alpha: float, eta) -> float:
    """alpha/(alpha-1) log Tr[rho^(1/2) sigma^((1-alpha)/alpha) rho^(1/2) eta]."""
    T = _sandwich_base(rho, sigma, alpha)
    val = float(np.trace(T @ as_matrix(eta)).real)
    return alpha / (alpha - 1) * math.log(val)


def fidelity(rho, sigma) -> float:
    """F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1^2, in [0, 1]."""
    root = masked_power(rho, 0.5)
    lam = np.clip(np.linalg.eigvalsh(_sym(root @ as_matrix(sigma) @ root)), 0.0, None)
    val = float(np.sum(np.sqrt(lam)) ** 2)
    return min(max(val, 0.0), 1.0)


def max_divergence(rho, sigma, tol: float = DEFAULT_TOL) -> DivergenceValue:
    """inf{lambda : rho <= e^lambda sigma} = log lambda_max(sigma^(-1/2) rho sigma^(-1/2))."""
    if not support_contained(rho, sigma, tol):
        return DivergenceValue.infinite("supp(rho) not contained in supp(sigma)")
    inv_root = masked_power(sigma, -0.5)
    lam_max = float(np.linalg.eigvalsh(_sym(inv_root @ as_matrix(rho) @ inv_root))[-1])
    return DivergenceValue(math.log(lam_max))


def measured_relative_entropy(rho, sigma, family, tol: float = DEFAULT_TOL,
                              tie_tol: float = 1e-9) -> tuple[DivergenceValue, int]:
    """Largest KL divergence of the outcome distributions over a finite POVM family.

    Returns the maximizing value and its (lowest) index; indices of any other
    family members within ``tie_tol`` of the maximum are listed in the
    diagnostics so non-unique maximizers are detectable.
    """
    family = list(family)
    if not family:
        raise ValueError("POVM family is empty")
    values: list[DivergenceValue] = []
    for M in family:
        P = np.clip(povm_apply(M, rho), 0.0, None)
        Q = np.clip(povm_apply(M, sigma), 0.0, None)
        values.append(classical_kl(P / P.sum(), Q / Q.sum(), tol))
    if any(not v.support_ok for v in values):
        idx = next(i for i, v in enumerate(values) if not v.support_ok)
        return DivergenceValue.infinite(f"measurement {idx} separates the supports"), idx
    best = max(v.value for v in values)
    ties = [i for i, v in enumerate(values) if best - v.value <= tie_tol]
    diag = None if len(ties) == 1 else f"near-maximal indices: {ties}"
    return DivergenceValue(values[ties[0]].value, diagnostics=diag), ties[0]


