"""Truncated two-mode Fock-space states and density operators.

Pair-index convention: the joint basis ket ``|n_A, n_B>`` sits at flat
index ``n_A * (n_max + 1) + n_B`` (row-major in ``(n_A, n_B)``).  Every
matrix in the package follows this layout, which makes the partial
transpose over mode A a pure index permutation.

Photon loss never increases photon number, so a truncation that holds a
state exactly keeps holding it through every channel in this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError

NORMALIZATION_TOL = 1e-10
DENSITY_TOL = 1e-8


@dataclass(frozen=True)
class Truncation:
    """Per-mode photon-number cutoff; dimension per mode is ``n_max + 1``."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ContractViolationError(
                f"truncation requires integer n_max >= 1, got {self.n_max!r}"
            )

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def pair_dim(self) -> int:
        return self.dim * self.dim


@dataclass(frozen=True)
class PureBipartiteState:
    """Normalized amplitudes on the truncated ``|n_A>|n_B>`` grid.

    ``amplitudes[n, m]`` is the coefficient of ``|n>_A |m>_B``.
    """

    truncation: Truncation
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        d = self.truncation.dim
        if amps.shape != (d, d):
            raise ContractViolationError(
                f"amplitude matrix must be {d}x{d}, got {amps.shape}"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ContractViolationError("amplitudes must be finite")
        norm = np.sum(np.abs(amps) ** 2)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise ContractViolationError(
                f"state norm deviates from 1 by {abs(norm - 1.0):.3e} "
                f"(tolerance {NORMALIZATION_TOL:.0e})"
            )
        object.__setattr__(self, "amplitudes", amps)

    def vector(self) -> np.ndarray:
        """Flat state vector in the pair-index layout."""
        return self.amplitudes.reshape(-1)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian unit-trace operator on the truncated two-mode space."""

    truncation: Truncation
    matrix: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        d2 = self.truncation.pair_dim
        if m.shape != (d2, d2):
            raise ContractViolationError(
                f"density matrix must be {d2}x{d2}, got {m.shape}"
            )
        if not np.all(np.isfinite(m.view(np.float64))):
            raise ContractViolationError("density matrix must be finite")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > DENSITY_TOL:
            raise ContractViolationError(
                f"density matrix not Hermitian: defect {herm:.3e}"
            )
        tr = np.trace(m)
        if abs(tr - 1.0) > DENSITY_TOL:
            raise ContractViolationError(
                f"density matrix trace deviates from 1 by {abs(tr - 1.0):.3e}"
            )
        object.__setattr__(self, "matrix", m)


def pure_to_density(state: PureBipartiteState) -> DensityOperator:
    """Rank-one projector ``|psi><psi|`` in the pair-index basis."""
    v = state.vector()
    return DensityOperator(state.truncation, np.outer(v, v.conj()))


def coherent_vector(alpha: complex, truncation: Truncation) -> tuple[np.ndarray, float]:
    """Truncated coherent-state amplitudes and the dropped tail weight.

    Entries are ``exp(-|alpha|^2/2) * alpha^n / sqrt(n!)``; the returned
    ``tail_error = 1 - sum(|entries|^2)`` is reported rather than hidden
    by renormalization, so callers can pick a truncation that makes it
    negligible.
    """
    d = truncation.dim
    out = np.zeros(d, dtype=np.complex128)
    term = np.exp(-abs(alpha) ** 2 / 2.0)
    out[0] = term
    for n in range(1, d):
        term = term * alpha / np.sqrt(n)
        out[n] = term
    tail = 1.0 - float(np.sum(np.abs(out) ** 2))
    return out, max(tail, 0.0)


def mean_photon_number(state) -> float:
    """Total mean photon number over both modes.

    Accepts a :class:`PureBipartiteState` or a :class:`DensityOperator`;
    returns ``sum_(n,m) (n + m) p(n, m)`` over the joint photon-number
    distribution.
    """
    d = state.truncation.dim
    levels = np.arange(d, dtype=float)
    weights = levels[:, None] + levels[None, :]
    if isinstance(state, PureBipartiteState):
        probs = np.abs(state.amplitudes) ** 2
    else:
        probs = np.diag(state.matrix).real.reshape(d, d)
    return float(np.sum(weights * probs))


def partial_trace(rho: DensityOperator, keep: str = "A") -> np.ndarray:
    """Reduced single-mode density matrix after tracing out the other mode."""
    d = rho.truncation.dim
    r4 = rho.matrix.reshape(d, d, d, d)
    if keep == "A":
        return np.trace(r4, axis1=1, axis2=3)
    if keep == "B":
        return np.trace(r4, axis1=0, axis2=2)
    raise ContractViolationError(f"keep must be 'A' or 'B', got {keep!r}")


def transpose_mode_a(matrix: np.ndarray, dim: int) -> np.ndarray:
    """Index permutation ``<n_A n_B|M^T_A|m_A m_B> = <m_A n_B|M|n_A m_B>``.

    Exact (no arithmetic); works on any pair-indexed square matrix.
    """
    d2 = dim * dim
    if matrix.shape != (d2, d2):
        raise ContractViolationError(
            f"expected a {d2}x{d2} pair-indexed matrix, got {matrix.shape}"
        )
    r4 = matrix.reshape(dim, dim, dim, dim)
    return np.ascontiguousarray(r4.transpose(2, 1, 0, 3).reshape(d2, d2))


def partial_transpose(rho: DensityOperator) -> np.ndarray:
    """Partial transpose over mode A; Hermitian but possibly non-positive."""
    return transpose_mode_a(rho.matrix, rho.truncation.dim)
