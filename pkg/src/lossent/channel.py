"""Photon-absorption channel on the truncated two-mode space.

The channel attenuates each mode independently with intensity
transmissivity ``eta`` (amplitudes scale by ``sqrt(eta)``).  Two
equivalent realizations are provided and serve as each other's oracle:

* an operator-sum (Kraus) form in the Fock basis, with
  ``A_k[n-k, n] = sqrt(C(n, k) * eta^(n-k) * (1-eta)^k)`` for the loss of
  exactly ``k`` photons, and
* a closed form on coherent-state dyads,
  ``|a><b| -> exp((1-eta)(conj(b) a - |a|^2/2 - |b|^2/2)) |sqrt(eta) a><sqrt(eta) b|``.

Loss never increases photon number, so the Kraus family is exactly
complete on the truncated space: ``sum_k A_k^T A_k = 1`` with no tail
error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError
from .fock import DensityOperator, Truncation

COMPLETENESS_TOL = 1e-12


@dataclass(frozen=True)
class LossChannel:
    """Transmissivity plus the per-mode Kraus stack ``kraus[k]``."""

    eta: float
    truncation: Truncation
    kraus: np.ndarray


def build_loss_channel(eta: float, truncation: Truncation) -> LossChannel:
    """Construct the per-mode Kraus family for intensity transmissivity ``eta``."""
    if not 0.0 <= eta <= 1.0:
        raise ContractViolationError(f"transmissivity must lie in [0, 1], got {eta}")
    d = truncation.dim
    kraus = np.zeros((d, d, d), dtype=np.float64)
    for k in range(d):
        for n in range(k, d):
            kraus[k, n - k, n] = math.sqrt(
                math.comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k
            )
    completeness = np.einsum("kij,kil->jl", kraus, kraus)
    defect = np.max(np.abs(completeness - np.eye(d)))
    if defect > COMPLETENESS_TOL:
        raise ContractViolationError(
            f"kraus completeness defect {defect:.3e} exceeds {COMPLETENESS_TOL:.0e}"
        )
    kraus.setflags(write=False)
    return LossChannel(float(eta), truncation, kraus)


def _apply_mode_a(kraus: np.ndarray, r4: np.ndarray) -> np.ndarray:
    """Operator sum acting on the ket/bra indices of the first mode."""
    out = np.zeros_like(r4)
    for k in range(kraus.shape[0]):
        ak = kraus[k]
        t = np.tensordot(ak, r4, axes=(1, 0))
        t = np.tensordot(t, ak, axes=(2, 1))  # kraus ops are real
        out += t.transpose(0, 1, 3, 2)
    return out


def apply_to_matrix(channel: LossChannel, matrix: np.ndarray) -> np.ndarray:
    """Linear extension of the two-mode channel to an arbitrary pair-indexed matrix."""
    d = channel.truncation.dim
    d2 = d * d
    if matrix.shape != (d2, d2):
        raise ContractViolationError(
            f"matrix shape {matrix.shape} does not match truncation dim {d}"
        )
    r4 = np.ascontiguousarray(matrix, dtype=np.complex128).reshape(d, d, d, d)
    r4 = _apply_mode_a(channel.kraus, r4)
    r4 = r4.transpose(1, 0, 3, 2)
    r4 = _apply_mode_a(channel.kraus, r4)
    r4 = r4.transpose(1, 0, 3, 2)
    return r4.reshape(d2, d2)


def apply_two_mode(channel: LossChannel, rho: DensityOperator) -> DensityOperator:
    """Attenuate both modes of ``rho`` with the same transmissivity.

    Trace is preserved to 1e-12 and the output stays positive to -1e-10;
    both are enforced by the :class:`DensityOperator` contract plus the
    channel property tests.
    """
    if rho.truncation != channel.truncation:
        raise ContractViolationError(
            f"truncation mismatch: channel n_max={channel.truncation.n_max}, "
            f"state n_max={rho.truncation.n_max}"
        )
    return DensityOperator(rho.truncation, apply_to_matrix(channel, rho.matrix))


def coherent_dyad_image(
    alpha: complex, beta: complex, eta: float
) -> tuple[complex, complex, complex]:
    """Closed-form channel action on the single-mode dyad ``|alpha><beta|``.

    Returns ``(scale, alpha_out, beta_out)`` with
    ``alpha_out = sqrt(eta) alpha``, ``beta_out = sqrt(eta) beta`` and
    ``scale = exp((1-eta)(conj(beta) alpha - |alpha|^2/2 - |beta|^2/2))``,
    the overlap of the two environment states that are traced out.
    """
    if not 0.0 <= eta <= 1.0:
        raise ContractViolationError(f"transmissivity must lie in [0, 1], got {eta}")
    scale = cmath.exp(
        (1.0 - eta)
        * (np.conj(beta) * alpha - abs(alpha) ** 2 / 2.0 - abs(beta) ** 2 / 2.0)
    )
    root = math.sqrt(eta)
    return scale, root * alpha, root * beta
