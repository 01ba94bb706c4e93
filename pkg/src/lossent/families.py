"""Constructors for the state families whose decoherence we study.

Three families live here:

* truncated two-mode squeezed states (geometric Schmidt spectrum),
* the single-photon family: rank-two states on the zero/one-photon
  subspace of each mode, parameterized by a weight ``p`` and one basis
  angle per mode,
* entangled coherent states built from the even/odd cat combinations of
  ``|alpha>`` and ``|-alpha>``, in three branch layouts (``kind``).

The cat pairs are orthonormalized through their even/odd photon sectors,
which is exact at every ``alpha`` and stays well-conditioned as
``alpha -> 0`` where the raw pair becomes degenerate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import measures
from .channel import apply_two_mode, build_loss_channel
from .errors import ContractViolationError
from .fock import (
    DensityOperator,
    PureBipartiteState,
    Truncation,
    coherent_vector,
    pure_to_density,
)

EMBEDDING_TOL = 1e-8


@dataclass(frozen=True)
class SinglePhotonFamilyParams:
    """Weight ``p`` in [0, 1/2] plus one basis angle per mode (radians)."""

    p: float
    alpha_angle: float
    beta_angle: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 0.5:
            raise ContractViolationError(f"weight p must lie in [0, 1/2], got {self.p}")
        if not (math.isfinite(self.alpha_angle) and math.isfinite(self.beta_angle)):
            raise ContractViolationError("basis angles must be finite")


@dataclass(frozen=True)
class EcsParams:
    """Entangled-coherent-state parameters.

    ``kind`` selects the branch layout (even/odd cat pairs per mode):

    * ``1``: weight ``p`` on odd/odd, ``1-p`` on even/even - the member
      with the fewest photons at fixed ``alpha``; its small-alpha limit
      is ``sqrt(p)|11> + e^(i phi) sqrt(1-p)|00>``.
    * ``2``: weight ``p`` on even/even, ``1-p`` on odd/odd - the most
      photons; small-alpha limit ``sqrt(p)|00> + e^(i phi) sqrt(1-p)|11>``.
    * ``3``: weight ``p`` on even/odd, ``1-p`` on odd/even; small-alpha
      limit ``sqrt(p)|01> + e^(i phi) sqrt(1-p)|10>``.
    """

    kind: int
    p: float
    phi: float
    alpha: float

    def __post_init__(self):
        if self.kind not in (1, 2, 3):
            raise ContractViolationError(f"kind must be 1, 2 or 3, got {self.kind}")
        if not 0.0 <= self.p <= 0.5:
            raise ContractViolationError(f"weight p must lie in [0, 1/2], got {self.p}")
        if not (math.isfinite(self.phi) and math.isfinite(self.alpha)):
            raise ContractViolationError("phi and alpha must be finite")
        if self.alpha <= 0.0:
            raise ContractViolationError(f"alpha must be real positive, got {self.alpha}")


def geometric_spectrum(gamma: float, rank: int) -> np.ndarray:
    """Normalized Schmidt coefficients ``(1, gamma, ..., gamma^(rank-1))``."""
    if not 0.0 <= gamma < 1.0:
        raise ContractViolationError(f"gamma must lie in [0, 1), got {gamma}")
    c = gamma ** np.arange(rank, dtype=float)
    return c / math.sqrt(float(np.sum(c * c)))


def match_truncated_tmss(entropy: float, rank: int) -> tuple[float, np.ndarray]:
    """Geometric ratio whose rank-``rank`` spectrum has the given entropy.

    Bisection on ``gamma`` (entropy is monotone in the ratio); the target
    must lie below ``log2(rank)``.
    """
    if not 0.0 <= entropy < math.log2(rank):
        raise ContractViolationError(
            f"entropy {entropy} not reachable with rank {rank}"
        )
    lo, hi = 0.0, 1.0 - 1e-12
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if measures.entanglement_entropy(geometric_spectrum(mid, rank)) < entropy:
            lo = mid
        else:
            hi = mid
    gamma = 0.5 * (lo + hi)
    return gamma, geometric_spectrum(gamma, rank)


def tmss(nbar: float, truncation: Truncation) -> tuple[PureBipartiteState, float]:
    """Truncated two-mode squeezed state with ``nbar`` photons (both modes).

    Amplitudes are diagonal ``gamma^n`` with ``gamma = sqrt(nbar/(nbar+2))``,
    renormalized after the cut; the returned ``truncation_error`` is the
    discarded weight ``lambda^(n_max+1)`` of the exact state.
    """
    if nbar < 0:
        raise ContractViolationError(f"mean photon number must be >= 0, got {nbar}")
    lam = nbar / (nbar + 2.0) if nbar > 0 else 0.0
    gamma = math.sqrt(lam)
    coeffs = geometric_spectrum(gamma, truncation.dim)
    amps = np.diag(coeffs).astype(np.complex128)
    return PureBipartiteState(truncation, amps), lam ** truncation.dim


def single_photon_state(params: SinglePhotonFamilyParams) -> PureBipartiteState:
    """Rank-two state ``sqrt(p)|phi>|chi> + sqrt(1-p)|phi_perp>|chi_perp>``.

    ``|phi> = cos(a)|0> + sin(a)|1>`` on mode A (angle ``alpha_angle``)
    and likewise ``|chi>`` on mode B; the perpendicular vectors complete
    each rotated basis.  The entropy is ``h(p)`` for every angle pair.
    """
    a, b = params.alpha_angle, params.beta_angle
    phi = np.array([math.cos(a), math.sin(a)])
    phi_perp = np.array([-math.sin(a), math.cos(a)])
    chi = np.array([math.cos(b), math.sin(b)])
    chi_perp = np.array([-math.sin(b), math.cos(b)])
    amps = math.sqrt(params.p) * np.outer(phi, chi) + math.sqrt(
        1.0 - params.p
    ) * np.outer(phi_perp, chi_perp)
    return PureBipartiteState(Truncation(1), amps.astype(np.complex128))


def single_photon_nbar(params: SinglePhotonFamilyParams) -> float:
    """Mean photons of the family member: the weighted photon content
    ``p (sin^2 a + sin^2 b) + (1-p) (cos^2 a + cos^2 b)`` of its two branches."""
    a, b = params.alpha_angle, params.beta_angle
    return float(
        params.p * (math.sin(a) ** 2 + math.sin(b) ** 2)
        + (1.0 - params.p) * (math.cos(a) ** 2 + math.cos(b) ** 2)
    )


def _cat_pair(alpha: float, truncation: Truncation) -> tuple[np.ndarray, np.ndarray, float]:
    """Even/odd cat vectors of ``|alpha>``, ``|-alpha>`` in the truncation.

    Returns exactly normalized vectors plus the larger of the two
    discarded tail weights (relative to the analytic cat norms
    ``2 +/- 2 exp(-2 alpha^2)``).
    """
    vp, _ = coherent_vector(alpha, truncation)
    vm, _ = coherent_vector(-alpha, truncation)
    even_raw = vp + vm
    odd_raw = vp - vm
    n_even = 2.0 + 2.0 * math.exp(-2.0 * alpha * alpha)
    n_odd = -2.0 * math.expm1(-2.0 * alpha * alpha)
    even_norm2 = float(np.sum(np.abs(even_raw) ** 2))
    odd_norm2 = float(np.sum(np.abs(odd_raw) ** 2))
    tail = max(1.0 - even_norm2 / n_even, 1.0 - odd_norm2 / n_odd, 0.0)
    return even_raw / math.sqrt(even_norm2), odd_raw / math.sqrt(odd_norm2), tail


_KIND_BRANCHES = {
    # (branch carrying sqrt(p), branch carrying sqrt(1-p) e^{i phi}),
    # each as (mode A cat, mode B cat) with 0 = even, 1 = odd
    1: ((1, 1), (0, 0)),
    2: ((0, 0), (1, 1)),
    3: ((0, 1), (1, 0)),
}


def ecs_state(
    params: EcsParams, truncation: Truncation, max_embedding_error: float = EMBEDDING_TOL
) -> tuple[PureBipartiteState, float]:
    """Entangled coherent state embedded in the truncated Fock space.

    The two branches are built from the exactly orthonormal even/odd
    cats, so the embedded state has unit norm up to the reported
    ``embedding_error`` (the coherent tail left outside the truncation).
    """
    even, odd, tail = _cat_pair(params.alpha, truncation)
    if tail > max_embedding_error:
        raise ContractViolationError(
            f"cat embedding error {tail:.3e} exceeds {max_embedding_error:.0e}; "
            f"increase n_max for alpha={params.alpha}"
        )
    cats = (even, odd)
    (a1, b1), (a2, b2) = _KIND_BRANCHES[params.kind]
    w1 = math.sqrt(params.p)
    w2 = math.sqrt(1.0 - params.p) * cmath.exp(1j * params.phi)
    amps = w1 * np.outer(cats[a1], cats[b1]) + w2 * np.outer(cats[a2], cats[b2])
    return PureBipartiteState(truncation, amps), tail


def _mode_transfer(alpha: float, eta: float) -> np.ndarray:
    """Single-mode channel action between input and output cat bases.

    Returns the 2x2x2x2 tensor ``F[i, k, i', k']`` mapping the cat-basis
    dyad ``|k><k'|`` at amplitude ``alpha`` to the cat-basis matrix
    element ``(i, i')`` at amplitude ``sqrt(eta) alpha`` (0 = even cat,
    1 = odd cat).

    Expanding cats over ``|+/-alpha>``, attenuating each coherent dyad by
    the environment overlap and re-projecting yields a rank-two form
    ``F = 2(1+kappa) g0 (x) g0 + 2 g1 (x) g1`` whose vectors involve only
    the ratios ``N-(beta)/N-(alpha)`` and ``(1-kappa)/N-(alpha)``;
    evaluated through ``expm1`` these stay exact down to alpha -> 0,
    where the raw +/- expansion would cancel catastrophically.
    """
    beta = math.sqrt(eta) * alpha
    n_even_in = 2.0 + 2.0 * math.exp(-2.0 * alpha * alpha)
    n_odd_in = -2.0 * math.expm1(-2.0 * alpha * alpha)
    n_even_out = 2.0 + 2.0 * math.exp(-2.0 * beta * beta)
    n_odd_out = -2.0 * math.expm1(-2.0 * beta * beta)
    kappa = math.exp(-2.0 * (1.0 - eta) * alpha * alpha)
    one_minus_kappa = -math.expm1(-2.0 * (1.0 - eta) * alpha * alpha)
    odd_ratio = n_odd_out / n_odd_in  # -> eta as alpha -> 0
    damp_ratio = one_minus_kappa / n_odd_in  # -> (1 - eta) / 2

    tp = math.sqrt(n_even_out) / 2.0
    tm = math.sqrt(n_odd_out) / 2.0
    ap = 1.0 / math.sqrt(n_even_in)

    # parity-even sector: (even->even), (odd->odd)
    g0 = np.zeros((2, 2))
    g0[0, 0] = tp * ap
    g0[1, 1] = 0.5 * math.sqrt(odd_ratio)
    # parity-odd sector (carries the sign flip), pre-scaled by sqrt(1-kappa)
    g1 = np.zeros((2, 2))
    g1[0, 1] = tp * math.sqrt(damp_ratio)
    g1[1, 0] = tm * ap * math.sqrt(one_minus_kappa)

    flat0 = g0.reshape(-1)
    flat1 = g1.reshape(-1)
    f = 2.0 * (1.0 + kappa) * np.outer(flat0, flat0) + 2.0 * np.outer(flat1, flat1)
    return f.reshape(2, 2, 2, 2)


def decohered_ecs_eof(params: EcsParams, eta: float) -> float:
    """Entanglement of formation after both modes pass the loss channel.

    Works entirely in the closed-form coherent-dyad picture: the channel
    action is contracted mode by mode between the exact even/odd cat
    bases of the input and attenuated amplitudes (a two-dimensional
    support per mode, no truncation involved), and the two-qubit
    concurrence is evaluated there.
    """
    if not 0.0 <= eta <= 1.0:
        raise ContractViolationError(f"transmissivity must lie in [0, 1], got {eta}")
    w = np.zeros((2, 2), dtype=np.complex128)
    (a1, b1), (a2, b2) = _KIND_BRANCHES[params.kind]
    w[a1, b1] = math.sqrt(params.p)
    w[a2, b2] = math.sqrt(1.0 - params.p) * cmath.exp(1j * params.phi)
    rho_in = np.einsum("kl,mn->klmn", w, w.conj())

    f = _mode_transfer(params.alpha, eta)
    rho_out = np.einsum("ikcm,jldn,klmn->ijcd", f, f, rho_in).reshape(4, 4)
    trace = float(np.trace(rho_out).real)
    if abs(trace - 1.0) > 1e-10:
        raise ContractViolationError(
            f"decohered cat-state support lost weight {abs(trace - 1.0):.3e}"
        )
    rho_out = rho_out / trace
    return measures.eof_two_qubit(DensityOperator(Truncation(1), rho_out))


def decohered_ecs_eof_fock(
    params: EcsParams, eta: float, truncation: Truncation | None = None
) -> float:
    """Same quantity through the full Fock pipeline (independent route).

    Embeds the state, applies the Kraus channel, projects onto the
    even/odd cat basis of the attenuated amplitude (the support residual
    must stay below 1e-8) and evaluates the two-qubit concurrence there.
    """
    if truncation is None:
        n_max = max(14, math.ceil(params.alpha**2 + 8.0 * params.alpha + 6.0))
        truncation = Truncation(n_max)
    state, _ = ecs_state(params, truncation)
    rho = apply_two_mode(build_loss_channel(eta, truncation), pure_to_density(state))
    beta = math.sqrt(eta) * params.alpha
    if beta < 1e-12:
        return 0.0
    even, odd, _ = _cat_pair(beta, truncation)
    basis = np.column_stack([even, odd])
    return measures.eof_two_qubit(rho, basis, basis)
