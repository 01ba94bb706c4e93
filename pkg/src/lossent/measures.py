"""Entanglement measures for pure and decohered two-mode states.

Pure states are handled through their Schmidt coefficients ``c_k``
(descending, ``sum c_k^2 = 1``), which carry every entanglement property:

* entropy ``E = -sum c_k^2 log2 c_k^2`` (ebits),
* negativity ``N = ((sum c_k)^2 - 1) / 2``,
* reduced-state purity measure ``P = 1 - sum c_k^4``.

Mixed states get the negativity from the partial-transpose spectrum,
``N(rho) = (||rho^T_A||_tr - 1) / 2``, and - where a closed form exists -
the entanglement of formation: the concurrence route on a declared
two-dimensional subspace per mode, and the symmetric-Gaussian formula
for attenuated two-mode squeezed states.  No general convex-roof
optimization is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ContractViolationError
from .fock import DensityOperator, PureBipartiteState, partial_transpose

SPECTRUM_NORM_TOL = 1e-10
SUBSPACE_LEAK_TOL = 1e-8

_LOG2E = 1.0 / math.log(2.0)

_SIGMA_YY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending Schmidt coefficients plus the bi-orthonormal bases.

    ``basis_a[:, k]`` and ``basis_b[:, k]`` hold the amplitude vectors of
    the k-th Schmidt pair, so the state reconstructs as
    ``amps[n, m] = sum_k c_k basis_a[n, k] basis_b[m, k]``.
    """

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ContractViolationError("schmidt coefficients must be a 1-d sequence")
        if np.any(c < -1e-12):
            raise ContractViolationError("schmidt coefficients must be nonnegative")
        if np.any(np.diff(c) > 1e-12):
            raise ContractViolationError("schmidt coefficients must be descending")
        if abs(np.sum(c**2) - 1.0) > SPECTRUM_NORM_TOL:
            raise ContractViolationError(
                f"schmidt spectrum norm defect {abs(np.sum(c ** 2) - 1.0):.3e}"
            )
        object.__setattr__(self, "coefficients", np.maximum(c, 0.0))


def _coefficients(spectrum) -> np.ndarray:
    """Spectrum coefficients from a SchmidtSpectrum or a bare array."""
    return np.asarray(getattr(spectrum, "coefficients", spectrum), dtype=float)


def schmidt(state: PureBipartiteState) -> SchmidtSpectrum:
    """Schmidt decomposition of a pure state via the amplitude-matrix SVD."""
    u, s, vh = linalg.svd(state.amplitudes)
    return SchmidtSpectrum(s, u, vh.T)


def entanglement_entropy(spectrum) -> float:
    """Entropy of entanglement in ebits, ``-sum c^2 log2 c^2`` with 0 log 0 = 0."""
    p = _coefficients(spectrum) ** 2
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def pure_negativity(spectrum) -> float:
    """Pure-state negativity ``((sum c_k)^2 - 1) / 2``."""
    c = _coefficients(spectrum)
    return float((np.sum(c) ** 2 - 1.0) / 2.0)


def purity_measure(spectrum) -> float:
    """Linearized mixedness of the reduced state, ``1 - sum c_k^4``."""
    c = _coefficients(spectrum)
    return float(1.0 - np.sum(c**4))


def negativity(rho: DensityOperator) -> float:
    """Mixed-state negativity ``(||rho^T_A||_tr - 1) / 2``.

    Equal to the total weight of negative partial-transpose eigenvalues;
    clipped at zero against rounding on separable inputs.
    """
    value = (linalg.trace_norm(partial_transpose(rho)) - 1.0) / 2.0
    return max(float(value), 0.0)


def _fock01_basis(dim: int) -> np.ndarray:
    basis = np.zeros((dim, 2), dtype=np.complex128)
    basis[0, 0] = 1.0
    basis[1, 1] = 1.0
    return basis


def _project_two_qubit(rho: DensityOperator, basis_a, basis_b) -> np.ndarray:
    d = rho.truncation.dim
    pa = _fock01_basis(d) if basis_a is None else np.asarray(basis_a, np.complex128)
    pb = _fock01_basis(d) if basis_b is None else np.asarray(basis_b, np.complex128)
    for name, p in (("basis_a", pa), ("basis_b", pb)):
        if p.shape != (d, 2):
            raise ContractViolationError(f"{name} must be a {d}x2 column pair")
        defect = np.max(np.abs(p.conj().T @ p - np.eye(2)))
        if defect > 1e-10:
            raise ContractViolationError(f"{name} columns not orthonormal ({defect:.3e})")
    proj = np.kron(pa, pb)
    rho4 = proj.conj().T @ rho.matrix @ proj
    leak = 1.0 - float(np.trace(rho4).real)
    if leak > SUBSPACE_LEAK_TOL:
        raise ContractViolationError(
            f"state leaks {leak:.3e} outside the declared 2x2 subspace "
            f"(tolerance {SUBSPACE_LEAK_TOL:.0e})"
        )
    return rho4


def concurrence(rho: DensityOperator, basis_a=None, basis_b=None) -> float:
    """Two-qubit concurrence on a declared two-dimensional basis per mode.

    ``basis_a``/``basis_b`` are ``dim x 2`` orthonormal column pairs; the
    default is the zero- and one-photon levels.  Complex conjugation in
    the spin-flip ``rho (sy x sy) rho* (sy x sy)`` is taken in the
    declared basis; the result is invariant under that choice.
    """
    rho4 = _project_two_qubit(rho, basis_a, basis_b)
    es = linalg.hermitian_eigensystem(rho4)
    w = np.maximum(es.eigenvalues, 0.0)
    sqrt_rho = (es.eigenvectors * np.sqrt(w)) @ es.eigenvectors.conj().T
    flipped = _SIGMA_YY @ rho4.conj() @ _SIGMA_YY
    core = sqrt_rho @ flipped @ sqrt_rho
    lam = np.sqrt(np.maximum(linalg.hermitian_eigenvalues(core), 0.0))[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def binary_entropy(x: float) -> float:
    """Shannon entropy of a biased bit, in bits."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))


def eof_two_qubit(rho: DensityOperator, basis_a=None, basis_b=None) -> float:
    """Entanglement of formation from the concurrence, in ebits."""
    c = min(concurrence(rho, basis_a, basis_b), 1.0)
    return binary_entropy((1.0 + math.sqrt(1.0 - c * c)) / 2.0)


def tmss_entropy_from_nbar(nbar: float) -> float:
    """Entanglement of the two-mode squeezed state with ``nbar`` photons total.

    The Schmidt spectrum is geometric with ratio ``lam = nbar/(nbar+2)``,
    which gives ``E = (nbar/2 + 1) log2(nbar + 2) - (nbar/2) log2(nbar) - 1``.
    """
    if nbar < 0:
        raise ContractViolationError(f"mean photon number must be >= 0, got {nbar}")
    if nbar == 0.0:
        return 0.0
    return float(
        (nbar / 2.0 + 1.0) * math.log2(nbar + 2.0) - (nbar / 2.0) * math.log2(nbar) - 1.0
    )


def tmss_nbar_from_entropy(entropy: float) -> float:
    """Photon cost of a given two-mode squeezed entanglement (monotone bisection)."""
    if entropy < 0:
        raise ContractViolationError(f"entropy must be >= 0, got {entropy}")
    if entropy == 0.0:
        return 0.0
    hi = 1.0
    while tmss_entropy_from_nbar(hi) < entropy:
        hi *= 2.0
        if hi > 1e12:
            raise ContractViolationError("entropy target out of bracketing range")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if tmss_entropy_from_nbar(mid) < entropy:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-10 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def gaussian_symmetric_eof(nbar: float, eta: float) -> float:
    """Entanglement of formation of the attenuated two-mode squeezed state.

    Closed form for symmetric Gaussian states: with ``sinh^2 r = nbar/2``
    the relative-quadrature (EPR) variance after both modes pass the loss
    channel is ``delta = eta exp(-2r) + (1 - eta)`` (vacuum variance 1).
    For ``delta < 1`` the EoF is ``cp log2 cp - cm log2 cm`` with
    ``c(+/-) = (delta^-1/2 +/- delta^1/2)^2 / 4``; otherwise zero.

    At ``eta = 1`` this reduces exactly to :func:`tmss_entropy_from_nbar`.
    """
    if nbar < 0:
        raise ContractViolationError(f"mean photon number must be >= 0, got {nbar}")
    if not 0.0 <= eta <= 1.0:
        raise ContractViolationError(f"transmissivity must lie in [0, 1], got {eta}")
    sh2 = nbar / 2.0
    ch = math.sqrt(1.0 + sh2)
    sh = math.sqrt(sh2)
    exp_m2r = (ch - sh) ** 2
    delta = eta * exp_m2r + (1.0 - eta)
    if delta >= 1.0:
        return 0.0
    root = math.sqrt(delta)
    cp = (1.0 / root + root) ** 2 / 4.0
    cm = (1.0 / root - root) ** 2 / 4.0
    value = cp * math.log2(cp)
    if cm > 0.0:
        value -= cm * math.log2(cm)
    return float(value)


def tmss_pure_negativity(nbar: float) -> float:
    """Analytic pure-state negativity of the untruncated two-mode squeezed state.

    With ``lam = nbar/(nbar+2)`` and ``gamma = sqrt(lam)`` the Schmidt sum
    is ``sqrt(1-lam)/(1-gamma)``, so ``N = ((1-lam)/(1-gamma)^2 - 1)/2``.
    """
    if nbar < 0:
        raise ContractViolationError(f"mean photon number must be >= 0, got {nbar}")
    if nbar == 0.0:
        return 0.0
    lam = nbar / (nbar + 2.0)
    gamma = math.sqrt(lam)
    return float(((1.0 - lam) / (1.0 - gamma) ** 2 - 1.0) / 2.0)


def multimode_counts(modes: int) -> tuple[float, float]:
    """Entanglement of the two canonical two-photon many-mode states.

    For ``M`` modes per party: the uniform single-photon superposition
    carries ``log2 M`` ebits; the tensor product of ``M`` two-mode
    squeezed states with ``2/M`` photons each carries
    ``M * tmss_entropy_from_nbar(2/M)``.
    """
    if modes < 1:
        raise ContractViolationError(f"mode count must be >= 1, got {modes}")
    return float(math.log2(modes)), float(modes * tmss_entropy_from_nbar(2.0 / modes))
