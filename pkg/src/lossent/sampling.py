"""Reproducible exploration of pure-state space at fixed entanglement.

Two procedures:

* random orthonormal bases at a fixed Schmidt spectrum - each party gets
  a chain of plane (Givens) rotations with one bounded angle per adjacent
  level pair, so all angles zero reproduces the photon-number basis and a
  small angle bound keeps the sample close to it;
* constrained Schmidt-coefficient generation - the first two
  coefficients follow analytically from normalization plus a negativity
  target, the third is driven to an entropy target by a damped Newton
  iteration, and any remaining tail coefficients are free.

All randomness flows through a :class:`SeededRng` (PCG64 behind
``numpy.random.SeedSequence``), so identical seeds give bit-identical
sample streams on every platform regardless of how the evaluation is
parallelized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import measures
from .errors import ContractViolationError, InfeasibleConstraintError
from .fock import PureBipartiteState, Truncation

CONSTRAINT_TOL = 1e-8
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
MIN_FEASIBILITY_RATE = 1e-3


@dataclass(frozen=True)
class SeededRng:
    """Deterministic random source with splittable substreams."""

    seed: int

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    def substream(self, key: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(key,))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class BasisSample:
    """One random orthonormal basis per party plus the angles that built it."""

    angles_a: np.ndarray
    angles_b: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray


def givens_chain(angles) -> np.ndarray:
    """Orthogonal matrix from a chain of plane rotations.

    Rotation ``k`` mixes levels ``(k, k+1)`` by ``angles[k]``; rotations
    are applied to the standard basis in ascending ``k``.  All angles
    zero gives the identity.
    """
    angles = np.asarray(angles, dtype=float)
    dim = angles.size + 1
    basis = np.eye(dim)
    for k, theta in enumerate(angles):
        c, s = math.cos(theta), math.sin(theta)
        rows = basis[[k, k + 1], :].copy()
        basis[k, :] = c * rows[0] - s * rows[1]
        basis[k + 1, :] = s * rows[0] + c * rows[1]
    return basis


def random_basis(dim: int, theta_max: float, rng) -> BasisSample:
    """Draw one bounded-angle basis per party.

    ``dim - 1`` angles per party, uniform on ``[0, theta_max)``; party A
    is drawn before party B from the same stream.
    """
    if dim < 2:
        raise ContractViolationError(f"basis dimension must be >= 2, got {dim}")
    if not 0.0 < theta_max <= 2.0 * math.pi:
        raise ContractViolationError(
            f"theta_max must lie in (0, 2*pi], got {theta_max}"
        )
    gen = rng.generator() if isinstance(rng, SeededRng) else rng
    angles_a = gen.uniform(0.0, theta_max, dim - 1)
    angles_b = gen.uniform(0.0, theta_max, dim - 1)
    return BasisSample(angles_a, angles_b, givens_chain(angles_a), givens_chain(angles_b))


def rebase_state(coefficients, basis_a, basis_b) -> PureBipartiteState:
    """Pure state with the given Schmidt coefficients in the given bases.

    ``amps[n, m] = sum_k c_k basis_a[n, k] basis_b[m, k]``; the Schmidt
    spectrum of the result equals ``coefficients`` because the bases are
    orthonormal.
    """
    c = np.asarray(coefficients, dtype=float)
    a = np.asarray(basis_a)
    b = np.asarray(basis_b)
    if a.shape != (c.size, c.size) or b.shape != (c.size, c.size):
        raise ContractViolationError(
            f"bases must be {c.size}x{c.size} to match {c.size} coefficients"
        )
    if abs(np.sum(c * c) - 1.0) > 1e-10:
        raise ContractViolationError("schmidt coefficients must be normalized")
    amps = (a * c) @ b.T
    return PureBipartiteState(Truncation(c.size - 1), amps.astype(np.complex128))


@dataclass(frozen=True)
class ConstrainedResult:
    """Outcome of one constrained-spectrum solve.

    ``coefficients`` is None when the tail is infeasible or the Newton
    iteration failed; ``reason`` then names the failure.  Coefficients
    come in solver order ``(c1, c2, c3, tail...)``, not sorted.
    """

    coefficients: np.ndarray | None
    reason: str | None
    iterations: int
    entropy_trace: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.coefficients is not None

    def spectrum(self) -> measures.SchmidtSpectrum:
        if self.coefficients is None:
            raise InfeasibleConstraintError(f"no feasible spectrum: {self.reason}")
        order = np.argsort(-self.coefficients, kind="stable")
        c = self.coefficients[order]
        eye = np.eye(c.size)
        return measures.SchmidtSpectrum(c, eye[:, order], eye[:, order])


def _leading_pair(s: float, q: float) -> tuple[float, float] | None:
    disc = 2.0 * q - s * s
    if disc < 0.0:
        return None
    d = math.sqrt(disc)
    return 0.5 * (s + d), 0.5 * (s - d)


def _feasible_intervals(s0: float, q0: float) -> list[tuple[float, float]]:
    """Closed intervals of c3 on which (c1, c2) exist with c2 >= 0.

    Constraints: ``s = s0 - c3 >= 0``; ``2 q - s^2 >= 0`` with
    ``q = q0 - c3^2`` (real pair); ``s^2 >= q`` (nonnegative c2); c3 >= 0.
    """
    disc_pair = 6.0 * q0 - 2.0 * s0 * s0
    if disc_pair < 0.0:
        return []
    root = math.sqrt(disc_pair)
    lo = max((s0 - root) / 3.0, 0.0)
    hi = min((s0 + root) / 3.0, s0)
    if hi < lo:
        return []
    disc_c2 = 2.0 * q0 - s0 * s0
    if disc_c2 <= 0.0:
        return [(lo, hi)]
    r = math.sqrt(disc_c2)
    left_cap = 0.5 * (s0 - r)
    right_cap = 0.5 * (s0 + r)
    intervals = []
    if left_cap >= lo:
        intervals.append((lo, min(left_cap, hi)))
    if right_cap <= hi:
        intervals.append((max(right_cap, lo), hi))
    return [iv for iv in intervals if iv[1] >= iv[0]]


def solve_constrained_schmidt(
    entropy_target: float,
    negativity_target: float,
    tail,
    max_iterations: int = NEWTON_MAX_ITER,
    tolerance: float = NEWTON_TOL,
    keep_trace: bool = False,
) -> ConstrainedResult:
    """Schmidt coefficients with prescribed entropy and negativity.

    Given fixed tail values ``c4..cM``, the sum and norm constraints
    leave ``c1, c2`` as explicit functions of ``c3``
    (``c1,2 = (s +/- sqrt(2 q - s^2)) / 2`` with ``s`` the remaining
    coefficient sum and ``q`` the remaining squared mass); a damped
    Newton iteration then drives the entropy to the target.  Failure
    modes (negative discriminant, negative coefficients, stalled or
    non-convergent Newton) are reported, never clamped.
    """
    tail = np.asarray(tail, dtype=float)
    if tail.ndim != 1 or tail.size < 1:
        raise ContractViolationError("tail must hold the coefficients c4..cM (M >= 4)")
    if np.any(tail < 0.0):
        return ConstrainedResult(None, "negative_tail_coefficient", 0)
    if negativity_target < 0.0 or entropy_target < 0.0:
        raise ContractViolationError("targets must be nonnegative")

    s0 = math.sqrt(2.0 * negativity_target + 1.0) - float(np.sum(tail))
    q0 = 1.0 - float(np.sum(tail * tail))
    if s0 < 0.0:
        return ConstrainedResult(None, "tail_sum_exceeds_budget", 0)
    if q0 <= 0.0:
        return ConstrainedResult(None, "tail_mass_exceeds_unity", 0)

    intervals = _feasible_intervals(s0, q0)
    if not intervals:
        return ConstrainedResult(None, "no_feasible_c3", 0)

    log2e = 1.0 / math.log(2.0)

    def full_vector(c3: float) -> np.ndarray | None:
        pair = _leading_pair(s0 - c3, q0 - c3 * c3)
        if pair is None or pair[1] < 0.0:
            return None
        return np.concatenate(([pair[0], pair[1], c3], tail))

    def entropy_at(c3: float) -> float | None:
        vec = full_vector(c3)
        if vec is None:
            return None
        return measures.entanglement_entropy(vec)

    def entropy_slope(c3: float) -> float | None:
        s = s0 - c3
        q = q0 - c3 * c3
        disc = 2.0 * q - s * s
        if disc <= 1e-12:
            return None
        d = math.sqrt(disc)
        c1 = 0.5 * (s + d)
        c2 = 0.5 * (s - d)
        dd = (s - 2.0 * c3) / d
        dc1 = 0.5 * (-1.0 + dd)
        dc2 = 0.5 * (-1.0 - dd)

        def g(c):
            if c <= 0.0:
                return 0.0
            return -2.0 * c * (math.log2(c * c) + log2e)

        return g(c1) * dc1 + g(c2) * dc2 + g(c3)

    # The entropy can cross the target several times across the feasible
    # set (the same multiset of coefficients reappears in permuted
    # arrangements).  Follow the branch with the smallest c3: it contains
    # the descending, squeezed-state-like arrangement and varies
    # continuously with the tail, which keeps the sampled family
    # single-valued.
    bracket = None
    for lo, hi in intervals:
        xs = np.linspace(lo, hi, 129)
        prev_x = None
        prev_f = None
        for x in xs:
            e = entropy_at(float(x))
            if e is None:
                prev_x, prev_f = None, None
                continue
            f = e - entropy_target
            if prev_f is not None and (f == 0.0 or prev_f * f <= 0.0):
                bracket = (prev_x, float(x))
                break
            prev_x, prev_f = float(x), f
        if bracket is not None:
            break
    if bracket is None:
        return ConstrainedResult(None, "entropy_target_unreachable", 0)

    trace: list[float] = []
    lo, hi = bracket
    e_lo = entropy_at(lo)
    e_hi = entropy_at(hi)
    if abs(e_lo - entropy_target) <= abs(e_hi - entropy_target):
        c3, err = lo, abs(e_lo - entropy_target)
    else:
        c3, err = hi, abs(e_hi - entropy_target)
    iterations = 0
    while iterations < max_iterations:
        if keep_trace:
            trace.append(err)
        if err < tolerance:
            vec = full_vector(c3)
            checks = (
                abs(np.sum(vec) - math.sqrt(2.0 * negativity_target + 1.0)),
                abs(np.sum(vec * vec) - 1.0),
                abs(measures.entanglement_entropy(vec) - entropy_target),
            )
            if max(checks) > CONSTRAINT_TOL:
                return ConstrainedResult(
                    None, "constraint_residual_too_large", iterations, tuple(trace)
                )
            return ConstrainedResult(vec, None, iterations, tuple(trace))
        iterations += 1
        slope = entropy_slope(c3)
        if slope is None or slope == 0.0:
            step = 1e-7
            e_plus = entropy_at(min(c3 + step, hi))
            e_minus = entropy_at(max(c3 - step, lo))
            if e_plus is None or e_minus is None:
                return ConstrainedResult(None, "newton_derivative_unavailable", iterations, tuple(trace))
            slope = (e_plus - e_minus) / (min(c3 + step, hi) - max(c3 - step, lo))
            if slope == 0.0:
                return ConstrainedResult(None, "newton_flat_derivative", iterations, tuple(trace))
        delta = (entropy_target - entropy_at(c3)) / slope
        accepted = False
        for _ in range(60):
            cand = min(max(c3 + delta, lo), hi)
            e = entropy_at(cand)
            if e is not None:
                new_err = abs(e - entropy_target)
                if new_err < err:
                    c3, err = cand, new_err
                    accepted = True
                    break
            delta *= 0.5
            if abs(delta) < 1e-18:
                break
        if not accepted:
            return ConstrainedResult(None, "newton_stalled", iterations, tuple(trace))
    return ConstrainedResult(None, "newton_did_not_converge", iterations, tuple(trace))


@dataclass
class SamplingStats:
    """Rejection bookkeeping for a constrained-sampling run."""

    attempts: int = 0
    accepted: int = 0
    rejections: dict = field(default_factory=dict)

    def record_failure(self, reason: str):
        self.attempts += 1
        self.rejections[reason] = self.rejections.get(reason, 0) + 1

    def record_success(self):
        self.attempts += 1
        self.accepted += 1


def sample_constrained_states(
    rank: int,
    entropy_target: float,
    negativity_target: float,
    count: int,
    rng,
) -> tuple[list[np.ndarray], SamplingStats]:
    """Draw ``count`` feasible constrained spectra of the given rank.

    Tail coefficients are drawn uniformly from ``[0, c_max]`` with
    ``c_max = min(1, sqrt(2 N + 1))`` and rejected on infeasibility; the
    run aborts once the running feasibility rate falls below 1e-3.
    Returns coefficient vectors in solver order plus the rejection stats.
    """
    if rank < 4:
        raise ContractViolationError(f"rank must be >= 4, got {rank}")
    gen = rng.generator() if isinstance(rng, SeededRng) else rng
    c_max = min(1.0, math.sqrt(2.0 * negativity_target + 1.0))
    out: list[np.ndarray] = []
    stats = SamplingStats()
    while len(out) < count:
        tail = gen.uniform(0.0, c_max, rank - 3)
        result = solve_constrained_schmidt(entropy_target, negativity_target, tail)
        if result.feasible:
            stats.record_success()
            out.append(result.coefficients)
        else:
            stats.record_failure(result.reason)
        if stats.attempts >= 1000 and stats.accepted < MIN_FEASIBILITY_RATE * stats.attempts:
            raise InfeasibleConstraintError(
                f"feasibility rate {stats.accepted}/{stats.attempts} below "
                f"{MIN_FEASIBILITY_RATE}; targets E={entropy_target}, "
                f"N={negativity_target}, rank={rank}; rejections: {stats.rejections}"
            )
    return out, stats
