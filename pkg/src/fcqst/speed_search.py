"""Empirical speed-limit probes: bounded pulse search and time bisection.

The optimizer maximizes the transfer amplitude |<phi_3|U(T)|phi_1>| over
piecewise-constant controls of the 3-level reduction, with every segment
projected back inside the amplitude bounds after each step.  Bisection over
the total time then maps the shortest duration at which a target fidelity
becomes reachable.  Empirically the search confirms unit fidelity at the
closed-form reference time pi/(j0 sqrt(2 n)) -- and also finds protocols
that ride a coupling bound for part of the window (with rotating coupling
phases) reaching unit fidelity a few percent below it, so the reference
should be read as the constant-protocol optimum, not an absolute floor.

Method: multi-start projected gradient ascent with central-difference
gradients and a backtracking line search, falling back to a shrinking
coordinate search when gradients stall.  All randomness comes from the
package's keyed streams, so results are bit-reproducible from the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .effective3 import Effective3
from .exceptions import InvalidSizeError
from .propagator import (
    ControlSchedule,
    minimum_transfer_time,
    ordered_product,
    segment_propagators,
)
from .rng import KeyedStream
from .spin_model import EFFECTIVE3, SectorMatrix

FULL_PARAMS_PER_SEGMENT = 9       # Re/Im of three couplings + three diagonals
REAL_SYM_PARAMS_PER_SEGMENT = 3   # j1a = jan real, j1n real, da


@dataclass(frozen=True)
class PulseParams:
    """Piecewise-constant control over uniform segments of a fixed total time."""

    n: int
    j0: float
    total_time: float
    j1a: np.ndarray
    jan: np.ndarray
    j1n: np.ndarray
    d1: np.ndarray
    da: np.ndarray
    dn: np.ndarray

    def __post_init__(self):
        k = len(self.j1a)
        for name in ("jan", "j1n", "d1", "da", "dn"):
            if len(getattr(self, name)) != k:
                raise InvalidSizeError("per-segment arrays must share one length")
        for name, arr in (("j1a", self.j1a), ("jan", self.jan), ("j1n", self.j1n)):
            object.__setattr__(self, name, np.asarray(arr, dtype=complex))
        for name in ("d1", "da", "dn"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @property
    def n_segments(self) -> int:
        return len(self.j1a)

    @property
    def bounds(self) -> tuple[float, float, float]:
        b = np.sqrt(self.n - 2) * self.j0
        return (b, b, self.j0)

    def segments(self) -> list[tuple[float, Effective3]]:
        dt = self.total_time / self.n_segments
        return [(dt, Effective3(j1a=self.j1a[k], jan=self.jan[k], j1n=self.j1n[k],
                                d1=self.d1[k], da=self.da[k], dn=self.dn[k]))
                for k in range(self.n_segments)]

    def matrices(self) -> np.ndarray:
        mats = np.zeros((self.n_segments, 3, 3), dtype=complex)
        mats[:, 0, 0], mats[:, 1, 1], mats[:, 2, 2] = self.d1, self.da, self.dn
        mats[:, 0, 1], mats[:, 1, 0] = self.j1a, self.j1a.conj()
        mats[:, 1, 2], mats[:, 2, 1] = self.jan, self.jan.conj()
        mats[:, 0, 2], mats[:, 2, 0] = self.j1n, self.j1n.conj()
        return mats

    def bound_report(self) -> dict[str, float]:
        ba, _, bn = self.bounds
        return {"j1a": float(np.abs(self.j1a).max() / ba),
                "jan": float(np.abs(self.jan).max() / ba),
                "j1n": float(np.abs(self.j1n).max() / bn)}


@dataclass(frozen=True)
class SearchResult:
    best_fidelity: float
    best_pulse: PulseParams
    evaluations: int
    seed: int
    restarts_hit_bound: int = 0


def _project_disc(values: np.ndarray, bound: float) -> np.ndarray:
    """Radial projection of complex amplitudes onto |v| <= bound (idempotent)."""
    mags = np.abs(values)
    over = mags > bound
    out = values.copy()
    out[over] *= bound / mags[over]
    return out


class _Problem:
    """Vectorized fidelity of the parameter vector, with bound projection."""

    def __init__(self, n, j0, total_time, n_segments, real_symmetric):
        self.n, self.j0 = n, j0
        self.total_time = total_time
        self.k = n_segments
        self.real_symmetric = real_symmetric
        self.b_coll = np.sqrt(n - 2) * j0
        self.per_seg = REAL_SYM_PARAMS_PER_SEGMENT if real_symmetric else FULL_PARAMS_PER_SEGMENT
        self.dim = self.per_seg * n_segments
        self.durations = np.full(n_segments, total_time / n_segments)

    def project(self, x: np.ndarray) -> np.ndarray:
        v = x.reshape(self.k, self.per_seg).copy()
        if self.real_symmetric:
            v[:, 0] = np.clip(v[:, 0], -self.b_coll, self.b_coll)
            v[:, 1] = np.clip(v[:, 1], -self.j0, self.j0)
        else:
            ja = _project_disc(v[:, 0] + 1j * v[:, 1], self.b_coll)
            jb = _project_disc(v[:, 2] + 1j * v[:, 3], self.b_coll)
            jn = _project_disc(v[:, 4] + 1j * v[:, 5], self.j0)
            v[:, 0], v[:, 1] = ja.real, ja.imag
            v[:, 2], v[:, 3] = jb.real, jb.imag
            v[:, 4], v[:, 5] = jn.real, jn.imag
        return v.reshape(-1)

    def matrices(self, xs: np.ndarray) -> np.ndarray:
        """(C, K, 3, 3) Hamiltonian stacks for a (C, dim) batch of vectors."""
        c = xs.shape[0]
        v = xs.reshape(c, self.k, self.per_seg)
        mats = np.zeros((c, self.k, 3, 3), dtype=complex)
        if self.real_symmetric:
            ja = v[:, :, 0].astype(complex)
            jb = ja
            jn = v[:, :, 1].astype(complex)
            mats[:, :, 1, 1] = v[:, :, 2]
        else:
            ja = v[:, :, 0] + 1j * v[:, :, 1]
            jb = v[:, :, 2] + 1j * v[:, :, 3]
            jn = v[:, :, 4] + 1j * v[:, :, 5]
            mats[:, :, 0, 0] = v[:, :, 6]
            mats[:, :, 1, 1] = v[:, :, 7]
            mats[:, :, 2, 2] = v[:, :, 8]
        mats[:, :, 0, 1], mats[:, :, 1, 0] = ja, ja.conj()
        mats[:, :, 1, 2], mats[:, :, 2, 1] = jb, jb.conj()
        mats[:, :, 0, 2], mats[:, :, 2, 0] = jn, jn.conj()
        return mats

    def fidelity_batch(self, xs: np.ndarray) -> np.ndarray:
        mats = self.matrices(xs)
        c = mats.shape[0]
        w, vv = np.linalg.eigh(mats.reshape(c * self.k, 3, 3))
        phases = np.exp(-1j * w * np.tile(self.durations, c)[:, None])
        us = np.einsum("kij,kj,klj->kil", vv, phases, vv.conj()).reshape(c, self.k, 3, 3)
        amps = np.empty(c)
        for i in range(c):
            u = us[i, 0]
            for s in range(1, self.k):
                u = us[i, s] @ u
            amps[i] = abs(u[2, 0])
        return amps

    def fidelity(self, x: np.ndarray) -> float:
        # single-candidate path shares the propagator module's primitives so
        # the reported optimum is bit-identical to an independent recompute
        us = segment_propagators(self.matrices(x[None])[0], self.durations)
        return float(abs(ordered_product(us)[2, 0]))

    def pulse(self, x: np.ndarray) -> PulseParams:
        v = x.reshape(self.k, self.per_seg)
        if self.real_symmetric:
            ja = v[:, 0].astype(complex)
            return PulseParams(n=self.n, j0=self.j0, total_time=self.total_time,
                               j1a=ja, jan=ja.copy(), j1n=v[:, 1].astype(complex),
                               d1=np.zeros(self.k), da=v[:, 2].copy(), dn=np.zeros(self.k))
        return PulseParams(n=self.n, j0=self.j0, total_time=self.total_time,
                           j1a=v[:, 0] + 1j * v[:, 1], jan=v[:, 2] + 1j * v[:, 3],
                           j1n=v[:, 4] + 1j * v[:, 5],
                           d1=v[:, 6].copy(), da=v[:, 7].copy(), dn=v[:, 8].copy())

    def random_start(self, stream: KeyedStream, constant: bool) -> np.ndarray:
        """Random in-bounds start; ``constant`` replicates one draw across segments."""
        rows = 1 if constant else self.k
        u = stream.uniform(rows * self.per_seg).reshape(rows, self.per_seg)
        v = np.zeros((rows, self.per_seg))
        if self.real_symmetric:
            v[:, 0] = (2 * u[:, 0] - 1) * self.b_coll
            v[:, 1] = (2 * u[:, 1] - 1) * self.j0
            v[:, 2] = (2 * u[:, 2] - 1) * 4 * self.j0
        else:
            for col, bound in ((0, self.b_coll), (2, self.b_coll), (4, self.j0)):
                mag = bound * np.sqrt(u[:, col])
                ang = 2 * np.pi * u[:, col + 1]
                v[:, col] = mag * np.cos(ang)
                v[:, col + 1] = mag * np.sin(ang)
            v[:, 6:9] = (2 * u[:, 6:9] - 1) * 4 * self.j0
        if constant:
            v = np.repeat(v, self.k, axis=0)
        return v.reshape(-1)


def _ascend(problem: _Problem, x0: np.ndarray, max_iters: int,
            stop_fidelity: float | None):
    """Projected gradient ascent with line search; returns (x, f, evaluations)."""
    x = problem.project(x0)
    f = problem.fidelity(x)
    evals = 1
    step = 0.3
    delta = 0.1  # coordinate-search radius, shrunk on failure
    eye = np.eye(problem.dim)
    for _ in range(max_iters):
        if stop_fidelity is not None and f >= stop_fidelity:
            break
        eps = 1e-6 * np.maximum(1.0, np.abs(x))
        probes = np.concatenate([x + np.diag(eps), x - np.diag(eps)], axis=0)
        fs = problem.fidelity_batch(probes)
        evals += probes.shape[0]
        grad = (fs[:problem.dim] - fs[problem.dim:]) / (2 * eps)
        gnorm = float(np.linalg.norm(grad))

        improved = False
        if gnorm > 1e-13:
            direction = grad / gnorm
            alpha = step
            for _ in range(25):
                cand = problem.project(x + alpha * direction)
                fc = problem.fidelity(cand)
                evals += 1
                if fc > f + 1e-15:
                    x, f = cand, fc
                    step = min(alpha * 1.6, 2.0)
                    improved = True
                    break
                alpha *= 0.5
        if not improved:
            # derivative-free fallback: axis steps of +-delta
            cands = np.concatenate([x + delta * eye, x - delta * eye], axis=0)
            cands = np.array([problem.project(c) for c in cands])
            fs = problem.fidelity_batch(cands)
            evals += cands.shape[0]
            best = int(np.argmax(fs))
            if fs[best] > f + 1e-15:
                x, f = cands[best], fs[best]
                improved = True
            else:
                delta *= 0.3
                step *= 0.5
                if delta < 1e-9:
                    break
    return x, f, evals


def optimize_pulse(n: int, j0: float, total_time: float, n_segments: int,
                   restarts: int, seed: int, *, real_symmetric: bool = False,
                   max_iters: int = 200,
                   stop_fidelity: float | None = None) -> SearchResult:
    """Maximize transfer fidelity over bounded piecewise-constant controls.

    Restarts are independent (stream per restart index; even restarts draw a
    constant-in-time start, odd ones draw per-segment starts) and the best
    result wins, ties broken by the lower restart index.  Deterministic for
    fixed arguments and seed.
    """
    if n < 3 or n_segments < 1 or restarts < 1:
        raise InvalidSizeError("need n >= 3, n_segments >= 1, restarts >= 1")
    if total_time < 0:
        raise InvalidSizeError(f"total_time must be nonnegative, got {total_time}")
    problem = _Problem(n, j0, total_time, n_segments, real_symmetric)
    if total_time == 0:
        # U = I at zero time regardless of the pulse
        x = problem.project(np.zeros(problem.dim))
        return SearchResult(best_fidelity=0.0, best_pulse=problem.pulse(x),
                            evaluations=1, seed=seed)

    best_x, best_f, total_evals, hit_bound = None, -1.0, 0, 0
    for restart in range(restarts):
        stream = KeyedStream.from_seed(seed, restart)
        x0 = problem.random_start(stream, constant=(restart % 2 == 0))
        x, f, evals = _ascend(problem, x0, max_iters, stop_fidelity)
        total_evals += evals
        if max(problem.pulse(x).bound_report().values()) >= 1.0 - 1e-9:
            hit_bound += 1
        if f > best_f:
            best_x, best_f = x, f
        if stop_fidelity is not None and best_f >= stop_fidelity:
            break
    # final value re-derived through the propagator primitives (identical
    # path); clamped into [0, 1] against unitarity roundoff
    final = problem.fidelity(best_x)
    return SearchResult(best_fidelity=min(best_f, final, 1.0),
                        best_pulse=problem.pulse(best_x),
                        evaluations=total_evals, seed=seed, restarts_hit_bound=hit_bound)


def pulse_to_schedule(pulse: PulseParams) -> ControlSchedule:
    """ControlSchedule view of a pulse, for independent fidelity recomputation."""
    return ControlSchedule(segments=tuple(
        (dt, SectorMatrix(basis_tag=EFFECTIVE3, entries=h.matrix()))
        for dt, h in pulse.segments()))


@dataclass(frozen=True)
class BisectionSample:
    total_time: float
    best_fidelity: float
    evaluations: int
    restarts_hit_bound: int


@dataclass(frozen=True)
class BisectionResult:
    t_star: float
    fid_target: float
    samples: tuple[BisectionSample, ...]
    monotonic_warning: bool


def min_time_bisection(n: int, j0: float, fid_target: float, time_tol: float,
                       *, n_segments: int = 8, restarts: int = 8, seed: int = 0,
                       max_iters: int = 150) -> BisectionResult:
    """Smallest total time at which the optimizer reaches ``fid_target``.

    Bisects on [0, 2 pi / (j0 sqrt(2 n))], i.e. up to twice the closed-form
    reference.  Achievable fidelity is assumed monotone in the total time;
    the sampled points are checked and a violation beyond 1e-6 (an optimizer
    failure, not physics) sets ``monotonic_warning``.
    """
    if time_tol <= 0:
        raise InvalidSizeError("time_tol must be positive")
    if fid_target <= 0.0:
        return BisectionResult(t_star=0.0, fid_target=fid_target, samples=(),
                               monotonic_warning=False)
    if not 0.9 < fid_target < 1.0:
        raise InvalidSizeError(
            f"fid_target must lie in (0.9, 1) (or be <= 0 for the trivial case), got {fid_target}")

    samples = []

    def probe(t: float) -> bool:
        res = optimize_pulse(n, j0, t, n_segments, restarts, seed,
                             max_iters=max_iters, stop_fidelity=fid_target)
        samples.append(BisectionSample(total_time=t, best_fidelity=res.best_fidelity,
                                       evaluations=res.evaluations,
                                       restarts_hit_bound=res.restarts_hit_bound))
        return res.best_fidelity >= fid_target

    lo, hi = 0.0, 2.0 * np.pi / (j0 * np.sqrt(2.0 * n))
    if not probe(hi):
        return BisectionResult(t_star=hi, fid_target=fid_target,
                               samples=tuple(samples), monotonic_warning=True)
    while hi - lo > time_tol:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            hi = mid
        else:
            lo = mid

    ordered = sorted(samples, key=lambda s: s.total_time)
    warning = any(a.best_fidelity > b.best_fidelity + 1e-6
                  for a, b in zip(ordered, ordered[1:]))
    return BisectionResult(t_star=hi, fid_target=fid_target, samples=tuple(samples),
                           monotonic_warning=warning)


def optimal_time_reference(n: int, j0: float) -> float:
    """The closed-form reference time the empirical search is compared against."""
    return minimum_transfer_time(n, j0)
