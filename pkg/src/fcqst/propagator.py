"""Exact unitary evolution of Hermitian sector matrices.

All propagators are built from the eigendecomposition U = V e^{-i w t} V+,
which is exact (to roundoff) and unconditionally stable for the dense
Hermitian matrices this package produces.  Piecewise-constant schedules are
the only representation of time dependence; smooth controls are sampled by
the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import BasisError, GridMismatchError, HermiticityError, SizeLimitError
from .spin_model import (
    EFFECTIVE3,
    HERMITICITY_TOL,
    SINGLE_EXCITATION,
    SectorMatrix,
    SpinModel,
    project_full_space,
)

LR_MAX_QUBITS = 10


def minimum_transfer_time(n: int, j0: float = 1.0) -> float:
    """Transfer time pi / (j0 sqrt(2 n)) of the named optimal constant protocols."""
    return np.pi / (j0 * np.sqrt(2.0 * n))


def _as_hermitian_array(h) -> np.ndarray:
    m = h.entries if isinstance(h, SectorMatrix) else np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.abs(m).max()))
    dev = float(np.abs(m - m.conj().T).max())
    if dev > HERMITICITY_TOL * scale:
        raise HermiticityError(f"propagator input not Hermitian: deviation {dev:.3e}")
    return m


def expm_hermitian(h, t: float) -> np.ndarray:
    """exp(-i h t) for a Hermitian matrix (or SectorMatrix) via eigh."""
    m = _as_hermitian_array(h)
    if np.abs(m.imag).max() == 0.0:
        w, v = np.linalg.eigh(m.real)  # real-symmetric path is ~2x faster
        v = v.astype(complex)
    else:
        w, v = np.linalg.eigh(m)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve_constant(h, t: float) -> np.ndarray:
    """Propagator of a constant Hamiltonian over time t."""
    return expm_hermitian(h, t)


@dataclass(frozen=True)
class ControlSchedule:
    """Ordered piecewise-constant control: (duration, SectorMatrix) segments."""

    segments: tuple[tuple[float, SectorMatrix], ...]

    def __post_init__(self):
        if not self.segments:
            raise GridMismatchError("schedule needs at least one segment")
        segs = tuple((float(dt), h) for dt, h in self.segments)
        tag, dim = segs[0][1].basis_tag, segs[0][1].dim
        for dt, h in segs:
            if dt <= 0:
                raise GridMismatchError(f"segment durations must be positive, got {dt}")
            if h.basis_tag != tag or h.dim != dim:
                raise BasisError("all segments must share basis_tag and dimension")
        object.__setattr__(self, "segments", segs)

    @property
    def total_time(self) -> float:
        return sum(dt for dt, _ in self.segments)

    @property
    def basis_tag(self) -> str:
        return self.segments[0][1].basis_tag

    @property
    def dim(self) -> int:
        return self.segments[0][1].dim


def segment_propagators(mats: np.ndarray, durations: np.ndarray) -> np.ndarray:
    """Batched exp(-i H_k dt_k) for a (K, d, d) stack of Hermitian matrices."""
    if np.abs(mats.imag).max() == 0.0:
        w, v = np.linalg.eigh(mats.real)
        v = v.astype(complex)
    else:
        w, v = np.linalg.eigh(mats)
    phases = np.exp(-1j * w * durations[:, None])
    return np.einsum("kij,kj,klj->kil", v, phases, v.conj())


def ordered_product(us: np.ndarray) -> np.ndarray:
    """Time-ordered product U_K ... U_2 U_1 of a (K, d, d) stack.

    Pairwise tree reduction keeps the Python-level loop O(log K) for the
    fine grids used by interaction-picture and residual checks.
    """
    while us.shape[0] > 1:
        k = us.shape[0]
        even = us[0:k - (k % 2):2]
        odd = us[1:k:2]
        merged = np.matmul(odd, even)  # later segment acts on the left
        if k % 2:
            merged = np.concatenate([merged, us[k - 1:k]], axis=0)
        us = merged
    return us[0]


def evolve_schedule(schedule: ControlSchedule) -> np.ndarray:
    """Propagator of a piecewise-constant schedule (right-to-left product)."""
    mats = np.stack([_as_hermitian_array(h) for _, h in schedule.segments])
    durations = np.array([dt for dt, _ in schedule.segments])
    return ordered_product(segment_propagators(mats, durations))


def transfer_fidelity(u: np.ndarray, basis_tag: str) -> float:
    """|<target|U|source>| for the given sector basis.

    The effective 3-level basis uses |phi_3> as the target and |phi_1> as
    the source; the single-excitation basis uses |N> and |1>.  The full
    2^N basis is rejected: use ``lr_commutator_check`` there instead.
    """
    u = np.asarray(u)
    if basis_tag == EFFECTIVE3:
        return float(abs(u[2, 0]))
    if basis_tag == SINGLE_EXCITATION:
        return float(abs(u[-1, 0]))
    raise BasisError(f"transfer fidelity undefined for basis {basis_tag!r}")


def _apply_sigma_x(psi: np.ndarray, qubit: int) -> np.ndarray:
    mask = 1 << (qubit - 1)
    return psi[np.arange(psi.size) ^ mask]


def _apply_sigma_y(psi: np.ndarray, qubit: int) -> np.ndarray:
    # sy|0> = i|1>, sy|1> = -i|0>
    idx = np.arange(psi.size)
    mask = 1 << (qubit - 1)
    amp = np.where((idx & mask) == 0, 1j, -1j)
    out = np.empty_like(psi)
    out[idx ^ mask] = amp * psi
    return out


def lr_commutator_check(model: SpinModel, t: float) -> complex:
    """<psi0| [sy_N(t), sx_1] |psi0> for the completed transfer protocol.

    psi0 is the all-|0> state and sy_N(t) is Heisenberg-evolved under the
    full 2^N unitary, composed with the free single-qubit phase gate on
    qubit N that completes the state transfer (it aligns the vacuum and
    transfer phases; without it the expectation's modulus depends on an
    N-dependent relative phase rather than on the transfer quality).  For a
    perfect transfer the result has modulus exactly 2.
    """
    if model.n > LR_MAX_QUBITS:
        raise SizeLimitError(
            f"commutator check limited to n <= {LR_MAX_QUBITS}, got n={model.n}")
    h = project_full_space(model)
    u = expm_hermitian(h, t)
    dim = u.shape[0]
    psi0 = np.zeros(dim, dtype=complex)
    psi0[0] = 1.0

    vac_amp = u[0, 0]
    src = 1 << 0
    tgt = 1 << (model.n - 1)
    transfer_amp = u[tgt, src]

    # phase gate diag(1, e^{i theta}) on qubit N plus a global phase: makes
    # the vacuum amplitude real-positive and the transfer amplitude's phase
    # match it, as the transfer protocol prescribes.
    chi = -np.angle(vac_amp) if abs(vac_amp) > 0 else 0.0
    theta = (np.angle(vac_amp) - np.angle(transfer_amp)) if abs(transfer_amp) > 0 else 0.0
    idx = np.arange(dim)
    gate = np.exp(1j * chi) * np.where((idx & tgt) == 0, 1.0, np.exp(1j * theta))
    u = gate[:, None] * u

    upsi0 = u @ psi0
    term1 = np.vdot(upsi0, _apply_sigma_y(u @ _apply_sigma_x(psi0, 1), model.n))
    term2 = np.vdot(u @ _apply_sigma_x(psi0, 1), _apply_sigma_y(upsi0, model.n))
    return complex(term1 - term2)
