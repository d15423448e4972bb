"""Brute-force finite-chain integration of i dC/dt = H(t) C.

Classic fixed-step RK4 on the open chain; the independent oracle for the
closed-form propagator and the only route to boundary physics (skin
accumulation, finite-size effects) the infinite-lattice formulas miss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .bessel import solve_x_star
from .errors import DomainError, EvolutionOverflowError
from .lattice import DriveField, LatticeParams
from .propagator import InitialState

__all__ = ["EvolutionResult", "integrate", "safe_window", "center_of_mass", "stability_dt"]

_EDGE_MARGIN = 5  # sites between the wavefront and the boundary

_OVERFLOW_LIMIT = 1e140  # abort unnormalized runs past this amplitude


@dataclass
class EvolutionResult:
    """Sampled trajectory: amplitudes[i] is the state at times[i].

    If ``log_norm`` is present the stored slices are unit-norm and the raw
    state is amplitudes[i] * exp(log_norm[i]).
    """

    times: np.ndarray
    amplitudes: np.ndarray
    lattice: LatticeParams
    drive: DriveField
    method: str
    normalized: bool
    log_norm: np.ndarray | None = None

    @property
    def sites(self) -> np.ndarray:
        return np.arange(1, self.lattice.length + 1)

    def probabilities(self, *, normalize: bool = False) -> np.ndarray:
        """|C_m(t)|^2 on the stored grid; optionally re-normalized per slice."""
        rho = np.abs(self.amplitudes) ** 2
        if normalize:
            rho = rho / rho.sum(axis=1, keepdims=True)
        return rho


@njit(cache=True)
def _rk4_run(c, jl, jr, e0, e1, omega, a, dt, n_steps, stride, renorm, out, lognorm):
    ell = c.shape[0]
    k1 = np.empty(ell, dtype=np.complex128)
    k2 = np.empty(ell, dtype=np.complex128)
    k3 = np.empty(ell, dtype=np.complex128)
    k4 = np.empty(ell, dtype=np.complex128)
    work = np.empty(ell, dtype=np.complex128)
    out[0, :] = c
    acc_log = 0.0
    stored = 1
    for step in range(n_steps):
        t = step * dt
        for stage in range(4):
            if stage == 0:
                ts = t
                src = c
                dst = k1
            elif stage == 1:
                ts = t + 0.5 * dt
                for m in range(ell):
                    work[m] = c[m] + 0.5 * dt * k1[m]
                src = work
                dst = k2
            elif stage == 2:
                ts = t + 0.5 * dt
                for m in range(ell):
                    work[m] = c[m] + 0.5 * dt * k2[m]
                src = work
                dst = k3
            else:
                ts = t + dt
                for m in range(ell):
                    work[m] = c[m] + dt * k3[m]
                src = work
                dst = k4
            e_t = e0 + e1 * math.cos(omega * ts)
            for m in range(ell):
                acc = e_t * a * (m + 1) * src[m]
                if m + 1 < ell:
                    acc += jl * src[m + 1]
                if m > 0:
                    acc += jr * src[m - 1]
                dst[m] = -1j * acc
        peak = 0.0
        for m in range(ell):
            c[m] += (dt / 6.0) * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m])
            mag = abs(c[m])
            if mag > peak:
                peak = mag
        if renorm:
            nrm = 0.0
            for m in range(ell):
                nrm += c[m].real ** 2 + c[m].imag ** 2
            nrm = math.sqrt(nrm)
            for m in range(ell):
                c[m] /= nrm
            acc_log += math.log(nrm)
        elif peak > _OVERFLOW_LIMIT:
            return -(step + 1)
        if (step + 1) % stride == 0 or step + 1 == n_steps:
            out[stored, :] = c
            lognorm[stored] = acc_log
            stored += 1
    return stored


def stability_dt(p: LatticeParams, d: DriveField) -> float:
    """Step-size ceiling 0.05 / max(|J_L|, |J_R|, (|E0| + |E1|) L a)."""
    scale = max(
        abs(p.hop_left),
        abs(p.hop_right),
        (abs(d.dc) + abs(d.ac)) * p.length * p.site_spacing,
    )
    return 0.05 / scale


def integrate(
    p: LatticeParams,
    d: DriveField,
    psi0: InitialState,
    t_end: float,
    dt: float | None = None,
    *,
    stride: int | None = None,
    renormalize: bool = False,
) -> EvolutionResult:
    """RK4 evolution of the open chain up to t_end, sampling every ``stride``
    steps.

    The default step is T/4096 under ac driving and 1e-3 otherwise, clamped
    to the stability ceiling; a caller-supplied dt must respect that ceiling.
    Unnormalized non-Hermitian runs abort with an overflow error once
    amplitudes grow past the representable range; ``renormalize=True``
    stores unit-norm slices plus the accumulated log-norm instead.
    """
    if t_end < 0 or not math.isfinite(t_end):
        raise ValueError("t_end must be finite and >= 0")
    dt_max = stability_dt(p, d)
    if dt is None:
        dt = min(d.period / 4096.0 if d.ac != 0.0 else 1e-3, dt_max)
    elif dt <= 0 or dt > dt_max * (1 + 1e-12):
        raise ValueError(
            f"dt must be in (0, {dt_max:.3e}] for these parameters, got {dt}"
        )
    c0 = np.zeros(p.length, dtype=complex)
    for site, amp in psi0.amplitudes.items():
        if not 1 <= site <= p.length:
            raise ValueError(f"initial site {site} outside the chain 1..{p.length}")
        c0[site - 1] = amp
    if t_end == 0.0:
        return EvolutionResult(
            times=np.zeros(1),
            amplitudes=c0[None, :].copy(),
            lattice=p,
            drive=d,
            method="rk4",
            normalized=False,
        )
    n_steps = max(int(math.ceil(t_end / dt - 1e-9)), 1)
    dt = t_end / n_steps
    if stride is None:
        stride = max(n_steps // 2000, 1)
    stored_steps = [0] + [
        s for s in range(1, n_steps + 1) if s % stride == 0 or s == n_steps
    ]
    out = np.empty((len(stored_steps), p.length), dtype=complex)
    lognorm = np.zeros(len(stored_steps))
    c = c0.copy()
    nrm0 = np.linalg.norm(c)
    if renormalize:
        c /= nrm0
    status = _rk4_run(
        c,
        p.hop_left,
        p.hop_right,
        d.dc,
        d.ac,
        d.omega,
        p.site_spacing,
        dt,
        n_steps,
        stride,
        renormalize,
        out,
        lognorm,
    )
    if status < 0:
        raise EvolutionOverflowError(
            f"amplitudes overflowed at step {-status} (t = {-status * dt:.4g}); "
            "rerun with renormalize=True to track the log-norm instead"
        )
    if renormalize:
        lognorm += math.log(nrm0)
    return EvolutionResult(
        times=dt * np.asarray(stored_steps, dtype=float),
        amplitudes=out,
        lattice=p,
        drive=d,
        method="rk4",
        normalized=renormalize,
        log_norm=lognorm if renormalize else None,
    )


def safe_window(p: LatticeParams, n0: int) -> float:
    """Horizon within which the wavefront (speed 2 J_R / x*) cannot have
    reached either edge, so infinite-lattice formulas apply to the chain."""
    if not (0.0 < p.hop_left <= p.hop_right):
        raise DomainError("safe window assumes J_R >= J_L > 0")
    if not 1 <= n0 <= p.length:
        raise DomainError(f"n0 must lie on the chain 1..{p.length}")
    reach = min(p.length - n0, n0 - 1) - _EDGE_MARGIN
    if reach <= 0:
        raise DomainError(
            f"chain too short: start {n0} is within {_EDGE_MARGIN} sites of an edge"
        )
    x_star = 1.0 if p.hop_left == p.hop_right else solve_x_star(p.hop_left, p.hop_right)
    return reach * x_star / (2.0 * p.hop_right)


def center_of_mass(res: EvolutionResult) -> np.ndarray:
    """First moment sum_m m rho_m / sum_m rho_m per stored slice, aligned
    with res.times."""
    rho = res.probabilities()
    return (rho @ res.sites) / rho.sum(axis=1)
