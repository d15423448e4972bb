"""Static diagnostics of the dc-driven chain: open-boundary spectra,
skin-mode counting, the twisted-boundary winding number, and the
finite-size transition field.

The winding number is the phase winding of det[H(phi) - E_c] as the twist
phi runs once around the loop, with orientation fixed so that the
rightward-skin phase (J_R > J_L) carries w = +1 and the no-skin phase
w = 0.  E_c defaults to the arithmetic mean of the spectrum.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .lattice import DriveField, LatticeParams, OPEN, build_hamiltonian, twisted

__all__ = [
    "SpectralResult",
    "obc_spectrum",
    "winding_number",
    "skin_mode_count",
    "critical_field",
]

_MAX_PHI_SAMPLES = 2**16


@dataclass
class SpectralResult:
    """Eigendecomposition summary; eigenvalues sorted by (Re, Im) and
    right eigenvectors column-aligned, unit Euclidean norm."""

    eigenvalues: np.ndarray
    right_eigenvectors: np.ndarray
    e_ref: complex
    winding: int | None
    skin_count: int
    lattice: LatticeParams
    e0: float
    frequencies: np.ndarray | None = None


def _eig_sorted(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        evals, evecs = np.linalg.eig(h)
    except np.linalg.LinAlgError as exc:
        dump = os.path.join(tempfile.gettempdir(), "nhse_eig_failure.npy")
        np.save(dump, h)
        raise NumericalError(f"eigensolver failed to converge; matrix saved to {dump}") from exc
    order = np.lexsort((evals.imag, evals.real))
    evals = evals[order]
    evecs = evecs[:, order]
    evecs = evecs / np.linalg.norm(evecs, axis=0, keepdims=True)
    return evals, evecs


def obc_spectrum(p: LatticeParams, e0: float, *, compute_winding: bool = False) -> SpectralResult:
    """Full dense eigendecomposition of the open chain under a dc field."""
    d = DriveField(dc=e0)
    h = build_hamiltonian(p, d, 0.0, OPEN)
    evals, evecs = _eig_sorted(h)
    e_ref = complex(np.mean(evals))
    result = SpectralResult(
        eigenvalues=evals,
        right_eigenvectors=evecs,
        e_ref=e_ref,
        winding=None,
        skin_count=0,
        lattice=p,
        e0=e0,
    )
    result.skin_count = skin_mode_count(result)
    if compute_winding:
        result.winding = winding_number(p, e0, e_ref)
    return result


def _det_args(p: LatticeParams, e0: float, e_ref: complex, phis: np.ndarray) -> np.ndarray:
    base = build_hamiltonian(p, DriveField(dc=e0), 0.0, OPEN)
    base[np.diag_indices(p.length)] -= e_ref
    args = np.empty(phis.size)
    ell = p.length
    for i, phi in enumerate(phis):
        h = base.copy()
        h[ell - 1, 0] += p.hop_left * np.exp(1j * phi)
        h[0, ell - 1] += p.hop_right * np.exp(-1j * phi)
        sign, logabs = np.linalg.slogdet(h)
        if sign == 0 or not np.isfinite(logabs):
            raise _SingularSample()
        args[i] = np.angle(sign)
    return args


class _SingularSample(Exception):
    pass


def _phase_winding(args: np.ndarray) -> tuple[int, float]:
    inc = np.diff(np.concatenate([args, args[:1]]))
    inc = np.mod(inc + math.pi, 2.0 * math.pi) - math.pi  # into (-pi, pi]
    inc[inc == -math.pi] = math.pi
    total = inc.sum() / (2.0 * math.pi)
    return int(round(total)), float(np.max(np.abs(inc)))


def winding_number(
    p: LatticeParams,
    e0: float,
    e_ref: complex | None = None,
    n_phi: int = 64,
) -> int:
    """Integer winding of det[H(phi) - e_ref] over the twist loop.

    Samples the phase on a uniform phi grid, folds increments into
    (-pi, pi], and doubles the resolution until two successive grids agree
    and every increment stays below pi/2.  A reciprocal chain
    (J_L = J_R) cannot wind: its spectrum stays on a line for every phi,
    so 0 is returned directly.
    """
    if n_phi < 64:
        raise ValueError("n_phi must be at least 64")
    if p.hop_left == p.hop_right:
        return 0
    if e_ref is None:
        # mean of the twisted spectrum at phi = 0 equals trace / L
        e_ref = complex(np.trace(build_hamiltonian(p, DriveField(dc=e0), 0.0, twisted(0.0))) / p.length)
    radius = max(
        abs(p.hop_left) + abs(p.hop_right) + abs(e0) * p.site_spacing * p.length,
        1e-12,
    )
    for attempt in range(2):
        try:
            prev = None
            n = n_phi
            while n <= _MAX_PHI_SAMPLES:
                phis = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
                w_raw, max_inc = _phase_winding(_det_args(p, e0, e_ref, phis))
                if prev is not None and w_raw == prev and max_inc < math.pi / 2.0:
                    # orientation: rightward skin (J_R > J_L) maps to +1
                    return -w_raw
                prev = w_raw
                n *= 2
            raise NumericalError(
                f"winding did not stabilize up to {_MAX_PHI_SAMPLES} twist samples"
            )
        except _SingularSample:
            if attempt == 1:
                raise NumericalError(
                    "det[H(phi) - e_ref] singular on the twist loop even after "
                    "perturbing e_ref"
                ) from None
            # lift e_ref off the singular locus and retry once
            e_ref = e_ref + 1e-8j * radius
    raise AssertionError("unreachable")


def skin_mode_count(
    res: SpectralResult,
    edge_fraction: float = 0.1,
    weight_threshold: float = 0.5,
) -> int:
    """Number of eigenvectors holding more than ``weight_threshold`` of their
    probability inside the outer ceil(edge_fraction * L) sites on the favored
    edge (right for J_R >= J_L, else left).

    The window is floored at two sites: a single-site window cannot hold the
    required weight for any Stark mode of width ~ 4 J / E0 > 1 and would make
    the counter vacuous on short chains.
    """
    ell = res.lattice.length
    edge = max(int(math.ceil(edge_fraction * ell)), 2)
    prob = np.abs(res.right_eigenvectors) ** 2
    prob = prob / prob.sum(axis=0, keepdims=True)
    if res.lattice.hop_right >= res.lattice.hop_left:
        weight = prob[ell - edge :, :].sum(axis=0)
    else:
        weight = prob[:edge, :].sum(axis=0)
    return int(np.count_nonzero(weight > weight_threshold))


def critical_field(
    gamma: float,
    length: int,
    bracket: tuple[float, float],
    *,
    j: float = 1.0,
    n_phi: int = 64,
    tol: float = 1e-4,
) -> float:
    """Bisect the dc strength where the winding drops from 1 to 0."""
    p = LatticeParams.from_asymmetry(length, j, gamma)
    e_lo, e_hi = bracket
    if not e_lo < e_hi:
        raise DomainError("bracket must satisfy e_lo < e_hi")
    w_lo = winding_number(p, e_lo, n_phi=n_phi)
    w_hi = winding_number(p, e_hi, n_phi=n_phi)
    if (w_lo, w_hi) != (1, 0):
        raise DomainError(
            f"bracket does not straddle the transition: w({e_lo}) = {w_lo}, "
            f"w({e_hi}) = {w_hi}"
        )
    while e_hi - e_lo >= tol:
        mid = 0.5 * (e_lo + e_hi)
        if winding_number(p, mid, n_phi=n_phi) == 1:
            e_lo = mid
        else:
            e_hi = mid
    return 0.5 * (e_lo + e_hi)
