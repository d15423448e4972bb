"""Non-reciprocal 1-D chain in a uniform, optionally time-periodic, electric field.

The single-particle Hamiltonian on sites n = 1..L is

    H(t) = sum_n  J_L |n><n+1|  +  J_R |n+1><n|  +  E(t) a n |n><n|,

with leftward / rightward hopping amplitudes J_L, J_R, lattice constant a,
and drive E(t) = E0 + E1 cos(w t).  A twisted ring closure adds
J_L e^{i phi} |L><1| + J_R e^{-i phi} |1><L|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LatticeParams",
    "DriveField",
    "BoundaryCondition",
    "OPEN",
    "twisted",
    "build_hamiltonian",
    "field_at",
]


def _require_finite(value: float, name: str) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class LatticeParams:
    """Chain geometry and hopping amplitudes.

    ``hop_left`` multiplies |n><n+1| (motion to the left), ``hop_right``
    multiplies |n+1><n|.  Sites are labelled 1..length.
    """

    length: int
    hop_left: float
    hop_right: float
    site_spacing: float = 1.0

    def __post_init__(self) -> None:
        if int(self.length) != self.length or self.length < 2:
            raise ValueError(f"length must be an integer >= 2, got {self.length!r}")
        object.__setattr__(self, "length", int(self.length))
        for name in ("hop_left", "hop_right", "site_spacing"):
            _require_finite(getattr(self, name), name)
        if self.site_spacing <= 0:
            raise ValueError("site_spacing must be positive")

    @classmethod
    def from_asymmetry(
        cls,
        length: int,
        j: float = 1.0,
        gamma: float = 0.0,
        site_spacing: float = 1.0,
    ) -> "LatticeParams":
        """Build from mean hopping j and asymmetry gamma >= 0.

        Uses J_L = j - gamma/2 and J_R = j + gamma/2, so ``gamma`` and
        ``mean_hop`` round-trip exactly.
        """
        if gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {gamma}")
        return cls(length, j - gamma / 2, j + gamma / 2, site_spacing)

    @property
    def gamma(self) -> float:
        return self.hop_right - self.hop_left

    @property
    def mean_hop(self) -> float:
        return 0.5 * (self.hop_left + self.hop_right)

    @property
    def sites(self) -> np.ndarray:
        return np.arange(1, self.length + 1)


@dataclass(frozen=True)
class DriveField:
    """Uniform field E(t) = dc + ac * cos(omega t)."""

    dc: float = 0.0
    ac: float = 0.0
    omega: float = 0.0

    def __post_init__(self) -> None:
        for name in ("dc", "ac", "omega"):
            _require_finite(getattr(self, name), name)
        if self.ac != 0.0 and self.omega <= 0.0:
            raise ValueError("omega must be positive when an ac component is present")

    @property
    def is_static(self) -> bool:
        return self.ac == 0.0

    @property
    def period(self) -> float:
        """Drive period 2 pi / omega; defined only with an ac component."""
        if self.ac == 0.0:
            raise ValueError("period is undefined without an ac component")
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class BoundaryCondition:
    """Open chain, or ring closure with twist phase phi in [0, 2 pi)."""

    kind: str
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("open", "twisted"):
            raise ValueError(f"kind must be 'open' or 'twisted', got {self.kind!r}")
        _require_finite(self.phi, "phi")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))


OPEN = BoundaryCondition("open")


def twisted(phi: float) -> BoundaryCondition:
    return BoundaryCondition("twisted", phi)


def field_at(d: DriveField, t):
    """Field value E(t) = dc + ac * cos(omega t); accepts scalar or array t."""
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("t must be finite")
    out = d.dc + d.ac * np.cos(d.omega * t)
    return float(out) if out.ndim == 0 else out


def build_hamiltonian(
    p: LatticeParams,
    d: DriveField,
    t: float = 0.0,
    bc: BoundaryCondition = OPEN,
) -> np.ndarray:
    """Dense L x L matrix <n|H(t)|m> (row = bra, column = ket).

    H[n, n+1] = J_L, H[n+1, n] = J_R for 1 <= n < L, H[n, n] = E(t) a n.
    A twisted boundary adds J_L e^{i phi} at (L, 1) and J_R e^{-i phi}
    at (1, L); the open chain simply lacks both corner entries.
    """
    e_t = field_at(d, t)
    ell = p.length
    h = np.zeros((ell, ell), dtype=complex)
    idx = np.arange(ell - 1)
    h[idx, idx + 1] = p.hop_left
    h[idx + 1, idx] = p.hop_right
    h[np.diag_indices(ell)] = e_t * p.site_spacing * np.arange(1, ell + 1)
    if bc.kind == "twisted":
        h[ell - 1, 0] += p.hop_left * np.exp(1j * bc.phi)
        h[0, ell - 1] += p.hop_right * np.exp(-1j * bc.phi)
    return h
