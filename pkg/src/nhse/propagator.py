"""Closed-form dynamics on the infinite driven chain.

Starting from amplitudes C_n(0) with finite support, the exact solution is

    C_m(t) = sum_n C_n(0) e^{-i eta(t) n} (-1)^{m-n}
             J_{m-n}( 2 sqrt(J_L J_R (U^2 + V^2)) )
             [ (J_R/J_L) (iV - U)/(iV + U) ]^{(m-n)/2},

built from the drive phase eta(t) = int_0^t E dt' and the functionals

    u(t) = int_0^t cos eta(t') dt',    U(t) = int_0^t cos[eta(t)-eta(t')] dt',
    v(t) = int_0^t sin eta(t') dt',    V(t) = int_0^t sin[eta(t)-eta(t')] dt',

which satisfy U = u cos eta + v sin eta, V = u sin eta - v cos eta and hence
U^2 + V^2 = u^2 + v^2.

Writing s(t) = u + i v = rho e^{i psi} with psi tracked continuously from
psi(0+) = 0 turns the half power into a single-valued expression,

    C_m(t) = sum_n C_n(0) e^{-i eta n} (-i)^{m-n} (J_R/J_L)^{(m-n)/2}
             e^{-i (m-n)(eta - psi)} J_{m-n}( 2 sqrt(J_L J_R) rho ),

where flipping (rho, psi) -> (-rho, psi + pi) leaves every term invariant, so
the representation is branch-safe even when s passes through zero.
For a single occupied site n0 the occupation reduces to

    rho_m(t) = J_{m-n0}^2( 2 sqrt(J_L J_R (u^2+v^2)) ) (J_R/J_L)^{m-n0}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .bessel import bessel_j_orders
from .errors import DomainError, NearResonanceWarning, UnsupportedConfigurationError
from .lattice import DriveField, LatticeParams

__all__ = [
    "DriveFunctionals",
    "InitialState",
    "eta",
    "uv",
    "uv_quadrature",
    "drive_functionals",
    "evolve_amplitudes",
    "rho_single_site",
    "rho_ratio_longtime",
    "time_averaged_ratio",
    "upper_bound_rho",
]

_SERIES_TAIL = 1e-14  # drop harmonics with |J_k(E1/w)| below this
_INT_TOL = 1e-9  # |E0/w - nu| below this counts as resonant
_WARN_TOL = 1e-3  # ... and below this warns about near-resonance


@dataclass(frozen=True)
class DriveFunctionals:
    """eta, u, v and the retarded pair U, V evaluated at one time."""

    eta: float
    u: float
    v: float
    big_u: float
    big_v: float


@dataclass(frozen=True)
class InitialState:
    """Finite-support site amplitudes {site: C_site(0)}."""

    amplitudes: dict[int, complex]

    def __post_init__(self) -> None:
        amps = {int(n): complex(c) for n, c in self.amplitudes.items() if c != 0}
        if not amps:
            raise ValueError("initial state needs at least one nonzero amplitude")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def single_site(cls, n0: int) -> "InitialState":
        return cls({int(n0): 1.0 + 0.0j})

    @property
    def support(self) -> tuple[int, int]:
        sites = self.amplitudes.keys()
        return min(sites), max(sites)


def eta(d: DriveField, t):
    """Drive phase: E0 t + (E1/w) sin(w t) in closed form (no quadrature)."""
    t = np.asarray(t, dtype=float)
    out = d.dc * t
    if d.ac != 0.0:
        out = out + (d.ac / d.omega) * np.sin(d.omega * t)
    return float(out) if out.ndim == 0 else out


def _resonance_order(d: DriveField) -> int | None:
    """Integer nu with E0 = nu * w, or None; warns in the near-resonant band."""
    if d.ac == 0.0:
        return None
    ratio = d.dc / d.omega
    nu = round(ratio)
    frac = abs(ratio - nu)
    if frac < _INT_TOL:
        return int(nu)
    if frac < _WARN_TOL:
        warnings.warn(
            f"E0/omega = {ratio} is within {frac:.2e} of the integer {nu}; "
            "the localization dichotomy holds only exactly on resonance",
            NearResonanceWarning,
            stacklevel=3,
        )
    return None


def _series_order(z: float, nu_res: int | None) -> int:
    k = int(abs(z)) + 10
    while abs(float(bessel_j_orders(np.array([k]), z)[0])) > _SERIES_TAIL:
        k += 8
    if nu_res is not None:
        k = max(k, abs(nu_res) + 2)
    return k


def _uv_series(d: DriveField, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Jacobi-Anger: cos/sin(E0 t' + z sin w t') = sum_k J_k(z) cos/sin((E0+kw)t'),
    # integrated term by term; the k with E0 + k w = 0 carries the secular part
    # J_{-nu}(z) t = (-1)^nu J_nu(z) t of u and contributes nothing to v.
    z = d.ac / d.omega
    nu_res = _resonance_order(d)
    kmax = _series_order(z, nu_res)
    orders = np.arange(-kmax, kmax + 1)
    weights = bessel_j_orders(orders, z)
    freqs = d.dc + orders * d.omega
    resonant = (
        np.zeros_like(freqs, dtype=bool)
        if nu_res is None
        else (orders == -nu_res)
    )
    safe = np.where(resonant, 1.0, freqs)
    tt = t[:, None]
    u_terms = np.where(resonant, tt, np.sin(safe * tt) / safe)
    v_terms = np.where(resonant, 0.0, 2.0 * np.sin(0.5 * safe * tt) ** 2 / safe)
    u = u_terms @ weights
    v = v_terms @ weights
    return u, v


def uv(d: DriveField, t):
    """Drive functionals u(t), v(t); accepts scalar or array t >= 0.

    Dispatch: E = 0 gives (t, 0); pure dc gives sin(E0 t)/E0 and
    (1 - cos E0 t)/E0; any ac component is summed as a truncated harmonic
    series with the secular resonant term extracted exactly.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise ValueError("t must be finite and >= 0")
    if d.ac == 0.0:
        if d.dc == 0.0:
            u, v = t_arr.copy(), np.zeros_like(t_arr)
        else:
            u = np.sin(d.dc * t_arr) / d.dc
            v = 2.0 * np.sin(0.5 * d.dc * t_arr) ** 2 / d.dc
    else:
        u, v = _uv_series(d, t_arr)
    if np.ndim(t) == 0:
        return float(u[0]), float(v[0])
    return u, v


def uv_quadrature(d: DriveField, t: float, *, tol: float = 1e-10) -> tuple[float, float]:
    """Reference evaluation of u, v by adaptive quadrature of the defining
    integrals; independent cross-check for the series route."""
    u, _ = sp_integrate.quad(
        lambda s: math.cos(eta(d, s)), 0.0, t, epsabs=tol, epsrel=tol, limit=2000
    )
    v, _ = sp_integrate.quad(
        lambda s: math.sin(eta(d, s)), 0.0, t, epsabs=tol, epsrel=tol, limit=2000
    )
    return u, v


def drive_functionals(d: DriveField, t: float) -> DriveFunctionals:
    """eta, u, v and U = u cos eta + v sin eta, V = u sin eta - v cos eta."""
    e = float(eta(d, t))
    u, v = uv(d, t)
    return DriveFunctionals(
        eta=e,
        u=u,
        v=v,
        big_u=u * math.cos(e) + v * math.sin(e),
        big_v=u * math.sin(e) - v * math.cos(e),
    )


def _polar_path(d: DriveField, t: float) -> tuple[float, float]:
    """Signed radius and continuously tracked phase of s(t) = u + i v.

    Any (rho, psi) with s = rho e^{i psi} and psi continuous from psi(0+) = 0
    yields identical amplitudes (flip invariance), so the tracking only needs
    to resolve the smooth rotation of s, not its zero crossings.
    """
    if d.dc == 0.0 and d.ac == 0.0:
        return t, 0.0
    if d.ac == 0.0:
        # s = (2 sin(E0 t / 2) / E0) e^{i E0 t / 2} exactly
        return 2.0 * math.sin(0.5 * d.dc * t) / d.dc, 0.5 * d.dc * t
    step = min(0.2 / (abs(d.dc) + abs(d.ac) + d.omega), d.period / 64.0)
    n_grid = max(int(math.ceil(t / step)), 1)
    grid = np.linspace(0.0, t, n_grid + 1)
    u, v = uv(d, grid)
    psi = np.unwrap(np.angle(u + 1j * v))
    rho = math.hypot(u[-1], v[-1])
    return rho, float(psi[-1])


def _order_cutoff(x: float, ratio: float) -> int:
    """Smallest order K past which |J_k(x)| (J_R/J_L)^{|k|/2} stays < 1e-18."""
    growth = 0.5 * abs(math.log(max(ratio, 1.0 / ratio)))
    k = max(int(abs(x)) + 12, 20)
    while True:
        # Stirling bound: ln |J_k(x)| <= k ln(e |x| / 2k)
        log_term = k * (math.log(max(abs(x), 1e-300) * math.e / (2.0 * k)) + growth)
        if log_term < math.log(1e-18):
            return k
        k += 8


def evolve_amplitudes(
    p: LatticeParams,
    d: DriveField,
    psi0: InitialState,
    t: float,
) -> dict[int, complex]:
    """Exact amplitudes C_m(t) for a finite-support initial state on the
    infinite lattice; output truncated where the Bessel tail is negligible."""
    if p.hop_left * p.hop_right <= 0.0:
        raise UnsupportedConfigurationError(
            "closed-form propagation requires J_L J_R > 0"
        )
    if t == 0.0:
        return dict(psi0.amplitudes)
    ratio = p.hop_right / p.hop_left
    kappa = 2.0 * math.sqrt(p.hop_left * p.hop_right)
    rho, psi = _polar_path(d, t)
    x = kappa * rho
    eta_t = float(eta(d, t))
    cutoff = _order_cutoff(x, ratio)
    lo = min(psi0.amplitudes) - cutoff
    hi = max(psi0.amplitudes) + cutoff
    sites = np.arange(lo, hi + 1)
    quarter_turns = np.array([1.0, -1.0j, -1.0, 1.0j])  # (-i)^k, exact
    out = np.zeros(sites.size, dtype=complex)
    for n, c0 in psi0.amplitudes.items():
        k = sites - n
        phases = quarter_turns[k % 4] * np.exp(-1j * k * (eta_t - psi))
        out += (
            c0
            * np.exp(-1j * eta_t * n)
            * phases
            * ratio ** (k / 2.0)
            * bessel_j_orders(k, x)
        )
    keep = np.abs(out) > 0.0
    return {int(m): complex(a) for m, a in zip(sites[keep], out[keep])}


def rho_single_site(
    p: LatticeParams,
    d: DriveField,
    n0: int,
    t: float,
    *,
    sites: np.ndarray | None = None,
    asymptotic: bool = False,
) -> dict[int, float]:
    """Occupation rho_m(t) for the single-site start |n0>.

    The exact branch evaluates the u, v functionals; ``asymptotic=True``
    selects the long-time form  J_{m-n0}^2( 2 t sqrt(J_L J_R) J_nu(E1/w) )
    with nu = E0/w, valid only for t >> T and integer nu (nu = 0 covers the
    pure ac drive).
    """
    if p.hop_left * p.hop_right == 0.0:
        raise UnsupportedConfigurationError("occupations require J_L * J_R != 0")
    ratio = p.hop_right / p.hop_left
    kappa = 2.0 * math.sqrt(abs(p.hop_left * p.hop_right))
    if asymptotic:
        if d.ac == 0.0:
            raise DomainError(
                "no asymptotic form without an ac component; the dc motion "
                "is exactly periodic and the zero-field law is already exact"
            )
        nu = _resonance_order(d)
        if nu is None:
            raise DomainError(
                "no asymptotic form for non-integer E0/omega: every term of "
                "u and v is bounded and the motion stays localized"
            )
        x = kappa * t * float(bessel_j_orders(np.array([nu]), d.ac / d.omega)[0])
    else:
        u, v = uv(d, t)
        x = kappa * math.hypot(u, v)
    if sites is None:
        cutoff = _order_cutoff(x, abs(ratio))
        sites = np.arange(n0 - cutoff, n0 + cutoff + 1)
    sites = np.asarray(sites, dtype=int)
    k = sites - n0
    vals = bessel_j_orders(k, x) ** 2 * ratio ** k.astype(float)
    return {int(m): float(r) for m, r in zip(sites, vals)}


def rho_ratio_longtime(p: LatticeParams) -> float:
    """Stationary neighbor ratio rho_m / rho_{m-1} = J_R / J_L behind the
    wavefront of the undriven chain."""
    if p.hop_left <= 0.0 or p.hop_right <= 0.0:
        raise DomainError("hoppings must be positive")
    return p.hop_right / p.hop_left


def time_averaged_ratio(
    p: LatticeParams,
    m: int,
    *,
    n0: int = 0,
    window: tuple[float, float] = (50.0, 500.0),
    samples_per_unit: float = 40.0,
) -> float:
    """Companion check: time-averaged rho_m / rho_{m-1} over a late window,
    computed by direct quadrature of the zero-field occupations."""
    if p.hop_left <= 0.0 or p.hop_right <= 0.0:
        raise DomainError("hoppings must be positive")
    t0, t1 = window
    n = int((t1 - t0) * samples_per_unit)
    t = np.linspace(t0, t1, n)
    arg = 2.0 * math.sqrt(p.hop_left * p.hop_right) * t
    k = m - n0
    top = np.trapz(special.jv(abs(k), arg) ** 2, t)
    bot = np.trapz(special.jv(abs(k - 1), arg) ** 2, t)
    return (p.hop_right / p.hop_left) * float(top / bot)


def upper_bound_rho(
    p: LatticeParams,
    d: DriveField,
    n0: int,
    m: int,
    t: float,
) -> float:
    """Super-exponential dc bound rho_m(t) <= J_k^2(k) f_chi^{2k}(x_t) with
    k = m - n0, f_chi(x) = x e^{1 - chi x}, chi = sqrt(J_L/J_R) and
    x_t = (4 J_R / (k |E0|)) |sin(E0 t / 2)|; valid when
    4 sqrt(J_L J_R) <= k |E0|."""
    if not d.is_static or d.dc == 0.0:
        raise DomainError("bound is defined for a pure dc drive")
    if p.hop_left <= 0.0 or p.hop_right <= 0.0:
        raise DomainError("hoppings must be positive")
    k = m - n0
    if k <= 0:
        raise DomainError("bound applies to sites right of the start, m > n0")
    if 4.0 * math.sqrt(p.hop_left * p.hop_right) > k * abs(d.dc):
        raise DomainError(
            "validity condition 4 sqrt(J_L J_R) <= (m - n0) |E0| violated"
        )
    chi = math.sqrt(p.hop_left / p.hop_right)
    x_t = (4.0 * p.hop_right / (k * abs(d.dc))) * abs(math.sin(0.5 * d.dc * t))
    f = x_t * math.exp(1.0 - chi * x_t)
    j_kk = float(bessel_j_orders(np.array([k]), float(k))[0])
    return j_kk**2 * f ** (2 * k)
