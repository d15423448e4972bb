"""Integer-order Bessel functions of the first kind, their zeros, and the
transport-range root x* of x e^{1 - sqrt(J_L/J_R) x} = 1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = ["bessel_j", "bessel_j_orders", "bessel_zero", "BesselZeroTable", "solve_x_star"]

_MAX_ORDER = 1024
_MAX_ARG = 1.0e6


def bessel_j(order: int, x: float) -> float:
    """J_n(x) for integer n; J_{-n}(x) = (-1)^n J_n(x) holds by construction."""
    n = int(order)
    if n != order:
        raise DomainError(f"order must be an integer, got {order!r}")
    if abs(n) > _MAX_ORDER:
        raise DomainError(f"|order| must be <= {_MAX_ORDER}, got {n}")
    x = float(x)
    if not math.isfinite(x) or abs(x) > _MAX_ARG:
        raise DomainError(f"|x| must be finite and <= {_MAX_ARG:g}, got {x!r}")
    val = float(special.jv(abs(n), x))
    if n < 0 and n % 2:
        val = -val
    return val


def bessel_j_orders(orders: np.ndarray, x: float) -> np.ndarray:
    """Vectorized J_n(x) over an integer order array, negative orders by symmetry."""
    orders = np.asarray(orders, dtype=int)
    vals = special.jv(np.abs(orders), x)
    signs = np.where((orders < 0) & (orders % 2 != 0), -1.0, 1.0)
    return vals * signs


def _scan_brackets(nu: int, count: int) -> list[tuple[float, float]]:
    # J_nu > 0 on (0, j_{nu,1}); consecutive zeros are > pi/2 apart, so a
    # pi/2 scan step cannot skip a sign change.
    step = math.pi / 2.0
    x = max(float(nu), 0.5)
    f_prev = special.jv(nu, x)
    while f_prev == 0.0:  # pathological grid point
        x += 1e-3
        f_prev = special.jv(nu, x)
    brackets: list[tuple[float, float]] = []
    while len(brackets) < count:
        x_next = x + step
        f_next = special.jv(nu, x_next)
        if f_next == 0.0:  # grid landed on a zero: nudge off it
            x_next += 1e-9
            f_next = special.jv(nu, x_next)
        if f_prev * f_next < 0.0:
            brackets.append((x, x_next))
        x, f_prev = x_next, f_next
    return brackets


def bessel_zero(nu: int, k: int) -> float:
    """k-th positive zero j_{nu,k}, bracketed by scanning and refined by
    bisection plus one Newton step."""
    nu = int(nu)
    k = int(k)
    if nu < 0 or nu > 64:
        raise DomainError(f"nu must be in 0..64, got {nu}")
    if k < 1 or k > 100:
        raise DomainError(f"k must be in 1..100, got {k}")
    lo, hi = _scan_brackets(nu, k)[k - 1]
    f_lo = special.jv(nu, lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        f_mid = special.jv(nu, mid)
        if f_mid == 0.0:
            return float(mid)
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo < 1e-14 * hi:
            break
    root = 0.5 * (lo + hi)
    # one Newton polish: J_nu' = (J_{nu-1} - J_{nu+1}) / 2
    deriv = 0.5 * (special.jv(nu - 1, root) - special.jv(nu + 1, root))
    if deriv != 0.0:
        root -= special.jv(nu, root) / deriv
    return float(root)


@dataclass(frozen=True)
class BesselZeroTable:
    """Ascending positive zeros j_{nu,k}, k = 1..len(zeros)."""

    order: int
    zeros: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.order < 0:
            raise DomainError("order must be non-negative")
        if any(b <= a for a, b in zip(self.zeros, self.zeros[1:])):
            raise ValueError("zeros must be strictly increasing")

    @classmethod
    def build(cls, order: int, count: int) -> "BesselZeroTable":
        return cls(order, tuple(bessel_zero(order, k) for k in range(1, count + 1)))


def solve_x_star(hop_left: float, hop_right: float) -> float:
    """Root x* in (0, 1) of f(x) = x e^{1 - chi x} = 1 with chi = sqrt(J_L/J_R).

    Requires 0 < J_L < J_R (chi < 1), which makes f(0) = 0 < 1 < f(1);
    bisection on (0, 1) then converges monotonically.
    """
    if not (0.0 < hop_left < hop_right):
        raise DomainError(
            f"need 0 < hop_left < hop_right, got ({hop_left}, {hop_right})"
        )
    chi = math.sqrt(hop_left / hop_right)

    def f(x: float) -> float:
        return x * math.exp(1.0 - chi * x) - 1.0

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 5e-17:
            break
    root = 0.5 * (lo + hi)
    if abs(root * math.exp(1.0 - chi * root) - 1.0) >= 1e-12:
        raise DomainError("x* residual did not converge below 1e-12")
    return root
