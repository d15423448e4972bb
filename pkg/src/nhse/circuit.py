"""LC-ladder realization of the dc-driven non-reciprocal chain.

Each node n = 1..L carries a grounded branch (inductor l_n in series with
the node, shunted by capacitor C_n) and connects to its neighbors through
series inductors L_n.  Grading the components as

    L_n = L0 g^{-n},    C_n = C0 g^n,    l_n = L_n / (Delta - a n E0)

turns Kirchhoff's current law into

    d^2 V_n / dt^2 = w0^2 [ g V_{n+1} + V_{n-1} - (1 + g + Delta - a n E0) V_n ],

so a harmonic ansatz V_n e^{+-i w t} with w = w0 sqrt((1 + g + Delta) - E_R)
solves the non-reciprocal hopping problem with J_L = 1, J_R = g and dc
field E0.  Both end nodes terminate through a series inductor to ground
(nodes 0 and L+1 held at zero volts), which reproduces the open-boundary
matrix exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sp_linalg

from .errors import StepSizeError, SynthesisError
from .lattice import DriveField, LatticeParams, OPEN, build_hamiltonian
from .spectral import SpectralResult, _eig_sorted

__all__ = [
    "CircuitNetlist",
    "synthesize",
    "circuit_eigenproblem",
    "transient_check",
    "export_netlist",
    "parse_netlist",
]

_HEADER_PREFIX = "NHSE-LC v1"


@dataclass(frozen=True)
class CircuitNetlist:
    """Component values of the graded LC ladder, derived from the header
    parameters; ``comments`` preserves leading '#' lines through round-trips."""

    n_nodes: int
    gain: float
    e0: float
    delta: float
    l_base: float
    c_base: float
    spacing: float = 1.0
    comments: tuple[str, ...] = field(default=())

    @property
    def omega0(self) -> float:
        return 1.0 / math.sqrt(self.c_base * self.l_base)

    def series_inductance(self, n: int) -> float:
        """L_n between node n-1 and node n, defined for n = 1..L+1."""
        return self.l_base * self.gain ** (-n)

    def ground_inductance(self, n: int) -> float:
        return self.series_inductance(n) / (self.delta - self.spacing * n * self.e0)

    def ground_capacitance(self, n: int) -> float:
        return self.c_base * self.gain**n


def synthesize(
    n_nodes: int,
    gain: float,
    e0: float,
    delta: float,
    *,
    l_base: float = 1.0,
    c_base: float = 1.0,
    spacing: float = 1.0,
) -> CircuitNetlist:
    """Build the netlist, checking every grounded inductor comes out positive."""
    if n_nodes < 2:
        raise SynthesisError("need at least two nodes")
    if gain <= 0 or l_base <= 0 or c_base <= 0:
        raise SynthesisError("gain, l_base and c_base must be positive")
    for n in range(1, n_nodes + 1):
        if delta - spacing * n * e0 <= 0:
            raise SynthesisError(
                f"Delta - a n E0 = {delta - spacing * n * e0:g} <= 0 first at "
                f"node n = {n}; increase Delta above a L |E0|"
            )
    return CircuitNetlist(n_nodes, gain, e0, delta, l_base, c_base, spacing)


def circuit_eigenproblem(net: CircuitNetlist) -> SpectralResult:
    """Eigenpairs of the ladder's hopping problem and the mapped resonance
    frequencies w_R = w0 sqrt((1 + g + Delta) - E_R).

    The matrix is exactly the lattice Hamiltonian with J_L = 1, J_R = gain
    and dc field e0; frequencies are reported for real eigenvalues with a
    non-negative radicand and NaN otherwise.
    """
    p = LatticeParams(net.n_nodes, 1.0, net.gain, net.spacing)
    h = build_hamiltonian(p, DriveField(dc=net.e0), 0.0, OPEN)
    evals, evecs = _eig_sorted(h)
    shift = 1.0 + net.gain + net.delta
    scale = np.max(np.abs(evals))
    freqs = np.full(evals.shape, np.nan)
    for i, ev in enumerate(evals):
        if abs(ev.imag) > 1e-9 * max(scale, 1.0):
            continue
        radicand = shift - ev.real
        if radicand >= 0.0:
            freqs[i] = net.omega0 * math.sqrt(radicand)
    from .spectral import skin_mode_count

    result = SpectralResult(
        eigenvalues=evals,
        right_eigenvectors=evecs,
        e_ref=complex(np.mean(evals)),
        winding=None,
        skin_count=0,
        lattice=p,
        e0=net.e0,
        frequencies=freqs,
    )
    result.skin_count = skin_mode_count(result)
    return result


def _dynamics_matrix(net: CircuitNetlist) -> np.ndarray:
    """Kirchhoff acceleration matrix A with V'' = A V, assembled from the
    component values (grounded end terminations)."""
    ell = net.n_nodes
    a = np.zeros((ell, ell))
    for n in range(1, ell + 1):
        c_n = net.ground_capacitance(n)
        left = 1.0 / (c_n * net.series_inductance(n))
        right = 1.0 / (c_n * net.series_inductance(n + 1))
        ground = 1.0 / (c_n * net.ground_inductance(n))
        i = n - 1
        a[i, i] = -(left + right + ground)
        if i > 0:
            a[i, i - 1] = left
        if i + 1 < ell:
            a[i, i + 1] = right
    return a


def _peak_frequency(signal: np.ndarray, dt: float) -> float:
    """Dominant angular frequency by windowed FFT with parabolic peak
    interpolation."""
    n = signal.size
    windowed = (signal - signal.mean()) * np.hanning(n)
    spectrum = np.abs(np.fft.rfft(windowed))
    k = int(np.argmax(spectrum[1:])) + 1
    if 1 <= k < spectrum.size - 1:
        s0, s1, s2 = spectrum[k - 1 : k + 2]
        denom = s0 - 2 * s1 + s2
        if denom != 0:
            k = k + 0.5 * (s0 - s2) / denom
    return 2.0 * math.pi * k / (n * dt)


def transient_check(
    net: CircuitNetlist,
    v0: np.ndarray,
    t_end: float,
    dt: float,
    *,
    min_projection: float = 1e-8,
) -> dict[int, float]:
    """Integrate the voltage dynamics from V(0) = v0 at rest and estimate the
    oscillation frequency of each excited mode.

    Returns {mode index into circuit_eigenproblem order: estimated omega}.
    The integration runs RK4 on the first-order system [V, V'] built from
    the literal component values, so it checks the frequency mapping
    independently of the eigenproblem construction.
    """
    v0 = np.asarray(v0, dtype=float)
    if v0.shape != (net.n_nodes,):
        raise ValueError(f"v0 must have shape ({net.n_nodes},)")
    a = _dynamics_matrix(net)
    omega_max = math.sqrt(np.max(np.abs(np.linalg.eigvals(a))))
    if dt * omega_max > 2.5:
        raise StepSizeError(
            f"dt = {dt:g} unstable: need dt < {2.5 / omega_max:.3g} for the "
            "fastest circuit mode"
        )
    if not np.any(v0):
        return {}
    n_steps = max(int(math.ceil(t_end / dt)), 1)
    dt = t_end / n_steps
    # modes of the acceleration matrix, aligned with circuit_eigenproblem order
    evals_a, vl, vr = sp_linalg.eig(a, left=True)
    e_equiv = evals_a / net.omega0**2 + (1.0 + net.gain + net.delta)
    order = np.lexsort((e_equiv.imag, e_equiv.real))
    vl = vl[:, order]
    vr = vr[:, order]
    biorth = np.einsum("ij,ij->j", vl.conj(), vr)
    v = v0.copy()
    w = np.zeros_like(v0)
    samples = np.empty((n_steps + 1, net.n_nodes))
    samples[0] = v
    for step in range(n_steps):
        k1v, k1w = w, a @ v
        k2v, k2w = w + 0.5 * dt * k1w, a @ (v + 0.5 * dt * k1v)
        k3v, k3w = w + 0.5 * dt * k2w, a @ (v + 0.5 * dt * k2v)
        k4v, k4w = w + dt * k3w, a @ (v + dt * k3v)
        v = v + (dt / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        w = w + (dt / 6.0) * (k1w + 2 * k2w + 2 * k3w + k4w)
        samples[step + 1] = v
    coeffs = (samples @ vl.conj()) / biorth[None, :]  # mode amplitudes over time
    estimates: dict[int, float] = {}
    scale = np.max(np.abs(coeffs))
    for j in range(net.n_nodes):
        signal = coeffs[:, j].real
        if np.max(np.abs(signal)) < min_projection * scale:
            continue
        estimates[j] = _peak_frequency(signal, dt)
    return estimates


def export_netlist(net: CircuitNetlist, path) -> None:
    """Write the plain-text netlist; reals in shortest round-trip form.

    Layout: optional leading '#' comment lines, one header line, then one
    ``NODE`` line per node.  ``parse_netlist`` inverts this bit-exactly.
    """
    lines = list(net.comments)
    lines.append(
        f"{_HEADER_PREFIX} L={net.n_nodes} g={net.gain!r} E0={net.e0!r} "
        f"Delta={net.delta!r} L0={net.l_base!r} C0={net.c_base!r} a={net.spacing!r}"
    )
    for n in range(1, net.n_nodes + 1):
        lines.append(
            f"NODE {n} Lser={net.series_inductance(n)!r} "
            f"lgnd={net.ground_inductance(n)!r} Cgnd={net.ground_capacitance(n)!r}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_kv(token: str, key: str) -> str:
    prefix = key + "="
    if not token.startswith(prefix):
        raise ValueError(f"expected '{prefix}...', got {token!r}")
    return token[len(prefix) :]


def parse_netlist(path) -> CircuitNetlist:
    """Read a netlist file back; validates the node lines against the header
    parameters so export(parse(file)) is byte-identical to the input."""
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    comments = []
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        comments.append(lines[i])
        i += 1
    if i >= len(lines) or not lines[i].startswith(_HEADER_PREFIX):
        raise ValueError(f"missing '{_HEADER_PREFIX}' header line")
    tokens = lines[i].split()
    n_nodes = int(_parse_kv(tokens[2], "L"))
    net = CircuitNetlist(
        n_nodes=n_nodes,
        gain=float(_parse_kv(tokens[3], "g")),
        e0=float(_parse_kv(tokens[4], "E0")),
        delta=float(_parse_kv(tokens[5], "Delta")),
        l_base=float(_parse_kv(tokens[6], "L0")),
        c_base=float(_parse_kv(tokens[7], "C0")),
        spacing=float(_parse_kv(tokens[8], "a")),
        comments=tuple(comments),
    )
    node_lines = [line for line in lines[i + 1 :] if line.strip()]
    if len(node_lines) != n_nodes:
        raise ValueError(f"expected {n_nodes} NODE lines, found {len(node_lines)}")
    for line in node_lines:
        parts = line.split()
        if parts[0] != "NODE":
            raise ValueError(f"bad node line: {line!r}")
        n = int(parts[1])
        for key, expected in (
            ("Lser", net.series_inductance(n)),
            ("lgnd", net.ground_inductance(n)),
            ("Cgnd", net.ground_capacitance(n)),
        ):
            value = float(_parse_kv(parts[{"Lser": 2, "lgnd": 3, "Cgnd": 4}[key]], key))
            if value != expected:
                raise ValueError(
                    f"node {n}: {key} = {value!r} inconsistent with header "
                    f"(expected {expected!r})"
                )
    return net
