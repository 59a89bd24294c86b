"""Exact lumped-element scattering of the modulated bridge network.

The network is solved in the frame where the modulation is stationary:
circular resonator amplitudes rotating at the modulation frequency and
even/odd port combinations.  In that frame the drive at angular
frequency omega sees a constant linear system, so scattering follows
from direct linear solves with no harmonic balance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearResonanceError, ValidationError
from .network import Basis, CircuitParams, EVEN_ODD_MATRIX

# Condition number beyond which a port-termination solve is not trusted.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class ScatteringMatrix:
    """Complex n-port scattering matrix at one frequency."""

    s: np.ndarray
    freq: float
    basis: Basis

    def __post_init__(self):
        m = np.asarray(self.s, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 3, 4):
            raise ValidationError("scattering matrix must be square, 2 to 4 ports")
        object.__setattr__(self, "s", m)

    def unitarity_defect(self) -> float:
        """Max abs entry of S^dag S - 1; ~0 for a lossless network."""
        n = self.s.shape[0]
        return float(np.max(np.abs(self.s.conj().T @ self.s - np.eye(n))))


def odd_sector_matrix(omega: float, params: CircuitParams) -> np.ndarray:
    """Constitutive matrix of the odd sector at drive frequency omega.

    Variable order (plus, minus, left-odd, right-odd): two circular
    resonator amplitudes, whose internal frequencies are shifted by
    -/+ the modulation rate, and the two odd port-line combinations.
    Entries carry 1/l units; multiply flux amplitudes to get currents.
    """
    l, c = params.l, params.c
    eps, om = params.epsilon, params.omega_mod
    g = np.array(
        [
            [2.0 - l * c * (omega - om) ** 2, 0.0, eps, 1j * eps],
            [0.0, 2.0 - l * c * (omega + om) ** 2, eps, -1j * eps],
            [eps, eps, 4.0, 0.0],
            [-1j * eps, 1j * eps, 0.0, 4.0],
        ],
        dtype=complex,
    )
    return g / l


def even_sector_matrix(params: CircuitParams) -> np.ndarray:
    """Constitutive matrix of the even sector (the ring term alone)."""
    return (2.0 / params.l) * np.array([[1.0, -1.0], [-1.0, 1.0]], dtype=complex)


def admittance_to_scattering(
    y: np.ndarray, r: float, freq: float = 0.0
) -> ScatteringMatrix:
    """Scattering of an n-port admittance on matched r lines: (1+rY)^-1 (1-rY)."""
    y = np.asarray(y, dtype=complex)
    n = y.shape[0]
    a = np.eye(n) + r * y
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NearResonanceError(
            f"(1 + rY) too ill-conditioned to invert: cond = {cond:.3e}"
        )
    s = np.linalg.solve(a, np.eye(n) - r * y)
    return ScatteringMatrix(s, freq, Basis.PORTS1234)


def _terminated_scattering(
    constitutive: np.ndarray, n_ports: int, omega: float, r: float
) -> tuple[np.ndarray, float]:
    """Scattering of a sector whose last n_ports variables are r-terminated lines.

    Solves the bordered system (G + j omega / r on port rows) phi =
    (2/r) V_in and reads the outgoing wave V_out = j omega phi - V_in.
    Algebraically identical to eliminating the internal variables and
    converting the resulting admittance, but with no intermediate
    inverse, so it stays well-behaved on internal resonances.
    """
    g = np.array(constitutive, dtype=complex)
    n = g.shape[0]
    n_int = n - n_ports
    if n_int > 0:
        coupling = max(
            float(np.max(np.abs(g[:n_int, n_int:]))),
            float(np.max(np.abs(g[n_int:, :n_int]))),
        )
        if coupling == 0.0:
            # internal variables neither drive nor load the ports, so their
            # own resonances are invisible; keep them out of the solve
            g = g[n_int:, n_int:]
            n = n_ports
    a = g.copy()
    idx = np.arange(n - n_ports, n)
    a[idx, idx] += 1j * omega / r
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NearResonanceError(
            f"terminated sector solve ill-conditioned: cond = {cond:.3e}"
        )
    rhs = np.zeros((n, n_ports), dtype=complex)
    rhs[idx, np.arange(n_ports)] = 2.0 / r
    phi = np.linalg.solve(a, rhs)
    s = 1j * omega * phi[idx, :] - np.eye(n_ports)
    return s, cond


def exact_scattering(omega: float, params: CircuitParams) -> ScatteringMatrix:
    """Full four-port scattering matrix of the modulated network at omega.

    The even and odd sectors are solved independently (they do not
    couple) and recombined through the orthogonal port transform.  No
    slow-envelope approximation is involved; this is the reference
    model the other tiers are checked against.
    """
    if omega <= 0.0:
        raise ValidationError("drive frequency must be positive")
    s_odd, _ = _terminated_scattering(
        odd_sector_matrix(omega, params), 2, omega, params.r
    )
    s_even, _ = _terminated_scattering(even_sector_matrix(params), 2, omega, params.r)
    s_eo = np.zeros((4, 4), dtype=complex)
    s_eo[:2, :2] = s_even
    s_eo[2:, 2:] = s_odd
    s = EVEN_ODD_MATRIX.T @ s_eo @ EVEN_ODD_MATRIX
    return ScatteringMatrix(s, omega, Basis.PORTS1234)


def gyrator_approx(params: CircuitParams) -> np.ndarray:
    """First-order antisymmetric admittance seen by the odd port pair on resonance.

    Valid for modulation much slower than the resonance; the gyration
    resistance is epsilon^2 / (16 c omega_mod), equal to the port
    impedance when the modulation runs at the matched rate.
    """
    if params.omega_mod <= 0.0:
        raise ValidationError("gyrator approximation needs a non-zero modulation rate")
    r_g = params.epsilon**2 / (16.0 * params.c * params.omega_mod)
    return (1.0 / r_g) * np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)


@dataclass
class SweepTable:
    """Exact scattering sampled on a uniform frequency grid."""

    freq_hz: np.ndarray
    s: np.ndarray               # (n, 4, 4) complex
    condition: np.ndarray       # worst sector condition number per point
    unitarity_defect: np.ndarray
    flagged: np.ndarray         # True where the solve failed or was distrusted

    def element(self, i: int, j: int) -> np.ndarray:
        """Column S_ij over the sweep; i, j are 1-based port numbers."""
        return self.s[:, i - 1, j - 1]


def sweep_at(freqs_hz: np.ndarray, params: CircuitParams) -> SweepTable:
    """exact_scattering on an explicit frequency grid (Hz).

    Failed points are flagged and left as NaN rather than aborting the
    whole table, so off-grid poles only blank single rows.
    """
    freqs = np.asarray(freqs_hz, dtype=float)
    if freqs.ndim != 1 or freqs.size < 1:
        raise ValidationError("sweep needs a 1-d grid with at least one point")
    n = freqs.size
    s = np.full((n, 4, 4), np.nan, dtype=complex)
    condition = np.full(n, np.nan)
    defect = np.full(n, np.nan)
    flagged = np.zeros(n, dtype=bool)
    for i, f in enumerate(freqs):
        omega = 2.0 * np.pi * f
        try:
            so, c_odd = _terminated_scattering(
                odd_sector_matrix(omega, params), 2, omega, params.r
            )
            se, c_even = _terminated_scattering(
                even_sector_matrix(params), 2, omega, params.r
            )
        except NearResonanceError:
            flagged[i] = True
            continue
        s_eo = np.zeros((4, 4), dtype=complex)
        s_eo[:2, :2] = se
        s_eo[2:, 2:] = so
        s[i] = EVEN_ODD_MATRIX.T @ s_eo @ EVEN_ODD_MATRIX
        condition[i] = max(c_odd, c_even)
        defect[i] = float(np.max(np.abs(s[i].conj().T @ s[i] - np.eye(4))))
    return SweepTable(freqs, s, condition, defect, flagged)


def sweep(f_lo: float, f_hi: float, n: int, params: CircuitParams) -> SweepTable:
    """exact_scattering on a uniform n-point grid from f_lo to f_hi (Hz)."""
    if n < 1:
        raise ValidationError("sweep needs at least one point")
    if n == 1:
        freqs = np.array([f_lo])
    else:
        if not f_hi > f_lo:
            raise ValidationError("sweep needs f_hi > f_lo")
        freqs = np.linspace(f_lo, f_hi, n)
    return sweep_at(freqs, params)


# Merging ports 3 and 4 keeps their even combination as the new third
# port; the odd combination is projected out.  Edges that involve the
# merged port therefore carry a 1/sqrt(2) projection factor relative to
# naive index merging.
THREE_PORT_PROJECTION = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)],
    ]
)


def three_port_reduction(s4: ScatteringMatrix) -> ScatteringMatrix:
    """Reduce the four-port matrix to three ports by merging ports 3 and 4."""
    if s4.s.shape != (4, 4):
        raise ValidationError("three_port_reduction expects a 4x4 matrix")
    w = THREE_PORT_PROJECTION
    return ScatteringMatrix(w @ s4.s @ w.T, s4.freq, s4.basis)
