"""Bridge-network assembly and the port-basis transforms.

The device ties four matched transmission-line ports to two orthogonal
resonator modes through four Wheatstone-style bridges of tunable
inductors.  Everything in this module works with inverse inductances
(reluctances) so that branch currents are linear in branch fluxes,
I = M(t) phi.  The variable order is fixed everywhere as

    [q, p, 1, 2, 3, 4]

with the two resonator modes first and the four ports after.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BasisMismatchError,
    DegenerateInductanceError,
    ValidationError,
)


class Basis(enum.Enum):
    """Tag identifying which variable set a vector's entries belong to."""

    PORTS1234 = "ports1234"
    EVEN_ODD = "evenOdd"
    QP = "qp"
    CIRCULAR_ROTATING = "circularRotating"


@dataclass(frozen=True)
class CircuitParams:
    """Lumped-element design values plus the rates derived from them.

    l: bridge arm inductance at rest (henry)
    c: resonator capacitance per mode (farad)
    r: port characteristic impedance (ohm)
    epsilon: dimensionless modulation depth, 0 <= epsilon <= 1
    omega_mod: modulation angular frequency (rad/s)
    """

    l: float
    c: float
    r: float
    epsilon: float
    omega_mod: float

    def __post_init__(self):
        if self.l <= 0.0 or self.c <= 0.0 or self.r <= 0.0:
            raise ValidationError("l, c, r must all be positive")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError("epsilon must lie in [0, 1]")
        if self.omega_mod < 0.0:
            raise ValidationError("omega_mod must be non-negative")

    @property
    def omega0(self) -> float:
        """Resonant mode center frequency (rad/s)."""
        return float(np.sqrt((4.0 - self.epsilon**2) / (2.0 * self.l * self.c)))

    @property
    def kappa(self) -> float:
        """Energy decay rate of each mode into the terminated ports (rad/s)."""
        return self.epsilon**2 / (8.0 * self.c * self.r)

    @property
    def omega_crit(self) -> float:
        """Modulation rate at which the synthesized gyration resistance equals r."""
        return self.epsilon**2 / (16.0 * self.c * self.r)


@dataclass(frozen=True)
class BridgeArms:
    """One bridge's arm reluctances, stored as mean and half-difference.

    y_mean = (y_plus + y_minus) / 2 and y_delta = (y_plus - y_minus) / 2,
    both in 1/henry.  |y_delta| may touch y_mean (one arm momentarily at
    full modulation depth) but may not exceed it: that would mean an arm
    with negative inductance.
    """

    y_mean: float
    y_delta: float

    def __post_init__(self):
        if not np.isfinite(self.y_mean) or not np.isfinite(self.y_delta):
            raise ValidationError("arm reluctances must be finite")
        if self.y_mean <= 0.0:
            raise DegenerateInductanceError("mean arm reluctance must be positive")
        if abs(self.y_delta) > self.y_mean:
            raise DegenerateInductanceError(
                "arm imbalance exceeds the mean: negative arm inductance"
            )


ArmSchedule = Callable[[float], BridgeArms]


@dataclass(frozen=True)
class PortVector:
    """Complex amplitude vector carrying the basis tag its entries live in."""

    values: np.ndarray
    basis: Basis

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if v.ndim != 1 or v.size not in (2, 4):
            raise ValidationError("port vectors are one-dimensional with 2 or 4 entries")
        object.__setattr__(self, "values", v)

    def require(self, basis: Basis) -> None:
        if self.basis is not basis:
            raise BasisMismatchError(
                f"expected basis {basis.value}, got {self.basis.value}"
            )


@dataclass(frozen=True)
class ReluctanceMatrix:
    """Real symmetric 6x6 inverse-inductance matrix in the fixed order."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (6, 6):
            raise ValidationError("reluctance matrix must be 6x6")
        scale = max(1.0, float(np.max(np.abs(m))))
        if float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
            raise ValidationError("reluctance matrix must be symmetric")
        object.__setattr__(self, "entries", m)


def bridge_two_port_reluctance(arms: BridgeArms) -> np.ndarray:
    """Two-port constitutive matrix of one bridge: [[y_mean, y_delta], [y_delta, y_mean]].

    Row/column 1 is the mode-side branch, row/column 2 the line-side
    branch; the off-diagonal sign convention follows the arm labeled
    plus sitting on the direct diagonal of the bridge.
    """
    return np.array(
        [[arms.y_mean, arms.y_delta], [arms.y_delta, arms.y_mean]], dtype=float
    )


# Bridge-to-line wiring is fixed by the device topology:
# bridge 0 couples mode q to the line pair (1, 3),
# bridge 1 couples mode q to (2, 4),
# bridge 2 couples mode p to (1, 3),
# bridge 3 couples mode p to (2, 4).
_BRIDGE_MODE = (0, 0, 1, 1)        # row index of the mode, in [q, p]
_BRIDGE_LINES = ((2, 4), (3, 5), (2, 4), (3, 5))  # matrix rows of the line pair


def assemble_reluctance(
    t: float,
    schedules: Sequence[ArmSchedule],
    l: float,
) -> ReluctanceMatrix:
    """Six-variable reluctance matrix of the full network at time t.

    Each bridge stamps its mean reluctance onto its mode diagonal and
    onto both of its line diagonals, minus the mean onto the line-pair
    off-diagonal, and couples the mode to the line pair with +delta on
    the lower-numbered line and -delta on the other.  On top of the
    stamps sits a rank-one ring term (1/l) * v v^T with v = (1,-1,1,-1)
    on the port block, which closes the loop the four lines share.  The
    ring term is a reconstruction: the source material fixes the
    constitutive matrix, not the internal wiring, and the stamp + ring
    decomposition reproduces it exactly (see the module tests).

    l sets the ring reluctance scale and is the resting arm inductance.
    """
    if len(schedules) != 4:
        raise ValidationError("exactly four bridge schedules are required")
    if l <= 0.0:
        raise ValidationError("ring inductance l must be positive")

    m = np.zeros((6, 6))
    for k in range(4):
        arms = schedules[k](t)
        if arms.y_mean <= 0.0:
            raise DegenerateInductanceError(f"bridge {k} mean reluctance non-positive")
        mode = _BRIDGE_MODE[k]
        lo, hi = _BRIDGE_LINES[k]
        m[mode, mode] += arms.y_mean
        m[lo, lo] += arms.y_mean
        m[hi, hi] += arms.y_mean
        m[lo, hi] -= arms.y_mean
        m[hi, lo] -= arms.y_mean
        m[mode, lo] += arms.y_delta
        m[lo, mode] += arms.y_delta
        m[mode, hi] -= arms.y_delta
        m[hi, mode] -= arms.y_delta

    ring = np.array([1.0, -1.0, 1.0, -1.0])
    m[2:, 2:] += np.outer(ring, ring) / l
    return ReluctanceMatrix(m)


# Orthogonal port transform: rows are (left-even, right-even, left-odd,
# right-odd) combinations of ports (1,3) and (2,4).
EVEN_ODD_MATRIX = np.array(
    [
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [1.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, -1.0],
    ]
) / np.sqrt(2.0)


def even_odd_transform(v: PortVector) -> PortVector:
    """Map a ports-1234 vector to (left-even, right-even, left-odd, right-odd)."""
    v.require(Basis.PORTS1234)
    return PortVector(EVEN_ODD_MATRIX @ v.values, Basis.EVEN_ODD)


def even_odd_inverse(v: PortVector) -> PortVector:
    """Inverse of even_odd_transform (the matrix is orthogonal)."""
    v.require(Basis.EVEN_ODD)
    return PortVector(EVEN_ODD_MATRIX.T @ v.values, Basis.PORTS1234)


def rotating_matrix(t: float, omega_mod: float) -> np.ndarray:
    """Unitary mapping (q, p) mode pairs to co/counter-rotating circular amplitudes."""
    ph = np.exp(1j * omega_mod * t)
    return np.array([[ph, -1j * ph], [np.conj(ph), 1j * np.conj(ph)]]) / np.sqrt(2.0)


def rotating_circular_transform(t: float, omega_mod: float, v: PortVector) -> PortVector:
    """Map a (q, p) vector into the frame co-rotating with the modulation."""
    v.require(Basis.QP)
    return PortVector(rotating_matrix(t, omega_mod) @ v.values, Basis.CIRCULAR_ROTATING)


def rotating_circular_inverse(t: float, omega_mod: float, v: PortVector) -> PortVector:
    """Inverse of rotating_circular_transform at the same instant."""
    v.require(Basis.CIRCULAR_ROTATING)
    w = rotating_matrix(t, omega_mod).conj().T
    return PortVector(w @ v.values, Basis.QP)


def full_transform(t: float, omega_mod: float) -> np.ndarray:
    """Unitary 6x6 change of variables to (rotating circular, even/odd) order.

    Output order is [plus, minus, left-even, right-even, left-odd,
    right-odd].  Conjugating the assembled reluctance matrix with this
    transform makes it time-independent for the ideal schedules.
    """
    out = np.zeros((6, 6), dtype=complex)
    out[:2, :2] = rotating_matrix(t, omega_mod)
    out[2:, 2:] = EVEN_ODD_MATRIX
    return out
