"""Input-output state-space models of the circulator.

These are the approximate envelope models: two resonant modes coupled
to traveling-wave amplitudes, with the bridge modulation appearing as a
mode-space rotation.  They trade the exactness of the lumped solver for
closed-form rates and bandwidths.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SingularModelError, ValidationError
from .network import EVEN_ODD_MATRIX

# Relative tolerance for the structural identities checked on lossless models.
LOSSLESS_TOL = 1e-12


@dataclass(frozen=True)
class IOModel:
    """State-space quadruple (A, B, C, D) plus the Hermitian generator Q.

    The envelope dynamics are x' = A x + B u with outgoing waves
    y = C x + D u.  For a lossless model the matrices are tied together:
    B = -C^dag D, A = -j Q - C^dag C / 2, D unitary, Q Hermitian; these
    are verified at construction when the lossless flag is set.
    """

    a: np.ndarray
    b: np.ndarray
    c_mat: np.ndarray
    d: np.ndarray
    q: Optional[np.ndarray] = None
    lossless: bool = False

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        c = np.asarray(self.c_mat, dtype=complex)
        d = np.asarray(self.d, dtype=complex)
        q = None if self.q is None else np.asarray(self.q, dtype=complex)
        n = a.shape[0]
        m = d.shape[0]
        if a.shape != (n, n) or b.shape != (n, m) or c.shape != (m, n) or d.shape != (m, m):
            raise ValidationError("inconsistent state-space dimensions")
        for name, val in (("a", a), ("b", b), ("c_mat", c), ("d", d)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "q", q)
        if self.lossless:
            if q is None:
                raise ValidationError("lossless models must carry the generator q")
            scale = 1.0 + float(
                np.max(np.abs(a)) + np.max(np.abs(q)) + np.max(np.abs(c)) ** 2
            )
            checks = {
                "b = -c^dag d": np.max(np.abs(b + c.conj().T @ d)),
                "a = -j q - c^dag c / 2": np.max(
                    np.abs(a + 1j * q + 0.5 * c.conj().T @ c)
                ),
                "d unitary": np.max(np.abs(d @ d.conj().T - np.eye(m))),
                "q hermitian": np.max(np.abs(q - q.conj().T)),
            }
            for label, defect in checks.items():
                if float(defect) > LOSSLESS_TOL * scale:
                    raise ValidationError(
                        f"lossless identity violated ({label}): defect {float(defect):.3e}"
                    )


@dataclass(frozen=True)
class EnvelopeScaling:
    """Bookkeeping between port voltages and envelope amplitudes.

    delta: drive detuning from the mode center (rad/s)
    omega0, c, r: the design values the normalization is built from
    """

    delta: float
    omega0: float
    c: float
    r: float

    @property
    def omega_d(self) -> float:
        return self.omega0 + self.delta

    @property
    def amplitude_scale(self) -> float:
        """Voltage-to-envelope normalization omega0 sqrt(c r)."""
        return self.omega0 * float(np.sqrt(self.c * self.r))


def design_rates(l: float, c: float, r: float, epsilon: float):
    """Center frequency, decay rate, and matched rotation rate of a design."""
    if l <= 0.0 or c <= 0.0 or r <= 0.0:
        raise ValidationError("l, c, r must all be positive")
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError("epsilon must lie in [0, 1]")
    omega0 = float(np.sqrt((4.0 - epsilon**2) / (2.0 * l * c)))
    kappa = epsilon**2 / (8.0 * c * r)
    omega_crit = epsilon**2 / (16.0 * c * r)
    return omega0, kappa, omega_crit


def build_rotating_io(kappa: float, delta: float, omega_mod: float):
    """Odd-sector model in the co-rotating circular frame, plus the even map.

    The two circular envelopes see opposite frequency shifts delta -/+
    omega_mod and couple to the odd port pair through fixed quadrature
    combinations.  The even port pair bypasses the resonator entirely;
    its scattering is the constant swap matrix returned alongside.
    """
    if kappa <= 0.0:
        raise ValidationError("kappa must be positive")
    g = np.sqrt(kappa / 2.0)
    a = np.array(
        [
            [-(1j * (delta - omega_mod) + kappa / 2.0), 0.0],
            [0.0, -(1j * (delta + omega_mod) + kappa / 2.0)],
        ],
        dtype=complex,
    )
    b = g * np.array([[1j, -1.0], [1j, 1.0]], dtype=complex)
    c_mat = g * np.array([[-1j, -1j], [-1.0, 1.0]], dtype=complex)
    d = -np.eye(2, dtype=complex)
    q = np.array(
        [[delta - omega_mod, 0.0], [0.0, delta + omega_mod]], dtype=complex
    )
    model = IOModel(a, b, c_mat, d, q=q, lossless=True)
    even_map = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    return model, even_map


def build_lab_io(kappa: float, omega_mod: float) -> IOModel:
    """Two-mode, four-port model with constant matrices in the lab frame.

    The modulation appears as the antisymmetric rotation block inside A;
    each mode couples to its own opposite port pair.  The prompt-path
    matrix D is the reciprocal splitter the frozen network presents.
    """
    if kappa <= 0.0:
        raise ValidationError("kappa must be positive")
    g = np.sqrt(kappa / 2.0)
    a = np.array(
        [[-kappa / 2.0, -omega_mod], [omega_mod, -kappa / 2.0]], dtype=complex
    )
    b = g * np.array([[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]], dtype=complex)
    c_mat = g * np.array(
        [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], dtype=complex
    )
    d = 0.5 * (np.ones((4, 4)) - 2.0 * np.eye(4)).astype(complex)
    q = np.array([[0.0, -1j * omega_mod], [1j * omega_mod, 0.0]], dtype=complex)
    return IOModel(a, b, c_mat, d, q=q, lossless=True)


def lab_to_rotating_frame(t: float, omega_mod: float) -> np.ndarray:
    """Real rotation mapping lab mode pairs onto the co-rotating pair."""
    cs, sn = np.cos(omega_mod * t), np.sin(omega_mod * t)
    return np.array([[cs, sn], [-sn, cs]])


def build_fullport_rotating_io(kappa: float, omega_mod: float, t: float) -> IOModel:
    """Four-port model in the rotating frame: time-varying couplings, diagonal A.

    Obtained from the lab model by the frame map of lab_to_rotating_frame;
    the rotation moves out of A and into B and C, whose column norms stay
    constant.  The generator Q vanishes in this frame.
    """
    if kappa <= 0.0:
        raise ValidationError("kappa must be positive")
    lab = build_lab_io(kappa, omega_mod)
    rot = lab_to_rotating_frame(t, omega_mod)
    a = -0.5 * kappa * np.eye(2, dtype=complex)
    b = rot @ lab.b
    c_mat = lab.c_mat @ rot.T
    q = np.zeros((2, 2), dtype=complex)
    return IOModel(a, b, c_mat, lab.d, q=q, lossless=True)


def io_steady_scattering(model: IOModel) -> np.ndarray:
    """Steady-state scattering D - C A^-1 B of a constant-coefficient model."""
    a = model.a
    if not np.all(np.isfinite(a)):
        raise SingularModelError("model dynamics matrix has non-finite entries")
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularModelError(
            f"dynamics matrix singular at this operating point: cond = {cond:.3e}"
        )
    return model.d - model.c_mat @ np.linalg.solve(a, model.b)


def io_scattering_via_q(model: IOModel) -> np.ndarray:
    """Steady-state scattering in the admittance-like lossless form.

    For a lossless model with invertible generator Q the steady response
    factors as (1 + Y)^-1 (1 - Y) D with Y = -(j/2) C Q^-1 C^dag; this
    follows from eliminating A with the structural identities and is an
    independent cross-check of io_steady_scattering.  A singular Q (for
    example zero detuning and zero rotation) has no such factorization;
    this falls back to the direct formula with a warning.
    """
    if not model.lossless or model.q is None:
        raise ValidationError("the admittance form needs a lossless model with q")
    q = model.q
    svals = np.linalg.svd(q, compute_uv=False)
    if svals[-1] <= 1e-12 * max(1.0, float(svals[0])):
        warnings.warn(
            "generator Q is singular at this operating point; "
            "falling back to the direct steady-state formula",
            stacklevel=2,
        )
        return io_steady_scattering(model)
    y = -0.5j * (model.c_mat @ np.linalg.solve(q, model.c_mat.conj().T))
    m = y.shape[0]
    return np.linalg.solve(np.eye(m) + y, np.eye(m) - y) @ model.d


def io_fullport_scattering(kappa: float, delta: float, omega_mod: float) -> np.ndarray:
    """Four-port steady scattering: odd sector through the resonator, even bypass."""
    odd, even = build_rotating_io(kappa, delta, omega_mod)
    s_odd = io_steady_scattering(odd)
    s_eo = np.zeros((4, 4), dtype=complex)
    s_eo[:2, :2] = even
    s_eo[2:, 2:] = s_odd
    return EVEN_ODD_MATRIX.T @ s_eo @ EVEN_ODD_MATRIX


def circulator_bandwidths(kappa: float):
    """FWHM transmission bandwidths (rad/s): odd sector alone, full four-port."""
    if kappa <= 0.0:
        raise ValidationError("kappa must be positive")
    odd = np.sqrt(2.0) * kappa
    full = np.sqrt(2.0 * (np.sqrt(3.0) - 1.0)) * kappa
    return float(odd), float(full)


def rotation_angle(omega_mod: float, kappa: float) -> float:
    """Mixing angle of the synthesized rotation: atan(2 omega_mod / kappa)."""
    if kappa <= 0.0:
        raise ValidationError("kappa must be positive")
    return float(np.arctan2(2.0 * omega_mod, kappa))


def fullport_fwhm_numeric(kappa: float, rel_tol: float = 1e-9) -> float:
    """Measured FWHM (rad/s) of the four-port transmission at matched rotation.

    Bisects the half-maximum crossing of |S_21(detuning)|^2 on each side
    of the peak; the transmission is symmetric in detuning, so one side
    suffices and the width is twice the crossing.
    """

    def s21_sq(delta: float) -> float:
        return float(
            np.abs(io_fullport_scattering(kappa, delta, kappa / 2.0)[1, 0]) ** 2
        )

    peak = s21_sq(0.0)
    target = 0.5 * peak
    lo, hi = 0.0, 8.0 * kappa
    if s21_sq(hi) > target:
        raise ValidationError("no half-maximum crossing within the search window")
    while (hi - lo) > rel_tol * kappa:
        mid = 0.5 * (lo + hi)
        if s21_sq(mid) > target:
            lo = mid
        else:
            hi = mid
    return 2.0 * 0.5 * (lo + hi)
