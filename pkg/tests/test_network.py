"""Structure of the assembled reluctance matrix and the basis transforms."""

import numpy as np
import pytest

from synthrot import (
    Basis,
    BasisMismatchError,
    BridgeArms,
    CircuitParams,
    DegenerateInductanceError,
    EVEN_ODD_MATRIX,
    PortVector,
    ValidationError,
    assemble_reluctance,
    bridge_two_port_reluctance,
    even_odd_inverse,
    even_odd_transform,
    full_transform,
    ideal_bridge_schedules,
    rotating_circular_inverse,
    rotating_circular_transform,
    rotating_matrix,
)


def reference_matrix(t, l, epsilon, omega_mod):
    """Constitutive matrix written out entry by entry, as an oracle.

    Independent of the stamp-based assembly: the coupling column of each
    mode rotates at the modulation rate, port diagonals are 3/l, port
    off-diagonals -1/l.
    """
    ec = epsilon * np.cos(omega_mod * t)
    es = epsilon * np.sin(omega_mod * t)
    m = np.array(
        [
            [2.0, 0.0, ec, es, -ec, -es],
            [0.0, 2.0, es, -ec, -es, ec],
            [ec, es, 3.0, -1.0, -1.0, -1.0],
            [es, -ec, -1.0, 3.0, -1.0, -1.0],
            [-ec, -es, -1.0, -1.0, 3.0, -1.0],
            [-es, ec, -1.0, -1.0, -1.0, 3.0],
        ]
    )
    return m / l


def test_assembly_matches_entrywise_reference():
    rng = np.random.default_rng(7)
    for _ in range(100):
        l = float(rng.uniform(0.2e-9, 4e-9))
        eps = float(rng.uniform(0.0, 1.0))
        om = float(rng.uniform(0.0, 2e9))
        t = float(rng.uniform(0.0, 50e-9))
        schedules = ideal_bridge_schedules(l, eps, om)
        built = assemble_reluctance(t, schedules, l).entries
        ref = reference_matrix(t, l, eps, om)
        assert np.max(np.abs(built - ref)) < 1e-12 / l


def test_assembled_matrix_is_positive_semidefinite():
    rng = np.random.default_rng(11)
    for _ in range(20):
        l = float(rng.uniform(0.2e-9, 4e-9))
        eps = float(rng.uniform(0.0, 1.0))
        schedules = ideal_bridge_schedules(l, eps, 2.0 * np.pi * 1e8)
        m = assemble_reluctance(float(rng.uniform(0, 1e-7)), schedules, l).entries
        assert np.min(np.linalg.eigvalsh(m)) > -1e-9 / l


def test_rotating_frame_makes_matrix_constant():
    l, eps, om = 0.5e-9, 1.0, 2.0 * np.pi * 99.5e6
    schedules = ideal_bridge_schedules(l, eps, om)
    ref = None
    for t in np.linspace(0.0, 3.0 * 2.0 * np.pi / om, 17):
        m = assemble_reluctance(float(t), schedules, l).entries
        u = full_transform(float(t), om)
        rotated = l * (u @ m @ u.conj().T)
        if ref is None:
            ref = rotated
        assert np.max(np.abs(rotated - ref)) < 1e-12
        # modes couple only to the odd port pair in this frame
        assert np.max(np.abs(rotated[0:2, 2:4])) < 1e-12
        assert np.max(np.abs(rotated[2:4, 0:2])) < 1e-12


def test_even_odd_matrix_is_orthogonal():
    assert np.max(np.abs(EVEN_ODD_MATRIX @ EVEN_ODD_MATRIX.T - np.eye(4))) < 1e-15


def test_even_odd_round_trip():
    v = PortVector(np.array([1.0, 2.0 - 1j, 0.5, -3j]), Basis.PORTS1234)
    back = even_odd_inverse(even_odd_transform(v))
    assert back.basis is Basis.PORTS1234
    assert np.max(np.abs(back.values - v.values)) < 1e-15


def test_rotating_matrix_is_unitary():
    for t in (0.0, 0.3e-9, 2.7e-9):
        u = rotating_matrix(t, 2.0 * np.pi * 1.5e8)
        assert np.max(np.abs(u @ u.conj().T - np.eye(2))) < 1e-15


def test_rotating_round_trip():
    v = PortVector(np.array([0.3 + 0.1j, -1.2j]), Basis.QP)
    om = 2.0 * np.pi * 2e8
    back = rotating_circular_inverse(0.7e-9, om, rotating_circular_transform(0.7e-9, om, v))
    assert back.basis is Basis.QP
    assert np.max(np.abs(back.values - v.values)) < 1e-15


def test_port_vector_basis_guard():
    v = PortVector(np.zeros(4), Basis.EVEN_ODD)
    with pytest.raises(BasisMismatchError):
        even_odd_transform(v)
    with pytest.raises(ValidationError):
        PortVector(np.zeros(3), Basis.PORTS1234)


def test_bridge_arms_validation():
    with pytest.raises(DegenerateInductanceError):
        BridgeArms(y_mean=0.0, y_delta=0.0)
    with pytest.raises(DegenerateInductanceError):
        BridgeArms(y_mean=1.0, y_delta=1.5)
    with pytest.raises(ValidationError):
        BridgeArms(y_mean=np.inf, y_delta=0.0)
    # one arm momentarily fully off is allowed
    BridgeArms(y_mean=1.0, y_delta=1.0)


def test_bridge_two_port_entries():
    m = bridge_two_port_reluctance(BridgeArms(y_mean=3.0, y_delta=-1.0))
    assert np.array_equal(m, np.array([[3.0, -1.0], [-1.0, 3.0]]))


def test_circuit_params_validation():
    with pytest.raises(ValidationError):
        CircuitParams(l=0.0, c=1e-12, r=50.0, epsilon=0.5, omega_mod=0.0)
    with pytest.raises(ValidationError):
        CircuitParams(l=1e-9, c=1e-12, r=50.0, epsilon=1.2, omega_mod=0.0)
    with pytest.raises(ValidationError):
        CircuitParams(l=1e-9, c=1e-12, r=50.0, epsilon=0.5, omega_mod=-1.0)


def test_circuit_derived_rates():
    p = CircuitParams(l=0.5e-9, c=2e-12, r=50.0, epsilon=1.0, omega_mod=0.0)
    assert p.omega0 == pytest.approx(2.0 * np.pi * 6.164044440614998e9, rel=1e-12)
    assert p.kappa == pytest.approx(1.25e9, rel=1e-12)
    assert p.omega_crit == pytest.approx(6.25e8, rel=1e-12)


def test_assemble_validation():
    schedules = ideal_bridge_schedules(1e-9, 0.5, 0.0)
    with pytest.raises(ValidationError):
        assemble_reluctance(0.0, schedules[:3], 1e-9)
    with pytest.raises(ValidationError):
        assemble_reluctance(0.0, schedules, 0.0)
