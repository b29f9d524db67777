import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussmetro.gaussian_core import (GaussianState, InvalidStateError, LossChannel, SymplecticOp,
                                      apply, apply_loss, beamsplitter_5050, displacement,
                                      mean_photon, min_physicality_eigenvalue, one_mode_squeezer,
                                      phase_shifter, reduce, symplectic_form, two_mode_squeezer,
                                      vacuum)

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
squeezes = st.floats(0.0, 2.0, allow_nan=False)


def test_vacuum_is_identity():
    s = vacuum(3)
    assert np.array_equal(s.gamma, np.eye(6))
    assert s.n_modes == 3
    assert s.is_pure()
    assert mean_photon(s) == 0.0


def test_rejects_bad_covariances():
    with pytest.raises(InvalidStateError):
        GaussianState(np.zeros(2), 0.5 * np.eye(2))
    with pytest.raises(InvalidStateError):
        GaussianState(np.zeros(2), np.array([[1.0, 0.2], [0.0, 1.0]]))
    with pytest.raises(InvalidStateError):
        GaussianState(np.zeros(3), np.eye(3))


def test_state_arrays_are_read_only():
    s = vacuum(1)
    with pytest.raises(ValueError):
        s.gamma[0, 0] = 3.0


def test_non_symplectic_rejected():
    with pytest.raises(ValueError):
        SymplecticOp(np.diag([2.0, 2.0]), np.zeros(2))


@settings(max_examples=40, deadline=None)
@given(phi=angles, r=squeezes, r2=squeezes)
def test_gates_are_symplectic_and_preserve_purity(phi, r, r2):
    n = 3
    om = symplectic_form(n)
    ops = [phase_shifter(phi, 1, n), beamsplitter_5050(0, 2, n), one_mode_squeezer(r, 2, n),
           two_mode_squeezer(r2, 0, 1, n), displacement(0.3 - 0.7j, 1, n)]
    s = vacuum(n)
    for op in ops:
        assert np.allclose(op.S @ om @ op.S.T, om, atol=1e-9)
        s = apply(op, s)
    assert np.allclose(s.symplectic_eigenvalues(), 1.0, atol=1e-7)


def test_phase_shifter_convention():
    # b -> b e^{-i phi}: a real coherent amplitude acquires -sin(phi) in p
    s = apply(displacement(2.0, 0, 1), vacuum(1))
    out = apply(phase_shifter(0.4, 0, 1), s)
    assert np.allclose(out.d, np.sqrt(2) * 2.0 * np.array([np.cos(0.4), -np.sin(0.4)]))


def test_squeezer_direction():
    s = apply(one_mode_squeezer(0.5, 0, 1), vacuum(1))
    assert np.allclose(np.diag(s.gamma), [np.exp(1.0), np.exp(-1.0)])


def test_tmsv_photons_and_reduced_state_thermal():
    r = 0.8
    s = apply(two_mode_squeezer(r, 0, 1, 2), vacuum(2))
    assert mean_photon(s, [0]) == pytest.approx(np.sinh(r) ** 2)
    red = reduce(s, [1])
    assert np.allclose(red.gamma, np.cosh(2 * r) * np.eye(2))
    assert not red.is_pure()


def test_beamsplitter_heisenberg_action():
    s = apply(displacement(1.0, 0, 2), vacuum(2))
    out = apply(beamsplitter_5050(0, 1, 2), s)
    # b_0 -> (b_0 + b_1)/sqrt2, b_1 -> (b_1 - b_0)/sqrt2; x_0 = sqrt2 * Re(alpha) initially
    assert np.allclose(out.d, [1.0, -1.0, 0.0, 0.0])


def test_full_loss_gives_vacuum_and_losses_compose():
    s = apply(two_mode_squeezer(1.0, 0, 1, 2), apply(displacement(1 + 1j, 0, 2), vacuum(2)))
    dead = apply_loss(LossChannel(0.0, (0, 1)), s)
    assert np.allclose(dead.gamma, np.eye(4)) and np.allclose(dead.d, 0)
    a = apply_loss(LossChannel(0.5, (0,)), apply_loss(LossChannel(0.6, (0,)), s))
    b = apply_loss(LossChannel(0.3, (0,)), s)
    assert np.allclose(a.gamma, b.gamma) and np.allclose(a.d, b.d)


def test_loss_channel_validation():
    with pytest.raises(ValueError):
        LossChannel(1.2, (0,))
    assert LossChannel(0.5, (2, 0, 2)).modes == (0, 2)


@settings(max_examples=30, deadline=None)
@given(r=squeezes, eta=st.floats(0, 1))
def test_lossy_states_stay_physical(r, eta):
    s = apply(two_mode_squeezer(r, 0, 1, 2), vacuum(2))
    s = apply_loss(LossChannel(eta, (1,)), s)
    assert min_physicality_eigenvalue(s.gamma) > -1e-9 * np.max(np.abs(s.gamma))


def test_composition_order():
    n = 2
    a, b = one_mode_squeezer(0.3, 0, n), beamsplitter_5050(0, 1, n)
    s1 = apply(b, apply(a, vacuum(n)))
    s2 = apply(a.then(b), vacuum(n))
    assert np.allclose(s1.gamma, s2.gamma)


def test_mode_index_checks():
    with pytest.raises(IndexError):
        phase_shifter(0.1, 2, 2)
    with pytest.raises(ValueError):
        beamsplitter_5050(1, 1, 2)
    with pytest.raises(ValueError):
        apply(phase_shifter(0.1, 0, 1), vacuum(2))
