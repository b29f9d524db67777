import numpy as np
import pytest

from gaussmetro import formulas
from gaussmetro.fidelity import qfi_fidelity
from gaussmetro.formulas import closed_form
from gaussmetro.observables import build_m_caves, build_number, build_x, error_propagation, expectation, variance
from gaussmetro.schemes import SchemeConfig, build_family


def test_su11_lossless_limit():
    for r in (0.3, 1.15):
        assert closed_form("su11_qfi", r=r, eta=1.0) == pytest.approx(2 * np.sinh(2 * r) ** 2, rel=1e-12)
    assert closed_form("su11_qfi", r=1.15, eta=1.0) == pytest.approx(48.75, abs=0.01)


def test_manc_min_variance_lossless():
    for r in (0.5, 1.0, 1.5):
        sh2 = np.sinh(r) ** 2
        assert formulas.manc_min_variance(r, 1.0) == pytest.approx(1 / (sh2 * (sh2 + 2)), rel=1e-12)


def test_manc_phase_variance_at_zero_phase():
    for r, eta in [(0.4, 0.3), (1.2, 0.9), (1.5, 1.0)]:
        assert formulas.manc_phase_variance(r, eta, 0.0) == pytest.approx(
            formulas.manc_min_variance(r, eta), rel=1e-12)


def test_caves_figures_at_fig2_parameters():
    r = 1.15
    a = np.sinh(r)
    j15 = formulas.caves_qfi(r, a)
    j14 = formulas.photon_counting_info(r, a)
    assert j15 == pytest.approx(36.3580042671, rel=1e-9)
    assert j14 == pytest.approx(22.1525980077, rel=1e-9)
    assert j15 / j14 > 1.5
    assert formulas.caves_qcr_variance(r, a) == pytest.approx(1 / j15)


def test_caves_qfi_is_four_number_variance_of_arm():
    # lossless: J = 4 Var(n) of the phase-shifted arm
    for r, a in [(0.3, 0.7), (1.15, np.sinh(1.15))]:
        s = build_family(SchemeConfig("caves", r=r, alpha=a))(0.0)
        assert 4 * variance(build_number([1], 2), s) == pytest.approx(formulas.caves_qfi(r, a), rel=1e-10)


def test_hybrid_qfi_is_four_number_variance():
    for r, a in [(0.5, 0.8), (1.2, 1.5)]:
        s = build_family(SchemeConfig("hybrid", r=r, alpha=a))(0.0)
        assert 4 * variance(build_number([2], 3), s) == pytest.approx(formulas.hybrid_qfi(r, a), rel=1e-10)


def test_caves_mean_matches_engine():
    for r, a, eta, phi, theta in [(0.5, 1.0, 1.0, 0.3, 0.1), (1.1, 0.6, 0.7, -0.4, 0.5), (0.8, 2.0, 0.3, 2.0, 1.0)]:
        s = build_family(SchemeConfig("caves", r=r, alpha=a, eta=eta, theta=theta))(phi)
        got = expectation(build_m_caves(r, a, theta), s)
        assert got == pytest.approx(formulas.caves_mean(r, a, eta, phi, theta), abs=1e-10)


def test_supplementary_mean_has_opposite_sign():
    for r, a, phi, theta in [(0.5, 1.0, 0.3, 0.1), (1.2, 1.5, -0.2, 0.6)]:
        assert formulas.caves_supp_mean(r, a, phi, theta) == pytest.approx(
            -formulas.caves_mean(r, a, 1.0, phi, theta), abs=1e-10)


def test_caves_variance_matches_engine():
    for r, a, phi, theta in [(0.5, 1.0, 0.3, 0.1), (1.2, 1.5, -0.2, 0.6), (0.9, 0.3, 1.0, 1.0)]:
        s = build_family(SchemeConfig("caves", r=r, alpha=a, theta=theta))(phi)
        got = variance(build_m_caves(r, a, theta), s)
        assert got == pytest.approx(formulas.caves_variance(r, a, phi, theta), rel=1e-9, abs=1e-9)


def test_printed_simplified_variance_is_inconsistent():
    # the simplification vanishes at the working point where the true variance does not
    r, a = 1.0, np.sinh(1.0)
    assert formulas.caves_variance_simplified(r, a, 0.4, 0.4) == 0.0
    assert formulas.caves_variance(r, a, 0.4, 0.4) > 1.0


def test_coherent_homodyne_variance_matches_engine():
    a, theta = 1.4, 0.8
    fam = build_family(SchemeConfig("coherent_benchmark", alpha=a))
    got = error_propagation(build_x(1, 2), fam, theta)
    assert got == pytest.approx(formulas.coherent_homodyne_variance(a, theta), rel=1e-8)


def test_coherent_bound_matches_fidelity_route():
    for eta in (0.25, 0.5, 0.75, 1.0):
        fam = build_family(SchemeConfig("coherent_benchmark", alpha=1.3, eta=eta))
        assert qfi_fidelity(fam, 0.2).value == pytest.approx(formulas.coherent_bound(1.3, eta), rel=1e-4)


def test_domain_errors():
    with pytest.raises(ValueError):
        closed_form("su11_qfi", r=1.0, eta=1.5)
    with pytest.raises(ValueError):
        closed_form("manc_min_variance", r=0.0, eta=0.5)
    with pytest.raises(KeyError):
        closed_form("no_such_formula", r=1.0)
