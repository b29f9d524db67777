import numpy as np
import pytest

from gaussmetro import formulas
from gaussmetro.fidelity import qfi_fidelity
from gaussmetro.observables import build_m_caves, error_propagation
from gaussmetro.schemes import (FIG1_R, FIG2_R, SCHEMES, PrecisionCurve, SchemeConfig, build_family,
                                coherent_benchmark_qfi, fig4_configs, fig4_nbar, fisher_vs_phi,
                                fwhm, fwhm_scaling, interferometer_photons, matched_benchmark_qfi, recipe,
                                su11_factor_check)


def test_config_validation():
    with pytest.raises(ValueError):
        SchemeConfig("mach_zehnder")
    with pytest.raises(ValueError):
        SchemeConfig("caves", eta=1.1)
    with pytest.raises(ValueError):
        SchemeConfig("caves", r=-0.1)
    with pytest.raises(ValueError):
        SchemeConfig("caves", alpha=-1.0)


def test_ancilla_lossless_is_pure_and_ancilla_untouched():
    fam = build_family(SchemeConfig("ancilla_tmsv", r=1.0, eta=1.0))
    for phi in (0.0, 0.7):
        assert fam(phi).is_pure()
    lossy = build_family(SchemeConfig("ancilla_tmsv", r=1.0, eta=0.5))(0.3)
    # the ancilla is lossless: its reduced state is still the TMSV marginal
    assert lossy.gamma[0, 0] == pytest.approx(np.cosh(2.0))


def test_caves_without_squeezing_is_coherent_benchmark():
    a = 1.3
    j = qfi_fidelity(build_family(SchemeConfig("caves", r=0.0, alpha=a)), 0.4).value
    assert j == pytest.approx(2 * a ** 2, rel=1e-6)


def test_full_loss_kills_information():
    j = qfi_fidelity(build_family(SchemeConfig("su11_without_bs", r=1.0, eta=0.0)), 0.2).value
    assert j == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_recombination_does_not_change_qfi(scheme):
    kw = dict(r=0.6, alpha=0.9, eta=0.7)
    a = qfi_fidelity(build_family(SchemeConfig(scheme, **kw)), 0.3).value
    b = qfi_fidelity(build_family(SchemeConfig(scheme, recombine=True, **kw)), 0.3).value
    assert a == pytest.approx(b, rel=1e-6)


def test_recipes_have_one_phase_and_one_loss():
    for s in SCHEMES:
        kinds = [st[0] for st in recipe(SchemeConfig(s, r=0.5, alpha=0.5))]
        assert kinds.count("phase") == 1 and kinds.count("loss") == 1


def test_hybrid_qfi_lossless():
    j = qfi_fidelity(build_family(SchemeConfig("hybrid", r=0.8, alpha=1.1)), 0.1).value
    assert j == pytest.approx(formulas.hybrid_qfi(0.8, 1.1), rel=1e-6)


def test_su11_factor():
    for r in (0.8, 1.15):
        assert su11_factor_check(r, 1.0) == pytest.approx(2.0, abs=1e-3)
    # reported, not asserted to equal 2, away from eta = 1
    assert np.isfinite(su11_factor_check(0.8, 0.5))
    with pytest.raises(ValueError):
        su11_factor_check(0.8, 0.0)


def test_coherent_benchmark_qfi():
    assert coherent_benchmark_qfi(1.0, 1.0) == 2.0
    assert coherent_benchmark_qfi(1.0, 0.0) == 0.0


def test_interferometer_photons_matching():
    r = 1.5
    assert interferometer_photons(SchemeConfig("ancilla_tmsv", r=r, eta=0.3)) == pytest.approx(np.sinh(r) ** 2)
    assert interferometer_photons(SchemeConfig("caves", r=r, alpha=2.0)) == pytest.approx(np.sinh(r) ** 2 + 4.0)
    assert interferometer_photons(SchemeConfig("coherent_benchmark", alpha=2.0)) == pytest.approx(4.0)


def test_fig4_presets():
    cfgs = fig4_configs(0.1)
    n = fig4_nbar()
    assert n == pytest.approx(2 * np.sinh(1.15) ** 2)
    assert cfgs["ancilla_tmsv"].r == pytest.approx(np.arcsinh(np.sqrt(2 * n)))
    assert cfgs["caves"].alpha == pytest.approx(np.sinh(1.15))


def test_precision_curve_validation():
    with pytest.raises(ValueError):
        PrecisionCurve([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        PrecisionCurve([0.0, 1.0], [1.0, np.inf])
    with pytest.raises(ValueError):
        PrecisionCurve([], [])


def test_fwhm_triangle():
    x = np.linspace(-2, 2, 41)
    curve = PrecisionCurve(x, np.clip(1 - np.abs(x), 0, None))
    assert fwhm(curve) == pytest.approx(1.0, abs=1e-12)


def test_fwhm_cos_squared_with_refinement():
    f = lambda t: np.cos(t / 2) ** 2
    x = np.linspace(-np.pi, np.pi, 41)
    curve = PrecisionCurve(x, f(x), func=f)
    assert fwhm(curve) == pytest.approx(np.pi, abs=1e-6)


def test_fwhm_errors():
    x = np.linspace(0, 1, 11)
    with pytest.raises(ValueError):
        fwhm(PrecisionCurve(x, x))
    with pytest.raises(ValueError):
        fwhm(PrecisionCurve(x, 1.0 + 0.1 * np.sin(np.pi * x)))


def test_caves_fisher_curve_peak_and_symmetry():
    r = 1.0
    cfg = SchemeConfig("caves", r=r, alpha=np.sinh(r), theta=0.3)
    curve = fisher_vs_phi(cfg, build_m_caves(r, cfg.alpha, cfg.theta))
    i = int(np.argmax(curve.values))
    assert curve.x[i] == pytest.approx(cfg.theta, abs=1e-12)
    assert curve.values[i] == pytest.approx(1 / formulas.caves_qcr_variance(r, cfg.alpha), rel=1e-6)
    assert np.max(np.abs(curve.values - curve.values[::-1])) < 1e-8 * curve.values[i]
    w = fwhm(curve)
    assert 0 < w < np.pi


def test_fisher_vs_phi_zero_slope_points():
    cfg = SchemeConfig("coherent_benchmark", alpha=1.0)
    from gaussmetro.observables import build_x
    curve = fisher_vs_phi(cfg, build_x(1, 2), [-0.5, 0.0, 0.5])
    assert curve.values[1] == 0.0
    with pytest.raises(ValueError):
        fisher_vs_phi(cfg, build_x(1, 2), [])


def test_fwhm_scaling_shapes():
    out = fwhm_scaling([0.7])
    assert len(out) == 1
    out = fwhm_scaling([0.7, 1.0, 1.3], points=201)
    nbars = [n for n, _ in out]
    assert all(b > a for a, b in zip(nbars, nbars[1:]))
    with pytest.raises(ValueError):
        fwhm_scaling([1.0, 0.5])


def test_ancilla_beats_matched_coherent_beam_fig1():
    r = FIG1_R
    for eta in np.linspace(0.02, 1.0, 50):
        cfg = SchemeConfig("ancilla_tmsv", r=r, eta=eta)
        j = qfi_fidelity(build_family(cfg), 0.0).value
        assert j >= matched_benchmark_qfi(cfg)
        assert 1.0 / formulas.manc_min_variance(r, eta) >= 2 * eta * np.sinh(r) ** 2


def test_caves_readout_near_optimal_fig2():
    r = FIG2_R
    a = float(np.sinh(r))
    theta = 0.3
    for eta in (0.6, 0.8, 0.9, 1.0):
        cfg = SchemeConfig("caves", r=r, alpha=a, eta=eta, theta=theta)
        fam = build_family(cfg)
        info = 1.0 / error_propagation(build_m_caves(r, a, theta), fam, theta)
        assert info <= qfi_fidelity(fam, theta).value * (1 + 1e-6)
        if eta == 1.0:
            assert info >= formulas.photon_counting_info(r, a)
            assert info == pytest.approx(1.0 / formulas.caves_qcr_variance(r, a), rel=1e-6)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_qfi_independent_of_phase(scheme):
    fam = build_family(SchemeConfig(scheme, r=0.7, alpha=1.1, eta=0.6, theta=0.2))
    j0 = qfi_fidelity(fam, 0.0).value
    assert qfi_fidelity(fam, 0.9).value == pytest.approx(j0, rel=1e-6)
