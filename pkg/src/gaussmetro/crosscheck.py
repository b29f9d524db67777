"""Cross-validation of the Gaussian engine against the truncated Fock oracle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fidelity import gaussian_fidelity, qfi_fidelity
from .fock import oracle_build, oracle_fidelity, oracle_moments, qfi_from_factors
from .observables import (M1_TERMS, M12_TERMS, expectation, ladder_to_quadratic, m_anc_terms,
                          m_caves_terms, variance)
from .schemes import SchemeConfig, build_family

QFI_RTOL = 1e-3
MOMENT_ATOL = 1e-6
FIDELITY_ATOL = 1e-6
ORACLE_DPHI = 1e-4


@dataclass(frozen=True)
class OracleCase:
    cfg: SchemeConfig
    phi: float
    cutoff: int


@dataclass(frozen=True)
class CheckResult:
    case: str
    quantity: str
    gaussian: float
    fock: float
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


def readout_terms(cfg: SchemeConfig):
    """The scheme's own readout as ladder terms."""
    s = cfg.scheme
    if s in ("ancilla_tmsv", "hybrid"):
        return m_anc_terms(cfg.r, cfg.eta)
    if s == "caves":
        return m_caves_terms(cfg.r, cfg.alpha, cfg.theta)
    if s == "su11_with_bs":
        return M1_TERMS
    if s == "su11_without_bs":
        return M12_TERMS
    # x quadrature of the phase-shifted arm
    h = 1 / np.sqrt(2)
    return [(h, ((1, False),)), (h, ((1, True),))]


def cases(tier: str, cutoff: int | None = None) -> list[OracleCase]:
    if tier == "quick":
        r, a, c2, c3 = 0.4, 1.0, 30, 16
        etas = (0.7,)
    elif tier == "full":
        r, a, c2, c3 = 0.6, 1.5, 60, 22
        etas = (1.0, 0.7)
    else:
        raise ValueError(f"unknown tier {tier!r}")
    if cutoff is not None:
        c2 = c3 = cutoff
    out = []
    for eta in etas:
        out += [
            OracleCase(SchemeConfig("ancilla_tmsv", r=r, eta=eta), 0.3, c3),
            OracleCase(SchemeConfig("hybrid", r=r, alpha=a, eta=eta), 0.3, c3),
            OracleCase(SchemeConfig("caves", r=r, alpha=a, eta=eta, theta=0.2), 0.3, c2),
            OracleCase(SchemeConfig("su11_with_bs", r=r, eta=eta), 0.3, c2),
            OracleCase(SchemeConfig("su11_without_bs", r=r, eta=eta), 0.3, c2),
            OracleCase(SchemeConfig("coherent_benchmark", alpha=a, eta=eta), 0.3, c2),
        ]
    return out


def run_case(case: OracleCase, tol_scale: float = 1.0, other_phi_offset: float = 0.2) -> list[CheckResult]:
    cfg, phi, c = case.cfg, case.phi, case.cutoff
    name = f"{cfg.scheme}(r={cfg.r:g},alpha={cfg.alpha:g},eta={cfg.eta:g})@cutoff{c}"
    fam = build_family(cfg)
    g0 = fam(phi)
    f0 = oracle_build(cfg, phi, c)
    fp = oracle_build(cfg, phi + ORACLE_DPHI, c)
    fm = oracle_build(cfg, phi - ORACLE_DPHI, c)
    f1 = oracle_build(cfg, phi + other_phi_offset, c)

    j_g = qfi_fidelity(fam, phi).value
    j_f = qfi_from_factors(f0.factor, fp.factor, fm.factor, ORACLE_DPHI)
    fid_g = gaussian_fidelity(g0, fam(phi + other_phi_offset))
    fid_f = oracle_fidelity(f0, f1)
    terms = readout_terms(cfg)
    M = ladder_to_quadratic(terms, cfg.n_modes)
    mean_f, var_f = oracle_moments(terms, f0)
    mean_g, var_g = expectation(M, g0), variance(M, g0)
    return [
        CheckResult(name, "qfi", j_g, j_f, abs(j_f - j_g) / max(abs(j_g), 1e-300), QFI_RTOL * tol_scale),
        CheckResult(name, "fidelity", fid_g, fid_f, abs(fid_f - fid_g), FIDELITY_ATOL * tol_scale),
        CheckResult(name, "mean", mean_g, mean_f, abs(mean_f - mean_g), MOMENT_ATOL * tol_scale),
        CheckResult(name, "variance", var_g, var_f, abs(var_f - var_g), MOMENT_ATOL * tol_scale),
    ]
