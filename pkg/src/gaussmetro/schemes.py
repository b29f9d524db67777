"""Interferometer schemes as phase-encoding state families, plus figure-level analyses.

Each scheme is described by a recipe: a list of steps that both the Gaussian
engine (here) and the truncated Fock oracle interpret independently.

Step tuples (modes 0-based):

* ``("tms", r, a, b)``   two-mode squeezer
* ``("sq", r, m)``       single-mode squeezer
* ``("disp", alpha, m)`` displacement
* ``("bs", a, b)``       50:50 beamsplitter
* ``("phase", m)``       the unknown phase ``phi``
* ``("loss", eta, modes)`` pure loss
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import formulas
from .fidelity import DEFAULT_DPHI, SchemeFamily, qfi_fidelity
from .gaussian_core import (GaussianState, LossChannel, apply, apply_loss, beamsplitter_5050,
                            displacement, mean_photon, one_mode_squeezer, phase_shifter,
                            two_mode_squeezer, vacuum)
from .observables import QuadraticObservable, UnusableWorkingPoint, error_propagation

SCHEMES = ("ancilla_tmsv", "caves", "hybrid", "su11_with_bs", "su11_without_bs",
           "coherent_benchmark")

N_MODES = {"ancilla_tmsv": 3, "hybrid": 3, "caves": 2, "su11_with_bs": 2,
           "su11_without_bs": 2, "coherent_benchmark": 2}

Step = tuple


@dataclass(frozen=True)
class SchemeConfig:
    """Parameters of one scheme. ``alpha`` is ignored by schemes without a coherent input.

    ``recombine`` appends the closing beamsplitter; it never changes the QFI and
    the scheme observables are defined on the arms before it, so it is off by
    default.
    """

    scheme: str
    r: float = 0.0
    alpha: float = 0.0
    eta: float = 1.0
    theta: float = 0.0
    recombine: bool = False

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {', '.join(SCHEMES)}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.r < 0:
            raise ValueError(f"r must be non-negative, got {self.r}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")

    @property
    def n_modes(self) -> int:
        return N_MODES[self.scheme]


def recipe(cfg: SchemeConfig) -> list[Step]:
    r, a, eta = cfg.r, cfg.alpha, cfg.eta
    s = cfg.scheme
    if s == "ancilla_tmsv":
        # mode 0 is the lossless ancilla, modes 1 and 2 are the arms
        steps = [("tms", r, 0, 1), ("bs", 2, 1), ("phase", 2), ("loss", eta, (1, 2))]
        closing = ("bs", 2, 1)
    elif s == "hybrid":
        steps = [("tms", r, 0, 1), ("disp", a, 2), ("bs", 2, 1), ("phase", 2),
                 ("loss", eta, (1, 2))]
        closing = ("bs", 2, 1)
    elif s == "caves":
        steps = [("sq", r, 0), ("disp", a, 1), ("bs", 0, 1), ("phase", 1), ("loss", eta, (0, 1))]
        closing = ("bs", 0, 1)
    elif s == "coherent_benchmark":
        steps = [("disp", a, 0), ("bs", 1, 0), ("phase", 1), ("loss", eta, (0, 1))]
        closing = ("bs", 1, 0)
    elif s == "su11_with_bs":
        # the splitter turns the TMSV into two single-mode squeezed beams
        steps = [("tms", r, 0, 1), ("bs", 0, 1), ("phase", 1), ("loss", eta, (0, 1))]
        closing = ("bs", 0, 1)
    else:
        steps = [("tms", r, 0, 1), ("phase", 1), ("loss", eta, (0, 1))]
        closing = None
    if cfg.recombine and closing is not None:
        steps.append(closing)
    return steps


def run_gaussian(steps: Sequence[Step], n: int, phi: float) -> GaussianState:
    s = vacuum(n)
    for step in steps:
        kind = step[0]
        if kind == "tms":
            s = apply(two_mode_squeezer(step[1], step[2], step[3], n), s)
        elif kind == "sq":
            s = apply(one_mode_squeezer(step[1], step[2], n), s)
        elif kind == "disp":
            s = apply(displacement(step[1], step[2], n), s)
        elif kind == "bs":
            s = apply(beamsplitter_5050(step[1], step[2], n), s)
        elif kind == "phase":
            s = apply(phase_shifter(phi, step[1], n), s)
        elif kind == "loss":
            s = apply_loss(LossChannel(step[1], step[2]), s)
        else:
            raise ValueError(f"unknown step {kind!r}")
    return s


def build_family(cfg: SchemeConfig) -> SchemeFamily:
    steps = recipe(cfg)
    n = cfg.n_modes
    return SchemeFamily(lambda phi: run_gaussian(steps, n, phi), label=cfg.scheme)


def interferometer_photons(cfg: SchemeConfig) -> float:
    """Mean photon number in the interferometer arms (the lossy modes), before loss."""
    lossless = replace(cfg, eta=1.0, recombine=False)
    steps = recipe(lossless)
    arms = next(st[2] for st in recipe(cfg) if st[0] == "loss")
    pre = [st for st in steps if st[0] != "loss"]
    return mean_photon(run_gaussian(pre, cfg.n_modes, 0.0), arms)


def matched_benchmark_qfi(cfg: SchemeConfig) -> float:
    """Coherent-state bound at the same photon number entering the arms."""
    return 2.0 * cfg.eta * interferometer_photons(cfg)


def coherent_benchmark_qfi(alpha: float, eta: float) -> float:
    return formulas.coherent_bound(alpha, eta)


def su11_factor_check(r: float, eta: float, phi: float = 0.3, dphi: float = DEFAULT_DPHI) -> float:
    """``J(with BS) / J(without BS)`` from the fidelity route."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    j_with = qfi_fidelity(build_family(SchemeConfig("su11_with_bs", r=r, eta=eta)), phi, dphi).value
    j_without = qfi_fidelity(build_family(SchemeConfig("su11_without_bs", r=r, eta=eta)), phi, dphi).value
    return j_with / j_without


# -- curves and widths -------------------------------------------------------------

@dataclass(frozen=True)
class PrecisionCurve:
    """Sampled precision ``(x, value)``; ``func`` re-evaluates off-grid when available."""

    x: np.ndarray
    values: np.ndarray
    meaning: str = "inverse_variance"
    label: str = ""
    func: Callable[[float], float] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size == 0:
            raise ValueError("x and values must be matching nonempty 1-d arrays")
        if np.any(np.diff(x) <= 0):
            raise ValueError("abscissa must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("curve values must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    @property
    def grid(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.values.tolist()))


def default_phi_grid(theta: float, points: int = 401) -> np.ndarray:
    return np.linspace(theta - np.pi, theta + np.pi, points)


def fisher_vs_phi(cfg: SchemeConfig, M: QuadraticObservable,
                  phi_grid: Sequence[float] | None = None) -> PrecisionCurve:
    """``1/Var`` of the error-propagation estimate across ``phi`` at fixed ``cfg.theta``."""
    grid = default_phi_grid(cfg.theta) if phi_grid is None else np.asarray(phi_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("phi grid is empty")
    fam = build_family(cfg)

    def info(phi: float) -> float:
        try:
            return 1.0 / error_propagation(M, fam, phi)
        except UnusableWorkingPoint:
            return 0.0

    vals = np.array([info(p) for p in grid])
    return PrecisionCurve(grid, vals, "inverse_variance", f"{cfg.scheme} theta={cfg.theta:g}", info)


def _crossing(f: Callable[[float], float], a: float, b: float, level: float,
              tol: float) -> float:
    fa, fb = f(a) - level, f(b) - level
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        raise ValueError("half maximum not bracketed on the refined curve")
    return brentq(lambda t: f(t) - level, a, b, xtol=tol, rtol=4 * np.finfo(float).eps)


def fwhm(curve: PrecisionCurve, tol: float = 1e-10) -> float:
    """Full width at half maximum of a single interior peak.

    Crossings are bracketed on the grid, then refined by root finding on
    ``curve.func`` (or by linear interpolation when no function is attached).
    """
    x, v = curve.x, curve.values
    i = int(np.argmax(v))
    if i == 0 or i == x.size - 1:
        raise ValueError("curve has no interior peak")
    peak_x, peak = x[i], v[i]
    if curve.func is not None:
        res = minimize_scalar(lambda t: -curve.func(t), bounds=(x[i - 1], x[i + 1]),
                              method="bounded", options={"xatol": tol})
        if -res.fun > peak:
            peak_x, peak = float(res.x), float(-res.fun)
    half = peak / 2.0

    def side(direction: int) -> float:
        j = i
        while 0 <= j + direction < x.size and v[j + direction] >= half:
            j += direction
        k = j + direction
        if not 0 <= k < x.size:
            raise ValueError("half maximum not bracketed inside the grid")
        if curve.func is not None:
            inner = peak_x if j == i else x[j]
            a, b = sorted((inner, x[k]))
            return _crossing(curve.func, a, b, half, tol)
        a, b = x[j], x[k]
        return float(a + (half - v[j]) * (b - a) / (v[k] - v[j]))

    return side(+1) - side(-1)


def caves_fwhm_config(r: float) -> SchemeConfig:
    return SchemeConfig("caves", r=r, alpha=float(np.sinh(r)), eta=1.0, theta=0.0)


def fwhm_scaling(r_grid: Sequence[float], points: int = 401) -> list[tuple[float, float]]:
    """``(n, W * n)`` for the lossless Caves readout with ``alpha = sinh r`` and ``theta = 0``."""
    from .observables import build_m_caves

    r_grid = [float(r) for r in r_grid]
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ValueError("r grid must be strictly increasing")
    out = []
    for r in r_grid:
        cfg = caves_fwhm_config(r)
        M = build_m_caves(r, cfg.alpha, cfg.theta)
        curve = fisher_vs_phi(cfg, M, default_phi_grid(cfg.theta, points))
        nbar = mean_photon(build_family(cfg)(cfg.theta))
        out.append((nbar, fwhm(curve) * nbar))
    return out


# -- figure presets ------------------------------------------------------------------

FIG1_R = 1.5
FIG2_R = 1.15
FIG4_R = 1.15


def fig4_nbar() -> float:
    return 2.0 * np.sinh(FIG4_R) ** 2


def fig4_configs(eta: float) -> dict[str, SchemeConfig]:
    """Schemes compared at equal nominal photon number ``2 sinh^2(1.15)``.

    The ancilla scheme's squeezing is ``asinh(sqrt(2 n))`` as quoted for that figure.
    """
    r = FIG4_R
    return {
        "ancilla_tmsv": SchemeConfig("ancilla_tmsv", r=float(np.arcsinh(np.sqrt(2 * fig4_nbar()))), eta=eta),
        "caves": SchemeConfig("caves", r=r, alpha=float(np.sinh(r)), eta=eta),
        "su11_with_bs": SchemeConfig("su11_with_bs", r=r, eta=eta),
        "su11_without_bs": SchemeConfig("su11_without_bs", r=r, eta=eta),
    }
