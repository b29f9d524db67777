"""Closed-form precision expressions for the interferometer schemes.

Every function evaluates a printed expression verbatim (up to the symbol
clean-ups noted inline) so it can serve as an independent check on the
covariance-matrix engine. ``closed_form(name, **params)`` dispatches by name.
"""
from __future__ import annotations

from typing import Callable

import numpy as np


def _check_eta(eta: float) -> None:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")


def manc_mean(r: float, eta: float, phi: float) -> float:
    """Expectation of the ancilla readout on the lossy ancilla-assisted state."""
    _check_eta(eta)
    return 0.25 * eta * np.sinh(r) ** 2 * np.sin(phi) * (-eta + (eta - 2) * np.cosh(2 * r) - 2)


def manc_phase_variance(r: float, eta: float, phi: float) -> float:
    """Error-propagation phase variance of the ancilla readout at phase ``phi``.

    The printed denominator carries ``cos^2(theta)``; the scheme has no working
    point, and the expression matches the engine with ``theta -> phi``.
    """
    _check_eta(eta)
    if eta == 0 or r == 0:
        raise ValueError("phase variance diverges at eta = 0 or r = 0")
    c2, c4 = np.cosh(2 * r), np.cosh(4 * r)
    c2p = np.cos(2 * phi)
    x = (-3 * eta ** 2 * c2p + 3 * eta ** 2 - 2 * eta * c2p - 6 * eta
         + 4 * c2 * (eta ** 2 * c2p - eta ** 2 + 2 * eta - 2)
         + 2 * (eta - 2) * eta * c4 * np.sin(phi) ** 2 - 8)
    return x / (8 * eta * np.sinh(r) ** 2 * np.cos(phi) ** 2 * (-eta + (eta - 2) * c2 - 2))


def manc_min_variance(r: float, eta: float) -> float:
    """Minimum phase variance of the ancilla readout (reached at ``phi = 0``)."""
    _check_eta(eta)
    if eta == 0 or r == 0:
        raise ValueError("phase variance diverges at eta = 0 or r = 0")
    c2 = np.cosh(2 * r)
    return (eta + (1 - eta) * c2 + 1) / (eta * np.sinh(r) ** 2 * (eta + (2 - eta) * c2 + 2))


def photon_counting_info(r: float, alpha: float) -> float:
    """Inverse phase variance of photon-number-difference detection, lossless."""
    return alpha ** 2 * np.exp(2 * r) + np.sinh(r) ** 2


def caves_qfi(r: float, alpha: float) -> float:
    """Lossless QFI ``4 Var(n)`` of the squeezed-plus-coherent interferometer."""
    return (alpha ** 2 + alpha ** 2 * np.exp(2 * r) + np.cosh(4 * r) / 4
            + np.cosh(2 * r) / 2 - 0.75)


def caves_qcr_variance(r: float, alpha: float) -> float:
    return 1.0 / caves_qfi(r, alpha)


def caves_mean(r: float, alpha: float, eta: float, phi: float, theta: float) -> float:
    """Expectation of the Caves readout with working point ``theta`` under loss ``eta``."""
    _check_eta(eta)
    se, e = np.sqrt(eta), np.exp
    a2 = alpha ** 2
    d = phi - theta
    inner = (se * (e(4 * r) - 1) * (4 * a2 * e(2 * r) + e(4 * r) - 1) * np.cos(d)
             + 2 * e(2 * r) * ((2 * a2 + 1) * se + e(4 * r) * (2 * a2 + se)
                               - 2 * e(2 * r) * (a2 * (se - 3) + se)))
    return 0.125 * se * e(-4 * r) * np.sin(d) * inner


def caves_supp_mean(r: float, alpha: float, phi: float, theta: float) -> float:
    """Lossless Caves readout mean as printed with the second-moment expansion.

    Differs from :func:`caves_mean` at ``eta = 1`` by an overall sign.
    """
    e = np.exp
    a2 = alpha ** 2
    d = theta - phi
    return (0.125 * e(-4 * r) * np.sin(d)
            * ((e(4 * r) - 1) * (4 * a2 * e(2 * r) + e(4 * r) - 1) * np.cos(d)
               + 2 * e(2 * r) * (2 * a2 + (2 * a2 + 1) * e(4 * r) + (4 * a2 - 2) * e(2 * r) + 1)))


def caves_second_moment(r: float, alpha: float, phi: float, theta: float) -> float:
    """``<M^2>`` of the lossless Caves readout."""
    e = np.exp
    a2, a4 = alpha ** 2, alpha ** 4
    d = theta - phi
    c1, c2, c3, c4 = np.cos(d), np.cos(2 * d), np.cos(3 * d), np.cos(4 * d)
    t = (80 * e(4 * r) * a4 + 256 * e(6 * r) * a4 + 352 * e(8 * r) * a4 + 256 * e(10 * r) * a4
         + 80 * e(12 * r) * a4 + 64 * e(4 * r) * c3 * a4
         + 128 * e(6 * r) * c3 * a4 - 128 * e(10 * r) * c3 * a4 - 64 * e(12 * r) * c3 * a4
         - 16 * e(4 * r) * c4 * a4
         + 32 * e(8 * r) * c4 * a4 - 16 * e(12 * r) * c4 * a4 + 24 * e(2 * r) * a2
         + 208 * e(4 * r) * a2 + 280 * e(6 * r) * a2 + 64 * e(8 * r) * a2
         + 168 * e(10 * r) * a2 + 240 * e(12 * r) * a2 + 40 * e(14 * r) * a2
         - 48 * e(2 * r) * c3 * a2 - 144 * e(6 * r) * c3 * a2
         + 192 * e(8 * r) * c3 * a2 + 240 * e(10 * r) * c3 * a2 - 192 * e(12 * r) * c3 * a2
         - 48 * e(14 * r) * c3 * a2
         + 24 * e(2 * r) * c4 * a2 - 72 * e(6 * r) * c4 * a2 + 72 * e(10 * r) * c4 * a2
         - 24 * e(14 * r) * c4 * a2 + 12 * e(2 * r)
         + 60 * e(4 * r) - 12 * e(6 * r) - 126 * e(8 * r) - 12 * e(10 * r) + 60 * e(12 * r)
         + 12 * e(14 * r) + 3 * e(16 * r)
         + 8 * e(2 * r) * (-1 + e(4 * r)) * (8 * e(4 * r) * (2 * a2 + 1) * a2 + 2 * a2
                                             + e(8 * r) * (6 * a2 + 1)
                                             + e(6 * r) * (8 * a4 + 24 * a2 - 2)
                                             + e(2 * r) * (8 * a4 + 24 * a2 + 2) - 1) * c1
         - 4 * e(2 * r) * (-4 * a2 + e(12 * r) * (4 * a2 - 1) + 2 * e(2 * r) * (8 * a4 + 2 * a2 + 5)
                           + 2 * e(10 * r) * (8 * a4 + 30 * a2 + 5)
                           + e(4 * r) * (64 * a4 + 4 * a2 - 31)
                           + e(8 * r) * (64 * a4 - 4 * a2 - 31)
                           + e(6 * r) * (96 * a4 - 64 * a2 + 44) - 1) * c2
         - 24 * e(2 * r) * c3 + 48 * e(4 * r) * c3 + 24 * e(6 * r) * c3 - 96 * e(8 * r) * c3
         + 24 * e(10 * r) * c3
         + 48 * e(12 * r) * c3 - 24 * e(14 * r) * c3 + 12 * e(4 * r) * c4 - 18 * e(8 * r) * c4
         + 12 * e(12 * r) * c4
         - 3 * e(16 * r) * c4 - 3 * c4 + 3)
    return e(-8 * r) * t / 512


def caves_variance(r: float, alpha: float, phi: float, theta: float) -> float:
    """Lossless Caves readout variance as ``<M^2> - <M>^2`` of the printed moments."""
    return caves_second_moment(r, alpha, phi, theta) - caves_supp_mean(r, alpha, phi, theta) ** 2


def caves_variance_simplified(r: float, alpha: float, phi: float, theta: float) -> float:
    """The printed closed-form simplification of the Caves readout variance.

    Kept for reference only: it vanishes at ``theta = phi`` and does not equal
    :func:`caves_variance` (see the regression tests).
    """
    e = np.exp
    a2 = alpha ** 2
    d = theta - phi
    S, C = np.sin(d), np.cos(d)
    return (a2 * S - 0.5 * S - 0.25 * S * C + 0.5 * a2 * e(-2 * r) * S + 0.5 * a2 * e(2 * r) * S
            - 0.5 * a2 * e(-2 * r) * S * C + 0.5 * a2 * e(2 * r) * S * C + 0.25 * e(-2 * r) * S
            + 0.25 * e(2 * r) * S + 0.125 * e(-4 * r) * S * C + 0.125 * e(4 * r) * S * C)


def hybrid_qfi(r: float, alpha: float) -> float:
    """Lossless QFI of the ancilla scheme with the idle port fed by ``|alpha>``."""
    return 0.5 * (4 * alpha ** 2 * np.cosh(r) ** 2 + np.sinh(r) ** 2 * (np.cosh(2 * r) + 3))


def su11_qfi(r: float, eta: float) -> float:
    """QFI of the SU(1,1) interferometer with the 50:50 beamsplitter, loss ``eta``."""
    _check_eta(eta)
    d = eta * np.cosh(2 * r) + (1 - eta)
    e = -eta * np.sinh(2 * r)
    return 4 * e ** 2 / (1 + d ** 2 - e ** 2)


def coherent_homodyne_variance(alpha: float, theta: float) -> float:
    """Phase variance of x-homodyne on the phase-shifted half of a split coherent state."""
    return 0.5 / (alpha ** 2 * np.sin(theta) ** 2)


def coherent_bound(alpha: float, eta: float) -> float:
    """QFI ``2 eta alpha^2`` of a coherent state split on a lossy interferometer."""
    _check_eta(eta)
    return 2.0 * eta * alpha ** 2


FORMULAS: dict[str, Callable[..., float]] = {
    "manc_mean": manc_mean,
    "manc_phase_variance": manc_phase_variance,
    "manc_min_variance": manc_min_variance,
    "photon_counting_info": photon_counting_info,
    "caves_qfi": caves_qfi,
    "caves_mean": caves_mean,
    "caves_qcr_variance": caves_qcr_variance,
    "hybrid_qfi": hybrid_qfi,
    "su11_qfi": su11_qfi,
    "caves_variance": caves_variance,
    "caves_second_moment": caves_second_moment,
    "caves_variance_simplified": caves_variance_simplified,
    "coherent_homodyne_variance": coherent_homodyne_variance,
    "coherent_bound": coherent_bound,
}


def closed_form(name: str, **params: float) -> float:
    try:
        fn = FORMULAS[name]
    except KeyError:
        raise KeyError(f"unknown formula {name!r}; known: {sorted(FORMULAS)}") from None
    return float(fn(**params))
