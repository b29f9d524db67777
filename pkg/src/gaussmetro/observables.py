"""Hermitian quadratic observables ``M = c + l.R + R.A.R`` and their Gaussian moments.

Ladder monomials are written as tuples of ``(mode, dagger)`` pairs, e.g.
``((0, True), (2, True))`` is ``b_0^dag b_2^dag``. An observable given as a
list of ``(coefficient, monomial)`` terms is converted exactly to quadrature
form; the quadratic part ``R.A.R`` with symmetric ``A`` is automatically the
symmetrised (Weyl) product.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .gaussian_core import GaussianState, symplectic_form

Monomial = tuple[tuple[int, bool], ...]
LadderTerm = tuple[complex, Monomial]

HERMITICITY_TOL = 1e-12


class UnusableWorkingPoint(ArithmeticError):
    """The signal slope vanishes at this phase, so error propagation is undefined."""


@dataclass(frozen=True)
class QuadraticObservable:
    c: float
    l: np.ndarray
    A: np.ndarray

    def __post_init__(self) -> None:
        l = np.array(self.l, dtype=float)
        A = np.array(self.A, dtype=float)
        m = l.size
        if m % 2 or A.shape != (m, m):
            raise ValueError("l must have length 2n and A must be 2n x 2n")
        if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(A), initial=0.0)):
            raise ValueError("A must be symmetric")
        l.setflags(write=False)
        A = 0.5 * (A + A.T)
        A.setflags(write=False)
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "A", A)

    @property
    def n_modes(self) -> int:
        return self.l.size // 2

    def __add__(self, other: "QuadraticObservable") -> "QuadraticObservable":
        return QuadraticObservable(self.c + other.c, self.l + other.l, self.A + other.A)

    def scaled(self, k: float) -> "QuadraticObservable":
        return QuadraticObservable(k * self.c, k * self.l, k * self.A)

    def without_constant(self) -> "QuadraticObservable":
        return QuadraticObservable(0.0, self.l, self.A)

    def is_zero(self, tol: float = 1e-14) -> bool:
        return abs(self.c) < tol and np.all(np.abs(self.l) < tol) and np.all(np.abs(self.A) < tol)


def ladder_vector(mode: int, dagger: bool, n: int) -> np.ndarray:
    """Coefficients ``v`` with ``b = v.R`` (or ``b^dag`` when ``dagger``)."""
    v = np.zeros(2 * n, dtype=complex)
    v[mode] = 1.0 / np.sqrt(2.0)
    v[mode + n] = (-1j if dagger else 1j) / np.sqrt(2.0)
    return v


def ladder_to_quadratic(terms: Iterable[LadderTerm], n: int) -> QuadraticObservable:
    """Exact quadrature form of a Hermitian ladder polynomial of degree <= 2."""
    omega = symplectic_form(n)
    c = 0j
    l = np.zeros(2 * n, dtype=complex)
    A = np.zeros((2 * n, 2 * n), dtype=complex)
    for coeff, mono in terms:
        vecs = [ladder_vector(m, dag, n) for m, dag in mono]
        if len(vecs) == 0:
            c += coeff
        elif len(vecs) == 1:
            l += coeff * vecs[0]
        elif len(vecs) == 2:
            u, v = vecs
            # u.R v.R = sum u_i v_j (sym(R_i R_j) + i/2 Omega_ij)
            A += coeff * 0.5 * (np.outer(u, v) + np.outer(v, u))
            c += coeff * 0.5j * (u @ omega @ v)
        else:
            raise ValueError(f"monomial of degree {len(vecs)} not supported")
    scale = max(1.0, abs(c), np.max(np.abs(l)), np.max(np.abs(A)))
    imag = max(abs(c.imag), np.max(np.abs(l.imag)), np.max(np.abs(A.imag)))
    if imag > HERMITICITY_TOL * scale:
        raise ValueError(f"ladder polynomial is not Hermitian (imaginary residue {imag:.3g})")
    return QuadraticObservable(c.real, l.real, A.real)


def quadratic_to_ladder(M: QuadraticObservable, tol: float = 1e-14) -> dict[Monomial, complex]:
    """Normal-ordered ladder coefficients of ``M`` (inverse of :func:`ladder_to_quadratic`).

    Keys are monomials with annihilators after creators and modes ascending
    within each group; the empty tuple holds the constant.
    """
    n = M.n_modes
    h = 1.0 / np.sqrt(2.0)
    # R = T @ beta with beta = (b_0..b_{n-1}, b_0^dag..b_{n-1}^dag)
    T = np.zeros((2 * n, 2 * n), dtype=complex)
    for k in range(n):
        T[k, k] = h
        T[k, k + n] = h
        T[k + n, k] = -1j * h
        T[k + n, k + n] = 1j * h
    lin = M.l @ T
    Q = T.T @ M.A @ T
    out: dict[Monomial, complex] = {}

    def add(key: Monomial, val: complex) -> None:
        out[key] = out.get(key, 0.0) + val

    add((), M.c)
    for k in range(n):
        add(((k, False),), lin[k])
        add(((k, True),), lin[k + n])
    for i in range(2 * n):
        for j in range(2 * n):
            q = Q[i, j]
            if q == 0:
                continue
            mi, di = i % n, i >= n
            mj, dj = j % n, j >= n
            if not di and dj:
                # b_i b_j^dag = b_j^dag b_i + delta_ij
                add(((mj, True), (mi, False)), q)
                if mi == mj:
                    add((), q)
                continue
            a, b = (mi, di), (mj, dj)
            if di and dj or (not di and not dj):
                a, b = sorted([a, b])
            add((a, b), q)
    return {k: v for k, v in out.items() if abs(v) > tol}


def expectation(M: QuadraticObservable, s: GaussianState) -> float:
    """``c + l.d + d.A.d + Tr(A Gamma)/2``."""
    _check_dims(M, s)
    return float(_kernels.quadratic_mean(M.c, M.l, M.A, s.d, s.gamma))


def variance(M: QuadraticObservable, s: GaussianState) -> float:
    """Exact Gaussian ``<M^2> - <M>^2``.

    With ``l' = l + 2 A d`` this is
    ``l'.Gamma.l'/2 + Tr(A Gamma A Gamma)/2 + Tr(A Omega A Omega)/2``;
    the last term is the commutator correction (it cancels the vacuum
    contribution of the symmetric part, e.g. ``Var(b^dag b) = 0`` on vacuum).
    """
    _check_dims(M, s)
    return float(_kernels.quadratic_variance(M.l, M.A, s.d, s.gamma))


def _check_dims(M: QuadraticObservable, s: GaussianState) -> None:
    if M.n_modes != s.n_modes:
        raise ValueError(f"observable acts on {M.n_modes} modes, state has {s.n_modes}")


def signal_slope(M: QuadraticObservable, builder: Callable[[float], GaussianState],
                 phi: float, step: float = 1e-5) -> tuple[float, float]:
    """Symmetric-difference slope of ``<M>`` with one Richardson halving.

    Returns ``(slope, richardson_gap)`` where the gap is the difference between
    the plain and the extrapolated estimates.
    """
    def central(h: float) -> float:
        return (expectation(M, builder(phi + h)) - expectation(M, builder(phi - h))) / (2 * h)

    coarse = central(step)
    fine = central(step / 2)
    extrapolated = (4 * fine - coarse) / 3
    return extrapolated, abs(extrapolated - fine)


def error_propagation(M: QuadraticObservable, fam, phi: float, step: float = 1e-5,
                      min_slope: float = 1e-9) -> float:
    """Phase variance ``Var(M)/(d<M>/dphi)^2`` at ``phi`` for a scheme family.

    Raises :class:`UnusableWorkingPoint` when the slope vanishes there.
    """
    builder = fam.builder if hasattr(fam, "builder") else fam
    slope, _ = signal_slope(M, builder, phi, step)
    var = variance(M, builder(phi))
    scale = max(1.0, float(np.sqrt(max(var, 0.0))))
    if abs(slope) < min_slope * scale:
        raise UnusableWorkingPoint(f"d<M>/dphi = {slope:.3g} vanishes at phi = {phi:.6g}")
    return var / slope ** 2


def sld_pure(fam, phi: float, step: float = 1e-5, purity_tol: float = 1e-6) -> QuadraticObservable:
    """Symmetric logarithmic derivative of a pure Gaussian family, constant dropped.

    Uses ``L = -1/2 d(Gamma^-1)_ij sym(dR_i dR_j) + 2 (d d_i) (Gamma^-1)_ij dR_j``
    with derivatives from a Richardson-extrapolated symmetric difference.
    """
    builder = fam.builder if hasattr(fam, "builder") else fam
    s = builder(phi)
    if not s.is_pure(purity_tol):
        raise ValueError("SLD construction requires a pure state")

    def central(h: float) -> tuple[np.ndarray, np.ndarray]:
        sp, sm = builder(phi + h), builder(phi - h)
        dinv = (np.linalg.inv(sp.gamma) - np.linalg.inv(sm.gamma)) / (2 * h)
        dd = (sp.d - sm.d) / (2 * h)
        return dinv, dd

    dinv_c, dd_c = central(step)
    dinv_f, dd_f = central(step / 2)
    dinv = (4 * dinv_f - dinv_c) / 3
    dd = (4 * dd_f - dd_c) / 3
    dinv = 0.5 * (dinv + dinv.T)

    A = -0.5 * dinv
    w = 2.0 * np.linalg.solve(s.gamma, dd)
    # expand dR = R - d: quadratic part shifts the linear term by -2 A d
    l = w - 2.0 * A @ s.d
    return QuadraticObservable(0.0, l, A)


def fit_positive_scale(target: QuadraticObservable, reference: QuadraticObservable) -> tuple[float, float]:
    """Least-squares ``k`` with ``target ~ k * reference`` (constants ignored).

    Returns ``(k, residual)``, the residual being the max-abs mismatch relative
    to the largest coefficient of ``target``.
    """
    t = np.concatenate([target.l, target.A.ravel()])
    ref = np.concatenate([reference.l, reference.A.ravel()])
    denom = ref @ ref
    if denom == 0:
        raise ValueError("reference observable is zero")
    k = float(t @ ref / denom)
    resid = float(np.max(np.abs(t - k * ref)) / max(np.max(np.abs(t)), 1e-300))
    return k, resid


# -- observables from the interferometer schemes ---------------------------------

def m_anc_terms(r: float, eta: float) -> list[LadderTerm]:
    """Ancilla-assisted readout on modes (0, 1, 2) = ancilla, arm, arm.

    Weighted by ``sqrt(eta)`` and ``eta`` so that both correlators are balanced
    under loss.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    ch, sh = np.cosh(r), np.sinh(r)
    k1 = 1j * np.sqrt(eta) * ch * sh / np.sqrt(2.0)
    k2 = 1j * eta * sh ** 2 / 2.0
    terms = [
        (k1, ((0, False), (2, False))),
        (-k1, ((0, True), (2, True))),
        (k2, ((1, True), (2, False))),
        (-k2, ((1, False), (2, True))),
    ]
    return terms


def build_m_anc(r: float, eta: float) -> QuadraticObservable:
    return ladder_to_quadratic(m_anc_terms(r, eta), 3)


def m_caves_terms(r: float, alpha: float, theta: float) -> list[LadderTerm]:
    """Optimal lossless readout for the squeezed-plus-coherent interferometer.

    Modes 0 and 1; ``theta`` is the working-point estimate of the phase.
    """
    e2p, e2m = np.exp(2 * r), np.exp(-2 * r)
    eit = np.exp(1j * theta)
    s2 = 2 * np.sqrt(2.0)
    b1, b1d = ((0, False),), ((0, True),)
    b2, b2d = ((1, False),), ((1, True),)
    terms: list[LadderTerm] = [
        (0.25j * (e2m - e2p) * eit ** -2, ((1, True), (1, True))),
        (0.25j * (e2p - e2m) * eit ** 2, ((1, False), (1, False))),
        (1j * alpha * (1 - e2p) / s2, b1),
        (-1j * alpha * (1 - e2p) / s2, b1d),
        (1j * alpha * (3 + e2p) * eit / s2, b2),
        (-1j * alpha * (3 + e2p) / eit / s2, b2d),
        (1j * (-0.25 * e2p - 0.25 * e2m + 0.5) / eit, ((1, True), (0, False))),
        (1j * (0.25 * e2m + 0.25 * e2p - 0.5) * eit, ((0, True), (1, False))),
        (0.25j * (e2p - e2m) / eit, ((0, True), (1, True))),
        (0.25j * (e2m - e2p) * eit, ((0, False), (1, False))),
    ]
    return terms


def build_m_caves(r: float, alpha: float, theta: float) -> QuadraticObservable:
    return ladder_to_quadratic(m_caves_terms(r, alpha, theta), 2)


M1_TERMS: list[LadderTerm] = [(1j, ((1, True), (1, True))), (-1j, ((1, False), (1, False)))]
M12_TERMS: list[LadderTerm] = [(1j, ((0, True), (1, True))), (-1j, ((0, False), (1, False)))]


def build_m1() -> QuadraticObservable:
    """``i (b_1^dag^2 - b_1^2)`` on the second of two modes."""
    return ladder_to_quadratic(M1_TERMS, 2)


def build_m12() -> QuadraticObservable:
    """``i (b_0^dag b_1^dag - b_0 b_1)``."""
    return ladder_to_quadratic(M12_TERMS, 2)


def build_x(mode: int, n: int) -> QuadraticObservable:
    return ladder_to_quadratic([(1 / np.sqrt(2), ((mode, False),)), (1 / np.sqrt(2), ((mode, True),))], n)


def build_number(modes: Sequence[int], n: int) -> QuadraticObservable:
    return ladder_to_quadratic([(1.0, ((m, True), (m, False))) for m in modes], n)
