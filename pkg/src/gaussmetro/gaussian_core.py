"""Multimode Gaussian states in the covariance-matrix formalism.

Quadratures are ordered ``R = (x_0, ..., x_{n-1}, p_0, ..., p_{n-1})`` with
``x = (b + b^dag)/sqrt(2)`` and ``p = -i (b - b^dag)/sqrt(2)``, so ``[x, p] = i``.
The covariance matrix is ``Gamma_ij = <{dR_i, dR_j}_+>`` (twice the symmetrised
second moments), which makes the vacuum covariance the identity.

Modes are indexed from 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-10
SYMPLECTIC_TOL = 1e-10


class InvalidStateError(ValueError):
    """Raised for asymmetric or unphysical covariance data."""


def symplectic_form(n: int) -> np.ndarray:
    """Return ``Omega = [[0, I], [-I, 0]]`` for ``n`` modes (xxpp ordering)."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_mode(mode: int, n: int) -> None:
    if not 0 <= mode < n:
        raise IndexError(f"mode {mode} out of range for {n} modes")


@dataclass(frozen=True)
class GaussianState:
    """Mean quadrature vector ``d`` and covariance ``gamma`` of an n-mode state."""

    d: np.ndarray
    gamma: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self) -> None:
        d = _frozen(self.d)
        gamma = _frozen(self.gamma)
        if d.ndim != 1 or d.size % 2 or d.size == 0:
            raise InvalidStateError(f"mean vector must have even length 2n, got {d.shape}")
        n = d.size // 2
        if gamma.shape != (2 * n, 2 * n):
            raise InvalidStateError(f"covariance must be {2 * n}x{2 * n}, got {gamma.shape}")
        if np.max(np.abs(gamma - gamma.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(gamma))):
            raise InvalidStateError("covariance matrix is not symmetric")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "n_modes", n)
        if min_physicality_eigenvalue(gamma) < -PHYSICALITY_TOL * max(1.0, np.max(np.abs(gamma))):
            raise InvalidStateError("covariance violates the uncertainty principle")

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Williamson spectrum; all ones for a pure state."""
        return symplectic_eigenvalues(self.gamma)

    def is_pure(self, tol: float = 1e-6) -> bool:
        return bool(np.all(np.abs(self.symplectic_eigenvalues() - 1.0) < tol))


def min_physicality_eigenvalue(gamma: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian matrix ``Gamma + i Omega``."""
    n = gamma.shape[0] // 2
    return float(np.linalg.eigvalsh(gamma + 1j * symplectic_form(n))[0])


def symplectic_eigenvalues(gamma: np.ndarray) -> np.ndarray:
    n = gamma.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ gamma)
    return np.sort(np.abs(ev.real))[::2]


@dataclass(frozen=True)
class SymplecticOp:
    """Affine phase-space map ``R -> S R + shift`` of a Gaussian unitary."""

    S: np.ndarray
    shift: np.ndarray

    def __post_init__(self) -> None:
        S = _frozen(self.S)
        shift = _frozen(self.shift)
        m = S.shape[0]
        if S.shape != (m, m) or m % 2 or shift.shape != (m,):
            raise ValueError("S must be 2n x 2n and shift of length 2n")
        om = symplectic_form(m // 2)
        if np.max(np.abs(S @ om @ S.T - om)) > SYMPLECTIC_TOL * max(1.0, np.max(np.abs(S)) ** 2):
            raise ValueError("matrix is not symplectic")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "shift", shift)

    @property
    def n_modes(self) -> int:
        return self.S.shape[0] // 2

    def then(self, other: "SymplecticOp") -> "SymplecticOp":
        """Composite map that applies ``self`` first and ``other`` second."""
        if other.n_modes != self.n_modes:
            raise ValueError("mode count mismatch")
        return SymplecticOp(other.S @ self.S, other.S @ self.shift + other.shift)

    @classmethod
    def identity(cls, n: int) -> "SymplecticOp":
        return cls(np.eye(2 * n), np.zeros(2 * n))


@dataclass(frozen=True)
class LossChannel:
    """Pure-loss channel of transmissivity ``eta`` on a set of modes."""

    eta: float
    modes: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {self.eta}")
        object.__setattr__(self, "modes", tuple(sorted(set(int(m) for m in self.modes))))


def vacuum(n: int) -> GaussianState:
    if n < 1:
        raise ValueError("need at least one mode")
    return GaussianState(np.zeros(2 * n), np.eye(2 * n))


def _embed(n: int, modes: Sequence[int], block: np.ndarray) -> np.ndarray:
    """Embed a symplectic matrix acting on ``modes`` (local xxpp order) into n modes."""
    idx = [m for m in modes] + [m + n for m in modes]
    S = np.eye(2 * n)
    S[np.ix_(idx, idx)] = block
    return S


def phase_shifter(phi: float, mode: int, n: int) -> SymplecticOp:
    """Optical path delay ``b^dag -> b^dag e^{i phi}`` (Heisenberg ``b -> b e^{-i phi}``).

    Equivalent to the unitary ``exp(-i phi b^dag b)``; rotates ``(x, p)``
    clockwise by ``phi``.
    """
    _check_mode(mode, n)
    c, s = np.cos(phi), np.sin(phi)
    block = np.array([[c, s], [-s, c]])
    return SymplecticOp(_embed(n, [mode], block), np.zeros(2 * n))


def beamsplitter_5050(mode_a: int, mode_b: int, n: int) -> SymplecticOp:
    """Real 50:50 beamsplitter ``b_a -> (b_a + b_b)/sqrt2``, ``b_b -> (b_b - b_a)/sqrt2``."""
    _check_mode(mode_a, n)
    _check_mode(mode_b, n)
    if mode_a == mode_b:
        raise ValueError("beamsplitter needs two distinct modes")
    h = 1.0 / np.sqrt(2.0)
    rot = np.array([[h, h], [-h, h]])
    block = np.zeros((4, 4))
    block[:2, :2] = rot
    block[2:, 2:] = rot
    return SymplecticOp(_embed(n, [mode_a, mode_b], block), np.zeros(2 * n))


def one_mode_squeezer(r: float, mode: int, n: int) -> SymplecticOp:
    """``exp(r/2 (b^dag^2 - b^2))``: scales ``x`` by ``e^r`` and ``p`` by ``e^-r``.

    For ``r > 0`` the momentum quadrature is squeezed, so a real coherent
    amplitude sits along the anti-squeezed direction.
    """
    _check_mode(mode, n)
    block = np.diag([np.exp(r), np.exp(-r)])
    return SymplecticOp(_embed(n, [mode], block), np.zeros(2 * n))


def two_mode_squeezer(r: float, mode_a: int, mode_b: int, n: int) -> SymplecticOp:
    """``exp(r b_a b_b - r b_a^dag b_b^dag)`` on vacuum-referenced quadratures.

    Heisenberg action ``b_a -> cosh(r) b_a - sinh(r) b_b^dag``.
    """
    _check_mode(mode_a, n)
    _check_mode(mode_b, n)
    if mode_a == mode_b:
        raise ValueError("two-mode squeezer needs two distinct modes")
    c, s = np.cosh(r), np.sinh(r)
    block = np.array([
        [c, -s, 0.0, 0.0],
        [-s, c, 0.0, 0.0],
        [0.0, 0.0, c, s],
        [0.0, 0.0, s, c],
    ])
    return SymplecticOp(_embed(n, [mode_a, mode_b], block), np.zeros(2 * n))


def displacement(alpha: complex, mode: int, n: int) -> SymplecticOp:
    _check_mode(mode, n)
    shift = np.zeros(2 * n)
    shift[mode] = np.sqrt(2.0) * np.real(alpha)
    shift[mode + n] = np.sqrt(2.0) * np.imag(alpha)
    return SymplecticOp(np.eye(2 * n), shift)


def apply(op: SymplecticOp, state: GaussianState) -> GaussianState:
    if op.n_modes != state.n_modes:
        raise ValueError(f"operator acts on {op.n_modes} modes, state has {state.n_modes}")
    S = op.S
    return GaussianState(S @ state.d + op.shift, S @ state.gamma @ S.T)


def apply_loss(ch: LossChannel, state: GaussianState) -> GaussianState:
    n = state.n_modes
    for m in ch.modes:
        _check_mode(m, n)
    scale = np.ones(2 * n)
    noise = np.zeros(2 * n)
    for m in ch.modes:
        scale[[m, m + n]] = np.sqrt(ch.eta)
        noise[[m, m + n]] = 1.0 - ch.eta
    gamma = scale[:, None] * state.gamma * scale[None, :] + np.diag(noise)
    return GaussianState(scale * state.d, gamma)


def mean_photon(state: GaussianState, modes: Iterable[int] | None = None) -> float:
    """Total ``<b^dag b>`` over ``modes`` (all modes when omitted)."""
    n = state.n_modes
    modes = range(n) if modes is None else list(modes)
    total = 0.0
    for m in modes:
        _check_mode(m, n)
        g, d = state.gamma, state.d
        total += (g[m, m] + g[m + n, m + n] - 2.0) / 4.0 + (d[m] ** 2 + d[m + n] ** 2) / 2.0
    return float(total)


def reduce(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Partial trace onto the modes in ``keep`` (in the given order)."""
    keep = list(keep)
    if not keep:
        raise ValueError("must keep at least one mode")
    n = state.n_modes
    for m in keep:
        _check_mode(m, n)
    if len(set(keep)) != len(keep):
        raise ValueError("duplicate modes in keep")
    idx = keep + [m + n for m in keep]
    return GaussianState(state.d[idx], state.gamma[np.ix_(idx, idx)])
