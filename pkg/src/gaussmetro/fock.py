"""Truncated Fock-space reference implementation of the scheme recipes.

States are stored as a factor ``X`` with ``rho = X X^dag`` (shape ``(D, K)``,
``D = cutoff**modes``), which keeps mixed states cheap after loss. Unitaries
act through ``expm_multiply`` on sparse generators; loss is a beamsplitter
dilation onto a fresh vacuum environment that is traced out at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from . import _kernels
from .observables import LadderTerm

TAIL_THRESHOLD = 1e-8
PAIR_THRESHOLD = 1e-12
DEFAULT_ORACLE_DPHI = 1e-4
_SVD_KEEP = 1e-13
_DENSE_SVD_MAX = 512
_RESIDUAL_TOL = 1e-20


class TruncationError(ArithmeticError):
    """Population near the cutoff exceeds the configured threshold."""


@lru_cache(maxsize=None)
def _annihilation(cutoff: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, cutoff)), 1, format="csr", dtype=complex)


def mode_operator(op: sp.spmatrix, mode: int, modes: int, cutoff: int) -> sp.csr_matrix:
    """Embed a single-mode operator; mode 0 is the most significant tensor factor."""
    left = sp.identity(cutoff ** mode, format="csr", dtype=complex)
    right = sp.identity(cutoff ** (modes - mode - 1), format="csr", dtype=complex)
    return sp.kron(sp.kron(left, op), right, format="csr")


class FockSpace:
    """Ladder operators on ``modes`` modes truncated at ``cutoff`` levels each."""

    def __init__(self, modes: int, cutoff: int):
        if cutoff < 2 or modes < 1:
            raise ValueError("need cutoff >= 2 and at least one mode")
        self.modes, self.cutoff = modes, cutoff
        self.dim = cutoff ** modes
        a = _annihilation(cutoff)
        self.a = [mode_operator(a, m, modes, cutoff) for m in range(modes)]
        self.ad = [op.conj().T.tocsr() for op in self.a]

    def ladder(self, mode: int, dagger: bool) -> sp.csr_matrix:
        return self.ad[mode] if dagger else self.a[mode]

    def operator(self, terms: Iterable[LadderTerm]) -> sp.csr_matrix:
        """Sparse matrix of ``sum coeff * monomial`` (operators multiplied left to right)."""
        out = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for coeff, mono in terms:
            term = sp.identity(self.dim, format="csr", dtype=complex)
            for mode, dagger in mono:
                term = term @ self.ladder(mode, dagger)
            out = out + coeff * term
        return out.tocsr()


@dataclass(frozen=True)
class FockState:
    """Density matrix ``factor @ factor^dag`` on ``modes`` truncated modes."""

    factor: np.ndarray
    cutoff: int
    modes: int
    tail_mass: float

    @property
    def rho(self) -> np.ndarray:
        return self.factor @ self.factor.conj().T

    @property
    def trace(self) -> float:
        return float(np.sum(np.abs(self.factor) ** 2))

    def photon_distribution(self, mode: int) -> np.ndarray:
        c = self.cutoff
        t = self.factor.reshape((c,) * self.modes + (-1,))
        axes = tuple(i for i in range(t.ndim) if i != mode)
        return np.sum(np.abs(t) ** 2, axis=axes)

    def joint_distribution(self) -> np.ndarray:
        c = self.cutoff
        return np.sum(np.abs(self.factor) ** 2, axis=1).reshape((c,) * self.modes)


def _tail_mass(factor: np.ndarray, modes: int, cutoff: int) -> float:
    t = np.sum(np.abs(factor) ** 2, axis=1).reshape((cutoff,) * modes)
    worst = 0.0
    for m in range(modes):
        p = np.sum(t, axis=tuple(i for i in range(modes) if i != m))
        worst = max(worst, float(np.sum(p[-2:])))
    return worst


def _truncated(u: np.ndarray, s: np.ndarray) -> np.ndarray:
    keep = s > _SVD_KEEP * s[0]
    return u[:, keep] * s[keep]


def _compress(factor: np.ndarray) -> np.ndarray:
    """Drop numerically null directions of ``factor`` while keeping ``X X^dag``.

    Wide factors go through a seeded randomized range finder whose sample size
    doubles until the discarded weight is below ``_RESIDUAL_TOL``.
    """
    D, M = factor.shape
    if M <= 1:
        return factor
    if M <= _DENSE_SVD_MAX or M <= D // 4:
        u, s, _ = np.linalg.svd(factor, full_matrices=False)
        return _truncated(u, s)
    rng = np.random.default_rng(12345)
    total = float(np.sum(np.abs(factor) ** 2))
    p = 256
    while p < min(D, M):
        omega = rng.standard_normal((M, p)) + 1j * rng.standard_normal((M, p))
        q, _ = np.linalg.qr(factor @ omega)
        proj = q.conj().T @ factor
        resid = total - float(np.sum(np.abs(proj) ** 2))
        if resid <= _RESIDUAL_TOL * total:
            u, s, _ = np.linalg.svd(proj, full_matrices=False)
            return _truncated(q @ u, s)
        p *= 2
    u, s, _ = np.linalg.svd(factor, full_matrices=False)
    return _truncated(u, s)


@lru_cache(maxsize=64)
def _loss_kraus(eta: float, cutoff: int) -> np.ndarray:
    """Kraus operators ``E_k = <k|_env U |0>_env`` of the loss dilation, shape ``(k, out, in)``."""
    theta = float(np.arccos(np.sqrt(eta)))
    sp2 = FockSpace(2, cutoff)
    # Heisenberg a -> sqrt(eta) a + sqrt(1 - eta) e
    gen = theta * (sp2.ad[0] @ sp2.a[1] - sp2.a[0] @ sp2.ad[1])
    cols = np.zeros((cutoff * cutoff, cutoff), dtype=complex)
    cols[np.arange(cutoff) * cutoff, np.arange(cutoff)] = 1.0
    out = expm_multiply(gen.tocsc(), cols).reshape(cutoff, cutoff, cutoff)  # (sys, env, in)
    return np.ascontiguousarray(out.transpose(1, 0, 2))


def _apply_loss(factor: np.ndarray, eta: float, mode: int, modes: int, cutoff: int) -> np.ndarray:
    if eta == 1.0:
        return factor
    kraus = _loss_kraus(float(eta), cutoff)
    K = factor.shape[1]
    t = factor.reshape(cutoff ** mode, cutoff, cutoff ** (modes - mode - 1), K)
    # new[k, l, o, r, j] = sum_i E_k[o, i] t[l, i, r, j]
    new = np.einsum("koi,lirj->lorkj", kraus, t, optimize=True)
    return _compress(new.reshape(cutoff ** modes, cutoff * K))


def run_fock(steps: Sequence[tuple], modes: int, phi: float, cutoff: int,
             tail_threshold: float | None = TAIL_THRESHOLD) -> FockState:
    """Execute a scheme recipe exactly in the truncated space."""
    if cutoff < 8:
        raise ValueError("cutoff must be at least 8")
    space = FockSpace(modes, cutoff)
    X = np.zeros((space.dim, 1), dtype=complex)
    X[0, 0] = 1.0
    n_levels = np.arange(cutoff)
    for step in steps:
        kind = step[0]
        gen = None
        if kind == "tms":
            r, i, j = step[1:]
            gen = r * (space.a[i] @ space.a[j] - space.ad[i] @ space.ad[j])
        elif kind == "sq":
            r, m = step[1:]
            gen = 0.5 * r * (space.ad[m] @ space.ad[m] - space.a[m] @ space.a[m])
        elif kind == "disp":
            alpha, m = step[1:]
            gen = alpha * space.ad[m] - np.conj(alpha) * space.a[m]
        elif kind == "bs":
            i, j = step[1:]
            gen = 0.25 * np.pi * (space.ad[i] @ space.a[j] - space.a[i] @ space.ad[j])
        elif kind == "phase":
            m = step[1]
            phases = np.exp(-1j * phi * n_levels)
            shape = (cutoff ** m, cutoff, cutoff ** (modes - m - 1), X.shape[1])
            X = (X.reshape(shape) * phases[None, :, None, None]).reshape(space.dim, -1)
        elif kind == "loss":
            eta, lossy = step[1:]
            for m in sorted(lossy):
                X = _apply_loss(X, eta, m, modes, cutoff)
        else:
            raise ValueError(f"unknown step {kind!r}")
        if gen is not None:
            X = expm_multiply(gen.tocsc(), X)
    tail = _tail_mass(X, modes, cutoff)
    if tail_threshold is not None and tail > tail_threshold:
        raise TruncationError(f"tail mass {tail:.3g} exceeds {tail_threshold:g} at cutoff {cutoff}")
    return FockState(X, cutoff, modes, tail)


def oracle_build(cfg, phi: float, cutoff: int, tail_threshold: float | None = TAIL_THRESHOLD) -> FockState:
    from .schemes import recipe

    return run_fock(recipe(cfg), cfg.n_modes, phi, cutoff, tail_threshold)


def oracle_fidelity(a: FockState, b: FockState, method: str = "factor") -> float:
    """Uhlmann fidelity ``Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a))`` (not squared).

    ``method="factor"`` uses the nuclear norm of ``X_a^dag X_b``; ``"dense"``
    forms the matrix square roots explicitly.
    """
    if a.factor.shape[0] != b.factor.shape[0]:
        raise ValueError("states live in different spaces")
    if method == "factor":
        return float(np.sum(np.linalg.svd(a.factor.conj().T @ b.factor, compute_uv=False)))
    if method == "dense":
        ra = _psd_sqrt(a.rho)
        inner = ra @ b.rho @ ra
        w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
        if w[0] < -1e-8:
            raise ValueError("intermediate matrix is not positive semidefinite")
        return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    raise ValueError(f"unknown method {method!r}")


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w[0] < -1e-8:
        raise ValueError("density matrix is not positive semidefinite")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def oracle_moments(terms: Iterable[LadderTerm], s: FockState) -> tuple[float, float]:
    """Mean and variance of a Hermitian ladder polynomial."""
    op = FockSpace(s.modes, s.cutoff).operator(terms)
    skew = op - op.conj().T
    if skew.nnz and np.max(np.abs(skew.data)) > 1e-12 * max(1.0, np.max(np.abs(op.data))):
        raise ValueError("observable is not Hermitian")
    MX = op @ s.factor
    mean = np.vdot(s.factor, MX)
    if abs(mean.imag) > 1e-8 * max(1.0, abs(mean.real)):
        raise ValueError("observable is not Hermitian on this state")
    second = float(np.sum(np.abs(MX) ** 2))
    return float(mean.real), second - float(mean.real) ** 2


def qfi_from_factors(X: np.ndarray, Xp: np.ndarray, Xm: np.ndarray, h: float,
                     thresh: float = PAIR_THRESHOLD) -> float:
    """Spectral QFI ``sum 2 |<j|rho'|k>|^2 / (l_j + l_k)`` with ``rho'`` by central difference.

    Pairs with one index in the kernel are summed through the completeness
    relation, so the kernel basis is never formed.
    """
    u, s, _ = np.linalg.svd(X, full_matrices=False)
    lam = s ** 2
    keep = lam > 1e-300
    u, lam = u[:, keep], lam[keep]

    def drho(v: np.ndarray) -> np.ndarray:
        return (Xp @ (Xp.conj().T @ v) - Xm @ (Xm.conj().T @ v)) / (2 * h)

    DU = drho(u)
    B = u.conj().T @ DU
    support = float(_kernels.qfi_pair_sum(lam, B, thresh))
    # support-kernel pairs: |j, k> with k outside the support, both orderings
    out_norm = np.sum(np.abs(DU) ** 2, axis=0) - np.sum(np.abs(B) ** 2, axis=0)
    big = lam > thresh
    kernel = float(np.sum(4.0 * np.clip(out_norm[big], 0.0, None) / lam[big]))
    return support + kernel


def oracle_qfi_family(builder: Callable[[float], FockState], phi: float,
                      dphi: float = DEFAULT_ORACLE_DPHI) -> float:
    s0, sp_, sm = builder(phi), builder(phi + dphi), builder(phi - dphi)
    return qfi_from_factors(s0.factor, sp_.factor, sm.factor, dphi)


def oracle_qfi(cfg, phi: float, dphi: float = DEFAULT_ORACLE_DPHI, cutoff: int = 40,
               tail_threshold: float | None = TAIL_THRESHOLD) -> float:
    return oracle_qfi_family(lambda p: oracle_build(cfg, p, cutoff, tail_threshold), phi, dphi)
