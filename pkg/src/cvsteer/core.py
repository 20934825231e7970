"""Covariance-matrix representation of multimode Gaussian optical states.

Conventions used throughout the package:

* quadratures are ordered ``(x1, p1, ..., xn, pn)``;
* the vacuum has unit variance on both quadratures (``[x, p] = 2i``
  normalization), so every physicality / separability threshold sits at 1;
* first moments are identically zero.  The protocol's "displacements" are
  classical Gaussian noise injections and only show up in second moments.

All operations are pure: they return new states and never mutate inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GaussianState",
    "NoisePattern",
    "add_correlated_noise",
    "beam_splitter",
    "db_to_variance",
    "is_physical",
    "loss_channel",
    "relabel",
    "select_modes",
    "squeezed_mode",
    "symplectic_form",
    "tensor",
    "vacuum",
]

#: Symmetry slack absorbed on construction (float drift from matrix products).
SYMMETRY_TOL = 1e-10

#: Default slack on the ``min symplectic eigenvalue >= 1`` physicality test.
PHYSICALITY_TOL = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form: n copies of ``[[0, 1], [-1, 0]]``."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"m{i + 1}" for i in range(n))


@dataclass(frozen=True)
class GaussianState:
    """A zero-mean Gaussian state of ``n_modes`` labeled optical modes.

    Attributes:
        labels: unique mode names, e.g. ``("A", "B0", "C1")``.
        cov: real symmetric ``2n x 2n`` covariance matrix in
            ``(x1, p1, ..., xn, pn)`` ordering, vacuum-normalized.
    """

    labels: tuple[str, ...]
    cov: np.ndarray

    def __post_init__(self) -> None:
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"covariance must be square 2n x 2n, got {cov.shape}")
        n = cov.shape[0] // 2
        labels = tuple(str(l) for l in self.labels)
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} modes")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate mode labels: {labels}")
        asym = np.abs(cov - cov.T).max()
        if asym > SYMMETRY_TOL:
            raise ValueError(f"covariance asymmetric by {asym:.3e} (tol {SYMMETRY_TOL:.0e})")
        cov = (cov + cov.T) / 2.0  # absorb float drift; eigensolvers assume symmetry
        cov.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def mode_index(self, mode: int | str) -> int:
        """Resolve a mode given either its index or its label."""
        if isinstance(mode, str):
            try:
                return self.labels.index(mode)
            except ValueError:
                raise KeyError(f"unknown mode label {mode!r}; have {self.labels}") from None
        idx = int(mode)
        if not 0 <= idx < self.n_modes:
            raise IndexError(f"mode index {idx} out of range for {self.n_modes} modes")
        return idx

    def block(self, i: int | str, j: int | str | None = None) -> np.ndarray:
        """The 2x2 covariance block between modes ``i`` and ``j`` (``i`` if omitted)."""
        a = 2 * self.mode_index(i)
        b = a if j is None else 2 * self.mode_index(j)
        return self.cov[a : a + 2, b : b + 2].copy()


def vacuum(n: int, labels: Sequence[str] | None = None) -> GaussianState:
    """n-mode vacuum: identity covariance."""
    if n < 1:
        raise ValueError("need at least one mode")
    return GaussianState(_default_labels(n) if labels is None else tuple(labels), np.eye(2 * n))


def db_to_variance(db: float, sign: str) -> float:
    """Convert a (anti)squeezing level in dB to a quadrature variance.

    ``sign`` is ``"squeezed"`` (variance below vacuum, ``10**(-db/10)``) or
    ``"antisqueezed"`` (``10**(+db/10)``); ``db`` is a positive magnitude.
    """
    if sign == "squeezed":
        return 10.0 ** (-db / 10.0)
    if sign == "antisqueezed":
        return 10.0 ** (db / 10.0)
    raise ValueError(f"sign must be 'squeezed' or 'antisqueezed', got {sign!r}")


def squeezed_mode(
    v_s: float, v_a: float, orientation: str = "x_squeezed", label: str = "m1"
) -> GaussianState:
    """Single squeezed mode with quadrature variances ``v_s`` and ``v_a``.

    ``x_squeezed`` puts the low variance on x, ``p_squeezed`` on p.  Impure
    inputs (``v_s * v_a > 1``) are allowed; real sources are rarely pure.
    """
    if v_s <= 0 or v_a <= 0:
        raise ValueError("variances must be positive")
    if orientation == "x_squeezed":
        diag = (v_s, v_a)
    elif orientation == "p_squeezed":
        diag = (v_a, v_s)
    else:
        raise ValueError(f"orientation must be 'x_squeezed' or 'p_squeezed', got {orientation!r}")
    return GaussianState((label,), np.diag(diag))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Product state of two subsystems: block-diagonal covariance."""
    shared = set(a.labels) & set(b.labels)
    if shared:
        raise ValueError(f"duplicate labels in tensor product: {sorted(shared)}")
    na, nb = 2 * a.n_modes, 2 * b.n_modes
    cov = np.zeros((na + nb, na + nb))
    cov[:na, :na] = a.cov
    cov[na:, na:] = b.cov
    return GaussianState(a.labels + b.labels, cov)


def _beam_splitter_matrix(n: int, i: int, j: int, t: float) -> np.ndarray:
    """Symplectic matrix mixing modes i and j with power transmittance t.

    Port map (identical on x and p): ``a_i -> sqrt(t) a_i + sqrt(1-t) a_j``
    and ``a_j -> sqrt(1-t) a_i - sqrt(t) a_j``.
    """
    s = np.eye(2 * n)
    c, r = np.sqrt(t), np.sqrt(1.0 - t)
    for q in (0, 1):
        a, b = 2 * i + q, 2 * j + q
        s[a, a] = c
        s[a, b] = r
        s[b, a] = r
        s[b, b] = -c
    return s


def beam_splitter(state: GaussianState, i: int | str, j: int | str, t: float) -> GaussianState:
    """Mix modes ``i`` and ``j`` on a beam splitter of power transmittance ``t``."""
    ii, jj = state.mode_index(i), state.mode_index(j)
    if ii == jj:
        raise ValueError("beam splitter needs two distinct modes")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmittance must lie in [0, 1], got {t}")
    s = _beam_splitter_matrix(state.n_modes, ii, jj, t)
    return GaussianState(state.labels, s @ state.cov @ s.T)


def loss_channel(state: GaussianState, i: int | str, eta: float) -> GaussianState:
    """Pure-loss channel of transmission efficiency ``eta`` on mode ``i``.

    The mode couples to a fresh vacuum: its own block maps to
    ``eta * V + (1 - eta) * I`` and cross blocks scale by ``sqrt(eta)``.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"efficiency must lie in [0, 1], got {eta}")
    ii = state.mode_index(i)
    scale = np.ones(2 * state.n_modes)
    scale[2 * ii : 2 * ii + 2] = np.sqrt(eta)
    cov = state.cov * np.outer(scale, scale)
    cov[2 * ii, 2 * ii] += 1.0 - eta
    cov[2 * ii + 1, 2 * ii + 1] += 1.0 - eta
    return GaussianState(state.labels, cov)


@dataclass(frozen=True)
class NoisePattern:
    """Correlated classical displacement noise shared across modes.

    One classical variable ``x_dis`` is added to every x quadrature with the
    signed weight ``x_coeffs[k]``, and an independent ``p_dis`` to every p
    quadrature with ``p_coeffs[k]``.  Both variables have variance ``v_dis``.
    """

    x_coeffs: tuple[float, ...]
    p_coeffs: tuple[float, ...]
    v_dis: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_coeffs", tuple(float(c) for c in self.x_coeffs))
        object.__setattr__(self, "p_coeffs", tuple(float(c) for c in self.p_coeffs))
        if len(self.x_coeffs) != len(self.p_coeffs):
            raise ValueError("x_coeffs and p_coeffs must have equal length")
        if self.v_dis < 0:
            raise ValueError("noise variance must be nonnegative")

    @property
    def n_modes(self) -> int:
        return len(self.x_coeffs)


def add_correlated_noise(state: GaussianState, pattern: NoisePattern) -> GaussianState:
    """Add the shared classical displacement noise described by ``pattern``.

    Since ``x_dis`` and ``p_dis`` are independent, the update is the rank-two
    correction ``cov + v_dis * (u u^T + w w^T)`` with ``u`` carrying the x
    weights and ``w`` the p weights; no x-p cross terms appear.
    """
    if pattern.n_modes != state.n_modes:
        raise ValueError(f"pattern covers {pattern.n_modes} modes, state has {state.n_modes}")
    u = np.zeros(2 * state.n_modes)
    w = np.zeros(2 * state.n_modes)
    u[0::2] = pattern.x_coeffs
    w[1::2] = pattern.p_coeffs
    cov = state.cov + pattern.v_dis * (np.outer(u, u) + np.outer(w, w))
    return GaussianState(state.labels, cov)


def select_modes(state: GaussianState, keep: Iterable[int | str]) -> GaussianState:
    """Partial trace: keep only the listed modes, in the requested order."""
    modes = [state.mode_index(m) for m in keep]
    if not modes:
        raise ValueError("must keep at least one mode")
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate modes in selection: {modes}")
    idx = [k for m in modes for k in (2 * m, 2 * m + 1)]
    return GaussianState(
        tuple(state.labels[m] for m in modes), state.cov[np.ix_(idx, idx)]
    )


def relabel(state: GaussianState, labels: Sequence[str]) -> GaussianState:
    """Same covariance under new mode names."""
    return GaussianState(tuple(labels), state.cov)


def _symplectic_eigenvalues(cov: np.ndarray, pairing_tol: float = 1e-9) -> np.ndarray:
    """Positive symplectic spectrum of a symmetric matrix, ascending.

    The spectrum of ``Omega @ cov`` comes in pairs ``+/- i nu``; the pairing
    is asserted to ``pairing_tol`` (scaled by the largest eigenvalue) and the
    ``n`` positive representatives are returned.
    """
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(symplectic_form(n) @ cov)
    nus = np.sort(np.abs(ev.imag))
    scale = max(1.0, float(nus[-1]))
    if np.abs(ev.real).max() > pairing_tol * scale:
        raise ArithmeticError("symplectic spectrum has non-imaginary eigenvalues")
    lo, hi = nus[0::2], nus[1::2]
    if np.abs(hi - lo).max() > pairing_tol * scale:
        raise ArithmeticError("symplectic eigenvalues failed +/- pairing check")
    return (lo + hi) / 2.0


def is_physical(state: GaussianState, tol: float = PHYSICALITY_TOL) -> bool:
    """Whether every symplectic eigenvalue is ``>= 1 - tol`` (uncertainty bound)."""
    return bool(_symplectic_eigenvalues(state.cov).min() >= 1.0 - tol)
