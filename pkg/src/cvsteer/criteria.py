"""Separability and steerability certification of Gaussian covariance matrices.

Two certificates are provided for an arbitrary bipartition ``N | M``:

* the PPT test: the minimum symplectic eigenvalue of the partially
  transposed covariance, with values ``>= 1`` certifying separability
  (necessary and sufficient when one party holds a single mode);
* the steering monotone ``G(N->M)``: minus the summed log of the
  sub-unity symplectic eigenvalues of the Schur complement of the
  steering party's block, i.e. of the conditional state of ``M`` given
  Gaussian measurements on ``N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import GaussianState, _symplectic_eigenvalues

__all__ = [
    "Partition",
    "SteeringReport",
    "full_report",
    "partial_transpose",
    "ppt_min",
    "ppt_two_mode",
    "steerability",
    "symplectic_eigenvalues",
]

#: PPT values at or above ``1 - SEPARABILITY_TOL`` count as separable.
SEPARABILITY_TOL = 1e-9

#: Schur-complement eigenvalues must fall below ``1 - STEERING_EDGE`` to
#: contribute, which keeps ``-ln(1 - eps)`` float noise out of the monotone.
STEERING_EDGE = 1e-12

#: Condition-number guard on the steering party's block before inversion.
COND_LIMIT = 1e12


@dataclass(frozen=True)
class Partition:
    """An ordered bipartition: steering party ``N`` and steered party ``M``.

    Parties are mode indices into some host state; their union may be a
    strict subset of it (remaining modes are traced out).
    """

    steering: tuple[int, ...]
    steered: tuple[int, ...]

    def __post_init__(self) -> None:
        steering = tuple(int(m) for m in self.steering)
        steered = tuple(int(m) for m in self.steered)
        if not steering or not steered:
            raise ValueError("both parties must be nonempty")
        if set(steering) & set(steered):
            raise ValueError("parties must be disjoint")
        object.__setattr__(self, "steering", steering)
        object.__setattr__(self, "steered", steered)

    @classmethod
    def from_labels(
        cls, state: GaussianState, steering: Iterable[str], steered: Iterable[str]
    ) -> "Partition":
        return cls(
            tuple(state.mode_index(m) for m in steering),
            tuple(state.mode_index(m) for m in steered),
        )

    def swapped(self) -> "Partition":
        return Partition(self.steered, self.steering)


@dataclass(frozen=True)
class SteeringReport:
    """Certification summary over a set of bipartitions.

    ``ppt_by_split`` maps split labels like ``"A|B0,C1"`` to minimum PPT
    eigenvalues, ``steer_by_direction`` maps ``"A->B0,C1"`` style keys to
    steering values (both directions per split), and ``verdicts`` holds the
    separable / inseparable call made at ``separability_tol``.
    """

    ppt_by_split: dict[str, float]
    steer_by_direction: dict[str, float]
    verdicts: dict[str, str]
    separability_tol: float = SEPARABILITY_TOL


def symplectic_eigenvalues(cov: np.ndarray, pairing_tol: float = 1e-9) -> np.ndarray:
    """The n positive symplectic eigenvalues of ``cov``, ascending.

    ``cov`` must be symmetric and positive definite; the +/- pairing of the
    spectrum of ``Omega @ cov`` is asserted to ``pairing_tol``.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ValueError(f"expected a 2n x 2n matrix, got {cov.shape}")
    if np.abs(cov - cov.T).max() > 1e-8 * max(1.0, np.abs(cov).max()):
        raise ValueError("matrix is not symmetric")
    if np.linalg.eigvalsh(cov).min() <= 0:
        raise ValueError("matrix is not positive definite")
    return _symplectic_eigenvalues((cov + cov.T) / 2.0, pairing_tol)


def partial_transpose(cov: np.ndarray, party: Sequence[int]) -> np.ndarray:
    """Flip the sign of every p row/column belonging to ``party`` modes."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    signs = np.ones(2 * n)
    for m in party:
        m = int(m)
        if not 0 <= m < n:
            raise IndexError(f"mode {m} out of range for {n} modes")
        signs[2 * m + 1] = -1.0
    return cov * np.outer(signs, signs)


def ppt_min(state: GaussianState, party: Sequence[int | str]) -> float:
    """Minimum symplectic eigenvalue after partially transposing ``party``.

    A value ``>= 1`` certifies separability across ``party | rest``; below 1
    the split is entangled (necessary and sufficient for 1-vs-m splits).
    """
    modes = [state.mode_index(m) for m in party]
    if not modes:
        raise ValueError("party must be nonempty")
    if len(set(modes)) == state.n_modes:
        raise ValueError("party must be a strict subset of the modes")
    return float(symplectic_eigenvalues(partial_transpose(state.cov, modes)).min())


def ppt_two_mode(cov: np.ndarray) -> float:
    """Closed-form minimum PPT eigenvalue of a two-mode covariance.

    Writing the matrix in 2x2 blocks ``[[N, g], [g^T, M]]`` and
    ``c = det N + det M - 2 det g``, the value is
    ``sqrt((c - sqrt(c^2 - 4 det cov)) / 2)``.  Agrees with the general
    eigensolver route to near machine precision.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (4, 4):
        raise ValueError(f"expected a 4 x 4 two-mode covariance, got {cov.shape}")
    n_det = np.linalg.det(cov[:2, :2])
    m_det = np.linalg.det(cov[2:, 2:])
    g_det = np.linalg.det(cov[:2, 2:])
    c = n_det + m_det - 2.0 * g_det
    disc = c * c - 4.0 * np.linalg.det(cov)
    return float(np.sqrt((c - np.sqrt(max(disc, 0.0))) / 2.0))


def _partition_blocks(
    state: GaussianState, partition: Partition
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(N, M, gamma) blocks of the reduced state over the partition's union."""
    idx_n = [k for m in partition.steering for k in (2 * m, 2 * m + 1)]
    idx_m = [k for m in partition.steered for k in (2 * m, 2 * m + 1)]
    for m in partition.steering + partition.steered:
        if m >= state.n_modes:
            raise IndexError(f"mode {m} out of range for {state.n_modes} modes")
    cov = state.cov
    return cov[np.ix_(idx_n, idx_n)], cov[np.ix_(idx_m, idx_m)], cov[np.ix_(idx_n, idx_m)]


def steerability(state: GaussianState, partition: Partition) -> float:
    """Gaussian steering monotone ``G`` from ``steering`` to ``steered``.

    Computes the Schur complement ``M - gamma^T N^{-1} gamma`` of the
    steering party's block and returns ``max(0, -sum(ln nu))`` over its
    symplectic eigenvalues ``nu < 1``.  The opposite direction is obtained
    by swapping the parties (``partition.swapped()``).
    """
    n_blk, m_blk, gamma = _partition_blocks(state, partition)
    if np.linalg.cond(n_blk) > COND_LIMIT:
        raise ValueError("steering party block is numerically singular")
    schur = m_blk - gamma.T @ np.linalg.solve(n_blk, gamma)
    nus = _symplectic_eigenvalues((schur + schur.T) / 2.0)
    below = nus[nus < 1.0 - STEERING_EDGE]
    if below.size == 0:
        return 0.0
    return float(max(0.0, -np.sum(np.log(below))))


def _party_label(state: GaussianState, modes: Sequence[int]) -> str:
    return ",".join(state.labels[m] for m in modes)


def full_report(
    state: GaussianState,
    splits: Sequence[Partition],
    separability_tol: float = SEPARABILITY_TOL,
) -> SteeringReport:
    """PPT value, both-direction steerability and verdict for every split.

    Modes outside a split's union are traced out before certification.
    """
    ppt: dict[str, float] = {}
    steer: dict[str, float] = {}
    verdicts: dict[str, str] = {}
    for part in splits:
        union = part.steering + part.steered
        reduced = _reduced(state, union)
        local = Partition(
            tuple(range(len(part.steering))),
            tuple(range(len(part.steering), len(union))),
        )
        key_n = _party_label(state, part.steering)
        key_m = _party_label(state, part.steered)
        split_key = f"{key_n}|{key_m}"
        value = ppt_min(reduced, local.steering)
        ppt[split_key] = value
        verdicts[split_key] = "separable" if value >= 1.0 - separability_tol else "inseparable"
        steer[f"{key_n}->{key_m}"] = steerability(reduced, local)
        steer[f"{key_m}->{key_n}"] = steerability(reduced, local.swapped())
    return SteeringReport(ppt, steer, verdicts, separability_tol)


def _reduced(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    if len(modes) == state.n_modes and tuple(modes) == tuple(range(state.n_modes)):
        return state
    from .core import select_modes

    return select_modes(state, modes)
