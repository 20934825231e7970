"""Entanglement and steering distribution over a server / multi-user network.

A quantum server prepares two squeezed modes and up to two coherent modes,
correlates all of them with shared classical displacement noise (which keeps
the transmitted states fully separable), and ships them through lossy
channels.  Users then only apply local beam splitters:

* Alice mixes her two received modes on ``T1`` and relays one output port;
* Bob mixes the relayed ancilla with his mode on ``T2`` and, for three
  users, relays his spare port onwards;
* David mixes that second ancilla with his mode on ``T3``.

``build_network_state`` composes the elementary channel operations in this
order; the ``analytic_cov_*`` functions assemble the same covariances from
closed-form matrix elements and must agree with the pipeline to float
precision wherever their parameter regimes apply.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import core
from .core import GaussianState, NoisePattern, db_to_variance
from .criteria import Partition, ppt_min, steerability

__all__ = [
    "ProtocolParams",
    "ScanResult",
    "analytic_cov_final_two_user",
    "analytic_cov_pre_bob",
    "analytic_cov_three_user",
    "build_network_state",
    "closed_form_steering_three_user",
    "closed_form_steering_two_user",
    "qss_params",
    "qss_scenario",
    "separable_boundary_vsep",
    "server_output_state",
]

#: Squeezing / antisqueezing variances of the source (-3 dB / +5.5 dB).
V_S_DEFAULT = db_to_variance(3.0, "squeezed")
V_A_DEFAULT = db_to_variance(5.5, "antisqueezed")

#: Displacement-noise variance used throughout the reference scenarios.
V_DIS_DEFAULT = 1.50

STAGES = ("pre_bob", "final_two_user", "pre_david", "final_three_user")

_REGIME_TOL = 1e-12


@dataclass(frozen=True)
class ProtocolParams:
    """Every knob of the distribution scenario.

    ``t1, t2, t3`` are the users' beam-splitter transmittances;
    ``eta_sa, eta_sb, eta_sd`` the server-to-user channel efficiencies
    (``eta_sa`` hits both of Alice's modes); ``eta_ab, eta_bd`` the
    user-to-user relay efficiencies; ``f_a .. f_d`` the signed displacement
    coefficients of the shared classical noise.
    """

    v_s: float = V_S_DEFAULT
    v_a: float = V_A_DEFAULT
    v_dis: float = V_DIS_DEFAULT
    t1: float = 0.5
    t2: float = 0.5
    t3: float = 0.5
    eta_sa: float = 1.0
    eta_sb: float = 1.0
    eta_sd: float = 1.0
    eta_ab: float = 1.0
    eta_bd: float = 1.0
    f_a: float = 1.0
    f_b: float = 1.0
    f_c: float = 1.0
    f_d: float = 1.0
    users: str = "two"

    def __post_init__(self) -> None:
        if self.v_s <= 0 or self.v_a <= 0:
            raise ValueError("squeezing variances must be positive")
        if self.v_dis < 0:
            raise ValueError("displacement variance must be nonnegative")
        for name in ("t1", "t2", "t3", "eta_sa", "eta_sb", "eta_sd", "eta_ab", "eta_bd"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.users not in ("two", "three"):
            raise ValueError(f"users must be 'two' or 'three', got {self.users!r}")

    def replace(self, **changes) -> "ProtocolParams":
        return dataclasses.replace(self, **changes)


def server_output_state(params: ProtocolParams) -> GaussianState:
    """The four displaced modes as they leave the server (fully separable).

    Modes in order ``A0, B0, C0, D0``: a p-squeezed mode for Alice, Bob's
    coherent mode, an x-squeezed mode for Alice, David's coherent mode, all
    correlated only through the shared classical noise.
    """
    state = core.tensor(
        core.squeezed_mode(params.v_s, params.v_a, "p_squeezed", "A0"),
        core.vacuum(1, ("B0",)),
    )
    state = core.tensor(state, core.squeezed_mode(params.v_s, params.v_a, "x_squeezed", "C0"))
    state = core.tensor(state, core.vacuum(1, ("D0",)))
    pattern = NoisePattern(
        x_coeffs=(0.0, params.f_b, params.f_c, params.f_d),
        p_coeffs=(params.f_a, -params.f_b, 0.0, -params.f_d),
        v_dis=params.v_dis,
    )
    return core.add_correlated_noise(state, pattern)


def build_network_state(params: ProtocolParams, stage: str) -> GaussianState:
    """Propagate the server outputs through channels and user beam splitters.

    ``stage`` selects how far the pipeline runs and which modes survive:

    * ``pre_bob``:          (A, B0, C1)   after Alice's beam splitter
    * ``final_two_user``:   (A, B)        after Bob's beam splitter
    * ``pre_david``:        (A, B, C2, D0) with the second ancilla in flight
    * ``final_three_user``: (A, B, D)     after David's beam splitter

    Bob's output takes amplitude ``sqrt(t2)`` from his own mode; David's
    takes ``sqrt(t3)`` from his mode and ``-sqrt(1-t3)`` from the relayed
    ancilla (the sign convention under which the closed forms hold).
    """
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}; expected one of {STAGES}")
    if params.users == "two" and stage in ("pre_david", "final_three_user"):
        raise ValueError(f"stage {stage!r} requires users='three'")

    state = server_output_state(params)  # modes A0=0, B0=1, C0=2, D0=3
    state = core.loss_channel(state, 0, params.eta_sa)
    state = core.loss_channel(state, 2, params.eta_sa)
    state = core.loss_channel(state, 1, params.eta_sb)
    state = core.loss_channel(state, 3, params.eta_sd)

    state = core.beam_splitter(state, 0, 2, params.t1)  # -> A at 0, C1 at 2
    state = core.loss_channel(state, 2, params.eta_ab)
    if stage == "pre_bob":
        return core.relabel(core.select_modes(state, [0, 1, 2]), ("A", "B0", "C1"))

    state = core.beam_splitter(state, 1, 2, params.t2)  # -> B at 1, C2 at 2
    if stage == "final_two_user":
        return core.relabel(core.select_modes(state, [0, 1]), ("A", "B"))

    state = core.loss_channel(state, 2, params.eta_bd)
    if stage == "pre_david":
        return core.relabel(core.select_modes(state, [0, 1, 2, 3]), ("A", "B", "C2", "D0"))

    state = core.beam_splitter(state, 3, 2, 1.0 - params.t3)  # -> C3 at 3, D at 2
    return core.relabel(core.select_modes(state, [0, 1, 2]), ("A", "B", "D"))


def _require_regime(params: ProtocolParams, *, balanced: Sequence[str], equal_etas: bool) -> None:
    for name in balanced:
        if abs(getattr(params, name) - 0.5) > _REGIME_TOL:
            raise ValueError(f"closed form requires {name} = 1/2")
    if abs(params.eta_sa - 1.0) > _REGIME_TOL:
        raise ValueError("closed form requires eta_sa = 1 (use the pipeline otherwise)")
    if abs(params.f_a - 1.0) > _REGIME_TOL or abs(params.f_c - 1.0) > _REGIME_TOL:
        raise ValueError("closed form requires f_a = f_c = 1")
    if equal_etas:
        etas = (params.eta_sb, params.eta_ab, params.eta_sd, params.eta_bd)
        if max(etas) - min(etas) > _REGIME_TOL:
            raise ValueError("closed form requires all channel efficiencies equal")


def _xp_diagonal_cov(n: int, xx: dict[tuple[int, int], float],
                     pp: dict[tuple[int, int], float]) -> np.ndarray:
    """Assemble a covariance with separate x and p sectors and no x-p mixing."""
    cov = np.zeros((2 * n, 2 * n))
    for (i, j), v in xx.items():
        cov[2 * i, 2 * j] = cov[2 * j, 2 * i] = v
    for (i, j), v in pp.items():
        cov[2 * i + 1, 2 * j + 1] = cov[2 * j + 1, 2 * i + 1] = v
    return cov


def analytic_cov_pre_bob(params: ProtocolParams) -> np.ndarray:
    """Closed-form 6x6 covariance of (A, B0, C1); requires t1 = 1/2."""
    _require_regime(params, balanced=("t1",), equal_etas=False)
    v_s, v_a, v_dis, f_b = params.v_s, params.v_a, params.v_dis, params.f_b
    eta_sb, eta_ab = params.eta_sb, params.eta_ab
    var_a = (v_a + v_s + v_dis) / 2.0
    var_b0 = eta_sb * (1.0 + v_dis * f_b**2) + 1.0 - eta_sb
    var_c1 = eta_ab * (v_a + v_s + v_dis) / 2.0 + 1.0 - eta_ab
    c_ab = math.sqrt(2.0 * eta_sb) * v_dis * f_b / 2.0
    c_ac = math.sqrt(eta_ab) * (v_a - v_s - v_dis) / 2.0
    c_bc = -math.sqrt(2.0 * eta_ab * eta_sb) * v_dis * f_b / 2.0
    xx = {(0, 0): var_a, (1, 1): var_b0, (2, 2): var_c1,
          (0, 1): c_ab, (0, 2): c_ac, (1, 2): c_bc}
    pp = {(0, 0): var_a, (1, 1): var_b0, (2, 2): var_c1,
          (0, 1): -c_ab, (0, 2): -c_ac, (1, 2): c_bc}
    return _xp_diagonal_cov(3, xx, pp)


def analytic_cov_final_two_user(params: ProtocolParams) -> np.ndarray:
    """Closed-form 4x4 covariance of (A, B); requires t1 = 1/2."""
    _require_regime(params, balanced=("t1",), equal_etas=False)
    v_s, v_a, v_dis, f_b = params.v_s, params.v_a, params.v_dis, params.f_b
    t2, eta_sb, eta_ab = params.t2, params.eta_sb, params.eta_ab
    var_a = (v_a + v_s + v_dis) / 2.0
    var_b = (
        eta_ab * (1.0 - t2) * (v_a + v_s + v_dis) / 2.0
        + eta_sb * t2 * v_dis * f_b**2
        - math.sqrt(2.0 * eta_sb * eta_ab * t2 * (1.0 - t2)) * v_dis * f_b
        + 1.0 - eta_ab + eta_ab * t2
    )
    c_ab = (
        math.sqrt(eta_ab * (1.0 - t2)) * (v_a - v_s - v_dis)
        + math.sqrt(2.0 * eta_sb * t2) * v_dis * f_b
    ) / 2.0
    xx = {(0, 0): var_a, (1, 1): var_b, (0, 1): c_ab}
    pp = {(0, 0): var_a, (1, 1): var_b, (0, 1): -c_ab}
    return _xp_diagonal_cov(2, xx, pp)


def analytic_cov_three_user(params: ProtocolParams) -> np.ndarray:
    """Closed-form 6x6 covariance of (A, B, D).

    Printed for the balanced symmetric regime: all three beam splitters at
    1/2 and one common efficiency on the four lossy channels.
    """
    _require_regime(params, balanced=("t1", "t2", "t3"), equal_etas=True)
    v_s, v_a, v_dis = params.v_s, params.v_a, params.v_dis
    f_b, f_d, eta = params.f_b, params.f_d, params.eta_sb
    total = v_a + v_s + v_dis
    rt2 = math.sqrt(2.0)
    f_term = eta / 2.0 * (v_dis * f_b**2 - 1.0 - rt2 * v_dis * f_b) + 1.0
    g_term = (
        (4.0 + eta**2 * (v_dis * f_b**2 + rt2 * v_dis * f_b - 1.0)
         + 2.0 * eta * v_dis * f_d**2) / 4.0
        - 2.0 * math.sqrt(eta**3) * v_dis * f_d * (rt2 * f_b + 1.0) / 4.0
    )
    j_term = (2.0 * math.sqrt(eta) * v_dis * f_d - rt2 * eta * v_dis * f_b) / 4.0
    k_term = (
        -math.sqrt(2.0 * eta**3) * (v_dis * f_b**2 + 1.0)
        + rt2 * eta * v_dis * f_d * (rt2 * f_b - 1.0)
    ) / 4.0
    var_a = total / 2.0
    var_b = eta * total / 4.0 + f_term
    var_d = eta**2 * total / 8.0 + g_term
    c_ab = math.sqrt(2.0 * eta) * (v_a - v_s - v_dis + rt2 * v_dis * f_b) / 4.0
    c_ad = eta * (v_a - v_s - v_dis) / 4.0 + j_term
    c_bd = math.sqrt(2.0 * eta**3) * total / 8.0 + k_term
    xx = {(0, 0): var_a, (1, 1): var_b, (2, 2): var_d,
          (0, 1): c_ab, (0, 2): c_ad, (1, 2): c_bd}
    pp = {(0, 0): var_a, (1, 1): var_b, (2, 2): var_d,
          (0, 1): -c_ab, (0, 2): -c_ad, (1, 2): c_bd}
    return _xp_diagonal_cov(3, xx, pp)


def separable_boundary_vsep(params: ProtocolParams) -> float:
    """Minimum displacement variance keeping the relay ancilla separable.

    Below the returned value the ``C1 | A,B0`` split is entangled; above it
    the ancilla is certified separable.  For strong displacement weights the
    boundary becomes unattainable and ``inf`` is returned.
    """
    denom = 2.0 - params.eta_sb * params.f_b**2 * (1.0 - params.v_s)
    if denom <= 0.0:
        return math.inf
    return 2.0 * (1.0 - params.v_s) / denom


def closed_form_steering_two_user(params: ProtocolParams) -> float:
    """Maximal distributed steerability from Alice to Bob.

    Valid when ``f_b`` is set to its optimal value (the formula already has
    the optimum substituted); equals the steering monotone evaluated on the
    pipeline state in that case.
    """
    v_s, v_a, t2, eta_ab = params.v_s, params.v_a, params.t2, params.eta_ab
    s = v_a + v_s
    denom = (1.0 - eta_ab + eta_ab * t2) * s + 2.0 * eta_ab * (1.0 - t2) * v_s * v_a
    return max(0.0, math.log(s / denom))


def closed_form_steering_three_user(params: ProtocolParams) -> tuple[float, float, float]:
    """(G(A->BD), G(A->B), G(A->D)) in the balanced symmetric-loss regime.

    Assumes optimal ``f_b`` and ``f_d``; each entry matches the steering
    monotone on the pipeline state under those coefficients.
    """
    _require_regime(params, balanced=("t1", "t2", "t3"), equal_etas=True)
    v_s, v_a, eta = params.v_s, params.v_a, params.eta_sb
    s = v_a + v_s
    p = v_s * v_a
    g_abd = math.log(4.0 * s / ((4.0 - eta**2 - 2.0 * eta) * s + (4.0 * eta + 2.0 * eta**2) * p))
    g_ab = math.log(2.0 * s / ((2.0 - eta) * s + 2.0 * eta * p))
    g_ad = math.log(4.0 * s / ((4.0 - eta**2) * s + 2.0 * eta**2 * p))
    return max(0.0, g_abd), max(0.0, g_ab), max(0.0, g_ad)


@dataclass(frozen=True)
class ScanResult:
    """A table of per-grid-point results (one dict per row)."""

    columns: tuple[str, ...]
    rows: tuple[dict[str, float], ...]

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise KeyError(f"no column {name!r}; have {self.columns}")
        return np.array([row[name] for row in self.rows])


#: Displacement coefficients and squeezing for the secret-sharing scenario
#: (collective steering toward Alice with -10 dB / +11 dB sources).
QSS_F_B = 0.92
QSS_F_D = 1.70
QSS_V_S = db_to_variance(10.0, "squeezed")
QSS_V_A = db_to_variance(11.0, "antisqueezed")


def qss_params(eta: float = 1.0, eta_sa: float = 1.0) -> ProtocolParams:
    """Three-user parameters for the secret-sharing resource state."""
    return ProtocolParams(
        v_s=QSS_V_S, v_a=QSS_V_A, f_b=QSS_F_B, f_d=QSS_F_D,
        eta_sa=eta_sa, eta_sb=eta, eta_sd=eta, eta_ab=eta, eta_bd=eta,
        users="three",
    )


def qss_scenario(
    etas: Sequence[float],
    eta_sa_follows: bool = False,
    overrides: dict[str, float] | None = None,
) -> ScanResult:
    """Collective-steering scan of the secret-sharing scenario.

    Per grid efficiency: the steerabilities of the (B,D) group and of each
    user alone toward Alice, plus the PPT values certifying that both relay
    ancillas stay separable.  ``eta_sa_follows`` also subjects Alice's
    channel to the grid efficiency; ``overrides`` pins any parameter field
    across the whole grid.
    """
    columns = ("eta", "f_b", "f_d", "G_BD_to_A", "G_B_to_A", "G_D_to_A",
               "ppt_C1_vs_AB0", "ppt_C2_vs_ABD0")
    rows = []
    for eta in etas:
        params = qss_params(eta, eta_sa=eta if eta_sa_follows else 1.0)
        if overrides:
            params = params.replace(**overrides)
        final = build_network_state(params, "final_three_user")
        pre_b = build_network_state(params, "pre_bob")
        pre_d = build_network_state(params, "pre_david")
        rows.append({
            "eta": float(eta),
            "f_b": params.f_b,
            "f_d": params.f_d,
            "G_BD_to_A": steerability(final, Partition((1, 2), (0,))),
            "G_B_to_A": steerability(final, Partition((1,), (0,))),
            "G_D_to_A": steerability(final, Partition((2,), (0,))),
            "ppt_C1_vs_AB0": ppt_min(pre_b, ["C1"]),
            "ppt_C2_vs_ABD0": ppt_min(pre_d, ["C2"]),
        })
    return ScanResult(columns, tuple(rows))
