"""Optimal displacement coefficients and deployment figures of merit.

The analytic formulas give the displacement weights that maximize the
distributed steerability for each network layout; ``numeric_optimize_coefficient``
re-derives them by direct golden-section search on the pipeline state under
the ancilla-separability constraint, serving as an independent check.

Deployment math: the guaranteed secret-key rate extractable from collective
steering and the fiber length corresponding to a channel efficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .criteria import Partition, ppt_min, steerability
from .protocol import ProtocolParams, build_network_state

__all__ = [
    "OptimizationResult",
    "fiber_distance",
    "golden_section_maximize",
    "key_rate",
    "numeric_optimize_coefficient",
    "optimal_fb",
    "optimal_fb_general_loss",
    "optimal_fd",
    "optimal_fd_general_loss",
]

#: Key-rate offset: ln(e/2), kept symbolic as 1 - ln 2.
KEY_RATE_OFFSET = 1.0 - math.log(2.0)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

#: Coarse pre-scan spacing used to bracket the steering window, which is
#: zero-flat outside a finite coefficient interval.
_SCAN_STEP = 0.05


def optimal_fb(t2: float, eta_sb: float, eta_ab: float, v_a: float, v_s: float) -> float:
    """Displacement weight on Bob's mode maximizing the A -> B steerability."""
    if t2 <= 0 or eta_sb <= 0:
        raise ValueError("t2 and eta_sb must be positive")
    return math.sqrt(2.0 * eta_ab * (1.0 - t2)) * v_a / (math.sqrt(eta_sb * t2) * (v_a + v_s))


def optimal_fd(eta: float, v_a: float, v_s: float) -> float:
    """Displacement weight on David's mode maximizing A -> BD steering.

    Balanced beam splitters and one common channel efficiency assumed.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    return 2.0 * math.sqrt(eta) * v_a / (v_a + v_s)


def optimal_fb_general_loss(
    eta_sa: float, eta_sb: float, eta_ab: float, v_a: float, v_s: float
) -> float:
    """Optimal weight on Bob's mode when Alice's channel is lossy too.

    Balanced ``t2`` assumed; reduces to ``optimal_fb`` at ``eta_sa = 1``.
    Derived by maximizing the A -> B steering monotone of the two-user
    output state over the coefficient.
    """
    if eta_sb <= 0:
        raise ValueError("eta_sb must be positive")
    return (
        math.sqrt(2.0 * eta_sa * eta_ab / eta_sb)
        * (1.0 + (v_a - 1.0) * eta_sa)
        / (2.0 + (v_a + v_s - 2.0) * eta_sa)
    )


def optimal_fd_general_loss(eta: float, v_a: float, v_s: float) -> float:
    """Optimal weight on David's mode with every channel (Alice's too) at ``eta``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if eta == 0.0:
        return 0.0
    return math.sqrt(2.0 * eta) * optimal_fb_general_loss(eta, eta, eta, v_a, v_s)


def key_rate(g_bd_to_a: float) -> float:
    """Guaranteed secret-key rate from collective steering toward the dealer."""
    if g_bd_to_a < 0:
        raise ValueError("steerability must be nonnegative")
    return max(0.0, g_bd_to_a - KEY_RATE_OFFSET)


def fiber_distance(eta: float, alpha_db_per_km: float = 0.2) -> float:
    """Fiber length whose transmission is ``eta``, for loss ``alpha`` dB/km."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    if alpha_db_per_km <= 0:
        raise ValueError("fiber loss must be positive")
    return -10.0 * math.log10(eta) / alpha_db_per_km


def golden_section_maximize(
    fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6
) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal function on [lo, hi].

    Returns ``(x_star, fn(x_star))`` with ``x_star`` located to within ``tol``.
    """
    if hi <= lo:
        raise ValueError("need lo < hi")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = lo, hi
    h = b - a
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    yc, yd = fn(c), fn(d)
    while h > tol:
        h *= _INV_PHI
        if yc > yd:
            b, d, yd = d, c, yc
            c = a + _INV_PHI2 * h
            yc = fn(c)
        else:
            a, c, yc = c, d, yd
            d = a + _INV_PHI * h
            yd = fn(d)
    x = (a + b) / 2.0
    return x, fn(x)


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a single-coefficient steering optimization."""

    f_star: float
    g_star: float
    constraint_active: bool
    method: str
    at_boundary: bool = False


_OBJECTIVE_STAGE = {
    "steer_A_to_B": ("final_two_user", Partition((0,), (1,))),
    "steer_A_to_BD": ("final_three_user", Partition((0,), (1, 2))),
    "steer_BD_to_A": ("final_three_user", Partition((1, 2), (0,))),
}


def _ancilla_separable(params: ProtocolParams, stage: str) -> bool:
    """Whether every relay ancilla in flight stays separable from the rest."""
    if ppt_min(build_network_state(params, "pre_bob"), ["C1"]) < 1.0 - 1e-9:
        return False
    if stage == "final_three_user":
        pre_d = build_network_state(params, "pre_david")
        if ppt_min(pre_d, ["C2"]) < 1.0 - 1e-9:
            return False
    return True


def numeric_optimize_coefficient(
    objective: str,
    params: ProtocolParams,
    which: str,
    bounds: tuple[float, float] = (0.0, 4.0),
    tol: float = 1e-6,
    enforce_separability: bool = True,
) -> OptimizationResult:
    """Maximize a steering objective over one displacement coefficient.

    ``objective`` is one of ``steer_A_to_B``, ``steer_A_to_BD`` or
    ``steer_BD_to_A``; ``which`` selects the coefficient (``"f_b"`` or
    ``"f_d"``), the other staying at its value in ``params``.  Candidate
    points that break the ancilla-separability requirement are rejected
    outright when ``enforce_separability`` is set.

    The steering objective is identically zero outside a finite coefficient
    window, so a coarse scan first brackets the window and golden-section
    search then refines inside it.  If no interior maximum exists the best
    boundary point is reported with ``at_boundary`` set.
    """
    if objective not in _OBJECTIVE_STAGE:
        raise ValueError(f"unknown objective {objective!r}")
    if which not in ("f_b", "f_d"):
        raise ValueError(f"which must be 'f_b' or 'f_d', got {which!r}")
    lo, hi = bounds
    if hi <= lo:
        raise ValueError("bounds must satisfy lo < hi")
    stage, partition = _OBJECTIVE_STAGE[objective]
    if stage == "final_three_user" and params.users != "three":
        params = params.replace(users="three")

    def evaluate(x: float) -> float:
        trial = params.replace(**{which: x})
        if enforce_separability and not _ancilla_separable(trial, stage):
            return -math.inf
        return steerability(build_network_state(trial, stage), partition)

    n_scan = max(3, int(math.ceil((hi - lo) / _SCAN_STEP)) + 1)
    xs = [lo + (hi - lo) * k / (n_scan - 1) for k in range(n_scan)]
    ys = [evaluate(x) for x in xs]
    best = max(range(n_scan), key=lambda k: ys[k])
    if not math.isfinite(ys[best]):
        raise ValueError("no feasible point in bounds: separability violated everywhere")

    interior = 0 < best < n_scan - 1
    if not interior:
        x_star, g_star = xs[best], ys[best]
    else:
        a = xs[best - 1]
        b = xs[best + 1]
        x_star, g_star = golden_section_maximize(evaluate, a, b, tol)
        if not math.isfinite(g_star):  # landed on an infeasible edge point
            x_star, g_star = xs[best], ys[best]

    trial = params.replace(**{which: x_star})
    pre_b = build_network_state(trial, "pre_bob")
    margin = ppt_min(pre_b, ["C1"]) - 1.0
    if stage == "final_three_user":
        pre_d = build_network_state(trial, "pre_david")
        margin = min(margin, ppt_min(pre_d, ["C2"]) - 1.0)
    return OptimizationResult(
        f_star=float(x_star),
        g_star=float(g_star),
        constraint_active=bool(enforce_separability and margin < 1e-6),
        method="golden_section",
        at_boundary=not interior,
    )
