"""Memory-size bound formulas: the two prior lower bounds, the type-chain
lower bound, the port-based-teleportation upper bound, and the ε-net upper
bound, plus the accuracy floor for polynomially sized memories.

Universal constants the literature leaves symbolic are user parameters: K
defaults to 1 and the net covering constant to 9 (flagged as non-paper
defaults in every output); the type constant C defaults to 4.  Logarithms are
base 2 throughout.  Every formula is evaluated in log₂ space first so large
inputs degrade to log-only output instead of overflowing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .banach import DEFAULT_TYPE_CONSTANT, theorem3_memory_lower_bound

DEFAULT_K = 1.0
DEFAULT_NET_CONSTANT = 9.0

# 2^x overflows float64 just above this
_LOG2_FLOAT_MAX = 1024.0


@dataclass(frozen=True)
class BoundConstants:
    k_perez: float = DEFAULT_K
    k_majenz: float = DEFAULT_K
    type_constant: float = DEFAULT_TYPE_CONSTANT
    net_constant: float = DEFAULT_NET_CONSTANT
    thm3_unitary: bool = False

    def as_dict(self) -> dict:
        return {
            "K_perez": self.k_perez,
            "K_majenz": self.k_majenz,
            "C_type": self.type_constant,
            "C_net": self.net_constant,
            "thm3_unitary": self.thm3_unitary,
            "note": "K and C_net are non-paper defaults; the source leaves them symbolic",
        }


@dataclass(frozen=True)
class BoundsRow:
    d: int
    epsilon: float
    lb_perez: float
    lb_majenz: float
    lb_thm3: float
    ub_pbt: float
    ub_net: float
    log2_lb_perez: float
    log2_lb_majenz: float
    log2_lb_thm3: float
    log2_ub_pbt: float
    log2_ub_net: float
    thm3_clamped: bool
    log_only: bool
    constants: BoundConstants = field(default=BoundConstants())


def _from_log2(log2_value: float) -> tuple[float, bool]:
    """(linear value, overflowed) from a log₂ value."""
    if not np.isfinite(log2_value):
        return float("inf"), True
    if log2_value > _LOG2_FLOAT_MAX:
        return float("inf"), True
    return float(2.0**log2_value), False


def bounds_row(d: int, epsilon: float, constants: BoundConstants = BoundConstants()) -> BoundsRow:
    if d < 2:
        raise ValueError("bounds need d >= 2")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("bounds need 0 <= epsilon < 1")
    log2d = np.log2(d)
    log2eps = np.log2(epsilon) if epsilon > 0 else -np.inf

    log2_perez = np.log2(constants.k_perez) - (d + 1) / 2.0 * log2d - (d - 1) / 2.0 * log2eps
    log2_majenz = np.log2(constants.k_majenz) + 2.0 * (log2d - log2eps)
    _, log2_thm3_raw = theorem3_memory_lower_bound(
        d, epsilon, constants.type_constant, unitary=constants.thm3_unitary
    )
    # theorem3_memory_lower_bound already clamps at 1; recompute raw for the flag
    if constants.thm3_unitary:
        raw = (1.0 - epsilon) * d / constants.type_constant
    else:
        raw = (1.0 - epsilon) * d / (3.0 * constants.type_constant) - (2.0 / 3.0) * log2d
    thm3_clamped = raw < 0.0
    log2_thm3 = max(raw, 0.0)
    log2_pbt = 4.0 * d * d * log2d / (epsilon * epsilon) if epsilon > 0 else np.inf
    log2_net = d * d * (np.log2(constants.net_constant) - log2eps)

    lb_perez, of1 = _from_log2(log2_perez)
    lb_majenz, of2 = _from_log2(log2_majenz)
    lb_thm3, of3 = _from_log2(log2_thm3)
    ub_pbt, of4 = _from_log2(log2_pbt)
    ub_net, of5 = _from_log2(log2_net)

    return BoundsRow(
        d=d,
        epsilon=float(epsilon),
        lb_perez=lb_perez,
        lb_majenz=lb_majenz,
        lb_thm3=lb_thm3,
        ub_pbt=ub_pbt,
        ub_net=ub_net,
        log2_lb_perez=float(log2_perez),
        log2_lb_majenz=float(log2_majenz),
        log2_lb_thm3=float(log2_thm3),
        log2_ub_pbt=float(log2_pbt),
        log2_ub_net=float(log2_net),
        thm3_clamped=thm3_clamped,
        log_only=any([of1, of2, of3, of4, of5]),
        constants=constants,
    )


def bounds_table(d_values, eps_values, constants: BoundConstants = BoundConstants()) -> list[BoundsRow]:
    d_values = list(d_values)
    eps_values = list(eps_values)
    if not d_values or not eps_values:
        raise ValueError("ranges must be nonempty")
    return [bounds_row(d, eps, constants) for d in d_values for eps in eps_values]


@dataclass(frozen=True)
class CorollaryFloor:
    value: float
    c_prime: float
    clamped: bool
    d: int
    k: float
    s: float
    type_constant: float


def corollary_epsilon_floor(
    d: int, k: float = 1.0, s: float = 0.0, type_constant: float = DEFAULT_TYPE_CONSTANT
) -> CorollaryFloor:
    """Accuracy floor ε ≥ 1 − C'·log₂(d)/d for memories of size ≤ k·d^s,
    with C' = 3C(s + log₂ k + 2/3); clamped below at zero."""
    if d < 2:
        raise ValueError("floor needs d >= 2")
    if k < 1.0 or s < 0.0:
        raise ValueError("need k >= 1 and s >= 0")
    c_prime = 3.0 * type_constant * (s + np.log2(k) + 2.0 / 3.0)
    raw = 1.0 - c_prime * np.log2(d) / d
    return CorollaryFloor(
        value=float(max(raw, 0.0)),
        c_prime=float(c_prime),
        clamped=raw < 0.0,
        d=d,
        k=float(k),
        s=float(s),
        type_constant=float(type_constant),
    )
