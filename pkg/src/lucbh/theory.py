"""Closed-form sample-complexity quantities.

Every total here is a *unit-constant* reference value: the asymptotic
statements they come from hide constants, so these are not calibrated
predictions of mean stopping time.  The upper bound uses the explicit
``32 / gap^2 * ln(k / delta)`` per-arm threshold and the lower bound the
explicit ``ln(1 / (2.4 delta)) / KL`` term; both clamp each arm at zero.
All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

from lucbh.core import Instance, build_instance, gap_profile, is_unbounded
from lucbh.errors import BestArmQuery, CasePreconditionViolated, DegenerateEpsilon

EQUAL_V = "equal_v"
BEST_ARM_UNBIASED = "best_arm_unbiased"
GAP_CASES = (EQUAL_V, BEST_ARM_UNBIASED)


def _suboptimal_gap(inst: Instance, i: int) -> float:
    gap = gap_profile(inst).delta_i[i]
    if gap <= 0:
        raise BestArmQuery(f"arm {i} is the best arm; its gap is zero")
    return gap


def sav_u(inst: Instance, i: int) -> float:
    """Saving in the LUCB-H upper bound: ``T_S * max(1 - 4 eta / gap, 0)``."""
    gap = _suboptimal_gap(inst, i)
    if is_unbounded(inst.v[i]):
        return 0.0
    eta = gap_profile(inst).eta[i]
    return inst.t_s[i] * max(1.0 - 4.0 * eta / gap, 0.0)


def sav_l(inst: Instance, i: int) -> float:
    """Saving in the lower bound: ``T_S * max((mu_off[best] - mu_off[i]) / gap, 0)^2``."""
    gap = _suboptimal_gap(inst, i)
    lead = inst.mu_off[inst.best_arm] - inst.mu_off[i]
    return inst.t_s[i] * max(lead / gap, 0.0) ** 2


def gap_case(inst: Instance) -> str | None:
    """Which closed form for ``sav_l - sav_u`` applies, if any."""
    if not any(is_unbounded(x) for x in inst.v) and len(set(inst.v)) == 1:
        return EQUAL_V
    best = inst.best_arm
    if inst.mu_on[best] == inst.mu_off[best] and not is_unbounded(inst.v[best]):
        return BEST_ARM_UNBIASED
    return None


def gap_term(inst: Instance, i: int, case: str) -> float:
    """Closed form of ``sav_l(i) - sav_u(i)`` under one of two special cases.

    ``equal_v``: all bias bounds equal.  ``best_arm_unbiased``: the best arm's
    offline and online means coincide.  The identity with the savings holds
    when neither saving is clamped at zero.
    """
    if case not in GAP_CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {GAP_CASES}")
    gap = _suboptimal_gap(inst, i)
    best = inst.best_arm
    if any(is_unbounded(x) for x in (inst.v[i], inst.v[best])):
        raise CasePreconditionViolated("gap term needs finite bias bounds")
    eta = gap_profile(inst).eta
    if case == EQUAL_V:
        if len(set(inst.v)) != 1:
            raise CasePreconditionViolated("equal_v requires every V(i) to be equal")
        other = eta[best]
    else:
        if inst.mu_on[best] != inst.mu_off[best]:
            raise CasePreconditionViolated("best_arm_unbiased requires mu_on = mu_off on the best arm")
        other = inst.v[i]
    return ((eta[i] - other) ** 2 / gap**2 + 2.0 * (eta[i] + other) / gap) * inst.t_s[i]


def kl_gaussian(mu1: float, mu2: float) -> float:
    """KL divergence between N(mu1, 1) and N(mu2, 1)."""
    return (mu1 - mu2) ** 2 / 2.0


def binary_relative_entropy(p: float, q: float) -> float:
    """``d(p, q)``, the KL divergence between Bernoulli(p) and Bernoulli(q)."""
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError(f"d(p, q) needs p, q in [0, 1], got ({p}, {q})")
    total = 0.0
    for a, b in ((p, q), (1.0 - p, 1.0 - q)):
        if a == 0.0:
            continue
        if b == 0.0:
            return math.inf
        total += a * math.log(a / b)
    return max(total, 0.0)


def _suboptimal(inst: Instance) -> list[int]:
    best = inst.best_arm
    return [i for i in range(inst.k) if i != best]


def lower_bound_total(inst: Instance) -> float:
    best = inst.mu_on[inst.best_arm]
    log_term = math.log(1.0 / (2.4 * inst.delta))
    return sum(
        max(log_term / kl_gaussian(inst.mu_on[i], best) - sav_l(inst, i), 0.0)
        for i in _suboptimal(inst)
    )


def upper_bound_total(inst: Instance) -> float:
    gaps = gap_profile(inst).delta_i
    log_term = math.log(inst.k / inst.delta)
    return sum(
        max(32.0 / gaps[i] ** 2 * log_term - sav_u(inst, i), 0.0)
        for i in _suboptimal(inst)
    )


def reference_complexities(inst: Instance) -> tuple[float, float]:
    """Online-only and equal-distribution batch reference sums (unit constants)."""
    gaps = gap_profile(inst).delta_i
    log_term = math.log(1.0 / inst.delta)
    online_only = 0.0
    batch = 0.0
    for i in _suboptimal(inst):
        term = log_term / gaps[i] ** 2
        online_only += term
        batch += max(term - inst.t_s[i], 0.0)
    return online_only, batch


@dataclass(frozen=True)
class ArmBounds:
    arm: int
    gap: float
    eta: float | None
    sav_u: float | None
    sav_l: float | None
    gap_term: float | None


@dataclass(frozen=True)
class BoundReport:
    arms: tuple[ArmBounds, ...]
    gap_case: str | None
    upper_bound_total: float
    lower_bound_total: float
    lucb_reference: float
    batch_ts_reference: float

    def to_dict(self) -> dict[str, Any]:
        doc = asdict(self)
        doc["constants"] = "unit-constant reference values, not calibrated predictions"
        for row in doc["arms"]:
            for key, value in row.items():
                if value is None:
                    row[key] = "UNDEFINED"
                elif isinstance(value, float) and math.isinf(value):
                    row[key] = "inf"
        if doc["gap_case"] is None:
            doc["gap_case"] = "UNDEFINED"
        return doc


def bound_report(inst: Instance) -> BoundReport:
    prof = gap_profile(inst)
    case = gap_case(inst)
    best = inst.best_arm
    rows = []
    for i in range(inst.k):
        eta = prof.eta[i]
        if i == best:
            rows.append(ArmBounds(i, 0.0, eta, None, None, None))
            continue
        term = None
        if case is not None:
            try:
                term = gap_term(inst, i, case)
            except CasePreconditionViolated:
                term = None
        rows.append(ArmBounds(i, prof.delta_i[i], eta, sav_u(inst, i), sav_l(inst, i), term))
    online_only, batch = reference_complexities(inst)
    return BoundReport(
        arms=tuple(rows),
        gap_case=case,
        upper_bound_total=upper_bound_total(inst),
        lower_bound_total=lower_bound_total(inst),
        lucb_reference=online_only,
        batch_ts_reference=batch,
    )


@dataclass(frozen=True)
class ImpossibilityPair:
    beta: float
    epsilon: float
    c: float
    delta: float
    instance_p: Instance
    instance_q: Instance


def alternative_offline_mean(beta: float, epsilon: float, c: float, delta: float) -> float:
    """Offline mean of arm 2 in the alternative instance (mean of Q_2^off)."""
    if delta**epsilon == 1.0:
        raise DegenerateEpsilon(f"delta**epsilon rounds to 1 (delta={delta}, epsilon={epsilon})")
    one_minus = -math.expm1(epsilon * math.log(delta))
    return -math.sqrt(8.0 * delta ** (-2.0 * beta - epsilon) / (c * one_minus)) - delta**beta


def default_impossibility_t_s(beta: float, epsilon: float, delta: float) -> int:
    """Smallest T_S with ``T_S >= 4 (delta^-2b - delta^(-2b+e)) ln(1/delta)``."""
    need = 4.0 * (delta ** (-2 * beta) - delta ** (-2 * beta + epsilon)) * math.log(1.0 / delta)
    return max(int(math.ceil(need)), 0)


def build_impossibility_pair(
    beta: float,
    epsilon: float,
    c: float,
    delta: float,
    t_s: int | tuple[int, int],
    v: tuple[float, float] = (0.0, 0.0),
) -> ImpossibilityPair:
    """Two-arm instances that no bias-agnostic policy can handle well at once.

    In ``instance_p`` offline and online coincide and arm 0 is best by
    ``delta**beta``.  ``instance_q`` flips arm 1's online mean to
    ``+delta**beta`` (arm 1 becomes best) while its offline mean is pushed far
    below, so offline data that helps on P misleads on Q.  ``v`` is the bias
    bound attached to both instances (the policy's input, not a property of
    the distributions).
    """
    if not (beta > 0 and epsilon > 0 and c > 0):
        raise ValueError("beta, epsilon and c must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    counts = (t_s, t_s) if isinstance(t_s, int) else tuple(t_s)
    shift = delta**beta
    q_off = alternative_offline_mean(beta, epsilon, c, delta)
    inst_p = build_instance(2, (0.0, -shift), (0.0, -shift), counts, v, delta)
    inst_q = build_instance(2, (0.0, shift), (0.0, q_off), counts, v, delta)
    return ImpossibilityPair(beta, epsilon, c, delta, inst_p, inst_q)
