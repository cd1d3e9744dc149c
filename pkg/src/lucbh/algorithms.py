"""Pure LUCB and LUCB-H for fixed-confidence best-arm identification.

Both policies share one loop.  After one pull per arm, every round

1. builds online bounds ``Y_t(i) -/+ sqrt(2 log(k t / delta) / N_t(i))`` and,
   for LUCB-H, history bounds around the pooled mean
   ``(N Y + T_S X) / (N + T_S)`` with radius
   ``sqrt(2 log(k t / delta) / (N + T_S)) + T_S / (N + T_S) * V``;
2. mixes them (max of lower bounds, min of upper bounds);
3. picks ``h`` = argmax UCB_mix and ``l`` = argmax UCB_mix over the others
   (ties to the lowest index);
4. stops if ``LCB_mix(h) >= UCB_mix(l)``, recommending ``h``; otherwise
   pulls ``h`` and ``l`` and moves to round ``t + 1``.

``t`` counts rounds and starts at ``k + 1``; ``tau`` counts samples.

Two engines run the loop: a numba-compiled kernel (the default, used by the
harness) and a plain-Python reference that exposes every round to an
``on_round`` callback.  Both call the same scalar bound functions and give
bit-identical results.

``log_base`` sets the logarithm inside the radius.  The default is the
natural log.  The experiment presets use base 10 (see the README).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numba import njit

from lucbh.core import AlgorithmState, Instance, OfflineSummary
from lucbh.sampling import OnlineRewards, TrialRng

#: Default sample cap; hitting it marks the run as truncated.
DEFAULT_BUDGET = 10**7

_STOPPED = 0
_TRUNCATED = 1
_REFILL = 2


def log_scale_for(log_base: float) -> float:
    """Factor turning ``ln(x)`` into ``log_base(x)``."""
    if log_base == math.e:
        return 1.0
    if not log_base > 1.0:
        raise ValueError(f"log base must exceed 1, got {log_base}")
    return 1.0 / math.log(log_base)


@njit(cache=True)
def confidence_log(k, t, delta, log_scale):
    return math.log(k * t / delta) * log_scale


@njit(cache=True)
def online_pair(y_hat, n, lg):
    r = math.sqrt(2.0 * lg / n)
    return y_hat - r, y_hat + r


@njit(cache=True)
def history_pair(y_hat, n, x_hat, t_s, v, lg):
    if v == math.inf:
        return -math.inf, math.inf
    if t_s == 0:
        return online_pair(y_hat, n, lg)
    total = n + t_s
    pooled = (n * y_hat + t_s * x_hat) / total
    r = math.sqrt(2.0 * lg / total) + t_s / total * v
    return pooled - r, pooled + r


@dataclass(frozen=True)
class BoundSet:
    lcb_on: tuple[float, ...]
    ucb_on: tuple[float, ...]
    lcb_s: tuple[float, ...]
    ucb_s: tuple[float, ...]
    lcb_mix: tuple[float, ...]
    ucb_mix: tuple[float, ...]


@dataclass(frozen=True)
class Selection:
    h: int
    l: int


@dataclass(frozen=True)
class RunResult:
    """Outcome of one trial.

    ``rounds`` counts pulling rounds, so ``tau == k + 2 * rounds`` and
    ``sum(pulls) == tau``.  ``truncated`` runs hit the sample budget before
    the stopping rule fired; their recommendation is the current ``h``.
    """

    tau: int
    pulls: tuple[int, ...]
    recommended: int
    correct: bool
    rounds: int
    truncated: bool


@dataclass(frozen=True)
class RoundRecord:
    t: int
    tau: int
    n: tuple[int, ...]
    y_hat: tuple[float, ...]
    bounds: BoundSet
    selection: Selection
    stop: bool


RoundCallback = Callable[[RoundRecord], None]


def online_bounds(
    state: AlgorithmState, i: int, k: int, delta: float, log_base: float = math.e
) -> tuple[float, float]:
    lg = confidence_log(k, state.t, delta, log_scale_for(log_base))
    return online_pair(state.y_hat[i], state.n[i], lg)


def history_bounds(
    state: AlgorithmState,
    off: OfflineSummary,
    inst: Instance,
    i: int,
    log_base: float = math.e,
) -> tuple[float, float]:
    """Bounds around the pooled online/offline mean, widened by the bias term.

    An UNBOUNDED ``V(i)`` yields ``(-inf, inf)`` so mixing keeps the online
    bounds; ``T_S(i) == 0`` yields exactly the online bounds.
    """
    lg = confidence_log(inst.k, state.t, inst.delta, log_scale_for(log_base))
    return history_pair(state.y_hat[i], state.n[i], off.x_hat[i], off.t_s[i], inst.v[i], lg)


def mix_bounds(
    online: Sequence[tuple[float, float]], history: Sequence[tuple[float, float]]
) -> BoundSet:
    lcb_on, ucb_on = zip(*online)
    lcb_s, ucb_s = zip(*history)
    # crossed intervals (lcb_mix > ucb_mix) can occur under an invalid V; keep them
    return BoundSet(
        lcb_on=lcb_on,
        ucb_on=ucb_on,
        lcb_s=lcb_s,
        ucb_s=ucb_s,
        lcb_mix=tuple(max(a, b) for a, b in zip(lcb_on, lcb_s)),
        ucb_mix=tuple(min(a, b) for a, b in zip(ucb_on, ucb_s)),
    )


def select(bounds: BoundSet) -> Selection:
    ucb = bounds.ucb_mix
    if len(ucb) < 2:
        raise ValueError("selection needs at least two arms")
    h = max(range(len(ucb)), key=ucb.__getitem__)
    l = max((i for i in range(len(ucb)) if i != h), key=ucb.__getitem__)
    return Selection(h=h, l=l)


def should_stop(bounds: BoundSet, sel: Selection) -> bool:
    return bounds.lcb_mix[sel.h] >= bounds.ucb_mix[sel.l]


def round_bounds(
    state: AlgorithmState,
    inst: Instance,
    off: OfflineSummary | None,
    log_base: float = math.e,
) -> BoundSet:
    """All arms' bounds for the current round; ``off=None`` means online only."""
    online = [online_bounds(state, i, inst.k, inst.delta, log_base) for i in range(inst.k)]
    if off is None:
        history = online
    else:
        history = [history_bounds(state, off, inst, i, log_base) for i in range(inst.k)]
    return mix_bounds(online, history)


@njit(cache=True)
def _advance(mu_on, x_hat, t_s, v, use_history, delta, log_scale,
             noise, pos, n, y_hat, ctr, budget):
    # ctr = [t, tau, rounds, arm]; arm is the recommendation or the arm to refill
    k = mu_on.shape[0]
    block = noise.shape[1]
    lcb = np.empty(k)
    ucb = np.empty(k)
    while True:
        lg = confidence_log(k, ctr[0], delta, log_scale)
        for i in range(k):
            lo, up = online_pair(y_hat[i], n[i], lg)
            if use_history:
                lo_s, up_s = history_pair(y_hat[i], n[i], x_hat[i], t_s[i], v[i], lg)
                lo = max(lo, lo_s)
                up = min(up, up_s)
            lcb[i] = lo
            ucb[i] = up
        h = 0
        for i in range(1, k):
            if ucb[i] > ucb[h]:
                h = i
        l = 1 if h == 0 else 0
        for i in range(l + 1, k):
            if i != h and ucb[i] > ucb[l]:
                l = i
        ctr[3] = h
        if lcb[h] >= ucb[l]:
            return _STOPPED
        if ctr[1] + 2 > budget:
            return _TRUNCATED
        if pos[h] == block:
            return _REFILL
        if pos[l] == block:
            ctr[3] = l
            return _REFILL
        for arm in (h, l):
            reward = mu_on[arm] + noise[arm, pos[arm]]
            pos[arm] += 1
            y_hat[arm] = (n[arm] * y_hat[arm] + reward) / (n[arm] + 1)
            n[arm] += 1
        ctr[0] += 1
        ctr[1] += 2
        ctr[2] += 1


def _initial_state(inst: Instance, rewards: OnlineRewards) -> AlgorithmState:
    state = AlgorithmState.empty(inst.k)
    for arm in range(inst.k):
        state.record(arm, rewards.draw(arm))
    state.t = inst.k + 1
    return state


def _run_compiled(inst, off, rewards, state, budget, log_scale):
    k = inst.k
    x_hat = np.asarray(off.x_hat if off else [0.0] * k, dtype=np.float64)
    t_s = np.asarray(off.t_s if off else [0] * k, dtype=np.int64)
    n = np.asarray(state.n, dtype=np.int64)
    y_hat = np.asarray(state.y_hat, dtype=np.float64)
    ctr = np.array([state.t, k, 0, -1], dtype=np.int64)
    args = (
        np.asarray(inst.mu_on, dtype=np.float64), x_hat, t_s,
        np.asarray(inst.v, dtype=np.float64), off is not None,
        float(inst.delta), float(log_scale),
    )
    while True:
        status = _advance(*args, rewards.noise, rewards.pos, n, y_hat, ctr, budget)
        if status != _REFILL:
            break
        rewards.refill(int(ctr[3]))
    return int(ctr[1]), tuple(int(c) for c in n), int(ctr[3]), int(ctr[2]), status == _TRUNCATED


def _run_python(inst, off, rewards, state, budget, log_base, on_round):
    tau, rounds = inst.k, 0
    while True:
        bounds = round_bounds(state, inst, off, log_base)
        sel = select(bounds)
        stop = should_stop(bounds, sel)
        if on_round is not None:
            on_round(RoundRecord(state.t, tau, tuple(state.n), tuple(state.y_hat), bounds, sel, stop))
        if stop:
            return tau, tuple(state.n), sel.h, rounds, False
        if tau + 2 > budget:
            return tau, tuple(state.n), sel.h, rounds, True
        for arm in (sel.h, sel.l):
            state.record(arm, rewards.draw(arm))
        state.t += 1
        tau += 2
        rounds += 1


def _run(inst, off, rng, budget, log_base, engine, on_round) -> RunResult:
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget}")
    if engine not in ("compiled", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    if on_round is not None:
        engine = "python"
    log_scale = log_scale_for(log_base)
    rewards = OnlineRewards(inst.mu_on, rng)
    state = _initial_state(inst, rewards)
    if engine == "compiled":
        tau, pulls, rec, rounds, truncated = _run_compiled(inst, off, rewards, state, budget, log_scale)
    else:
        tau, pulls, rec, rounds, truncated = _run_python(inst, off, rewards, state, budget, log_base, on_round)
    return RunResult(
        tau=tau,
        pulls=pulls,
        recommended=rec,
        correct=rec == inst.best_arm,
        rounds=rounds,
        truncated=truncated,
    )


def run_lucb_h(
    inst: Instance,
    off: OfflineSummary,
    rng: TrialRng,
    budget: int = DEFAULT_BUDGET,
    *,
    log_base: float = math.e,
    engine: str = "compiled",
    on_round: RoundCallback | None = None,
) -> RunResult:
    """Run LUCB-H on ``inst`` with the warm-start data summarised in ``off``.

    Args:
        inst: problem instance; its ``v`` is the bias bound handed to the policy.
        off: offline counts and means, typically from ``generate_offline``.
        rng: the trial's random streams (online rewards are drawn per arm).
        budget: maximum number of online samples before truncation.
        log_base: base of the logarithm in the confidence radius.
        engine: ``"compiled"`` or ``"python"``; a callback forces the latter.
        on_round: called once per round, before the stopping check acts.
    """
    return _run(inst, off, rng, budget, log_base, engine, on_round)


def run_pure_lucb(
    inst: Instance,
    rng: TrialRng,
    budget: int = DEFAULT_BUDGET,
    *,
    log_base: float = math.e,
    engine: str = "compiled",
    on_round: RoundCallback | None = None,
) -> RunResult:
    """LUCB on online data only; the instance's offline fields are ignored."""
    return _run(inst, None, rng, budget, log_base, engine, on_round)
