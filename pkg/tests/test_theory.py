import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from lucbh.core import UNBOUNDED, build_instance
from lucbh.errors import BestArmQuery, CasePreconditionViolated, DegenerateEpsilon
from lucbh.theory import (
    BEST_ARM_UNBIASED,
    EQUAL_V,
    GAP_CASES,
    alternative_offline_mean,
    binary_relative_entropy,
    bound_report,
    build_impossibility_pair,
    default_impossibility_t_s,
    gap_case,
    gap_term,
    kl_gaussian,
    lower_bound_total,
    reference_complexities,
    sav_l,
    sav_u,
    upper_bound_total,
)

G1_ON = (0.8, 0.4, 0.4, 0.4, 0.4)
V = (0.4, 0.2, 0.2, 0.2, 0.2)


def group1(mu_off=(0.9, 0.2, 0.2, 0.2, 0.2), t_s=200, delta=0.01, v=V):
    return build_instance(5, G1_ON, mu_off, (t_s,) * 5, v, delta)


def test_sav_u_examples():
    assert sav_u(group1(), 1) == pytest.approx(200.0)
    # eta = gap / 4 exactly: V + off - on = 0.1
    inst = build_instance(2, (0.4, 0.0), (0.4, 0.0), (100, 100), (0.0, 0.1), 0.1)
    assert sav_u(inst, 1) == pytest.approx(0.0, abs=1e-12)
    inst = build_instance(2, (0.4, 0.0), (0.4, 0.0), (100, 100), (0.0, 0.05), 0.1)
    assert sav_u(inst, 1) == pytest.approx(50.0)
    assert sav_u(group1(v=(0.4, UNBOUNDED, 0.2, 0.2, 0.2)), 1) == 0.0


def test_sav_l_examples():
    assert sav_l(group1(), 1) == pytest.approx(612.5)
    assert sav_l(group1(mu_off=(0.4, 0.6, 0.6, 0.6, 0.6)), 1) == 0.0
    assert sav_l(group1(mu_off=(0.2, 0.2, 0.2, 0.2, 0.2)), 1) == 0.0


def test_savings_reject_best_arm():
    with pytest.raises(BestArmQuery):
        sav_u(group1(), 0)
    with pytest.raises(BestArmQuery):
        sav_l(group1(), 0)


def test_gap_term_examples():
    # gap 0.4, eta(best) = 0.1, eta(2) = 0.2, T_S = 100, equal V = 0.3
    inst = build_instance(2, (0.4, 0.0), (0.2, -0.1), (100, 100), (0.3, 0.3), 0.1)
    assert gap_term(inst, 1, EQUAL_V) == pytest.approx(156.25)
    zero = build_instance(2, (0.4, 0.0), (0.4, 0.0), (100, 100), (0.0, 0.0), 0.1)
    assert gap_term(zero, 1, EQUAL_V) == 0.0
    assert gap_term(zero, 1, BEST_ARM_UNBIASED) == 0.0


def test_gap_term_preconditions():
    inst = group1()
    with pytest.raises(CasePreconditionViolated):
        gap_term(inst, 1, EQUAL_V)
    with pytest.raises(CasePreconditionViolated):
        gap_term(inst, 1, BEST_ARM_UNBIASED)
    with pytest.raises(ValueError):
        gap_term(inst, 1, "other")
    assert gap_case(inst) is None
    assert gap_case(group1(v=(0.2,) * 5)) == EQUAL_V
    assert gap_case(group1(mu_off=(0.8, 0.2, 0.2, 0.2, 0.2))) == BEST_ARM_UNBIASED


def test_kl_gaussian():
    assert kl_gaussian(0.0, 1.0) == 0.5
    assert kl_gaussian(0.3, 0.3) == 0.0
    assert kl_gaussian(0.8, 0.4) == pytest.approx(0.08)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_kl_gaussian_symmetric(a, b):
    assert kl_gaussian(a, b) == kl_gaussian(b, a) >= 0


def test_binary_relative_entropy():
    assert binary_relative_entropy(0.5, 0.5) == 0.0
    assert binary_relative_entropy(0.0, 0.0) == 0.0
    assert binary_relative_entropy(1.0, 1.0) == 0.0
    assert binary_relative_entropy(0.0, 1.0) == math.inf
    assert binary_relative_entropy(0.3, 0.0) == math.inf
    got = binary_relative_entropy(0.99, 0.01)
    assert got == pytest.approx(float(oracles.binary_relative_entropy(0.99, 0.01)), rel=1e-12)
    assert got == pytest.approx(4.503, abs=5e-4)
    assert math.log(1 / 0.024) == pytest.approx(3.730, abs=5e-4)
    with pytest.raises(ValueError):
        binary_relative_entropy(1.5, 0.5)


@pytest.mark.parametrize("delta", [j / 1000 for j in range(1, 151)])
def test_pac_entropy_inequality(delta):
    assert binary_relative_entropy(1 - delta, delta) >= math.log(1 / (2.4 * delta))


def test_lower_bound_total_examples():
    got = lower_bound_total(group1(t_s=0))
    want = oracles.lower_bound_total(G1_ON, (0.9, 0.2, 0.2, 0.2, 0.2), (0,) * 5, 0.01)
    assert got == pytest.approx(float(want), rel=1e-12)
    assert got == pytest.approx(186.5, abs=0.05)
    assert lower_bound_total(group1(t_s=10**4)) == 0.0
    assert lower_bound_total(group1(t_s=0, delta=1 / 2.4)) == pytest.approx(0.0, abs=1e-9)


def test_upper_bound_total_examples():
    got = upper_bound_total(group1(t_s=0))
    assert got / 4 == pytest.approx(200 * math.log(500), rel=1e-13)
    assert got / 4 == pytest.approx(1242.9, abs=0.05)
    # sav_u exactly equal to the log term
    need = 32 / 0.16 * math.log(2 / 0.1)
    inst = build_instance(2, (0.4, 0.0), (0.4, 0.0), (1, 1), (0.0, 0.0), 0.1)
    assert upper_bound_total(inst.replace(t_s=(0, 0))) == pytest.approx(need)
    wide = build_instance(2, (0.2, 0.0), (0.2, 0.0), (0, 0), (0.0, 0.0), 0.1)
    assert upper_bound_total(wide) == pytest.approx(4 * need)


def test_reference_complexities():
    lucb, batch = reference_complexities(group1(t_s=0))
    assert lucb == pytest.approx(4 / 0.16 * math.log(100))
    assert lucb == pytest.approx(115.1, abs=0.05)
    assert batch == lucb
    _, batch = reference_complexities(group1(t_s=29))
    assert batch == 0.0


def test_bound_report_rows():
    report = bound_report(group1())
    assert report.arms[0].sav_u is None and report.arms[0].gap == 0.0
    assert report.arms[1].sav_u == pytest.approx(200.0)
    assert report.arms[1].sav_l == pytest.approx(612.5)
    assert report.gap_case is None and report.arms[1].gap_term is None
    doc = report.to_dict()
    assert doc["gap_case"] == "UNDEFINED" and doc["arms"][1]["gap_term"] == "UNDEFINED"
    assert "constants" in doc
    flat = bound_report(group1(t_s=0))
    assert all(row.sav_u == 0.0 and row.sav_l == 0.0 for row in flat.arms[1:])


def test_impossibility_pair():
    pair = build_impossibility_pair(0.5, 0.1, 1.0, 0.1, 20)
    p, q = pair.instance_p, pair.instance_q
    assert p.mu_on == p.mu_off == (0.0, -(0.1**0.5))
    assert p.best_arm == 0 and q.best_arm == 1
    assert q.mu_on == (0.0, 0.1**0.5) and q.mu_off[0] == 0.0
    assert q.mu_off[1] == pytest.approx(-22.44, abs=1e-2)
    assert q.mu_off[1] == pytest.approx(float(oracles.alternative_offline_mean(0.5, 0.1, 1, 0.1)), rel=1e-12)
    assert p.t_s == q.t_s == (20, 20) and p.delta == q.delta


def test_impossibility_errors():
    with pytest.raises(DegenerateEpsilon):
        alternative_offline_mean(0.5, 1e-20, 1.0, 0.5)
    with pytest.raises(ValueError):
        build_impossibility_pair(0.0, 0.1, 1.0, 0.1, 10)
    with pytest.raises(ValueError):
        build_impossibility_pair(0.5, 0.1, 1.0, 1.5, 10)


def test_default_impossibility_t_s():
    need = 4 * (0.1**-1.0 - 0.1**-0.9) * math.log(10)
    assert default_impossibility_t_s(0.5, 0.1, 0.1) == math.ceil(need)


def random_instance(rng: random.Random, case: str):
    k = rng.randint(2, 6)
    mu_on = [rng.uniform(-1, 1) for _ in range(k)]
    best = max(range(k), key=mu_on.__getitem__)
    if case == EQUAL_V:
        v = [rng.uniform(0, 1)] * k
    else:
        v = [rng.uniform(0, 1) for _ in range(k)]
    mu_off = [m + rng.uniform(-1, 1) * b for m, b in zip(mu_on, v)]
    if case == BEST_ARM_UNBIASED:
        mu_off[best] = mu_on[best]
    t_s = [rng.randint(0, 1000) for _ in range(k)]
    return build_instance(k, mu_on, mu_off, t_s, v, rng.uniform(0.001, 0.3))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(GAP_CASES))
def test_savings_nonnegative_and_gap_term_identity(seed, case):
    inst = random_instance(random.Random(seed), case)
    for i in range(inst.k):
        if i == inst.best_arm:
            continue
        su, sl, gt = sav_u(inst, i), sav_l(inst, i), gap_term(inst, i, case)
        assert su >= 0 and sl >= 0 and gt >= -1e-9
        want = oracles.sav_l(inst.mu_on, inst.mu_off, inst.t_s, i) - oracles.sav_u(
            inst.mu_on, inst.mu_off, inst.t_s, inst.v, i
        )
        unclamped = oracles.sav_u(inst.mu_on, inst.mu_off, inst.t_s, inst.v, i) > 0 or inst.t_s[i] == 0
        lead = inst.mu_off[inst.best_arm] - inst.mu_off[i]
        if unclamped and lead >= 0:
            assert abs(gt - float(want)) <= 1e-9 * max(1.0, abs(float(want)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 2000), st.integers(1, 2000), st.floats(0.0, 0.099))
def test_sav_u_monotone_in_t_s(a, b, e):
    low, high = sorted((a, b))
    inst = build_instance(2, (0.4, 0.0), (0.4, 0.0), (0, low), (0.0, e), 0.1)
    assert sav_u(inst, 1) <= sav_u(inst.replace(t_s=(0, high)), 1)
