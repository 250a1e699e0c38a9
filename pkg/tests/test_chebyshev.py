import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qseq.chebyshev import (
    ChebEval,
    ChebKind,
    alternating_sine_sums,
    cheb,
    cheb_t,
    cheb_u,
    cheb_values,
    identity_residuals,
    largest_root_t,
    largest_root_u,
    tau,
)
from qseq.errors import DomainError

orders = st.integers(min_value=-80, max_value=80)
arguments = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)


def test_small_values():
    assert cheb_t(0, 0.3) == 1.0
    assert cheb_t(1, 0.3) == 0.3
    assert cheb_t(2, 2.0) == 7.0
    assert cheb_t(-3, 0.4) == cheb_t(3, 0.4)
    assert cheb_u(-1, 0.7) == 0.0
    assert cheb_u(1, 0.5) == 1.0
    assert cheb_u(-4, 0.2) == -cheb_u(2, 0.2)
    assert cheb_u(3, 1.0) == 4.0


def test_limit_values_beyond_recurrence():
    assert cheb_u(100, 1.0) == 101.0
    assert cheb_u(101, -1.0) == -102.0
    assert cheb_u(100, -1.0) == 101.0
    assert cheb_t(100, 1.0) == pytest.approx(1.0)
    assert cheb_t(101, -1.0) == pytest.approx(-1.0)
    # one ulp inside +-1 the sine quotient takes over and stays close to the limits
    assert cheb_u(100, math.nextafter(1.0, 0.0)) == pytest.approx(101.0, rel=1e-9)
    assert cheb_u(101, math.nextafter(-1.0, 0.0)) == pytest.approx(-102.0, rel=1e-6)


@pytest.mark.parametrize("x", [math.nan, math.inf, -math.inf])
def test_non_finite_argument(x):
    with pytest.raises(DomainError):
        cheb_t(2, x)
    with pytest.raises(DomainError):
        cheb_u(2, x)
    with pytest.raises(DomainError):
        ChebEval(ChebKind.FIRST, 1, x)


@given(orders, arguments)
@settings(max_examples=300)
def test_reflection_is_exact(k, x):
    assert cheb_t(-k, x) == cheb_t(k, x)
    assert cheb_u(-k, x) == -cheb_u(k - 2, x)


@pytest.mark.parametrize("fn", [cheb_t, cheb_u])
def test_recurrence_consistency(fn, rng):
    for x in rng.uniform(-3.0, 3.0, 200):
        for k in range(-20, 21):
            nxt = fn(k + 1, x)
            assert abs(nxt - (2.0 * x * fn(k, x) - fn(k - 1, x))) <= 1e-9 * max(1.0, abs(nxt))


@given(st.floats(min_value=1e-3, max_value=math.pi - 1e-3), st.integers(min_value=0, max_value=200))
@settings(max_examples=300)
def test_closed_forms_on_unit_interval(u, k):
    x = math.cos(u)
    assert abs(cheb_t(k, x) - math.cos(k * u)) <= 1e-10
    assert abs(cheb_u(k, x) * math.sin(u) - math.sin((k + 1) * u)) <= 1e-10


@pytest.mark.parametrize("k", [60, 64, 65, 70])
@pytest.mark.parametrize("x", [-1.7, -0.4, 0.25, 1.3])
def test_recurrence_and_closed_form_agree_at_the_switch(k, x):
    values_t = cheb_values(ChebKind.FIRST, k, x)
    values_u = cheb_values("U", k, x)
    assert cheb_t(k, x) == pytest.approx(values_t[k], rel=1e-9, abs=1e-9)
    assert cheb_u(k, x) == pytest.approx(values_u[k], rel=1e-9, abs=1e-9)


def test_large_arguments_use_closed_forms():
    # |x| > CLOSED_FORM_ABS switches away from the recurrence even for small orders
    for x in (-9.5, 5.0, 10.0):
        values_t = cheb_values("T", 12, x)
        values_u = cheb_values("U", 12, x)
        for k in range(13):
            assert cheb_t(k, x) == pytest.approx(values_t[k], rel=1e-12)
            assert cheb_u(k, x) == pytest.approx(values_u[k], rel=1e-12)
    assert cheb_u(1, 1e200) == pytest.approx(2e200, rel=1e-12)
    assert cheb_t(1, -1e300) == pytest.approx(-1e300, rel=1e-12)


@pytest.mark.parametrize(
    "fn, k, x, expected",
    [
        (cheb_t, 64, 1e10, math.inf),
        (cheb_t, 2, 1e200, math.inf),
        (cheb_t, 1001, -2.0, -math.inf),
        (cheb_t, -1000, -2.0, math.inf),
        (cheb_u, 1000, 2.0, math.inf),
        (cheb_u, 300, 30.0, math.inf),
        (cheb_u, 301, -30.0, -math.inf),
        (cheb_u, -1002, 2.0, -math.inf),
    ],
)
def test_overflow_saturates(fn, k, x, expected):
    assert fn(k, x) == expected


def test_near_overflow_stays_finite():
    # sinh((k + 1) u) overflows while the quotient U_k = sinh((k + 1) u) / sinh(u) does not
    u = math.acosh(10.0)
    value = cheb_u(237, 10.0)
    assert math.isfinite(value)
    assert math.log(value) == pytest.approx(237 * u - math.log1p(-math.exp(-2.0 * u)), rel=1e-12)
    assert cheb_u(237, -10.0) == -value


def test_values_array_saturates_without_nan():
    values = cheb_values("T", 80, 1e10)
    assert not np.isnan(values).any()
    assert values[20] == pytest.approx(cheb_t(20, 1e10), rel=1e-12)
    assert np.isinf(values[-1])
    assert np.isneginf(cheb_values("U", 1001, -2.0)[-1])


def test_dispatch_and_eval_record():
    assert cheb("T", 2, 2.0) == 7.0
    assert cheb(ChebKind.SECOND, 2, 0.5) == 0.0
    assert ChebEval(ChebKind.parse("u"), -1, 0.7).to_dict() == {"kind": "U", "order": -1, "x": 0.7, "value": 0.0}
    with pytest.raises(DomainError):
        ChebKind.parse("V")
    with pytest.raises(DomainError):
        cheb_values("T", -1, 0.5)


def test_largest_roots():
    assert largest_root_t(1) == pytest.approx(0.0, abs=1e-15)
    assert largest_root_t(2) == pytest.approx(0.7071067811865476)
    assert largest_root_t(3) == pytest.approx(math.cos(math.pi / 6))
    assert largest_root_u(2) == pytest.approx(0.5)
    assert largest_root_u(3) == pytest.approx(math.cos(math.pi / 4))
    for fn in (largest_root_t, largest_root_u):
        with pytest.raises(DomainError):
            fn(0)


@pytest.mark.parametrize("k", range(1, 30))
def test_roots_vanish_and_bound_positivity(k, rng):
    rt, ru = largest_root_t(k), largest_root_u(k)
    assert abs(cheb_t(k, rt)) <= 1e-9
    assert abs(cheb_u(k, ru)) <= 1e-9 * (k + 1)
    for x in rng.uniform(rt, 3.0, 20):
        if x > rt:
            assert cheb_t(k, x) > 0.0
    for x in rng.uniform(ru, 3.0, 20):
        if x > ru:
            assert cheb_u(k, x) > 0.0


def test_tau():
    assert tau(0.0) == 2
    assert tau(0.6) == 3
    assert tau(0.9) == 6
    assert tau(math.cos(math.pi / 5)) == 5
    assert tau(0.5) == 3
    for bad in (-0.1, 1.0, 2.0):
        with pytest.raises(DomainError):
            tau(bad)


def test_monotonicity(rng):
    for x in rng.uniform(1.0 + 1e-6, 5.0, 50):
        values = [cheb_t(k, x) for k in range(31)]
        assert all(a < b for a, b in zip(values, values[1:]))
    for x in rng.uniform(0.0, 0.99, 50):
        values = [cheb_t(k, x) for k in range(1, tau(x) + 1)]
        assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("ijkq", [(1, 2, 3, 0.5), (2, 5, 9, -1.3), (-3, 4, -7, 1.9)])
def test_identity_examples(ijkq):
    assert identity_residuals(*ijkq).within()


def test_identity_residuals_vanish_at_origin():
    res = identity_residuals(0, 0, 0, 0.37)
    assert res.residuals() == (0.0,) * 6
    assert set(res.to_dict()) == {"idU_u", "idU_t", "ut_u", "ut_t", "ut1", "ut2", "magnitude"}


@given(
    st.integers(min_value=-8, max_value=8),
    st.integers(min_value=-8, max_value=8),
    st.integers(min_value=-8, max_value=8),
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
)
@settings(max_examples=1000)
def test_identity_residuals_are_small(i, j, k, q):
    res = identity_residuals(i, j, k, q)
    assert res.worst() <= 1e-9 * max(1.0, res.magnitude)


@pytest.mark.parametrize("n", [1, 3, 5, 7])
def test_alternating_sine_sums_vanish(n, rng):
    for _ in range(100):
        sin_sum, cos_sum = alternating_sine_sums(rng.uniform(-np.pi, np.pi, n))
        assert abs(sin_sum) <= 1e-10
        assert abs(cos_sum) <= 1e-10


@pytest.mark.parametrize("xs", [[], [0.1, 0.2]])
def test_alternating_sine_sums_need_odd_length(xs):
    with pytest.raises(DomainError):
        alternating_sine_sums(xs)
