import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpdist.trig_lemma import (
    HALF_PI,
    F_eval,
    TrigParams,
    argmin_condition,
    omega_closed_form,
    omega_min,
)

pos = st.floats(0.05, 5.0)
ang = st.floats(0.0, HALF_PI)


def fine_grid_min(a, b, t, k=2001):
    s = np.linspace(0, HALF_PI, k)
    c2, s2 = np.cos(s) ** 2, np.sin(s) ** 2
    r = np.sqrt(a * a * c2 + b * b * s2)
    best = np.inf
    for i in range(k):
        best = min(best, float(np.min(r[i] + r - (a + b) * t * np.sin(s[i] + s))))
    return best


class TestF:
    def test_equal_radii_diagonal(self):
        for t in (0.3, 1.0, 2.5):
            assert F_eval(1, 1, t, np.pi / 4, np.pi / 4) == pytest.approx(2 * (1 - t), abs=1e-14)

    def test_corner(self):
        a, b, t = 1.3, 0.4, 1.7
        assert F_eval(a, b, t, 0, HALF_PI) == pytest.approx((a + b) * (1 - t), abs=1e-14)

    def test_origin(self):
        assert F_eval(2.5, 0.7, 3.0, 0, 0) == 5.0

    def test_params_validated(self):
        with pytest.raises(ValueError):
            TrigParams(1, 1, 1, -0.1, 0)
        with pytest.raises(ValueError):
            TrigParams(0, 1, 1, 0, 0)

    @given(pos, pos, pos, ang, ang)
    def test_symmetric(self, a, b, t, th, ph):
        assert F_eval(a, b, t, th, ph) == F_eval(a, b, t, ph, th)


class TestOmega:
    def test_equal(self):
        assert omega_min(1, 1, 0.5).value == pytest.approx(1, abs=1e-4)

    def test_zero_at_t1(self):
        res = omega_min(1, 2, 1)
        assert abs(res.value) < 1e-4
        sum_gap, tan_gap = argmin_condition(1, 2, res.theta, res.phi)
        assert min(sum_gap, tan_gap) < 1e-3

    def test_t_above_one(self):
        res = omega_min(1, 2, 2)
        assert res.value == pytest.approx(-3, abs=1e-4)
        assert abs(res.theta + res.phi - HALF_PI) < 1e-3

    def test_positive_below_one(self, rng):
        for _ in range(50):
            a, b = rng.uniform(0.1, 3, 2)
            t = rng.uniform(0.01, 0.99)
            assert omega_min(a, b, t).value > 1e-6

    def test_monotone_in_t(self):
        ts = np.linspace(0.2, 2.0, 19)
        vals = [omega_min(0.7, 1.9, t).value for t in ts]
        assert all(v2 <= v1 + 1e-9 for v1, v2 in zip(vals, vals[1:]))

    def test_matches_fine_grid(self):
        a, b, t = 0.8, 2.1, 0.6
        assert abs(omega_min(a, b, t).value - fine_grid_min(a, b, t)) < 1e-4

    def test_closed_form_table(self):
        assert omega_closed_form(2, 2, 0.25) == 3
        assert omega_closed_form(1, 2, 1) == 0
        assert omega_closed_form(1, 2, 3) == -6
        assert omega_closed_form(1, 2, 0.5) is None

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            omega_min(1, 1, 0)

    def test_result_unpacks(self):
        v, th, ph = omega_min(1, 1, 0.5, grid=50, refine=0)
        assert 0 <= th <= HALF_PI and 0 <= ph <= HALF_PI
