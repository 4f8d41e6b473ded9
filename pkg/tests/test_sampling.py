import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shorttm.errors import SamplerError
from shorttm.sampling import RandomSource, categorical_draw, log_sum_exp, normalize_log


def test_draw_frequencies():
    rng = np.random.default_rng(0)
    w = np.array([0.2, 0.3, 0.5])
    u = rng.random(1_000_000)
    c = np.cumsum(w)
    # vectorized equivalent of the inverse-CDF rule, checked against the scalar draw below
    idx = np.searchsorted(c, u * c[-1], side="right")
    freq = np.bincount(idx, minlength=3) / len(u)
    np.testing.assert_allclose(freq, w, atol=0.01)
    for x in u[:2000]:
        assert categorical_draw(w, float(x)) == int(np.searchsorted(c, x * c[-1], side="right"))


def test_draw_edges():
    assert categorical_draw([0.0, 1.0, 0.0], 0.0) == 1
    assert categorical_draw([1.0, 0.0], 0.999999999) == 0
    assert categorical_draw([1.0, 1.0, 0.0], 1.0) == 1  # never returns a zero-weight tail
    for bad in ([0.0, 0.0], [1.0, np.nan], [1.0, -0.5], []):
        with pytest.raises(SamplerError):
            categorical_draw(bad, 0.5)


def test_log_sum_exp_high_precision(rng):
    for _ in range(20):
        v = rng.normal(scale=50, size=10)
        exact = Fraction(0)
        m = max(v)
        for x in v:
            exact += Fraction(math.exp(x - m))
        want = m + math.log(float(exact))
        assert abs(log_sum_exp(v) - want) <= 1e-12 * abs(want)


def test_log_sum_exp_extremes():
    assert log_sum_exp([-1000.0, -1000.0]) == pytest.approx(-1000 + math.log(2))
    assert log_sum_exp([800.0, 0.0]) == pytest.approx(800.0)
    p = normalize_log([-1e4, -1e4 + math.log(3)])
    np.testing.assert_allclose(p, [0.25, 0.75])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=12), st.floats(0.0, 0.999999))
def test_draw_lands_on_positive_weight(ws, u):
    if sum(ws) <= 0:
        return
    i = categorical_draw(ws, u)
    assert 0 <= i < len(ws) and ws[i] > 0


def test_random_source_streams_are_reproducible_and_separate():
    a, b = RandomSource(3), RandomSource(3)
    np.testing.assert_array_equal(a.doc_uniforms(5), b.doc_uniforms(5))
    np.testing.assert_array_equal(a.tok_uniforms(4, 2), b.tok_uniforms(4, 2))
    c = RandomSource(3)
    c.tok_uniforms(100)  # consuming token draws leaves the doc stream untouched
    d = RandomSource(3)
    np.testing.assert_array_equal(c.doc_uniforms(3), d.doc_uniforms(3))
