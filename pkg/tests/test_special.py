import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special as sp

from rgglab.errors import InvalidInputError
from rgglab.special import elliptic_e, reg_incomplete_beta


@pytest.mark.parametrize("a,b", [(1.0, 1.0), (2.0, 3.0), (0.5, 0.5)])
def test_incomplete_beta_endpoints(a, b):
    assert reg_incomplete_beta(0.0, a, b) == 0.0
    assert reg_incomplete_beta(1.0, a, b) == 1.0


def test_incomplete_beta_uniform_half():
    assert reg_incomplete_beta(0.5, 1.0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_incomplete_beta_pinned_quadrature():
    # Twelve times the integral of t(1-t)^2 over [0, 1/4] is 67/256.
    assert reg_incomplete_beta(0.25, 2.0, 3.0) == pytest.approx(67 / 256, rel=1e-13)


@given(st.floats(0.0, 1.0), st.floats(0.1, 20.0), st.floats(0.1, 20.0))
def test_incomplete_beta_matches_scipy(x, a, b):
    assert reg_incomplete_beta(x, a, b) == pytest.approx(sp.betainc(a, b, x), rel=1e-9, abs=1e-13)


# 1 - x is rounded, so keep x away from the ends where I_x is steep.
@given(st.floats(1e-4, 1 - 1e-4), st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_incomplete_beta_reflection(x, a, b):
    assert reg_incomplete_beta(x, a, b) + reg_incomplete_beta(1 - x, b, a) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("x,a,b", [(-0.1, 1, 1), (1.1, 1, 1), (0.5, 0, 1), (0.5, 1, -2)])
def test_incomplete_beta_rejects(x, a, b):
    with pytest.raises(InvalidInputError):
        reg_incomplete_beta(x, a, b)


def test_elliptic_endpoints():
    assert elliptic_e(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert elliptic_e(1.0) == 1.0


def test_elliptic_pinned():
    assert elliptic_e(0.5) == pytest.approx(1.4674622093394272, abs=1e-12)


@given(st.floats(0.0, 0.999999))
def test_elliptic_matches_mpmath(k):
    # mpmath takes the parameter m = k^2.
    assert elliptic_e(k) == pytest.approx(float(mpmath.ellipe(k * k)), rel=1e-12)


@given(st.floats(0.0, 0.99), st.floats(0.0, 0.99))
def test_elliptic_decreasing(k1, k2):
    lo, hi = sorted((k1, k2))
    assert elliptic_e(lo) >= elliptic_e(hi)


def test_elliptic_rejects():
    with pytest.raises(InvalidInputError):
        elliptic_e(1.5)
