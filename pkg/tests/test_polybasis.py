import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holotransfer.errors import ConfigError, ValidationError
from holotransfer.polybasis import (
    LaurentCoeffs,
    cheb_eval,
    cheb_nodes,
    cheb_transform,
    cheb_vander,
    equi_nodes,
    laurent_eval,
    laurent_transform,
    laurent_transform_direct,
)

from oracles import cheb_T, direct_lagrange, unit_roots_of_minus_one

sizes = st.integers(min_value=1, max_value=40)


def test_cheb_nodes_small():
    assert cheb_nodes(1).nodes == pytest.approx([0.0], abs=1e-15)
    assert cheb_nodes(2).nodes == pytest.approx([math.sqrt(2) / 2, -math.sqrt(2) / 2], abs=1e-15)
    assert cheb_nodes(3).nodes == pytest.approx([math.sqrt(3) / 2, 0, -math.sqrt(3) / 2], abs=1e-15)


def test_cheb_nodes_reject_zero():
    with pytest.raises(ConfigError):
        cheb_nodes(0)
    with pytest.raises(ConfigError):
        equi_nodes(0)


@given(sizes)
def test_cheb_nodes_are_zeros_of_Tn(n):
    x = cheb_nodes(n).nodes
    assert np.all(np.diff(x) < 0)
    assert np.all(np.abs(x) < 1)
    assert np.max(np.abs(cheb_vander(x, n + 1)[:, n])) <= 1e-12


def test_cheb_vander_matches_trig_identity():
    x = np.linspace(-1, 1, 37)
    V = cheb_vander(x, 12)
    ref = np.array([[cheb_T(l, xi) for l in range(12)] for xi in x])
    assert np.max(np.abs(V - ref)) < 1e-13


def test_cheb_transform_constant_and_T1():
    assert cheb_transform(np.ones(6)).coeffs == pytest.approx([2, 0, 0, 0, 0, 0], abs=1e-14)
    x = cheb_nodes(5).nodes
    assert cheb_transform(x).coeffs == pytest.approx([0, 1, 0, 0, 0], abs=1e-14)


def test_cheb_round_trip_random():
    rng = np.random.default_rng(1)
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    d = cheb_transform(v)
    assert np.max(np.abs(cheb_eval(d, cheb_nodes(5).nodes) - v)) < 1e-13


def test_cheb_eval_examples():
    assert cheb_eval(np.array([2, 0, 0]), 0.7) == pytest.approx(1)
    assert cheb_eval(np.array([0, 0, 1]), 0.5) == pytest.approx(-0.5)
    assert cheb_eval(np.array([0, 1]), 0.3 + 0.4j) == pytest.approx(0.3 + 0.4j)


def test_cheb_interpolant_matches_lagrange_oracle():
    rng = np.random.default_rng(2)
    n = 9
    x = cheb_nodes(n).nodes
    v = rng.normal(size=n)
    d = cheb_transform(v)
    for t in rng.uniform(-1, 1, 10):
        assert cheb_eval(d, t) == pytest.approx(direct_lagrange(x, v, t), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=30), st.integers(min_value=0, max_value=2**32 - 1))
def test_interpolation_exact_on_low_degree(n, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n) / np.arange(1, n + 1)
    p = np.polynomial.Polynomial(c)
    d = cheb_transform(p(cheb_nodes(n).nodes))
    t = rng.uniform(-1, 1, 50)
    assert np.max(np.abs(cheb_eval(d, t) - p(t))) <= 1e-12 * max(1.0, np.sum(np.abs(c)))


@given(sizes)
def test_discrete_orthogonality(n):
    T = cheb_vander(cheb_nodes(n).nodes, n)
    G = (2 / n) * T.T @ T
    expected = np.diag([2.0] + [1.0] * (n - 1))
    assert np.max(np.abs(G - expected)) <= 1e-12


@settings(max_examples=30)
@given(st.integers(1, 20), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_transform_linearity(n, a, b):
    rng = np.random.default_rng(n)
    u, v = rng.normal(size=(2, n))
    lhs = cheb_transform(a * u + b * v).coeffs
    rhs = a * cheb_transform(u).coeffs + b * cheb_transform(v).coeffs
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + abs(a) + abs(b))
    w, y = rng.normal(size=(2, 2 * n))
    lhs = laurent_transform(a * w + b * y).coeffs
    rhs = a * laurent_transform(w).coeffs + b * laurent_transform(y).coeffs
    assert np.max(np.abs(lhs - rhs)) <= 1e-11 * (1 + abs(a) + abs(b))


def test_cheb_transform_length_mismatch():
    with pytest.raises(ConfigError):
        cheb_transform(np.ones((2, 2)))


def test_equi_nodes_examples():
    assert equi_nodes(1).nodes == pytest.approx([1j, -1j], abs=1e-15)
    z = equi_nodes(2).nodes
    assert z == pytest.approx([np.exp(1j * np.pi * k / 4) for k in (1, 3, 5, 7)], abs=1e-15)


@given(sizes)
def test_equi_nodes_invariants(n):
    z = equi_nodes(n).nodes
    assert np.max(np.abs(z ** (2 * n) + 1)) <= 1e-12
    # Vieta on z^(2n) + 1: the roots multiply to 1
    assert abs(np.prod(z) - 1) <= 1e-12
    assert z == pytest.approx(unit_roots_of_minus_one(n), abs=1e-14)


def test_laurent_transform_examples():
    c = laurent_transform(np.ones(8))
    assert c[0] == pytest.approx(8)
    assert np.max(np.abs(np.delete(c.coeffs, 4))) < 1e-13
    c = laurent_transform(equi_nodes(4).nodes)
    assert c[1] == pytest.approx(8)
    assert np.max(np.abs(np.delete(c.coeffs, 5))) < 1e-13


@given(sizes)
def test_fast_transform_matches_direct(n):
    rng = np.random.default_rng(n)
    v = rng.normal(size=2 * n) + 1j * rng.normal(size=2 * n)
    assert np.max(np.abs(laurent_transform(v).coeffs - laurent_transform_direct(v).coeffs)) <= 1e-12 * n


def test_laurent_round_trip_random():
    rng = np.random.default_rng(3)
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    c = laurent_transform(v)
    assert np.max(np.abs(laurent_eval(c, equi_nodes(3).nodes) - v)) < 1e-13


def test_laurent_eval_examples():
    n = 3
    for degree, z, expected in ((0, 0.5, 1), (1, 2j, 2j), (-1, 2, 0.5)):
        coeffs = np.zeros(2 * n, dtype=complex)
        coeffs[degree + n] = 2 * n
        assert laurent_eval(LaurentCoeffs(coeffs), z) == pytest.approx(expected)


def test_laurent_eval_rejects_zero():
    with pytest.raises(ValidationError):
        laurent_eval(LaurentCoeffs(np.ones(4, dtype=complex)), 0)


def test_laurent_degree_index_range():
    c = laurent_transform(np.ones(10))
    assert list(c.degrees) == list(range(-5, 5))
    with pytest.raises(IndexError):
        c[5]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 25), st.integers(0, 2**32 - 1))
def test_laurent_exact_on_range(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=2 * n) + 1j * rng.normal(size=2 * n)
    deg = np.arange(-n, n)

    def f(z):
        return np.sum(a * np.asarray(z)[..., None] ** deg, axis=-1)

    c = laurent_transform(f(equi_nodes(n).nodes))
    z = np.exp(2j * np.pi * rng.uniform(size=50))
    assert np.max(np.abs(laurent_eval(c, z) - f(z))) <= 1e-12 * np.sum(np.abs(a))
