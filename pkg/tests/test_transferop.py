import numpy as np
import pytest

from holotransfer.apps import blaschke_system, interval_map_system
from holotransfer.errors import ConfigError, NumericalError, ValidationError
from holotransfer.geometry import joukowski
from holotransfer.spectral import eigendecompose
from holotransfer.transferop import (
    CircleSystem,
    CollocationMatrix,
    MapWeightSystem,
    apply_circle_operator,
    apply_operator,
    assemble_cheb,
    assemble_circle,
)


def const(c):
    return lambda z: np.full(np.shape(z), c, dtype=complex)


def test_constant_map_rank_one():
    system = MapWeightSystem([(const(0.0), const(1.0))])
    M = assemble_cheb(system, 4).entries
    assert M[0] == pytest.approx([1, 0, -1, 0], abs=1e-14)
    assert np.max(np.abs(M[1:])) < 1e-14
    assert eigendecompose(M).eigenvalues[0] == pytest.approx(1)


@pytest.mark.parametrize("n", [1, 5, 17])
def test_identity_map_gives_identity(n):
    system = MapWeightSystem([(lambda z: z, const(1.0))], foci=(0.3, 2 - 1j), R=3.0)
    assert np.max(np.abs(assemble_cheb(system, n).entries - np.eye(n))) < 1e-12


def test_interval_map_leading_and_subleading():
    data = eigendecompose(assemble_cheb(interval_map_system(), 42))
    assert data.eigenvalues[0] == pytest.approx(1, abs=1e-12)
    assert data.eigenvalues[1] == pytest.approx(0.0900761270052956, abs=1e-13)


def test_direct_sum_matches_factored_form():
    rng = np.random.default_rng(11)
    branches = []
    for _ in range(3):
        a, b = rng.uniform(0.1, 0.3), rng.uniform(-0.5, 0.5)
        w = complex(rng.normal(), rng.normal())
        branches.append((lambda z, a=a, b=b: a * z + b, const(w)))
    system = MapWeightSystem(branches, (1, -1), 2.0)
    A = assemble_cheb(system, 16, "factored").entries
    B = assemble_cheb(system, 16, "direct").entries
    assert np.max(np.abs(A - B)) <= 1e-12


def stochastic_system():
    """Weights sum to one pointwise: ``W_1 = (1 + x^2)/3``, ``W_2 = 1 - W_1``."""
    w1 = lambda x: (1 + x**2) / 3
    return MapWeightSystem(
        [(lambda x: x / 3 + 0.2, w1), (lambda x: 0.25 * x - 0.5, lambda x: 1 - w1(x))],
        (1, -1),
        2.5,
    )


@pytest.mark.parametrize("n", [8, 16, 32])
def test_markov_normalization(n):
    M = assemble_cheb(stochastic_system(), n).entries
    norm = np.max(np.sum(np.abs(M), axis=1))
    e0 = np.zeros(n)
    e0[0] = 1.0
    # the constant function is fixed, so e_0 is a right eigenvector
    assert np.max(np.abs(M @ e0 - e0)) <= 1e-10 * norm
    data = eigendecompose(M)
    assert abs(data.eigenvalues[0] - 1) <= 1e-10
    assert data.residual <= 1e-10


def test_leading_eigenvalue_nesting():
    system = interval_map_system()
    lead = {n: eigendecompose(assemble_cheb(system, n)).eigenvalues[0] for n in range(16, 49, 8)}
    diffs = [abs(lead[n + 8] - lead[n]) for n in range(16, 41, 8)]
    # already at rounding level; nothing may grow beyond it
    assert all(d <= 1e-14 for d in diffs)


def test_containment_check():
    maps = interval_map_system().branches
    MapWeightSystem(maps, (0, 1), 16.99, r=3.9).node_data(10)
    with pytest.raises(ValidationError):
        MapWeightSystem(maps, (0, 1), 16.99, r=2.0).node_data(10)


def test_map_weight_system_validation():
    with pytest.raises(ConfigError):
        MapWeightSystem([])
    with pytest.raises(ConfigError):
        MapWeightSystem([(lambda z: z, const(1))], R=2.0, r=3.0)
    with pytest.raises(NumericalError):
        assemble_cheb(MapWeightSystem([(lambda z: 1 / (z - z), const(1))]), 3)
    with pytest.raises(ConfigError):
        assemble_cheb(MapWeightSystem([(lambda z: z, const(1))]), 3, "magic")


def test_collocation_matrix_checks():
    with pytest.raises(NumericalError):
        CollocationMatrix("chebyshev", 2, np.ones((3, 3)), 2)
    with pytest.raises(NumericalError):
        CollocationMatrix("chebyshev", 2, np.array([[1, np.nan], [0, 1]]), 2)


def test_apply_operator_examples():
    pts = np.linspace(0, 1, 7)
    one = const(1.0)
    assert apply_operator(MapWeightSystem([(lambda z: z / 2, one)]), one, pts) == pytest.approx(np.ones(7))
    half = const(0.5)
    s = MapWeightSystem([(lambda z: z / 2, half), (lambda z: z / 2 + 0.5, half)])
    assert apply_operator(s, one, pts) == pytest.approx(np.ones(7))


def test_apply_operator_interval_map_sums_derivatives():
    pts = np.random.default_rng(4).uniform(0, 1, 10)
    expected = 11 / (11 + pts) ** 2 + 11 / 12
    assert apply_operator(interval_map_system(), const(1.0), pts) == pytest.approx(expected, rel=1e-14)


def squaring_system(multiplier=None):
    """Inverse branches of z -> z^2; multiplier defaults to 1/2 per branch."""
    m = multiplier or const(0.5)
    return CircleSystem([(lambda z: np.sqrt(z), m), (lambda z: -np.sqrt(z), m)])


def test_circle_squaring_map_fixes_constants():
    # with weight w(z) = z the effective factor w(phi) phi' is 1/2
    system = CircleSystem(
        [(lambda z: np.sqrt(z), lambda z: 0.5 / np.sqrt(z)), (lambda z: -np.sqrt(z), lambda z: -0.5 / np.sqrt(z))],
        weight=lambda z: z,
    )
    M = assemble_circle(system, 6).entries
    e0 = np.zeros(12)
    e0[6] = 1
    assert M @ e0 == pytest.approx(e0, abs=1e-14)
    assert eigendecompose(M).eigenvalues[0] == pytest.approx(1, abs=1e-12)


def test_circle_system_validation():
    with pytest.raises(ConfigError):
        CircleSystem([])
    with pytest.raises(ConfigError):
        CircleSystem([(lambda z: z, const(1))], orientation=2)
    with pytest.raises(ConfigError):
        CircleSystem([(lambda z: z, const(1))], rho=0.5)
    with pytest.raises(ValidationError):
        assemble_circle(CircleSystem([(lambda z: 0 * z, const(1))]), 3)
    with pytest.raises(ValidationError):
        assemble_circle(CircleSystem([(lambda z: z / 2, const(1)), (lambda z: z / 2, const(1))]), 3)
    with pytest.raises(ConfigError):
        assemble_circle(CircleSystem([(lambda z: z / 2, const(1))]), 3, "contour")


@pytest.mark.parametrize("n", [10, 20])
def test_blaschke_leading_eigenvalue(n):
    data = eigendecompose(assemble_circle(blaschke_system(0.33j), n))
    assert data.eigenvalues[0] == pytest.approx(2, abs=1e-10)


@pytest.mark.parametrize("mu", [0.33j, 0.2 - 0.1j])
def test_nodal_and_contour_assembly_agree(mu):
    system = blaschke_system(mu)
    nodal = assemble_circle(system, 16, "nodal").entries
    contour = assemble_circle(system, 16, "contour").entries
    assert np.max(np.abs(nodal - contour)) <= 1e-12 * np.max(np.abs(nodal))


def test_apply_circle_operator_matches_matrix_action():
    system = blaschke_system(0.2)
    n = 12
    z = np.exp(2j * np.pi * np.random.default_rng(3).uniform(size=5))
    # L z^1 evaluated pointwise equals the preimage sum
    vals = apply_circle_operator(system, lambda w: w, z)
    pre, eff = system.node_data(z)
    assert vals == pytest.approx(np.sum(eff * pre, axis=0))
    assert assemble_circle(system, n).entries.shape == (2 * n, 2 * n)


def test_circle_and_ellipse_assemblies_share_leading_eigenvalue():
    # L f(z) = (a + b sigma(z)) (f(sqrt z) + f(-sqrt z)) commutes with z -> 1/z;
    # through sigma it becomes W(x) = a + b x with Phi_+- = +-sqrt((x + 1)/2)
    a, b = 1.0, 0.3
    circle = squaring_system(lambda z: a + b * joukowski(z))
    cheb = MapWeightSystem(
        [
            (lambda x: np.sqrt((x + 1) / 2), lambda x: a + b * x),
            (lambda x: -np.sqrt((x + 1) / 2), lambda x: a + b * x),
        ]
    )
    lam_c = eigendecompose(assemble_circle(circle, 12)).eigenvalues[0]
    lam_e = eigendecompose(assemble_cheb(cheb, 12)).eigenvalues[0]
    assert abs(lam_c) > 0.1
    assert lam_c == pytest.approx(lam_e, abs=1e-10)
