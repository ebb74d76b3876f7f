import math
import warnings

import numpy as np
import pytest
from scipy.special import ai_zeros

from bisys.core import CentralPotential, make_system, rescale_potential
from bisys.errors import DomainError, QuantumNumberError, SearchError, UsageError
from bisys.schrodinger import (
    RadialGrid,
    RadialProblem,
    compare_scaled_wavefunctions,
    exact_energy,
    solve,
    solve_individual,
    solve_relative,
    virial_ratio,
)

STATES = [(1, 0), (2, 0), (2, 1), (3, 2)]


@pytest.mark.parametrize("n, l", STATES)
def test_coulomb_levels(n, l, coulomb):
    sys = make_system(1.0, 1.0)
    sol = solve_relative(sys, coulomb, n, l)
    assert sol.converged and sol.n_radial == n - l - 1
    assert sol.energy == pytest.approx(-0.5 / (2 * n * n), rel=1e-8)
    assert sol.norm == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n, l", STATES + [(3, 0), (3, 1)])
def test_harmonic_levels(n, l, harmonic):
    sys = make_system(3.0, 1.0)
    sol = solve_relative(sys, harmonic, n, l)
    omega = math.sqrt(1.0 / sys.reduced_mass)
    assert sol.energy == pytest.approx((2 * (n - l - 1) + l + 1.5) * omega, rel=1e-8)
    assert exact_energy(sys.reduced_mass, harmonic, n, l) == pytest.approx(sol.energy, rel=1e-8)


def test_hydrogen_ground_state_shape(coulomb):
    sys = make_system(1e12, 1.0)  # mu -> 1 to 1e-12
    sol = solve_relative(sys, coulomb, 1, 0)
    r = sol.r[:4000]
    np.testing.assert_allclose(sol.u[:4000], 2 * r * np.exp(-r), atol=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_linear_potential_against_airy_zeros(n):
    # V = c r, l = 0: E_n = (c^2 / 2m)^(1/3) |a_n|
    a_n = ai_zeros(n)[0][-1]
    m, c = 1.0, 1.0
    sol = solve(RadialProblem(m, CentralPotential.power_law(c, 1.0), 0, 20.0, 20000), n)
    assert sol.energy == pytest.approx((c * c / (2 * m)) ** (1 / 3) * abs(a_n), rel=1e-8)


def test_power_law_two_is_harmonic():
    sys = make_system(1.0, 1.0)
    a = solve_relative(sys, CentralPotential.power_law(0.5, 2.0), 2, 1)
    b = solve_relative(sys, CentralPotential.harmonic(1.0), 2, 1)
    assert a.energy == pytest.approx(b.energy, rel=1e-10)


@pytest.mark.parametrize("ratio", [1.0, 3.0, 1836.15])
@pytest.mark.parametrize("n, l", [(1, 0), (2, 1)])
def test_individual_scaling(ratio, n, l, coulomb):
    sys = make_system(ratio, 1.0)
    rel = solve_relative(sys, coulomb, n, l)
    b1 = solve_individual(sys, coulomb, 1, n, l)
    b2 = solve_individual(sys, coulomb, 2, n, l)
    assert b1.energy / rel.energy == pytest.approx(sys.eta2, rel=1e-9)
    assert b2.energy / rel.energy == pytest.approx(sys.eta1, rel=1e-9)
    assert rel.n_radial == b1.n_radial == b2.n_radial
    # the individual grids are the relative grid shrunk by the partner's fraction
    assert b1.r[-1] == pytest.approx(sys.eta2 * rel.r[-1])


@pytest.mark.parametrize("eta_ratio", [1.0, 3.0])
def test_scaled_wavefunctions_agree(eta_ratio, coulomb):
    sys = make_system(eta_ratio, 1.0)
    for n, l in [(1, 0), (2, 1)]:
        rel = solve_relative(sys, coulomb, n, l)
        ind = solve_individual(sys, coulomb, 1, n, l)
        assert compare_scaled_wavefunctions(rel, ind, sys.eta2) < 1e-8


def test_different_levels_warn(coulomb):
    sys = make_system(1.0, 1.0)
    rel = solve_relative(sys, coulomb, 1, 0)
    ind = solve_individual(sys, coulomb, 1, 2, 0)
    with pytest.warns(UserWarning, match="different levels"):
        dev = compare_scaled_wavefunctions(rel, ind, sys.eta2)
    assert dev > 0.1


def test_different_l_rejected(coulomb):
    sys = make_system(1.0, 1.0)
    with pytest.raises(UsageError):
        compare_scaled_wavefunctions(solve_relative(sys, coulomb, 2, 0),
                                     solve_individual(sys, coulomb, 1, 2, 1), 0.5)


@pytest.mark.parametrize("n, l", [(1, 0), (2, 1), (3, 2)])
def test_virial_theorem(n, l, coulomb, harmonic):
    sys = make_system(1.0, 1.0)
    # 2<T> = <r dV/dr>
    assert virial_ratio(solve_relative(sys, coulomb, n, l)) == pytest.approx(1.0, abs=1e-4)
    assert virial_ratio(solve_relative(sys, harmonic, n, l)) == pytest.approx(1.0, abs=1e-4)


def test_radial_function_limits(coulomb):
    sys = make_system(1e12, 1.0)
    sol = solve_relative(sys, coulomb, 1, 0)
    assert sol.radial_function(np.array([0.0]))[0] == pytest.approx(2.0, rel=1e-4)
    assert sol.radial_function(np.array([1.0]))[0] == pytest.approx(2 * math.exp(-1), rel=1e-8)


@pytest.mark.parametrize("n, l", [(0, 0), (1, 1), (2, -1), (1.5, 0)])
def test_bad_quantum_numbers(n, l, coulomb):
    with pytest.raises(QuantumNumberError):
        solve_relative(make_system(1, 1), coulomb, n, l)


def test_small_box_is_not_bracketed(coulomb):
    with pytest.raises(SearchError):
        solve_relative(make_system(1, 1), coulomb, 3, 0, RadialGrid(r_max=2.0))


def test_grid_validation():
    with pytest.raises(DomainError):
        RadialGrid(n_points=10)
    with pytest.raises(DomainError):
        RadialGrid(r_max=-1.0)


def test_grid_convergence(coulomb):
    sys = make_system(1.0, 1.0)
    errs = []
    for pts in (2000, 4000):
        sol = solve_relative(sys, coulomb, 2, 0, RadialGrid(n_points=pts))
        errs.append(abs(sol.energy + 0.0625))
    assert errs[1] < errs[0]


def test_no_spurious_warning(coulomb):
    sys = make_system(2.0, 1.0)
    rel = solve_relative(sys, coulomb, 1, 0)
    ind = solve_individual(sys, coulomb, 2, 1, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        compare_scaled_wavefunctions(rel, ind, sys.eta1)


def test_scaled_wavefunctions_agree_on_unrelated_grid(coulomb):
    sys = make_system(3.0, 1.0)
    eta = sys.eta2
    rel = solve_relative(sys, coulomb, 2, 1)
    # individual problem on its own grid, not a dilation of the relative one
    problem = RadialProblem(sys.m1 / eta**2, rescale_potential(coulomb, eta), 1, 37.0, 17001)
    ind = solve(problem, 2)
    assert ind.energy / rel.energy == pytest.approx(eta, rel=1e-8)
    assert compare_scaled_wavefunctions(rel, ind, eta) < 1e-6
