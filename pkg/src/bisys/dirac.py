"""Closed-form Dirac-Coulomb levels for the two constituents.

Each body is treated as a Dirac particle of its own mass in a Coulomb field
whose coupling is scaled by the partner's mass fraction; the bound-state mass
is the sum of the two levels.  The conventional treatment (one particle with
the reduced mass and the full coupling) is kept alongside for comparison.

Near-cancelling differences are evaluated from the binding fraction
``E/m - 1`` written without subtraction, and the series coefficients are
extracted in extended precision with mpmath.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath

from ._validation import check_half_integer, check_int, check_non_negative, check_positive
from .errors import DomainError, ExtrapolationError, QuantumNumberError, SupercriticalCouplingError
from .extrapolation import richardson_limit

VARIANTS = ("a", "b")
DEFAULT_DPS = 40
MAX_EXTRAPOLATION_COUPLING = 0.05


def _check_level(n, j):
    n = check_int(n, "n", minimum=1)
    j = check_half_integer(j)
    if j + Fraction(1, 2) > n:
        raise QuantumNumberError(f"j={j} is not allowed for n={n} (need j + 1/2 <= n)")
    return n, j


def _check_coupling(x, j, name="coupling"):
    x = check_non_negative(x, name)
    if x >= float(j) + 0.5:
        raise SupercriticalCouplingError(
            f"{name}={x:g} is supercritical for j={j} (must stay below {float(j) + 0.5:g})"
        )
    return x


def _binding_fraction(x, n, kappa, sqrt):
    """E/m - 1 for coupling x, principal number n and |kappa| = j + 1/2."""
    root = sqrt(kappa * kappa - x * x)
    denom = (n - kappa) + root
    y = (x / denom) ** 2
    s = sqrt(1 + y)
    return -y / (s * (1 + s))


@dataclass(frozen=True)
class DiracLevel:
    n: int
    j: Fraction
    coupling: float
    mass: float
    energy: float
    delta_j: float

    @property
    def binding(self):
        return self.mass * _binding_fraction(self.coupling, self.n, float(self.j) + 0.5,
                                             math.sqrt)


def dirac_energy(m, coupling, n, j):
    """Dirac-Coulomb level m [1 + x² / (n - δ_j)²]^(-1/2).

    ``δ_j = j + 1/2 - sqrt((j + 1/2)² - x²)``; ``coupling`` x is the scaled
    product eta * Z alpha.
    """
    m = check_positive(m, "mass")
    n, j = _check_level(n, j)
    x = _check_coupling(coupling, j)
    kappa = float(j) + 0.5
    root = math.sqrt(kappa * kappa - x * x)
    delta = x * x / (kappa + root)
    energy = m * (1.0 + _binding_fraction(x, n, kappa, math.sqrt))
    return DiracLevel(n=n, j=j, coupling=x, mass=m, energy=energy, delta_j=delta)


class BoundMass(NamedTuple):
    E1: float
    E2: float
    M_a: float
    mass_defect: float


def bound_mass(sys, Zalpha, n, j):
    """Bound-state mass E1 + E2 and the mass defect (m1 + m2) - M_a."""
    n, j = _check_level(n, j)
    za = check_non_negative(Zalpha, "Zalpha")
    lvl1 = dirac_energy(sys.m1, sys.eta2 * za, n, j)
    lvl2 = dirac_energy(sys.m2, sys.eta1 * za, n, j)
    defect = -(lvl1.binding + lvl2.binding)
    return BoundMass(E1=lvl1.energy, E2=lvl2.energy, M_a=lvl1.energy + lvl2.energy,
                     mass_defect=defect)


def _alpha4_coefficients(sys, n, j):
    """Fourth-order coefficients (of (Z alpha)**4) used by the recoil variant.

    Returns (new - old, literal level-difference formula).  Both come from
    the expansion E/m = 1 - x²/(2n²) - x⁴/(2n⁴) (n/(j+1/2) - 3/4) + O(x⁶).
    """
    mu, nu = sys.reduced_mass, sys.mass_product_ratio
    kappa = float(j) + 0.5
    shape = n / kappa - 0.75
    new_minus_old = 3.0 * nu * mu / (2.0 * n**4) * shape
    formula = level_difference_formula(sys, 1.0, n, j)
    return new_minus_old, formula


def recoil_coefficient(sys, n, j):
    """Coefficient c of the variant-(b) recoil term c mu² (Z alpha)⁴ / (m1 + m2).

    It is fixed so that, through fourth order, the individual-particle mass
    minus the recoil-corrected reduced-mass level equals the closed-form
    level-difference formula.
    """
    n, j = _check_level(n, j)
    new_minus_old, formula = _alpha4_coefficients(sys, n, j)
    mu, big_m = sys.reduced_mass, sys.total_mass
    return (new_minus_old - formula) * big_m / (mu * mu)


def recoil_term(sys, Zalpha, n, j, variant="b"):
    if variant not in VARIANTS:
        raise DomainError(f"unknown comparator variant {variant!r}; expected 'a' or 'b'")
    if variant == "a":
        return 0.0
    mu, big_m = sys.reduced_mass, sys.total_mass
    return recoil_coefficient(sys, n, j) * mu * mu * Zalpha**4 / big_m


def old_prescription_energy(sys, Zalpha, n, j, variant="a"):
    """Binding energy of the reduced-mass Dirac particle in the full field.

    Variant ``"a"`` is the bare level minus mu; ``"b"`` adds the recoil term
    of :func:`recoil_term`.
    """
    n, j = _check_level(n, j)
    za = _check_coupling(Zalpha, j, "Zalpha")
    mu = sys.reduced_mass
    bare = mu * _binding_fraction(za, n, float(j) + 0.5, math.sqrt)
    return bare + recoil_term(sys, za, n, j, variant)


def level_difference_formula(sys, Zalpha, n, j):
    """Z⁴α⁴(m1+m2)/n³ {3/(8n)[1 - ν(1 - ν/3)] - [1 - ν]/(2j+1)}, ν = m1 m2/(m1+m2)²."""
    n, j = _check_level(n, j)
    za = check_non_negative(Zalpha, "Zalpha")
    nu = sys.mass_product_ratio
    braces = 3.0 / (8.0 * n) * (1.0 - nu * (1.0 - nu / 3.0)) - (1.0 - nu) / (2.0 * float(j) + 1.0)
    return za**4 * sys.total_mass / n**3 * braces


def _difference_mp(sys, x, n, j, variant):
    """New minus old prescription (binding parts) in mpmath at coupling ``x``."""
    mp = mpmath.mp
    kappa = mp.mpf(2 * j.numerator + j.denominator) / (2 * j.denominator)
    m1, m2 = mp.mpf(sys.m1), mp.mpf(sys.m2)
    big_m = m1 + m2
    eta1, eta2 = m1 / big_m, m2 / big_m
    mu = m1 * m2 / big_m
    new = m1 * _binding_fraction(eta2 * x, n, kappa, mp.sqrt) + m2 * _binding_fraction(
        eta1 * x, n, kappa, mp.sqrt
    )
    old = mu * _binding_fraction(x, n, kappa, mp.sqrt)
    if variant == "b":
        old += mp.mpf(recoil_coefficient(sys, n, j)) * mu * mu * x**4 / big_m
    return new - old


class LevelDifference(NamedTuple):
    """D at the requested coupling and its series coefficients.

    ``alpha4_coefficient`` multiplies (Z alpha)⁴; ``alpha2_coefficient`` is
    the extrapolated (Z alpha)² part, zero when the two prescriptions agree
    at leading order.
    """

    energy: float
    alpha4_coefficient: float
    alpha2_coefficient: float
    variant: str


def level_difference_numeric(sys, Zalpha, n, j, variant="b", *, dps=DEFAULT_DPS, rtol=1e-3):
    """Exact new-minus-old level difference plus its (Z alpha)⁴ coefficient.

    The coefficient is Richardson-extrapolated from ``D(x)/x⁴`` on the ladder
    ``x = a, a/2, a/4`` (``a = Zalpha``, or 0.01 when ``Zalpha`` is zero) and
    checked against the shifted ladder ``a/2, a/4, a/8``.
    """
    n, j = _check_level(n, j)
    if variant not in VARIANTS:
        raise DomainError(f"unknown comparator variant {variant!r}; expected 'a' or 'b'")
    za = _check_coupling(Zalpha, j, "Zalpha")
    if za > MAX_EXTRAPOLATION_COUPLING:
        raise DomainError(
            f"Zalpha={za:g} is outside the small-coupling regime (<= {MAX_EXTRAPOLATION_COUPLING})"
        )
    with mpmath.workdps(dps):
        x0 = mpmath.mpf(za)
        energy = _difference_mp(sys, x0, n, j, variant) if za > 0 else mpmath.mpf(0)
        a = x0 if za > 0 else mpmath.mpf("0.01")
        ladder = [a / 2**i for i in range(4)]
        diffs = [_difference_mp(sys, x, n, j, variant) for x in ladder]
        by_x4 = [d / x**4 for d, x in zip(diffs, ladder)]
        by_x2 = [d / x**2 for d, x in zip(diffs, ladder)]
        c4 = richardson_limit(by_x4[:3])
        c4_shift = richardson_limit(by_x4[1:])
        c2 = richardson_limit(by_x2[:3])
        scale = max(abs(c4), mpmath.mpf(10) ** (-dps // 2) * sys.total_mass)
        if abs(c4 - c4_shift) > rtol * scale:
            raise ExtrapolationError(
                f"alpha^4 coefficient not stable: {float(c4):.6e} vs {float(c4_shift):.6e}"
            )
        return LevelDifference(float(energy), float(c4), float(c2), variant)


def defect_alpha2_limit(sys, n, j, ladder=(0.02, 0.01, 0.005), *, dps=DEFAULT_DPS):
    """Richardson limit of mass_defect / (Z alpha)² as Z alpha -> 0.

    The expected value is mu / (2 n²).  ``ladder`` must halve at each step.
    """
    n, j = _check_level(n, j)
    ladder = [float(x) for x in ladder]
    for a, b in zip(ladder, ladder[1:]):
        if not math.isclose(a, 2 * b, rel_tol=1e-12):
            raise DomainError("Richardson ladder must halve at each step")
    with mpmath.workdps(dps):
        kappa = mpmath.mpf(2 * j.numerator + j.denominator) / (2 * j.denominator)
        m1, m2 = mpmath.mpf(sys.m1), mpmath.mpf(sys.m2)
        eta1, eta2 = m1 / (m1 + m2), m2 / (m1 + m2)
        values = []
        for x in ladder:
            x = mpmath.mpf(x)
            defect = -(m1 * _binding_fraction(eta2 * x, n, kappa, mpmath.sqrt)
                       + m2 * _binding_fraction(eta1 * x, n, kappa, mpmath.sqrt))
            values.append(defect / x**2)
        return float(richardson_limit(values))


@dataclass(frozen=True)
class SpectrumComparison:
    n: int
    j: Fraction
    Zalpha: float
    E1: float
    E2: float
    M_a: float
    mass_defect: float
    old_energy: float
    D_formula: float
    D_numeric: float
    variant: str


def compare_spectrum(sys, Zalpha, n, j, variant="b"):
    """All quantities for one level; ``D_numeric`` is the exact difference.

    ``old_energy`` is the old-prescription binding energy of the same
    variant, so ``M_a - (m1 + m2) - old_energy == D_numeric`` up to rounding.
    """
    n, j = _check_level(n, j)
    bm = bound_mass(sys, Zalpha, n, j)
    old = old_prescription_energy(sys, Zalpha, n, j, variant)
    with mpmath.workdps(DEFAULT_DPS):
        exact = float(_difference_mp(sys, mpmath.mpf(float(Zalpha)), n, j, variant))
    return SpectrumComparison(
        n=n,
        j=j,
        Zalpha=float(Zalpha),
        E1=bm.E1,
        E2=bm.E2,
        M_a=bm.M_a,
        mass_defect=bm.mass_defect,
        old_energy=old,
        D_formula=level_difference_formula(sys, Zalpha, n, j),
        D_numeric=exact,
        variant=variant,
    )


def spectrum_table(sys, zalphas, levels, variant="b"):
    """Rows of :class:`SpectrumComparison` for every (n, j) and Z alpha."""
    return [compare_spectrum(sys, za, n, j, variant) for (n, j) in levels for za in zalphas]
