"""Two-body parameters, mass fractions and central potentials.

Everything here is immutable.  Units are natural (hbar = c = 1); masses are
usually quoted in units of the lighter body.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_open_unit, check_positive
from .errors import DomainError

COULOMB = "coulomb"
HARMONIC = "harmonic"
POWER_LAW = "power_law"

_KIND_CODES = {COULOMB: 0, HARMONIC: 1, POWER_LAW: 2}


@dataclass(frozen=True)
class TwoBodySystem:
    """Masses of the two constituents and the derived mass fractions.

    Build instances with :func:`make_system`; the derived fields are not
    meant to be passed by hand.
    """

    m1: float
    m2: float
    eta1: float
    eta2: float
    total_mass: float
    reduced_mass: float

    def eta_other(self, body):
        """Mass fraction of the partner of ``body`` (1 -> eta2, 2 -> eta1)."""
        if body == 1:
            return self.eta2
        if body == 2:
            return self.eta1
        raise DomainError(f"body index must be 1 or 2, got {body!r}")

    def mass(self, body):
        if body == 1:
            return self.m1
        if body == 2:
            return self.m2
        raise DomainError(f"body index must be 1 or 2, got {body!r}")

    @property
    def mass_product_ratio(self):
        """m1*m2/(m1+m2)**2, i.e. eta1*eta2."""
        return self.eta1 * self.eta2


def make_system(m1, m2):
    """Return the :class:`TwoBodySystem` for masses ``m1`` and ``m2``.

    >>> s = make_system(3.0, 1.0)
    >>> (s.eta1, s.eta2, s.reduced_mass)
    (0.75, 0.25, 0.75)
    """
    m1 = check_positive(m1, "m1")
    m2 = check_positive(m2, "m2")
    total = m1 + m2
    eta1 = m1 / total
    eta2 = m2 / total
    return TwoBodySystem(
        m1=m1,
        m2=m2,
        eta1=eta1,
        eta2=eta2,
        total_mass=total,
        reduced_mass=m1 * m2 / total,
    )


@dataclass(frozen=True)
class CentralPotential:
    """A central potential from a fixed menu.

    ``coulomb``   V(r) = -k / r           params = (k,)
    ``harmonic``  V(r) = kappa r**2 / 2   params = (kappa,)
    ``power_law`` V(r) = c r**p           params = (c, p)
    """

    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if self.kind == COULOMB:
            if len(params) != 1:
                raise DomainError("coulomb potential takes one parameter (strength k)")
            check_positive(params[0], "coulomb strength k")
        elif self.kind == HARMONIC:
            if len(params) != 1:
                raise DomainError("harmonic potential takes one parameter (stiffness)")
            check_positive(params[0], "harmonic stiffness")
        elif self.kind == POWER_LAW:
            if len(params) != 2:
                raise DomainError("power-law potential takes (coefficient, exponent)")
            c, p = params
            if p == 0.0 or not np.isfinite(c) or not np.isfinite(p):
                raise DomainError("power-law exponent must be non-zero and finite")
            if p <= -2.0:
                raise DomainError("power-law exponent must exceed -2 (fall to centre)")
            if c * p <= 0.0:
                raise DomainError("power-law potential must be attractive (c*p > 0)")
        else:
            raise DomainError(f"unknown potential kind {self.kind!r}")

    @classmethod
    def coulomb(cls, k=1.0):
        return cls(COULOMB, (k,))

    @classmethod
    def harmonic(cls, kappa=1.0):
        return cls(HARMONIC, (kappa,))

    @classmethod
    def power_law(cls, coefficient, exponent):
        return cls(POWER_LAW, (coefficient, exponent))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == COULOMB:
            return -self.params[0] / r
        if self.kind == HARMONIC:
            return 0.5 * self.params[0] * r * r
        c, p = self.params
        return c * r**p

    def derivative(self, r):
        """dV/dr."""
        r = np.asarray(r, dtype=float)
        if self.kind == COULOMB:
            return self.params[0] / (r * r)
        if self.kind == HARMONIC:
            return self.params[0] * r
        c, p = self.params
        return c * p * r ** (p - 1.0)

    def origin_limit(self):
        """lim r*V(r) as r -> 0 (finite for every menu entry)."""
        if self.kind == COULOMB:
            return -self.params[0]
        if self.kind == POWER_LAW:
            c, p = self.params
            if p == -1.0:
                return c
            if p < -1.0:
                raise DomainError("r*V(r) diverges at the origin for exponent < -1")
        return 0.0

    @property
    def vanishes_at_infinity(self):
        """True when V(r) -> 0 from below, so bound levels sit under zero."""
        return self.kind == COULOMB or (self.kind == POWER_LAW and self.params[1] < 0)

    def characteristic_length(self, mass):
        """Natural length scale for a particle of ``mass`` in this potential."""
        mass = check_positive(mass, "mass")
        if self.kind == COULOMB:
            return 1.0 / (mass * self.params[0])
        if self.kind == HARMONIC:
            return (mass * self.params[0]) ** -0.25
        c, p = self.params
        return (mass * abs(c)) ** (-1.0 / (p + 2.0))

    def closed_form(self):
        return self

    def kernel_params(self):
        """(kind code, a, b, argument scale) for the compiled force kernels."""
        a = self.params[0]
        b = self.params[1] if self.kind == POWER_LAW else 0.0
        return _KIND_CODES[self.kind], a, b, 1.0


@dataclass(frozen=True)
class RescaledPotential:
    """The potential eta * V(r / eta) felt by one body in its own coordinate.

    ``eta`` is the partner's mass fraction.  Evaluation always goes through
    the base potential; :meth:`closed_form` gives the equivalent menu entry.
    """

    base: CentralPotential
    eta: float

    def __post_init__(self):
        check_positive(self.eta, "eta")
        object.__setattr__(self, "eta", float(self.eta))

    @property
    def kind(self):
        return self.base.kind

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.eta * self.base(r / self.eta)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return self.base.derivative(r / self.eta)

    def origin_limit(self):
        return self.eta * self.eta * self.base.origin_limit()

    @property
    def vanishes_at_infinity(self):
        return self.base.vanishes_at_infinity

    def closed_form(self):
        """Same-kind potential equal to this one at every r > 0.

        Coulomb k -> eta**2 k, harmonic kappa -> kappa / eta,
        power law c -> eta**(1 - p) c.
        """
        base = self.base.closed_form()
        eta = self.eta
        if base.kind == COULOMB:
            return CentralPotential.coulomb(eta * eta * base.params[0])
        if base.kind == HARMONIC:
            return CentralPotential.harmonic(base.params[0] / eta)
        c, p = base.params
        return CentralPotential.power_law(eta ** (1.0 - p) * c, p)

    def characteristic_length(self, mass):
        return self.closed_form().characteristic_length(mass)

    def kernel_params(self):
        code, a, b, scale = self.base.kernel_params()
        return code, a, b, scale * self.eta


def rescale_potential(V, eta):
    """Potential seen by a body whose partner carries mass fraction ``eta``."""
    eta = check_open_unit(eta, "eta")
    if not isinstance(V, (CentralPotential, RescaledPotential)):
        raise DomainError(f"expected a CentralPotential, got {type(V).__name__}")
    return RescaledPotential(V, eta)
