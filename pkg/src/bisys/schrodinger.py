"""Radial Schrödinger eigenvalues by Numerov shooting.

The reduced radial function ``u = r R`` obeys

    u'' = [2 m (V(r) - E) + l (l + 1) / r**2] u,   u(0) = 0,

and the relative problem and the two individual problems differ only in
``m`` and ``V``.  Each individual problem is solved on its own coordinate
with its own rescaled potential, so agreement of the eigenvalues with the
mass-fraction scaling law is a numerical result, not an identity.

Eigenvalues are isolated by Sturm node counting of the outward solution and
then refined by root-finding on the discrete Wronskian between the outward
and inward solutions at the outer classical turning point.
"""

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from ._validation import check_int, check_open_unit, check_positive
from .core import COULOMB, HARMONIC, CentralPotential, RescaledPotential
from .errors import DomainError, QuantumNumberError, SearchError, UsageError

DEFAULT_POINTS = 20000
MIN_POINTS = 1000
RMAX_FACTOR = 50.0
RMAX_CONFINING = 12.0
SOLVER_RTOL = 1e-6

_BIG = 1e120


@numba.njit(cache=True)
def _numerov_outward(g, h, u1, w0, stop):
    """Outward Numerov sweep from u(0) = 0; returns (u[0..stop], sign changes)."""
    u = np.zeros(stop + 1)
    u[1] = u1
    h12 = h * h / 12.0
    w_prev = w0
    w = (1.0 - h12 * g[1]) * u1
    nodes = 0
    for i in range(1, stop):
        w_next = 2.0 * w - w_prev + h * h * g[i] * u[i]
        u[i + 1] = w_next / (1.0 - h12 * g[i + 1])
        if u[i + 1] * u[i] < 0.0:
            nodes += 1
        w_prev = w
        w = w_next
        if abs(u[i + 1]) > _BIG:
            for j in range(i + 2):
                u[j] /= _BIG
            w_prev /= _BIG
            w /= _BIG
    return u, nodes


@numba.njit(cache=True)
def _numerov_inward(g, h, start):
    """Inward Numerov sweep from u(r_max) = 0 down to index ``start``."""
    n = len(g)
    u = np.zeros(n)
    u[n - 2] = 1e-30
    h12 = h * h / 12.0
    w_next = 0.0
    w = (1.0 - h12 * g[n - 2]) * u[n - 2]
    for i in range(n - 2, start, -1):
        w_prev = 2.0 * w - w_next + h * h * g[i] * u[i]
        u[i - 1] = w_prev / (1.0 - h12 * g[i - 1])
        w_next = w
        w = w_prev
        if abs(u[i - 1]) > _BIG:
            for j in range(i - 1, n):
                u[j] /= _BIG
            w_next /= _BIG
            w /= _BIG
    return u


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid.

    ``r_max=None`` picks 50 n**2 characteristic lengths for potentials that
    vanish at infinity and 12 sqrt(n) lengths for confining ones, whose
    states decay like a Gaussian.
    """

    r_max: float = None
    n_points: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.r_max is not None:
            check_positive(self.r_max, "r_max")
        if int(self.n_points) < MIN_POINTS:
            raise DomainError(f"n_points must be >= {MIN_POINTS}, got {self.n_points}")


@dataclass(frozen=True)
class RadialProblem:
    """-(1/2m) u'' + [V + l(l+1)/(2 m r**2)] u = E u on [0, r_max]."""

    mass_coefficient: float
    potential: object
    angular_momentum_l: int
    r_max: float
    n_points: int = DEFAULT_POINTS

    def __post_init__(self):
        check_positive(self.mass_coefficient, "mass_coefficient")
        check_positive(self.r_max, "r_max")
        check_int(self.angular_momentum_l, "l")
        if int(self.n_points) < MIN_POINTS:
            raise DomainError(f"n_points must be >= {MIN_POINTS}, got {self.n_points}")

    @property
    def r(self):
        return np.linspace(0.0, self.r_max, int(self.n_points))

    def effective_potential(self, r):
        l = self.angular_momentum_l
        with np.errstate(divide="ignore"):
            return self.potential(r) + l * (l + 1) / (2.0 * self.mass_coefficient * r * r)

    def characteristic_length(self):
        return self.potential.characteristic_length(self.mass_coefficient)


@dataclass(frozen=True)
class RadialSolution:
    """A bound state: eigenvalue plus normalised ``u(r)`` with ``∫u² dr = 1``."""

    energy: float
    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    n: int
    l: int
    n_radial: int
    converged: bool
    residual: float
    mass: float
    potential: object = field(repr=False)

    @property
    def step(self):
        return self.r[1] - self.r[0]

    @property
    def norm(self):
        return float(simpson(self.u**2, x=self.r))

    def radial_function(self, r=None):
        """R(r) = u(r)/r, extended to the origin by its limit."""
        if r is None:
            r = self.r
            u = self.u
        else:
            r = np.asarray(r, dtype=float)
            u = self.interpolate(r)
        out = np.empty_like(r)
        nz = r > 0
        out[nz] = u[nz] / r[nz]
        # linear extrapolation of u/r from the first two interior points
        r0 = 2.0 * self.u[1] / self.r[1] - self.u[2] / self.r[2]
        out[~nz] = r0 if self.l == 0 else 0.0
        return out

    def interpolate(self, r):
        spline = CubicSpline(self.r, self.u)
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.r[-1], spline(np.minimum(r, self.r[-1])), 0.0)

    def kinetic_energy(self):
        """<T> from the gradient of u, independent of the eigenvalue."""
        du = np.gradient(self.u, self.r, edge_order=2)
        centrifugal = np.zeros_like(self.u)
        centrifugal[1:] = self.l * (self.l + 1) * (self.u[1:] / self.r[1:]) ** 2
        return float(simpson(du**2 + centrifugal, x=self.r)) / (2.0 * self.mass)

    def potential_energy(self):
        v = np.zeros_like(self.u)
        v[1:] = self.potential(self.r[1:]) * self.u[1:] ** 2
        return float(simpson(v, x=self.r))


def _shooting_terms(problem, energy):
    r = problem.r
    h = r[1] - r[0]
    m = problem.mass_coefficient
    l = problem.angular_momentum_l
    g = np.empty_like(r)
    with np.errstate(divide="ignore"):
        g[1:] = 2.0 * m * (problem.potential(r[1:]) - energy) + l * (l + 1) / r[1:] ** 2
    g[0] = 0.0
    # lim_{r->0} g u for u ~ r**(l+1) (1 + a r): centrifugal part for l == 1,
    # Coulomb-like part for l == 0
    tail = problem.potential.origin_limit()
    if l == 0:
        limit_gu = 2.0 * m * tail
    elif l == 1:
        limit_gu = 2.0
    else:
        limit_gu = 0.0
    a = m * tail / (l + 1)
    u1 = h ** (l + 1) * (1.0 + a * h)
    w0 = -h * h / 12.0 * limit_gu
    return g, h, u1, w0


def _count_nodes(problem, energy):
    g, h, u1, w0 = _shooting_terms(problem, energy)
    _, nodes = _numerov_outward(g, h, u1, w0, len(g) - 1)
    return nodes


def _matching_index(problem, energy):
    r = problem.r
    veff = problem.effective_potential(r[1:])
    allowed = np.nonzero(veff < energy)[0]
    n = len(r)
    idx = (allowed[-1] + 1) if len(allowed) else n // 2
    return int(min(max(idx, 10), n - 12))


def _match(problem, energy, m):
    g, h, u1, w0 = _shooting_terms(problem, energy)
    out, _ = _numerov_outward(g, h, u1, w0, m + 1)
    inn = _numerov_inward(g, h, m)
    a = np.array([out[m], out[m + 1]])
    b = np.array([inn[m], inn[m + 1]])
    wronskian = (a[0] * b[1] - a[1] * b[0]) / (np.linalg.norm(a) * np.linalg.norm(b))
    return wronskian, out, inn, a, b


def energy_window(problem):
    """Scan window (V_min, upper) for bound levels on the grid."""
    r = problem.r[1:]
    veff = problem.effective_potential(r)
    lower = float(np.min(veff))
    upper = 0.0 if problem.potential.vanishes_at_infinity else float(veff[-1])
    return lower, upper


def solve(problem, n):
    """Bound state with principal number ``n`` (radial nodes ``n - l - 1``)."""
    l = problem.angular_momentum_l
    n = check_int(n, "n", minimum=1)
    if n < l + 1:
        raise QuantumNumberError(f"n={n} requires l <= n - 1, got l={l}")
    n_radial = n - l - 1
    lower, upper = energy_window(problem)
    if _count_nodes(problem, upper) < n_radial + 1:
        raise SearchError(
            f"level n={n}, l={l} is not bracketed below E={upper:.6g}; enlarge r_max"
        )
    lo, hi = lower, upper
    scale = max(abs(lower), abs(upper), 1e-300)
    # Sturm bisection until exactly one level is enclosed and the bracket is narrow
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _count_nodes(problem, mid) > n_radial:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-6 * scale and _count_nodes(problem, lo) == n_radial:
            break
    m = _matching_index(problem, 0.5 * (lo + hi))
    f_lo = _match(problem, lo, m)[0]
    f_hi = _match(problem, hi, m)[0]
    converged = True
    if f_lo * f_hi > 0:
        energy = 0.5 * (lo + hi)
        converged = False
    else:
        energy, info = brentq(
            lambda e: _match(problem, e, m)[0], lo, hi, xtol=1e-15 * scale, rtol=1e-15,
            full_output=True,
        )
        converged = bool(info.converged)
    residual, out, inn, a, b = _match(problem, energy, m)
    c = float(a @ b) / float(b @ b)
    u = np.concatenate([out[: m + 1], c * inn[m + 1:]])
    r = problem.r
    norm = simpson(u**2, x=r)
    u = u / math.sqrt(norm)
    # fix the overall sign so that u > 0 next to the origin
    if u[1] < 0:
        u = -u
    nodes = int(np.count_nonzero(u[1:-2] * u[2:-1] < 0))
    if nodes != n_radial:
        converged = False
    return RadialSolution(
        energy=float(energy),
        r=r,
        u=u,
        n=n,
        l=l,
        n_radial=nodes,
        converged=converged,
        residual=abs(float(residual)),
        mass=problem.mass_coefficient,
        potential=problem.potential,
    )


def _problem(mass, potential, n, l, grid, length_scale=1.0):
    grid = grid if grid is not None else RadialGrid()
    if isinstance(grid, dict):
        grid = RadialGrid(**grid)
    if grid.r_max is None:
        length = potential.characteristic_length(mass)
        if potential.vanishes_at_infinity:
            r_max = RMAX_FACTOR * n * n * length
        else:
            r_max = RMAX_CONFINING * math.sqrt(n) * length
    else:
        r_max = grid.r_max * length_scale
    return RadialProblem(mass, potential, l, r_max, int(grid.n_points))


def solve_relative(sys, V, n, l, grid=None):
    """Eigenstate of the reduced-mass particle in ``V``."""
    n = check_int(n, "n", minimum=1)
    l = check_int(l, "l")
    if n < l + 1:
        raise QuantumNumberError(f"n={n} requires l <= n - 1, got l={l}")
    return solve(_problem(sys.reduced_mass, V, n, l, grid), n)


def solve_individual(sys, V, body_index, n, l, grid=None):
    """Eigenstate of body ``body_index`` in its own rescaled potential.

    The operator is ``-(eta**2 / 2 m_i) ∇² + eta V(r_i / eta)`` with ``eta``
    the partner's mass fraction.  An explicit ``grid.r_max`` is given in
    relative-distance units and is multiplied by ``eta``, so the individual
    grid is the relative grid shrunk by the unit-of-length ratio.
    """
    n = check_int(n, "n", minimum=1)
    l = check_int(l, "l")
    if n < l + 1:
        raise QuantumNumberError(f"n={n} requires l <= n - 1, got l={l}")
    eta = sys.eta_other(body_index)
    mass = sys.mass(body_index) / eta**2
    potential = RescaledPotential(V, eta)
    return solve(_problem(mass, potential, n, l, grid, length_scale=eta), n)


def compare_scaled_wavefunctions(rel, ind, eta, *, warn_threshold=1e-3):
    """Max |u_ind(r_i) - eta**-0.5 u_rel(r_i / eta)| over the individual grid.

    The ``eta**-0.5`` factor keeps the dilated function normalised.
    Different ``l`` is an error; a different ``n`` is computed and reported
    with a :class:`UserWarning` since it is a legitimate negative control.
    """
    eta = float(eta)
    if not (0.0 < eta <= 1.0):
        check_open_unit(eta, "eta")
    if rel.l != ind.l:
        raise UsageError(f"cannot compare l={rel.l} with l={ind.l}")
    r_i = ind.r
    dilated = rel.interpolate(r_i / eta) / math.sqrt(eta)
    deviation = float(np.max(np.abs(ind.u - dilated)))
    if rel.n != ind.n:
        warnings.warn(
            f"comparing different levels n={rel.n} and n={ind.n}: deviation {deviation:.3g}",
            UserWarning,
            stacklevel=2,
        )
    elif deviation > warn_threshold:
        warnings.warn(f"scaled wavefunctions differ by {deviation:.3g}", UserWarning,
                      stacklevel=2)
    return deviation


def exact_energy(mass, V, n, l):
    """Closed-form level for Coulomb and oscillator potentials, else ``None``."""
    base = V.closed_form() if isinstance(V, RescaledPotential) else V
    if base.kind == COULOMB:
        k = base.params[0]
        return -mass * k * k / (2.0 * n * n)
    if base.kind == HARMONIC:
        omega = math.sqrt(base.params[0] / mass)
        return (2 * (n - l - 1) + l + 1.5) * omega
    return None


def virial_ratio(sol):
    """2 <T> / <r dV/dr>; equals 1 for every bound state of a power law."""
    # r V'(r) u² and V u² vanish at the origin for every admissible power
    moment = np.zeros_like(sol.u)
    moment[1:] = sol.r[1:] * sol.potential.derivative(sol.r[1:]) * sol.u[1:] ** 2
    force_moment = float(simpson(moment, x=sol.r))
    return 2.0 * sol.kinetic_energy() / force_moment


__all__ = [
    "CentralPotential",
    "RadialGrid",
    "RadialProblem",
    "RadialSolution",
    "SOLVER_RTOL",
    "compare_scaled_wavefunctions",
    "energy_window",
    "exact_energy",
    "solve",
    "solve_individual",
    "solve_relative",
    "virial_ratio",
]
