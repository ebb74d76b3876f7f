"""Classical relative and individual orbits.

The relative coordinate obeys ``mu r'' = -grad V(r)``; body ``i`` obeys
``m_i r_i'' = -grad[eta V(r_i / eta)]`` with ``eta`` the partner's mass
fraction.  Both are integrated with the same fixed-step fourth-order
symmetric composition (Forest-Ruth / Yoshida) so residuals between the two
descriptions measure the physics claim rather than a mismatch in numerics.
"""

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from ._validation import as_vector3, check_non_negative, check_positive
from .core import COULOMB, HARMONIC, CentralPotential, RescaledPotential
from .errors import DomainError, IntegrationError, UsageError

R_MIN = 1e-9
DEFAULT_ENERGY_TOL = 1e-6

_CBRT2 = 2.0 ** (1.0 / 3.0)
_W1 = 1.0 / (2.0 - _CBRT2)
_W0 = -_CBRT2 / (2.0 - _CBRT2)
# drift (c) and kick (d) weights of the 4th-order symmetric composition
_C = np.array([_W1 / 2, (_W0 + _W1) / 2, (_W0 + _W1) / 2, _W1 / 2])
_D = np.array([_W1, _W0, _W1])


@dataclass(frozen=True)
class ClassicalState:
    t: float
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "position", as_vector3(self.position, "position"))
        object.__setattr__(self, "velocity", as_vector3(self.velocity, "velocity"))

    def scaled(self, factor):
        return ClassicalState(self.t, factor * self.position, factor * self.velocity)


@numba.njit(cache=True)
def _radial_force_derivative(code, a, b, s):
    if code == 0:
        return a / (s * s)
    if code == 1:
        return a * s
    return a * b * s ** (b - 1.0)


@numba.njit(cache=True)
def _integrate_kernel(x0, v0, mass, code, a, b, scale, h, nsteps, stride, r_min, c, d):
    nsamples = nsteps // stride + 1
    pos = np.empty((nsamples, 3))
    vel = np.empty((nsamples, 3))
    x = x0.copy()
    v = v0.copy()
    pos[0] = x
    vel[0] = v
    guard = code == 0 or (code == 2 and b < 0.0)
    k = 1
    for step in range(nsteps):
        for stage in range(4):
            x += c[stage] * h * v
            if stage == 3:
                break
            r = math.sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
            s = r / scale
            if guard and s < r_min:
                return pos[:k], vel[:k], step
            if r == 0.0:
                continue
            f = -_radial_force_derivative(code, a, b, s) / (mass * r)
            v += (d[stage] * h * f) * x
        if (step + 1) % stride == 0:
            pos[k] = x
            vel[k] = v
            k += 1
    return pos, vel, -1


@dataclass(frozen=True)
class Trajectory:
    """Samples of one integrated body on a uniform time grid.

    ``energy`` and ``angular_momentum`` are evaluated with the body's own
    mass and potential at every sample.
    """

    t: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    mass: float
    potential: object
    step: float
    energy: np.ndarray = field(repr=False)
    angular_momentum: np.ndarray = field(repr=False)
    energy_drift: float = 0.0
    step_halving_error: float = float("nan")

    def __len__(self):
        return len(self.t)

    def __getitem__(self, index):
        return ClassicalState(self.t[index], self.position[index], self.velocity[index])

    @property
    def radius(self):
        return np.linalg.norm(self.position, axis=1)


def _step_count(t_end, dt):
    ratio = t_end / dt
    nearest = round(ratio)
    if abs(ratio - nearest) <= 1e-9 * max(1.0, ratio):
        return int(nearest)
    return int(math.ceil(ratio))


def _energy(mass, potential, position, velocity):
    r = np.linalg.norm(position, axis=1)
    return 0.5 * mass * np.einsum("ij,ij->i", velocity, velocity) + potential(r)


def _run(mass, potential, ic, t_end, dt, stride, energy_tol, check_convergence, r_min):
    dt = check_positive(dt, "dt")
    t_end = check_non_negative(t_end, "t_end")
    if stride < 1:
        raise DomainError("sample stride must be >= 1")
    nsteps = _step_count(t_end, dt) if t_end > 0 else 0
    h = t_end / nsteps if nsteps else dt
    stride = min(int(stride), max(nsteps, 1))
    if nsteps % stride:
        raise DomainError(f"sample stride {stride} does not divide the {nsteps} steps")
    code, a, b, scale = potential.kernel_params()
    if np.linalg.norm(ic.position) / scale < r_min and (code == 0 or b < 0):
        raise IntegrationError("initial separation is inside the r_min guard", time=ic.t)
    pos, vel, failed = _integrate_kernel(
        ic.position, ic.velocity, mass, code, a, b, scale, h, nsteps, stride, r_min, _C, _D
    )
    if failed >= 0:
        t_fail = ic.t + failed * h
        raise IntegrationError(
            f"separation fell below r_min={r_min:g} at t={t_fail:.6g} (near-collision)",
            time=t_fail,
        )
    t = ic.t + h * stride * np.arange(len(pos))
    energy = _energy(mass, potential, pos, vel)
    scale_e = max(abs(energy[0]), np.finfo(float).tiny)
    rel_dev = np.abs(energy - energy[0]) / scale_e
    drift = float(np.max(rel_dev))
    if drift > energy_tol:
        t_bad = float(t[np.argmax(rel_dev > energy_tol)])
        raise IntegrationError(
            f"relative energy drift {drift:.3e} exceeds tolerance {energy_tol:.1e} "
            f"(first at t={t_bad:.6g}); reduce dt",
            time=t_bad,
        )
    halving = float("nan")
    if check_convergence and nsteps:
        fine_pos, _, failed = _integrate_kernel(
            ic.position, ic.velocity, mass, code, a, b, scale, h / 2, 2 * nsteps, 2 * stride,
            r_min, _C, _D,
        )
        if failed < 0:
            halving = float(np.max(np.linalg.norm(fine_pos - pos, axis=1)))
    return Trajectory(
        t=t,
        position=pos,
        velocity=vel,
        mass=mass,
        potential=potential,
        step=h,
        energy=energy,
        angular_momentum=mass * np.cross(pos, vel),
        energy_drift=drift,
        step_halving_error=halving,
    )


def integrate_relative(sys, V, ic, t_end, dt, *, stride=1, energy_tol=DEFAULT_ENERGY_TOL,
                       check_convergence=False, r_min=R_MIN):
    """Integrate the reduced-mass particle in ``V`` from ``ic`` up to ``t_end``.

    The step is shrunk so that a whole number of steps lands on ``t_end``.
    Raises :class:`IntegrationError` on a near-collision or when the
    relative energy drift exceeds ``energy_tol``.
    """
    return _run(sys.reduced_mass, V, ic, t_end, dt, stride, energy_tol, check_convergence, r_min)


def integrate_individual(sys, V, body_index, ic, t_end, dt, *, stride=1,
                         energy_tol=DEFAULT_ENERGY_TOL, check_convergence=False, r_min=R_MIN):
    """Integrate body 1 or 2 in its rescaled potential.

    Body ``i`` has mass ``m_i`` and moves in ``eta * V(r_i / eta)`` where
    ``eta`` is the mass fraction of the other body.
    """
    eta = sys.eta_other(body_index)
    potential = RescaledPotential(V, eta)
    return _run(sys.mass(body_index), potential, ic, t_end, dt, stride, energy_tol,
                check_convergence, r_min)


def derive_individual_ics(rel0, sys):
    """Centre-of-mass frame states of both bodies from the relative state."""
    return rel0.scaled(sys.eta2), rel0.scaled(-sys.eta1)


def _is_cm_consistent(rel0, body1, body2, sys, rtol=1e-12):
    exp1, exp2 = derive_individual_ics(rel0, sys)
    scale = max(np.linalg.norm(rel0.position), np.linalg.norm(rel0.velocity), 1e-300)
    return all(
        np.linalg.norm(got - want) <= rtol * scale
        for got, want in (
            (body1.position, exp1.position),
            (body1.velocity, exp1.velocity),
            (body2.position, exp2.position),
            (body2.velocity, exp2.velocity),
        )
    )


@dataclass(frozen=True)
class TrajectorySet:
    """Relative and individual runs sharing one time grid."""

    relative: Trajectory
    body1: Trajectory
    body2: Trajectory
    cm_consistent: bool

    @property
    def energies(self):
        """(n, 3) array of (E, E1, E2)."""
        return np.column_stack([self.relative.energy, self.body1.energy, self.body2.energy])

    @property
    def angular_momenta(self):
        """(n, 3, 3) array of (L, L1, L2) vectors."""
        return np.stack(
            [self.relative.angular_momentum, self.body1.angular_momentum,
             self.body2.angular_momentum], axis=1,
        )


def simulate(sys, V, rel0, t_end, dt, *, body_ics=None, stride=1,
             energy_tol=DEFAULT_ENERGY_TOL, check_convergence=False, r_min=R_MIN):
    """Run the relative equation and both individual equations.

    ``body_ics`` overrides the centre-of-mass initial states; such runs are
    integrated but marked ``cm_consistent=False`` unless they happen to
    agree with :func:`derive_individual_ics`.
    """
    ic1, ic2 = derive_individual_ics(rel0, sys) if body_ics is None else body_ics
    opts = dict(stride=stride, energy_tol=energy_tol, check_convergence=check_convergence,
                r_min=r_min)
    return TrajectorySet(
        relative=integrate_relative(sys, V, rel0, t_end, dt, **opts),
        body1=integrate_individual(sys, V, 1, ic1, t_end, dt, **opts),
        body2=integrate_individual(sys, V, 2, ic2, t_end, dt, **opts),
        cm_consistent=_is_cm_consistent(rel0, ic1, ic2, sys),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    """Maximum residuals of the individual description against the relative one.

    All residuals are absolute; ``max_radius``, ``energy_scale`` and
    ``angular_momentum_scale`` are provided for relative gates.
    """

    collinearity_1: float
    collinearity_2: float
    energy_split_1: float
    energy_split_2: float
    angular_momentum_split_1: float
    angular_momentum_split_2: float
    momentum_balance: float
    max_radius: float
    energy_scale: float
    angular_momentum_scale: float
    n_samples: int
    cm_consistent: bool

    def passes(self, position_rtol=1e-6, energy_rtol=1e-8, angular_rtol=1e-8):
        return (
            self.cm_consistent
            and max(self.collinearity_1, self.collinearity_2) <= position_rtol * self.max_radius
            and max(self.energy_split_1, self.energy_split_2) <= energy_rtol * self.energy_scale
            and max(self.angular_momentum_split_1, self.angular_momentum_split_2)
            <= angular_rtol * self.angular_momentum_scale
        )

    def as_dict(self):
        return dict(self.__dict__)


def check_equivalence(traj, sys):
    """Compare a :class:`TrajectorySet` against the centre-of-mass relations."""
    rel, b1, b2 = traj.relative, traj.body1, traj.body2
    if not (len(rel) == len(b1) == len(b2)) or not (
        np.allclose(rel.t, b1.t, rtol=1e-12, atol=0) and np.allclose(rel.t, b2.t, rtol=1e-12, atol=0)
    ):
        raise UsageError("trajectories do not share a time grid")
    e1, e2 = sys.eta1, sys.eta2

    def max_norm(diff):
        return float(np.max(np.linalg.norm(diff, axis=-1)))

    L, L1, L2 = rel.angular_momentum, b1.angular_momentum, b2.angular_momentum
    return EquivalenceReport(
        collinearity_1=max_norm(b1.position - e2 * rel.position),
        collinearity_2=max_norm(b2.position + e1 * rel.position),
        energy_split_1=float(np.max(np.abs(b1.energy - e2 * rel.energy))),
        energy_split_2=float(np.max(np.abs(b2.energy - e1 * rel.energy))),
        angular_momentum_split_1=max_norm(L1 - e2 * L),
        angular_momentum_split_2=max_norm(L2 - e1 * L),
        momentum_balance=max_norm(sys.m1 * b1.velocity + sys.m2 * b2.velocity),
        max_radius=float(np.max(rel.radius)),
        energy_scale=float(np.max(np.abs(rel.energy))),
        angular_momentum_scale=float(np.max(np.linalg.norm(L, axis=-1))),
        n_samples=len(rel),
        cm_consistent=traj.cm_consistent,
    )


def characteristic_period(sys, V, ic):
    """Orbital period used to size runs.

    Exact for bound Coulomb orbits (Kepler's third law from the energy) and
    for the oscillator; otherwise the circular estimate 2 pi |r| / |v|.
    """
    base = V.closed_form() if isinstance(V, RescaledPotential) else V
    mu = sys.reduced_mass
    if base.kind == COULOMB:
        k = base.params[0]
        r = np.linalg.norm(ic.position)
        energy = 0.5 * mu * float(ic.velocity @ ic.velocity) - k / r
        if energy >= 0:
            raise DomainError("unbound Coulomb orbit has no period")
        a = -k / (2.0 * energy)
        return 2.0 * math.pi * math.sqrt(mu * a**3 / k)
    if base.kind == HARMONIC:
        return 2.0 * math.pi * math.sqrt(mu / base.params[0])
    speed = np.linalg.norm(ic.velocity)
    if speed == 0:
        raise DomainError("cannot estimate a period from zero initial speed")
    return 2.0 * math.pi * np.linalg.norm(ic.position) / speed


def circular_orbit_ic(sys, V, radius=1.0):
    """Relative state on a circular orbit of ``radius`` in the xy plane."""
    radius = check_positive(radius, "radius")
    base = V if isinstance(V, CentralPotential) else V.closed_form()
    speed = math.sqrt(radius * float(base.derivative(radius)) / sys.reduced_mass)
    return ClassicalState(0.0, [radius, 0.0, 0.0], [0.0, speed, 0.0])
