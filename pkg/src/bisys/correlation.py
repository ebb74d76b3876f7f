"""Centre-of-mass smearing and the position/momentum correlation trade-off.

The bound-state wavefunction is modelled as a product of the two individual
wavefunctions times a Gaussian in the centre-of-mass position,
``(sigma / sqrt(2 pi))**1.5 exp(-r_cm**2 sigma**2)``.  Integrating the
centre of mass out leaves a Gaussian weight on the total momentum of width
``sigma``, so both spreads have closed forms.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.special import spherical_jn

from ._validation import check_positive
from .errors import UsageError

_CHUNK = 64


@dataclass(frozen=True)
class CMGaussian:
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "sigma", check_positive(self.sigma, "sigma"))

    def amplitude(self, r_cm):
        """Position-space factor at distance ``r_cm`` from the origin.

        The prefactor is kept as conventionally written, which gives an
        L2 norm of 1/8 rather than 1; only moments (ratios) are used.
        """
        s = self.sigma
        r_cm = np.asarray(r_cm, dtype=float)
        return (s / math.sqrt(2.0 * math.pi)) ** 1.5 * np.exp(-(r_cm**2) * s * s)

    def momentum_amplitude(self, q):
        """Unit-normalised momentum-space factor of the same width."""
        s = self.sigma
        q = np.asarray(q, dtype=float)
        return (math.sqrt(2.0 * math.pi) * s) ** -1.5 * np.exp(-(q**2) / (4.0 * s * s))


def cm_position_spread(sigma):
    """<r_cm**2> under the density |Δ_σ|² ∝ exp(-2 σ² r_cm²), i.e. 3 / (4 σ²)."""
    sigma = check_positive(sigma, "sigma")
    return 3.0 / (4.0 * sigma * sigma)


def total_momentum_spread(sigma):
    """<(k1 + k2)**2> under exp(-(k1 + k2)**2 / (2 σ²)), i.e. 3 σ²."""
    sigma = check_positive(sigma, "sigma")
    return 3.0 * sigma * sigma


@dataclass(frozen=True)
class CorrelationReport:
    sigma: float
    cm_position_variance: float
    total_momentum_variance: float
    small_r_exponent: float = float("nan")

    def as_dict(self):
        return {
            "sigma": self.sigma,
            "cm_position_variance": self.cm_position_variance,
            "total_momentum_variance": self.total_momentum_variance,
            "small_r_exponent": self.small_r_exponent,
        }


def correlation_ladder(sigmas, small_r_exponent=float("nan")):
    """One :class:`CorrelationReport` per sigma, in the order given.

    ``small_r_exponent`` is the fitted exponent of the correlated product
    wavefunction; it does not depend on sigma and is copied into each row.
    """
    return [
        CorrelationReport(
            sigma=float(s),
            cm_position_variance=cm_position_spread(s),
            total_momentum_variance=total_momentum_spread(s),
            small_r_exponent=float(small_r_exponent),
        )
        for s in sigmas
    ]


def is_monotone_tradeoff(reports):
    """Position spread strictly falls and momentum spread strictly rises with sigma."""
    ordered = sorted(reports, key=lambda rep: rep.sigma)
    pos = np.array([rep.cm_position_variance for rep in ordered])
    mom = np.array([rep.total_momentum_variance for rep in ordered])
    return bool(np.all(np.diff(pos) < 0) and np.all(np.diff(mom) > 0))


@dataclass(frozen=True)
class MomentumWavefunction:
    """Radial momentum amplitude phi_l(k) with ∫ |phi|² k² dk = ∫ u² dr."""

    k: np.ndarray
    phi: np.ndarray
    l: int

    def norm(self):
        return float(simpson(self.phi**2 * self.k**2, x=self.k))

    def density(self):
        """|psi(k)|² up to the angular factor."""
        return self.phi**2


def _check_k_grid(k, r):
    k = np.asarray(k, dtype=float)
    if k.ndim != 1 or len(k) < 3:
        raise UsageError("k grid must be one-dimensional with at least three points")
    if np.any(k < 0) or np.any(np.diff(k) <= 0):
        raise UsageError("k grid must be non-negative and strictly increasing")
    h = r[1] - r[0]
    if k[-1] > math.pi / h:
        raise UsageError(
            f"k_max={k[-1]:.4g} exceeds the r-grid Nyquist limit pi/dr={math.pi / h:.4g}"
        )
    dk = float(np.max(np.diff(k)))
    if dk > math.pi / r[-1]:
        raise UsageError(
            f"k spacing {dk:.4g} undersamples a function of extent r_max={r[-1]:.4g}"
            f" (need <= {math.pi / r[-1]:.4g})"
        )
    return k


def _bessel_quadrature(l, outer, inner, weights):
    """sqrt(2/pi) * ∫ weights(inner) j_l(outer*inner) d(inner) for every outer."""
    out = np.empty(len(outer))
    for start in range(0, len(outer), _CHUNK):
        block = outer[start:start + _CHUNK]
        kernel = spherical_jn(l, np.outer(block, inner))
        out[start:start + _CHUNK] = simpson(kernel * weights, x=inner, axis=1)
    return math.sqrt(2.0 / math.pi) * out


def momentum_wavefunction(sol, grid_k):
    """Spherical Bessel transform of order ``sol.l`` of ``u(r)``.

    phi_l(k) = sqrt(2/pi) ∫ u(r) r j_l(k r) dr, evaluated by quadrature on the
    solution's radial grid.
    """
    k = _check_k_grid(grid_k, sol.r)
    phi = _bessel_quadrature(sol.l, k, sol.r, sol.u * sol.r)
    return MomentumWavefunction(k=k, phi=phi, l=sol.l)


def inverse_momentum_transform(mom, r):
    """u(r) = sqrt(2/pi) r ∫ phi_l(k) k² j_l(k r) dk on the momentum grid."""
    r = np.asarray(r, dtype=float)
    return r * _bessel_quadrature(mom.l, r, mom.k, mom.phi * mom.k**2)


@dataclass(frozen=True)
class SmallRExponents:
    """Fitted small-r exponents; iterates as ``(relative, product)``.

    The ``*_stderr`` fields are least-squares standard errors and ``window``
    is the (r_lo, r_hi) range used, in the relative coordinate.
    """

    relative: float
    product: float
    relative_stderr: float
    product_stderr: float
    window: tuple

    def __iter__(self):
        return iter((self.relative, self.product))

    def confidence_interval(self, which="product", z=1.96):
        value = getattr(self, which)
        err = getattr(self, f"{which}_stderr")
        return value - z * err, value + z * err


def _fit_exponent(r, values):
    """Slope s of log|f| = s log r + a + b r, with its standard error.

    The linear-in-r term absorbs the first analytic correction (for example
    the exponential tail of bound states) so that a short window next to the
    origin still resolves the leading power.
    """
    y = np.log(np.abs(values))
    design = np.column_stack([np.log(r), np.ones_like(r), r])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = max(len(r) - 3, 1)
    cov = np.linalg.pinv(design.T @ design) * float(resid @ resid) / dof
    return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))


def small_r_exponent(rel, ind1, ind2, *, eta1=None, eta2=None, min_points=20):
    """Leading small-r power of R(r) and of the correlated product.

    ``rel`` is the relative solution and ``ind1``/``ind2`` the individual
    ones.  With the centre of mass pinned (sigma -> infinity) the product is
    R_1(eta2 r) R_2(eta1 r).  The mass fractions default to the ratio of the
    grids, which :func:`bisys.schrodinger.solve_individual` builds by shrinking
    the relative grid by the partner's mass fraction.
    """
    if not (rel.l == ind1.l == ind2.l):
        raise UsageError("all three solutions must share l")
    eta2 = ind1.r[-1] / rel.r[-1] if eta2 is None else float(eta2)
    eta1 = ind2.r[-1] / rel.r[-1] if eta1 is None else float(eta1)
    r = rel.r
    length = rel.potential.characteristic_length(rel.mass)
    hi_idx = max(int(np.searchsorted(r, 0.05 * length, side="right")) - 1, 5 + min_points)
    window = r[5:hi_idx + 1]
    psi = rel.radial_function(window)
    product = ind1.radial_function(eta2 * window) * ind2.radial_function(eta1 * window)
    slope_rel, err_rel = _fit_exponent(window, psi)
    slope_prod, err_prod = _fit_exponent(window, product)
    return SmallRExponents(
        relative=slope_rel,
        product=slope_prod,
        relative_stderr=err_rel,
        product_stderr=err_prod,
        window=(float(window[0]), float(window[-1])),
    )
