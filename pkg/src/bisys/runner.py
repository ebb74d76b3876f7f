"""Execute a :class:`~bisys.config.RunConfig` and collect pass/fail gates."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import classical, correlation, dirac, schrodinger
from .core import COULOMB, make_system
from .errors import BisysError
from .io import write_csv, write_json

log = logging.getLogger(__name__)

DIRAC_REDUCTION_COUPLINGS = (0.1, 0.3, 0.6, 0.9)


class ExperimentError(BisysError):
    """A module error re-raised with the name of the experiment it came from."""

    def __init__(self, experiment, cause):
        super().__init__(f"[{experiment}] {type(cause).__name__}: {cause}")
        self.experiment = experiment
        self.cause = cause


@dataclass
class Gate:
    experiment: str
    name: str
    passed: bool
    measured: float
    threshold: float

    def as_dict(self):
        return {
            "experiment": self.experiment,
            "name": self.name,
            "passed": bool(self.passed),
            "measured": float(self.measured),
            "threshold": float(self.threshold),
        }


@dataclass
class ReportBundle:
    mode: str
    gates: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    files: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.errors and all(g.passed for g in self.gates)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def gate(self, experiment, name, measured, threshold, passed=None):
        measured = float(measured)
        if passed is None:
            passed = math.isfinite(measured) and measured <= threshold
        self.gates.append(Gate(experiment, name, bool(passed), measured, float(threshold)))
        log.info("%-11s %-40s %s  measured=%.3e threshold=%.3e", experiment, name,
                 "PASS" if passed else "FAIL", measured, threshold)

    def summary(self):
        return {
            "mode": self.mode,
            "passed": self.passed,
            "gates": [g.as_dict() for g in self.gates],
            "errors": list(self.errors),
            "files": sorted(self.files),
        }


def _rel(a, b):
    return abs(a - b) / abs(b)


def _run_classical(cfg, sys, out, bundle):
    section, tol = cfg.classical, cfg.tolerances
    V = cfg.potential
    rel0 = classical.ClassicalState(0.0, section["r0"], section["v0"])
    period = classical.characteristic_period(sys, V, rel0)
    dt = period / section["steps_per_period"]
    t_end = section["periods"] * period
    nsteps = classical._step_count(t_end, dt)
    stride = section["stride"]
    while nsteps % stride:
        stride -= 1
    traj = classical.simulate(sys, V, rel0, t_end, dt, stride=stride,
                              energy_tol=section["energy_tol"])
    rep = classical.check_equivalence(traj, sys)
    name = "classical"
    bundle.gate(name, "cm_consistent", 0.0 if rep.cm_consistent else 1.0, 0.5)
    bundle.gate(name, "collinearity_body1/max_r", rep.collinearity_1 / rep.max_radius,
                tol["collinearity"])
    bundle.gate(name, "collinearity_body2/max_r", rep.collinearity_2 / rep.max_radius,
                tol["collinearity"])
    bundle.gate(name, "energy_split_body1/|E|", rep.energy_split_1 / rep.energy_scale,
                tol["energy_split"])
    bundle.gate(name, "energy_split_body2/|E|", rep.energy_split_2 / rep.energy_scale,
                tol["energy_split"])
    bundle.gate(name, "angular_momentum_split_body1/|L|",
                rep.angular_momentum_split_1 / rep.angular_momentum_scale,
                tol["angular_momentum_split"])
    bundle.gate(name, "angular_momentum_split_body2/|L|",
                rep.angular_momentum_split_2 / rep.angular_momentum_scale,
                tol["angular_momentum_split"])
    momentum_scale = sys.reduced_mass * float(np.max(np.linalg.norm(traj.relative.velocity,
                                                                     axis=1)))
    bundle.gate(name, "momentum_balance/(mu max|v|)", rep.momentum_balance / momentum_scale,
                tol["momentum_balance"])
    for label, tr in (("relative", traj.relative), ("body1", traj.body1), ("body2", traj.body2)):
        bundle.gate(name, f"energy_drift_{label}", tr.energy_drift, section["energy_tol"])

    header = ["t"] + [f"{who}_{q}" for who in ("rel", "body1", "body2")
                      for q in ("rx", "ry", "rz", "vx", "vy", "vz")]
    rows = np.column_stack([
        traj.relative.t,
        traj.relative.position, traj.relative.velocity,
        traj.body1.position, traj.body1.velocity,
        traj.body2.position, traj.body2.velocity,
    ])
    path = write_csv(out / "trajectory.csv", header, (list(map(float, row)) for row in rows))
    bundle.files.append(path.name)
    summary = rep.as_dict()
    summary.update(period=period, dt=traj.relative.step, n_steps=nsteps, stride=stride)
    path = write_json(out / "classical_equivalence.json", summary)
    bundle.files.append(path.name)


def _run_schrodinger(cfg, sys, out, bundle):
    section, tol = cfg.schrodinger, cfg.tolerances
    V = cfg.potential
    grid = schrodinger.RadialGrid(n_points=section["n_points"])
    stride = section["output_stride"]
    name = "schrodinger"
    records = []
    for n, l in section["states"]:
        tag = f"n{n}_l{l}"
        rel = schrodinger.solve_relative(sys, V, n, l, grid)
        ind1 = schrodinger.solve_individual(sys, V, 1, n, l, grid)
        ind2 = schrodinger.solve_individual(sys, V, 2, n, l, grid)
        exact = schrodinger.exact_energy(sys.reduced_mass, V, n, l)
        if exact is not None:
            bundle.gate(name, f"{tag}_eigenvalue_vs_closed_form", _rel(rel.energy, exact),
                        tol["eigenvalue"])
        bundle.gate(name, f"{tag}_E1/(eta2 E)-1", _rel(ind1.energy, sys.eta2 * rel.energy),
                    tol["scaling"])
        bundle.gate(name, f"{tag}_E2/(eta1 E)-1", _rel(ind2.energy, sys.eta1 * rel.energy),
                    tol["scaling"])
        same_nodes = rel.n_radial == ind1.n_radial == ind2.n_radial == n - l - 1
        bundle.gate(name, f"{tag}_node_counts_equal", 0.0 if same_nodes else 1.0, 0.5)
        bundle.gate(name, f"{tag}_normalization", max(abs(s.norm - 1) for s in (rel, ind1, ind2)),
                    tol["normalization"])
        if V.kind == COULOMB:
            bundle.gate(name, f"{tag}_virial", abs(schrodinger.virial_ratio(rel) - 1),
                        tol["virial"])
        dev1 = schrodinger.compare_scaled_wavefunctions(rel, ind1, sys.eta2)
        dev2 = schrodinger.compare_scaled_wavefunctions(rel, ind2, sys.eta1)
        bundle.gate(name, f"{tag}_wavefunction_similarity", max(dev1, dev2), tol["wavefunction"])
        for label, sol in (("rel", rel), ("body1", ind1), ("body2", ind2)):
            path = write_csv(out / f"wavefunction_{tag}_{label}.csv", ["r", "u"],
                             zip(sol.r[::stride], sol.u[::stride]))
            bundle.files.append(path.name)
        records.append({
            "n": n, "l": l,
            "E": rel.energy, "E1": ind1.energy, "E2": ind2.energy,
            "E_closed_form": exact,
            "nodes": [rel.n_radial, ind1.n_radial, ind2.n_radial],
            "wavefunction_deviation": [dev1, dev2],
        })
    path = write_json(out / "schrodinger_levels.json", records)
    bundle.files.append(path.name)


def _run_correlation(cfg, sys, out, bundle):
    section, tol = cfg.correlation, cfg.tolerances
    V = cfg.potential
    name = "correlate"
    n, l = section["state"]
    grid = schrodinger.RadialGrid(n_points=section["n_points"])
    rel = schrodinger.solve_relative(sys, V, n, l, grid)
    ind1 = schrodinger.solve_individual(sys, V, 1, n, l, grid)
    ind2 = schrodinger.solve_individual(sys, V, 2, n, l, grid)
    fit = correlation.small_r_exponent(rel, ind1, ind2, eta1=sys.eta1, eta2=sys.eta2)
    reports = correlation.correlation_ladder(section["sigmas"], fit.product)
    for rep in reports:
        product = rep.cm_position_variance * rep.total_momentum_variance
        bundle.gate(name, f"sigma={rep.sigma:g}_spread_product-9/4", abs(product - 2.25),
                    tol["product"])
    bundle.gate(name, "monotone_tradeoff", 0.0 if correlation.is_monotone_tradeoff(reports) else 1.0,
                0.5)
    bundle.gate(name, f"n{n}_l{l}_relative_exponent-l", abs(fit.relative - l), tol["exponent"])
    bundle.gate(name, f"n{n}_l{l}_product_exponent-2l", abs(fit.product - 2 * l), tol["exponent"])
    path = write_json(out / "correlation.json", [r.as_dict() for r in reports])
    bundle.files.append(path.name)


def _run_dirac(cfg, sys, out, bundle):
    section, tol = cfg.dirac, cfg.tolerances
    name = "dirac"
    variant = section["variant"]
    worst = 0.0
    for x in DIRAC_REDUCTION_COUPLINGS:
        lvl = dirac.dirac_energy(sys.m1, x, 1, Fraction(1, 2))
        worst = max(worst, _rel(lvl.energy, sys.m1 * math.sqrt(1 - x * x)))
    bundle.gate(name, "n1_j1/2_reduction", worst, tol["dirac_reduction"])

    rows = dirac.spectrum_table(sys, section["zalpha"], section["levels"], variant)
    min_defect = min(r.mass_defect for r in rows)
    bundle.gate(name, "mass_defect_positive", 0.0 if min_defect > 0 else 1.0, 0.5)
    ladder = section["ladder"]
    for n, j in section["levels"]:
        tag = f"n{n}_j{j}"
        limit = dirac.defect_alpha2_limit(sys, n, j, ladder)
        bundle.gate(name, f"{tag}_defect/Za^2_limit", _rel(limit, sys.reduced_mass / (2 * n * n)),
                    tol["defect_limit"])
        values = [dirac.level_difference_numeric(sys, x, n, j, variant) for x in ladder]
        ratios = [a.energy / b.energy for a, b in zip(values, values[1:])]
        bundle.gate(name, f"{tag}_D_ratio_vs_16", max(abs(q / 16 - 1) for q in ratios),
                    tol["alpha4_ratio"])
        bundle.gate(name, f"{tag}_alpha2_cancellation/M", abs(values[0].alpha2_coefficient)
                    / sys.total_mass, tol["alpha2_cancel"])
        if variant == "b":
            za = section["formula_zalpha"]
            numeric = dirac.level_difference_numeric(sys, za, n, j, variant).energy
            formula = dirac.level_difference_formula(sys, za, n, j)
            bundle.gate(name, f"{tag}_D_numeric_vs_formula", _rel(numeric, formula),
                        tol["formula_agreement"])
    header = ["n", "j", "Zalpha", "E1", "E2", "M_a", "defect", "old_energy", "D_formula",
              "D_numeric", "variant"]
    path = write_csv(out / "spectrum.csv", header, (
        [r.n, r.j, r.Zalpha, r.E1, r.E2, r.M_a, r.mass_defect, r.old_energy, r.D_formula,
         r.D_numeric, r.variant] for r in rows))
    bundle.files.append(path.name)


EXPERIMENTS = {
    "classical": _run_classical,
    "schrodinger": _run_schrodinger,
    "correlation": _run_correlation,
    "dirac": _run_dirac,
}


def run(config, out_dir=None, *, raise_errors=False):
    """Run every experiment enabled by ``config.mode``; write ``summary.json``.

    Module errors are recorded in the bundle (and fail the run) unless
    ``raise_errors`` is set, in which case they are re-raised as
    :class:`ExperimentError`.
    """
    out = Path(out_dir if out_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    bundle = ReportBundle(mode=config.mode)
    sys = make_system(config.m1, config.m2)
    for section in config.sections():
        try:
            EXPERIMENTS[section](config, sys, out, bundle)
        except BisysError as exc:
            if raise_errors:
                raise ExperimentError(section, exc) from exc
            log.error("%s failed: %s", section, exc)
            bundle.errors.append({"experiment": section, "type": type(exc).__name__,
                                  "message": str(exc)})
    path = write_json(out / "summary.json", bundle.summary())
    bundle.files.append(path.name)
    return bundle
