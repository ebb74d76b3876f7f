"""Run configuration: an INI-style document with flat sections.

Grammar: ``;`` and ``#`` start comments, list items are comma separated and
multi-part items (quantum-number pairs) are separated by ``|``::

    [run]
    mode = classical | schrodinger | correlate | dirac | full-report

    [system]
    m1 = 1.0
    m2 = 1.0

    [potential]
    kind = coulomb        ; strength = k
    kind = harmonic       ; stiffness = kappa
    kind = power_law      ; coefficient = c, exponent = p

    [classical]
    r0 = 1, 0, 0
    v0 = 0, 1.2, 0
    periods = 10
    steps_per_period = 10000
    stride = 100
    energy_tol = 1e-6

    [schrodinger]
    states = 1 0 | 2 0 | 2 1 | 3 2        ; (n l) pairs
    n_points = 20000
    output_stride = 10

    [correlation]
    sigmas = 0.1, 1, 10, 100
    state = 2 1

    [dirac]
    zalpha = 0.001, 0.01, 0.0729735
    levels = 1 1/2 | 2 1/2 | 2 3/2
    variant = b
    ladder = 0.02, 0.01, 0.005
    formula_zalpha = 0.01

    [tolerances]
    collinearity = 1e-6
    ...

    [output]
    dir = out

Every key outside this schema is rejected with its line number.
"""

import configparser
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .core import CentralPotential
from .errors import BisysError, ConfigError

MODES = ("classical", "schrodinger", "correlate", "dirac", "full-report")
MODE_SECTIONS = {
    "classical": ("classical",),
    "schrodinger": ("schrodinger",),
    "correlate": ("correlation",),
    "dirac": ("dirac",),
    "full-report": ("classical", "schrodinger", "correlation", "dirac"),
}

DEFAULT_TOLERANCES = {
    "collinearity": 1e-6,
    "energy_split": 1e-8,
    "angular_momentum_split": 1e-8,
    "momentum_balance": 1e-8,
    "eigenvalue": 1e-6,
    "scaling": 1e-5,
    "normalization": 1e-8,
    "virial": 1e-4,
    "wavefunction": 1e-4,
    "product": 1e-12,
    "exponent": 0.05,
    "dirac_reduction": 1e-14,
    "defect_limit": 1e-4,
    "alpha4_ratio": 0.01,
    "alpha2_cancel": 1e-12,
    "formula_agreement": 0.05,
}


class _Missing:
    pass


REQUIRED = _Missing()


def _float(text):
    return float(text)


def _positive(text):
    value = float(text)
    if not value > 0:
        raise ValueError("must be positive")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise ValueError("must be a positive integer")
    return value


def _vec3(text):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("expected three comma-separated numbers")
    return tuple(parts)


def _float_list(text):
    values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ValueError("ladder must not be empty")
    return tuple(values)


def _sorted_ladder(text):
    values = _float_list(text)
    if any(v <= 0 for v in values):
        raise ValueError("ladder entries must be positive")
    if list(values) != sorted(values):
        raise ValueError("ladder must be sorted in increasing order")
    return values


def _halving_ladder(text):
    values = _float_list(text)
    if len(values) < 3:
        raise ValueError("extrapolation ladder needs at least three entries")
    if any(abs(a - 2 * b) > 1e-12 * a for a, b in zip(values, values[1:])):
        raise ValueError("extrapolation ladder must halve at each step (sorted decreasing)")
    return values


def _items(text):
    return [item.split() for item in text.split("|") if item.strip()]


def _states(text):
    states = []
    for item in _items(text):
        if len(item) != 2:
            raise ValueError(f"state {' '.join(item)!r} must be 'n l'")
        states.append((int(item[0]), int(item[1])))
    if not states:
        raise ValueError("no states given")
    return tuple(states)


def _state(text):
    states = _states(text)
    if len(states) != 1:
        raise ValueError("expected a single 'n l' pair")
    return states[0]


def _levels(text):
    levels = []
    for item in _items(text):
        if len(item) != 2:
            raise ValueError(f"level {' '.join(item)!r} must be 'n j'")
        levels.append((int(item[0]), Fraction(item[1])))
    if not levels:
        raise ValueError("no levels given")
    return tuple(levels)


def _variant(text):
    if text not in ("a", "b"):
        raise ValueError("variant must be 'a' or 'b'")
    return text


def _kind(text):
    if text not in ("coulomb", "harmonic", "power_law"):
        raise ValueError("kind must be coulomb, harmonic or power_law")
    return text


def _mode(text):
    if text not in MODES:
        raise ValueError(f"mode must be one of {', '.join(MODES)}")
    return text


SCHEMA = {
    "run": {"mode": (_mode, None)},
    "system": {"m1": (_positive, REQUIRED), "m2": (_positive, REQUIRED)},
    "potential": {
        "kind": (_kind, REQUIRED),
        "strength": (_positive, None),
        "stiffness": (_positive, None),
        "coefficient": (_float, None),
        "exponent": (_float, None),
    },
    "classical": {
        "r0": (_vec3, REQUIRED),
        "v0": (_vec3, REQUIRED),
        "periods": (_positive, 10.0),
        "steps_per_period": (_positive_int, 10000),
        "stride": (_positive_int, 100),
        "energy_tol": (_positive, 1e-6),
    },
    "schrodinger": {
        "states": (_states, REQUIRED),
        "n_points": (_positive_int, 20000),
        "output_stride": (_positive_int, 10),
    },
    "correlation": {
        "sigmas": (_sorted_ladder, REQUIRED),
        "state": (_state, (2, 1)),
        "n_points": (_positive_int, 20000),
    },
    "dirac": {
        "zalpha": (_sorted_ladder, REQUIRED),
        "levels": (_levels, REQUIRED),
        "variant": (_variant, "b"),
        "ladder": (_halving_ladder, (0.02, 0.01, 0.005)),
        "formula_zalpha": (_positive, 0.01),
    },
    "tolerances": {name: (_positive, value) for name, value in DEFAULT_TOLERANCES.items()},
    "output": {"dir": (str, "out")},
}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    m1: float
    m2: float
    potential: CentralPotential
    classical: dict = None
    schrodinger: dict = None
    correlation: dict = None
    dirac: dict = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: str = "out"

    def sections(self):
        return MODE_SECTIONS[self.mode]


_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


def _locate(text):
    """Map sections and (section, key) pairs to their 1-based line numbers."""
    sections, keys = {}, {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1).strip()
            sections.setdefault(current, lineno)
            continue
        if line[:1].isspace():
            continue
        m = _KEY_RE.match(line)
        if m and current is not None:
            keys.setdefault((current, m.group(1).strip().lower()), lineno)
    return sections, keys


def parse_config(text, mode=None):
    """Parse and validate a run configuration document.

    ``mode`` (from the command line) overrides ``[run] mode``.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=(";", "#"), strict=True
    )
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno,
                          exc.option) from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line) from exc
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any section", exc.lineno) from exc

    section_lines, key_lines = _locate(text)
    values = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", section_lines.get(section))
        for key in parser.options(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]",
                                  key_lines.get((section, key)), key)

    def get(section, key):
        conv, default = SCHEMA[section][key]
        if parser.has_option(section, key):
            raw = parser.get(section, key).strip()
            try:
                return conv(raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"invalid value for {key!r} in [{section}]: {exc}",
                                  key_lines.get((section, key)), key) from exc
        if default is REQUIRED:
            raise ConfigError(f"missing required key {key!r} in [{section}]",
                              section_lines.get(section), key)
        return default

    def read_section(name):
        return {key: get(name, key) for key in SCHEMA[name]}

    file_mode = get("run", "mode")
    mode = mode or file_mode
    if mode is None:
        raise ConfigError("missing required key 'mode' (in [run] or on the command line)",
                          section_lines.get("run"), "mode")
    try:
        mode = _mode(mode)
    except ValueError as exc:
        raise ConfigError(str(exc), key="mode") from exc

    for name in ("system", "potential") + MODE_SECTIONS[mode]:
        if not parser.has_section(name):
            raise ConfigError(f"mode {mode!r} requires a [{name}] section")
        values[name] = read_section(name)

    pot = values["potential"]
    param_keys = {"coulomb": ("strength",), "harmonic": ("stiffness",),
                  "power_law": ("coefficient", "exponent")}[pot["kind"]]
    for key in param_keys:
        if pot[key] is None:
            raise ConfigError(f"missing required key {key!r} for a {pot['kind']} potential",
                              section_lines.get("potential"), key)
    try:
        potential = CentralPotential(pot["kind"], tuple(pot[k] for k in param_keys))
    except BisysError as exc:
        raise ConfigError(str(exc), section_lines.get("potential")) from exc

    tolerances = read_section("tolerances") if parser.has_section("tolerances") else dict(
        DEFAULT_TOLERANCES)
    output = read_section("output") if parser.has_section("output") else {"dir": "out"}
    return RunConfig(
        mode=mode,
        m1=values["system"]["m1"],
        m2=values["system"]["m2"],
        potential=potential,
        classical=values.get("classical"),
        schrodinger=values.get("schrodinger"),
        correlation=values.get("correlation"),
        dirac=values.get("dirac"),
        tolerances=tolerances,
        output_dir=output["dir"],
    )
