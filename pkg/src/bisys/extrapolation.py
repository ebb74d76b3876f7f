"""Richardson extrapolation on a geometric ladder."""

import mpmath

from .errors import ExtrapolationError


def richardson_table(values, ratio=2, p0=2, step=2):
    """Full Richardson tableau for samples ``values[i] = f(h / ratio**i)``.

    ``f(h) = f0 + c1 h**p0 + c2 h**(p0 + step) + ...``.  Row ``i`` of the
    result holds the estimates that use samples ``0..i``; the last entry of
    the last row is the best estimate of ``f0``.  Works with floats and
    mpmath numbers alike.
    """
    values = list(values)
    if not values:
        raise ExtrapolationError("empty ladder")
    table = [[values[0]]]
    for i in range(1, len(values)):
        row = [values[i]]
        for k in range(1, i + 1):
            factor = mpmath.mpf(ratio) ** (p0 + (k - 1) * step) if _is_mp(values[i]) else float(
                ratio) ** (p0 + (k - 1) * step)
            row.append(row[k - 1] + (row[k - 1] - table[i - 1][k - 1]) / (factor - 1))
        table.append(row)
    return table


def richardson_limit(values, ratio=2, p0=2, step=2):
    return richardson_table(values, ratio, p0, step)[-1][-1]


def _is_mp(x):
    return isinstance(x, (mpmath.mpf, mpmath.mpc))
