"""Exponent thresholds for stable solutions of the biharmonic Lane-Emden problem.

Everything here is generic over the number type: pass Fractions to get
exact results, floats to get floating approximations.  The ground truth
for the appendix bounds is the coefficient ``E`` restricted to the line
``p = (8*gamma + n - 4)/(n - 4)``; the printed sextic is only audited.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact import (
    IntPolynomial,
    RootBracket,
    as_exact,
    interpolate,
    isolate_root,
    sign,
    sturm_count,
)

HALF3 = Fraction(3, 2)

#: grid used by :func:`p_star` before doubling
PSTAR_GRID_START = 512
PSTAR_GRID_CAP = 2**20


# -- scalar formulas --------------------------------------------------------

def _num(x):
    # ints would otherwise fall into float division
    return x if isinstance(x, (float, Fraction)) else as_exact(x)


def p_of_gamma(n: int, gamma):
    """Exponent on the boundary of the admissibility condition ``p < (8g+n-4)/(n-4)``."""
    if n < 5:
        raise ValueError("n must be >= 5")
    return (8 * _num(gamma) + n - 4) / Fraction(n - 4)


def theta_of(gamma, p):
    """Interpolation weight with ``2(1-t) + (2g+p-1) t = 2g``."""
    gamma, p = _num(gamma), _num(p)
    den = 2 * gamma + p - 3
    if den == 0:
        raise ZeroDivisionError("2*gamma + p - 3 vanishes; theta undefined")
    return (2 * gamma - 2) / den


def closing_condition(n: int, gamma, p) -> bool:
    """``p + 2g - 1 > (p - 1) n / 4``; equivalent to ``p < p_of_gamma(n, gamma)`` for n > 4."""
    gamma, p = _num(gamma), _num(p)
    return p + 2 * gamma - 1 > (p - 1) * Fraction(n, 4)


def E_value(gamma, p):
    """Coefficient E(gamma, p) whose positivity closes the Moser-type estimate."""
    gamma, p = _num(gamma), _num(p)
    q = 2 * gamma - 1
    return (
        p * (1 - 4 * (gamma - 1) ** 2)
        - gamma**2 / q
        + 8 * gamma**2 * (gamma - 1) ** 2 / ((4 * gamma - 3 + p) * (p + 1))
    )


def h_value(n: int, gamma):
    """E evaluated on the critical line p = p_of_gamma(n, gamma)."""
    return E_value(gamma, p_of_gamma(n, gamma))


def clearing_factor(n: int, gamma):
    """Positive (on gamma > 1) multiplier turning h into a polynomial in gamma."""
    p = p_of_gamma(n, gamma)
    return (2 * gamma - 1) * (4 * gamma - 3 + p) * (p + 1) * (n - 4) ** 3


def printed_sextic(n: int) -> IntPolynomial:
    """The sextic as printed, instantiated at dimension n."""
    desc = [
        512 * (2 - n),
        4 * (n**3 - 60 * n**2 + 670 * n - 1344),
        -2 * (13 * n**3 - 424 * n**2 + 3064 * n - 5408),
        2 * (27 * n**3 - 572 * n**2 + 3264 * n - 5440),
        -(49 * n**3 - 772 * n**2 + 3776 * n - 5888),
        4 * (5 * n**3 - 66 * n**2 + 288 * n - 416),
        -3 * (n**3 - 12 * n**2 + 48 * n - 64),
    ]
    return IntPolynomial.from_descending(desc)


def printed_quartic(n: int) -> int:
    return n**4 - 18 * n**3 - 56 * n**2 + 384 * n - 512


def printed_h_at_gamma0(n: int) -> Fraction:
    """The appendix's closed form for h((n-4)/(n-8)): 8/(n-8) times the quartic."""
    return Fraction(8, n - 8) * printed_quartic(n)


def gamma0(n: int) -> Fraction:
    return Fraction(n - 4, n - 8)


def cleared_polynomial(n: int) -> IntPolynomial:
    """h(gamma) * clearing_factor(n, gamma), expanded exactly.

    Obtained by exact interpolation of the ground-truth product at 11
    rational nodes, then checked at further nodes, so no hand algebra is
    involved.  The result has degree 6.
    """
    nodes = [Fraction(k, 7) + 1 for k in range(11)]
    values = [h_value(n, g) * clearing_factor(n, g) for g in nodes]
    coeffs = interpolate(nodes, values)
    if len(coeffs) > 7:
        raise ArithmeticError(f"cleared form of h has degree {len(coeffs) - 1} > 6")
    poly = IntPolynomial.from_rational(coeffs)
    if any(Fraction(c).denominator != 1 for c in coeffs):
        raise ArithmeticError("cleared form of h has non-integer coefficients")
    for g in (Fraction(5, 4), Fraction(13, 9), Fraction(-3, 11)):
        if poly(g) != h_value(n, g) * clearing_factor(n, g):
            raise ArithmeticError("interpolated cleared polynomial fails a check node")
    return poly


# -- p* ---------------------------------------------------------------------

def _first_sign_change(values: Sequence[int]) -> Optional[tuple[int, int]]:
    """Index i of the first cell [i, i+1] across which the sign flips.

    Exact zeros on interior nodes are stepped over (the cell is widened to
    the next nonzero node).
    """
    last_i, last_s = None, 0
    for i, s in enumerate(values):
        if s == 0:
            continue
        if last_s and s != last_s:
            return last_i, i
        last_i, last_s = i, s
    return None


def _scan(n: int, lo: Fraction, hi: Fraction, points: int, cache: dict) -> Optional[tuple]:
    step = (hi - lo) / points
    signs = []
    for k in range(points + 1):
        g = lo + k * step
        if g not in cache:
            cache[g] = sign(h_value(n, g))
        signs.append(cache[g])
    cell = _first_sign_change(signs)
    if cell is None:
        return None
    i, j = cell
    return lo + i * step, lo + j * step


@dataclass(frozen=True)
class PStarResult:
    """Bracket for p* plus how it was found and certified."""

    n: int
    bracket: Optional[RootBracket]
    grid_points: int
    certified_smallest: Optional[bool] = None
    roots_in_interval: Optional[int] = None


def p_star_search(n: int, tol=1e-12) -> PStarResult:
    """Locate the smallest sign change of h(n, .) in (gamma0, 3/2).

    The exact sign grid starts at 512 cells and doubles until the first
    sign-change cell is stable under refinement (cap 2**20).  Two
    consecutive levels without a sign change mean "absent".  A found root
    is certified smallest by a Sturm count of the cleared polynomial on
    (gamma0, low).
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if n < 9:
        raise ValueError("p* is defined for n >= 9")
    lo, hi = gamma0(n), HALF3
    if lo >= hi:
        return PStarResult(n, None, 0)
    cache: dict = {}
    points = PSTAR_GRID_START
    cell = _scan(n, lo, hi, points, cache)
    while points < PSTAR_GRID_CAP:
        finer = _scan(n, lo, hi, 2 * points, cache)
        points *= 2
        if cell is None and finer is None:
            break
        if cell is not None and finer is not None and cell[0] <= finer[0] and finer[1] <= cell[1]:
            cell = finer
            break
        cell = finer
    if cell is None:
        return PStarResult(n, None, points)
    f = lambda g: h_value(n, g)
    bracket = isolate_root(f, RootBracket.from_function(f, *cell), tol)
    cleared = cleared_polynomial(n)
    before = sturm_count(cleared, lo, bracket.low) if bracket.low > lo else 0
    total = sturm_count(cleared, lo, hi)
    return PStarResult(n, bracket, points, before == 0, total)


def p_star(n: int, tol=1e-12) -> Optional[RootBracket]:
    return p_star_search(n, tol).bracket


# -- reports ----------------------------------------------------------------

@dataclass(frozen=True)
class ExponentReport:
    n: int
    p_sobolev: Fraction
    p_wy: Optional[Fraction] = None
    gamma0: Optional[Fraction] = None
    p_star: Optional[RootBracket] = None
    p_max: Optional[Fraction] = None
    epsilon_n: Optional[Fraction] = None
    h_gamma0: Optional[Fraction] = None
    h_gamma0_printed: Optional[Fraction] = None
    pstar_certified: Optional[bool] = None
    notes: tuple[str, ...] = ()


def exponent_report(n: int, tol=1e-12) -> ExponentReport:
    """Threshold summary for dimension n.

    p_max uses the upper end of the p* bracket, so the reported
    nonexistence range never overshoots the true threshold by more than
    8*tol/(n-4).
    """
    if n < 5:
        raise ValueError("n must be >= 5")
    p_sob = Fraction(n + 4, n - 4)
    if n <= 8:
        return ExponentReport(n, p_sob, notes=("no stable solution for any p > 1 when n <= 8",))
    g0 = gamma0(n)
    res = p_star_search(n, tol)
    notes = ["p_n in the p_max interval statement is read as p*"]
    p_max = eps = None
    if res.bracket is not None:
        p_max = 1 + 8 * res.bracket.high / (n - 4)
        eps = p_max - Fraction(n, n - 8)
    elif n <= 19:
        notes.append("epsilon_n exists but is not explicit for 9 <= n <= 19")
    return ExponentReport(
        n=n,
        p_sobolev=p_sob,
        p_wy=Fraction(n, n - 8),
        gamma0=g0,
        p_star=res.bracket,
        p_max=p_max,
        epsilon_n=eps,
        h_gamma0=h_value(n, g0),
        h_gamma0_printed=printed_h_at_gamma0(n),
        pstar_certified=res.certified_smallest,
        notes=tuple(notes),
    )


def exponent_reports(ns: Sequence[int], tol=1e-12, workers: int = 1) -> list[ExponentReport]:
    """Reports for several dimensions, in input order regardless of ``workers``."""
    if workers > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(exponent_report, ns, [tol] * len(ns)))
    return [exponent_report(n, tol) for n in ns]


# -- feasibility grid -------------------------------------------------------

@dataclass(frozen=True)
class FeasibilitySample:
    n: int
    gamma: Fraction
    p: Fraction
    q: Fraction
    theta: Fraction
    E: Fraction
    cond_E: bool
    cond_52: bool

    @property
    def admissible(self) -> bool:
        return self.cond_E and self.cond_52


def feasibility_sample(n: int, gamma, p) -> FeasibilitySample:
    gamma, p = as_exact(gamma), as_exact(p)
    e = E_value(gamma, p)
    return FeasibilitySample(
        n=n,
        gamma=gamma,
        p=p,
        q=2 * gamma - 1,
        theta=theta_of(gamma, p),
        E=e,
        cond_E=e > 0,
        cond_52=p < p_of_gamma(n, gamma),
    )


def _gamma_row(args) -> list[FeasibilitySample]:
    n, gamma, ps = args
    return [feasibility_sample(n, gamma, p) for p in ps]


def feasibility_scan(
    n: int, gamma_steps: int, p_steps: int, workers: int = 1
) -> list[FeasibilitySample]:
    """Exact samples on the open grid gamma in (1, 3/2), p in (1, p_sobolev + 1).

    Rows are gamma-major; with ``workers > 1`` gamma rows are computed in
    parallel and reassembled in order.
    """
    if gamma_steps < 2 or p_steps < 2:
        raise ValueError("grid needs at least 2 steps per axis")
    p_span = Fraction(n + 4, n - 4)
    gammas = [1 + Fraction(i, 2 * (gamma_steps + 1)) for i in range(1, gamma_steps + 1)]
    ps = [1 + p_span * Fraction(j, p_steps + 1) for j in range(1, p_steps + 1)]
    jobs = [(n, g, ps) for g in gammas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_gamma_row, jobs))
    else:
        rows = [_gamma_row(j) for j in jobs]
    return [s for row in rows for s in row]


# -- appendix audit ---------------------------------------------------------

@dataclass(frozen=True)
class SignRow:
    gamma: Fraction
    printed_sign: int
    h_sign: int

    @property
    def mismatch(self) -> bool:
        return self.printed_sign * self.h_sign == -1


@dataclass(frozen=True)
class DiscrepancyReport:
    n: int
    sign_table: tuple[SignRow, ...]
    cleared_coefficients: tuple[int, ...]
    cleared_primitive: tuple[int, ...]
    printed_coefficients: tuple[int, ...]
    scale: Fraction
    deltas: tuple[Fraction, ...]
    verdict: str
    notes: tuple[str, ...] = field(default=())

    @property
    def mismatched_degrees(self) -> tuple[int, ...]:
        return tuple(k for k, d in enumerate(self.deltas) if d != 0)

    @property
    def sign_mismatches(self) -> tuple[SignRow, ...]:
        return tuple(r for r in self.sign_table if r.mismatch)


def discrepancy_report(n: int, sample_count: int = 64) -> DiscrepancyReport:
    """Compare the printed sextic with the cleared form of h.

    Coefficient lists are lowest degree first.  ``scale`` is the ratio of
    leading coefficients (cleared / printed); ``deltas[k]`` is
    cleared[k]/scale - printed[k].
    """
    if n < 9:
        raise ValueError("the appendix audit needs n >= 9")
    printed = printed_sextic(n)
    cleared = cleared_polynomial(n)
    gammas = {1 + Fraction(k, 2 * (sample_count + 1)) for k in range(1, sample_count + 1)}
    if 1 < gamma0(n) < HALF3:
        gammas.add(gamma0(n))
    table = tuple(
        SignRow(g, sign(printed(g)), sign(h_value(n, g))) for g in sorted(gammas)
    )
    scale = Fraction(cleared.leading, printed.leading)
    size = max(len(cleared.coeffs), len(printed.coeffs))
    pad = lambda cs: list(cs) + [0] * (size - len(cs))
    deltas = tuple(
        Fraction(c) / scale - d for c, d in zip(pad(cleared.coeffs), pad(printed.coeffs))
    )
    if any(r.mismatch for r in table) or any(deltas):
        verdict = "inconsistent"
    elif scale == 1:
        verdict = "consistent"
    else:
        verdict = "scaled-consistent"
    notes = (
        "h(gamma0) is evaluated directly; the printed closed form "
        "8/(n-8)*quartic is reported alongside without reconciling the normalisation",
    )
    return DiscrepancyReport(
        n=n,
        sign_table=table,
        cleared_coefficients=cleared.coeffs,
        cleared_primitive=cleared.primitive().coeffs,
        printed_coefficients=printed.coeffs,
        scale=scale,
        deltas=deltas,
        verdict=verdict,
        notes=notes,
    )
