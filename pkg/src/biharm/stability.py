"""Singular solution of the biharmonic Lane-Emden equation and its stability.

The homogeneous solution  u_s = L r**(-alpha),  alpha = 4/(p-1),  solves
Delta^2 u = u^p when L**(p-1) = Q = alpha(alpha+2)(n-2-alpha)(n-4-alpha).
Its linearised potential is p u_s**(p-1) = p Q r**-4, so by the
Hardy-Rellich inequality  int (Delta phi)^2 >= n^2 (n-4)^2/16 int phi^2/r^4
the quadratic form  int (Delta phi)^2 - p int u_s^(p-1) phi^2  is
nonnegative exactly when  p Q <= n^2 (n-4)^2 / 16.

That comparison is the decision procedure.  The Rayleigh-quotient scan over
a frozen family of test functions is an independent witness generator: it
can exhibit a negative direction, never certify stability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .exact import BracketError, RootBracket, as_exact, isolate_root, sign
from .radial import (
    Homogeneous,
    PowerLogBump,
    QuadratureSpec,
    RadialProfile,
    integrate_radial,
    radial_calculus,
)

#: radii at which the construction residual is checked
RESIDUAL_SAMPLES = 32
RESIDUAL_TOL = 1e-10
#: smallest inner cutoff allowed for a homogeneous profile
PROFILE_R_MIN = 1e-3
PROFILE_R_MAX = 1e3

SCAN_OFFSETS = 65
SCAN_WIDTHS = (4, 8, 16)
JL_P_MAX = 200
JL_GRID = 512

THRESHOLD_LABEL = "singular-solution stability threshold (pQ <= n^2(n-4)^2/16)"


def _exact_or_float(x):
    if isinstance(x, float):
        return x
    return as_exact(x)


def alpha_of(p):
    p = _exact_or_float(p)
    return 4 / (p - 1)


def q_of_alpha(n: int, alpha):
    return alpha * (alpha + 2) * (n - 2 - alpha) * (n - 4 - alpha)


def pq_value(n: int, p):
    """p * Q(alpha(p)); exact for rational p."""
    p = _exact_or_float(p)
    return p * q_of_alpha(n, alpha_of(p))


def hardy_rellich_constant(n: int) -> Fraction:
    """Best constant n^2 (n-4)^2 / 16 of int (Delta phi)^2 >= C int phi^2 r^-4."""
    if n < 5:
        raise ValueError("n must be >= 5")
    return Fraction(n * n * (n - 4) ** 2, 16)


class ResidualError(ArithmeticError):
    """The constructed singular solution fails its own equation check."""


@dataclass(frozen=True)
class SingularSolution:
    n: int
    p: object
    alpha: object
    Q: object
    L: float
    r_lo: float = 1e-8
    r_hi: float = 1e8
    residual: float = 0.0

    @property
    def exact(self) -> bool:
        return isinstance(self.p, Fraction)

    def profile(self) -> Homogeneous:
        """u_s as a radial profile on the annulus clipped to [1e-3, 1e3]."""
        return Homogeneous(
            float(self.alpha),
            self.L,
            max(self.r_lo, PROFILE_R_MIN),
            min(self.r_hi, PROFILE_R_MAX),
        )

    def value(self, r):
        return self.L * np.asarray(r, dtype=float) ** (-float(self.alpha))

    def potential(self, r):
        """u_s**(p-1) = Q r**-4, evaluated without forming L**(p-1)."""
        return float(self.Q) * np.asarray(r, dtype=float) ** -4.0

    def laplacian(self, r):
        a = float(self.alpha)
        return a * (a + 2 - self.n) * self.L * np.asarray(r, dtype=float) ** (-a - 2)


def construction_residual(sol: SingularSolution, samples: int = RESIDUAL_SAMPLES) -> float:
    """max |Delta^2 u_s - u_s^p| / u_s^p over log-spaced radii of the profile annulus."""
    prof = sol.profile()
    lo, hi = prof.support
    r = np.geomspace(lo, hi, samples)
    calc = radial_calculus(prof, r, sol.n)
    # u^p = L^p r^(-alpha p) = (L r^-alpha) * Q r^-4, avoiding overflow of L^p
    target = calc.value * sol.potential(r)
    return float(np.max(np.abs(calc.bilaplacian - target) / np.abs(target)))


def singular_solution(n: int, p, r_lo: float = 1e-8, r_hi: float = 1e8, check: bool = True) -> SingularSolution:
    """Build u_s = L r^-alpha for n >= 9 (any n >= 5 is accepted) and p > n/(n-4).

    Rational (or int/str) ``p`` gives exact alpha and Q; floats stay floats.
    """
    if n < 5:
        raise ValueError("n must be >= 5")
    p = _exact_or_float(p)
    if not p > Fraction(n, n - 4):
        raise ValueError(f"p = {p} must exceed n/(n-4) = {Fraction(n, n - 4)} (otherwise Q <= 0)")
    alpha = alpha_of(p)
    Q = q_of_alpha(n, alpha)
    if not Q > 0:
        raise ValueError("Q <= 0")
    L = float(Q) ** (1.0 / float(p - 1))
    sol = SingularSolution(n, p, alpha, Q, L, r_lo, r_hi)
    if check:
        res = construction_residual(sol)
        if not res <= RESIDUAL_TOL:
            raise ResidualError(f"construction residual {res:.3e} exceeds {RESIDUAL_TOL}")
        sol = SingularSolution(n, p, alpha, Q, L, r_lo, r_hi, res)
    return sol


@dataclass(frozen=True)
class StabilityVerdict:
    n: int
    p: object
    pQ: object
    hr: Fraction
    stable: bool
    margin: float
    rayleigh_min: Optional[float] = None
    label: str = THRESHOLD_LABEL


def singular_stability(n: int, p, rayleigh: Optional["RayleighScan"] = None) -> StabilityVerdict:
    """Exact comparison p Q <= n^2 (n-4)^2/16 (exact whenever p is rational)."""
    sol = singular_solution(n, p)
    pq = sol.p * sol.Q
    hr = hardy_rellich_constant(n)
    margin = float((hr - pq) / hr)
    return StabilityVerdict(
        n, sol.p, pq, hr, bool(pq <= hr), margin, None if rayleigh is None else rayleigh.minimum
    )


def jl_asymptotic_exists(n: int) -> bool:
    """Whether lim_{p->inf} pQ = 8(n-2)(n-4) is at most the Hardy-Rellich constant."""
    return 128 * (n - 2) <= n * n * (n - 4)


def _jl_grid(n: int, points: int = JL_GRID) -> list[Fraction]:
    """Rational log-spaced grid on (p_S, 200], p_S = (n+4)/(n-4) excluded."""
    p_s = (n + 4) / (n - 4)
    xs = np.geomspace(p_s, JL_P_MAX, points + 1)[1:]
    grid = [Fraction(float(x)) for x in xs]
    grid[-1] = Fraction(JL_P_MAX)
    return grid


def jl_threshold(n: int, tol=1e-12) -> Optional[RootBracket]:
    """Bracket of the smallest p above the Sobolev exponent with pQ <= hr(n).

    Scan the exact sign of hr - pQ on a log grid over (p_S, 200], then bisect
    the first cell where it becomes nonnegative.  At p_S itself pQ = p_S hr > hr.
    Returns None when no grid point satisfies pQ <= hr.
    """
    if not tol > 0:
        raise BracketError(f"tolerance must be positive, got {tol}")
    if n < 9:
        raise ValueError("n must be >= 9")
    hr = hardy_rellich_constant(n)
    f = lambda p: hr - pq_value(n, p)
    prev = Fraction(n + 4, n - 4)
    for p in _jl_grid(n):
        s = sign(f(p))
        if s >= 0:
            if s == 0:
                # exact crossing on the grid: hand back a tiny enclosing bracket
                w = as_exact(tol) / 4
                return RootBracket(p - w, p + w, sign(f(p - w)) or -1, 1)
            return isolate_root(f, RootBracket(prev, p, -1, 1), as_exact(tol))
        prev = p
    return None


# -- Rayleigh quotient witnesses ---------------------------------------------


def rayleigh_quotient(u: SingularSolution, phi: RadialProfile, quad: Optional[QuadratureSpec] = None) -> float:
    """int (Delta phi)^2 r^(n-1) dr  /  int u^(p-1) phi^2 r^(n-1) dr.

    The form is nonnegative on ``phi`` iff the returned value is >= p.
    """
    quad = quad or QuadratureSpec(mapping="log")
    lo, hi = phi.support
    if lo < u.r_lo or hi > u.r_hi:
        raise ValueError(f"test function support {phi.support} leaves the cutoff annulus")
    n = u.n

    def num(r):
        return radial_calculus(phi, r, n).laplacian ** 2

    def den(r):
        return u.potential(r) * phi(r) ** 2

    top = integrate_radial(num, n, (lo, hi), quad)
    bottom = integrate_radial(den, n, (lo, hi), quad)
    if bottom.value == 0:
        raise ZeroDivisionError("test function vanishes identically")
    return top.value / bottom.value


def family_member(n: int, s, width) -> PowerLogBump:
    """phi_{s,T}(r) = r^(-(n-4)/2 + s) * exp(1 - 1/(1 - (log r / T)^2))."""
    return PowerLogBump(beta=-(n - 4) / 2 + float(s), width=float(width))


@dataclass(frozen=True)
class RayleighScan:
    n: int
    p: object
    minimum: float
    arg_s: float
    arg_width: float
    rows: tuple = field(default=(), repr=False)  # (width, s, quotient), grid order

    @property
    def witness(self) -> bool:
        """True when some family member makes the quadratic form negative."""
        return self.minimum < float(self.p)

    def best_by_width(self) -> dict:
        out = {}
        for w, _, q in self.rows:
            out[w] = min(out.get(w, np.inf), q)
        return out


def rayleigh_scan(
    u: SingularSolution,
    offsets: Sequence[float] | None = None,
    widths: Sequence[float] = SCAN_WIDTHS,
    quad: Optional[QuadratureSpec] = None,
) -> RayleighScan:
    """Minimise the quotient over phi_{s,T}; width-major grid, first minimum wins."""
    if offsets is None:
        offsets = np.linspace(-0.5, 0.5, SCAN_OFFSETS)
    if len(offsets) == 0 or len(widths) == 0:
        raise ValueError("empty family")
    rows = []
    best = (np.inf, None, None)
    for w in widths:
        for s in offsets:
            q = rayleigh_quotient(u, family_member(u.n, s, w), quad)
            rows.append((float(w), float(s), q))
            if q < best[0]:
                best = (q, float(s), float(w))
    return RayleighScan(u.n, u.p, best[0], best[1], best[2], tuple(rows))
