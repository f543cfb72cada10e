"""Numerical audit of the integration-by-parts identities behind the
Moser-type iteration for Delta^2 u = u^p.

Notation used in the formulas below (all functions radial):

    f = u^g,  g = phi^g  (the exponent gamma is written ``gam`` in code),
    psi = phi^(2 gamma),  q = 2 gamma - 1.

For radial a, b in R^n the contractions reduce to

    grad a . grad b            = a' b'
    Hess b (grad a, grad a)    = b'' a'^2
    grad |grad a|^2 . grad a   = 2 a'^2 a''

Whole-space identities are integrated over the support of phi with
u > 0 there; ball identities run over the unit ball with v(1) = 1 and
their boundary terms evaluated at r = 1.  The unit-sphere area is
omitted on both sides, so a boundary integral is the integrand at r = 1.

Each side is assembled term by term from its printed form and integrated
separately.  Nothing is simplified across sides.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .radial import (
    CompactBump,
    Constant,
    Gaussian,
    InversePower,
    PolynomialBump,
    QuadratureSpec,
    RadialProfile,
    calculus_from_jet,
    integrate_radial,
    jet_mul,
    radial_calculus,
    unit_trace,
)
from .stability import SingularSolution

DEFAULT_GAMMA = Fraction(5, 4)
AUDIT_GAMMAS = (Fraction(5, 4), Fraction(11, 10), Fraction(7, 5))
DEFAULT_N = 9
DEFAULT_TOL = 1e-6
ABS_FLOOR = 1e-12
POINTWISE_RADII = (0.7,)

PASS = "PASS"
FAIL = "FAIL"
PROBE_FAIL = "DEGENERATE-PROBE-FAIL"
WITHHELD = "WITHHELD"

WHOLE_SPACE = "whole-space"
UNIT_BALL = "unit-ball"


class _Fields:
    """Lazily built radial data at radii r for one case."""

    def __init__(self, case: "IdentityCase", r):
        self.r = np.asarray(r, dtype=float)
        self.n = case.n
        self.gam = float(case.gamma)
        self.q = 2 * self.gam - 1
        self._u = case.u
        self._phi = case.phi

    def _calc(self, prof, power=1.0):
        return radial_calculus(prof, self.r, self.n, power)

    @cached_property
    def u(self):
        return self._calc(self._u)

    @cached_property
    def f(self):
        return self._calc(self._u, self.gam)

    @cached_property
    def uq(self):
        return self._calc(self._u, self.q)

    @cached_property
    def g(self):
        return self._calc(self._phi, self.gam)

    @cached_property
    def psi(self):
        return self._calc(self._phi, 2 * self.gam)

    @cached_property
    def fg(self):
        j = jet_mul(self._u.jet(self.r, self.gam), self._phi.jet(self.r, self.gam))
        return calculus_from_jet(j, self.r, self.n)

    @cached_property
    def uq_psi(self):
        j = jet_mul(self._u.jet(self.r, self.q), self._phi.jet(self.r, 2 * self.gam))
        return calculus_from_jet(j, self.r, self.n)

    def upow(self, a):
        return self.u.value**a


Side = Callable[[_Fields], np.ndarray]


@dataclass(frozen=True)
class IdentityDescriptor:
    id: str
    lhs: str
    rhs: str
    domain: str = WHOLE_SPACE
    pointwise: bool = False
    boundary: Optional[str] = None
    note: str = ""
    lhs_fn: Side = field(default=None, repr=False, compare=False)
    rhs_fn: Side = field(default=None, repr=False, compare=False)
    boundary_fn: Optional[Side] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "domain": self.domain,
            "pointwise": self.pointwise,
            "boundary": self.boundary,
            "note": self.note,
        }


# -- side assemblies --------------------------------------------------------
# Each pair below transcribes one identity.  ``e.f.d1`` is f', and so on.


def _l_2_5(e):
    return e.fg.laplacian**2


def _r_2_5(e):
    f, g = e.f, e.g
    dot = f.d1 * g.d1
    return (
        (f.laplacian * g.value) ** 2
        + 4 * dot * g.laplacian * f.value
        + 4 * dot * f.laplacian * g.value
        + 4 * dot**2
        + 2 * f.laplacian * f.value * g.laplacian * g.value
        + f.value**2 * g.laplacian**2
    )


def _l_2_6(e):
    return 4 * e.f.laplacian * e.f.d1 * e.g.d1 * e.g.value


def _r_2_6(e):
    f, g = e.f, e.g
    return (
        2 * f.grad_sq * g.laplacian * g.value
        + 2 * f.grad_sq * g.grad_sq
        - 4 * f.d1 * f.d1 * g.d2 * g.value
        - 4 * (f.d1 * g.d1) ** 2
    )


def _l_2_6a(e):
    return e.f.laplacian * e.f.value * e.g.laplacian * e.g.value


def _r_2_6a(e):
    f, g = e.f, e.g
    return (
        -f.value * (f.d1 * g.laplacian_d1) * g.value
        - (f.d1 * g.d1) * f.value * g.laplacian
        - f.grad_sq * g.laplacian * g.value
    )


def _l_2_6b(e):
    return e.fg.laplacian**2 - e.f.laplacian**2 * e.g.value**2


def _r_2_6b(e):
    f, g = e.f, e.g
    return (
        2 * f.grad_sq * g.grad_sq
        - 4 * g.value * (g.d2 * f.d1**2)
        + f.value**2 * g.value * g.bilaplacian
        - 2 * f.value**2 * g.laplacian**2
    )


def _l_2_12(e):
    return e.gam**2 / e.q * e.u.laplacian * e.uq_psi.laplacian


def _r_2_12(e):
    a, u, psi = e.gam, e.u, e.psi
    # (Delta u^g phi^g)^2 read as (Delta u^g)^2 phi^(2g)
    return (
        (e.f.laplacian * e.g.value) ** 2
        + 2 * a**2 * e.upow(2 * a - 2) * u.laplacian * u.d1 * psi.d1
        + a**2 / e.q * e.upow(2 * a - 1) * u.laplacian * psi.laplacian
        - a**2 * (a - 1) ** 2 * e.upow(2 * a - 4) * u.grad_sq**2 * psi.value
    )


def _l_2_13(e):
    return 2 * e.upow(2 * e.gam - 2) * e.u.laplacian * e.u.d1 * e.psi.d1


def _r_2_13(e):
    a, u, psi = e.gam, e.u, e.psi
    # the two divergence terms integrate to zero against compactly supported psi
    return (
        -(2 * a - 2) * e.upow(2 * a - 3) * u.grad_sq * u.d1 * psi.d1
        + e.upow(2 * a - 2) * u.grad_sq * psi.laplacian
        - 2 * e.upow(2 * a - 2) * u.d1 * u.d1 * psi.d2
    )


def _quartic(e):
    """u^(2g-4) |grad u|^4 phi^(2g)"""
    return e.upow(2 * e.gam - 4) * e.u.grad_sq**2 * e.psi.value


def _r_2_18(e):
    return e.gam**-4 * e.upow(-2 * e.gam) * e.f.grad_sq**2 * e.psi.value


def _l_2_19(e):
    return e.upow(-2 * e.gam) * e.f.grad_sq**2 * e.psi.value


def _r_2_19(e):
    f, psi = e.f, e.psi
    return (
        f.grad_sq * f.laplacian * psi.value / f.value
        + 2 * f.grad_sq * f.d2 * psi.value / f.value
        + f.grad_sq * f.d1 * psi.d1 / f.value
    )


def _l_2_20(e):
    return e.f.grad_sq * e.f.laplacian * e.psi.value / e.f.value


def _r_2_20(e):
    a, u = e.gam, e.u
    return a**3 * (
        (a - 1) * e.upow(2 * a - 4) * u.grad_sq**2 * e.psi.value
        + e.upow(2 * a - 3) * u.grad_sq * u.laplacian * e.psi.value
    )


def _r_2_21(e):
    a, f, u, psi = e.gam, e.f, e.u, e.psi
    return (
        a**-3 * (2 * f.grad_sq * f.d2) * psi.value / f.value
        + e.upow(2 * a - 3) * u.grad_sq * u.laplacian * psi.value
        + a**-3 * f.grad_sq * f.d1 * psi.d1 / f.value
    )


# ball identities: the profile slot ``u`` holds v


def _l_3_5(e):
    return e.f.laplacian**2


def _r_3_5(e):
    a, v = e.gam, e.u
    return (
        a**2 * e.upow(2 * a - 2) * v.laplacian**2
        + a**2 * (a - 1) ** 2 * e.upow(2 * a - 4) * v.grad_sq**2
        + 2 * a**2 * (a - 1) * e.upow(2 * a - 3) * v.laplacian * v.grad_sq
    )


def _l_3_6(e):
    return e.u.laplacian * e.uq.laplacian


def _r_3_6(e):
    q, v = e.q, e.u
    return q * v.laplacian**2 * e.upow(q - 1) + q * (q - 1) * v.grad_sq * v.laplacian * e.upow(q - 2)


def _ball_quartic(e):
    return e.u.grad_sq**2 * e.upow(2 * e.gam - 4)


def _r_3_8(e):
    f = e.f
    return e.gam**-4 * (2 * f.grad_sq * f.d2 + f.grad_sq * f.laplacian) / f.value


def _b_3_8(e):
    v = e.u
    return -(1 / e.gam) * e.upow(2 * e.gam - 3) * v.grad_sq * v.d1


def _l_3_9(e):
    f = e.f
    return e.gam**-4 * f.grad_sq * f.laplacian / f.value


def _r_3_9(e):
    a, v = e.gam, e.u
    return (a - 1) / a * e.upow(2 * a - 4) * v.grad_sq**2 + (1 / a) * e.upow(2 * a - 3) * v.grad_sq * v.laplacian


def _r_3_10(e):
    a, f, v = e.gam, e.f, e.u
    return e.upow(2 * a - 3) * v.grad_sq * v.laplacian + a**-3 * (2 * f.grad_sq * f.d2) / f.value


def _b_3_10(e):
    v = e.u
    return -v.grad_sq * v.d1


_CATALOG = (
    IdentityDescriptor(
        "2.5",
        "(Delta(u^g phi^g))^2",
        "((Delta u^g) phi^g)^2 + 4 (grad u^g . grad phi^g) Delta phi^g u^g"
        " + 4 (grad u^g . grad phi^g) Delta u^g phi^g + 4 (grad u^g . grad phi^g)^2"
        " + 2 Delta u^g u^g Delta phi^g phi^g + u^2g (Delta phi^g)^2",
        pointwise=True,
        note="algebraic expansion; checked pointwise",
        lhs_fn=_l_2_5,
        rhs_fn=_r_2_5,
    ),
    IdentityDescriptor(
        "2.6",
        "4 int Delta u^g (grad u^g . grad phi^g) phi^g",
        "2 int |grad u^g|^2 Delta phi^g phi^g + 2 int |grad u^g|^2 |grad phi^g|^2"
        " - 4 int (u^g)_i (u^g)_j (phi^g)_ij phi^g - 4 int (grad u^g . grad phi^g)^2",
        lhs_fn=_l_2_6,
        rhs_fn=_r_2_6,
    ),
    IdentityDescriptor(
        "2.6a",
        "int Delta u^g u^g Delta phi^g phi^g",
        "- int u^g (grad u^g . grad Delta phi^g) phi^g - int (grad u^g . grad phi^g) u^g Delta phi^g"
        " - int |grad u^g|^2 Delta phi^g phi^g",
        lhs_fn=_l_2_6a,
        rhs_fn=_r_2_6a,
    ),
    IdentityDescriptor(
        "2.6b",
        "int (Delta(u^g phi^g))^2 - int (Delta u^g)^2 phi^2g",
        "2 int |grad u^g|^2 |grad phi^g|^2 - 4 int phi^g Hess phi^g(grad u^g, grad u^g)"
        " + int u^2g phi^g Delta^2 phi^g - 2 int u^2g (Delta phi^g)^2",
        note="assembled as printed; the u = 1 probe isolates the last two terms",
        lhs_fn=_l_2_6b,
        rhs_fn=_r_2_6b,
    ),
    IdentityDescriptor(
        "2.12",
        "(g^2/q) Delta u Delta(u^q phi^2g)",
        "(Delta u^g)^2 phi^2g + 2 g^2 u^(2g-2) Delta u grad u . grad phi^2g"
        " + (g^2/q) u^(2g-1) Delta u Delta phi^2g - g^2 (g-1)^2 u^(2g-4) |grad u|^4 phi^2g",
        note="(Delta u^g phi^g)^2 is read as (Delta u^g)^2 phi^2g",
        lhs_fn=_l_2_12,
        rhs_fn=_r_2_12,
    ),
    IdentityDescriptor(
        "2.13",
        "2 u^(2g-2) Delta u grad u . grad phi^2g",
        "- (2g-2) u^(2g-3) |grad u|^2 grad u . grad phi^2g + u^(2g-2) |grad u|^2 Delta phi^2g"
        " - 2 u^(2g-2) u_i u_j (phi^2g)_ij",
        note="the two divergence terms are dropped: they integrate to zero under compact support",
        lhs_fn=_l_2_13,
        rhs_fn=_r_2_13,
    ),
    IdentityDescriptor(
        "2.18",
        "int u^(2g-4) |grad u|^4 phi^2g",
        "g^-4 int u^-2g |grad u^g|^4 phi^2g",
        lhs_fn=_quartic,
        rhs_fn=_r_2_18,
    ),
    IdentityDescriptor(
        "2.19",
        "int u^-2g |grad u^g|^4 phi^2g",
        "int |grad u^g|^2 Delta u^g phi^2g / u^g + int grad|grad u^g|^2 . grad u^g phi^2g / u^g"
        " + int |grad u^g|^2 grad u^g . grad phi^2g / u^g",
        lhs_fn=_l_2_19,
        rhs_fn=_r_2_19,
    ),
    IdentityDescriptor(
        "2.20",
        "int |grad u^g|^2 Delta u^g phi^2g / u^g",
        "g^3 int ((g-1) u^(2g-4) |grad u|^4 phi^2g + u^(2g-3) |grad u|^2 Delta u phi^2g)",
        lhs_fn=_l_2_20,
        rhs_fn=_r_2_20,
    ),
    IdentityDescriptor(
        "2.21",
        "int u^(2g-4) |grad u|^4 phi^2g",
        "g^-3 int grad|grad u^g|^2 . grad u^g phi^2g / u^g + int u^(2g-3) |grad u|^2 Delta u phi^2g"
        " + g^-3 int |grad u^g|^2 grad u^g . grad phi^2g / u^g",
        lhs_fn=_quartic,
        rhs_fn=_r_2_21,
    ),
    IdentityDescriptor(
        "3.5",
        "int (Delta v^g)^2",
        "int g^2 v^(2g-2) (Delta v)^2 + int g^2 (g-1)^2 v^(2g-4) |grad v|^4"
        " + 2 int g^2 (g-1) v^(2g-3) Delta v |grad v|^2",
        domain=UNIT_BALL,
        lhs_fn=_l_3_5,
        rhs_fn=_r_3_5,
    ),
    IdentityDescriptor(
        "3.6",
        "int Delta v Delta v^q",
        "int q (Delta v)^2 v^(q-1) + int q (q-1) |grad v|^2 Delta v v^(q-2)",
        domain=UNIT_BALL,
        lhs_fn=_l_3_6,
        rhs_fn=_r_3_6,
    ),
    IdentityDescriptor(
        "3.8",
        "int |grad v|^4 v^(2g-4)",
        "g^-4 int (grad|grad v^g|^2 . grad v^g + |grad v^g|^2 Delta v^g) / v^g",
        domain=UNIT_BALL,
        boundary="- (1/g) v^(2g-3) |grad v|^2 dv/dn at r = 1",
        lhs_fn=_ball_quartic,
        rhs_fn=_r_3_8,
        boundary_fn=_b_3_8,
    ),
    IdentityDescriptor(
        "3.9",
        "g^-4 int |grad v^g|^2 Delta v^g / v^g",
        "((g-1)/g) int v^(2g-4) |grad v|^4 + (1/g) int v^(2g-3) |grad v|^2 Delta v",
        domain=UNIT_BALL,
        lhs_fn=_l_3_9,
        rhs_fn=_r_3_9,
    ),
    IdentityDescriptor(
        "3.10",
        "int |grad v|^4 v^(2g-4)",
        "int v^(2g-3) |grad v|^2 Delta v + g^-3 int grad|grad v^g|^2 . grad v^g / v^g"
        " - |grad v|^2 dv/dn at r = 1",
        domain=UNIT_BALL,
        boundary="- |grad v|^2 dv/dn at r = 1",
        note="uses v = 1 on the sphere to drop the factor v^(2g-3) from the boundary term",
        lhs_fn=_ball_quartic,
        rhs_fn=_r_3_10,
        boundary_fn=_b_3_10,
    ),
)

IDENTITY_IDS = tuple(d.id for d in _CATALOG)
_BY_ID = {d.id: d for d in _CATALOG}


def identity_catalog() -> tuple[IdentityDescriptor, ...]:
    return _CATALOG


def descriptor(identity_id: str) -> IdentityDescriptor:
    try:
        return _BY_ID[str(identity_id)]
    except KeyError:
        raise KeyError(f"unknown identity {identity_id!r}; known: {', '.join(IDENTITY_IDS)}") from None


# -- cases and reports ------------------------------------------------------


@dataclass(frozen=True)
class IdentityCase:
    """One audit input.  For ball identities ``u`` is the profile v and ``phi`` is unused."""

    id: str
    u: RadialProfile
    phi: Optional[RadialProfile] = None
    gamma: object = DEFAULT_GAMMA
    n: int = DEFAULT_N
    label: str = ""
    radii: tuple = POINTWISE_RADII

    @property
    def domain(self) -> str:
        return descriptor(self.id).domain

    @property
    def is_probe(self) -> bool:
        return isinstance(self.u, Constant)

    def integration_domain(self) -> tuple[float, float]:
        if self.domain == UNIT_BALL:
            return (0.0, 1.0)
        return (0.0, float(self.phi.support[1]))

    def validate(self) -> None:
        if not 1 < float(self.gamma) < 1.5:
            raise ValueError(f"gamma = {self.gamma} outside (1, 3/2)")
        if self.domain == UNIT_BALL:
            trace = float(self.u(np.array(1.0)))
            if abs(trace - 1) > 1e-12:
                raise ValueError(f"ball identities need v(1) = 1, got {trace}")
        else:
            if self.phi is None or not np.isfinite(self.phi.support[1]):
                raise ValueError("whole-space identities need a compactly supported phi")

    def describe(self) -> dict:
        out = {"u": self.u.describe(), "gamma": str(Fraction(self.gamma)), "n": self.n, "label": self.label}
        if self.phi is not None:
            out["phi"] = self.phi.describe()
        return out


@dataclass(frozen=True)
class IdentityReport:
    id: str
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    lhs_converged: bool
    rhs_converged: bool
    verdict: str
    pointwise: bool = False
    radius: Optional[float] = None
    label: str = ""
    gamma: object = DEFAULT_GAMMA
    n: int = DEFAULT_N
    note: str = ""

    @property
    def ratio(self) -> float:
        return self.rhs / self.lhs if self.lhs else float("nan")


def _classify(lhs, rhs, tol, converged, probe) -> tuple[float, float, str]:
    abs_res = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel = abs_res / scale if scale > 0 else 0.0
    if not converged:
        return abs_res, rel, WITHHELD
    if abs_res <= max(tol * scale, ABS_FLOOR):
        return abs_res, rel, PASS
    return abs_res, rel, PROBE_FAIL if probe else FAIL


def verify_identity(
    identity_id: str,
    case: IdentityCase,
    tol: float = DEFAULT_TOL,
    quad: Optional[QuadratureSpec] = None,
) -> IdentityReport:
    """Evaluate both sides of one identity on ``case`` and classify the residual.

    PASS needs |lhs - rhs| <= max(tol * max(|lhs|, |rhs|), 1e-12) and both
    quadratures converged; a non-converged side gives WITHHELD.  A failure
    on a constant ``u`` is reported as DEGENERATE-PROBE-FAIL.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    d = descriptor(identity_id)
    if case.id != d.id:
        case = IdentityCase(d.id, case.u, case.phi, case.gamma, case.n, case.label, case.radii)
    case.validate()
    common = dict(label=case.label, gamma=case.gamma, n=case.n, note=d.note)

    if d.pointwise:
        r = np.asarray(case.radii, dtype=float)
        lhs = d.lhs_fn(_Fields(case, r))
        rhs = d.rhs_fn(_Fields(case, r))
        scale = np.maximum(np.abs(lhs), np.abs(rhs))
        rel = np.where(scale > 0, np.abs(lhs - rhs) / np.where(scale > 0, scale, 1), 0.0)
        k = int(np.argmax(rel))
        a, rel_k, verdict = _classify(float(lhs[k]), float(rhs[k]), tol, True, case.is_probe)
        return IdentityReport(
            d.id, float(lhs[k]), float(rhs[k]), a, rel_k, True, True, verdict, True, float(r[k]), **common
        )

    domain = case.integration_domain()
    n = case.n
    left = integrate_radial(lambda r: d.lhs_fn(_Fields(case, r)), n, domain, quad)
    right = integrate_radial(lambda r: d.rhs_fn(_Fields(case, r)), n, domain, quad)
    lhs, rhs = left.value, right.value
    if d.boundary_fn is not None:
        rhs += float(d.boundary_fn(_Fields(case, np.array([domain[1]])))[0])
    converged = left.converged and right.converged
    a, rel, verdict = _classify(lhs, rhs, tol, converged, case.is_probe)
    return IdentityReport(d.id, lhs, rhs, a, rel, left.converged, right.converged, verdict, **common)


# -- canonical corpus -------------------------------------------------------


def canonical_pairs() -> tuple[tuple[str, RadialProfile, RadialProfile], ...]:
    """The frozen (label, u, phi) corpus."""
    bump = CompactBump(0.25, 1.5)
    return (
        ("gaussian/bump", Gaussian(1.0), bump),
        ("inverse-power/bump", InversePower(3.0), bump),
        ("polynomial-bump/polynomial-bump", PolynomialBump(4.0, 1.0), PolynomialBump(8.0, 0.9)),
    )


def canonical_cases(identity_id: str, gammas=AUDIT_GAMMAS, n: int = DEFAULT_N) -> list[IdentityCase]:
    d = descriptor(identity_id)
    cases = []
    for gam in gammas:
        for label, u, phi in canonical_pairs():
            if d.domain == UNIT_BALL:
                cases.append(IdentityCase(d.id, unit_trace(u), None, gam, n, label.split("/")[0] + "+trace"))
            else:
                cases.append(IdentityCase(d.id, u, phi, gam, n, label))
    return cases


def probe_case(gamma=DEFAULT_GAMMA, n: int = DEFAULT_N) -> IdentityCase:
    """u = 1 against the canonical bump; reduces 2.6b to a statement about phi alone."""
    return IdentityCase("2.6b", Constant(1.0), CompactBump(0.25, 1.5), gamma, n, "probe u=1")


def _run_case(args):
    case, tol, quad = args
    return verify_identity(case.id, case, tol, quad)


def run_audit(
    ids: Optional[Sequence[str]] = None,
    gammas=AUDIT_GAMMAS,
    n: int = DEFAULT_N,
    tol: float = DEFAULT_TOL,
    quad: Optional[QuadratureSpec] = None,
    workers: int = 1,
) -> list[IdentityReport]:
    """Canonical audit in catalog order, then gamma, then pair; the 2.6b probe
    follows the 2.6b block."""
    ids = IDENTITY_IDS if ids is None else [descriptor(i).id for i in ids]
    cases = []
    for i in IDENTITY_IDS:
        if i not in ids:
            continue
        cases.extend(canonical_cases(i, gammas, n))
        if i == "2.6b":
            cases.append(probe_case(DEFAULT_GAMMA, n))
    jobs = [(c, tol, quad) for c in cases]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_case, jobs))
    return [_run_case(j) for j in jobs]


# -- pointwise bounds on the singular solution ------------------------------


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    factor: str
    holds: bool
    margin_ratio: float
    max_radial_spread: float
    lhs_exact: Optional[Fraction] = None
    rhs_exact: Optional[Fraction] = None


def verify_pointwise_bounds(sol: SingularSolution, radii) -> tuple[BoundCheck, BoundCheck]:
    """(Delta u)^2 >= 2/(p+1) u^(p+1)  and  -Delta u >= sqrt(2/(p+1)) u^((p+1)/2) for u_s.

    Both sides scale as the same power of r, so each bound reduces to one
    constant inequality.  The first is stated as a multiple of L^2
    (exact for rational p), the second in absolute terms.  The per-radius
    ratios are also evaluated and their spread reported as a consistency check.
    """
    n, p, a, Q, L = sol.n, sol.p, sol.alpha, sol.Q, sol.L
    c = a * (n - 2 - a)  # -Delta u_s = c L r^(-a-2)
    sq_lhs, sq_rhs = c * c, 2 * Q / (p + 1)
    lin_lhs = float(c) * L
    lin_rhs = np.sqrt(2 / float(p + 1)) * L ** ((float(p) + 1) / 2)

    r = np.asarray(radii, dtype=float)
    u = sol.value(r)
    lap = sol.laplacian(r)
    # u^(p+1) = u^2 * u^(p-1) = u^2 * Q r^-4
    ratio_sq = lap**2 / (2 / float(p + 1) * u**2 * sol.potential(r))
    ratio_lin = -lap / (np.sqrt(2 / float(p + 1)) * u * np.sqrt(sol.potential(r)))

    def spread(x, target):
        return float(np.max(np.abs(x / target - 1))) if len(x) else 0.0

    exact = isinstance(p, Fraction)
    first = BoundCheck(
        "(Delta u)^2 >= 2/(p+1) u^(p+1)",
        float(sq_lhs),
        float(sq_rhs),
        "L^2",
        bool(sq_lhs >= sq_rhs),
        float(sq_lhs / sq_rhs),
        spread(ratio_sq, float(sq_lhs / sq_rhs)),
        sq_lhs if exact else None,
        sq_rhs if exact else None,
    )
    second = BoundCheck(
        "-Delta u >= sqrt(2/(p+1)) u^((p+1)/2)",
        lin_lhs,
        float(lin_rhs),
        "1",
        bool(lin_lhs >= lin_rhs),
        float(lin_lhs / lin_rhs),
        spread(ratio_lin, lin_lhs / lin_rhs),
    )
    return first, second
