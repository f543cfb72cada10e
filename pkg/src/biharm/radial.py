"""Radial test profiles with closed-form derivatives and radial quadrature.

A profile returns its *jet* at r: the stacked values (f, f', f'', f''', f'''')
as an array of shape ``(5, *r.shape)``.  Jets are built from elementary
closed forms with the product rule and Faa di Bruno's formula, never by
differencing.  Powers f**a of the positive families are formed as
exp(a * log f) from a closed-form log-jet, which stays finite where f
decays to zero at the edge of its support.

All integrals are of the form  int g(r) r**(n-1) dr;  the area of the unit
sphere is omitted throughout (it cancels in every identity and quotient).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, log
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

ORDER = 4


class OutsideSupportError(ValueError):
    pass


# -- jet algebra ------------------------------------------------------------

def _zeros_like(r):
    return np.zeros((ORDER + 1,) + np.shape(r))


def const_jet(c, r):
    j = _zeros_like(r)
    j[0] = c
    return j


def identity_jet(r):
    j = _zeros_like(r)
    j[0] = r
    j[1] = 1.0
    return j


def jet_mul(a, b):
    """Leibniz rule."""
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for k in range(ORDER + 1):
        for i in range(k + 1):
            out[k] += comb(k, i) * a[i] * b[k - i]
    return out


def compose(outer, inner):
    """Jet of g(f(r)) from the derivatives ``outer = (g, g', .., g'''')`` at f(r)."""
    g0, g1, g2, g3, g4 = outer
    f1, f2, f3, f4 = inner[1], inner[2], inner[3], inner[4]
    return np.stack(
        [
            g0,
            g1 * f1,
            g2 * f1**2 + g1 * f2,
            g3 * f1**3 + 3 * g2 * f1 * f2 + g1 * f3,
            g4 * f1**4 + 6 * g3 * f1**2 * f2 + g2 * (3 * f2**2 + 4 * f1 * f3) + g1 * f4,
        ]
    )


def jet_exp(w):
    e = np.exp(w[0])
    return compose((e, e, e, e, e), w)


def jet_log(f):
    x = f[0]
    return compose((np.log(x), 1 / x, -1 / x**2, 2 / x**3, -6 / x**4), f)


def jet_pow(f, a: float):
    """f**a by direct composition; only valid where f > 0."""
    x = f[0]
    outer = (
        x**a,
        a * x ** (a - 1),
        a * (a - 1) * x ** (a - 2),
        a * (a - 1) * (a - 2) * x ** (a - 3),
        a * (a - 1) * (a - 2) * (a - 3) * x ** (a - 4),
    )
    return compose(outer, f)


def jet_recip(f):
    x = f[0]
    return compose((1 / x, -1 / x**2, 2 / x**3, -6 / x**4, 24 / x**5), f)


def _softplus_outer(x):
    sp = np.logaddexp(0.0, x)
    s = np.exp(x - sp)  # logistic
    c = np.exp(-sp)  # 1 - logistic, without cancellation
    d2 = s * c
    return sp, s, d2, d2 * (c - s), d2 * (1 - 6 * d2)


# -- profiles ---------------------------------------------------------------

class RadialProfile:
    """Base class.  Subclasses give ``support`` and either ``log_jet`` or ``_jet``."""

    family: str = "abstract"
    support: tuple[float, float] = (0.0, np.inf)

    def params(self) -> dict:
        return {}

    def log_jet(self, r) -> np.ndarray:
        raise NotImplementedError

    def _inside(self, r):
        lo, hi = self.support
        return (r > lo) & (r < hi)

    def jet(self, r, power: float = 1.0) -> np.ndarray:
        """Jet of f**power at r; zero outside the support."""
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r)
        out = _zeros_like(flat)
        inside = self._inside(flat)
        if np.any(inside):
            out[:, inside] = self._jet(flat[inside], power)
        return out.reshape((ORDER + 1,) + r.shape)

    def _jet(self, r, power):
        return jet_exp(power * self.log_jet(r))

    def __call__(self, r):
        return self.jet(r)[0]

    def describe(self) -> dict:
        return {"family": self.family, **self.params(), "support": list(self.support)}


@dataclass(frozen=True, eq=False)
class Gaussian(RadialProfile):
    """amplitude * exp(-rate * r**2)"""

    rate: float = 1.0
    amplitude: float = 1.0
    family = "gaussian"
    support = (0.0, np.inf)

    def params(self):
        return {"rate": self.rate, "amplitude": self.amplitude}

    def log_jet(self, r):
        r2 = jet_mul(identity_jet(r), identity_jet(r))
        return const_jet(log(self.amplitude), r) - self.rate * r2


@dataclass(frozen=True, eq=False)
class InversePower(RadialProfile):
    """(1 + (r/scale)**2)**(-k)"""

    k: float = 3.0
    scale: float = 1.0
    family = "inverse-power"
    support = (0.0, np.inf)

    def params(self):
        return {"k": self.k, "scale": self.scale}

    def log_jet(self, r):
        x = identity_jet(r) / self.scale
        return -self.k * jet_log(const_jet(1.0, r) + jet_mul(x, x))


@dataclass(frozen=True, eq=False)
class PolynomialBump(RadialProfile):
    """(1 - (r/radius)**2)**k on [0, radius)"""

    k: float = 4.0
    radius: float = 1.0
    family = "polynomial-bump"

    @property
    def support(self):
        return (0.0, self.radius)

    def params(self):
        return {"k": self.k, "radius": self.radius}

    def log_jet(self, r):
        x = identity_jet(r) / self.radius
        return self.k * jet_log(const_jet(1.0, r) - jet_mul(x, x))

    def _inside(self, r):
        return (r >= 0) & (r < self.radius)


@dataclass(frozen=True, eq=False)
class CompactBump(RadialProfile):
    """Smooth cutoff: 1 on [0, inner], 0 beyond ``outer``, C-infinity in between.

    With t = (outer - r)/(outer - inner) the ramp is
    1/(1 + exp(1/t - 1/(1-t))) = exp(-softplus(1/t - 1/(1-t))).  Within
    1e-3 of either end of the ramp the profile equals 0 or 1 to double
    precision (the neglected terms are below exp(-990)).
    """

    inner: float = 0.5
    outer: float = 1.0
    family = "compact-bump"

    @property
    def support(self):
        return (0.0, self.outer)

    def params(self):
        return {"inner": self.inner, "outer": self.outer}

    def _inside(self, r):
        return (r >= 0) & (r < self.outer)

    def _jet(self, r, power):
        width = self.outer - self.inner
        out = _zeros_like(r)
        out[0] = 1.0  # plateau: every derivative of f**power vanishes
        t_all = (self.outer - r) / width
        out[0, t_all <= 1e-3] = 0.0
        ramp = (t_all > 1e-3) & (t_all < 1 - 1e-3)
        if np.any(ramp):
            t = const_jet(0.0, r[ramp])
            t[0] = (self.outer - r[ramp]) / width
            t[1] = -1.0 / width
            x = jet_recip(t) - jet_recip(const_jet(1.0, r[ramp]) - t)
            w = -compose(_softplus_outer(x[0]), x)
            out[:, ramp] = jet_exp(power * w)
        return out


@dataclass(frozen=True, eq=False)
class Homogeneous(RadialProfile):
    """coef * r**(-alpha) on the annulus (r_lo, r_hi), r_lo >= 1e-3."""

    alpha: float = 2.0
    coef: float = 1.0
    r_lo: float = 1e-3
    r_hi: float = 1e3
    family = "homogeneous"

    def __post_init__(self):
        if self.r_lo < 1e-3:
            raise ValueError("homogeneous profiles need an inner cutoff >= 1e-3")

    @property
    def support(self):
        return (self.r_lo, self.r_hi)

    def params(self):
        return {"alpha": self.alpha, "coef": self.coef}

    def _inside(self, r):
        return (r >= self.r_lo) & (r <= self.r_hi)

    def log_jet(self, r):
        return const_jet(log(self.coef), r) - self.alpha * jet_log(identity_jet(r))


@dataclass(frozen=True, eq=False)
class Constant(RadialProfile):
    value: float = 1.0
    family = "constant"
    support = (0.0, np.inf)

    def params(self):
        return {"value": self.value}

    def _jet(self, r, power):
        return const_jet(self.value**power, r)


@dataclass(frozen=True, eq=False)
class PowerLogBump(RadialProfile):
    """r**beta * exp(1 - 1/(1 - x**2)),  x = log(r/center)/width, |x| < 1."""

    beta: float = 0.0
    width: float = 4.0
    center: float = 1.0
    family = "power-log-bump"

    @property
    def support(self):
        return (self.center * np.exp(-self.width), self.center * np.exp(self.width))

    def params(self):
        return {"beta": self.beta, "width": self.width, "center": self.center}

    def log_jet(self, r):
        logr = jet_log(identity_jet(r))
        x = (logr - const_jet(log(self.center), r)) / self.width
        inner = jet_recip(const_jet(1.0, r) - jet_mul(x, x))
        return self.beta * logr + const_jet(1.0, r) - inner


@dataclass(frozen=True, eq=False)
class Affine(RadialProfile):
    """shift + scale * base(r); used for v = 1 + u - u(R) on a ball."""

    base: RadialProfile = field(default_factory=Constant)
    scale: float = 1.0
    shift: float = 0.0
    family = "affine"

    @property
    def support(self):
        return self.base.support

    def params(self):
        return {"base": self.base.describe(), "scale": self.scale, "shift": self.shift}

    def _inside(self, r):
        # closed support: a compactly supported base is extended by zero, so
        # the boundary sphere of a ball carries the shifted value
        lo, hi = self.base.support
        return (r >= lo) & (r <= hi)

    def _jet(self, r, power):
        j = self.scale * self.base.jet(r)
        j[0] += self.shift
        return j if power == 1.0 else jet_pow(j, power)


def unit_trace(base: RadialProfile, radius: float = 1.0) -> Affine:
    """1 + base(r) - base(radius): equals 1 on the sphere of the given radius."""
    return Affine(base, 1.0, 1.0 - float(base(np.array(radius))))


# -- radial operators -------------------------------------------------------

@dataclass(frozen=True)
class RadialCalculus:
    """Radial differential data of one function at one or many radii."""

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    laplacian: np.ndarray
    laplacian_d1: np.ndarray
    bilaplacian: np.ndarray
    grad_sq: np.ndarray
    hess_sq: np.ndarray


def calculus_from_jet(j, r, n: int) -> RadialCalculus:
    f0, f1, f2, f3, f4 = j
    m = n - 1
    return RadialCalculus(
        value=f0,
        d1=f1,
        d2=f2,
        laplacian=f2 + m * f1 / r,
        laplacian_d1=f3 + m * (f2 / r - f1 / r**2),
        bilaplacian=f4 + 2 * m * f3 / r + m * (n - 3) * (f2 / r**2 - f1 / r**3),
        grad_sq=f1**2,
        hess_sq=f2**2 + m * (f1 / r) ** 2,
    )


def radial_calculus(f: RadialProfile, r, n: int, power: float = 1.0) -> RadialCalculus:
    """f, f', Laplacian, bilaplacian, |grad f|^2 and |Hess f|^2 of f**power at r."""
    if n < 5:
        raise ValueError("n must be >= 5")
    r = np.asarray(r, dtype=float)
    lo, hi = f.support
    if np.any(r <= 0) or np.any(r < lo) or np.any(r > hi):
        raise OutsideSupportError(f"radius outside support {f.support} of {f.family}")
    return calculus_from_jet(f.jet(r, power), r, n)


def grad4_norm(phi: RadialProfile, gamma: float, r, n: int):
    """sqrt(phi^-2g |grad phi^g|^4 + |phi^g bilap phi^g| + |Hess phi^g|^2)."""
    g = radial_calculus(phi, r, n, power=gamma)
    if np.any(g.value == 0):
        raise ZeroDivisionError("phi vanishes; the weighted gradient term is undefined")
    return np.sqrt((g.grad_sq / g.value) ** 2 + np.abs(g.value * g.bilaplacian) + g.hess_sq)


def check_derivatives(profile: RadialProfile, radii, h_rel: float = 2e-4):
    """Compare each closed-form derivative with a 6th-order central difference
    (step ``h_rel * r``) of the next lower one.

    Returns the worst error per order, normalised by |exact| plus 1% of the
    largest |exact| over the sample.
    """
    radii = np.asarray(radii, dtype=float)
    h = h_rel * radii
    errs = []
    for k in range(ORDER):
        d = lambda x: profile.jet(x)[k]
        fd = (
            45 * (d(radii + h) - d(radii - h))
            - 9 * (d(radii + 2 * h) - d(radii - 2 * h))
            + (d(radii + 3 * h) - d(radii - 3 * h))
        ) / (60 * h)
        exact = profile.jet(radii)[k + 1]
        floor = 1e-2 * np.max(np.abs(exact)) + 1e-300
        errs.append(float(np.max(np.abs(fd - exact) / (np.abs(exact) + floor))))
    return errs


# -- quadrature -------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre on equal panels, doubled until two successive
    estimates agree.  ``mapping='log'`` places the panels in log r."""

    panels: int = 16
    nodes: int = 20
    max_doublings: int = 10
    rtol: float = 1e-11
    mass_floor: float = 1e-13
    mapping: str = "linear"


@dataclass(frozen=True)
class QuadResult:
    value: float
    previous: float
    panels: int
    converged: bool
    abs_mass: float

    @property
    def error(self) -> float:
        return abs(self.value - self.previous)


_LEGGAUSS: dict[int, tuple] = {}


def _rule(k: int):
    if k not in _LEGGAUSS:
        _LEGGAUSS[k] = leggauss(k)
    return _LEGGAUSS[k]


def _fixed(g: Callable, n: int, a: float, b: float, panels: int, nodes: int, mapping: str):
    x, w = _rule(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = mid[:, None] + half[:, None] * x[None, :]
    if mapping == "log":
        r = np.exp(t)
        jac = r**n
    else:
        r = t
        jac = r ** (n - 1)
    vals = g(r) * jac
    weights = half[:, None] * w[None, :]
    per_panel = np.sum(vals * weights, axis=1)
    return float(np.sum(per_panel)), float(np.sum(np.abs(vals) * weights))


def integrate_radial(
    g: Callable, n: int, domain: tuple[float, float], quad: Optional[QuadratureSpec] = None
) -> QuadResult:
    """Estimate int_{domain} g(r) r**(n-1) dr (sphere area omitted).

    Panels double until successive estimates differ by at most
    ``rtol*|I| `` or ``mass_floor * int |g| r^(n-1)``; otherwise the last
    estimate is returned with ``converged=False``.
    """
    quad = quad or QuadratureSpec()
    a, b = map(float, domain)
    if quad.mapping == "log":
        a, b = log(a), log(b)
    elif a < 0:
        raise ValueError("radial domain must start at r >= 0")
    panels = quad.panels
    prev, mass = _fixed(g, n, a, b, panels, quad.nodes, quad.mapping)
    cur = prev  # with no doublings there is nothing to compare against
    for _ in range(quad.max_doublings):
        panels *= 2
        cur, mass = _fixed(g, n, a, b, panels, quad.nodes, quad.mapping)
        if abs(cur - prev) <= max(quad.rtol * abs(cur), quad.mass_floor * mass):
            return QuadResult(cur, prev, panels, True, mass)
        prev = cur
    return QuadResult(cur, prev, panels, False, mass)


def integrate_fixed(g: Callable, n: int, domain, panels: int, nodes: int = 20, mapping="linear"):
    """Single composite Gauss-Legendre estimate, no refinement."""
    a, b = map(float, domain)
    if mapping == "log":
        a, b = log(a), log(b)
    return _fixed(g, n, a, b, panels, nodes, mapping)[0]
