"""Explicit F-steady triples ``(alpha, J, H)`` on the three canonical charts.

Conventions, shared by every chart with coordinates ``(x, y)``:

* ``omega = dx ^ dy``; the vorticity is ``F = zeta(S)`` for the chart
  function ``S(x, y)``.
* ``alpha = a1 dx + a2 dy`` is stored as the row vector ``a = (a1, a2)``.
* ``J`` is a 2x2 matrix acting on tangent vectors; ``J*alpha`` is the row
  vector ``a @ J`` and the metric is ``g = W @ J`` with ``W = [[0, 1], [-1, 0]]``
  (so that ``g(u, v) = omega(u, J v)``).
* Level curves of ``F`` are oriented as the boundary of the sublevel set:
  the positive tangent is the +90 degree rotation of the outward normal
  ``sign(zeta') * grad S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

W = np.array([[0.0, 1.0], [-1.0, 0.0]])
ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
MIN_HYPERBOLIC_RADIUS = 1e-3
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


class ChartError(ValueError):
    pass


def _as_poly(zeta: Any) -> Polynomial:
    if isinstance(zeta, Polynomial):
        return zeta
    if np.isscalar(zeta):
        return Polynomial([float(zeta)])
    return Polynomial(np.asarray(zeta, dtype=float))


@dataclass(frozen=True)
class AlphaOffset:
    """Polynomial 2D additions ``(o1, o2)`` to ``alpha`` (coefficient grids in x, y)."""

    c1: np.ndarray
    c2: np.ndarray

    def values(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return P.polyval2d(x, y, self.c1), P.polyval2d(x, y, self.c2)

    def curl(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        d2dx = P.polyval2d(x, y, P.polyder(self.c2, axis=0)) if self.c2.shape[0] > 1 else 0.0 * x
        d1dy = P.polyval2d(x, y, P.polyder(self.c1, axis=1)) if self.c1.shape[1] > 1 else 0.0 * x
        return d2dx - d1dy


@dataclass(frozen=True)
class SteadyTriple:
    """A steady triple on a canonical chart, evaluated in closed form.

    ``kind`` is ``"cylinder"`` (coordinates ``(S, Theta)``), ``"elliptic"``
    or ``"hyperbolic"`` (coordinates ``(P, Q)``).  ``bounds`` is the chart
    box ``((x0, x1), (y0, y1))``.
    """

    kind: str
    zeta: Polynomial
    c: float
    eps: int
    bounds: tuple[tuple[float, float], tuple[float, float]]
    offset: AlphaOffset | None = field(default=None, compare=False)

    # -- chart geometry ---------------------------------------------------
    def S(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.kind == "cylinder":
            return np.asarray(x, dtype=float) + 0.0 * y
        if self.kind == "elliptic":
            return 0.5 * (x * x + y * y)
        return x * y

    def grad_S(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "cylinder":
            return np.ones_like(x * 1.0), np.zeros_like(y * 1.0)
        if self.kind == "elliptic":
            return x * 1.0, y * 1.0
        return y * 1.0, x * 1.0

    def F(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.zeta(self.S(x, y))

    # -- profiles ---------------------------------------------------------
    @property
    def profile(self) -> Polynomial:
        """The radial alpha-profile as a polynomial in ``S``.

        cylinder: ``c/2pi + int_0^S zeta``; elliptic: ``(int_0^S zeta) / 2S``;
        hyperbolic: ``-(int_0^S zeta) / 2S``.  The division by ``S`` is
        exact on the integrated series, so the latter two are polynomials.
        """
        integ = self.zeta.integ()  # vanishes at 0
        if self.kind == "cylinder":
            return integ + self.c / (2 * math.pi)
        quotient = Polynomial(integ.coef[1:] if len(integ.coef) > 1 else [0.0]) / 2.0
        return quotient if self.kind == "elliptic" else -quotient

    def alpha(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = self.S(x, y)
        eta = self.profile(s)
        if self.kind == "cylinder":
            a1, a2 = 0.0 * x, eta + 0.0 * y
        elif self.kind == "elliptic":
            a1, a2 = -eta * y, eta * x
        else:
            a1, a2 = eta * y + self.c * x, -(eta * x + self.c * y)
        if self.offset is not None:
            o1, o2 = self.offset.values(x, y)
            a1, a2 = a1 + o1, a2 + o2
        return a1, a2

    def dalpha(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """``d a2/dx - d a1/dy`` from the product rule on each component."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = self.S(x, y)
        eta, deta = self.profile(s), self.profile.deriv()(s)
        sx, sy = self.grad_S(x, y)
        if self.kind == "cylinder":
            da2dx, da1dy = deta * sx, 0.0 * x
        elif self.kind == "elliptic":
            da2dx = eta + x * deta * sx
            da1dy = -(eta + y * deta * sy)
        else:
            da2dx = -(eta + x * deta * sx)
            da1dy = eta + y * deta * sy
        out = da2dx - da1dy
        if self.offset is not None:
            out = out + self.offset.curl(x, y)
        return out

    def J(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Field of 2x2 matrices with shape ``x.shape + (2, 2)``."""
        x = np.asarray(x, dtype=float)
        shape = x.shape
        if self.kind in ("cylinder", "elliptic"):
            return np.broadcast_to(ROT, shape + (2, 2)).copy()
        eta = self.profile(self.S(x, y))
        k = self.eps / np.sqrt(self.c * self.c - eta * eta)
        out = np.empty(shape + (2, 2))
        out[..., 0, 0] = k * eta
        out[..., 0, 1] = -k * self.c
        out[..., 1, 0] = k * self.c
        out[..., 1, 1] = -k * eta
        return out

    def dH_dS(self, s: np.ndarray) -> np.ndarray:
        eta = self.profile(s)
        if self.kind in ("cylinder", "elliptic"):
            return -eta
        return self.eps * np.sqrt(self.c * self.c - eta * eta)

    def H_of_S(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.kind in ("cylinder", "elliptic"):
            return (-self.profile.integ())(s)
        # Gauss-Legendre on [0, s]; the integrand is analytic on the chart
        half = 0.5 * s[..., None]
        nodes = half * (_GL_NODES + 1.0)
        return np.sum(half * _GL_WEIGHTS * self.dH_dS(nodes), axis=-1)

    def H(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.H_of_S(self.S(x, y))

    def grad_H(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = self.dH_dS(self.S(x, y))
        sx, sy = self.grad_S(x, y)
        return d * sx, d * sy

    # -- sign rule ---------------------------------------------------------
    def dH_dF(self, s: np.ndarray) -> np.ndarray:
        return self.dH_dS(s) / self.zeta.deriv()(s)

    def level_circulation(self, s: float, n: int = 2001) -> float:
        """Integral of ``alpha`` over the part of the level ``S = s`` inside the chart.

        The level is oriented as the boundary of ``{F < F(s)}``.  Closed
        levels (cylinder, elliptic) are integrated with the periodic
        trapezoid rule; hyperbolic arcs with Simpson's rule in the
        exponential parametrization.
        """
        orient = math.copysign(1.0, float(self.zeta.deriv()(s)))
        if self.kind == "cylinder":
            th = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
            xs, ys = np.full_like(th, s), th
            dx, dy = np.zeros_like(th), np.ones_like(th)
            a1, a2 = self.alpha(xs, ys)
            return orient * float(np.sum(a1 * dx + a2 * dy) * 2 * math.pi / n)
        if self.kind == "elliptic":
            if s <= 0:
                raise ChartError("elliptic levels need S > 0")
            r = math.sqrt(2 * s)
            th = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
            xs, ys = r * np.cos(th), r * np.sin(th)
            dx, dy = -ys, xs  # counterclockwise = rotated grad S
            a1, a2 = self.alpha(xs, ys)
            return orient * float(np.sum(a1 * dx + a2 * dy) * 2 * math.pi / n)
        if s == 0:
            raise ChartError("the zero level of a hyperbolic chart is singular")
        rad = self.bounds[0][1]
        root = math.sqrt(abs(s))
        umax = math.log(rad / root)
        if umax <= 0:
            raise ChartError("level does not meet the chart")
        from scipy.integrate import simpson

        u = np.linspace(-umax, umax, n if n % 2 else n + 1)
        total = 0.0
        branches = [(1.0, 1.0), (-1.0, -1.0)] if s > 0 else [(1.0, -1.0), (-1.0, 1.0)]
        for sp, sq in branches:
            xs, ys = sp * root * np.exp(u), sq * root * np.exp(-u)
            dx, dy = xs, -ys  # d/du of the parametrization = -(rotated grad S)
            a1, a2 = self.alpha(xs, ys)
            total += -float(simpson(a1 * dx + a2 * dy, x=u))
        return orient * total

    def with_alpha_offset(self, offset: AlphaOffset) -> "SteadyTriple":
        return replace(self, offset=offset)

    def corrupted_with_S_dS(self, scale: float = 1e-3) -> "SteadyTriple":
        """Add the closed form ``scale * S dS`` to ``alpha`` (keeps ``d alpha``)."""
        if self.kind == "cylinder":
            c1 = np.array([[0.0], [scale]])
            c2 = np.zeros((1, 1))
        elif self.kind == "elliptic":
            # S dS = S (P dP + Q dQ), S = (P^2 + Q^2)/2
            c1 = np.zeros((4, 3))
            c1[3, 0] = scale / 2
            c1[1, 2] = scale / 2
            c2 = c1.T.copy()
        else:
            # S dS = PQ (Q dP + P dQ)
            c1 = np.zeros((2, 3))
            c1[1, 2] = scale
            c2 = c1.T.copy()
        return self.with_alpha_offset(AlphaOffset(c1, c2))

    def to_json(self) -> dict[str, Any]:
        return {
            "chart": self.kind,
            "zeta": [float(x) for x in self.zeta.coef],
            "c": self.c,
            "eps": self.eps,
            "bounds": [list(self.bounds[0]), list(self.bounds[1])],
        }


# -- constructors ---------------------------------------------------------------

def cylinder_triple(zeta: Any, c: float, s_range: tuple[float, float] = (-1.0, 1.0)) -> SteadyTriple:
    """``alpha = eta(S) dTheta`` with ``eta = c/2pi + int_0^S zeta``, ``H = -int eta``."""
    lo, hi = s_range
    if not lo <= 0.0 <= hi or lo == hi:
        raise ChartError("cylinder chart must contain the level S = 0")
    return SteadyTriple("cylinder", _as_poly(zeta), float(c), 1, ((lo, hi), (0.0, 2 * math.pi)))


def elliptic_triple(zeta: Any, s_max: float = 1.0) -> SteadyTriple:
    """Triple near a nondegenerate extremum, ``S = (P^2 + Q^2)/2``.

    ``alpha = (int_0^S zeta)/(2S) * (P dQ - Q dP)``, which equals
    ``(int_0^S zeta) dTheta`` in polar action-angle coordinates but is a
    polynomial form in ``(P, Q)``; ``J`` is the Euclidean rotation, smooth at
    the origin, and ``H' = -(int_0^S zeta)/(2S)``.
    """
    if s_max <= 0:
        raise ChartError("elliptic chart needs s_max > 0")
    r = math.sqrt(s_max)
    return SteadyTriple("elliptic", _as_poly(zeta), 0.0, 1, ((-r, r), (-r, r)))


def hyperbolic_triple(zeta: Any, eps: int, c: float, radius: float = 1.0) -> SteadyTriple:
    """Triple near a nondegenerate saddle, ``S = PQ``, with ``sgn(dH/dF) = eps * sgn(zeta')``.

    Requires ``sgn c = eps``.  If ``|c| <= max |eta|`` on the chart, the
    chart radius is halved until the bound holds; below
    ``MIN_HYPERBOLIC_RADIUS`` a :class:`ChartError` is raised.
    """
    if eps not in (1, -1):
        raise ChartError("eps must be +1 or -1")
    if c == 0 or math.copysign(1, c) != eps:
        raise ChartError("circulation constant must be nonzero with sign eps")
    z = _as_poly(zeta)
    r = float(radius)
    while r >= MIN_HYPERBOLIC_RADIUS:
        t = SteadyTriple("hyperbolic", z, float(c), eps, ((-r, r), (-r, r)))
        if _max_abs_on(t.profile, -r * r, r * r) < abs(c):
            return t
        r /= 2
    raise ChartError("circulation too small for chart")


def _max_abs_on(p: Polynomial, lo: float, hi: float) -> float:
    crit = [x.real for x in p.deriv().roots() if abs(x.imag) < 1e-12 and lo <= x.real <= hi] if p.degree() > 1 else []
    pts = np.array([lo, hi, *crit])
    return float(np.max(np.abs(p(pts))))


# -- verification -----------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    chart: str
    grid: int
    fd_step: float
    residuals: dict[str, float]
    min_metric_eigenvalue: float
    metric_asymmetry: float
    sign_levels_checked: int
    sign_rule_failures: int
    tolerances: dict[str, float]
    passed: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def to_json(self) -> dict[str, Any]:
        return {
            "chart": self.chart,
            "grid": self.grid,
            "fd_step": self.fd_step,
            "residuals": self.residuals,
            "min_metric_eigenvalue": self.min_metric_eigenvalue,
            "metric_asymmetry": self.metric_asymmetry,
            "sign_rule": {"levels": self.sign_levels_checked, "failures": self.sign_rule_failures},
            "tolerances": self.tolerances,
            "passed": self.passed,
            "ok": self.ok,
        }


def _grid(t: SteadyTriple, n: int) -> tuple[np.ndarray, np.ndarray]:
    (x0, x1), (y0, y1) = t.bounds
    # stay inside the box so central differences remain on the chart
    xs = np.linspace(x0, x1, n + 2)[1:-1]
    ys = np.linspace(y0, y1, n + 2)[1:-1]
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return X, Y


def _sample_levels(t: SteadyTriple, count: int, dzeta_floor: float) -> list[float]:
    (x0, x1), _ = t.bounds
    if t.kind == "cylinder":
        lo, hi = x0, x1
    elif t.kind == "elliptic":
        lo, hi = 0.0, x1 * x1
    else:
        lo, hi = -x1 * x1, x1 * x1
    span = hi - lo
    cand = lo + span * (np.arange(4 * count) + 0.5) / (4 * count)
    dz = t.zeta.deriv()
    keep = [float(s) for s in cand if abs(dz(s)) > dzeta_floor and abs(s) > 1e-3 * span]
    if len(keep) > count:
        idx = np.linspace(0, len(keep) - 1, count).round().astype(int)
        keep = [keep[i] for i in idx]
    return keep


def verify_triple(
    t: SteadyTriple,
    grid: int = 200,
    fd_step: float = 1e-4,
    analytic_tol: float = 1e-10,
    fd_tol: float = 1e-6,
    levels: int = 100,
    dzeta_floor: float = 1e-6,
    circulation_floor: float = 1e-12,
) -> VerificationReport:
    """Check the steady-triple identities on a grid and the sign rule on levels.

    Residuals are absolute maxima over the grid; the finite-difference
    variants use central differences with step ``fd_step``.
    """
    X, Y = _grid(t, grid)
    S = t.S(X, Y)
    Fv = t.zeta(S)

    # (a) d alpha = F omega
    r_dalpha = float(np.max(np.abs(t.dalpha(X, Y) - Fv)))
    h = fd_step
    a1_yp, _ = t.alpha(X, Y + h)
    a1_ym, _ = t.alpha(X, Y - h)
    _, a2_xp = t.alpha(X + h, Y)
    _, a2_xm = t.alpha(X - h, Y)
    fd_curl = (a2_xp - a2_xm) / (2 * h) - (a1_yp - a1_ym) / (2 * h)
    r_dalpha_fd = float(np.max(np.abs(fd_curl - Fv)))

    # (b) J^2 = -Id
    Jm = t.J(X, Y)
    r_j2 = float(np.max(np.abs(Jm @ Jm + np.eye(2))))

    # (c) metric g = W J symmetric positive definite
    G = W @ Jm
    asym = float(np.max(np.abs(G - np.swapaxes(G, -1, -2))))
    sym = 0.5 * (G + np.swapaxes(G, -1, -2))
    min_eig = float(np.min(np.linalg.eigvalsh(sym)))

    # (d) J* alpha = -dH
    a1, a2 = t.alpha(X, Y)
    pull1 = a1 * Jm[..., 0, 0] + a2 * Jm[..., 1, 0]
    pull2 = a1 * Jm[..., 0, 1] + a2 * Jm[..., 1, 1]
    hx, hy = t.grad_H(X, Y)
    r_pull = float(np.max(np.maximum(np.abs(pull1 + hx), np.abs(pull2 + hy))))
    fhx = (t.H(X + h, Y) - t.H(X - h, Y)) / (2 * h)
    fhy = (t.H(X, Y + h) - t.H(X, Y - h)) / (2 * h)
    r_pull_fd = float(np.max(np.maximum(np.abs(pull1 + fhx), np.abs(pull2 + fhy))))

    # (e) sign(dH/dF) = -sign(circulation)
    checked = failures = 0
    for s in _sample_levels(t, levels, dzeta_floor):
        circ = t.level_circulation(s)
        dhdf = float(t.dH_dF(np.array(s)))
        if abs(circ) <= circulation_floor or dhdf == 0.0:
            continue
        checked += 1
        if math.copysign(1.0, dhdf) != -math.copysign(1.0, circ):
            failures += 1

    residuals = {
        "dalpha_minus_F_omega": r_dalpha,
        "dalpha_minus_F_omega_fd": r_dalpha_fd,
        "J_squared_plus_id": r_j2,
        "pullback_plus_dH": r_pull,
        "pullback_plus_dH_fd": r_pull_fd,
    }
    passed = {
        "dalpha": r_dalpha < analytic_tol and r_dalpha_fd < fd_tol,
        "J_squared": r_j2 < analytic_tol,
        "metric": min_eig > 0 and asym < analytic_tol,
        "pullback": r_pull < analytic_tol and r_pull_fd < fd_tol,
        "sign_rule": failures == 0,
    }
    return VerificationReport(
        t.kind,
        grid,
        fd_step,
        residuals,
        min_eig,
        asym,
        checked,
        failures,
        {"analytic": analytic_tol, "finite_difference": fd_tol},
        passed,
    )


# -- interpolation across a cylinder ---------------------------------------------

def smoothstep5(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x))


@dataclass(frozen=True)
class CylinderAlpha:
    """``alpha = A dS + B dTheta`` sampled on a tensor grid."""

    s: np.ndarray
    theta: np.ndarray
    A: np.ndarray
    B: np.ndarray
    dalpha_residual: float
    average_residual: float


def _table(b: Any, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    if callable(b):
        return np.asarray(b(S, T), dtype=float) * np.ones_like(S)
    arr = np.asarray(b, dtype=float)
    if arr.shape != S.shape:
        raise ValueError(f"table shape {arr.shape} does not match grid {S.shape}")
    return arr


def _derivative(fn: Callable[[np.ndarray], np.ndarray], s: np.ndarray, h: float) -> np.ndarray:
    # five-point stencil
    return (-fn(s + 2 * h) + 8 * fn(s + h) - 8 * fn(s - h) + fn(s - 2 * h)) / (12 * h)


def interpolate_on_cylinder(
    B1: Any,
    B2: Any,
    zeta: Any,
    eta_target: Callable[[np.ndarray], np.ndarray],
    s_range: tuple[float, float] = (-1.0, 1.0),
    n_s: int = 201,
    n_theta: int = 128,
    collar: float = 0.1,
    identity_tol: float = 1e-8,
) -> CylinderAlpha:
    """Blend two collar forms into one steady form on ``[s0, s1] x S^1``.

    ``B1`` (lower collar) and ``B2`` (upper collar) are the ``dTheta``
    components of the given forms, as callables ``(S, Theta)`` or tables on
    the grid.  Each must satisfy ``int B_i dTheta = eta_target(zeta(S))``.
    The blend against the reference ``B0 = eta_target(zeta(S)) / 2pi`` uses
    quintic smoothsteps over the collar width, so the Theta-average and the
    sign are kept at every ``S``.  The ``dS`` component is the zero-mean
    Theta-antiderivative of ``dB/dS - zeta``.
    """
    z = _as_poly(zeta)
    s0, s1 = s_range
    s = np.linspace(s0, s1, n_s)
    th = 2 * math.pi * np.arange(n_theta) / n_theta
    S, T = np.meshgrid(s, th, indexing="ij")
    b1, b2 = _table(B1, S, T), _table(B2, S, T)
    target = np.asarray(eta_target(z(s)), dtype=float)
    if np.any(target == 0) or (np.any(target > 0) and np.any(target < 0)):
        raise ChartError("target circulation changes sign on the cylinder")
    sgn = float(np.sign(target[0]))
    width = collar * (s1 - s0)
    low = 1.0 - smoothstep5((S - s0) / width)
    high = smoothstep5((S - (s1 - width)) / width)
    for name, b, mask in (("lower", b1, low > 0), ("upper", b2, high > 0)):
        if np.any(np.sign(b[mask]) != sgn):
            raise ChartError(f"{name} collar form does not share the sign of the target circulation")

    def mean_profile(x: np.ndarray) -> np.ndarray:
        return np.asarray(eta_target(z(x)), dtype=float) / (2 * math.pi)

    b0 = mean_profile(s)[:, None] * np.ones_like(S)
    for name, b in (("lower", b1), ("upper", b2)):
        avg = b.mean(axis=1) * 2 * math.pi
        err = float(np.max(np.abs(avg - target)[(low if name == "lower" else high)[:, 0] > 0], initial=0.0))
        if err > identity_tol * (1 + float(np.max(np.abs(target)))):
            raise ChartError(f"{name} collar form has the wrong Theta-average (off by {err:.2e})")
    B = low * b1 + high * b2 + (1.0 - low - high) * b0

    # pushforward identity: d/dS (eta_target o zeta) = 2 pi zeta
    hs = 1e-3 * (s1 - s0)
    identity = float(np.max(np.abs(_derivative(mean_profile, s, hs) - z(s))))
    if identity > identity_tol * (1 + float(np.max(np.abs(z(s))))):
        raise ChartError(f"target circulation is inconsistent with zeta (residual {identity:.2e})")

    osc = B - B.mean(axis=1, keepdims=True)
    dosc = np.gradient(osc, s, axis=0, edge_order=2)
    k = np.fft.fftfreq(n_theta, d=1.0 / n_theta)
    spec = np.fft.fft(dosc, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        integ = np.where(k != 0, spec / (1j * k), 0.0)
    A = np.real(np.fft.ifft(integ, axis=1))

    # d alpha = dB/dS - dA/dTheta, with dA/dTheta taken spectrally
    dA = np.real(np.fft.ifft(np.fft.fft(A, axis=1) * (1j * k), axis=1))
    mean_deriv = _derivative(mean_profile, s, hs)[:, None]
    dalpha = mean_deriv + dosc - dA
    resid = float(np.max(np.abs(dalpha - z(S))))
    avg_resid = float(np.max(np.abs(B.mean(axis=1) * 2 * math.pi - target)))
    return CylinderAlpha(s, th, A, B, resid, avg_resid)
