"""Log-smooth edge measures and their moments.

An edge measure lives on the height interval ``[lo, hi]`` of one graph edge.
Its density ``dmu/df`` is a piecewise polynomial plus optional terms
``coef * ln|f - at|`` anchored at a saddle endpoint.  Everything the rest of
the package needs (masses, weights ``rho = int f dmu``, higher moments,
partial integrals) has a closed form for this class, and stays exact when
the polynomial data are rationals and no log terms are present.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from scipy import integrate

from .numbers import Num, dump_num, parse_num

DEFAULT_QUAD_TOL = 1e-12
QUAD_DEPTH_CAP = 60
MIN_FIT_SAMPLES = 8


class QuadratureError(RuntimeError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class LogTerm:
    """Density contribution ``coef * ln|f - at|``.

    ``anchor`` records which endpoint of the owning edge sits at ``at``
    (``"tail"``/``"head"``), or ``"external"`` once the edge has been cut
    so that the singular point lies outside it.
    """

    at: Num
    coef: Num
    anchor: str = "tail"


@dataclass(frozen=True)
class Piece:
    lo: Num
    hi: Num
    poly: tuple[Num, ...]


def _poly_moment(poly: Sequence[Num], i: int, a: Num, b: Num) -> Num:
    total: Num = Fraction(0) if all(isinstance(x, (Fraction, int)) for x in (a, b, *poly)) else 0.0
    for k, p in enumerate(poly):
        if p == 0:
            continue
        n = i + k + 1
        total += p * (b**n - a**n) / n
    return total


def _ulogu_antiderivative(k: int, u: float) -> float:
    # antiderivative of u^k ln|u|, continuous at u = 0 with value 0
    if u == 0.0:
        return 0.0
    n = k + 1
    return u**n * (math.log(abs(u)) / n - 1.0 / (n * n))


def _log_moment(term: LogTerm, i: int, a: float, b: float) -> float:
    f0 = float(term.at)
    ua, ub = a - f0, b - f0
    parts = []
    for k in range(i + 1):
        c = math.comb(i, k) * f0 ** (i - k)
        if c == 0.0:
            continue
        parts.append(c * (_ulogu_antiderivative(k, ub) - _ulogu_antiderivative(k, ua)))
    return float(term.coef) * math.fsum(parts)


@dataclass(frozen=True)
class EdgeMeasure:
    lo: Num
    hi: Num
    pieces: tuple[Piece, ...]
    log_terms: tuple[LogTerm, ...] = ()
    kind: str = "poly_log"
    table: tuple[tuple[Num, ...], tuple[Num, ...]] | None = field(default=None, compare=False)

    # -- construction -----------------------------------------------------
    @classmethod
    def polynomial(cls, lo: Num, hi: Num, poly: Sequence[Num], log_terms: Sequence[LogTerm] = ()) -> "EdgeMeasure":
        return cls(lo, hi, (Piece(lo, hi, tuple(poly)),), tuple(log_terms))

    @classmethod
    def uniform(cls, lo: Num, hi: Num, density: Num = Fraction(1)) -> "EdgeMeasure":
        return cls.polynomial(lo, hi, (density,))

    @classmethod
    def from_table(cls, f: Sequence[Num], cumulative: Sequence[Num]) -> "EdgeMeasure":
        """Piecewise-linear cumulative table, i.e. piecewise-constant density."""
        if len(f) != len(cumulative) or len(f) < 2:
            raise MeasureError("table needs matching f/cumulative arrays of length >= 2")
        pieces = []
        for j in range(len(f) - 1):
            df = f[j + 1] - f[j]
            dm = cumulative[j + 1] - cumulative[j]
            if df <= 0:
                raise MeasureError(f"table f values must increase (index {j})")
            if dm < 0:
                raise MeasureError(f"table cumulative must be nondecreasing (index {j})")
            pieces.append(Piece(f[j], f[j + 1], (dm / df,)))
        return cls(f[0], f[-1], tuple(pieces), (), "table", (tuple(f), tuple(cumulative)))

    @classmethod
    def from_json(cls, obj: dict[str, Any], lo: Num, hi: Num) -> "EdgeMeasure":
        kind = obj.get("kind", "poly_log")
        logs = tuple(_log_from_json(t, lo, hi) for t in obj.get("log_terms", ()))
        if kind == "poly_log":
            poly = tuple(parse_num(x) for x in obj.get("poly", [1]))
            return cls.polynomial(lo, hi, poly, logs)
        if kind == "piecewise":
            pieces = tuple(
                Piece(parse_num(p["lo"]), parse_num(p["hi"]), tuple(parse_num(x) for x in p["poly"]))
                for p in obj["pieces"]
            )
            return cls(lo, hi, pieces, logs, "piecewise")
        if kind == "table":
            f = [parse_num(x) for x in obj["f"]]
            cum = [parse_num(x) for x in obj["cumulative"]]
            m = cls.from_table(f, cum)
            if m.lo != lo or m.hi != hi:
                # tolerate float round-off from mesh exports
                if abs(float(m.lo) - float(lo)) > 1e-9 * (1 + abs(float(lo))) or abs(float(m.hi) - float(hi)) > 1e-9 * (
                    1 + abs(float(hi))
                ):
                    raise MeasureError(f"table range [{m.lo}, {m.hi}] does not match edge range [{lo}, {hi}]")
            return m
        raise MeasureError(f"unknown measure kind {kind!r}")

    def to_json(self) -> dict[str, Any]:
        logs = [_log_to_json(t) for t in self.log_terms]
        if self.kind == "table" and self.table is not None:
            f, cum = self.table
            return {"kind": "table", "f": [dump_num(x) for x in f], "cumulative": [dump_num(x) for x in cum]}
        if len(self.pieces) == 1 and self.pieces[0].lo == self.lo and self.pieces[0].hi == self.hi:
            out: dict[str, Any] = {"kind": "poly_log", "poly": [dump_num(x) for x in self.pieces[0].poly]}
        else:
            out = {
                "kind": "piecewise",
                "pieces": [
                    {"lo": dump_num(p.lo), "hi": dump_num(p.hi), "poly": [dump_num(x) for x in p.poly]}
                    for p in self.pieces
                ],
            }
        if logs:
            out["log_terms"] = logs
        return out

    # -- queries ----------------------------------------------------------
    @property
    def exact(self) -> bool:
        if self.log_terms:
            return False
        return all(isinstance(x, (Fraction, int)) for p in self.pieces for x in (p.lo, p.hi, *p.poly))

    def integrate(self, i: int, a: Num | None = None, b: Num | None = None) -> Num:
        """Closed-form ``int_a^b f^i dmu`` (defaults to the whole edge)."""
        if i < 0:
            raise ValueError("moment order must be nonnegative")
        a = self.lo if a is None else max(a, self.lo)
        b = self.hi if b is None else min(b, self.hi)
        if b <= a:
            return Fraction(0) if self.exact else 0.0
        total: Num = Fraction(0) if self.exact else 0.0
        for p in self.pieces:
            lo, hi = max(p.lo, a), min(p.hi, b)
            if hi > lo:
                total += _poly_moment(p.poly, i, lo, hi)
        for t in self.log_terms:
            total += _log_moment(t, i, float(a), float(b))
        return total

    def integrate_quad(self, i: int, a: Num | None = None, b: Num | None = None, tol: float = DEFAULT_QUAD_TOL) -> float:
        """Adaptive-quadrature twin of :meth:`integrate`, used as a cross-check."""
        a = float(self.lo if a is None else max(a, self.lo))
        b = float(self.hi if b is None else min(b, self.hi))
        if b <= a:
            return 0.0
        breaks = sorted({float(p.lo) for p in self.pieces} | {float(p.hi) for p in self.pieces} | {float(t.at) for t in self.log_terms})
        breaks = [x for x in breaks if a < x < b]
        edges = [a, *breaks, b]
        total, err = 0.0, 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                # a missed tolerance is reported below through the error estimate
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, e = integrate.quad(
                    lambda x: x**i * float(self.density(x)), lo, hi, epsabs=tol / len(edges), epsrel=0.0, limit=QUAD_DEPTH_CAP
                )
            total += val
            err += e
        if err > tol:
            raise QuadratureError("requested quadrature tolerance not reached", err)
        return total

    def mass(self) -> Num:
        return self.integrate(0)

    def weight(self, a: Num | None = None, b: Num | None = None) -> Num:
        return self.integrate(1, a, b)

    def density(self, f: Any) -> Any:
        """Evaluate ``dmu/df`` at float points (scalar or array)."""
        x = np.asarray(f, dtype=float)
        out = np.zeros_like(x)
        for j, p in enumerate(self.pieces):
            last = j == len(self.pieces) - 1
            mask = (x >= float(p.lo)) & ((x <= float(p.hi)) if last else (x < float(p.hi)))
            if mask.any():
                out[mask] = np.polynomial.polynomial.polyval(x[mask], [float(c) for c in p.poly])
        for t in self.log_terms:
            with np.errstate(divide="ignore"):
                out = out + float(t.coef) * np.log(np.abs(x - float(t.at)))
        return out if out.ndim else float(out)

    def min_interior_density(self, samples: int = 1000) -> float:
        lo, hi = float(self.lo), float(self.hi)
        x = lo + (hi - lo) * (np.arange(samples) + 0.5) / samples
        return float(np.min(self.density(x)))

    # -- editing ----------------------------------------------------------
    def restrict(self, a: Num, b: Num) -> "EdgeMeasure":
        pieces = []
        for p in self.pieces:
            lo, hi = max(p.lo, a), min(p.hi, b)
            if hi > lo:
                pieces.append(Piece(lo, hi, p.poly))
        logs = tuple(LogTerm(t.at, t.coef, _anchor_label(t.at, a, b)) for t in self.log_terms)
        return EdgeMeasure(a, b, tuple(pieces), logs, "piecewise" if len(pieces) > 1 else "poly_log")

    def add_density(self, poly: Sequence[Num], a: Num, b: Num) -> "EdgeMeasure":
        """Return a copy whose density gains ``poly`` on ``[a, b]``."""
        if not (self.lo <= a < b <= self.hi):
            raise MeasureError(f"support [{a}, {b}] not inside edge range [{self.lo}, {self.hi}]")
        cuts = sorted({a, b} | {p.lo for p in self.pieces} | {p.hi for p in self.pieces})
        pieces = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            base = next(p for p in self.pieces if p.lo <= lo and hi <= p.hi)
            coeffs = list(base.poly)
            if a <= lo and hi <= b:
                n = max(len(coeffs), len(poly))
                coeffs = [(coeffs[k] if k < len(coeffs) else 0) + (poly[k] if k < len(poly) else 0) for k in range(n)]
            pieces.append(Piece(lo, hi, tuple(coeffs)))
        return EdgeMeasure(self.lo, self.hi, tuple(_merge_pieces(pieces)), self.log_terms, "piecewise")


def _anchor_label(at: Num, a: Num, b: Num) -> str:
    if at == a:
        return "tail"
    if at == b:
        return "head"
    return "external"


def _merge_pieces(pieces: list[Piece]) -> list[Piece]:
    out: list[Piece] = []
    for p in pieces:
        if out and _same_poly(out[-1].poly, p.poly) and out[-1].hi == p.lo:
            out[-1] = Piece(out[-1].lo, p.hi, out[-1].poly)
        else:
            out.append(p)
    return out


def _same_poly(p: Sequence[Num], q: Sequence[Num]) -> bool:
    n = max(len(p), len(q))
    return all((p[k] if k < len(p) else 0) == (q[k] if k < len(q) else 0) for k in range(n))


def _log_from_json(obj: dict[str, Any], lo: Num, hi: Num) -> LogTerm:
    coef = parse_num(obj["coef"])
    if "at" in obj:
        at = parse_num(obj["at"])
        return LogTerm(at, coef, _anchor_label(at, lo, hi))
    anchor = obj.get("anchor", "tail")
    if anchor not in ("tail", "head"):
        raise MeasureError(f"log term anchor must be 'tail' or 'head', got {anchor!r}")
    return LogTerm(lo if anchor == "tail" else hi, coef, anchor)


def _log_to_json(t: LogTerm) -> dict[str, Any]:
    if t.anchor in ("tail", "head"):
        return {"anchor": t.anchor, "coef": dump_num(t.coef)}
    return {"at": dump_num(t.at), "coef": dump_num(t.coef)}


def realize_weight(lo: Num, hi: Num, target: Num) -> EdgeMeasure:
    """Positive density on ``[lo, hi]`` whose first moment is exactly ``target``.

    The density is constant on each side of ``f = 0``; one side keeps unit
    density and the other absorbs the target.  Impossible sign requests
    (a positive-height edge with a non-positive weight, and vice versa)
    raise :class:`MeasureError`.
    """
    if not lo < hi:
        raise MeasureError("empty height range")
    half = Fraction(1, 2) if isinstance(lo, Fraction) and isinstance(hi, Fraction) else 0.5
    if lo >= 0 or hi <= 0:
        span = (hi * hi - lo * lo) * half
        if target == 0 or (target > 0) != (span > 0):
            raise MeasureError(f"weight {target} not realizable on [{lo}, {hi}] by a positive density")
        return EdgeMeasure.uniform(lo, hi, target / span)
    neg_span = -(lo * lo) * half  # first moment of unit density on [lo, 0]
    pos_span = (hi * hi) * half
    if target >= 0:
        q = (target - neg_span) / pos_span
        p = 1 if isinstance(q, Fraction) else 1.0
    else:
        p = (target - pos_span) / neg_span
        q = 1 if isinstance(p, Fraction) else 1.0
    one = Fraction(1) if isinstance(p, (Fraction, int)) and isinstance(q, (Fraction, int)) else 1.0
    pieces = (Piece(lo, 0 * one, (p * one,)), Piece(0 * one, hi, (q * one,)))
    return EdgeMeasure(lo, hi, pieces, (), "piecewise")


# -- log-coefficient fitting -------------------------------------------------

@dataclass(frozen=True)
class LogFit:
    """Least-squares estimate of the ``u ln|u|`` coefficient per saddle edge."""

    kappa: tuple[float, float, float]
    stderr: tuple[float, float, float]
    rms_residual: tuple[float, float, float]

    @property
    def ratios(self) -> tuple[float, float, float]:
        """Coefficients rescaled so the trunk entry equals 2."""
        k0 = self.kappa[0]
        if k0 == 0:
            return (float("nan"),) * 3
        s = 2.0 / k0
        return (2.0, self.kappa[1] * s, self.kappa[2] * s)


def fit_log_coefficients(samples: Sequence[tuple[Sequence[float], Sequence[float]]]) -> LogFit:
    """Fit ``mu(u) = kappa u ln|u| + a u + b u^2 + c u^3`` on each incident edge.

    ``samples`` holds three ``(u, mu)`` tables ordered trunk, branch, branch,
    where ``u = f - f(saddle)`` and ``mu`` is the (unsigned) measure between
    the saddle and the sample point.  For a nondegenerate saddle the three
    coefficients approach the ratio ``2 : -1 : -1``.
    """
    if len(samples) != 3:
        raise ValueError("expected three sample tables (trunk, branch, branch)")
    kappa, stderr, rms = [], [], []
    for j, (u, mu) in enumerate(samples):
        u = np.asarray(u, dtype=float)
        mu = np.asarray(mu, dtype=float)
        keep = u != 0.0
        u, mu = u[keep], mu[keep]
        if u.size < MIN_FIT_SAMPLES:
            raise ValueError(f"edge {j}: need at least {MIN_FIT_SAMPLES} samples, got {u.size}")
        scale = float(np.max(np.abs(u)))
        x = u / scale
        # scaled basis keeps the design matrix well conditioned
        design = np.column_stack([x * np.log(np.abs(x)), x, x**2, x**3])
        coef, _, _, _ = np.linalg.lstsq(design, mu, rcond=None)
        resid = mu - design @ coef
        dof = max(u.size - design.shape[1], 1)
        sigma2 = float(resid @ resid) / dof
        cov = sigma2 * np.linalg.pinv(design.T @ design)
        # mu = k' x ln|x| + ...  with x = u/scale  =>  k = k' / scale
        kappa.append(float(coef[0]) / scale)
        stderr.append(float(math.sqrt(max(cov[0, 0], 0.0))) / scale)
        rms.append(float(math.sqrt(sigma2)))
    return LogFit(tuple(kappa), tuple(stderr), tuple(rms))


# -- edge-level conveniences -------------------------------------------------

def _measure_of(e: Any) -> EdgeMeasure:
    return e if isinstance(e, EdgeMeasure) else e.measure


def edge_moment(e: Any, i: int, tol: float | None = None) -> Num:
    """``m_{i,e} = int_e f^i dmu``.

    Closed form by default; with ``tol`` the value is instead computed by
    adaptive quadrature and :class:`QuadratureError` reports a miss.
    """
    m = _measure_of(e)
    if tol is None:
        return m.integrate(i)
    return m.integrate_quad(i, tol=tol)


def edge_weight(e: Any, tol: float | None = None) -> Num:
    return edge_moment(e, 1, tol)


def total_mass_and_weight(g: Any) -> tuple[Num, Num]:
    """``(mu(Gamma), rho(Gamma))`` summed over the edges of ``g``."""
    mass: Num = Fraction(0)
    weight: Num = Fraction(0)
    for e in g.edges:
        mass += e.measure.mass()
        weight += e.measure.weight()
    return mass, weight
