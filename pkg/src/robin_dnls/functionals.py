"""Scalar functionals of a field and classification into variational regions.

With omega, alpha from WaveParams and quadrature norms of v:

    M = (1/2) ||v||^2                     (mass; L2 reading)
    E = (1/2) ||v_x||^2 - (1/32) ||v||_L6^6 + (alpha/2) |v(0)|^2
    L = ||v_x||^2 + omega ||v||^2 + alpha |v(0)|^2
    N = (3/16) ||v||_L6^6
    S = L/2 - N/6                         (action)
    K = L - N                             (Nehari functional)
    P = ||v_x||^2 - (1/16) ||v||_L6^6 + (alpha/2) |v(0)|^2   (Pohozaev-type)
    I = int x^2 |v|^2 dx                  (variance)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateTraceError,
    ParameterError,
    PreconditionError,
    ZeroFieldError,
)
from .field import ComplexField, QuadratureRule, norms
from .profiles import WaveParams


@dataclass(frozen=True)
class FunctionalReport:
    M: float
    E: float
    S: float
    K: float
    L: float
    N: float
    P: float
    trace0sq: float
    I: float
    omega: float
    alpha: float

    def to_dict(self) -> dict:
        return {
            "M": self.M, "E": self.E, "S": self.S, "K": self.K, "L": self.L,
            "N": self.N, "P": self.P, "trace0sq": self.trace0sq, "I": self.I,
            "omega": self.omega, "alpha": self.alpha,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class RegionLabel(Enum):
    APLUS = "Aplus"
    AMINUS = "Aminus"
    BPLUS = "Bplus"
    BMINUS = "Bminus"
    V = "V"


def evaluate(v: ComplexField, p: WaveParams,
             rule: QuadratureRule = QuadratureRule.SIMPSON) -> FunctionalReport:
    v.require_finite()
    nm = norms(v, rule)
    gradsq, l2sq, l6, tr = nm["gradsq"], nm["l2sq"], nm["l6pow6"], nm["trace0sq"]
    L = gradsq + p.omega * l2sq + p.alpha * tr
    N = (3.0 / 16.0) * l6
    return FunctionalReport(
        M=0.5 * l2sq,
        E=0.5 * gradsq - l6 / 32.0 + 0.5 * p.alpha * tr,
        S=0.5 * L - N / 6.0,
        K=L - N,
        L=L,
        N=N,
        P=gradsq - l6 / 16.0 + 0.5 * p.alpha * tr,
        trace0sq=tr,
        I=nm["xmoment2"],
        omega=p.omega,
        alpha=p.alpha,
    )


def scale(v: ComplexField, lam: float) -> ComplexField:
    """L2-invariant scaling v_lambda(x) = lambda^{1/2} v(lambda x).

    Resampled onto the same grid with cubic interpolation; values beyond
    the truncation point read as zero.
    """
    if lam <= 0:
        raise ParameterError(f"scaling parameter must be positive, got {lam}")
    if lam == 1.0:
        return v.copy()
    x = v.grid.nodes
    xs = lam * x
    spline_re = CubicSpline(x, v.values.real)
    spline_im = CubicSpline(x, v.values.imag)
    inside = xs <= v.grid.length
    vals = np.zeros(v.grid.n, dtype=np.complex128)
    vals[inside] = spline_re(xs[inside]) + 1j * spline_im(xs[inside])
    return ComplexField(v.grid, math.sqrt(lam) * vals)


def pohozaev_root(v: ComplexField, p: WaveParams,
                  rule: QuadratureRule = QuadratureRule.SIMPSON) -> float:
    """lambda_0 in (0, 1] with P(v_lambda0) = 0, for P(v) <= 0 and v(0) != 0.

    P(v_lambda) = lambda^2 (||v_x||^2 - ||v||_L6^6/16) + lambda (alpha/2)|v(0)|^2
    is quadratic in lambda with the closed-form root below.
    """
    rep = evaluate(v, p, rule)
    tol = 1e-12 * max(abs(rep.L), abs(rep.N), 1.0)
    if rep.P > tol:
        raise PreconditionError(f"pohozaev_root requires P(v) <= 0, got P={rep.P}")
    if abs(rep.P) <= tol:
        return 1.0
    a = rep.P - 0.5 * p.alpha * rep.trace0sq  # ||v_x||^2 - ||v||_L6^6 / 16
    b = 0.5 * p.alpha * rep.trace0sq
    if rep.trace0sq <= tol:
        raise DegenerateTraceError(
            "P(v) < 0 with v(0) = 0 has no root in (0, 1]"
        )
    if a >= 0:
        raise PreconditionError("quadratic coefficient not negative; no root in (0, 1]")
    lam0 = -b / a
    if not 0.0 < lam0 <= 1.0 + 1e-12:
        raise PreconditionError(f"no root in (0, 1]: lambda_0 = {lam0}")
    return min(lam0, 1.0)


def nehari_root(v: ComplexField, p: WaveParams,
                rule: QuadratureRule = QuadratureRule.SIMPSON) -> float:
    """Amplitude factor lambda* = (L/N)^{1/4} with K(lambda* v) = 0."""
    rep = evaluate(v, p, rule)
    if rep.N <= 0:
        raise ZeroFieldError("nehari_root undefined: N(v) = 0")
    if rep.L <= 0:
        raise PreconditionError(f"nehari_root requires L(v) > 0, got {rep.L}")
    return (rep.L / rep.N) ** 0.25


def classify_report(S: float, K: float, N: float, P: float, d_omega: float,
                    rel_tol: float = 1e-12) -> frozenset:
    """Region labels from scalar functionals; empty set means 'none'.

    Strict inequalities are resolved with a small relative tolerance so that
    on-boundary states (the exact profile) classify as 'none'.
    """
    eps = rel_tol * max(abs(S), abs(N), abs(d_omega), 1.0)
    labels = set()
    below = S < d_omega - eps
    if below and K > eps:
        labels.add(RegionLabel.APLUS)
    if below and K < -eps:
        labels.add(RegionLabel.AMINUS)
    if below and N < 3.0 * d_omega - eps:
        labels.add(RegionLabel.BPLUS)
    if below and N > 3.0 * d_omega + eps:
        labels.add(RegionLabel.BMINUS)
    # m = d(omega) (the Nehari level equals the least action level).
    if K < -eps and P < -eps and below:
        labels.add(RegionLabel.V)
    return frozenset(labels)


def classify(v: ComplexField, p: WaveParams, d_omega: float,
             rule: QuadratureRule = QuadratureRule.SIMPSON) -> frozenset:
    if d_omega <= 0:
        raise ParameterError(f"d_omega must be positive, got {d_omega}")
    rep = evaluate(v, p, rule)
    return classify_report(rep.S, rep.K, rep.N, rep.P, d_omega)


def coercivity_constant(p: WaveParams) -> float:
    """A constructive C > 0 with L(v) >= C ||v||_H1^2.

    From the Young-inequality split in the coercivity proof: any C in (0, 1)
    with (1-C)(omega-C) > alpha^2 works; take the midpoint of the admissible
    interval, found by bisection on the boundary curve.
    """
    omega, alpha2 = p.omega, p.alpha**2
    cmax = min(1.0, omega)

    def margin(c):
        return (1.0 - c) * (omega - c) - alpha2

    # margin(0) = omega - alpha^2 > 0; find where it changes sign (if it does).
    lo, hi = 0.0, cmax
    if margin(hi) > 0:
        return 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * lo
