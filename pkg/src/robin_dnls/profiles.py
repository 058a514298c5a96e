"""Explicit standing-wave profiles and gauge transformations.

The standing-wave profile on the half line is

    phi(x) = 2 * omega**(1/4) * sech(theta(x))**(1/2),
    theta(x) = 2*sqrt(omega)*x + artanh(-alpha/sqrt(omega)),

which solves phi_xx - omega*phi + (3/16)*phi**5 = 0 with phi'(0) = alpha*phi(0),
and exists exactly when omega > alpha**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import AdmissibilityError
from .field import (
    ComplexField,
    Grid,
    derivative_samples_highorder,
    differentiate_samples,
    norms,
)


@dataclass(frozen=True)
class WaveParams:
    """Frequency omega and Robin coefficient alpha, with omega > alpha**2."""

    omega: float
    alpha: float

    def __post_init__(self):
        if not self.omega > self.alpha**2:
            raise AdmissibilityError(
                f"need omega > alpha^2, got omega={self.omega}, alpha={self.alpha}"
            )


@dataclass(frozen=True)
class InitialData:
    """A field tagged with Robin-compatibility and finite-variance flags."""

    field: ComplexField
    robin_compatible: bool
    finite_variance: bool

    @classmethod
    def from_field(cls, field: ComplexField, alpha: float, tol: float = 1e-6) -> "InitialData":
        field.require_finite()
        vx0 = derivative_samples_highorder(field.values, field.grid)[0]
        v0 = field.values[0]
        scale = max(np.max(np.abs(field.values)), 1e-300)
        compatible = abs(vx0 - alpha * v0) <= tol * scale
        # xv is always in L2 on a truncated grid; recorded for fidelity to Sigma.
        finite_var = math.isfinite(norms(field)["xmoment2"])
        return cls(field=field, robin_compatible=bool(compatible), finite_variance=finite_var)


def _theta0(p: WaveParams) -> float:
    # artanh(-alpha/sqrt(omega)) via logs; |a| < 1 by admissibility.
    a = p.alpha / math.sqrt(p.omega)
    return 0.5 * math.log((1.0 + a) / (1.0 - a)) * -1.0


def standing_wave_profile(p: WaveParams, g: Grid) -> ComplexField:
    """Real positive sech^{1/2} profile sampled on the grid."""
    theta = 2.0 * math.sqrt(p.omega) * g.nodes + _theta0(p)
    vals = 2.0 * p.omega**0.25 / np.sqrt(np.cosh(theta))
    return ComplexField(g, vals.astype(np.complex128))


def profile_derivative(p: WaveParams, g: Grid) -> np.ndarray:
    """Analytic phi'(x) = -2*omega**(3/4)*sech^{1/2}(theta)*tanh(theta)."""
    theta = 2.0 * math.sqrt(p.omega) * g.nodes + _theta0(p)
    return -2.0 * p.omega**0.75 * np.tanh(theta) / np.sqrt(np.cosh(theta))


def profile_residual(phi: ComplexField, p: WaveParams) -> dict:
    """Sup-norm ODE residual at interior nodes and the boundary-condition error.

    bc_err uses the analytic derivative when phi samples the closed-form
    profile, a one-sided finite difference otherwise.
    """
    phi.require_finite()
    g = phi.grid
    h = g.h
    vals = phi.values
    lap = (vals[2:] - 2.0 * vals[1:-1] + vals[:-2]) / h**2
    res = lap - p.omega * vals[1:-1] + (3.0 / 16.0) * np.abs(vals[1:-1]) ** 4 * vals[1:-1]
    ode_sup = float(np.max(np.abs(res)))

    exact = standing_wave_profile(p, g).values
    if np.max(np.abs(vals - exact)) <= 1e-13 * np.max(np.abs(exact)):
        dphi0 = profile_derivative(p, g)[0]
    else:
        dphi0 = differentiate_samples(vals, g)[0]
    bc_err = float(abs(dphi0 - p.alpha * vals[0]))
    return {"ode_sup": ode_sup, "bc_err": bc_err}


def _tail_integral(v: ComplexField) -> np.ndarray:
    """T(x_j) = integral of |v|^2 from x_j to L (reverse cumulative trapezoid)."""
    absq = np.abs(v.values) ** 2
    cum = cumulative_trapezoid(absq, dx=v.grid.h, initial=0.0)
    return cum[-1] - cum


def gauge_quarter(v: ComplexField, direction: str = "forward") -> ComplexField:
    """u(x) = v(x) * exp(-(i/4) * int_x^inf |v|^2 dy); inverse undoes the phase."""
    phase = -0.25 * _tail_integral(v)
    if direction == "inverse":
        phase = -phase
    elif direction != "forward":
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return ComplexField(v.grid, v.values * np.exp(1j * phase))


def gauge_three_quarter(v: ComplexField, direction: str = "forward") -> ComplexField:
    """u(x) = v(x) * exp((3i/4) * int_inf^x |v|^2 dy) = v * exp(-(3i/4) T(x))."""
    phase = -0.75 * _tail_integral(v)
    if direction == "inverse":
        phase = -phase
    elif direction != "forward":
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return ComplexField(v.grid, v.values * np.exp(1j * phase))


def even_extension(v: ComplexField) -> ComplexField:
    """Even reflection onto [-L, L], returned on a 2n-1 node grid.

    The returned grid spans [0, 2L]; subtract L from its nodes to read
    physical coordinates (line_nodes does this).
    """
    g = v.grid
    wide = Grid(length=2.0 * g.length, n=2 * g.n - 1)
    vals = np.concatenate([v.values[:0:-1], v.values])
    return ComplexField(wide, vals)


def line_nodes(extended_grid: Grid) -> np.ndarray:
    """Physical coordinates of an even-extension grid: [-L, L]."""
    return extended_grid.nodes - 0.5 * extended_grid.length
