"""Time evolution of the Robin half-line derivative NLS with diagnostics.

The equation i v_t + v_xx = (i/2)|v|^2 v_x - (i/2) v^2 conj(v_x) - (3/16)|v|^4 v
is advanced with a Crank-Nicolson scheme: the nonlinearity collapses to a
real multiplier W(v) = -Im(conj(v) v_x) - (3/16)|v|^4, which is frozen at the
midpoint field inside a small number of fixed-point sweeps, each a complex
tridiagonal solve. A 'plain_derivative' variant evolves i v_t + v_xx =
i |v|^2 v_x (no conservation structure) for the non-conservation contrast.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .backend import cn_step
from .errors import DimensionError, InsufficientDataError, StepFailureError
from .field import (
    ComplexField,
    QuadratureRule,
    derivative_samples_highorder,
    norms,
    quadrature_weights,
)
from .functionals import evaluate
from .profiles import InitialData, WaveParams, gauge_quarter

log = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "t", "M", "E", "S", "K", "P", "I", "J", "gradnorm",
    "trace0sq", "xquartic", "orbital_dist", "dt_current",
]


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    dt_min: float | None = None  # default dt / 2**15
    theta_iters: int = 3
    nonlinearity: str = "full"  # or "plain_derivative"
    blowup_gradnorm_factor: float = 1e3
    # Accept a step only when the final sweep change is below this fraction of
    # the field scale; near a focusing singularity the midpoint freeze stops
    # converging and the resulting dt collapse is the blow-up sensor.
    step_rtol: float = 1e-6

    def __post_init__(self):
        if self.dt <= 0:
            raise DimensionError("dt must be positive")
        if self.theta_iters < 1:
            raise DimensionError("theta_iters must be >= 1")
        if self.nonlinearity not in ("full", "plain_derivative"):
            raise DimensionError(f"unknown nonlinearity {self.nonlinearity!r}")
        if self.dt_min is not None and not self.dt_min < self.dt:
            raise DimensionError("dt_min must be smaller than dt")

    @property
    def dt_floor(self) -> float:
        return self.dt / 2**15 if self.dt_min is None else self.dt_min


@dataclass(frozen=True)
class EvolutionRecord:
    t: float
    M: float
    E: float
    S: float
    K: float
    P: float
    I: float
    J: float
    gradnorm: float
    trace0sq: float
    xquartic: float
    orbital_dist: float | None
    dt_current: float


@dataclass
class EvolutionOutcome:
    status: str  # completed | blowup_detected | step_collapse
    records: list = dc_field(default_factory=list)
    t_final: float = 0.0
    t_star_estimate: float | None = None


def step(v: ComplexField, p: WaveParams, cfg: StepperConfig, dt: float) -> ComplexField:
    """One accepted Crank-Nicolson step; raises StepFailureError on divergence."""
    if dt <= 0:
        raise DimensionError("dt must be positive")
    vals, changes = cn_step(
        v.values, v.grid.h, p.alpha, dt, cfg.theta_iters,
        1 if cfg.nonlinearity == "plain_derivative" else 0,
    )
    if not np.all(np.isfinite(vals)):
        raise StepFailureError("non-finite field after step")
    if len(changes) >= 2 and changes[-1] > changes[0] and changes[-1] > 1e-14:
        raise StepFailureError(
            f"fixed-point sweeps diverging (changes {changes[0]:.3e} -> {changes[-1]:.3e})"
        )
    scale = float(np.max(np.abs(vals))) + 1e-300
    if changes[-1] > cfg.step_rtol * scale:
        raise StepFailureError(
            f"fixed-point sweeps unresolved (residual {changes[-1]:.3e} "
            f"vs field scale {scale:.3e})"
        )
    return ComplexField(v.grid, vals)


def _gradnorm(values: np.ndarray, grid, w) -> float:
    vx = derivative_samples_highorder(values, grid)
    return math.sqrt(float(w @ np.abs(vx) ** 2))


def orbital_distance(v: ComplexField, phi: ComplexField,
                     rule: QuadratureRule = QuadratureRule.SIMPSON) -> float:
    """min over theta of ||v - e^{i theta} phi||_H1, theta = arg<v, phi>_H1."""
    w = quadrature_weights(v.grid, rule)
    vx = derivative_samples_highorder(v.values, v.grid)
    px = derivative_samples_highorder(phi.values, phi.grid)
    inner = complex(w @ (v.values * np.conj(phi.values) + vx * np.conj(px)))
    h1v = float(w @ (np.abs(v.values) ** 2 + np.abs(vx) ** 2))
    h1p = float(w @ (np.abs(phi.values) ** 2 + np.abs(px) ** 2))
    return math.sqrt(max(h1v + h1p - 2.0 * abs(inner), 0.0))


def _record(t, v, p, dt_current, reference_profile, rule) -> EvolutionRecord:
    rep = evaluate(v, p, rule)
    w = quadrature_weights(v.grid, rule)
    u = gauge_quarter(v)
    ux = derivative_samples_highorder(u.values, u.grid)
    x = v.grid.nodes
    J = float(np.imag(w @ (x * ux * np.conj(u.values))))
    xquartic = float(w @ (x * np.abs(v.values) ** 4))
    dist = (
        orbital_distance(v, reference_profile, rule)
        if reference_profile is not None else None
    )
    return EvolutionRecord(
        t=t, M=rep.M, E=rep.E, S=rep.S, K=rep.K, P=rep.P, I=rep.I, J=J,
        gradnorm=math.sqrt(max(rep.L - p.omega * 2.0 * rep.M - p.alpha * rep.trace0sq, 0.0)),
        trace0sq=rep.trace0sq, xquartic=xquartic,
        orbital_dist=dist, dt_current=dt_current,
    )


def t_star_from_virial(I0: float, J0: float, E: float) -> float | None:
    """Earliest positive root of I0 + 4 J0 t + 8 E t^2 (exists when E < 0)."""
    if E >= 0:
        return None
    disc = 16.0 * J0 * J0 - 32.0 * E * I0
    if disc < 0:
        return None
    return (4.0 * J0 + math.sqrt(disc)) / (-16.0 * E)


def evolve(init: InitialData, p: WaveParams, cfg: StepperConfig, t_end: float,
           sample_every: int = 20, reference_profile: ComplexField | None = None,
           rule: QuadratureRule = QuadratureRule.SIMPSON) -> EvolutionOutcome:
    """Adaptive Crank-Nicolson evolution with per-sample diagnostics.

    dt halves on step failure and is restored gradually after a run of
    accepted steps. Terminates at t_end, on blow-up detection (gradnorm grows
    by blowup_gradnorm_factor, or the step collapses below dt_min after
    ten-fold gradient growth), or on step collapse alone.
    """
    v = init.field
    v.require_finite()
    if not init.robin_compatible:
        log.warning("initial data does not satisfy the Robin condition numerically")
    w = quadrature_weights(v.grid, rule)

    records = [_record(0.0, v, p, cfg.dt, reference_profile, rule)]
    grad0 = max(records[0].gradnorm, 1e-300)
    t_star = t_star_from_virial(records[0].I, records[0].J, records[0].E)

    t = 0.0
    dt = cfg.dt
    accepted = 0
    streak = 0
    status = "completed"
    outcome_dt = dt
    cur_grad = records[0].gradnorm
    while t < t_end - 1e-12 * t_end:
        dt_try = min(dt, t_end - t)
        try:
            v = step(v, p, cfg, dt_try)
        except StepFailureError:
            dt *= 0.5
            streak = 0
            if dt < cfg.dt_floor:
                cur_grad = _gradnorm(v.values, v.grid, w)
                status = "blowup_detected" if cur_grad >= 10.0 * grad0 else "step_collapse"
                break
            continue
        t += dt_try
        accepted += 1
        streak += 1
        outcome_dt = dt
        if streak >= 10 and dt < cfg.dt:
            dt = min(2.0 * dt, cfg.dt)
            streak = 0
        if accepted % sample_every == 0 or t >= t_end - 1e-12 * t_end:
            rec = _record(t, v, p, dt, reference_profile, rule)
            records.append(rec)
            cur_grad = rec.gradnorm
            if rec.gradnorm >= cfg.blowup_gradnorm_factor * grad0:
                status = "blowup_detected"
                break

    return EvolutionOutcome(
        status=status, records=records, t_final=t, t_star_estimate=t_star
    )


def virial_check(outcome: EvolutionOutcome, p: WaveParams) -> dict:
    """Finite-difference dJ/dt and dI/dt against the virial right-hand sides.

    dJ/dt should equal 4 E(v) - alpha |v(0)|^2 and dI/dt should equal
    4 J - int x |v|^4 dx; factor_J / factor_I are the least-squares
    proportionality constants between the measured slopes and those
    candidates (expected 1.0).
    """
    recs = outcome.records
    if len(recs) < 3:
        raise InsufficientDataError("virial_check needs at least 3 records")
    t = np.array([r.t for r in recs])
    J = np.array([r.J for r in recs])
    I = np.array([r.I for r in recs])
    E = np.array([r.E for r in recs])
    tr = np.array([r.trace0sq for r in recs])
    xq = np.array([r.xquartic for r in recs])

    dtm = np.diff(t)
    slopeJ = np.diff(J) / dtm
    slopeI = np.diff(I) / dtm
    rhsJ_nodes = 4.0 * E - p.alpha * tr
    rhsI_nodes = 4.0 * J - xq
    rhsJ = 0.5 * (rhsJ_nodes[1:] + rhsJ_nodes[:-1])
    rhsI = 0.5 * (rhsI_nodes[1:] + rhsI_nodes[:-1])

    def lsq_factor(lhs, rhs):
        denom = float(rhs @ rhs)
        return float(lhs @ rhs) / denom if denom > 0 else float("nan")

    return {
        "slopeJ_lhs": slopeJ, "slopeJ_rhs": rhsJ,
        "slopeI_lhs": slopeI, "slopeI_rhs": rhsI,
        "factor_J": lsq_factor(slopeJ, rhsJ),
        "factor_I": lsq_factor(slopeI, rhsI),
    }


def region_track(outcome: EvolutionOutcome, p: WaveParams, d_omega: float,
                 rel_tol: float = 1e-5) -> dict:
    """Classify every sampled state from its scalar functionals.

    N and L are recovered from (S, K) via N = 3(S - K/2), L = K + N.
    Returns the label sequence and the first index where it changes (or None).
    rel_tol absorbs the discrete drift of the sampled functionals, so that
    boundary orbits (the exact profile) do not flicker across the strict
    inequalities; states genuinely inside a region clear it by O(1) margins.
    """
    from .functionals import classify_report

    labels = []
    for r in outcome.records:
        N = 3.0 * (r.S - 0.5 * r.K)
        labels.append(classify_report(r.S, r.K, N, r.P, d_omega, rel_tol=rel_tol))
    first_change = None
    for i in range(1, len(labels)):
        if labels[i] != labels[0]:
            first_change = i
            break
    return {"labels": labels, "first_change": first_change}


def save_records_csv(outcome: EvolutionOutcome, path):
    with open(path, "w") as fh:
        fh.write(",".join(RECORD_COLUMNS) + "\n")
        for r in outcome.records:
            row = [
                r.t, r.M, r.E, r.S, r.K, r.P, r.I, r.J, r.gradnorm,
                r.trace0sq, r.xquartic, r.orbital_dist, r.dt_current,
            ]
            fh.write(",".join("" if c is None else f"{c:.17g}" for c in row) + "\n")


def save_outcome_json(outcome: EvolutionOutcome, path):
    with open(path, "w") as fh:
        json.dump(
            {
                "status": outcome.status,
                "t_final": outcome.t_final,
                "t_star_estimate": outcome.t_star_estimate,
            },
            fh,
        )
        fh.write("\n")
