"""Declarative experiments: config parsing, kind dispatch, summaries, sweeps.

Experiment configs are flat ``key = value`` text files (``#`` comments). Each
run writes its artifacts (field/record CSVs, outcome and summary JSON) under
``<output_dir>/<name>/`` and returns an ExperimentSummary whose assertions
each carry the tolerance they were checked against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path

import numpy as np

from .dynamics import (
    EvolutionOutcome,
    StepperConfig,
    evolve,
    save_outcome_json,
    save_records_csv,
    t_star_from_virial,
    virial_check,
)
from .errors import ConfigurationError, ConvergenceError, ParameterError
from .field import ComplexField, Grid, norms, save_field_csv
from .functionals import evaluate, scale
from .groundstate import MinimizeConfig, d_ref, minimize
from .profiles import (
    InitialData,
    WaveParams,
    profile_residual,
    standing_wave_profile,
)

KINDS = (
    "profile", "groundstate", "evolve", "blowup",
    "stability", "instability", "remark_nonconservation",
)

SWEEP_PARAMS = ("omega", "alpha", "lambda", "delta", "A")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: str
    omega: float = 1.0
    alpha: float = 0.0
    grid_length: float = 20.0
    grid_n: int = 2001
    dt: float = 5e-4
    dt_min: float | None = None
    theta_iters: int = 3
    nonlinearity: str = "full"
    t_end: float = 10.0
    sample_every: int = 20
    delta: float = 1e-3      # stability perturbation amplitude
    lam: float = 1.1         # instability scaling lambda > 1
    amplitude: float | None = None  # blow-up amplitude A (None = auto-scan)
    tol: float = 1e-8        # groundstate tolerance
    output_dir: str = "out"
    rng_seed: int = 0

    def grid(self) -> Grid:
        return Grid(self.grid_length, self.grid_n)

    def params(self) -> WaveParams:
        return WaveParams(self.omega, self.alpha)

    def stepper(self) -> StepperConfig:
        return StepperConfig(
            dt=self.dt, dt_min=self.dt_min, theta_iters=self.theta_iters,
            nonlinearity=self.nonlinearity,
        )


@dataclass
class Assertion:
    name: str
    passed: bool
    value: float
    tolerance: str

    def to_dict(self) -> dict:
        return {
            "name": self.name, "passed": self.passed,
            "value": self.value, "tolerance": self.tolerance,
        }


@dataclass
class ExperimentSummary:
    name: str
    kind: str
    assertions: list = dc_field(default_factory=list)
    scalars: dict = dc_field(default_factory=dict)
    artifacts: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def check(self, name: str, passed: bool, value: float, tolerance: str):
        self.assertions.append(Assertion(name, bool(passed), float(value), tolerance))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "passed": self.passed,
            "assertions": [a.to_dict() for a in self.assertions],
            "scalars": self.scalars,
            "artifacts": [str(p) for p in self.artifacts],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


_FLOAT_KEYS = {
    "omega", "alpha", "grid_length", "dt", "dt_min", "t_end",
    "delta", "lambda", "amplitude", "tol",
}
_INT_KEYS = {"grid_n", "theta_iters", "sample_every", "rng_seed"}
_STR_KEYS = {"name", "kind", "nonlinearity", "output_dir"}
_KEY_ALIASES = {"lambda": "lam", "A": "amplitude", "seed": "rng_seed"}


def parse_config(path) -> ExperimentConfig:
    """Parse a flat key = value config file; '#' starts a comment."""
    fields: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "A":
                key_t = "amplitude"
            elif key in _KEY_ALIASES:
                key_t = _KEY_ALIASES[key]
            else:
                key_t = key
            try:
                if key in _FLOAT_KEYS:
                    fields[key_t] = float(value)
                elif key in _INT_KEYS:
                    fields[key_t] = int(value)
                elif key in _STR_KEYS or key in ("A", "seed"):
                    fields[key_t] = (
                        float(value) if key == "A"
                        else int(value) if key == "seed"
                        else value
                    )
                else:
                    raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {exc}")
    if "name" not in fields or "kind" not in fields:
        raise ConfigurationError(f"{path}: config must set 'name' and 'kind'")
    if fields["kind"] not in KINDS:
        raise ConfigurationError(
            f"{path}: kind must be one of {KINDS}, got {fields['kind']!r}"
        )
    return ExperimentConfig(**fields)


def validate_config(cfg: ExperimentConfig) -> dict:
    """Admissibility / sanity diagnostics: {errors: [...], warnings: [...]}."""
    errors: list[str] = []
    warnings: list[str] = []
    if cfg.kind not in KINDS:
        errors.append(f"kind: must be one of {KINDS}")
    if cfg.kind != "blowup" and not cfg.omega > cfg.alpha**2:
        errors.append(f"params: need omega > alpha^2 (omega={cfg.omega}, alpha={cfg.alpha})")
    try:
        g = cfg.grid()
        if g.h > 0.02 + 1e-15:
            warnings.append(f"grid: h = {g.h:.4g} above the 0.02 resolution guideline")
    except Exception as exc:
        errors.append(f"grid: {exc}")
    if cfg.dt <= 0:
        errors.append("stepper: dt must be positive")
    if cfg.kind == "stability" and not cfg.alpha < 0:
        errors.append("stability: requires alpha < 0")
    if cfg.kind == "instability":
        if not cfg.alpha > 0:
            errors.append("instability: requires alpha > 0")
        if not cfg.lam > 1.0:
            errors.append("instability: requires lambda > 1")
    if cfg.kind == "blowup" and cfg.alpha <= 0:
        warnings.append("blowup: the variance-concavity argument needs alpha > 0; "
                        "a run with alpha <= 0 is exploratory")
    if cfg.kind == "stability" and cfg.delta <= 0:
        errors.append("stability: delta must be positive")
    return {"errors": errors, "warnings": warnings}


def robin_bump(grid: Grid, alpha: float) -> np.ndarray:
    """(1 + alpha x) e^{-x^2/2}: satisfies the Robin condition for every scale."""
    x = grid.nodes
    return (1.0 + alpha * x) * np.exp(-0.5 * x**2)


def blowup_candidate(grid: Grid, alpha: float, amplitude: float) -> ComplexField:
    return ComplexField(grid, amplitude * robin_bump(grid, alpha))


def energy_of(v: ComplexField, alpha: float) -> float:
    """E(v) = 0.5||v_x||^2 - (1/32)||v||^6_{L6} + (alpha/2)|v(0)|^2."""
    nm = norms(v)
    return 0.5 * nm["gradsq"] - nm["l6pow6"] / 32.0 + 0.5 * alpha * nm["trace0sq"]


def find_negative_energy_amplitude(grid: Grid, alpha: float,
                                   bisect_steps: int = 40) -> float:
    """Smallest-ish A with E(psi_A) < 0: coarse upward scan, then bisection."""
    lo = 0.5
    hi = None
    a = lo
    for _ in range(60):
        if energy_of(blowup_candidate(grid, alpha, a), alpha) < 0:
            hi = a
            break
        lo = a
        a *= 1.25
    if hi is None:
        raise ParameterError("no negative-energy amplitude found in the scan range")
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        if energy_of(blowup_candidate(grid, alpha, mid), alpha) < 0:
            hi = mid
        else:
            lo = mid
    return hi


def perturbed_profile(p: WaveParams, grid: Grid, delta: float) -> ComplexField:
    """Profile plus a Robin-compatible bump of amplitude delta."""
    phi = standing_wave_profile(p, grid)
    return ComplexField(grid, phi.values + delta * robin_bump(grid, p.alpha))


def _outdir(cfg: ExperimentConfig) -> Path:
    d = Path(cfg.output_dir) / cfg.name
    d.mkdir(parents=True, exist_ok=True)
    return d


def _drift(series: np.ndarray) -> float:
    ref = abs(series[0])
    return float(np.max(np.abs(series - series[0]))) / max(ref, 1e-300)


def _relative_mass_energy_drift(outcome: EvolutionOutcome) -> tuple[float, float]:
    M = np.array([r.M for r in outcome.records])
    E = np.array([r.E for r in outcome.records])
    return _drift(M), _drift(E)


def _write_evolution(outcome: EvolutionOutcome, out: Path, stem: str,
                     summary: ExperimentSummary):
    csv_path = out / f"{stem}.records.csv"
    json_path = out / f"{stem}.outcome.json"
    save_records_csv(outcome, csv_path)
    save_outcome_json(outcome, json_path)
    summary.artifacts += [csv_path, json_path]


def _run_profile(cfg: ExperimentConfig, summary: ExperimentSummary):
    p, g = cfg.params(), cfg.grid()
    phi = standing_wave_profile(p, g)
    res = profile_residual(phi, p)
    rep = evaluate(phi, p)
    out = _outdir(cfg)
    save_field_csv(phi, out / "profile.csv")
    with open(out / "profile.json", "w") as fh:
        json.dump(
            {
                "omega": p.omega, "alpha": p.alpha, "L": g.length, "n": g.n,
                "trace0": float(np.real(phi.values[0])),
                "l2sq": norms(phi)["l2sq"],
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    with open(out / "functionals.json", "w") as fh:
        fh.write(rep.to_json())
        fh.write("\n")
    summary.artifacts += [out / "profile.csv", out / "profile.json",
                          out / "functionals.json"]
    ode_tol = 5e-4 * max(1.0, (g.h / 0.01) ** 2)
    summary.check("ode_residual_sup", res["ode_sup"] <= ode_tol, res["ode_sup"],
                  f"<= {ode_tol:.3g} (second-order in h)")
    summary.check("robin_bc_error", res["bc_err"] <= 1e-12, res["bc_err"], "<= 1e-12")
    summary.scalars.update({"S": rep.S, "K": rep.K, "P": rep.P, "l2sq": 2.0 * rep.M})


def _run_groundstate(cfg: ExperimentConfig, summary: ExperimentSummary):
    p, g = cfg.params(), cfg.grid()
    mcfg = MinimizeConfig("halfline", p, g, tol=cfg.tol, seed=cfg.rng_seed)
    try:
        res = minimize(mcfg)
    except ConvergenceError as exc:
        res = exc.result
    dref = d_ref(p, g)
    rel = abs(res.value - dref) / abs(dref)
    out = _outdir(cfg)
    save_field_csv(res.minimizer, out / "minimizer.csv")
    with open(out / "minimize.json", "w") as fh:
        json.dump(
            {
                "mode": res.mode, "omega": p.omega, "alpha": p.alpha,
                "value": res.value, "iterations": res.iterations,
                "residual": res.residual,
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    summary.artifacts += [out / "minimizer.csv", out / "minimize.json"]
    summary.check("residual_below_tol", res.residual <= cfg.tol, res.residual,
                  f"<= {cfg.tol:.3g}")
    summary.check("value_matches_d_ref", rel <= 1e-4, rel, "relative <= 1e-4")
    summary.scalars.update({"d_omega": dref, "value": res.value,
                            "iterations": res.iterations})


def _run_evolve(cfg: ExperimentConfig, summary: ExperimentSummary):
    p, g = cfg.params(), cfg.grid()
    v0 = (perturbed_profile(p, g, cfg.delta) if cfg.delta > 0
          else standing_wave_profile(p, g))
    init = InitialData.from_field(v0, p.alpha)
    phi = standing_wave_profile(p, g)
    outcome = evolve(init, p, cfg.stepper(), cfg.t_end,
                     sample_every=cfg.sample_every, reference_profile=phi)
    _write_evolution(outcome, _outdir(cfg), "evolve", summary)
    mdrift, edrift = _relative_mass_energy_drift(outcome)
    summary.check("status_completed", outcome.status == "completed",
                  1.0 if outcome.status == "completed" else 0.0, "status == completed")
    if cfg.nonlinearity == "full":
        summary.check("mass_drift", mdrift <= 1e-5, mdrift, "relative <= 1e-5")
    summary.scalars.update({
        "status_code": outcome.status, "t_final": outcome.t_final,
        "mass_drift": mdrift, "energy_drift": edrift,
        "E_init": outcome.records[0].E,
    })


def _parabola_margin(outcome: EvolutionOutcome) -> float:
    """Max relative excess of I(t) over its virial parabola bound (full-dt samples)."""
    r0 = outcome.records[0]
    I0, J0, E = r0.I, r0.J, r0.E
    worst = 0.0
    for r in outcome.records:
        if r.dt_current < r0.dt_current:  # past the adaptive collapse: unresolved
            break
        bound = I0 + 4.0 * J0 * r.t + 8.0 * E * r.t * r.t
        if bound <= 0:
            break
        worst = max(worst, (r.I - bound) / abs(bound))
    return worst


def _singular_stepper(cfg: ExperimentConfig) -> StepperConfig:
    """Stepper for runs expected to hit a singularity.

    The dt floor is raised to dt/2^8: past that depth the frozen-multiplier
    scheme regularizes the singularity and would crawl through it, so a
    256-fold collapse together with gradient growth is the detection signal.
    """
    dt_min = cfg.dt_min if cfg.dt_min is not None else cfg.dt / 2**8
    return StepperConfig(dt=cfg.dt, dt_min=dt_min, theta_iters=cfg.theta_iters,
                         nonlinearity=cfg.nonlinearity)


def _resolved_records(outcome: EvolutionOutcome) -> list:
    """Records sampled before the first adaptive dt reduction."""
    r0 = outcome.records[0]
    out = []
    for r in outcome.records:
        if r.dt_current < r0.dt_current:
            break
        out.append(r)
    return out


def _run_blowup(cfg: ExperimentConfig, summary: ExperimentSummary):
    g = cfg.grid()
    amp = cfg.amplitude
    if amp is None:
        amp = 1.05 * find_negative_energy_amplitude(g, cfg.alpha)
    v0 = blowup_candidate(g, cfg.alpha, amp)
    # omega plays no role in the dynamics; pick any admissible value.
    p = WaveParams(max(cfg.omega, cfg.alpha**2 + 1.0), cfg.alpha)
    init = InitialData.from_field(v0, cfg.alpha)
    E0 = energy_of(v0, cfg.alpha)
    outcome = evolve(init, p, _singular_stepper(cfg), cfg.t_end,
                     sample_every=cfg.sample_every)
    out = _outdir(cfg)
    save_field_csv(v0, out / "initial.csv")
    summary.artifacts.append(out / "initial.csv")
    _write_evolution(outcome, out, "blowup", summary)

    summary.check("negative_energy", E0 < 0, E0, "< 0")
    summary.check("blowup_detected", outcome.status == "blowup_detected",
                  1.0 if outcome.status == "blowup_detected" else 0.0,
                  "status == blowup_detected")
    t_star = outcome.t_star_estimate
    if t_star is not None:
        summary.check("detection_before_virial_margin",
                      outcome.t_final <= 1.2 * t_star,
                      outcome.t_final / t_star, "t_final <= 1.2 * t_star")
    margin = _parabola_margin(outcome)
    summary.check("variance_parabola_bound", margin <= 0.02, margin,
                  "I(t) <= I(0)+4J(0)t+8Et^2 within 2%")
    resolved = _resolved_records(outcome)
    vc = virial_check(
        EvolutionOutcome(status=outcome.status, records=resolved,
                         t_final=resolved[-1].t), p)
    slack = [float(l - 4.0 * r.E) for l, r in zip(vc["slopeJ_lhs"], resolved[:-1])]
    max_slack = max(slack) if slack else 0.0
    summary.check("dJdt_below_4E", max_slack <= 0.05 * abs(4.0 * E0), max_slack,
                  "dJ/dt <= 4E within 5% of |4E| (resolved samples)")
    r0 = outcome.records[0]
    summary.scalars.update({
        "amplitude": amp, "E_init": E0, "I0": r0.I, "J0": r0.J,
        "t_star_estimate": t_star, "t_final": outcome.t_final,
        "status_code": outcome.status, "factor_J": vc["factor_J"],
    })


def _run_stability(cfg: ExperimentConfig, summary: ExperimentSummary):
    p, g = cfg.params(), cfg.grid()
    phi = standing_wave_profile(p, g)
    init = InitialData.from_field(perturbed_profile(p, g, cfg.delta), p.alpha)
    outcome = evolve(init, p, cfg.stepper(), cfg.t_end,
                     sample_every=cfg.sample_every, reference_profile=phi)
    out = _outdir(cfg)
    save_field_csv(init.field, out / "initial.csv")
    summary.artifacts.append(out / "initial.csv")
    _write_evolution(outcome, out, "stability", summary)
    dists = [r.orbital_dist for r in outcome.records if r.orbital_dist is not None]
    max_dist = max(dists) if dists else math.inf
    bound = max(5e-2, 20.0 * cfg.delta)
    summary.check("status_completed", outcome.status == "completed",
                  1.0 if outcome.status == "completed" else 0.0, "status == completed")
    summary.check("orbital_distance_bound", max_dist <= bound, max_dist,
                  f"<= {bound:.3g} (max(5e-2, 20*delta))")
    mdrift, edrift = _relative_mass_energy_drift(outcome)
    r0 = outcome.records[0]
    summary.scalars.update({
        "delta": cfg.delta, "max_orbital_dist": max_dist, "t_final": outcome.t_final,
        "mass_drift": mdrift, "energy_drift": edrift, "E_init": r0.E,
        "I0": r0.I, "J0": r0.J, "status_code": outcome.status,
        "d_omega": d_ref(p, g),
    })


def _run_instability(cfg: ExperimentConfig, summary: ExperimentSummary):
    p, g = cfg.params(), cfg.grid()
    phi = standing_wave_profile(p, g)
    phil = scale(phi, cfg.lam)
    rep = evaluate(phil, p)
    d_omega = d_ref(p, g)
    # Scaling preserves the Robin ratio only at lambda = 1; the warning from
    # evolve is expected for lambda > 1.
    init = InitialData.from_field(phil, p.alpha)
    outcome = evolve(init, p, _singular_stepper(cfg), cfg.t_end,
                     sample_every=cfg.sample_every, reference_profile=phi)
    out = _outdir(cfg)
    save_field_csv(phil, out / "initial.csv")
    summary.artifacts.append(out / "initial.csv")
    _write_evolution(outcome, out, "instability", summary)
    summary.check("K_negative", rep.K < -1e-10, rep.K, "< 0 (1e-10 arithmetic)")
    summary.check("P_negative", rep.P < -1e-10, rep.P, "< 0 (1e-10 arithmetic)")
    summary.check("S_below_d", rep.S < d_omega - 1e-10, rep.S - d_omega,
                  "S - d < 0 (1e-10 arithmetic)")
    summary.check("blowup_detected", outcome.status == "blowup_detected",
                  1.0 if outcome.status == "blowup_detected" else 0.0,
                  "status == blowup_detected")
    summary.scalars.update({
        "lambda": cfg.lam, "S": rep.S, "K": rep.K, "P": rep.P, "d_omega": d_omega,
        "t_final": outcome.t_final, "status_code": outcome.status,
        "E_init": rep.E, "I0": outcome.records[0].I, "J0": outcome.records[0].J,
        "t_star_estimate": outcome.t_star_estimate,
    })


def _run_remark(cfg: ExperimentConfig, summary: ExperimentSummary):
    p, g = cfg.params(), cfg.grid()
    init = InitialData.from_field(perturbed_profile(p, g, cfg.delta), p.alpha)
    out = _outdir(cfg)
    drifts = {}
    for mode in ("full", "plain_derivative"):
        stepper = replace_nonlinearity(cfg.stepper(), mode)
        outcome = evolve(init, p, stepper, cfg.t_end, sample_every=cfg.sample_every)
        _write_evolution(outcome, out, f"remark_{mode}", summary)
        _, drifts[mode] = _relative_mass_energy_drift(outcome)
    ratio = drifts["plain_derivative"] / max(drifts["full"], 1e-300)
    summary.check("plain_drift_at_least_10x", ratio >= 10.0, ratio, ">= 10")
    summary.scalars.update({
        "energy_drift_full": drifts["full"],
        "energy_drift_plain": drifts["plain_derivative"],
        "drift_ratio": ratio,
    })


def replace_nonlinearity(stepper: StepperConfig, mode: str) -> StepperConfig:
    return StepperConfig(dt=stepper.dt, dt_min=stepper.dt_min,
                         theta_iters=stepper.theta_iters, nonlinearity=mode,
                         blowup_gradnorm_factor=stepper.blowup_gradnorm_factor)


_RUNNERS = {
    "profile": _run_profile,
    "groundstate": _run_groundstate,
    "evolve": _run_evolve,
    "blowup": _run_blowup,
    "stability": _run_stability,
    "instability": _run_instability,
    "remark_nonconservation": _run_remark,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    diag = validate_config(cfg)
    if diag["errors"]:
        raise ConfigurationError("; ".join(diag["errors"]))
    summary = ExperimentSummary(name=cfg.name, kind=cfg.kind)
    _RUNNERS[cfg.kind](cfg, summary)
    out = _outdir(cfg)
    path = out / "summary.json"
    summary.save(path)
    summary.artifacts.append(path)
    return summary


_SWEEP_FIELD = {"omega": "omega", "alpha": "alpha", "lambda": "lam",
                "delta": "delta", "A": "amplitude"}

_SWEEP_COLUMNS = [
    "value", "passed", "status_code", "l2sq", "S", "K", "P", "d_omega",
    "E_init", "t_star_estimate", "t_final", "max_orbital_dist", "drift_ratio",
]


def sweep(cfg: ExperimentConfig, parameter: str, values) -> list[ExperimentSummary]:
    """Independent runs over a parameter, plus a combined CSV of key scalars."""
    if parameter not in _SWEEP_FIELD:
        raise ParameterError(f"sweep parameter must be one of {SWEEP_PARAMS}")
    fieldname = _SWEEP_FIELD[parameter]
    summaries = []
    for val in values:
        sub = replace(cfg, name=f"{cfg.name}_{parameter}_{val:g}",
                      **{fieldname: float(val)})
        summaries.append(run_experiment(sub))

    combined = Path(cfg.output_dir) / f"{cfg.name}_sweep_{parameter}.csv"
    combined.parent.mkdir(parents=True, exist_ok=True)
    with open(combined, "w") as fh:
        fh.write("param," + ",".join(_SWEEP_COLUMNS) + "\n")
        for val, s in zip(values, summaries):
            row = [f"{val:.17g}"]
            for col in _SWEEP_COLUMNS:
                if col == "value":
                    row.append(f"{val:.17g}")
                elif col == "passed":
                    row.append("1" if s.passed else "0")
                else:
                    cell = s.scalars.get(col)
                    if cell is None:
                        row.append("")
                    elif isinstance(cell, str):
                        row.append(cell)
                    else:
                        row.append(f"{float(cell):.17g}")
            fh.write(",".join(row) + "\n")
    return summaries
