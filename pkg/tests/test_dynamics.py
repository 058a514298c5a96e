"""Time-stepping, diagnostics, and blow-up detection tests."""

import math

import numpy as np
import pytest

from robin_dnls.dynamics import (
    EvolutionOutcome,
    StepperConfig,
    evolve,
    orbital_distance,
    region_track,
    save_outcome_json,
    save_records_csv,
    step,
    t_star_from_virial,
    virial_check,
)
from robin_dnls.errors import DimensionError, InsufficientDataError
from robin_dnls.field import ComplexField, Grid, QuadratureRule, quadrature_weights
from robin_dnls.profiles import InitialData, WaveParams, standing_wave_profile

G = Grid(20.0, 2001)
P = WaveParams(1.0, -0.5)


def profile_init(p=P, g=G):
    return InitialData.from_field(standing_wave_profile(p, g), p.alpha)


class TestStep:
    def test_zero_field_fixed(self):
        cfg = StepperConfig(dt=1e-3)
        v = ComplexField(G, np.zeros(G.n))
        out = step(v, P, cfg, 1e-3)
        assert np.all(out.values == 0)

    def test_bad_dt(self):
        with pytest.raises(DimensionError):
            step(standing_wave_profile(P, G), P, StepperConfig(dt=1e-3), -1.0)

    def test_standing_wave_modulus_preserved_one_step(self):
        cfg = StepperConfig(dt=1e-3)
        phi = standing_wave_profile(P, G)
        out = step(phi, P, cfg, cfg.dt)
        # |v(t)| = |phi| exactly for the standing wave; one step is accurate
        # to O(dt^3 + dt h^2) locally (boundary-node constant ~50)
        assert np.max(np.abs(np.abs(out.values) - np.abs(phi.values))) < 1e-5

    def test_standing_wave_phase(self):
        # v(t) = e^{i omega t} phi: check the phase advance over 100 steps
        cfg = StepperConfig(dt=1e-3)
        v = standing_wave_profile(P, G)
        phi = v
        for _ in range(100):
            v = step(v, P, cfg, cfg.dt)
        phase = np.angle(np.vdot(phi.values, v.values))
        assert phase == pytest.approx(P.omega * 0.1, abs=1e-5)

    def test_linear_regime_mass_unitary(self):
        cfg = StepperConfig(dt=1e-3)
        w = quadrature_weights(G, QuadratureRule.TRAPEZOID)
        phi = standing_wave_profile(P, G)
        v = ComplexField(G, 1e-6 * phi.values)
        m0 = float(w @ np.abs(v.values) ** 2)
        out = step(v, P, cfg, cfg.dt)
        m1 = float(w @ np.abs(out.values) ** 2)
        assert abs(m1 - m0) <= 1e-12 * m0

    def test_trapezoid_mass_exact_full_nonlinearity(self):
        cfg = StepperConfig(dt=1e-3)
        w = quadrature_weights(G, QuadratureRule.TRAPEZOID)
        v = standing_wave_profile(P, G)
        m0 = float(w @ np.abs(v.values) ** 2)
        for _ in range(1000):  # one unit of time
            v = step(v, P, cfg, cfg.dt)
        m1 = float(w @ np.abs(v.values) ** 2)
        assert abs(m1 - m0) / m0 <= 1e-10


class TestOrbitalDistance:
    def test_zero_at_phase_rotation(self):
        phi = standing_wave_profile(P, G)
        rotated = ComplexField(G, phi.values * np.exp(0.7j))
        assert orbital_distance(rotated, phi) <= 1e-7

    def test_positive_for_perturbation(self):
        phi = standing_wave_profile(P, G)
        other = ComplexField(G, phi.values + 0.01 * np.exp(-G.nodes))
        assert orbital_distance(other, phi) > 1e-3


class TestVirial:
    def test_t_star(self):
        assert t_star_from_virial(1.0, 0.0, 1.0) is None
        t = t_star_from_virial(1.0, 0.0, -1.0)
        assert t == pytest.approx(1.0 / math.sqrt(8.0))

    def test_too_few_records(self):
        with pytest.raises(InsufficientDataError):
            virial_check(EvolutionOutcome(status="completed", records=[]), P)

    def test_standing_wave_slopes(self):
        # dJ/dt = 4E - alpha |phi(0)|^2, which vanishes identically for the
        # profile (J is constant on the standing wave), so compare on the
        # absolute scale 4|E|; dI/dt = 0 since |v| is time-independent
        out = evolve(profile_init(), P, StepperConfig(dt=5e-4), 0.5, sample_every=10)
        vc = virial_check(out, P)
        r0 = out.records[0]
        expected = 4.0 * r0.E - P.alpha * r0.trace0sq
        assert abs(expected) <= 1e-5 * abs(4.0 * r0.E)
        assert np.max(np.abs(vc["slopeJ_lhs"] - expected)) <= 0.01 * abs(4.0 * r0.E)
        I = np.array([r.I for r in out.records])
        assert np.max(np.abs(I - I[0])) <= 1e-3 * I[0]  # discrete drift only


class TestEvolve:
    def test_profile_run_conserves(self):
        out = evolve(profile_init(), P, StepperConfig(dt=5e-4), 1.0, sample_every=40)
        assert out.status == "completed"
        M = np.array([r.M for r in out.records])
        E = np.array([r.E for r in out.records])
        assert np.max(np.abs(M - M[0])) / abs(M[0]) <= 1e-6
        assert np.max(np.abs(E - E[0])) / abs(E[0]) <= 1e-5

    def test_records_ordered_and_sampled(self):
        out = evolve(profile_init(), P, StepperConfig(dt=1e-3), 0.2, sample_every=50)
        t = [r.t for r in out.records]
        assert t == sorted(t)
        assert t[0] == 0.0
        assert t[-1] == pytest.approx(0.2, abs=1e-9)

    def test_reference_profile_distance(self):
        phi = standing_wave_profile(P, G)
        out = evolve(profile_init(), P, StepperConfig(dt=1e-3), 0.2,
                     sample_every=50, reference_profile=phi)
        for r in out.records:
            assert r.orbital_dist is not None
            assert r.orbital_dist <= 1e-3


class TestRegionTrack:
    def test_profile_stays_boundary(self):
        from robin_dnls.functionals import evaluate

        d = evaluate(standing_wave_profile(P, G), P).S
        out = evolve(profile_init(), P, StepperConfig(dt=1e-3), 0.3, sample_every=50)
        track = region_track(out, P, d)
        assert track["first_change"] is None
        assert all(lbl == frozenset() for lbl in track["labels"])

    def test_small_data_stays_aplus(self):
        from robin_dnls.functionals import RegionLabel, evaluate

        phi = standing_wave_profile(P, G)
        d = evaluate(phi, P).S
        small = InitialData.from_field(ComplexField(G, 0.3 * phi.values), P.alpha)
        out = evolve(small, P, StepperConfig(dt=1e-3), 0.5, sample_every=50)
        track = region_track(out, P, d)
        for lbl in track["labels"]:
            assert RegionLabel.APLUS in lbl


class TestSerialization:
    def test_records_csv(self, tmp_path):
        out = evolve(profile_init(), P, StepperConfig(dt=1e-3), 0.05, sample_every=10)
        path = tmp_path / "records.csv"
        save_records_csv(out, path)
        lines = path.read_text().splitlines()
        assert lines[0] == ("t,M,E,S,K,P,I,J,gradnorm,trace0sq,"
                            "xquartic,orbital_dist,dt_current")
        assert len(lines) == len(out.records) + 1
        data = np.genfromtxt(path, delimiter=",", names=True)
        assert data["t"][-1] == pytest.approx(out.records[-1].t)

    def test_outcome_json(self, tmp_path):
        import json

        out = evolve(profile_init(), P, StepperConfig(dt=1e-3), 0.02, sample_every=10)
        path = tmp_path / "outcome.json"
        save_outcome_json(out, path)
        d = json.loads(path.read_text())
        assert d["status"] == "completed"
        assert set(d) == {"status", "t_final", "t_star_estimate"}
