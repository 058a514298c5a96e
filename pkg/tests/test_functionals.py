"""Functional evaluation, scaling roots, and region classification tests."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robin_dnls.errors import (
    ParameterError,
    PreconditionError,
    ZeroFieldError,
)
from robin_dnls.field import ComplexField, Grid, norms
from robin_dnls.functionals import (
    RegionLabel,
    classify,
    classify_report,
    coercivity_constant,
    evaluate,
    nehari_root,
    pohozaev_root,
    scale,
)
from robin_dnls.profiles import WaveParams, standing_wave_profile

G = Grid(20.0, 2001)


def random_field(seed, g=G):
    rng = np.random.default_rng(seed)
    env = np.exp(-0.3 * g.nodes)
    vals = env * (rng.standard_normal(g.n) + 1j * rng.standard_normal(g.n))
    # smooth it a little so derivatives are meaningful
    k = np.ones(9) / 9.0
    vals = np.convolve(vals, k, mode="same")
    return ComplexField(g, vals)


class TestEvaluate:
    def test_profile_anchors_alpha0(self):
        p = WaveParams(1.0, 0.0)
        rep = evaluate(standing_wave_profile(p, G), p)
        assert rep.M == pytest.approx(math.pi / 2, abs=1e-6)
        assert rep.S == pytest.approx(math.pi / 2, abs=1e-6)
        assert rep.K == pytest.approx(0.0, abs=1e-6)
        assert rep.P == pytest.approx(0.0, abs=1e-6)
        assert rep.E == pytest.approx(0.0, abs=1e-6)
        assert rep.L == pytest.approx(3 * math.pi / 2, abs=1e-6)
        assert rep.N == pytest.approx(3 * math.pi / 2, abs=1e-6)

    def test_profile_identities_alpha_neg(self):
        # K and P vanish at the exact profile for every admissible (omega, alpha)
        p = WaveParams(1.0, -0.5)
        rep = evaluate(standing_wave_profile(p, G), p)
        assert rep.K == pytest.approx(0.0, abs=1e-6)
        assert rep.P == pytest.approx(0.0, abs=1e-6)

    def test_report_serialization(self):
        p = WaveParams(1.0, -0.5)
        rep = evaluate(standing_wave_profile(p, G), p)
        d = json.loads(rep.to_json())
        assert set(d) == {"M", "E", "S", "K", "L", "N", "P", "trace0sq",
                          "I", "omega", "alpha"}

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_identities(self, seed):
        p = WaveParams(1.3, -0.4)
        rep = evaluate(random_field(seed), p)
        scale_ref = max(abs(rep.L), abs(rep.N), 1.0)
        assert abs(rep.S - (rep.L / 2 - rep.N / 6)) <= 1e-12 * scale_ref
        assert abs(rep.K - (rep.L - rep.N)) <= 1e-12 * scale_ref
        assert rep.I >= 0.0


class TestScale:
    def test_identity(self):
        phi = standing_wave_profile(WaveParams(1.0, 0.0), G)
        assert np.array_equal(scale(phi, 1.0).values, phi.values)

    def test_l2_invariance(self):
        phi = standing_wave_profile(WaveParams(1.0, -0.5), G)
        for lam in (1.1, 2.0, 0.7):
            scaled = scale(phi, lam)
            assert norms(scaled)["l2sq"] == pytest.approx(
                norms(phi)["l2sq"], rel=1e-6)

    def test_boundary_value(self):
        phi = standing_wave_profile(WaveParams(1.0, -0.5), G)
        s = scale(phi, 1.5)
        assert s.values[0] == pytest.approx(math.sqrt(1.5) * phi.values[0], abs=1e-12)

    def test_invalid(self):
        phi = standing_wave_profile(WaveParams(1.0, 0.0), G)
        with pytest.raises(ParameterError):
            scale(phi, -1.0)


class TestPohozaevRoot:
    def test_profile_gives_one(self):
        p = WaveParams(1.0, 0.5)
        phi = standing_wave_profile(p, G)
        assert pohozaev_root(phi, p) == pytest.approx(1.0, abs=1e-6)

    def test_scaled_profile_closed_form(self):
        # P(phi_lam) = lam(1-lam)(alpha/2)phi(0)^2 => root of P(v_mu)=0 from
        # v = phi_lam is mu = 1/lam (bisection-style oracle check below)
        p = WaveParams(1.0, 0.5)
        phi = standing_wave_profile(p, G)
        lam = 1.2
        v = scale(phi, lam)
        root = pohozaev_root(v, p)
        # oracle: scan P(scale(v, mu)) for a sign change
        mus = np.linspace(0.01, 1.0, 200)
        pvals = [evaluate(scale(v, float(m)), p).P for m in mus]
        sign_change = mus[int(np.argmin(np.abs(pvals)))]
        assert root == pytest.approx(1.0 / lam, abs=1e-3)
        assert root == pytest.approx(sign_change, abs=1e-2)

    def test_requires_p_nonpositive(self):
        p = WaveParams(1.0, 0.5)
        phi = standing_wave_profile(p, G)
        shrunk = scale(phi, 0.8)  # P > 0
        with pytest.raises(PreconditionError):
            pohozaev_root(shrunk, p)


class TestNehariRoot:
    def test_profile_gives_one(self):
        p = WaveParams(1.0, -0.5)
        phi = standing_wave_profile(p, G)
        assert nehari_root(phi, p) == pytest.approx(1.0, abs=1e-6)

    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_bisection_oracle(self, seed):
        p = WaveParams(1.0, -0.5)
        v = random_field(seed)
        lam = nehari_root(v, p)
        # oracle: K(c v) = c^2 L - c^6 N changes sign at c = lam
        rep = evaluate(v, p)

        def K_of(c):
            return c**2 * rep.L - c**6 * rep.N

        lo, hi = 1e-6, 1e6
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if K_of(mid) > 0:
                lo = mid
            else:
                hi = mid
        assert lam == pytest.approx(lo, rel=1e-8)
        assert K_of(lam) == pytest.approx(0.0, abs=1e-8 * rep.L)

    def test_zero_field(self):
        p = WaveParams(1.0, 0.0)
        with pytest.raises(ZeroFieldError):
            nehari_root(ComplexField(G, np.zeros(G.n)), p)


class TestClassify:
    def test_profile_is_boundary(self):
        p = WaveParams(1.0, -0.5)
        phi = standing_wave_profile(p, G)
        d = evaluate(phi, p).S
        assert classify(phi, p, d) == frozenset()

    def test_small_field_aplus(self):
        p = WaveParams(1.0, -0.5)
        phi = standing_wave_profile(p, G)
        d = evaluate(phi, p).S
        small = ComplexField(G, 0.1 * phi.values)
        labels = classify(small, p, d)
        assert RegionLabel.APLUS in labels
        assert RegionLabel.BPLUS in labels

    def test_scaled_profile_in_v(self):
        p = WaveParams(1.0, 0.5)
        phi = standing_wave_profile(p, G)
        d = evaluate(phi, p).S
        v = scale(phi, 1.1)
        labels = classify(v, p, d)
        assert RegionLabel.V in labels
        assert RegionLabel.AMINUS in labels

    def test_k_negative_implies_l_above_3d(self):
        # inside the Nehari-deficient cone, L = K + N > 3 d is impossible
        # when S < d; check the contrapositive structure on a corpus
        p = WaveParams(1.0, -0.5)
        phi = standing_wave_profile(p, G)
        d = evaluate(phi, p).S
        for lam in (1.05, 1.2, 1.5):
            rep = evaluate(scale(phi, lam), p)
            if rep.K < 0 and rep.S < d:
                assert rep.N > 3 * d - 1e-9

    def test_classify_requires_positive_level(self):
        p = WaveParams(1.0, 0.0)
        phi = standing_wave_profile(p, G)
        with pytest.raises(ParameterError):
            classify(phi, p, -1.0)

    def test_report_classifier_boundary_tolerance(self):
        assert classify_report(1.0, 0.0, 3.0, 0.0, 1.0) == frozenset()


class TestCoercivity:
    @settings(max_examples=20, deadline=None)
    @given(omega=st.floats(0.3, 4.0), frac=st.floats(-0.9, 0.9))
    def test_constructive_bound(self, omega, frac):
        alpha = frac * math.sqrt(omega)
        p = WaveParams(omega, alpha)
        C = coercivity_constant(p)
        assert 0 < C < min(1.0, omega)
        assert (1.0 - C) * (omega - C) > alpha**2 - 1e-12

    def test_bound_holds_on_fields(self):
        p = WaveParams(1.0, -0.8)
        C = coercivity_constant(p)
        for seed in range(5):
            v = random_field(seed)
            rep = evaluate(v, p)
            nm = norms(v)
            assert rep.L >= C * nm["h1sq"] - 1e-9 * nm["h1sq"]
