"""Closed forms: constants, rates, hypoexponential machinery, asymptotics."""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad

from ris_esr import (
    EULER_GAMMA,
    Scenario,
    baseline_no_ris,
    esr_asymptotic,
    esr_colluding,
    esr_largek_colluding,
    esr_noncolluding,
    hypoexp_cdf,
    hypoexp_pdf,
    ks_test,
    rate_d,
    rate_e_colluding,
    rate_e_noncolluding,
    reference_scenario,
    scaled_neg_ei,
)
from ris_esr.analytic import AnalyticConstants, EsrResult, _resolve_degenerate, constants
from ris_esr.channel import distances

LN2 = math.log(2.0)

# frozen reference-geometry composites (b=3, eta=0.8, alpha=3, K=5)
GOLDEN_A1 = 5.724334022399462e-11
GOLDEN_A2 = 1.1594255912687711e-08
GOLDEN_A3 = 3.353237234767872e-11
GOLDEN_RHO = 398107170553.49695
GOLDEN_LAMBDA_N100 = (
    20435866.23062098,
    5699905.661085469,
    2085068.2269301869,
    954699.0071844582,
    510288.1382389601,
)


class TestConstants:
    def test_golden_values(self, ref5):
        c = constants(ref5, 100)
        assert c.a1 == pytest.approx(GOLDEN_A1, rel=1e-12)
        assert c.a2 == pytest.approx(GOLDEN_A2, rel=1e-12)
        assert c.a3 == pytest.approx(GOLDEN_A3, rel=1e-12)
        assert c.rho == pytest.approx(GOLDEN_RHO, rel=1e-12)
        np.testing.assert_allclose(c.lambda_e, GOLDEN_LAMBDA_N100, rtol=1e-12)

    def test_independent_rederivation_of_cross_term(self, ref5):
        # route 2: the cross gain via the mean cosine of the quantization
        # error, E[cos err] = (2^b / pi) sin(pi / 2^b)
        c = constants(ref5, 100)
        d = distances(ref5)
        levels = 2.0**ref5.b
        mean_cos = levels / math.pi * math.sin(math.pi / levels)
        a2_alt = (
            (math.pi**1.5 * ref5.eta / 4.0)
            * (d.d_sd * d.d_sr * d.d_rd) ** (-ref5.alpha / 2.0)
            * mean_cos
        )
        assert c.a2 == pytest.approx(a2_alt, rel=1e-12)

    def test_pairwise_gain_identity(self, ref5):
        # (1 - cos 2x) / 32 == sin^2 x / 16
        c = constants(ref5, 10)
        d = distances(ref5)
        levels = 2.0**ref5.b
        alt = (
            ref5.eta**2
            * levels**2
            / 16.0
            * (d.d_sr * d.d_rd) ** -ref5.alpha
            * math.sin(math.pi / levels) ** 2
        )
        assert c.a3 == pytest.approx(alt, rel=1e-12)

    def test_no_surface_limit(self, ref5):
        c = constants(replace(ref5, eta=0.0), 50)
        assert c.a1 == c.a2 == c.a3 == 0.0
        assert all(b == 0.0 for b in c.b_k)
        d = distances(ref5)
        expected = tuple(c.rho * dse**-ref5.alpha for dse in d.d_se)
        np.testing.assert_allclose(c.lambda_e, expected, rtol=1e-12)

    def test_fine_quantizer_limit(self, ref5):
        c = constants(replace(ref5, b=20), 10)
        d = distances(ref5)
        limit = (math.pi**1.5 * ref5.eta / 4.0) * (d.d_sd * d.d_sr * d.d_rd) ** (
            -ref5.alpha / 2.0
        )
        assert c.a2 == pytest.approx(limit, rel=1e-9)

    def test_invalid_n(self, ref5):
        with pytest.raises(ValueError):
            constants(ref5, 0)


class TestRateD:
    def test_no_surface_reduces_to_direct_link(self, ref5):
        scn = replace(ref5, eta=0.0)
        d = distances(scn)
        expected = math.log2(1.0 + scn.rho * d.d_sd**-scn.alpha)
        assert rate_d(scn, 123) == pytest.approx(expected, rel=1e-12)

    def test_strictly_increasing_in_n(self, ref5):
        values = [rate_d(ref5, n) for n in (1, 2, 5, 20, 100, 1000, 10_000)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_large_n_growth_limit(self, ref5):
        n = 10**6
        c = constants(ref5, n)
        limit = 2 * math.log2(n) + math.log2(c.rho) + math.log2(c.a3)
        assert abs(rate_d(ref5, n) - limit) < 0.01


class TestRateENoncolluding:
    def test_unit_mean_value(self):
        c = AnalyticConstants(a1=0, a2=0, a3=0, b_k=(0,), lambda_e=(1.0,), rho=1.0)
        # scaled_neg_ei(1) / ln 2, frozen from the quadrature oracle
        assert rate_e_noncolluding(c) == pytest.approx(0.8603473822708859, rel=1e-10)

    def test_equal_means_invariant_under_k(self):
        lam = 37.5
        for k in (1, 2, 5):
            c = AnalyticConstants(
                a1=0, a2=0, a3=0, b_k=(0,) * k, lambda_e=(lam,) * k, rho=1.0
            )
            assert rate_e_noncolluding(c) == scaled_neg_ei(1.0 / lam) / LN2

    def test_large_mean_expansion(self):
        lam = 1e9
        c = AnalyticConstants(a1=0, a2=0, a3=0, b_k=(0,), lambda_e=(lam,), rho=1.0)
        assert rate_e_noncolluding(c) == pytest.approx(
            math.log2(lam) - EULER_GAMMA / LN2, abs=1e-3
        )


class TestHypoexp:
    def test_single_mean_is_exponential(self):
        lam = 2.5
        x = np.linspace(0.0, 10.0, 50)
        np.testing.assert_allclose(
            hypoexp_pdf([lam], x), np.exp(-x / lam) / lam, rtol=1e-12
        )

    def test_two_means_closed_convolution(self):
        # sum of Exp(mean 1) and Exp(mean 2): f(x) = e^{-x/2} - e^{-x}
        x = np.linspace(0.0, 20.0, 200)
        np.testing.assert_allclose(
            hypoexp_pdf([1.0, 2.0], x), np.exp(-x / 2.0) - np.exp(-x), rtol=1e-10, atol=1e-14
        )

    def test_integrates_to_one(self):
        total, _ = quad(lambda x: hypoexp_pdf([1.0, 2.0], x), 0.0, np.inf, limit=200)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_mc_sum_matches_cdf(self):
        gen = np.random.default_rng(3)
        lam = np.array([0.7, 1.9, 4.2])
        draws = sum(gen.exponential(l, size=100_000) for l in lam)
        assert ks_test(draws, lambda x: hypoexp_cdf(lam, x)).pass_at_1pct

    def test_cdf_matches_pdf_quadrature(self):
        lam = [0.5, 1.3, 2.9, 6.1]
        for x in (0.5, 2.0, 8.0):
            integral, _ = quad(lambda t: hypoexp_pdf(lam, t), 0.0, x, limit=200)
            assert hypoexp_cdf(lam, x) == pytest.approx(integral, abs=1e-9)

    def test_nonnegative_and_zero_left_of_origin(self):
        lam = [1.0, 3.0]
        assert hypoexp_pdf(lam, -1.0) == 0.0
        assert hypoexp_cdf(lam, -1.0) == 0.0
        x = np.linspace(0, 50, 500)
        assert np.all(hypoexp_pdf(lam, x) >= 0.0)

    @pytest.mark.parametrize("bad", [[0.0, 1.0], [-1.0], [math.nan, 1.0], []])
    def test_invalid_means(self, bad):
        with pytest.raises(ValueError):
            hypoexp_pdf(bad, 1.0)

    def test_degeneracy_resolution(self):
        lam, adjusted = _resolve_degenerate([2.0, 2.0, 5.0])
        assert adjusted
        assert len(set(lam)) == 3
        np.testing.assert_allclose(sorted(lam)[:2], [2.0, 2.0], rtol=1e-5)
        same, untouched = _resolve_degenerate([1.0, 2.0])
        assert not untouched
        np.testing.assert_array_equal(same, [1.0, 2.0])


class TestColluding:
    def test_single_eve_collapses_to_noncolluding(self):
        scn = reference_scenario(k_eves=1)
        nc = esr_noncolluding(scn, 64)
        c = esr_colluding(scn, 64)
        assert c.rate_e == nc.rate_e  # identical floating-point path
        assert c.rate_s == nc.rate_s

    def test_dominates_noncolluding(self):
        gen = np.random.default_rng(12)
        for _ in range(150):
            k = int(gen.integers(2, 5))
            scn = Scenario(
                source_pos=(0.0, 0.0),
                ris_pos=tuple(gen.uniform(20, 150, 2)),
                dest_pos=tuple(gen.uniform(-100, 100, 2)),
                eve_positions=tuple(tuple(gen.uniform(-120, 120, 2)) for _ in range(k)),
                alpha=float(gen.uniform(2.0, 4.0)),
                eta=float(gen.uniform(0.2, 1.0)),
            )
            n = int(gen.integers(1, 500))
            c = constants(scn, n)
            assert rate_e_colluding(c)[0] >= rate_e_noncolluding(c) - 1e-9

    def test_partial_fraction_weights_sum_to_one(self):
        from ris_esr.analytic import _signed_weights

        gen = np.random.default_rng(9)
        for k in (2, 4, 8):
            lam = np.sort(gen.uniform(1.0, 100.0, size=k))
            while np.min(np.diff(lam) / lam.max()) < 1e-3:
                lam = np.sort(gen.uniform(1.0, 100.0, size=k))
            signs, logw = _signed_weights(lam)
            assert float(np.sum(signs * np.exp(logw))) == pytest.approx(1.0, abs=1e-8)

    def test_clustered_means_flagged_and_stable(self, ref5):
        # two eavesdroppers at mirrored positions have identical means
        scn = replace(ref5, eve_positions=((60.0, -20.0), (60.0, 20.0), (30.0, -10.0)))
        result = esr_colluding(scn, 64)
        assert result.degenerate_lambdas
        assert math.isfinite(result.rate_e)
        # rate is continuous in the means: nudging one position barely moves it
        nudged = replace(
            ref5, eve_positions=((60.0, -20.0), (60.00001, 20.0), (30.0, -10.0))
        )
        assert esr_colluding(nudged, 64).rate_e == pytest.approx(result.rate_e, abs=1e-3)

    def test_many_clustered_eves_extended_precision(self):
        # 100 eavesdroppers with ~4% mean spacing: partial-fraction weights
        # reach ~1e15 yet the rate must stay put between K=99 and K=101
        values = {}
        for k in (99, 100, 101):
            scn = reference_scenario(k_eves=k)
            r = esr_colluding(scn, 250)
            assert math.isfinite(r.rate_e)
            values[k] = r.rate_e
        assert values[99] < values[100] < values[101]  # more eves, more leakage
        assert values[101] - values[99] < 0.05


class TestAsymptotic:
    def test_two_eve_weight_identity(self):
        b1, b2 = 3.0, 11.0
        assert b1 / (b1 - b2) + b2 / (b2 - b1) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("mode", ["non-colluding", "colluding"])
    def test_doubling_adds_exactly_one_bit(self, ref5, mode):
        for n in (2**10, 2**16):
            lo = esr_asymptotic(ref5, n, mode)
            hi = esr_asymptotic(ref5, 2 * n, mode)
            assert hi.rate_s - lo.rate_s == 1.0

    def test_approaches_exact_noncolluding(self, ref5):
        gap = abs(
            esr_noncolluding(ref5, 2**20).rate_s
            - esr_asymptotic(ref5, 2**20, "non-colluding").rate_s
        )
        assert gap < 0.1

    @pytest.mark.parametrize("mode,exact", [("non-colluding", esr_noncolluding), ("colluding", esr_colluding)])
    def test_convergence_monotone(self, ref5, mode, exact):
        gaps = [
            abs(exact(ref5, 2**p).rate_s - esr_asymptotic(ref5, 2**p, mode).rate_s)
            for p in range(10, 21, 2)
        ]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_unknown_mode(self, ref5):
        with pytest.raises(ValueError):
            esr_asymptotic(ref5, 16, "both")


class TestLargeK:
    def test_single_exponential_jensen_direction(self):
        scn = reference_scenario(k_eves=1)
        for n in (1, 16, 256):
            exact = esr_colluding(scn, n)
            upper = esr_largek_colluding(scn, n)
            assert upper.rate_e >= exact.rate_e

    def test_tightens_with_more_eves(self):
        # gap between the concentration approximation and the exact colluding
        # rate, on the unclamped eavesdropper rate
        gaps = []
        for k in (5, 10, 20, 50, 100):
            scn = reference_scenario(k_eves=k)
            gaps.append(
                abs(esr_largek_colluding(scn, 250).rate_e - esr_colluding(scn, 250).rate_e)
            )
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] <= 0.2


class TestBaseline:
    @pytest.mark.parametrize("k", [1, 5, 10])
    def test_reference_geometry_gives_exact_zero(self, k):
        result = baseline_no_ris(reference_scenario(k_eves=k))
        assert result.rate_s == 0.0
        assert result.method == "baseline"

    def test_distant_eve_gives_positive_rate(self):
        scn = Scenario(
            source_pos=(0.0, 0.0),
            ris_pos=(100.0, 0.0),
            dest_pos=(90.0, 20.0),
            eve_positions=((300.0, -40.0),),
        )
        assert baseline_no_ris(scn).rate_s > 0.0

    def test_direct_link_rate_decreasing(self, ref5, rng):
        from ris_esr.analytic import direct_link_rate

        pairs = rng.uniform(1.0, 500.0, size=(1000, 2))
        for a, b in pairs:
            lo, hi = min(a, b), max(a, b)
            if lo == hi:
                continue
            assert direct_link_rate(lo, ref5) > direct_link_rate(hi, ref5)


class TestEsrResult:
    def test_clamp_for_advantaged_eve(self, ref5):
        # nearest eavesdropper outguns the destination at small N
        result = esr_noncolluding(ref5, 10)
        assert result.rate_s == 0.0
        assert result.rate_e > result.rate_d

    def test_frozen_reference_points(self, ref5):
        # regression anchors for the analytic secrecy rate
        assert esr_noncolluding(ref5, 1024).rate_s == pytest.approx(
            0.7458841508865106, rel=1e-9
        )
        assert esr_noncolluding(ref5, 4096).rate_s == pytest.approx(
            4.406897161233566, rel=1e-9
        )
        assert esr_colluding(ref5, 4096).rate_s == pytest.approx(
            3.3681538342947626, rel=1e-9
        )

    def test_noncolluding_gap_near_one_bit_at_large_n(self, ref5):
        gap = esr_noncolluding(ref5, 16384).rate_s - esr_colluding(ref5, 16384).rate_s
        assert 0.7 <= gap <= 1.3

    def test_validation(self):
        with pytest.raises(ValueError):
            EsrResult(rate_d=1.0, rate_e=1.0, rate_s=-0.1, mode="colluding", method="analytic")
        with pytest.raises(ValueError):
            EsrResult(rate_d=math.inf, rate_e=1.0, rate_s=0.0, mode="colluding", method="analytic")
        with pytest.raises(ValueError):
            EsrResult(rate_d=1.0, rate_e=1.0, rate_s=0.0, mode="serial", method="analytic")
