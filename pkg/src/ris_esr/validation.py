"""Statistical verification of the model's distributional assumptions.

Three families of checks back the closed forms:

* composite eavesdropper phases are circularly uniform and independent of
  both the applied phases and each other;
* each eavesdropper's SNR approaches an exponential law with the predicted
  mean as the element count grows;
* distinct eavesdroppers' SNRs decorrelate as the element count grows;

plus a direct comparison of every closed form against its Monte Carlo
estimate.  Checks run below the large-N regime are recorded as informational
(the approximations are not expected to hold there) and do not gate the
suite's pass/fail verdict.

Independence of circular quantities is measured through correlations of
cosine and sine components rather than angular histograms: simple statistics
with quantifiable thresholds.  The 0.05 correlation bound and the 1% KS level
give each check a >= 99% pass probability under the null at the sample sizes
used here.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .analytic import (
    MODE_COLLUDING,
    MODE_NONCOLLUDING,
    constants,
    esr_colluding,
    esr_noncolluding,
)
from .channel import Scenario
from .monte_carlo import (
    McConfig,
    collect_gamma_samples,
    collect_phase_samples,
    estimate_esr,
)
from .numerics import ks_test, pearson_correlation

__all__ = [
    "CheckResult",
    "ValidationReport",
    "run_validation_suite",
    "validate_closed_forms",
    "validate_exponential_limit",
    "validate_phase_statistics",
    "validate_snr_independence",
]

CORRELATION_BOUND = 0.05
MEAN_RATIO_BOUND = 0.03
# Below these element counts the large-N approximations are not expected to
# hold; checks still run but are tagged informational and do not gate.
SMALL_N_DISTRIBUTIONAL = 16
SMALL_N_CLOSED_FORM = 32
CLOSED_FORM_TOL = 0.35
CLOSED_FORM_TOL_SMALL_N = 0.5


@dataclass(frozen=True)
class CheckResult:
    """One named statistic against one threshold."""

    name: str
    statistic: float
    threshold: float
    passed: bool
    detail: str
    informational: bool = False


@dataclass
class ValidationReport:
    """Ordered collection of check results with text/JSON rendering."""

    checks: list[CheckResult] = field(default_factory=list)

    def add(self, report: "ValidationReport") -> "ValidationReport":
        self.checks.extend(report.checks)
        return self

    @property
    def passed(self) -> bool:
        """True when every non-informational check passed."""
        return all(c.passed for c in self.checks if not c.informational)

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            verdict = "PASS" if c.passed else "FAIL"
            tag = " (informational)" if c.informational else ""
            lines.append(
                f"{verdict}{tag} {c.name}: statistic={c.statistic:.6g} "
                f"threshold={c.threshold:.6g} — {c.detail}"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps([asdict(c) for c in self.checks], indent=2, sort_keys=True) + "\n"


def _corr_check(name: str, a_cos, b_cos, a_sin, b_sin, detail: str, informational: bool):
    r_cos = pearson_correlation(a_cos, b_cos)
    r_sin = pearson_correlation(a_sin, b_sin)
    stat = max(abs(r_cos), abs(r_sin))
    return CheckResult(
        name=name,
        statistic=stat,
        threshold=CORRELATION_BOUND,
        passed=stat < CORRELATION_BOUND,
        detail=f"{detail}; cos/sin correlations {r_cos:+.4f}/{r_sin:+.4f}",
        informational=informational,
    )


def validate_phase_statistics(
    scenario: Scenario, n: int, trials: int, seed: int
) -> ValidationReport:
    """Uniformity and independence of the composite eavesdropper phases.

    Three checks: (a) the first composite phase is uniform on [0, 2*pi);
    (b) it is independent of the applied-phase-plus-first-hop angle it is
    built from; (c) phases at different elements are mutually independent.
    These hold exactly for any element count and bit width.
    """
    if trials < 1000:
        raise ValueError("trials must be >= 1000")
    psi_11, psi_12, applied = collect_phase_samples(scenario, n, trials, seed)
    two_pi = 2.0 * math.pi
    gof = ks_test(psi_11, lambda x: x / two_pi)
    report = ValidationReport()
    report.checks.append(
        CheckResult(
            name="phase-uniformity",
            statistic=gof.statistic,
            threshold=1.63 / math.sqrt(trials),
            passed=gof.pass_at_1pct,
            detail=f"KS of composite phase vs Uniform[0,2pi), {trials} trials, 1% level",
        )
    )
    report.checks.append(
        _corr_check(
            "phase-vs-applied-independence",
            np.cos(psi_11),
            np.cos(applied),
            np.sin(psi_11),
            np.sin(applied),
            "composite phase vs applied-plus-first-hop angle",
            informational=False,
        )
    )
    report.checks.append(
        _corr_check(
            "phase-cross-element-independence",
            np.cos(psi_11),
            np.cos(psi_12),
            np.sin(psi_11),
            np.sin(psi_12),
            "composite phases at elements 1 and 2",
            informational=False,
        )
    )
    return report


def validate_exponential_limit(
    scenario: Scenario, n: int, trials: int, seed: int
) -> ValidationReport:
    """Per-eavesdropper SNR against the exponential law with predicted mean.

    Two checks per eavesdropper: a 1% KS test of the normalized SNR against
    Exp(1), and the sample-mean-to-predicted-mean ratio within 3%.  The
    exponential shape is a large-N limit, so the KS rows are informational
    below ``SMALL_N_DISTRIBUTIONAL`` elements; the mean is exact at every
    element count and always gates.
    """
    if trials < 1000:
        raise ValueError("trials must be >= 1000")
    scn = scenario.with_n_elements(n)
    lam = constants(scn, n).lambda_e
    gamma_e, _ = collect_gamma_samples(scn, n, trials, seed)
    small_n = n < SMALL_N_DISTRIBUTIONAL
    report = ValidationReport()
    for k, (samples, lam_k) in enumerate(zip(gamma_e, lam), start=1):
        gof = ks_test(samples / lam_k, lambda x: 1.0 - np.exp(-x))
        report.checks.append(
            CheckResult(
                name=f"eve{k}-exponential-ks",
                statistic=gof.statistic,
                threshold=1.63 / math.sqrt(trials),
                passed=gof.pass_at_1pct,
                detail=f"KS of normalized SNR vs Exp(1), predicted mean {lam_k:.6g}",
                informational=small_n,
            )
        )
        ratio = float(np.mean(samples)) / lam_k
        report.checks.append(
            CheckResult(
                name=f"eve{k}-mean-ratio",
                statistic=abs(ratio - 1.0),
                threshold=MEAN_RATIO_BOUND,
                passed=abs(ratio - 1.0) < MEAN_RATIO_BOUND,
                detail=f"sample mean / predicted mean = {ratio:.4f}",
            )
        )
    return report


def validate_snr_independence(
    scenario: Scenario, n: int, trials: int, seed: int
) -> ValidationReport:
    """Pairwise correlation of distinct eavesdroppers' SNRs.

    The SNRs share the first-hop fading, but the composite phases decorrelate
    them; correlations should vanish for large element counts.  Informational
    below ``SMALL_N_DISTRIBUTIONAL`` elements, where the shared terms are
    still visible.
    """
    if trials < 1000:
        raise ValueError("trials must be >= 1000")
    if scenario.k_eves < 2:
        raise ValueError("need at least two eavesdroppers")
    scn = scenario.with_n_elements(n)
    gamma_e, _ = collect_gamma_samples(scn, n, trials, seed)
    small_n = n < SMALL_N_DISTRIBUTIONAL
    report = ValidationReport()
    for i in range(len(gamma_e)):
        for j in range(i + 1, len(gamma_e)):
            r = pearson_correlation(gamma_e[i], gamma_e[j])
            report.checks.append(
                CheckResult(
                    name=f"snr-independence-{i + 1}-{j + 1}",
                    statistic=abs(r),
                    threshold=CORRELATION_BOUND,
                    passed=abs(r) < CORRELATION_BOUND,
                    detail=f"correlation of eavesdropper {i + 1} and {j + 1} SNRs = {r:+.4f}",
                    informational=small_n,
                )
            )
    return report


def validate_closed_forms(
    scenario: Scenario, n_list, config: McConfig
) -> ValidationReport:
    """Closed-form secrecy rates against Monte Carlo, both modes.

    Agreement within ``max(0.35, 4*stderr)`` bits per point; points below
    ``SMALL_N_CLOSED_FORM`` elements use a widened 0.5-bit tolerance and are
    informational.
    """
    report = ValidationReport()
    for n in n_list:
        small_n = n < SMALL_N_CLOSED_FORM
        base_tol = CLOSED_FORM_TOL_SMALL_N if small_n else CLOSED_FORM_TOL
        for mode, analytic_fn in (
            (MODE_NONCOLLUDING, esr_noncolluding),
            (MODE_COLLUDING, esr_colluding),
        ):
            analytic = analytic_fn(scenario, n)
            mc = estimate_esr(
                scenario,
                n,
                McConfig(trials=config.trials, seed=config.seed, mode=mode),
            )
            gap = abs(analytic.rate_s - mc.rate_s)
            tol = max(base_tol, 4.0 * (mc.stderr or 0.0))
            report.checks.append(
                CheckResult(
                    name=f"closed-form-vs-mc-{mode}-n{n}",
                    statistic=gap,
                    threshold=tol,
                    passed=gap <= tol,
                    detail=(
                        f"analytic {analytic.rate_s:.4f} vs MC {mc.rate_s:.4f} "
                        f"bits ({config.trials} trials, stderr {mc.stderr:.4f})"
                    ),
                    informational=small_n,
                )
            )
    return report


def run_validation_suite(
    scenario: Scenario, n: int, trials: int, seed: int
) -> ValidationReport:
    """The full suite: phase statistics, exponential limit, SNR independence
    (when there are at least two eavesdroppers), and closed form vs MC at the
    given element count.  Each component draws from its own seed offset."""
    report = ValidationReport()
    report.add(validate_phase_statistics(scenario, n, trials, seed))
    report.add(validate_exponential_limit(scenario, n, trials, seed + 1))
    if scenario.k_eves >= 2:
        report.add(validate_snr_independence(scenario, n, trials, seed + 2))
    report.add(
        validate_closed_forms(scenario, [n], McConfig(trials=trials, seed=seed + 3))
    )
    return report
