"""Closed-form and asymptotic ergodic secrecy rates.

The destination rate uses the large-N moment expansion of the co-phased
channel; eavesdropper rates use the exponential limit of their SNRs (single
eavesdropper / best-of-K) or the hypoexponential density of their SNR sum
(colluding).  The signed hypoexponential mixture is numerically vicious when
many means are clustered: partial-fraction weights grow like 1e15 while the
result stays order one, so the colluding rate is evaluated in adaptive
extended precision rather than in doubles.

All rates are bits/s/Hz (base-2 logs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .channel import Scenario, distances
from .numerics import EULER_GAMMA, scaled_neg_ei

__all__ = [
    "AnalyticConstants",
    "EsrResult",
    "baseline_no_ris",
    "constants",
    "esr_asymptotic",
    "esr_colluding",
    "esr_largek_colluding",
    "esr_noncolluding",
    "hypoexp_cdf",
    "hypoexp_pdf",
    "rate_d",
    "rate_e_colluding",
    "rate_e_noncolluding",
]

LN2 = math.log(2.0)

# Means closer than this (relative to the largest) are treated as degenerate
# and jittered apart; the colluding closed form requires pairwise-distinct
# means, and the exact rate is continuous in them.
DEGENERACY_RTOL = 1e-9
JITTER_SPACING = 1e-6

MODE_NONCOLLUDING = "non-colluding"
MODE_COLLUDING = "colluding"
_MODES = (MODE_NONCOLLUDING, MODE_COLLUDING)


@dataclass(frozen=True)
class EsrResult:
    """Secrecy-rate triple with provenance.

    ``rate_s`` is clamped at zero.  ``stderr`` is populated by Monte Carlo
    estimates only.  ``degenerate_lambdas`` flags that near-equal eavesdropper
    means were jittered apart before evaluating the colluding closed form.
    """

    rate_d: float
    rate_e: float
    rate_s: float
    mode: str
    method: str
    stderr: float | None = None
    degenerate_lambdas: bool = False

    def __post_init__(self):
        for name in ("rate_d", "rate_e", "rate_s"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.rate_s < 0.0:
            raise ValueError("rate_s must be non-negative")
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class AnalyticConstants:
    """Path-loss/quantization composites entering the closed forms.

    ``a1`` is the per-element incoherent cascade gain, ``a2`` the
    direct-times-cascade cross gain, ``a3`` the pairwise coherent gain (the
    beamforming term), all toward the destination.  ``b_k`` is the
    per-element cascade gain toward eavesdropper ``k`` and ``lambda_e[k]``
    that eavesdropper's mean SNR at the given element count.
    """

    a1: float
    a2: float
    a3: float
    b_k: tuple[float, ...]
    lambda_e: tuple[float, ...]
    rho: float


def constants(scenario: Scenario, n: int) -> AnalyticConstants:
    """Evaluate the closed-form constants for ``n`` reflecting elements."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = distances(scenario)
    alpha = scenario.alpha
    eta = scenario.eta
    levels = float(1 << scenario.b)
    cascade = d.d_sr**-alpha * d.d_rd**-alpha
    a1 = eta**2 * cascade
    a2 = (
        (math.sqrt(math.pi) * eta * levels / 4.0)
        * (d.d_sd * d.d_sr * d.d_rd) ** (-alpha / 2.0)
        * math.sin(math.pi / levels)
    )
    a3 = (eta**2 * levels**2 / 32.0) * cascade * (1.0 - math.cos(2.0 * math.pi / levels))
    b_k = tuple(eta**2 * d.d_sr**-alpha * dk**-alpha for dk in d.d_re)
    rho = scenario.rho
    lambda_e = tuple(
        rho * (dse**-alpha + n * bk) for dse, bk in zip(d.d_se, b_k)
    )
    return AnalyticConstants(a1=a1, a2=a2, a3=a3, b_k=b_k, lambda_e=lambda_e, rho=rho)


def rate_d(scenario: Scenario, n: int) -> float:
    """Destination ergodic rate from the mean-SNR closed form.

    ``log2(1 + rho*(n*a1 + d_sd^-alpha + n*a2 + n(n-1)*a3))``; the argument
    is the exact mean of the destination SNR, so this is the usual
    log-of-mean approximation, tight once the coherent term dominates.
    """
    c = constants(scenario, n)
    d_sd = distances(scenario).d_sd
    mean_snr = c.rho * (
        n * c.a1 + d_sd**-scenario.alpha + n * c.a2 + n * (n - 1) * c.a3
    )
    return math.log2(1.0 + mean_snr)


def _exp_rate_bits(lam: float) -> float:
    """Ergodic rate in bits of an exponential SNR with mean ``lam``."""
    return scaled_neg_ei(1.0 / lam) / LN2


def rate_e_noncolluding(consts: AnalyticConstants) -> float:
    """Best single eavesdropper's ergodic rate (each decodes on its own)."""
    if any(lam <= 0.0 for lam in consts.lambda_e):
        raise ValueError("eavesdropper mean SNRs must be positive")
    return max(_exp_rate_bits(lam) for lam in consts.lambda_e)


def esr_noncolluding(scenario: Scenario, n: int) -> EsrResult:
    rd = rate_d(scenario, n)
    re = rate_e_noncolluding(constants(scenario, n))
    return EsrResult(
        rate_d=rd,
        rate_e=re,
        rate_s=max(0.0, rd - re),
        mode=MODE_NONCOLLUDING,
        method="analytic",
    )


# ---------------------------------------------------------------------------
# Hypoexponential machinery (sum of independent exponentials, distinct means)
# ---------------------------------------------------------------------------


def _resolve_degenerate(lams) -> tuple[np.ndarray, bool]:
    """Jitter near-equal means apart deterministically.

    Means within ``DEGENERACY_RTOL * max`` of each other are respaced by
    relative steps of ``JITTER_SPACING``.  Returns the (possibly adjusted)
    means and whether anything was changed.
    """
    lam = np.asarray(lams, dtype=float).copy()
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("means must be a non-empty 1-D sequence")
    if np.any(lam <= 0.0) or not np.all(np.isfinite(lam)):
        raise ValueError("means must be positive and finite")
    if lam.size == 1:
        return lam, False
    tol = DEGENERACY_RTOL * float(lam.max())
    order = np.argsort(lam, kind="stable")
    sorted_lam = lam[order]
    adjusted = False
    cluster_start = 0
    for i in range(1, lam.size + 1):
        end_of_cluster = i == lam.size or sorted_lam[i] - sorted_lam[i - 1] >= tol
        if end_of_cluster:
            m = i - cluster_start
            if m > 1:
                center = sorted_lam[cluster_start:i].mean()
                offsets = (np.arange(m) - (m - 1) / 2.0) * JITTER_SPACING
                sorted_lam[cluster_start:i] = center * (1.0 + offsets)
                adjusted = True
            cluster_start = i
    if adjusted:
        lam[order] = sorted_lam
    return lam, adjusted


def _signed_weights(lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Partial-fraction weights ``prod_{j!=i} lam_i/(lam_i - lam_j)``.

    Returned in sign/log-magnitude form so they never overflow; with many
    clustered means the magnitudes reach 1e15 and beyond.
    """
    diff = lam[:, None] - lam[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0.0):
        raise ValueError("means must be pairwise distinct")
    signs = np.prod(np.sign(diff), axis=1)
    logw = (lam.size - 1) * np.log(lam) - np.sum(np.log(np.abs(diff)), axis=1)
    return signs, logw


def hypoexp_pdf(lambda_e, x):
    """Density of a sum of independent exponentials with distinct means.

    ``f(x) = sum_i (1/lam_i) e^{-x/lam_i} prod_{j != i} lam_i/(lam_i-lam_j)``
    for ``x >= 0`` (zero for ``x < 0``).  Near-equal means are first jittered
    apart by the same deterministic policy used for the colluding rate.
    Accepts scalar or array ``x``.
    """
    lam, _ = _resolve_degenerate(lambda_e)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    signs, logw = _signed_weights(lam)
    # terms_i(x) = sign_i * exp(logw_i - x/lam_i) / lam_i
    expo = logw[:, None] - xv[None, :] / lam[:, None] - np.log(lam)[:, None]
    vals = np.sum(signs[:, None] * np.exp(expo), axis=0)
    vals = np.where(xv < 0.0, 0.0, np.maximum(vals, 0.0))
    return float(vals[0]) if scalar else vals


def hypoexp_cdf(lambda_e, x):
    """CDF matching :func:`hypoexp_pdf`: ``sum_i w_i (1 - e^{-x/lam_i})``."""
    lam, _ = _resolve_degenerate(lambda_e)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    signs, logw = _signed_weights(lam)
    w = signs * np.exp(logw)
    vals = np.sum(w[:, None] * (1.0 - np.exp(-xv[None, :] / lam[:, None])), axis=0)
    vals = np.where(xv <= 0.0, 0.0, np.clip(vals, 0.0, 1.0))
    return float(vals[0]) if scalar else vals


def _mixture_sum_mp(lam: np.ndarray, term_fn) -> float:
    """``sum_i term_fn(lam_i) * prod_{j != i} lam_i/(lam_i - lam_j)`` in mpmath.

    The signed sum cancels almost completely when means cluster (weights of
    magnitude 1e15 summing to order one), so the working precision is chosen
    from the worst weight magnitude plus a fixed number of guard digits.
    ``term_fn`` receives an ``mpf`` and must return an ``mpf``.
    """
    _, logw = _signed_weights(lam)
    excess = max(0.0, float(np.max(logw)) / math.log(10.0))
    dps = max(30, int(excess) + 25)
    with mp.workdps(dps):
        lams = [mp.mpf(float(v)) for v in lam]
        total = mp.mpf(0)
        for i, li in enumerate(lams):
            w = mp.mpf(1)
            for j, lj in enumerate(lams):
                if j != i:
                    w *= li / (li - lj)
            total += w * term_fn(li)
        return float(total)


def rate_e_colluding(consts: AnalyticConstants) -> tuple[float, bool]:
    """Colluding eavesdroppers' ergodic rate and the degeneracy flag.

    The sum of the (asymptotically independent, exponential) eavesdropper
    SNRs is hypoexponential; its ergodic rate is the partial-fraction
    weighted sum of single-exponential rates.
    """
    lam, adjusted = _resolve_degenerate(consts.lambda_e)
    if lam.size == 1:
        return _exp_rate_bits(float(lam[0])), adjusted

    ln2 = mp.log(2)

    def term(li):
        return mp.exp(1 / li) * mp.e1(1 / li) / ln2

    return _mixture_sum_mp(lam, term), adjusted


def esr_colluding(scenario: Scenario, n: int) -> EsrResult:
    rd = rate_d(scenario, n)
    re, adjusted = rate_e_colluding(constants(scenario, n))
    return EsrResult(
        rate_d=rd,
        rate_e=re,
        rate_s=max(0.0, rd - re),
        mode=MODE_COLLUDING,
        method="analytic",
        degenerate_lambdas=adjusted,
    )


# ---------------------------------------------------------------------------
# Asymptotics
# ---------------------------------------------------------------------------


def esr_asymptotic(scenario: Scenario, n: int, mode: str) -> EsrResult:
    """Large-N secrecy rate: ``log2 n`` plus a geometry constant.

    The destination rate tends to ``2 log2 n + log2 rho + log2 a3`` and the
    eavesdropper rate to ``log2 n + log2 rho - gamma/ln 2`` plus
    ``max_k log2 b_k`` (non-colluding) or the partial-fraction-weighted
    ``sum_i log2 b_i`` (colluding), leaving a secrecy rate that climbs one
    bit per doubling of ``n``.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    c = constants(scenario, n)
    log2n = math.log2(n)
    log2rho = math.log2(c.rho)
    rd = 2.0 * log2n + log2rho + math.log2(c.a3)
    if mode == MODE_NONCOLLUDING:
        eve_term = max(math.log2(b) for b in c.b_k)
        adjusted = False
    else:
        b_arr, adjusted = _resolve_degenerate(c.b_k)
        if b_arr.size == 1:
            eve_term = math.log2(float(b_arr[0]))
        else:
            ln2 = mp.log(2)
            eve_term = _mixture_sum_mp(b_arr, lambda bi: mp.log(bi) / ln2)
    re = log2n + log2rho - EULER_GAMMA / LN2 + eve_term
    return EsrResult(
        rate_d=rd,
        rate_e=re,
        rate_s=max(0.0, rd - re),
        mode=mode,
        method="asymptotic",
        degenerate_lambdas=adjusted,
    )


def esr_largek_colluding(scenario: Scenario, n: int) -> EsrResult:
    """Many-eavesdropper simplification of the colluding rate.

    With many independent contributors the SNR sum concentrates, so the
    eavesdropper rate collapses to ``log2(1 + sum_k lambda_k)``.
    """
    c = constants(scenario, n)
    rd = rate_d(scenario, n)
    re = math.log2(1.0 + sum(c.lambda_e))
    return EsrResult(
        rate_d=rd,
        rate_e=re,
        rate_s=max(0.0, rd - re),
        mode=MODE_COLLUDING,
        method="large-K",
    )


# ---------------------------------------------------------------------------
# No-surface baseline
# ---------------------------------------------------------------------------


def direct_link_rate(distance: float, scenario: Scenario) -> float:
    """Ergodic rate of a bare Rayleigh link over ``distance`` metres.

    The SNR is exponential with mean ``rho * distance^-alpha``, so the rate
    is the scaled exponential integral at the inverse mean; strictly
    decreasing in distance.
    """
    if distance <= 0.0:
        raise ValueError("distance must be positive")
    return scaled_neg_ei(distance**scenario.alpha / scenario.rho) / LN2


def baseline_no_ris(scenario: Scenario) -> EsrResult:
    """Secrecy rate with the reflecting surface absent entirely.

    Only direct links remain: the destination rate less the best single
    eavesdropper's rate, clamped at zero.
    """
    d = distances(scenario)
    rd = direct_link_rate(d.d_sd, scenario)
    re = max(direct_link_rate(dse, scenario) for dse in d.d_se)
    return EsrResult(
        rate_d=rd,
        rate_e=re,
        rate_s=max(0.0, rd - re),
        mode=MODE_NONCOLLUDING,
        method="baseline",
    )
