"""Instantaneous received SNRs at the destination and the eavesdroppers.

Two independent routes are provided for each receiver: a *factored* form in
which the applied phases enter only through quantization errors and composite
phases, and a *direct* form that assembles the received complex amplitude
verbatim (channel coefficients times the per-element phase rotations).  The
two are algebraically identical; keeping both lets tests cross-check every
refactoring against plain complex arithmetic.

All SNRs are linear, end to end.  dB only exists at the CLI boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, PhaseConfig, Scenario, distances

__all__ = [
    "SnrSample",
    "gamma_d",
    "gamma_d_direct",
    "gamma_eves",
    "gamma_eves_direct",
    "snr_sample",
]


@dataclass(frozen=True, eq=False)
class SnrSample:
    """Linear SNRs of one realization: destination plus K eavesdroppers."""

    gamma_d: float
    gamma_e: np.ndarray  # (K,)


def gamma_d(scenario: Scenario, realization: ChannelRealization, phases: PhaseConfig) -> float:
    """Destination SNR in factored form.

    The direct-path amplitude and the cascaded per-element magnitudes combine
    with only the residual quantization errors as phases; the common rotation
    of the direct path drops out of the magnitude.
    """
    d = distances(scenario)
    half = scenario.alpha / 2.0
    cascade = np.abs(realization.g_sr * realization.g_rd) * np.exp(1j * phases.theta_err)
    amp = d.d_sd**-half * abs(realization.g_sd) + scenario.eta * (
        d.d_sr * d.d_rd
    ) ** -half * np.sum(cascade)
    return float(scenario.rho * abs(amp) ** 2)


def gamma_eves(
    scenario: Scenario, realization: ChannelRealization, phases: PhaseConfig
) -> np.ndarray:
    """Eavesdropper SNRs in factored form, one per eavesdropper.

    Unlike the destination, each eavesdropper keeps its own complex direct
    coefficient and sees the composite phases ``psi``, which carry both hop
    phases of the cascaded path.
    """
    d = distances(scenario)
    half = scenario.alpha / 2.0
    d_se = np.asarray(d.d_se)
    d_re = np.asarray(d.d_re)
    mags = np.abs(realization.g_sr)[None, :] * np.abs(realization.g_e)
    ris_part = np.sum(mags * np.exp(1j * phases.psi), axis=1)
    amp = (
        d_se**-half * realization.g_se
        + scenario.eta * (d.d_sr * d_re) ** -half * ris_part
    )
    return scenario.rho * np.abs(amp) ** 2


def snr_sample(
    scenario: Scenario, realization: ChannelRealization, phases: PhaseConfig
) -> SnrSample:
    return SnrSample(
        gamma_d=gamma_d(scenario, realization, phases),
        gamma_e=gamma_eves(scenario, realization, phases),
    )


# ---------------------------------------------------------------------------
# Direct-form oracles
# ---------------------------------------------------------------------------


def gamma_d_direct(
    scenario: Scenario, realization: ChannelRealization, phi: np.ndarray
) -> float:
    """Destination SNR assembled from raw channel coefficients.

    ``rho * |eta * sum_n h_sr[n] e^{j phi[n]} h_rd[n] + h_sd|^2`` with the
    path-loss-scaled coefficients spelled out; no factoring tricks.
    """
    d = distances(scenario)
    half = scenario.alpha / 2.0
    h_sd = realization.g_sd * d.d_sd**-half
    h_sr = realization.g_sr * d.d_sr**-half
    h_rd = realization.g_rd * d.d_rd**-half
    total = scenario.eta * np.sum(h_sr * np.exp(1j * np.asarray(phi)) * h_rd) + h_sd
    return float(scenario.rho * abs(total) ** 2)


def gamma_eves_direct(
    scenario: Scenario, realization: ChannelRealization, phi: np.ndarray
) -> np.ndarray:
    """Eavesdropper SNRs assembled from raw channel coefficients."""
    d = distances(scenario)
    half = scenario.alpha / 2.0
    rot = np.exp(1j * np.asarray(phi))
    h_sr = realization.g_sr * d.d_sr**-half
    out = np.empty(scenario.k_eves)
    for k in range(scenario.k_eves):
        h_k = realization.g_e[k] * d.d_re[k] ** -half
        h_se = realization.g_se[k] * d.d_se[k] ** -half
        total = scenario.eta * np.sum(h_sr * rot * h_k) + h_se
        out[k] = scenario.rho * abs(total) ** 2
    return out
