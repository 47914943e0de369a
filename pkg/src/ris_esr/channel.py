"""Scenario geometry, Rayleigh fading draws, and the discrete phase pipeline.

A :class:`Scenario` is the single source of truth for node positions and
radio constants.  Everything downstream of it is linear-scale; dBm values are
converted once, here.  Small-scale fading is sampled from seeded, hierarchical
random streams so that any trial of any run can be reproduced bit-for-bit
regardless of execution order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

__all__ = [
    "ChannelRealization",
    "DistanceSet",
    "PhaseConfig",
    "Scenario",
    "derive_phases",
    "distances",
    "eavesdropper_phases",
    "load_scenario",
    "optimal_phases",
    "quantize_phase",
    "reference_scenario",
    "sample_channels",
    "scenario_from_dict",
    "scenario_to_dict",
    "spread_eve_positions",
    "trial_rng",
]

TWO_PI = 2.0 * math.pi

# Reference geometry used throughout the README, the validation suite and the
# acceptance tests: source at the origin, reflecting surface 100 m away on the
# x-axis, destination above it, eavesdroppers strung along the line y = -20.
_REF_SOURCE = (0.0, 0.0)
_REF_RIS = (100.0, 0.0)
_REF_DEST = (90.0, 20.0)
_REF_EVE_X_MAX = 90.0
_REF_EVE_Y = -20.0


def spread_eve_positions(count: int, x_max: float = _REF_EVE_X_MAX, y: float = _REF_EVE_Y):
    """Evenly spread ``count`` eavesdroppers along ``y`` up to ``x_max``.

    Eavesdropper ``k`` (1-based) sits at ``(x_max * k / count, y)``, so the
    population stretches from near the source out to ``x_max``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    return tuple((x_max * k / count, y) for k in range(1, count + 1))


@dataclass(frozen=True)
class Scenario:
    """Geometry plus radio parameters for one wiretap setup.

    Positions are 2-D metre coordinates.  ``alpha`` is the path-loss
    exponent, ``b`` the phase quantization bit count, ``eta`` the amplitude
    reflection coefficient, ``n_elements`` the number of reflecting elements.
    Powers are in dBm at this boundary only; the derived ``rho`` property is
    the linear transmit SNR used everywhere downstream.
    """

    source_pos: tuple[float, float]
    ris_pos: tuple[float, float]
    dest_pos: tuple[float, float]
    eve_positions: tuple[tuple[float, float], ...]
    alpha: float = 3.0
    b: int = 3
    eta: float = 0.8
    p_dbm: float = 20.0
    noise_dbm: float = -96.0
    n_elements: int = 1

    def __post_init__(self):
        object.__setattr__(self, "source_pos", tuple(float(v) for v in self.source_pos))
        object.__setattr__(self, "ris_pos", tuple(float(v) for v in self.ris_pos))
        object.__setattr__(self, "dest_pos", tuple(float(v) for v in self.dest_pos))
        object.__setattr__(
            self, "eve_positions", tuple(tuple(float(v) for v in p) for p in self.eve_positions)
        )
        if len(self.eve_positions) < 1:
            raise ValueError("at least one eavesdropper position is required")
        if self.n_elements < 1:
            raise ValueError("n_elements must be >= 1")
        if self.b < 1:
            raise ValueError("b must be >= 1")
        # eta == 0 is allowed as the surface-absent limit
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        for pos in (self.source_pos, self.ris_pos, self.dest_pos, *self.eve_positions):
            if len(pos) != 2 or not all(math.isfinite(v) for v in pos):
                raise ValueError(f"positions must be finite 2-D points, got {pos!r}")
        distances(self)  # raises if any node pair is co-located

    @property
    def k_eves(self) -> int:
        return len(self.eve_positions)

    @property
    def rho(self) -> float:
        """Linear transmit SNR, ``10^((P_dBm - noise_dBm)/10)``."""
        return 10.0 ** ((self.p_dbm - self.noise_dbm) / 10.0)

    def with_n_elements(self, n: int) -> "Scenario":
        return replace(self, n_elements=int(n))

    def with_eve_count(self, count: int) -> "Scenario":
        """Replace the eavesdroppers with the evenly-spread placement rule."""
        return replace(self, eve_positions=spread_eve_positions(count))


def reference_scenario(n_elements: int = 1, k_eves: int = 5) -> Scenario:
    """The benchmark geometry with ``k_eves`` auto-placed eavesdroppers."""
    return Scenario(
        source_pos=_REF_SOURCE,
        ris_pos=_REF_RIS,
        dest_pos=_REF_DEST,
        eve_positions=spread_eve_positions(k_eves),
        n_elements=n_elements,
    )


@dataclass(frozen=True)
class DistanceSet:
    """Euclidean distances between the named node pairs, all in metres."""

    d_sd: float
    d_sr: float
    d_rd: float
    d_se: tuple[float, ...]  # source -> eavesdropper k
    d_re: tuple[float, ...]  # surface -> eavesdropper k


def _dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@lru_cache(maxsize=256)
def distances(scenario: Scenario) -> DistanceSet:
    """All pairwise distances the model needs; errors on co-located nodes."""
    d = DistanceSet(
        d_sd=_dist(scenario.source_pos, scenario.dest_pos),
        d_sr=_dist(scenario.source_pos, scenario.ris_pos),
        d_rd=_dist(scenario.ris_pos, scenario.dest_pos),
        d_se=tuple(_dist(scenario.source_pos, e) for e in scenario.eve_positions),
        d_re=tuple(_dist(scenario.ris_pos, e) for e in scenario.eve_positions),
    )
    if min(d.d_sd, d.d_sr, d.d_rd, *d.d_se, *d.d_re) <= 0.0:
        raise ValueError("co-located nodes: every pairwise distance must be positive")
    return d


# ---------------------------------------------------------------------------
# Fading
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One draw of every small-scale fading coefficient.

    All entries are circularly symmetric complex Gaussian with unit variance.
    ``g_e[k, n]`` is the surface-element-n to eavesdropper-k coefficient.
    """

    g_sd: complex
    g_se: np.ndarray  # (K,)
    g_sr: np.ndarray  # (N,)
    g_rd: np.ndarray  # (N,)
    g_e: np.ndarray  # (K, N)


def trial_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for trial ``index`` of the stream ``seed``.

    Streams are derived hierarchically from ``(seed, index)``, so results do
    not depend on how trials are scheduled across workers.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def sample_channels(scenario: Scenario, rng: np.random.Generator) -> ChannelRealization:
    """Draw one independent CN(0,1) realization of every coefficient.

    The draw order is fixed, so a given generator state always yields the
    same realization.
    """
    n = scenario.n_elements
    k = scenario.k_eves
    total = 1 + k + 2 * n + k * n
    z = rng.standard_normal((total, 2)) @ np.array([math.sqrt(0.5), math.sqrt(0.5) * 1j])
    return ChannelRealization(
        g_sd=complex(z[0]),
        g_se=z[1 : 1 + k],
        g_sr=z[1 + k : 1 + k + n],
        g_rd=z[1 + k + n : 1 + k + 2 * n],
        g_e=z[1 + k + 2 * n :].reshape(k, n),
    )


# ---------------------------------------------------------------------------
# Phase pipeline
# ---------------------------------------------------------------------------


def optimal_phases(realization: ChannelRealization) -> np.ndarray:
    """Per-element phases that co-phase every reflected path with the direct one.

    Element ``n`` gets ``angle(g_sd) - angle(g_sr[n]) - angle(g_rd[n])``,
    wrapped to ``[0, 2*pi)``.
    """
    phi = np.angle(realization.g_sd) - np.angle(realization.g_sr) - np.angle(realization.g_rd)
    return np.mod(phi, TWO_PI)


def _codebook_index(x: np.ndarray, b: int) -> np.ndarray:
    """Index of the circularly nearest ``2^b``-point codebook entry.

    ``ceil(x/delta - 1/2)`` is round-to-nearest with exact midpoints going to
    the lower entry; the mod folds wrap-around onto index 0.
    """
    levels = 1 << int(b)
    delta = TWO_PI / levels
    return np.mod(np.ceil(x / delta - 0.5), levels)


def quantize_phase(phi_star, b: int):
    """Round phases to the nearest ``2^b``-point codebook entry on the circle.

    Returns ``(phi, theta_err)`` where ``phi`` lies on the codebook
    ``{0, 2pi/2^b, ..., (2^b-1) 2pi/2^b}`` and ``theta_err`` is the wrapped
    error ``phi - phi_star`` in ``[-pi/2^b, pi/2^b]``.  Nearest is meant in
    circular (mod 2*pi) distance; an exact midpoint resolves to the lower
    codebook phase so the map is deterministic.  Accepts scalars or arrays.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    scalar = np.isscalar(phi_star) or np.ndim(phi_star) == 0
    x = np.asarray(phi_star, dtype=float)
    phi = _codebook_index(x, b) * (TWO_PI / (1 << int(b)))
    err = phi - x
    err = err - TWO_PI * np.round(err / TWO_PI)
    if scalar:
        return float(phi), float(err)
    return phi, err


def eavesdropper_phases(realization: ChannelRealization, phi: np.ndarray) -> np.ndarray:
    """Composite phases seen by each eavesdropper, given applied phases ``phi``.

    Entry ``(k, n)`` is ``phi[n] + angle(g_sr[n]) + angle(g_e[k, n])`` wrapped
    to ``[0, 2*pi)``: the applied element phase plus both hop phases of the
    cascaded path toward eavesdropper ``k``.
    """
    base = np.asarray(phi, dtype=float) + np.angle(realization.g_sr)
    return np.mod(base[None, :] + np.angle(realization.g_e), TWO_PI)


@dataclass(frozen=True, eq=False)
class PhaseConfig:
    """Full phase pipeline for one realization.

    ``phi = phi_star + theta_err (mod 2*pi)`` elementwise, ``theta_err`` in
    ``[-pi/2^b, pi/2^b]``, ``psi[k, n]`` in ``[0, 2*pi)``.
    """

    phi_star: np.ndarray  # (N,) optimal continuous phases
    phi: np.ndarray  # (N,) quantized phases on the codebook
    theta_err: np.ndarray  # (N,) quantization errors
    psi: np.ndarray  # (K, N) composite eavesdropper phases


def derive_phases(scenario: Scenario, realization: ChannelRealization) -> PhaseConfig:
    """Run the whole pipeline: optimal phase, quantizer, composite phases."""
    phi_star = optimal_phases(realization)
    phi, theta_err = quantize_phase(phi_star, scenario.b)
    psi = eavesdropper_phases(realization, phi)
    return PhaseConfig(phi_star=phi_star, phi=phi, theta_err=theta_err, psi=psi)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "source": list(scenario.source_pos),
        "ris": list(scenario.ris_pos),
        "dest": list(scenario.dest_pos),
        "eves": [list(p) for p in scenario.eve_positions],
        "alpha": scenario.alpha,
        "b": scenario.b,
        "eta": scenario.eta,
        "p_dbm": scenario.p_dbm,
        "noise_dbm": scenario.noise_dbm,
        "n_elements": scenario.n_elements,
    }


def scenario_from_dict(data: dict) -> Scenario:
    """Build a scenario from its JSON document form.

    ``eves`` may be replaced (or supplemented) by ``eves_auto: {"count": K}``,
    which expands to the evenly-spread placement rule; explicit positions take
    precedence when both are present.
    """
    if not isinstance(data, dict):
        raise ValueError("scenario document must be a JSON object")
    eves = data.get("eves")
    if not eves:
        auto = data.get("eves_auto")
        if not auto or "count" not in auto:
            raise ValueError("scenario needs either 'eves' or 'eves_auto: {count}'")
        eves = spread_eve_positions(
            int(auto["count"]),
            x_max=float(auto.get("x_max", _REF_EVE_X_MAX)),
            y=float(auto.get("y", _REF_EVE_Y)),
        )
    try:
        return Scenario(
            source_pos=tuple(data["source"]),
            ris_pos=tuple(data["ris"]),
            dest_pos=tuple(data["dest"]),
            eve_positions=tuple(tuple(p) for p in eves),
            alpha=float(data.get("alpha", 3.0)),
            b=int(data.get("b", 3)),
            eta=float(data.get("eta", 0.8)),
            p_dbm=float(data.get("p_dbm", 20.0)),
            noise_dbm=float(data.get("noise_dbm", -96.0)),
            n_elements=int(data.get("n_elements", 1)),
        )
    except KeyError as exc:
        raise ValueError(f"scenario document is missing key {exc}") from exc


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario JSON file; raises ValueError on malformed content."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read scenario file '{path}': {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"scenario file '{path}' is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(scenario), indent=2) + "\n", encoding="utf-8"
    )
