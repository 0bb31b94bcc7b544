"""Downlink transmission model: directivity gain, LoS/NLoS path loss, SINR, rate.

All configuration values are converted to linear units at construction time;
every computation below is purely linear (no dB anywhere).
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

LOS = "los"
NLOS = "nlos"

REFERENCE_DISTANCE_M = 1.0


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def reference_path_gain(carrier_hz: float) -> float:
    """Free-space power gain at the 1 m reference distance, (c / 4 pi f)^2."""
    return (SPEED_OF_LIGHT / (4.0 * math.pi * carrier_hz)) ** 2


@dataclass(frozen=True)
class RadioParams:
    """Linear-domain radio parameters (defaults mirror the simulation table)."""

    bandwidth_hz: float = 100e6
    tx_power_w: float = dbm_to_watts(20.0)
    side_lobe_gain: float = 0.1
    beamwidth_rad: float = math.pi / 6.0
    alpha_los: float = 2.0
    alpha_nlos: float = 4.0
    kappa_los: float = reference_path_gain(28e9)
    kappa_nlos: float = reference_path_gain(28e9)
    noise_psd_w_hz: float = dbm_to_watts(-174.0)
    carrier_hz: float = 28e9
    los_decay_per_m: float = 1.0 / 141.4
    fading: str = "deterministic"        # "deterministic" | "nakagami"
    nakagami_m_los: float = 3.0
    nakagami_m_nlos: float = 2.0
    sidelobe_interference: bool = True

    def __post_init__(self):
        if self.bandwidth_hz <= 0 or self.tx_power_w <= 0:
            raise ValueError("bandwidth and tx power must be positive")
        if not 0 <= self.side_lobe_gain < 1:
            raise ValueError("side lobe gain must be in [0, 1)")
        if not 0 < self.beamwidth_rad < 2 * math.pi:
            raise ValueError("beamwidth must be in (0, 2*pi)")
        if self.alpha_los <= 0 or self.alpha_nlos < self.alpha_los:
            raise ValueError("need alpha_nlos >= alpha_los > 0")
        if self.los_decay_per_m <= 0:
            raise ValueError("LoS decay must be positive")
        if self.fading not in ("deterministic", "nakagami"):
            raise ValueError(f"unknown fading mode {self.fading!r}")

    @property
    def main_lobe_gain_value(self) -> float:
        return main_lobe_gain(self.beamwidth_rad, self.side_lobe_gain)

    @property
    def noise_power_w(self) -> float:
        return self.noise_psd_w_hz * self.bandwidth_hz

    @classmethod
    def from_dict(cls, cfg: dict) -> "RadioParams":
        """Build from config keys; dB/dBm keys carry an explicit suffix.

        Recognized keys: bandwidth_hz, tx_power_dbm (or tx_power_w),
        side_lobe_gain, beamwidth_rad, alpha_los, alpha_nlos,
        noise_psd_dbm_hz (or noise_psd_w_hz), carrier_hz,
        los_prob_factor_m (the 1/beta length) or los_decay_per_m,
        kappa_los, kappa_nlos, fading, nakagami_m_los, nakagami_m_nlos,
        sidelobe_interference.
        """
        cfg = dict(cfg)
        kw = {}
        if "tx_power_dbm" in cfg:
            kw["tx_power_w"] = dbm_to_watts(float(cfg.pop("tx_power_dbm")))
        if "noise_psd_dbm_hz" in cfg:
            kw["noise_psd_w_hz"] = dbm_to_watts(float(cfg.pop("noise_psd_dbm_hz")))
        if "los_prob_factor_m" in cfg:
            kw["los_decay_per_m"] = 1.0 / float(cfg.pop("los_prob_factor_m"))
        carrier = float(cfg.get("carrier_hz", cls.carrier_hz))
        kw.setdefault("kappa_los", float(cfg.pop("kappa_los", reference_path_gain(carrier))))
        kw.setdefault("kappa_nlos", float(cfg.pop("kappa_nlos", reference_path_gain(carrier))))
        for k in ("bandwidth_hz", "tx_power_w", "side_lobe_gain", "beamwidth_rad",
                  "alpha_los", "alpha_nlos", "noise_psd_w_hz", "carrier_hz",
                  "los_decay_per_m", "nakagami_m_los", "nakagami_m_nlos"):
            if k in cfg:
                kw[k] = float(cfg.pop(k))
        if "fading" in cfg:
            kw["fading"] = str(cfg.pop("fading"))
        if "sidelobe_interference" in cfg:
            kw["sidelobe_interference"] = bool(cfg.pop("sidelobe_interference"))
        if cfg:
            raise ValueError(f"unknown radio config keys: {sorted(cfg)}")
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "RadioParams":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def with_fading(self, mode: str) -> "RadioParams":
        return replace(self, fading=mode)


@dataclass(frozen=True)
class LinkSample:
    """One realized link: propagation state, fading power and distance."""

    state: str
    fading_power: float
    distance: float

    def __post_init__(self):
        if self.state not in (LOS, NLOS):
            raise ValueError(f"bad link state {self.state!r}")
        if self.fading_power <= 0 or self.distance <= 0:
            raise ValueError("fading power and distance must be positive")


def main_lobe_gain(beamwidth: float, side_lobe_gain: float) -> float:
    """Directivity gain of the main lobe, (2*pi - (2*pi - theta)*G_s) / theta."""
    if not 0 < beamwidth <= 2 * math.pi:
        raise ValueError("beamwidth must be in (0, 2*pi]")
    if not 0 <= side_lobe_gain < 1:
        raise ValueError("side lobe gain must be in [0, 1)")
    return (2 * math.pi - (2 * math.pi - beamwidth) * side_lobe_gain) / beamwidth


def los_probability(distance: float, decay_per_m: float) -> float:
    """P(link is LoS) = exp(-beta * D)."""
    if distance < 0:
        raise ValueError("distance must be nonnegative")
    return math.exp(-decay_per_m * distance)


def path_loss(distance: float, state: str, params: RadioParams) -> float:
    """Linear path gain kappa_s * D^(-alpha_s); distances under 1 m are clamped."""
    if distance < REFERENCE_DISTANCE_M:
        warnings.warn(
            f"distance {distance:.3g} m below the {REFERENCE_DISTANCE_M} m "
            f"reference; clamping", RuntimeWarning, stacklevel=2)
        distance = REFERENCE_DISTANCE_M
    if state == LOS:
        return params.kappa_los * distance ** (-params.alpha_los)
    if state == NLOS:
        return params.kappa_nlos * distance ** (-params.alpha_nlos)
    raise ValueError(f"bad link state {state!r}")


def sample_link(distance: float, params: RadioParams,
                rng: np.random.Generator) -> LinkSample:
    """Draw the LoS/NLoS state and a unit-mean fading power for one link."""
    if distance <= 0:
        raise ValueError("distance must be positive")
    is_los = rng.random() < los_probability(distance, params.los_decay_per_m)
    state = LOS if is_los else NLOS
    if params.fading == "deterministic":
        power = 1.0
    else:
        m = params.nakagami_m_los if is_los else params.nakagami_m_nlos
        power = float(rng.gamma(shape=m, scale=1.0 / m))
        power = max(power, 1e-12)
    return LinkSample(state=state, fading_power=power, distance=distance)


def received_power(link: LinkSample, gain: float, params: RadioParams) -> float:
    return params.tx_power_w * gain * link.fading_power * path_loss(
        link.distance, link.state, params)


def sinr(serving_distance: float, serving_link: LinkSample,
         interferers: list[tuple[float, LinkSample, float]],
         params: RadioParams) -> float:
    """SINR at a robot: main-lobe serving beam, omnidirectional reception.

    ``interferers`` holds (distance, link sample, tx gain) per interfering BS.
    """
    g_m = params.main_lobe_gain_value
    signal = (params.tx_power_w * g_m * serving_link.fading_power *
              path_loss(serving_distance, serving_link.state, params))
    interference = 0.0
    for dist, link, gain in interferers:
        interference += (params.tx_power_w * gain * link.fading_power *
                         path_loss(dist, link.state, params))
    return signal / (interference + params.noise_power_w)


def rate(sinr_value: float, bandwidth_hz: float) -> float:
    """Achievable rate W * log2(1 + SINR) in bits/s."""
    if sinr_value < 0:
        raise ValueError("SINR must be nonnegative")
    return bandwidth_hz * math.log2(1.0 + sinr_value)
