"""Synthetic through-rubble sensing: UWB micro-Doppler and FMCW micromotion.

Every sample function takes an explicit ``numpy.random.Generator`` and always
consumes the same number of draws, so parallel lanes with their own seeds are
reproducible regardless of noise settings.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .scene import EMPTY_COLUMN, Material, overburden

SPEED_OF_LIGHT = 3.0e8

# one-way amplitude attenuation per metre at 10 GHz
ATTENUATION_10GHZ = {
    Material.AIR: 0.0,
    Material.WOOD: 1.4,
    Material.BRICK: 14.0,
    Material.CONCRETE: 16.0,
}
# alpha ~ f**ATTENUATION_FREQ_EXPONENT, chosen so 24 GHz is 1.3x the 10 GHz value
ATTENUATION_FREQ_EXPONENT = math.log(1.3) / math.log(2.4)

FEATURE_NAMES = ("doppler", "uwb", "fmcw", "altitude")

# Doppler-equivalent platform jitter (Hz) while hovering
HOVER_JITTER_SIGMA = 0.2


class Stability(enum.Enum):
    STABLE = "Stable"
    HOVERING = "Hovering"


class ScenarioTag(enum.Enum):
    STABLE_WOOD = "StableWood"
    STABLE_WOOD_BRICKS = "StableWoodBricks"
    HOVER_WOOD_BRICKS = "HoverWoodBricks"


@dataclass(frozen=True)
class UwbConfig:
    carrier_frequency: float = 10e9
    doppler_threshold: float = 0.3
    noise_sigma: float = 0.1
    range_exponent: float = 2.0
    reference_altitude: float = 2.0

    def __post_init__(self):
        if not self.carrier_frequency > 0:
            raise ValueError("carrier_frequency must be > 0")
        if not self.doppler_threshold > 0:
            raise ValueError("doppler_threshold must be > 0")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class FmcwConfig:
    carrier_frequency: float = 24e9
    gain: float = 60.0
    noise_sigma: float = 0.05
    hover_penalty: float = 20.0
    heartbeat_weight: float = 0.2
    range_exponent: float = 2.0
    reference_altitude: float = 2.0

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError("gain must be > 0")
        if self.hover_penalty < 1:
            raise ValueError("hover_penalty must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class PlatformState:
    altitude: float
    stability: Stability = Stability.STABLE
    jitter_sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "stability", Stability(self.stability))
        if not self.altitude > 0:
            raise ValueError("altitude must be > 0")
        hovering = self.stability is Stability.HOVERING
        if hovering != (self.jitter_sigma > 0):
            raise ValueError("jitter_sigma must be > 0 exactly when hovering")

    @classmethod
    def stable(cls, altitude):
        return cls(altitude, Stability.STABLE, 0.0)

    @classmethod
    def hovering(cls, altitude, jitter_sigma=HOVER_JITTER_SIGMA):
        return cls(altitude, Stability.HOVERING, jitter_sigma)


@dataclass(frozen=True)
class FeatureVector:
    doppler: float
    uwb_detect: int
    fmcw: float
    altitude: float
    label: int
    scenario_tag: ScenarioTag | None = None

    def as_array(self):
        return np.array([self.doppler, self.uwb_detect, self.fmcw, self.altitude], dtype=float)


def attenuation(material, carrier):
    return ATTENUATION_10GHZ[Material(material)] * (carrier / 10e9) ** ATTENUATION_FREQ_EXPONENT


def penetration_factor(column, carrier):
    """Fraction of signal surviving the column: exp(-sum(alpha * thickness))."""
    return math.exp(-sum(attenuation(m, carrier) * t for m, t in column.layers))


def _range_scale(altitude, reference, exponent):
    return (reference / altitude) ** exponent


def chest_velocity(victim):
    return 2.0 * math.pi * victim.respiration_rate * victim.chest_amplitude


def doppler_signal(victim, platform, cfg, column):
    if victim is None:
        return 0.0
    shift = 2.0 * chest_velocity(victim) * cfg.carrier_frequency / SPEED_OF_LIGHT
    return (shift * penetration_factor(column, cfg.carrier_frequency)
            * _range_scale(platform.altitude, cfg.reference_altitude, cfg.range_exponent))


def micro_doppler(victim, platform, cfg, column, rng):
    """Doppler shift (Hz) seen by the UWB radar, with sensor and platform noise."""
    z_sensor, z_jitter = rng.standard_normal(2)
    noise = cfg.noise_sigma * z_sensor + platform.jitter_sigma * z_jitter
    return doppler_signal(victim, platform, cfg, column) + float(noise)


def uwb_detect(doppler, cfg):
    return int(abs(doppler) >= cfg.doppler_threshold)


def fmcw_signal(victim, platform, cfg, column):
    if victim is None:
        return 0.0
    # respiration plus a weaker heartbeat component at 20% of the chest excursion
    v = 2.0 * math.pi * victim.chest_amplitude * (
        victim.respiration_rate + cfg.heartbeat_weight * victim.heartbeat_rate)
    return (cfg.gain * v * penetration_factor(column, cfg.carrier_frequency)
            * _range_scale(platform.altitude, cfg.reference_altitude, cfg.range_exponent))


def fmcw_sigma(platform, cfg):
    if platform.stability is Stability.HOVERING:
        return cfg.noise_sigma * cfg.hover_penalty
    return cfg.noise_sigma


def fmcw_reading(victim, platform, cfg, column, rng):
    z = rng.standard_normal()
    return fmcw_signal(victim, platform, cfg, column) + float(fmcw_sigma(platform, cfg) * z)


def measure(victim, column, platform, uwb_cfg, fmcw_cfg, rng, tag=None):
    """One four-feature reading over `column`; label is 1 iff `victim` is given."""
    if victim is not None and not victim.buried:
        column = EMPTY_COLUMN
    doppler = micro_doppler(victim, platform, uwb_cfg, column, rng)
    fmcw = fmcw_reading(victim, platform, fmcw_cfg, column, rng)
    return FeatureVector(doppler, uwb_detect(doppler, uwb_cfg), fmcw, float(platform.altitude),
                         int(victim is not None), tag)


def sample_features(scenario, cell, platform, uwb_cfg, fmcw_cfg, rng, tag=None):
    column = overburden(scenario, cell)
    return measure(scenario.victim_at(cell), column, platform, uwb_cfg, fmcw_cfg, rng, tag)
