"""Downlink channel model: path loss, shadowing, fading, SINR, reported level.

The chain is classic WCDMA downlink budgeting. Median path loss follows the
COST-231 extension of the Hata model (urban, 2 GHz class frequencies, where
the classic formula is out of its validity range). On top of that every site
gets an independent lognormal shadowing term, drawn once per user per drop,
and an optional multipath term modeled as a per-report fading margin drawn
from the envelope of a 4-tap pedestrian power-delay profile.

Signal quality is summarized by the geometry factor (own-cell received power
over other-cell power plus noise) and turned into an SINR with the spreading
gain and the orthogonality loss of the own-cell interference. The mapping
from SINR to the reported channel-quality level is a calibration input: an
affine map per block-error-rate target by default, or a piecewise-constant
breakpoint table loaded from CSV.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from .errors import ConfigurationError

SPREADING_FACTOR = 16

# relative tap powers of the 4-tap pedestrian profile, dB
PED_A_TAP_POWERS_DB = (0.0, -9.7, -19.2, -22.8)

DEFAULT_CQI_PER_DB = 1.02
DEFAULT_CQI_INTERCEPT = 16.62
# per block-error-target shift: a more tolerant target decodes at lower SINR,
# so it reports an equal or higher level at the same SINR
DEFAULT_BLER_OFFSETS = {5: -1.0, 10: 0.0, 15: 0.5, 20: 1.0}


class FadingMode(enum.Enum):
    OFF = "off"
    PEDESTRIAN_A = "peda"


@dataclass(frozen=True)
class PropagationConfig:
    carrier_frequency_mhz: float = 2000.0
    bs_height_m: float = 30.0
    ue_height_m: float = 1.5
    shadowing_sigma_db: float = 8.0
    fading: FadingMode = FadingMode.PEDESTRIAN_A
    ue_speed_kmh: float = 3.0
    city_correction_db: float = 0.0
    min_distance_m: float = 10.0

    def __post_init__(self):
        if self.carrier_frequency_mhz <= 0:
            raise ConfigurationError("carrier frequency must be positive")
        if self.bs_height_m <= 0 or self.ue_height_m <= 0:
            raise ConfigurationError("antenna heights must be positive")
        if self.shadowing_sigma_db < 0:
            raise ConfigurationError("shadowing sigma must be non-negative")
        if self.min_distance_m <= 0:
            raise ConfigurationError("minimum model distance must be positive")


def path_loss_db(distance_m, cfg: Optional[PropagationConfig] = None):
    """Median urban path loss in dB; scalar in, scalar out (arrays likewise).

    Distances below the model's validity floor (cfg.min_distance_m) are
    rejected rather than extrapolated.
    """
    cfg = cfg or PropagationConfig()
    d = np.asarray(distance_m, dtype=np.float64)
    if np.any(d < cfg.min_distance_m):
        raise ValueError(
            f"distance below model validity ({cfg.min_distance_m} m)"
        )
    f = cfg.carrier_frequency_mhz
    hb = cfg.bs_height_m
    hm = cfg.ue_height_m
    a_hm = (1.1 * math.log10(f) - 0.7) * hm - (1.56 * math.log10(f) - 0.8)
    loss = (
        46.3
        + 33.9 * math.log10(f)
        - 13.82 * math.log10(hb)
        - a_hm
        + (44.9 - 6.55 * math.log10(hb)) * np.log10(d / 1000.0)
        + cfg.city_correction_db
    )
    if np.ndim(distance_m) == 0:
        return float(loss)
    return loss


def distance_exponent_db(cfg: Optional[PropagationConfig] = None) -> float:
    """dB added per decade of distance; doubling adds this times log10(2)."""
    cfg = cfg or PropagationConfig()
    return 44.9 - 6.55 * math.log10(cfg.bs_height_m)


@dataclass(frozen=True)
class CellLayout:
    """Serving site at the origin plus interfering sites around it.

    The canonical 19-site grid uses a pointy-top hexagon of radius R: six
    first-ring sites at distance sqrt(3)R (bearings 0, 60, ... degrees) and a
    second ring of six at 2 sqrt(3)R plus six at 3R (bearings 30, 90, ...).
    """

    cell_radius_m: float
    neighbor_positions: tuple

    @classmethod
    def hexagonal(cls, cell_radius_m: float, num_neighbors: int = 18) -> "CellLayout":
        if cell_radius_m <= 0:
            raise ConfigurationError("cell radius must be positive")
        if not 0 <= num_neighbors <= 18:
            raise ConfigurationError("the canonical grid provides up to 18 neighbors")
        r = cell_radius_m
        sites = []
        for deg in range(0, 360, 60):
            a = math.radians(deg)
            sites.append((math.sqrt(3.0) * r * math.cos(a),
                          math.sqrt(3.0) * r * math.sin(a)))
        for deg in range(0, 360, 60):
            a = math.radians(deg)
            sites.append((2.0 * math.sqrt(3.0) * r * math.cos(a),
                          2.0 * math.sqrt(3.0) * r * math.sin(a)))
        for deg in range(30, 390, 60):
            a = math.radians(deg)
            sites.append((3.0 * r * math.cos(a), 3.0 * r * math.sin(a)))
        return cls(cell_radius_m=cell_radius_m,
                   neighbor_positions=tuple(sites[:num_neighbors]))

    def contains(self, x: float, y: float) -> bool:
        r = self.cell_radius_m
        return abs(x) <= math.sqrt(3.0) * r / 2.0 and abs(y) <= r - abs(x) / math.sqrt(3.0)

    def uniform_positions(self, rng: np.random.Generator, n: int,
                          min_distance_m: float = 10.0) -> np.ndarray:
        """n user positions uniform over the serving hexagon, keeping the
        path-loss validity distance from the site."""
        r = self.cell_radius_m
        w = math.sqrt(3.0) * r / 2.0
        out = np.empty((n, 2), dtype=np.float64)
        got = 0
        while got < n:
            x = rng.uniform(-w, w)
            y = rng.uniform(-r, r)
            if self.contains(x, y) and math.hypot(x, y) >= min_distance_m:
                out[got, 0] = x
                out[got, 1] = y
                got += 1
        return out


def geometry_factor(p_own_w: float, p_other_w: float, p_noise_w: float) -> float:
    """Own-cell received power over other-cell power plus noise."""
    denom = p_other_w + p_noise_w
    if denom <= 0:
        raise ValueError("other-cell power plus noise must be positive")
    return p_own_w / denom


@dataclass(frozen=True)
class LinkBudget:
    """Powers entering the SINR expression.

    The stream and own-cell powers only matter through their ratio, so they
    may both be transmit-side or both receive-side values.
    """

    p_hsdsch_w: float
    p_own_w: float
    p_other_w: float
    p_noise_w: float
    orthogonality: float
    spreading_factor: int = SPREADING_FACTOR

    def __post_init__(self):
        if self.p_hsdsch_w < 0 or self.p_own_w < 0 or self.p_other_w < 0:
            raise ConfigurationError("powers must be non-negative")
        if self.p_noise_w <= 0:
            raise ConfigurationError("noise power must be positive")
        if not 0.0 <= self.orthogonality <= 1.0:
            raise ConfigurationError("orthogonality must lie in [0, 1]")

    @property
    def geometry(self) -> float:
        return geometry_factor(self.p_own_w, self.p_other_w, self.p_noise_w)


def sinr(budget: LinkBudget, g: float) -> float:
    """Linear SINR: spreading gain times the stream's share of own-cell power,
    attenuated by intra-cell orthogonality loss and the geometry factor."""
    if budget.p_own_w <= 0:
        raise ValueError("own-cell power must be positive")
    if g < 0:
        raise ValueError("geometry factor must be non-negative")
    if g == 0:
        if budget.orthogonality == 0:
            raise ValueError("orthogonality and geometry factor are both zero")
        return 0.0
    inv_g = 0.0 if math.isinf(g) else 1.0 / g
    denom = budget.orthogonality + inv_g
    if denom == 0:
        raise ValueError("orthogonality and inverse geometry factor are both zero")
    return budget.spreading_factor * (budget.p_hsdsch_w / budget.p_own_w) / denom


def sinr_db(budget: LinkBudget, g: float) -> float:
    s = sinr(budget, g)
    if s <= 0:
        return -math.inf
    return 10.0 * math.log10(s)


class SinrCqiMap:
    """Calibration from SINR (dB) to reported level, per block-error target.

    Affine form: level = clamp(floor(sinr/slope + intercept + shift + 0.5)).
    Breakpoint form: per-target piecewise-constant table from CSV with header
    `bler_target,sinr_db,cqi`; below the first breakpoint the level clamps
    to 1. Levels must be non-decreasing in SINR for each target, and at equal
    SINR a more tolerant target must not report a lower level.
    """

    def __init__(self, slope_db: float = DEFAULT_CQI_PER_DB,
                 intercept: float = DEFAULT_CQI_INTERCEPT,
                 offsets: Optional[Dict[int, float]] = None,
                 breakpoints: Optional[Dict[int, Tuple[np.ndarray, np.ndarray]]] = None):
        if slope_db <= 0:
            raise ConfigurationError("slope must be positive")
        self.slope_db = slope_db
        self.intercept = intercept
        self.offsets = dict(DEFAULT_BLER_OFFSETS if offsets is None else offsets)
        self.breakpoints = breakpoints
        if breakpoints is not None:
            self._validate_breakpoints()

    def _validate_breakpoints(self):
        assert self.breakpoints is not None
        for target, (s, q) in self.breakpoints.items():
            if s.size == 0:
                raise ConfigurationError(f"no breakpoints for target {target}%")
            if np.any(np.diff(s) <= 0):
                raise ConfigurationError(
                    f"breakpoint SINRs for target {target}% must be strictly increasing")
            if np.any(np.diff(q) < 0):
                raise ConfigurationError(
                    f"levels for target {target}% must be non-decreasing in SINR")
        targets = sorted(self.breakpoints)
        grid = np.unique(np.concatenate([s for s, _ in self.breakpoints.values()]))
        prev = None
        for target in targets:
            cur = self._eval_breakpoints(grid, target)
            if prev is not None and np.any(cur < prev):
                raise ConfigurationError(
                    "a more tolerant block-error target reports a lower level")
            prev = cur

    def _eval_breakpoints(self, s_db: np.ndarray, target: int) -> np.ndarray:
        assert self.breakpoints is not None
        s, q = self.breakpoints[target]
        idx = np.searchsorted(s, s_db, side="right") - 1
        return np.where(idx >= 0, q[np.clip(idx, 0, None)], 1)

    @classmethod
    def from_csv(cls, path) -> "SinrCqiMap":
        by_target: Dict[int, list] = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            expected = ["bler_target", "sinr_db", "cqi"]
            if reader.fieldnames is None:
                raise ConfigurationError(f"{path}: empty calibration file")
            if [c.strip() for c in reader.fieldnames] != expected:
                raise ConfigurationError(
                    f"{path}: expected header {','.join(expected)}")
            for i, row in enumerate(reader, start=2):
                try:
                    target = int(row["bler_target"])
                    s = float(row["sinr_db"])
                    q = int(row["cqi"])
                except (TypeError, ValueError) as exc:
                    raise ConfigurationError(f"{path}:{i}: {exc}") from None
                by_target.setdefault(target, []).append((s, q))
        if not by_target:
            raise ConfigurationError(f"{path}: no calibration rows")
        breakpoints = {}
        for target, rows in by_target.items():
            rows.sort()
            s = np.array([r[0] for r in rows], dtype=np.float64)
            q = np.array([r[1] for r in rows], dtype=np.int64)
            breakpoints[target] = (s, q)
        return cls(breakpoints=breakpoints)

    def cqi(self, sinr_value_db, bler_target: int, n_cqi: int = 30):
        """Reported level for an SINR in dB; scalar or array."""
        s = np.asarray(sinr_value_db, dtype=np.float64)
        if self.breakpoints is not None:
            if bler_target not in self.breakpoints:
                raise ConfigurationError(
                    f"no calibration for block-error target {bler_target}%")
            q = self._eval_breakpoints(np.atleast_1d(s), bler_target)
        else:
            if bler_target not in self.offsets:
                raise ConfigurationError(
                    f"no calibration for block-error target {bler_target}%")
            shift = self.offsets[bler_target]
            q = np.floor(
                np.atleast_1d(s) / self.slope_db + self.intercept + shift + 0.5
            )
            q = np.where(np.isnan(q), 1, q)
        q = np.clip(q, 1, n_cqi).astype(np.int64)
        if np.isscalar(sinr_value_db) or s.ndim == 0:
            return int(q[0])
        return q


def sinr_to_cqi(sinr_value_db, bler_target: int,
                mapping: Optional[SinrCqiMap] = None, n_cqi: int = 30):
    mapping = mapping or SinrCqiMap()
    return mapping.cqi(sinr_value_db, bler_target, n_cqi)


@dataclass(frozen=True)
class LinkConfig:
    """Everything the channel chain needs besides geometry and randomness."""

    bs_tx_power_w: float = 20.0
    other_bs_tx_power_w: float = 5.0
    hsdsch_power_w: float = 12.0
    antenna_gain_dbi: float = 11.5
    orthogonality: float = 0.5
    thermal_noise_w: float = 1e-13
    propagation: PropagationConfig = field(default_factory=PropagationConfig)

    def __post_init__(self):
        if min(self.bs_tx_power_w, self.other_bs_tx_power_w, self.hsdsch_power_w) <= 0:
            raise ConfigurationError("transmit powers must be positive")
        if self.thermal_noise_w <= 0:
            raise ConfigurationError("thermal noise must be positive")
        if self.hsdsch_power_w > self.bs_tx_power_w:
            raise ConfigurationError("stream power cannot exceed the site power")


def _watts_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w) + 30.0


def _dbm_to_watts(p_dbm) :
    return np.power(10.0, (np.asarray(p_dbm, dtype=np.float64) - 30.0) / 10.0)


class StaticLinkState(NamedTuple):
    """Per-user received powers that stay fixed for a whole drop, plus the
    shadowing realization (dB, one column per site, serving site first)."""

    p_own_w: np.ndarray
    p_other_w: np.ndarray
    shadowing_db: np.ndarray


def static_link_state(positions: np.ndarray, layout: CellLayout,
                      cfg: LinkConfig, rng: Optional[np.random.Generator] = None,
                      shadowing_db: Optional[np.ndarray] = None) -> StaticLinkState:
    """Received powers from the serving site and the interferers.

    Shadowing is independent per user and per site, drawn here (or passed in)
    and folded into the powers; fast fading is not, it varies per report and
    is applied by the caller.
    """
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim != 2 or pos.shape[1] != 2:
        raise ValueError("positions must have shape (n, 2)")
    n = pos.shape[0]
    sites = np.concatenate(
        [np.zeros((1, 2)), np.asarray(layout.neighbor_positions, dtype=np.float64).reshape(-1, 2)],
        axis=0,
    )
    d = np.hypot(pos[:, None, 0] - sites[None, :, 0],
                 pos[:, None, 1] - sites[None, :, 1])
    loss = path_loss_db(d, cfg.propagation)
    if shadowing_db is None:
        if rng is None:
            raise ValueError("either a random generator or a shadowing draw is required")
        shadowing_db = rng.normal(0.0, cfg.propagation.shadowing_sigma_db,
                                  size=(n, sites.shape[0]))
    else:
        shadowing_db = np.asarray(shadowing_db, dtype=np.float64)
        if shadowing_db.shape != (n, sites.shape[0]):
            raise ValueError("shadowing draw must be per user and per site")
    tx_dbm = np.full(sites.shape[0], _watts_to_dbm(cfg.other_bs_tx_power_w))
    tx_dbm[0] = _watts_to_dbm(cfg.bs_tx_power_w)
    rx_dbm = tx_dbm[None, :] + cfg.antenna_gain_dbi - loss - shadowing_db
    rx_w = _dbm_to_watts(rx_dbm)
    return StaticLinkState(
        p_own_w=rx_w[:, 0],
        p_other_w=rx_w[:, 1:].sum(axis=1),
        shadowing_db=shadowing_db,
    )


def fading_margin_db(rng: np.random.Generator, size) -> np.ndarray:
    """Fast-fading margin: envelope power of the 4-tap pedestrian profile,
    relative to its mean, in dB. Independent across draws."""
    p = np.power(10.0, np.asarray(PED_A_TAP_POWERS_DB) / 10.0)
    scale = np.sqrt(p / 2.0)
    shape = tuple(np.atleast_1d(size)) + (p.size,)
    re = rng.normal(size=shape) * scale
    im = rng.normal(size=shape) * scale
    env = (re * re + im * im).sum(axis=-1) / p.sum()
    return 10.0 * np.log10(env)


def sample_channel(position, layout: CellLayout, cfg: LinkConfig,
                   rng: np.random.Generator,
                   mapping: Optional[SinrCqiMap] = None,
                   bler_target: int = 10, n_cqi: int = 30):
    """One-shot channel draw for a single user: (LinkBudget, reported level)."""
    pos = np.asarray(position, dtype=np.float64).reshape(1, 2)
    if not layout.contains(float(pos[0, 0]), float(pos[0, 1])):
        raise ValueError("position outside the serving cell")
    state = static_link_state(pos, layout, cfg, rng)
    budget = LinkBudget(
        p_hsdsch_w=float(state.p_own_w[0]) * cfg.hsdsch_power_w / cfg.bs_tx_power_w,
        p_own_w=float(state.p_own_w[0]),
        p_other_w=float(state.p_other_w[0]),
        p_noise_w=cfg.thermal_noise_w,
        orthogonality=cfg.orthogonality,
    )
    s_db = sinr_db(budget, budget.geometry)
    if cfg.propagation.fading is FadingMode.PEDESTRIAN_A:
        s_db = s_db + float(fading_margin_db(rng, 1)[0])
    level = sinr_to_cqi(s_db, bler_target, mapping, n_cqi)
    return budget, int(level)
