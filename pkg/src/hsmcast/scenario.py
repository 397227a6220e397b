"""Monte Carlo campaign over a single multicast cell.

One drop places users uniformly in the serving hexagon, freezes their path
loss and shadowing, then walks a 2 ms TTI clock. Channel quality reports
refresh on the feedback period; on the (coarser or equal) planning period the
radio resource manager takes the fresh report snapshot, plans subgroups under
each requested policy and records the group dissatisfaction, its normalized
form and the codes consumed. A campaign runs several independent drops from
seeds spawned off one master seed and aggregates across them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels, policies, satisfaction
from .cqi import CqiTable, TTI_MS, load_table
from .errors import ConfigurationError, PlanningError
from .linkmodel import (
    CellLayout,
    FadingMode,
    LinkConfig,
    PropagationConfig,
    SinrCqiMap,
    DEFAULT_BLER_OFFSETS,
    SPREADING_FACTOR,
    fading_margin_db,
    static_link_state,
)

ALL_POLICIES = (policies.Policy.SINGLE_GROUP, policies.Policy.GROUP_BASED,
                policies.Policy.OPTIMIZED)


@dataclass(frozen=True)
class ScenarioConfig:
    """Cell, traffic and clock parameters of one campaign.

    Defaults describe a 550 m urban macro cell with 18 interfering sites, a
    20 W site carrying a 12 W multicast stream plus 1 W of common channels,
    100 users, a 15-code budget and a 40 ms planning period (20 TTIs).
    """

    cell_radius_m: float = 550.0
    num_neighbors: int = 18
    num_ues: int = 100
    bs_tx_power_w: float = 20.0
    other_bs_tx_power_w: float = 5.0
    common_channel_power_w: float = 1.0
    hsdsch_power_w: float = 12.0
    antenna_gain_dbi: float = 11.5
    orthogonality: float = 0.5
    thermal_noise_dbm: float = -100.0
    bler_target: int = 10
    max_codes: int = 15
    num_ttis: int = 10000
    feedback_period_ttis: int = 20
    rrm_period_ttis: int = 20
    seed: int = 1
    drops: int = 10
    gb_subgroups: int = 2
    poisson_population: bool = False
    normalizer: str = "mean_supported"
    propagation: PropagationConfig = field(default_factory=PropagationConfig)
    cqi_table_path: Optional[str] = None
    sinr_map_path: Optional[str] = None

    def validate(self) -> None:
        if self.cell_radius_m <= 0:
            raise ConfigurationError("cell radius must be positive")
        if self.num_ues < 1:
            raise ConfigurationError("at least one user is required")
        if min(self.bs_tx_power_w, self.other_bs_tx_power_w,
               self.hsdsch_power_w, self.common_channel_power_w) <= 0:
            raise ConfigurationError("powers must be positive")
        if self.hsdsch_power_w + self.common_channel_power_w > self.bs_tx_power_w:
            raise ConfigurationError(
                "stream plus common channel power exceeds the site power")
        if not 0.0 <= self.orthogonality <= 1.0:
            raise ConfigurationError("orthogonality must lie in [0, 1]")
        if not 1 <= self.max_codes <= 15:
            raise ConfigurationError("code budget must lie in [1, 15]")
        if self.num_ttis < 1:
            raise ConfigurationError("at least one TTI is required")
        if self.feedback_period_ttis < 1 or self.rrm_period_ttis < 1:
            raise ConfigurationError("periods must be positive")
        if self.rrm_period_ttis % self.feedback_period_ttis != 0:
            raise ConfigurationError(
                "the planning period must be a multiple of the feedback period")
        if self.drops < 1:
            raise ConfigurationError("at least one drop is required")
        if self.gb_subgroups < 1:
            raise ConfigurationError("gb_subgroups must be at least 1")
        if self.normalizer not in satisfaction.NORMALIZERS:
            raise ConfigurationError(
                f"normalizer must be one of {satisfaction.NORMALIZERS}")
        if self.sinr_map_path is None and self.bler_target not in DEFAULT_BLER_OFFSETS:
            raise ConfigurationError(
                "block-error target must be one of "
                + ", ".join(str(t) for t in sorted(DEFAULT_BLER_OFFSETS)))

    @property
    def thermal_noise_w(self) -> float:
        return 10.0 ** ((self.thermal_noise_dbm - 30.0) / 10.0)

    def link_config(self) -> LinkConfig:
        return LinkConfig(
            bs_tx_power_w=self.bs_tx_power_w,
            other_bs_tx_power_w=self.other_bs_tx_power_w,
            hsdsch_power_w=self.hsdsch_power_w,
            antenna_gain_dbi=self.antenna_gain_dbi,
            orthogonality=self.orthogonality,
            thermal_noise_w=self.thermal_noise_w,
            propagation=self.propagation,
        )


def resolve_table(config: ScenarioConfig) -> CqiTable:
    return load_table(config.cqi_table_path)


def resolve_mapping(config: ScenarioConfig) -> SinrCqiMap:
    if config.sinr_map_path is None:
        return SinrCqiMap()
    mapping = SinrCqiMap.from_csv(config.sinr_map_path)
    if mapping.breakpoints is not None and config.bler_target not in mapping.breakpoints:
        raise ConfigurationError(
            f"calibration file carries no block-error target {config.bler_target}%")
    return mapping


@dataclass
class Ue:
    """One multicast group member; static position, fixed per-drop shadowing."""

    id: int
    position: Tuple[float, float]
    shadowing_db: Tuple[float, ...]
    current_cqi: int = 0
    cqi_history: List[int] = field(default_factory=list)


def place_users(n: int, cell_radius_m: float, rng: np.random.Generator,
                num_neighbors: int = 18, min_distance_m: float = 10.0):
    """Uniform placements over the hexagonal serving cell, as bare Ue records."""
    if n < 1:
        raise ValueError("at least one user is required")
    layout = CellLayout.hexagonal(cell_radius_m, num_neighbors)
    pos = layout.uniform_positions(rng, n, min_distance_m)
    ues = [Ue(id=i, position=(float(x), float(y)), shadowing_db=())
           for i, (x, y) in enumerate(pos)]
    return layout, pos, ues


@dataclass
class PolicyDropMetrics:
    """Per-cycle series and end-of-drop plan for one policy in one drop."""

    policy: policies.Policy
    gdi_kbps: np.ndarray
    normalized: np.ndarray
    codes_used: np.ndarray
    final_plan: policies.SubgroupPlan

    @property
    def mean_gdi_kbps(self) -> float:
        return float(self.gdi_kbps.mean())

    @property
    def mean_normalized(self) -> float:
        return float(self.normalized.mean())

    @property
    def max_codes_used(self) -> int:
        return int(self.codes_used.max())


@dataclass
class RunMetrics:
    """Everything one drop produces."""

    drop_index: int
    num_users: int
    histogram_percent: np.ndarray
    cycle_counts: np.ndarray
    per_policy: Dict[str, PolicyDropMetrics]
    elapsed_ms: float
    ues: List[Ue]


def _base_sinr_db(config: ScenarioConfig, p_own: np.ndarray,
                  p_other: np.ndarray) -> np.ndarray:
    # stream-to-own-power ratio is a transmit-side constant
    share = config.hsdsch_power_w / config.bs_tx_power_w
    inv_g = (p_other + config.thermal_noise_w) / p_own
    lin = SPREADING_FACTOR * share / (config.orthogonality + inv_g)
    return 10.0 * np.log10(lin)


def run_drop(config: ScenarioConfig, drop_seed, drop_index: int = 0,
             which: Sequence[policies.Policy] = ALL_POLICIES,
             table: Optional[CqiTable] = None,
             mapping: Optional[SinrCqiMap] = None) -> RunMetrics:
    """Simulate one drop: fixed placements, TTI clock, periodic reports and
    planning, per-cycle metric series."""
    config.validate()
    table = table or resolve_table(config)
    mapping = mapping or resolve_mapping(config)
    rng = np.random.default_rng(drop_seed)

    n = config.num_ues
    if config.poisson_population:
        n = max(1, int(rng.poisson(config.num_ues)))
    layout, pos, ues = place_users(
        n, config.cell_radius_m, rng, config.num_neighbors,
        config.propagation.min_distance_m)
    link_cfg = config.link_config()
    state = static_link_state(pos, layout, link_cfg, rng)
    for ue, row in zip(ues, state.shadowing_db):
        ue.shadowing_db = tuple(float(v) for v in row)
    base_db = _base_sinr_db(config, state.p_own_w, state.p_other_w)

    n_cqi = table.n_cqi
    rates = table.rates
    codes = table.codes
    use_fading = config.propagation.fading is FadingMode.PEDESTRIAN_A
    norm_mean = config.normalizer == "mean_supported"

    levels = np.ones(n, dtype=np.int64)
    counts = np.zeros(n_cqi, dtype=np.int64)
    cycle_counts = []
    series = {p: ([], [], []) for p in which}
    dp_cache: Dict[bytes, tuple] = {}

    for tti in range(config.num_ttis):
        if tti % config.feedback_period_ttis == 0:
            eff_db = base_db
            if use_fading:
                eff_db = base_db + fading_margin_db(rng, n)
            levels = np.asarray(mapping.cqi(eff_db, config.bler_target, n_cqi))
            for ue, lv in zip(ues, levels):
                ue.current_cqi = int(lv)
                ue.cqi_history.append(int(lv))
        if tti % config.rrm_period_ttis == 0:
            counts = np.bincount(levels - 1, minlength=n_cqi).astype(np.int64)
            cycle_counts.append(counts)
            if norm_mean:
                norm_base = float((counts * rates).sum()) / n
            else:
                norm_base = float(rates[counts > 0].max())
            for pol in which:
                if pol is policies.Policy.OPTIMIZED:
                    key = counts.tobytes()
                    got = dp_cache.get(key)
                    if got is None:
                        got = _kernels.solve_dp(rates, codes, counts, config.max_codes)
                        if got is None:
                            raise PlanningError(
                                "no outage-free activation fits the code budget")
                        dp_cache[key] = got
                    total, used, _ = got
                else:
                    if pol is policies.Policy.SINGLE_GROUP:
                        mask = policies.single_group_mask(counts)
                    else:
                        mask = policies.group_based_mask(
                            counts, codes, config.max_codes, config.gb_subgroups)
                    total, used = _kernels.evaluate_mask(
                        mask.astype(np.uint8), rates, codes, counts)
                g, q, c = series[pol]
                mean = total / n
                g.append(mean)
                q.append(0.0 if mean == 0.0 else mean / norm_base)
                c.append(used)

    last_levels = [int(v) for v in levels]
    per_policy: Dict[str, PolicyDropMetrics] = {}
    for pol in which:
        g, q, c = series[pol]
        plan = policies.build_plan(
            pol, last_levels, table, config.max_codes,
            policies.GbParams(config.gb_subgroups), config.normalizer)
        per_policy[pol.value] = PolicyDropMetrics(
            policy=pol,
            gdi_kbps=np.asarray(g, dtype=np.float64),
            normalized=np.asarray(q, dtype=np.float64),
            codes_used=np.asarray(c, dtype=np.int64),
            final_plan=plan,
        )

    cycles = np.asarray(cycle_counts, dtype=np.int64)
    histogram = cycles.mean(axis=0) / n * 100.0
    return RunMetrics(
        drop_index=drop_index,
        num_users=n,
        histogram_percent=histogram,
        cycle_counts=cycles,
        per_policy=per_policy,
        elapsed_ms=config.num_ttis * TTI_MS,
        ues=ues,
    )


@dataclass(frozen=True)
class PolicyAggregate:
    mean_gdi_kbps: float
    std_gdi_kbps: float
    mean_normalized: float
    std_normalized: float
    mean_codes_used: float
    max_codes_used: int


@dataclass
class CampaignResult:
    config: ScenarioConfig
    master_seed: int
    drop_spawn_keys: List[List[int]]
    drops: List[RunMetrics]
    aggregates: Dict[str, PolicyAggregate]
    histogram_percent: np.ndarray
    backend: str


def _aggregate(drops: List[RunMetrics], token: str) -> PolicyAggregate:
    g = np.asarray([d.per_policy[token].mean_gdi_kbps for d in drops])
    q = np.asarray([d.per_policy[token].mean_normalized for d in drops])
    c = np.asarray([d.per_policy[token].codes_used.mean() for d in drops])
    mx = max(d.per_policy[token].max_codes_used for d in drops)
    std = (lambda a: float(a.std(ddof=1)) if a.size > 1 else 0.0)
    return PolicyAggregate(
        mean_gdi_kbps=float(g.mean()),
        std_gdi_kbps=std(g),
        mean_normalized=float(q.mean()),
        std_normalized=std(q),
        mean_codes_used=float(c.mean()),
        max_codes_used=int(mx),
    )


def run_campaign(config: ScenarioConfig,
                 which: Sequence[policies.Policy] = ALL_POLICIES) -> CampaignResult:
    """Independent drops from seeds spawned off the master seed, aggregated."""
    config.validate()
    table = resolve_table(config)
    mapping = resolve_mapping(config)
    master = np.random.SeedSequence(config.seed)
    children = master.spawn(config.drops)
    drops = []
    for i, child in enumerate(children):
        drops.append(run_drop(config, child, i, which, table, mapping))
    aggregates = {p.value: _aggregate(drops, p.value) for p in which}
    histogram = np.mean([d.histogram_percent for d in drops], axis=0)
    return CampaignResult(
        config=config,
        master_seed=config.seed,
        drop_spawn_keys=[list(c.spawn_key) for c in children],
        drops=drops,
        aggregates=aggregates,
        histogram_percent=histogram,
        backend=_kernels.BACKEND,
    )


# flat key = value serialization of ScenarioConfig, propagation flattened

_PATH_FIELDS = ("cqi_table_path", "sinr_map_path")
_PROP_FIELDS = {
    "carrier_frequency_mhz": float,
    "bs_height_m": float,
    "ue_height_m": float,
    "shadowing_sigma_db": float,
    "ue_speed_kmh": float,
    "city_correction_db": float,
    "min_distance_m": float,
}
_TOP_FIELDS = {
    "cell_radius_m": float,
    "num_neighbors": int,
    "num_ues": int,
    "bs_tx_power_w": float,
    "other_bs_tx_power_w": float,
    "common_channel_power_w": float,
    "hsdsch_power_w": float,
    "antenna_gain_dbi": float,
    "orthogonality": float,
    "thermal_noise_dbm": float,
    "bler_target": int,
    "max_codes": int,
    "num_ttis": int,
    "feedback_period_ttis": int,
    "rrm_period_ttis": int,
    "seed": int,
    "drops": int,
    "gb_subgroups": int,
    "normalizer": str,
}


def _parse_bool(raw) -> bool:
    if isinstance(raw, bool):
        return raw
    token = str(raw).strip().lower()
    if token in ("1", "true", "yes", "on"):
        return True
    if token in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {raw!r}")


def config_to_flat(config: ScenarioConfig) -> Dict[str, object]:
    """Primitive, round-trippable view of the configuration."""
    out: Dict[str, object] = {}
    for name in _TOP_FIELDS:
        out[name] = getattr(config, name)
    out["poisson_population"] = config.poisson_population
    for name in _PROP_FIELDS:
        out[name] = getattr(config.propagation, name)
    out["fading"] = config.propagation.fading.value
    for name in _PATH_FIELDS:
        out[name] = getattr(config, name) or ""
    return out


def config_from_flat(values: Dict[str, object],
                     base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    """Build a configuration from flat key/value pairs (strings accepted).

    Unknown keys are rejected so config-file typos fail loudly.
    """
    config = base or ScenarioConfig()
    prop_kwargs = {}
    top_kwargs = {}
    for key, raw in values.items():
        if key in _TOP_FIELDS:
            conv = _TOP_FIELDS[key]
            try:
                top_kwargs[key] = conv(raw)
            except (TypeError, ValueError):
                raise ConfigurationError(f"bad value for {key}: {raw!r}") from None
        elif key == "poisson_population":
            top_kwargs[key] = _parse_bool(raw)
        elif key in _PROP_FIELDS:
            try:
                prop_kwargs[key] = _PROP_FIELDS[key](raw)
            except (TypeError, ValueError):
                raise ConfigurationError(f"bad value for {key}: {raw!r}") from None
        elif key == "fading":
            token = str(raw).strip().lower()
            try:
                prop_kwargs["fading"] = FadingMode(token)
            except ValueError:
                raise ConfigurationError(
                    f"fading must be one of {[m.value for m in FadingMode]}") from None
        elif key in _PATH_FIELDS:
            top_kwargs[key] = str(raw) or None
        else:
            raise ConfigurationError(f"unknown configuration key {key!r}")
    if prop_kwargs:
        top_kwargs["propagation"] = replace(config.propagation, **prop_kwargs)
    if top_kwargs:
        config = replace(config, **top_kwargs)
    return config
