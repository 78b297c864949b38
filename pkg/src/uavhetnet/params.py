"""Physical and deployment constants for the UAV/TBS heterogeneous network.

Powers are stored in watts. dBm only appears at the configuration boundary
(``dbm_to_watts`` and the config-file loader).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

SPEED_OF_LIGHT = 299_792_458.0
THERMAL_NOISE_DBM_HZ = -174.0


class ConfigError(ValueError):
    """Raised for invalid parameter values or malformed configuration files."""


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power in dBm to watts."""
    if not math.isfinite(p_dbm):
        raise ConfigError(f"power must be finite, got {p_dbm!r}")
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    if p_w <= 0:
        raise ConfigError(f"power must be positive, got {p_w!r}")
    return 10.0 * math.log10(p_w) + 30.0


@dataclass(frozen=True)
class Environment:
    """Blockage pair (eta, mu) of the elevation-angle LoS model."""

    eta: float
    mu: float
    name: str = "custom"

    def __post_init__(self):
        if not (self.eta > 0 and self.mu > 0):
            raise ConfigError(f"eta and mu must be positive, got ({self.eta}, {self.mu})")


SUBURBAN = Environment(4.88, 0.43, "suburban")
URBAN = Environment(9.61, 0.16, "urban")
DENSE_URBAN = Environment(11.95, 0.136, "dense-urban")
HIGH_RISE = Environment(24.23, 0.08, "high-rise")

ENVIRONMENTS = {env.name: env for env in (SUBURBAN, URBAN, DENSE_URBAN, HIGH_RISE)}


def environment(name: str) -> Environment:
    key = name.strip().lower().replace("_", "-").replace(" ", "-")
    aliases = {"dense": "dense-urban", "highrise": "high-rise", "high-rise-urban": "high-rise"}
    key = aliases.get(key, key)
    try:
        return ENVIRONMENTS[key]
    except KeyError:
        raise ConfigError(f"unknown environment {name!r}; choose from {sorted(ENVIRONMENTS)}") from None


@dataclass(frozen=True)
class NetworkParams:
    """Densities, powers, path loss and noise of the three-tier network.

    Densities are per m^2 for the ground TBS tier and per m^3 for the two
    aerial tiers (homogeneous on the upper half-space). ``interference_radius``
    bounds the aggregate-interference field around each receiver: with a
    LoS exponent of 2 the 3-D (and ground xHaul) interference sums diverge
    on an unbounded network.
    """

    lambda_m: float = 1e-6
    lambda_ua: float = 1e-5
    lambda_ub: float = 1e-7
    p_m: float = field(default_factory=lambda: dbm_to_watts(46.0))
    p_ua: float = field(default_factory=lambda: dbm_to_watts(27.0))
    p_ub: float = field(default_factory=lambda: dbm_to_watts(33.0))
    alpha_l: float = 2.0
    alpha_n: float = 4.0
    bandwidth_hz: float = 100e6
    carrier_hz: float = 2e9
    noise_w: float | None = None
    noise_psd_dbm_hz: float = THERMAL_NOISE_DBM_HZ
    nakagami_m: int = 3
    env: Environment = URBAN
    interference_radius: float = 160.0

    def __post_init__(self):
        for name in ("lambda_m", "lambda_ua", "lambda_ub"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be a finite non-negative density, got {v!r}")
        for name in ("p_m", "p_ua", "p_ub", "bandwidth_hz", "carrier_hz"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be positive and finite, got {v!r}")
        if self.alpha_l < 2:
            raise ConfigError(f"alpha_l must be >= 2, got {self.alpha_l}")
        if self.alpha_n < self.alpha_l:
            raise ConfigError(f"alpha_n ({self.alpha_n}) must be >= alpha_l ({self.alpha_l})")
        if int(self.nakagami_m) != self.nakagami_m or self.nakagami_m < 1:
            raise ConfigError(f"nakagami_m must be a positive integer, got {self.nakagami_m!r}")
        object.__setattr__(self, "nakagami_m", int(self.nakagami_m))
        if self.noise_w is not None and not self.noise_w >= 0:
            raise ConfigError(f"noise_w must be >= 0, got {self.noise_w!r}")
        if not self.interference_radius > 0:
            raise ConfigError(f"interference_radius must be positive, got {self.interference_radius!r}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def k_u(self) -> float:
        """Free-space path-loss coefficient at 1 m, (lambda_c / 4 pi)^2."""
        return (self.wavelength / (4.0 * math.pi)) ** 2

    @property
    def k_m(self) -> float:
        return self.k_u

    def noise_power(self, bandwidth_hz: float) -> float:
        """Noise power in watts over ``bandwidth_hz`` (thermal unless overridden)."""
        if self.noise_w is not None:
            return self.noise_w
        return dbm_to_watts(self.noise_psd_dbm_hz) * bandwidth_hz

    def with_(self, **changes) -> "NetworkParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ServiceParams:
    """Traffic demand and the access/xHaul bandwidth split."""

    n_users: int = 5
    rate_access_bps: float = 1.1e6
    rate_xhaul_bps: float = 80e6
    beta: float = 0.5

    def __post_init__(self):
        if int(self.n_users) != self.n_users or self.n_users < 1:
            raise ConfigError(f"n_users must be a positive integer, got {self.n_users!r}")
        object.__setattr__(self, "n_users", int(self.n_users))
        if not (self.rate_access_bps > 0 and self.rate_xhaul_bps > 0):
            raise ConfigError("rate requirements must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must lie in [0, 1], got {self.beta!r}")

    def with_(self, **changes) -> "ServiceParams":
        return replace(self, **changes)


def paper_defaults() -> tuple[NetworkParams, ServiceParams]:
    """The experimental configuration: 46/27/33 dBm, 2/4 exponents, 100 MHz, urban."""
    return NetworkParams(), ServiceParams()


# ---------------------------------------------------------------------------
# configuration file: INI sections mapping one-to-one onto the dataclasses

_NETWORK_KEYS = {
    # key: (field, converter) ; powers are given in dBm in the file
    "lambda_m": ("lambda_m", float),
    "lambda_ua": ("lambda_ua", float),
    "lambda_ub": ("lambda_ub", float),
    "p_m_dbm": ("p_m", lambda s: dbm_to_watts(float(s))),
    "p_ua_dbm": ("p_ua", lambda s: dbm_to_watts(float(s))),
    "p_ub_dbm": ("p_ub", lambda s: dbm_to_watts(float(s))),
    "alpha_l": ("alpha_l", float),
    "alpha_n": ("alpha_n", float),
    "bandwidth_hz": ("bandwidth_hz", float),
    "carrier_hz": ("carrier_hz", float),
    "noise_dbm": ("noise_w", lambda s: dbm_to_watts(float(s))),
    "noise_psd_dbm_hz": ("noise_psd_dbm_hz", float),
    "nakagami_m": ("nakagami_m", int),
    "interference_radius": ("interference_radius", float),
}
_SERVICE_KEYS = {
    "n_users": ("n_users", int),
    "rate_access_bps": ("rate_access_bps", float),
    "rate_xhaul_bps": ("rate_xhaul_bps", float),
    "beta": ("beta", float),
}
_CACHE_KEYS = {
    "library_size": int,
    "cache_size": int,
    "mpc_size": int,
    "gamma": float,
    "hit_mode": str,
}


@dataclass
class Config:
    """Resolved configuration: network, service and cache settings."""

    network: NetworkParams = field(default_factory=NetworkParams)
    service: ServiceParams = field(default_factory=ServiceParams)
    cache: dict = field(default_factory=dict)

    def snapshot(self) -> dict:
        net = asdict(self.network)
        net["env"] = {"name": self.network.env.name, "eta": self.network.env.eta, "mu": self.network.env.mu}
        return {"network": net, "service": asdict(self.service), "cache": dict(self.cache)}


def parse_config(text: str, base: Config | None = None) -> Config:
    """Parse INI text with [network], [environment], [service], [cache] sections.

    Units: densities in m^-2 (lambda_m) or m^-3 (lambda_ua, lambda_ub),
    powers in dBm, rates in bit/s, bandwidth and carrier in Hz, radius in m.
    """
    base = base or Config()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc

    known = {"network", "environment", "service", "cache"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"unknown section(s): {sorted(unknown)}")

    net_changes: dict = {}
    if cp.has_section("network"):
        for key, raw in cp.items("network"):
            if key not in _NETWORK_KEYS:
                raise ConfigError(f"unknown key [network] {key}")
            name, conv = _NETWORK_KEYS[key]
            try:
                net_changes[name] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"[network] {key}: {exc}") from exc
    if cp.has_section("environment"):
        sec = cp["environment"]
        if "name" in sec:
            env = environment(sec["name"])
        else:
            env = base.network.env
        if "eta" in sec or "mu" in sec:
            env = Environment(float(sec.get("eta", env.eta)), float(sec.get("mu", env.mu)), sec.get("name", "custom"))
        net_changes["env"] = env

    svc_changes: dict = {}
    if cp.has_section("service"):
        for key, raw in cp.items("service"):
            if key not in _SERVICE_KEYS:
                raise ConfigError(f"unknown key [service] {key}")
            name, conv = _SERVICE_KEYS[key]
            try:
                svc_changes[name] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"[service] {key}: {exc}") from exc

    cache = dict(base.cache)
    if cp.has_section("cache"):
        for key, raw in cp.items("cache"):
            if key not in _CACHE_KEYS:
                raise ConfigError(f"unknown key [cache] {key}")
            try:
                cache[key] = _CACHE_KEYS[key](raw)
            except ValueError as exc:
                raise ConfigError(f"[cache] {key}: {exc}") from exc

    return Config(
        network=replace(base.network, **net_changes),
        service=replace(base.service, **svc_changes),
        cache=cache,
    )


def load_config(path: str | Path, base: Config | None = None) -> Config:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base)


def network_field_names() -> list[str]:
    return [f.name for f in fields(NetworkParams)]
