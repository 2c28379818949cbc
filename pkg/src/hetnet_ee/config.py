"""INI-style experiment configuration with unit suffixes and presets.

A config file looks like::

    [experiment]
    presets = femto, heavy

    [network]
    lambda_s = 30 per_km2

    [power]
    P_st = 25 dBm

Densities take ``per_km2`` or ``per_m2``; ``lambda_s`` also accepts
``Kb_per_mbs``, meaning ``x * K_b * lambda_m`` (so a load preset that changes
``K_b`` keeps the SAP count per MBS consistent with the backhaul slots).

Keys are unique across sections, so a command-line override may name a key
with or without its section (``K_m=30`` or ``network.K_m=30``). Resolution
order: built-in defaults, then presets left to right, then the file, then
command-line overrides.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import ConfigError
from .network import FDD, TDD, ModelOptions, PowerParams, SystemParams
from .special import LognormalShadow, dbm_to_watts

# key -> (section, kind)
KEYS: dict[str, tuple[str, str]] = {
    "lambda_m": ("network", "density"),
    "lambda_s": ("network", "density"),
    "lambda_u": ("network", "density"),
    "M_m": ("network", "int"),
    "M_s": ("network", "int"),
    "K_m": ("network", "int"),
    "K_s": ("network", "int"),
    "K_b": ("network", "int"),
    "alpha": ("network", "float"),
    "sigma2": ("network", "power"),
    "B": ("network", "frequency"),
    "zeta_b": ("network", "float"),
    "sigma_D_dB": ("network", "float"),
    "sigma_B_dB": ("network", "float"),
    "mode": ("duplex", "str"),
    "tau_m": ("duplex", "float"),
    "tau_s": ("duplex", "float"),
    "tau_b": ("duplex", "float"),
    "xi_D": ("duplex", "float"),
    "xi_B": ("duplex", "float"),
    "P_mt": ("power", "power"),
    "P_st": ("power", "power"),
    "P_ut": ("power", "power"),
    "P_mb": ("power", "power"),
    "P_sb": ("power", "power"),
    "P_ma": ("power", "power"),
    "P_sa": ("power", "power"),
    "P_ua": ("power", "power"),
    "P_mf": ("power", "power"),
    "P_sf": ("power", "power"),
    "P_me": ("power", "energy"),
    "P_md": ("power", "energy"),
    "P_se": ("power", "energy"),
    "P_sd": ("power", "energy"),
    "P_ue": ("power", "energy"),
    "P_ud": ("power", "energy"),
    "lemma3_literal": ("options", "bool"),
    "eq21_literal": ("options", "bool"),
    "eq18_literal": ("options", "bool"),
    "eq41_literal": ("options", "bool"),
    "laplace_literal": ("options", "bool"),
    "fdd_bh_serving": ("options", "str"),
    "fdd_ul_interferer_density": ("options", "density?"),
    "replicates": ("sim", "int"),
    "seed": ("sim", "int"),
    "channel": ("sim", "str"),
    "workers": ("sim", "int"),
    "radius_factor": ("sim", "float"),
}

SECTIONS = ("experiment", "network", "duplex", "power", "options", "sim")

DEFAULTS: dict[str, str] = {
    "lambda_m": "5 per_km2",
    "lambda_s": "1 Kb_per_mbs",
    "lambda_u": "1000 per_km2",
    "M_m": "100",
    "M_s": "4",
    "K_m": "25",
    "K_s": "1",
    "K_b": "5",
    "alpha": "3.8",
    "sigma2": "-97 dBm",
    "B": "10 MHz",
    "zeta_b": "0",
    "sigma_D_dB": "6",
    "sigma_B_dB": "3",
    "mode": "tdd",
    "tau_m": "0.5",
    "tau_s": "0.5",
    "tau_b": "0.5",
    "xi_D": "0.5",
    "xi_B": "0.5",
    "P_mt": "47.8 dBm",
    "P_st": "23.7 dBm",
    "P_ut": "17 dBm",
    "P_mb": "47.8 dBm",
    "P_sb": "23.7 dBm",
    "P_ma": "1 W",
    "P_sa": "0.8 W",
    "P_ua": "0.1 W",
    "P_mf": "225 W",
    "P_sf": "5.2 W",
    "P_me": "0.1 W_per_Gb",
    "P_md": "0.8 W_per_Gb",
    "P_se": "0.2 W_per_Gb",
    "P_sd": "1.6 W_per_Gb",
    "P_ue": "0.3 W_per_Gb",
    "P_ud": "2.4 W_per_Gb",
    "lemma3_literal": "false",
    "eq21_literal": "false",
    "eq18_literal": "false",
    "eq41_literal": "false",
    "laplace_literal": "false",
    "fdd_bh_serving": "f_LU",
    "fdd_ul_interferer_density": "none",
    "replicates": "2000",
    "seed": "1",
    "channel": "gamma",
    "workers": "1",
    "radius_factor": "19",
}

PRESETS: dict[str, dict[str, str]] = {
    # dense low-power SAPs: one SAP per backhaul slot of every MBS
    "femto": {"lambda_s": "1 Kb_per_mbs", "P_st": "23.7 dBm", "P_sb": "23.7 dBm",
              "P_sa": "0.8 W", "P_sf": "5.2 W"},
    # half as many, more powerful SAPs
    "pico": {"lambda_s": "0.5 Kb_per_mbs", "P_st": "30 dBm", "P_sb": "30 dBm",
             "P_sa": "0.8 W", "P_sf": "7.3 W"},
    # load = streams / antennas on every tier
    "light": {"K_m": "25", "K_s": "1", "K_b": "5"},
    "heavy": {"K_m": "90", "K_s": "3", "K_b": "23"},
}

DEFAULT_PRESETS = ("femto", "light")


@dataclass(frozen=True)
class ResolvedConfig:
    """Flat key -> raw string map after presets, file and overrides."""

    values: dict
    presets: tuple

    def items(self):
        return sorted(self.values.items())


_NUM = r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"


def _parse_value(key: str, raw: str):
    kind = KEYS[key][1]
    s = raw.strip()
    try:
        if kind == "int":
            v = float(s)
            if v != int(v):
                raise ValueError
            return int(v)
        if kind == "float":
            return float(s)
        if kind == "bool":
            low = s.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if kind == "str":
            return s
        if kind == "density?" and s.lower() == "none":
            return None
        m = re.fullmatch(_NUM + r"\s*([A-Za-z_0-9/]*)", s)
        if not m:
            raise ValueError
        x, unit = float(m.group(1)), m.group(2)
        if kind in ("density", "density?"):
            if unit == "Kb_per_mbs" and key == "lambda_s":
                # resolved against K_b and lambda_m once every key is known
                return ("Kb_per_mbs", x)
            return {"per_km2": x * 1e-6, "per_m2": x, "": x}[unit]
        if kind == "power":
            if unit == "dBm":
                return dbm_to_watts(x)
            return {"W": x, "mW": x * 1e-3, "": x}[unit]
        if kind == "energy":
            return {"W_per_Gb": x * 1e-9, "J_per_bit": x, "": x}[unit]
        if kind == "frequency":
            return {"Hz": x, "kHz": x * 1e3, "MHz": x * 1e6, "": x}[unit]
    except (ValueError, KeyError):
        pass
    raise ConfigError(f"cannot parse {key} = {raw!r} (expected {kind})")


def _canonical_key(name: str) -> str:
    key = name.strip()
    if "." in key:
        section, key = key.split(".", 1)
        if section not in SECTIONS:
            raise ConfigError(f"unknown config section {section!r}")
        if key in KEYS and KEYS[key][0] != section:
            raise ConfigError(f"key {key!r} belongs to section [{KEYS[key][0]}], not [{section}]")
    if key not in KEYS:
        raise ConfigError(f"unknown config key {name!r}")
    return key


def _split_presets(s: str) -> tuple:
    names = tuple(p for p in re.split(r"[,\s+]+", s.strip()) if p)
    for n in names:
        if n not in PRESETS:
            raise ConfigError(f"unknown preset {n!r}; available: {', '.join(sorted(PRESETS))}")
    return names


def read_config_file(path) -> tuple[dict, Optional[tuple]]:
    """Raw key/values from a file, plus its preset list if it names one."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    values, presets = {}, None
    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for k, v in cp.items(section):
            if section == "experiment":
                if k == "presets":
                    presets = _split_presets(v)
                    continue
                raise ConfigError(f"{path}: unknown key {k!r} in [experiment]")
            key = _canonical_key(f"{section}.{k}")
            values[key] = v
    return values, presets


def resolve(path=None, presets: Optional[Iterable[str]] = None,
            overrides: Iterable[str] = ()) -> ResolvedConfig:
    """Merge defaults, presets, file and ``key=value`` overrides."""
    file_values, file_presets = ({}, None) if path is None else read_config_file(path)
    if presets:
        chosen = _split_presets(",".join(presets))
    elif file_presets is not None:
        chosen = file_presets
    else:
        chosen = DEFAULT_PRESETS
    values = dict(DEFAULTS)
    for name in chosen:
        values.update(PRESETS[name])
    values.update(file_values)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        k, v = item.split("=", 1)
        values[_canonical_key(k)] = v.strip()
    for k, v in values.items():
        _parse_value(k, v)
    return ResolvedConfig(values=values, presets=tuple(chosen))


def build(resolved: ResolvedConfig):
    """Turn a resolved config into (SystemParams, PowerParams, SimConfig)."""
    from .montecarlo import SimConfig

    v = {k: _parse_value(k, raw) for k, raw in resolved.values.items()}
    if isinstance(v["lambda_s"], tuple):
        v["lambda_s"] = v["lambda_s"][1] * v["K_b"] * v["lambda_m"]
    mode = v["mode"].lower()
    if mode == "tdd":
        duplex = TDD(v["tau_m"], v["tau_s"], v["tau_b"])
    elif mode == "fdd":
        duplex = FDD(v["xi_D"], v["xi_B"])
    else:
        raise ConfigError(f"duplex mode must be tdd or fdd, got {v['mode']!r}")
    options = ModelOptions(
        lemma3_literal=v["lemma3_literal"], eq21_literal=v["eq21_literal"],
        eq18_literal=v["eq18_literal"], eq41_literal=v["eq41_literal"],
        laplace_literal=v["laplace_literal"], fdd_bh_serving=v["fdd_bh_serving"],
        fdd_ul_interferer_density=v["fdd_ul_interferer_density"])
    params = SystemParams(
        lambda_m=v["lambda_m"], lambda_s=v["lambda_s"], lambda_u=v["lambda_u"],
        M_m=v["M_m"], M_s=v["M_s"], K_m=v["K_m"], K_s=v["K_s"], K_b=v["K_b"],
        alpha=v["alpha"], sigma2=v["sigma2"], B=v["B"], zeta_b=v["zeta_b"],
        duplex=duplex, shadow_D=LognormalShadow(v["sigma_D_dB"]),
        shadow_B=LognormalShadow(v["sigma_B_dB"]), options=options)
    powers = PowerParams(**{k: v[k] for k in (
        "P_mt", "P_st", "P_ut", "P_mb", "P_sb", "P_ma", "P_sa", "P_ua", "P_mf", "P_sf",
        "P_me", "P_md", "P_se", "P_sd", "P_ue", "P_ud")})
    sim = SimConfig(replicates=v["replicates"], seed=v["seed"], channel=v["channel"],
                    workers=v["workers"], radius_factor=v["radius_factor"])
    return params, powers, sim


def parse_config(path=None, presets: Optional[Iterable[str]] = None, overrides: Iterable[str] = ()):
    """(SystemParams, PowerParams, SimConfig) from a config file, presets and overrides."""
    return build(resolve(path, presets, overrides))


def load_preset(*names: str, overrides: Iterable[str] = ()):
    return parse_config(None, names or DEFAULT_PRESETS, overrides)
