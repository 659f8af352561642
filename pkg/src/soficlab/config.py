"""Experiment configuration: flat key-value text with sections, exact rationals.

Rationals are written "p/q" so nothing float-shaped ever reaches t or delta.
A config is fully deterministic given its bytes; Monte-Carlo sampling (for
scales beyond enumeration caps) is driven by a counter-based Philox stream
seeded from the config.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key [{key}]: {message}")
        self.key = key


DEFAULTS = {
    "map": {
        "k": "2",
        "a": "2 1 1 1",
        "t": "1/4",
        "mode": "tile",
        "l_enlarge": "0",
        "c_thicken": "0",
        "generators": "standard",
        "cap": "30000000",
    },
    "run": {
        "out_dir": "results",
        "experiments": "",
        "sampling": "full",
        "seed": "1",
        "sample_count": "100000",
    },
    "lipcert": {"k_list": "2 3", "n_max": "6"},
    "lemma82": {"n": "8", "q": "1", "m_list": "1 2 3 4 5"},
    "ballcard": {"n_max": "6", "q_list": "1 2"},
    "claimj": {"n": "5", "q": "1", "corrupted": "0"},
    "goodset": {"n_list": "2 3 4 5 6", "r": "1", "cross_check_n_max": "3"},
    "sandwich": {"radius": "6"},
    "folnervolume": {"a": "1 1 1 0", "t": "1/8", "n_list": "2 3 4", "tolerance": "1/5"},
    "couple": {"t": "1", "n": "3", "l_enlarge": "3"},
    "defect": {"n_list": "3 4 5 6", "probe_pairs": "a1:R", "threshold": "9/10"},
    "fdmass": {"n": "5", "r_enum": "8", "r_local": "2", "tolerance": "3/20"},
    "covolume": {"k": "3", "t": "1", "l_enlarge": "0", "n_list": "2 3 4 5",
                 "tolerance": "3/20"},
    "cylinder": {"n": "3", "sigma": "e a1"},
    "strongexp": {"n": "6", "probe_radius": "4", "epsilon": "1"},
    "profile": {"n": "4", "probes": "a1 R", "kind": "lipschitz"},
    "integrability": {"n": "4", "weight": "exp", "delta": "1/4", "power": "1"},
    "rho": {"n": "4", "n_bound": "4", "radius": "2"},
    "export": {"what": "graph", "n": "1", "path": "export.txt"},
}


@dataclass
class ExperimentConfig:
    raw: configparser.ConfigParser
    path: Optional[str] = None

    def get(self, section: str, key: str) -> str:
        if self.raw.has_option(section, key):
            return self.raw.get(section, key)
        if section in DEFAULTS and key in DEFAULTS[section]:
            return DEFAULTS[section][key]
        raise ConfigError(f"{section}.{key}", "missing and no default")

    def get_int(self, section: str, key: str) -> int:
        val = self.get(section, key)
        try:
            return int(val)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}", f"not an integer: {val!r}") from exc

    def get_fraction(self, section: str, key: str) -> Fraction:
        val = self.get(section, key)
        try:
            if "/" in val:
                num, den = val.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(val))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{section}.{key}", f"not a rational p/q: {val!r}") from exc

    def get_int_list(self, section: str, key: str) -> list:
        val = self.get(section, key)
        try:
            return [int(x) for x in val.split()]
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}", f"not an integer list: {val!r}") from exc

    def get_str_list(self, section: str, key: str) -> list:
        return self.get(section, key).split()

    def get_bool(self, section: str, key: str) -> bool:
        val = self.get(section, key).lower()
        if val in ("1", "true", "yes", "on"):
            return True
        if val in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{section}.{key}", f"not a boolean: {val!r}")

    def get_matrix(self, section: str, key: str):
        vals = self.get_int_list(section, key)
        if len(vals) != 4:
            raise ConfigError(f"{section}.{key}", "matrix needs 4 integers")
        return ((vals[0], vals[1]), (vals[2], vals[3]))

    def set_override(self, dotted: str, value: str) -> None:
        if "." not in dotted:
            raise ConfigError(dotted, "override must be section.key=value")
        section, key = dotted.split(".", 1)
        if not self.raw.has_section(section):
            self.raw.add_section(section)
        self.raw.set(section, key, value)

    def snapshot(self) -> dict:
        out = {}
        for section in set(list(self.raw.sections()) + list(DEFAULTS)):
            sec = {}
            if section in DEFAULTS:
                sec.update(DEFAULTS[section])
            if self.raw.has_section(section):
                sec.update(dict(self.raw.items(section)))
            out[section] = sec
        return out


def load_config(path: Optional[str] = None, overrides: Optional[list] = None) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    if path is not None:
        read = parser.read(path)
        if not read:
            raise ConfigError("file", f"cannot read config at {path!r}")
    cfg = ExperimentConfig(parser, path)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(item, "override must be section.key=value")
        dotted, value = item.split("=", 1)
        cfg.set_override(dotted.strip(), value.strip())
    return cfg
