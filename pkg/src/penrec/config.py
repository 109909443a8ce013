"""Pipeline configuration: defaults, config-file parsing, overrides.

Config files are INI-style sections of key = value pairs:

    [mlp]
    epochs = 200
    hidden_size = 40

Unknown sections or keys are rejected.  Every effective value is echoed
into trained model files, so a model records the exact constants that
built it.  The momentum default is 0.25 (the classic fraction of the
previous step, sometimes quoted as a percentage, 25).
"""

from __future__ import annotations

import configparser
import copy
import io
from pathlib import Path

DEFAULTS: dict[str, dict] = {
    "preprocess": {
        "cutoff_hz": 12.0,
        "radius": 8,
        "default_rate": 100.0,
    },
    "segmenter": {
        "valley_prominence": 0.8,
    },
    "baseline": {
        "band": 12.0,
        "dot_arc": 6.0,
        "dot_points": 5,
    },
    "mlp": {
        "hidden_size": 40,
        "learning_rate": 0.01,
        "momentum": 0.25,
        "epochs": 4000,
        "window": 1,
    },
    "vq": {
        "size": 256,
        "quantize_log": True,
    },
    "hmm": {
        "states": 4,
        "alpha": 1.0,
        "smoothing": 1.0,
        "max_iter": 20,
        "tol": 1e-4,
    },
    "decode": {
        "topn": 5,
        "open_vocab": False,
        "gathering_hard": False,
        "gathering_min": 0.95,
    },
    "synth": {
        "classes": 10,
        "per_class": 50,
        "jitter": 0.05,
    },
    "run": {
        "seed": 0,
        "threads": 1,
    },
}


class ConfigError(ValueError):
    pass


def _coerce(section: str, key: str, raw: str):
    default = DEFAULTS[section][key]
    if isinstance(default, bool):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{section}.{key}: expected a boolean, got {raw!r}")
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: {exc}") from exc
    return raw


class Config:
    def __init__(self, sections: dict[str, dict] | None = None):
        self.sections = copy.deepcopy(DEFAULTS)
        if sections:
            for name, values in sections.items():
                for key, value in values.items():
                    self._check(name, key)
                    self.sections[name][key] = value

    def _check(self, section: str, key: str):
        if section not in DEFAULTS:
            raise ConfigError(f"unknown config section [{section}]")
        if key not in DEFAULTS[section]:
            raise ConfigError(f"unknown config key {section}.{key}")

    def get(self, section: str, key: str):
        self._check(section, key)
        return self.sections[section][key]

    def set(self, dotted: str, raw: str):
        if "." not in dotted:
            raise ConfigError(f"expected section.key=value, got {dotted!r}")
        section, key = dotted.split(".", 1)
        self._check(section, key)
        self.sections[section][key] = _coerce(section, key, raw)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.sections)

    @staticmethod
    def load(path: str | Path | None = None, overrides: list[str] | None = None) -> "Config":
        cfg = Config()
        if path is not None:
            parser = configparser.ConfigParser()
            text = Path(path).read_text(encoding="utf-8")
            parser.read_file(io.StringIO(text), source=str(path))
            for section in parser.sections():
                for key, raw in parser.items(section):
                    cfg._check(section, key)
                    cfg.sections[section][key] = _coerce(section, key, raw)
        for item in overrides or []:
            if "=" not in item:
                raise ConfigError(f"--set expects section.key=value, got {item!r}")
            dotted, raw = item.split("=", 1)
            cfg.set(dotted.strip(), raw.strip())
        return cfg
