"""Sectioned key-value configuration (INI syntax) with typed defaults."""

import configparser
import copy
import hashlib
import io
import json

from .errors import ConfigError

# section -> key -> (type, default); list types hold their element type
DEFAULTS = {
    "beam": {
        "E": (float, 1e6),
        "I": (float, 1e-8),
        "L": (float, 0.1),
        "K": (float, 0.9),
        "A": (float, 1e-4),
        "G": (float, 4e5),
        "R": (float, 0.05),
        "profile_variant": (str, "corrected"),
    },
    "reference": {
        "num": ([float], [-4.0]),
        "den": ([float], [1.0, 3.0, 5.0]),
        "dt": (float, 1e-3),
    },
    "plant": {
        "zeta": (float, 0.7),
        "omega_n": (float, 3.0),
    },
    "mrac": {
        # gamma acts on metre-scale signals, hence its size; theta is in N/m
        "gamma": (float, 5e4),
        "duration": (float, 20.0),
        "blowup_limit": (float, 1e6),
        "theta0": (float, 20.0),
    },
    "nn": {
        "layers": ([int], [2, 5, 5, 7, 1]),
        "inputs": ([str], ["e", "y_ref"]),
        "seed": (int, 0),
        "max_epochs": (int, 1000),
        "lambda0": (float, 1e-3),
        "lambda_up": (float, 10.0),
        "lambda_down": (float, 0.1),
        "lambda_max": (float, 1e10),
        "grad_tol": (float, 1e-14),
        "goal_sse": (float, 0.0),
        "output_activation": (str, "linear"),
    },
    "train": {
        "val_fraction": (float, 0.15),
        "test_fraction": (float, 0.15),
        "stride": (int, 20),
    },
    "loop": {
        "direction": (str, "all"),
        "angle_deg": (float, 30.0),
        "duration": (float, 10.0),
        "online": (bool, False),
        "eta": (float, 0.0),
    },
    "metrics": {
        "band": (float, 0.02),
        "window": (float, 1.0),
    },
}


def _parse_value(section, key, raw):
    kind, _ = DEFAULTS[section][key]
    raw = raw.strip()
    try:
        if isinstance(kind, list):
            elem = kind[0]
            if raw.startswith("["):
                items = json.loads(raw)
            else:
                items = [tok.strip() for tok in raw.split(",") if tok.strip()]
            return [elem(v) for v in items]
        if kind is bool:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is str:
            return raw
        return kind(raw)
    except (ValueError, TypeError, json.JSONDecodeError):
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return json.dumps(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class Config:
    """Resolved configuration: every documented key, defaults filled in."""

    def __init__(self, values=None):
        self.values = {s: {k: copy.deepcopy(d) for k, (_, d) in keys.items()} for s, keys in DEFAULTS.items()}
        for section, keys in (values or {}).items():
            for key, value in keys.items():
                self.set(section, key, value)

    def __getitem__(self, section):
        return self.values[section]

    def set(self, section, key, value):
        if section not in DEFAULTS:
            raise ConfigError(f"unknown config section [{section}]")
        if key not in DEFAULTS[section]:
            raise ConfigError(f"unknown config key {key!r} in section [{section}]")
        if isinstance(value, str) and DEFAULTS[section][key][0] is not str:
            value = _parse_value(section, key, value)
        self.values[section][key] = value

    @classmethod
    def from_string(cls, text):
        parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        cfg = cls()
        for section in parser.sections():
            if section not in DEFAULTS:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"unknown config key {key!r} in section [{section}]")
                cfg.values[section][key] = _parse_value(section, key, raw)
        return cfg

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_string(fh.read())

    def to_string(self):
        buf = io.StringIO()
        for section, keys in self.values.items():
            buf.write(f"[{section}]\n")
            for key, value in keys.items():
                buf.write(f"{key} = {_format_value(value)}\n")
            buf.write("\n")
        return buf.getvalue()

    def digest(self):
        """Short SHA-256 of the canonical serialized form."""
        return hashlib.sha256(self.to_string().encode()).hexdigest()[:16]

    def __eq__(self, other):
        return isinstance(other, Config) and self.values == other.values
