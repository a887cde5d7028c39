"""Flat ``section.key = value`` run configurations.

One assignment per line, ``#`` starts a comment, and lists are comma
separated. Numeric keys carry their unit as a suffix (``_m``, ``_hz``,
``_w``, ``_db``, ``_dimensionless``, ...).
"""

from __future__ import annotations

import hashlib
import math
import re

import numpy as np

from .errors import ConfigError

_KEY = re.compile(r"^[a-z][a-z0-9_]*(\.[a-z][a-z0-9_]*)*$")


def parse_config(text, source="<config>"):
    """Parse config text into an insertion-ordered ``{key: raw string}`` dict."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(f"{source}:{lineno}: invalid key {key!r}")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        entries[key] = value
    return entries


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))


def format_value(value):
    """Canonical text for a resolved parameter (17 significant digits for reals)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (list, tuple, np.ndarray)):
        return ", ".join(format_value(v) for v in value)
    return str(value)


class Params:
    """Typed, validated access to raw config entries.

    Every lookup records the resolved value, so the full parameter set (explicit
    and defaulted) can be echoed and hashed. Keys never looked up are reported
    by :meth:`unused`.
    """

    def __init__(self, entries=None):
        self._raw = dict(entries or {})
        self.resolved = {}

    def __contains__(self, key):
        return key in self._raw

    def unused(self):
        return [k for k in self._raw if k not in self.resolved]

    def _record(self, key, value):
        self.resolved[key] = value
        return value

    def _float(self, key, text):
        try:
            value = float(text)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {text!r}") from None
        if not math.isfinite(value):
            raise ConfigError(f"{key}: value must be finite, got {text!r}")
        return value

    def number(self, key, default=None, positive=False, nonnegative=False, low=None, high=None):
        if key in self._raw:
            value = self._float(key, self._raw[key])
        elif default is None:
            raise ConfigError(f"missing required parameter {key}")
        else:
            value = float(default)
        _check_range(key, value, positive, nonnegative, low, high)
        return self._record(key, value)

    def integer(self, key, default=None, minimum=1):
        if key in self._raw:
            text = self._raw[key]
            try:
                value = int(text)
            except ValueError:
                raise ConfigError(f"{key}: expected an integer, got {text!r}") from None
        elif default is None:
            raise ConfigError(f"missing required parameter {key}")
        else:
            value = int(default)
        if value < minimum:
            raise ConfigError(f"{key}: must be >= {minimum}, got {value}")
        return self._record(key, value)

    def choice(self, key, options, default):
        value = self._raw.get(key, default)
        if value not in options:
            raise ConfigError(f"{key}: must be one of {', '.join(options)}, got {value!r}")
        return self._record(key, value)

    def numbers(self, key, default, positive=False, nonnegative=False, low=None, high=None):
        if key in self._raw:
            parts = [p.strip() for p in self._raw[key].split(",") if p.strip()]
            values = [self._float(key, p) for p in parts]
        else:
            values = [float(v) for v in default]
        if not values:
            raise ConfigError(f"{key}: list is empty")
        for v in values:
            _check_range(key, v, positive, nonnegative, low, high)
        return self._record(key, values)

    def grid(self, prefix, unit, default_start, default_stop, default_num, default_scale="linear",
             positive=False, low=None, high=None):
        """A sweep grid from ``<prefix>.values_<unit>`` or start/stop/num/scale."""
        values_key = f"{prefix}.values_{unit}"
        if values_key in self._raw:
            grid = self.numbers(values_key, None, positive=positive, low=low, high=high)
        else:
            start = self.number(f"{prefix}.start_{unit}", default_start, low=low, high=high)
            stop = self.number(f"{prefix}.stop_{unit}", default_stop, low=low, high=high)
            num = self.integer(f"{prefix}.num", default_num, minimum=1)
            scale = self.choice(f"{prefix}.scale", ("linear", "log"), default_scale)
            if scale == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError(f"{prefix}: log grid needs positive start and stop")
                grid = list(np.geomspace(start, stop, num))
            else:
                grid = list(np.linspace(start, stop, num))
            if positive and min(grid) <= 0:
                raise ConfigError(f"{prefix}: grid values must be > 0")
        diffs = np.diff(grid)
        if len(grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ConfigError(f"{prefix}: grid must be strictly monotone")
        return [float(v) for v in grid]

    def digest(self):
        """SHA-256 of the canonical resolved parameter set."""
        text = "\n".join(f"{k} = {format_value(v)}" for k, v in sorted(self.resolved.items()))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _check_range(key, value, positive, nonnegative, low, high):
    if positive and not value > 0:
        raise ConfigError(f"{key}: must be > 0, got {value}")
    if nonnegative and value < 0:
        raise ConfigError(f"{key}: must be >= 0, got {value}")
    if low is not None and value < low:
        raise ConfigError(f"{key}: must be >= {low}, got {value}")
    if high is not None and value > high:
        raise ConfigError(f"{key}: must be <= {high}, got {value}")
