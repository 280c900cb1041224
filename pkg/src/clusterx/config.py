"""Plain-text experiment configuration files.

One ``key = value`` pair per line; ``#`` starts a comment. Recognized keys::

    r            squeezing parameter (>= 0)            default 0.35
    gain         one number, or four comma-separated   default 1.0
    use_cluster  true/false                            default true
    mean_xt, mean_yt, mean_xc, mean_yc                 default 0
    engine       covariance | heisenberg | both        default both
    mc_samples   integer, enables the Monte Carlo check
    mc_seed      integer                               default 20100

Unknown or repeated keys are errors.
"""
from __future__ import annotations

import os
from typing import Mapping

from .protocol import ExperimentConfig

KEYS = ("r", "gain", "use_cluster", "mean_xt", "mean_yt", "mean_xc", "mean_yc", "engine", "mc_samples", "mc_seed")
_MEAN_KEYS = ("mean_xt", "mean_yt", "mean_xc", "mean_yc")
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


class ConfigError(ValueError):
    pass


def _convert(key: str, raw: str):
    if key in ("r",) + _MEAN_KEYS:
        return float(raw)
    if key == "gain":
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) not in (1, 4):
            raise ValueError("expected one value or four comma-separated values")
        vals = tuple(float(p) for p in parts)
        return vals * 4 if len(vals) == 1 else vals
    if key == "use_cluster":
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError("expected true or false")
    if key in ("mc_samples", "mc_seed"):
        return int(raw)
    return raw


def parse_text(text: str, source: str = "<string>") -> dict:
    """Parse config text into a ``{key: value}`` dict, without applying defaults."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} (allowed: {', '.join(KEYS)})")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
        if key == "r" and values[key] < 0:
            raise ConfigError(f"{source}:{lineno}: r must be nonnegative (r >= 0), got {raw}")
        if key == "mc_samples" and values[key] < 2:
            raise ConfigError(f"{source}:{lineno}: mc_samples must be >= 2, got {raw}")
    return values


def build_config(values: Mapping | None = None, overrides: Mapping | None = None) -> ExperimentConfig:
    """Apply defaults, then file values, then non-None ``overrides``."""
    merged = dict(values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = set(merged) - set(KEYS)
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    kwargs = {}
    if "r" in merged:
        kwargs["r"] = merged["r"]
    if "gain" in merged:
        kwargs["gain"] = merged["gain"]
    if "use_cluster" in merged:
        kwargs["use_cluster"] = bool(merged["use_cluster"])
    if "engine" in merged:
        kwargs["engine"] = merged["engine"]
    if "mc_samples" in merged:
        kwargs["mc_samples"] = merged["mc_samples"]
    if "mc_seed" in merged:
        kwargs["mc_seed"] = merged["mc_seed"]
    kwargs["means"] = tuple(float(merged.get(k, 0.0)) for k in _MEAN_KEYS)
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path: str | os.PathLike, overrides: Mapping | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return build_config(parse_text(text, str(path)), overrides)


def config_to_dict(config: ExperimentConfig) -> dict:
    d = {
        "r": config.r,
        "gain": list(config.gain),
        "use_cluster": config.use_cluster,
        "engine": config.engine,
        "mc_samples": config.mc_samples,
        "mc_seed": config.mc_seed,
    }
    d.update(zip(_MEAN_KEYS, config.means))
    return d


def config_to_text(config: ExperimentConfig) -> str:
    """Serialize to the file format (round-trips through :func:`parse_text`)."""
    d = config_to_dict(config)
    lines = [f"r = {d['r']!r}", "gain = " + ", ".join(repr(g) for g in d["gain"])]
    lines.append(f"use_cluster = {'true' if d['use_cluster'] else 'false'}")
    lines += [f"{k} = {d[k]!r}" for k in _MEAN_KEYS]
    lines.append(f"engine = {d['engine']}")
    if d["mc_samples"] is not None:
        lines.append(f"mc_samples = {d['mc_samples']}")
    lines.append(f"mc_seed = {d['mc_seed']}")
    return "\n".join(lines) + "\n"
