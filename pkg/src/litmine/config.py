"""Application configuration: one file, environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

ENV_PREFIX = "LITMINE_"


@dataclass
class DetectorConfig:
    """Geometric extraction constants, tuned on the fixture corpus."""

    separator_merge_pt: float = 3.0      # rules closer than this collapse
    whitespace_gap_factor: float = 1.5   # column gap vs median word gap
    merge_crossing_ratio: float = 0.5    # run/cell overlap ratio for merges
    min_table_rules: int = 2             # horizontal rules to form a table
    rule_span_fraction: float = 0.4      # of page width
    text_rows_min: int = 3               # aligned rows for ruleless tables
    table_cluster_gap_pt: float = 60.0   # vertical gap separating clusters
    map_label_margin_pt: float = 12.0    # label distance from region border
    map_adjacency_pt: float = 16.0       # degree runs near an image
    min_map_labels: int = 2
    calibration_residual_tolerance_deg: float = 0.25


@dataclass
class AdapterConfig:
    meta_endpoints: list[str] = field(default_factory=list)
    detector_endpoint: str | None = None
    ocr_endpoint: str | None = None
    timeout_s: float = 30.0


@dataclass
class AppConfig:
    host: str = "127.0.0.1"
    port: int = 8347
    store_path: str = "litmine.db"
    lease_duration_s: float = 600.0
    session_duration_s: float = 12 * 3600.0
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    adapters: AdapterConfig = field(default_factory=AdapterConfig)


def _apply_env(cfg: AppConfig, env: dict[str, str]):
    simple = {
        "HOST": ("host", str),
        "PORT": ("port", int),
        "STORE_PATH": ("store_path", str),
        "LEASE_DURATION_S": ("lease_duration_s", float),
        "SESSION_DURATION_S": ("session_duration_s", float),
    }
    for key, (attr, cast) in simple.items():
        raw = env.get(ENV_PREFIX + key)
        if raw is not None:
            setattr(cfg, attr, cast(raw))
    for f in fields(DetectorConfig):
        raw = env.get(ENV_PREFIX + "DETECTOR_" + f.name.upper())
        if raw is not None:
            cast = type(getattr(cfg.detector, f.name))
            setattr(cfg.detector, f.name, cast(raw))
    raw = env.get(ENV_PREFIX + "ADAPTER_TIMEOUT_S")
    if raw is not None:
        cfg.adapters.timeout_s = float(raw)


def load_config(path: str | Path | None = None,
                env: dict[str, str] | None = None) -> AppConfig:
    """Build the configuration from an optional YAML file plus
    LITMINE_* environment overrides (environment wins)."""
    cfg = AppConfig()
    if path is not None:
        data = yaml.safe_load(Path(path).read_text()) or {}
        for key, value in data.items():
            if key == "detector" and isinstance(value, dict):
                for k, v in value.items():
                    if hasattr(cfg.detector, k):
                        setattr(cfg.detector, k, v)
            elif key == "adapters" and isinstance(value, dict):
                for k, v in value.items():
                    if hasattr(cfg.adapters, k):
                        setattr(cfg.adapters, k, v)
            elif hasattr(cfg, key):
                setattr(cfg, key, value)
    _apply_env(cfg, env if env is not None else dict(os.environ))
    return cfg
