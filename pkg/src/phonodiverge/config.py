"""Run configuration: defaults, file loading, seed precedence, snapshot.

A run is reproducible from its snapshot: the snapshot holds every
field that influences results (and names the random generators in
use), while scheduling knobs like the worker count stay out of it so
the same analysis at different parallelism writes identical files.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .stats import COV_MODES

DEFAULT_SEED = 7
SEED_ENV_VAR = "PHONODIVERGE_SEED"

TABLE_FORMATS = ("CSV", "MARKDOWN")

#: Algorithm identities recorded in every snapshot. Changing either
#: changes results, so they are pinned here rather than configurable.
GENERATORS = {
    "normal_sampler": "pcg64",
    "smo_partner": "splitmix64-xorshift64star",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    manifest: str = ""
    out_dir: str = ""
    seed: int = DEFAULT_SEED
    min_count: int = 20
    alpha: float = 0.1
    cov_mode: str = "FULL_SHRINKAGE"
    svm_c: float = 1.0
    gamma: float | None = None  # None → 1/d at training time
    tol: float = 1e-3
    max_passes: int = 10
    split_ratio: float = 0.8
    tier_name: str = "phones"
    silence_labels: tuple[str, ...] = ("", "sil", "sp", "spn")
    table_format: str = "CSV"
    per_speaker: bool = False
    jobs: int = 1  # scheduling only; excluded from the snapshot

    def validate(self) -> "RunConfig":
        if self.seed < 0 or self.seed > 0xFFFFFFFFFFFFFFFF:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        if self.min_count < 2:
            raise ConfigError(f"min_count must be ≥ 2, got {self.min_count}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.cov_mode not in COV_MODES:
            raise ConfigError(
                f"cov_mode must be one of {COV_MODES}, got {self.cov_mode!r}"
            )
        if self.svm_c <= 0:
            raise ConfigError(f"C must be positive, got {self.svm_c}")
        if self.gamma is not None and self.gamma <= 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.tol <= 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.max_passes < 1:
            raise ConfigError(f"max_passes must be ≥ 1, got {self.max_passes}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(
                f"split_ratio must be in (0, 1), got {self.split_ratio}"
            )
        if not self.tier_name:
            raise ConfigError("tier_name must be non-empty")
        if self.table_format not in TABLE_FORMATS:
            raise ConfigError(
                f"table_format must be one of {TABLE_FORMATS}, got {self.table_format!r}"
            )
        if self.jobs < 1:
            raise ConfigError(f"jobs must be ≥ 1, got {self.jobs}")
        return self

    def snapshot(self) -> dict:
        """Everything that determines results, as a JSON-ready dict."""
        d = asdict(self)
        d.pop("jobs")
        d["silence_labels"] = list(self.silence_labels)
        d["generators"] = dict(GENERATORS)
        return d


def load_config_file(path: str | Path) -> dict:
    """Read a JSON config file into a plain dict of overrides."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid config: {e}") from e
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    obj.pop("generators", None)  # informational in snapshots, not settable
    valid = set(RunConfig.__dataclass_fields__)
    unknown = [k for k in obj if k not in valid]
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {unknown}")
    if "silence_labels" in obj:
        if not isinstance(obj["silence_labels"], list):
            raise ConfigError(f"{path}: silence_labels must be a list")
        obj["silence_labels"] = tuple(str(s) for s in obj["silence_labels"])
    return obj


def resolve_seed(flag_seed: int | None, file_seed: int | None) -> int:
    """Seed precedence: flag > config file > environment > default."""
    if flag_seed is not None:
        return flag_seed
    if file_seed is not None:
        return file_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None and env != "":
        try:
            return int(env)
        except ValueError as e:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from e
    return DEFAULT_SEED


def build_config(
    file_path: str | Path | None = None, flag_overrides: dict | None = None
) -> RunConfig:
    """Merge defaults ← config file ← flags; flags win."""
    merged: dict = {}
    file_seed = None
    if file_path is not None:
        file_vals = load_config_file(file_path)
        file_seed = file_vals.pop("seed", None)
        merged.update(file_vals)
    flags = dict(flag_overrides or {})
    flag_seed = flags.pop("seed", None)
    merged.update({k: v for k, v in flags.items() if v is not None})
    merged["seed"] = resolve_seed(flag_seed, file_seed)
    if "silence_labels" in merged and not isinstance(merged["silence_labels"], tuple):
        merged["silence_labels"] = tuple(merged["silence_labels"])
    cfg = replace(RunConfig(), **merged)
    return cfg.validate()
