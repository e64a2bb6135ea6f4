"""Service configuration: flat key=value file plus IFIND_* env overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    corpus_path: str = ""
    index_path: str = ""
    model_path: str = ""
    vectors_path: str = ""
    use_prediction: bool = True
    use_word2vec: bool = True
    max_results: int = 10
    threshold: float = 0.5
    expansion_n: int = 4
    top_interests: int = 4
    th1: float = 0.1
    th2: float = 0.1
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.8
    w_max: float = 5.0
    journal_size: int = 10_000

    def validate(self) -> list[str]:
        """All problems at once: out-of-range tunables and missing files."""
        problems = []
        if not 0 < self.threshold <= 1:
            problems.append(f"threshold must be in (0, 1], got {self.threshold}")
        if self.th1 <= 0 or self.th2 <= 0:
            problems.append(f"th1 and th2 must be positive, got {self.th1}, {self.th2}")
        if self.alpha < 0:
            problems.append(f"alpha must be >= 0, got {self.alpha}")
        if self.beta < 0:
            problems.append(f"beta must be >= 0, got {self.beta}")
        if not 0 <= self.gamma <= 1:
            problems.append(f"gamma must be in [0, 1], got {self.gamma}")
        if self.w_max <= 0:
            problems.append(f"w_max must be positive, got {self.w_max}")
        for name in ("max_results", "expansion_n", "top_interests", "journal_size", "port"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("corpus_path", "index_path", "model_path", "vectors_path"):
            path = getattr(self, name)
            if path and not os.path.exists(path):
                problems.append(f"{name} {path!r} does not exist")
        return problems


def _coerce(kind: type, raw: str):
    if kind is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return kind(raw)


def load_config(path: str | None = None, env: dict | None = None) -> ServiceConfig:
    """Defaults, then the key=value file, then IFIND_<KEY> env overrides."""
    env = os.environ if env is None else env
    values: dict[str, str] = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, raw = line.partition("=")
                values[key.strip()] = raw.strip()
    config = ServiceConfig()
    kinds = {f.name: type(getattr(config, f.name)) for f in fields(ServiceConfig)}
    for key, raw in values.items():
        if key not in kinds:
            raise ValueError(f"unknown configuration key {key!r}")
        setattr(config, key, _coerce(kinds[key], raw))
    for f in fields(ServiceConfig):
        override = env.get(f"IFIND_{f.name.upper()}")
        if override is not None:
            setattr(config, f.name, _coerce(kinds[f.name], override))
    return config
