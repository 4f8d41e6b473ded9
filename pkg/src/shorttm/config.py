"""Model configuration, per-model defaults and key=value config files."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .errors import ConfigError

MODELS = ("LDA", "GSDMM", "LFDMM", "GPUDMM", "GPUPDMM", "BTM", "WNTM", "SATM", "PTM")
EMBEDDING_MODELS = ("LFDMM", "GPUDMM", "GPUPDMM")

_ALIASES = {"DMM": "GSDMM", "LF-DMM": "LFDMM", "GPU-DMM": "GPUDMM", "GPU-PDMM": "GPUPDMM"}


def normalize_model(name: str) -> str:
    key = name.strip().upper()
    key = _ALIASES.get(key, key).replace("-", "").replace("_", "")
    key = _ALIASES.get(key, key)
    if key not in MODELS:
        raise ConfigError(f"unknown model {name!r}; choose from {', '.join(MODELS)}")
    return key


@dataclass
class ModelConfig:
    """Hyperparameters of one run. ``None`` means "use the model default"."""

    model: str = "GSDMM"
    K: int = 20
    alpha: Optional[float] = None
    beta: Optional[float] = None
    iterations: Optional[int] = None
    seed: int = 1
    # LF-DMM
    lambda_mix: float = 0.6
    mu_reg: float = 0.01
    baseline_iterations: Optional[int] = None
    optimizer_steps: int = 20
    # GPU-DMM / GPU-PDMM
    epsilon: float = 0.5
    mu_promote: float = 0.1
    lambda_poisson: float = 1.5
    varsigma: Optional[int] = None
    M_top: Optional[int] = None
    # BTM / WNTM
    window_c: Optional[int] = None
    # SATM / PTM
    P_count: Optional[int] = None
    lambda_ptm: float = 0.1
    satm_floor: float = 1e-300

    def resolved(self) -> "ModelConfig":
        """Copy with every ``None`` replaced by the model default, validated."""
        m = normalize_model(self.model)
        K = int(self.K)
        if K < 1:
            raise ConfigError(f"K must be >= 1, got {K}")
        d = {
            "LDA": dict(alpha=0.05, beta=0.01, iterations=2000),
            "GSDMM": dict(alpha=0.1, beta=0.1, iterations=2000),
            "LFDMM": dict(alpha=0.1, beta=0.01, iterations=2000),
            "GPUDMM": dict(alpha=50.0 / K, beta=0.01, iterations=1000),
            "GPUPDMM": dict(alpha=50.0 / K, beta=0.01, iterations=1000),
            "BTM": dict(alpha=50.0 / K, beta=0.01, iterations=2000),
            "WNTM": dict(alpha=0.1, beta=0.1, iterations=2000, window_c=10),
            "SATM": dict(alpha=50.0 / K, beta=0.1, iterations=1000, P_count=300),
            "PTM": dict(alpha=0.1, beta=0.01, iterations=2000, P_count=1000),
        }[m]
        out = replace(self, model=m, K=K)
        for key, val in d.items():
            if getattr(out, key) is None:
                setattr(out, key, val)
        if out.baseline_iterations is None:
            out.baseline_iterations = (3 * out.iterations) // 4
        if out.M_top is None:
            out.M_top = min(10, K)
        if out.varsigma is None:
            out.varsigma = min(3, out.M_top)
        out.validate()
        return out

    def validate(self) -> None:
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if self.iterations is not None and self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        for key in ("alpha", "beta"):
            v = getattr(self, key)
            if v is not None and not v > 0:
                raise ConfigError(f"{key} must be > 0, got {v}")
        if not 0.0 <= self.lambda_mix <= 1.0:
            raise ConfigError(f"lambda_mix must lie in [0, 1], got {self.lambda_mix}")
        if not -1.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in [-1, 1], got {self.epsilon}")
        if self.mu_promote < 0 or self.mu_reg < 0:
            raise ConfigError("mu values must be >= 0")
        if self.lambda_poisson <= 0:
            raise ConfigError(f"lambda_poisson must be > 0, got {self.lambda_poisson}")
        if self.varsigma is not None and self.M_top is not None:
            if not 1 <= self.varsigma <= self.M_top <= self.K:
                raise ConfigError(
                    f"need 1 <= varsigma <= M_top <= K, got {self.varsigma}, {self.M_top}, {self.K}")
        if self.window_c is not None and self.window_c < 2:
            raise ConfigError(f"window_c must be >= 2, got {self.window_c}")
        if self.P_count is not None and self.P_count < 1:
            raise ConfigError(f"P_count must be >= 1, got {self.P_count}")
        if self.lambda_ptm <= 0:
            raise ConfigError(f"lambda_ptm must be > 0, got {self.lambda_ptm}")
        if self.baseline_iterations is not None and self.iterations is not None:
            if not 0 <= self.baseline_iterations <= self.iterations:
                raise ConfigError("baseline_iterations must lie in [0, iterations]")
        if not 0 < self.satm_floor < 1:
            raise ConfigError("satm_floor must lie in (0, 1)")

    @property
    def needs_embeddings(self) -> bool:
        return normalize_model(self.model) in EMBEDDING_MODELS

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.to_dict().items() if v is not None)


_FIELD_TYPES = {f.name: f.type for f in fields(ModelConfig)}


def _coerce(key: str, raw: str):
    t = str(_FIELD_TYPES[key])
    if raw.lower() in ("none", ""):
        return None
    try:
        if "int" in t:
            return int(raw)
        if "float" in t:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def parse_config_text(text: str) -> dict:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, raw)
    return out


def load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def merge_config(file_values: dict | None = None, flag_values: dict | None = None) -> ModelConfig:
    """Flags beat config-file values beat model defaults."""
    vals = {}
    for src in (file_values or {}, flag_values or {}):
        vals.update({k: v for k, v in src.items() if v is not None})
    return ModelConfig(**vals).resolved()
