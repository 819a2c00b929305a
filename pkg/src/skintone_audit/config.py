"""Run configuration: flat ``key = value`` config files plus CLI overrides."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .errors import SkinToneAuditError
from .fairness import DEFAULT_MIDPOINTS
from .ita import ItaConfig, SkinToneCategory


def parse_kv_file(path) -> dict[str, str]:
    """Parse a flat config file: ``key = value`` lines, ``#`` comments."""
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SkinToneAuditError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


@dataclass
class RunConfig:
    trim_mode: str = "mean_of_means"
    trim_sigma: float = 1.0
    mask_threshold: int = 128
    mask_polarity: str = "white_excluded"
    grayscale_mode: str = "rec601"
    midpoints: dict = field(
        default_factory=lambda: dict(DEFAULT_MIDPOINTS)
    )
    out_dir: str = "."
    workers: int = 1
    seed: int = 0
    weighted_trend: bool = False

    def ita_config(self) -> ItaConfig:
        return ItaConfig(
            trim_mode=self.trim_mode,
            trim_sigma=self.trim_sigma,
            mask_threshold=self.mask_threshold,
            mask_polarity=self.mask_polarity,
            grayscale_mode=self.grayscale_mode,
        )

    def apply(self, kv: dict[str, str]) -> None:
        """Apply string key-value overrides (config file or CLI)."""
        casts = {f.name: f.type for f in fields(self)}
        for key, value in kv.items():
            if value is None:
                continue
            if key.startswith("midpoint_"):
                cat = SkinToneCategory(key[len("midpoint_"):])
                self.midpoints[cat] = float(value)
            elif key in ("trim_sigma",):
                self.trim_sigma = float(value)
            elif key in ("mask_threshold", "workers", "seed"):
                setattr(self, key, int(value))
            elif key == "weighted_trend":
                self.weighted_trend = str(value).lower() in ("1", "true", "yes")
            elif key in casts:
                setattr(self, key, value)
            else:
                raise SkinToneAuditError(f"unknown config key: {key}")


def load_run_config(config_path=None, overrides=None) -> RunConfig:
    cfg = RunConfig()
    if config_path:
        cfg.apply(parse_kv_file(config_path))
    if overrides:
        cfg.apply({k: v for k, v in overrides.items() if v is not None})
    cfg.ita_config()  # validate
    return cfg
