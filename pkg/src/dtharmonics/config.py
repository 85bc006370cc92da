from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class RunConfig:
    """Tolerances, quadrature orders and seed for CLI runs.

    ``tol_verify`` overrides every check tolerance when set; ``None`` keeps the
    per-check defaults.
    """

    tol_prune: float = 1e-13
    tol_verify: float | None = None
    fd_step: float = 1e-5
    quad_theta: int = 32
    quad_phi: int = 64
    quad_beta: int = 64
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        for name in ("tol_prune", "fd_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.tol_verify is not None and not self.tol_verify > 0:
            raise ValueError("tol_verify must be positive")
        for name in ("quad_theta", "quad_phi", "quad_beta"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")
        if self.format not in ("json", "table"):
            raise ValueError("format must be 'json' or 'table'")

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def updated(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)
