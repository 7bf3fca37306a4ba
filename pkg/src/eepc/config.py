"""Experiment configuration: defaults, key=value files, flag overrides.

Defaults mirror the analysis settings used throughout: 20 decoding
iterations, target BER 1e-4, rho stagnation/convergence targets 1e-12 and
1e-10, 32 coupled groups with the bit error probability averaged over
groups 1..10. Values are dB at this boundary and linear inside the library.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .bch import ComponentCodeSpec, make_code
from .de import DeParams


@dataclass
class ExperimentConfig:
    # component code / ensemble
    nu: int = 9
    t: int = 3
    variant: str = "plain"
    ensemble: str = "product"
    decoder: str = "eaed"
    schedule: str = "emp"
    weight_mode: str = "auto"  # auto | exact | binomial
    # quantizer grid
    t_quant: float = 0.0
    t_min: float = 0.0
    t_max: float = 0.16
    t_step: float = 0.01
    refine_tol: float = 1e-3
    # channel / search ranges (dB)
    esn0_db: float = 4.0
    esn0_db_min: float = -2.0
    esn0_db_max: float = 8.0
    # DE tolerances
    rho_stagnation: float = 1e-12
    rho_converged: float = 1e-10
    bisect_db: float = 1e-3
    max_iters: int = 20000
    sc_groups: int = 32
    sc_avg_groups: int = 10
    # simulation
    iterations: int = 20
    target_ber: float = 1e-4
    confidence: float = 0.95
    max_bits: float = 1e9
    sim_tol_db: float = 0.01
    allzero: bool = True
    practical_final: bool = False
    seed: int = 0
    jobs: int = 1

    def code_spec(self) -> ComponentCodeSpec:
        return make_code(self.nu, self.t, self.variant)

    def de_params(self) -> DeParams:
        return DeParams(
            rho_stagnation=self.rho_stagnation,
            rho_converged=self.rho_converged,
            max_iters=self.max_iters,
            bracket_db=(self.esn0_db_min, self.esn0_db_max),
            bisect_db=self.bisect_db,
            sc_groups=self.sc_groups,
            sc_avg_groups=self.sc_avg_groups,
        )

    def to_kv(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            lines.append(f"{f.name} = {getattr(self, f.name)!r}")
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(field: dataclasses.Field, raw: str):
    raw = raw.strip().strip("'\"")
    if field.type in ("bool", bool):
        low = raw.lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ValueError(f"{field.name}: not a boolean: {raw!r}")
    if field.type in ("int", int):
        return int(raw)
    if field.type in ("float", float):
        return float(raw)
    return raw


def config_from_kv(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse key = value lines (# comments allowed); round-trips to_kv."""
    cfg = base or ExperimentConfig()
    by_name = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    updates = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in by_name:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        updates[key] = _coerce(by_name[key], value)
    return dataclasses.replace(cfg, **updates)


def apply_overrides(cfg: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    """Overlay non-None values (CLI flags) onto a config."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(cfg, **updates)
