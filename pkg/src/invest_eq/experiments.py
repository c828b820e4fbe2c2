"""Parameter sweeps behind the comparison figures, emitted as CSV or JSON rows.

Two sweep shapes exist: a delta-sweep over markets with ``psi_n = c n^-delta``
and a grid over ``(psi_1, psi_2)`` for two CPs.  Five presets map onto the
figures (``fig2``, ``fig3``, ``fig45``, ``fig67``, ``fig8``).  Axis ranges are
not recoverable from the figures; the defaults cover every threshold the
analysis names (``psi = 1, 1.5, 3``).
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from . import bargaining, centralized, cooperative, nash
from .errors import ConfigError
from .model import Market, Special, ratio, total_private

MODELS = ("centralized", "cooperative", "nash", "bargaining", "benchmark")
METRICS = ("eta", "gamma_N", "Gamma", "beta", "gamma_B", "alpha")
NASH_METRICS = ("eta", "gamma_N", "Gamma")
BARGAIN_METRICS = ("beta", "gamma_B", "alpha")
CSV_HEADER = (
    "model", "b1", "b2", "delta", "psi1", "psi2", "Q", "P", "gamma",
    "total_utility", "eta", "Gamma", "beta", "alpha", "status",
)
DEFAULT_DELTAS = tuple(round(0.05 * k, 10) for k in range(31))
DEFAULT_PSI = tuple(0.25 * k for k in range(1, 21))
THREADS_ENV = "INVEST_EQ_THREADS"

def _number(path: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    return value


def _number_list(path: str, values: Any) -> tuple[float, ...]:
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(path, "expected a non-empty list of numbers")
    return tuple(_number(f"{path}[{i}]", v) for i, v in enumerate(values))


@dataclass(frozen=True)
class DeltaSweepConfig:
    N: int = 2
    c: float = 2.0
    delta_grid: tuple[float, ...] = DEFAULT_DELTAS
    b_vectors: tuple[tuple[float, ...], ...] = ((1.0, 1.0),)
    models: tuple[str, ...] = ("centralized",)

    def __post_init__(self):
        if isinstance(self.N, bool) or not isinstance(self.N, int) or self.N < 1:
            raise ConfigError("N", f"expected a positive integer, got {self.N!r}")
        if not _number("c", self.c) > 0:
            raise ConfigError("c", f"must be positive, got {self.c}")
        deltas = _number_list("delta_grid", self.delta_grid)
        for i, d in enumerate(deltas):
            if d < 0:
                raise ConfigError(f"delta_grid[{i}]", f"must be >= 0, got {d}")
        if not isinstance(self.b_vectors, (list, tuple)) or not self.b_vectors:
            raise ConfigError("b_vectors", "expected a non-empty list of b vectors")
        bs = []
        for i, vec in enumerate(self.b_vectors):
            vec = _number_list(f"b_vectors[{i}]", vec)
            if len(vec) != self.N:
                raise ConfigError(f"b_vectors[{i}]", f"expected {self.N} entries, got {len(vec)}")
            for j, x in enumerate(vec):
                if x < 1:
                    raise ConfigError(f"b_vectors[{i}][{j}]", f"must be >= 1, got {x}")
            bs.append(vec)
        models = _choices("models", self.models, MODELS)
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "delta_grid", deltas)
        object.__setattr__(self, "b_vectors", tuple(bs))
        object.__setattr__(self, "models", models)

    @classmethod
    def from_dict(cls, data: dict) -> "DeltaSweepConfig":
        return cls(**_known_fields(cls, data))

    def to_dict(self) -> dict:
        return {
            "kind": "delta",
            "N": self.N,
            "c": self.c,
            "delta_grid": list(self.delta_grid),
            "b_vectors": [list(b) for b in self.b_vectors],
            "models": list(self.models),
        }


@dataclass(frozen=True)
class PsiGridConfig:
    psi1_grid: tuple[float, ...] = DEFAULT_PSI
    psi2_grid: tuple[float, ...] = DEFAULT_PSI
    b_vector: tuple[float, ...] = (1.0, 1.0)
    metrics: tuple[str, ...] = NASH_METRICS

    def __post_init__(self):
        grids = {}
        for name in ("psi1_grid", "psi2_grid"):
            values = _number_list(name, getattr(self, name))
            for i, x in enumerate(values):
                if not x > 0:
                    raise ConfigError(f"{name}[{i}]", f"must be positive, got {x}")
            grids[name] = values
        b = _number_list("b_vector", self.b_vector)
        if len(b) != 2:
            raise ConfigError("b_vector", f"expected 2 entries, got {len(b)}")
        for j, x in enumerate(b):
            if x < 1:
                raise ConfigError(f"b_vector[{j}]", f"must be >= 1, got {x}")
        metrics = _choices("metrics", self.metrics, METRICS)
        for name, values in grids.items():
            object.__setattr__(self, name, values)
        object.__setattr__(self, "b_vector", b)
        object.__setattr__(self, "metrics", metrics)

    @classmethod
    def from_dict(cls, data: dict) -> "PsiGridConfig":
        return cls(**_known_fields(cls, data))

    def to_dict(self) -> dict:
        return {
            "kind": "psi",
            "psi1_grid": list(self.psi1_grid),
            "psi2_grid": list(self.psi2_grid),
            "b_vector": list(self.b_vector),
            "metrics": list(self.metrics),
        }


def _choices(path: str, values: Any, allowed: Sequence[str]) -> tuple[str, ...]:
    if isinstance(values, str) or not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(path, f"expected a non-empty list drawn from {list(allowed)}")
    for i, v in enumerate(values):
        if v not in allowed:
            raise ConfigError(f"{path}[{i}]", f"unknown value {v!r}; expected one of {list(allowed)}")
    # canonical order keeps row order independent of how the config lists them
    return tuple(a for a in allowed if a in values)


def _known_fields(cls, data: dict) -> dict:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")
    names = set(cls.__dataclass_fields__)
    unknown = sorted(set(data) - names - {"kind"})
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    return {k: v for k, v in data.items() if k in names}


def sweep_config_from_dict(data: dict) -> DeltaSweepConfig | PsiGridConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")
    kind = data.get("kind")
    if kind == "delta":
        return DeltaSweepConfig.from_dict(data)
    if kind == "psi":
        return PsiGridConfig.from_dict(data)
    raise ConfigError("kind", f"expected 'delta' or 'psi', got {kind!r}")


@dataclass(frozen=True)
class SweepRow:
    model: str
    b: tuple[float, ...]
    psi: tuple[float, ...]
    delta: float | None = None
    Q: float | None = None
    P: float | None = None
    gamma: float | Special | None = None
    total_utility: float | None = None
    eta: float | Special | None = None
    Gamma: float | Special | None = None
    beta: float | Special | None = None
    alpha: float | Special | None = None
    status: str = "ok"

    def cells(self) -> dict[str, Any]:
        b = list(self.b) + [None, None]
        psi = list(self.psi) + [None, None]
        return {
            "model": self.model,
            "b1": b[0],
            "b2": b[1],
            "delta": self.delta,
            "psi1": psi[0],
            "psi2": psi[1],
            "Q": self.Q,
            "P": self.P,
            "gamma": self.gamma,
            "total_utility": self.total_utility,
            "eta": self.eta,
            "Gamma": self.Gamma,
            "beta": self.beta,
            "alpha": self.alpha,
            "status": self.status,
        }


def format_number(x: float) -> str:
    text = format(x, ".12g")
    return "0" if text == "-0" else text


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, Special):
        return value.value
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, Special):
        return value.value
    if isinstance(value, float):
        # same precision as the CSV so the two outputs agree
        return float(format_number(value))
    return value


def _model_row(market: Market, model: str, b: tuple, psi: tuple, delta: float | None,
               want: Iterable[str] = METRICS) -> SweepRow:
    want = set(want)
    base = dict(model=model, b=b, psi=psi, delta=delta)
    if model == "centralized":
        sol = centralized.solve_centralized(market)
        return SweepRow(**base, Q=sol.Q_star, P=sol.P, gamma=sol.gamma_C,
                        total_utility=sol.total_utility)
    if model == "cooperative":
        sol = cooperative.solve_cooperative(market)
        if not sol.feasible:
            return SweepRow(**base, status="infeasible")
        P = total_private(market, sol.Q_star)
        return SweepRow(**base, Q=sol.Q_star, P=P, gamma=ratio(sol.Q_star, P),
                        total_utility=sol.total_utility)
    if model == "nash":
        sol = nash.solve_nash(market)
        return SweepRow(
            **base, Q=sol.Q_star, P=math.fsum(sol.p), gamma=sol.gamma_N,
            total_utility=sol.total_utility,
            eta=nash.price_of_anarchy(market) if "eta" in want else None,
            Gamma=nash.utility_ratio_Gamma(market) if "Gamma" in want else None,
        )
    if model == "bargaining":
        sol = bargaining.solve_bargaining(market)
        return SweepRow(
            **base, Q=sol.Q_star, P=math.fsum(sol.p), gamma=sol.gamma_B,
            total_utility=sol.total_utility,
            beta=sol.beta if "beta" in want else None,
            alpha=sol.alpha if "alpha" in want else None,
            status="degenerate" if sol.status == bargaining.DEGENERATE else "ok",
        )
    if model == "benchmark":
        Q = centralized.solve_benchmark(market)
        return SweepRow(**base, Q=Q, P=0.0, gamma=Special.UNDEFINED,
                        total_utility=centralized.benchmark_utility(market))
    raise ConfigError("model", f"unknown model {model!r}")


def _threads() -> int:
    cap = os.environ.get(THREADS_ENV)
    default = os.cpu_count() or 1
    if cap:
        try:
            return max(1, min(default, int(cap)))
        except ValueError:
            raise ConfigError(THREADS_ENV, f"expected an integer, got {cap!r}") from None
    return default


def _run(tasks: list[Callable[[], SweepRow]]) -> list[SweepRow]:
    workers = _threads()
    if workers == 1 or len(tasks) < 2:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map yields in submission order whatever the schedule
        return list(pool.map(lambda task: task(), tasks))


def delta_psi(c: float, N: int, delta: float) -> tuple[float, ...]:
    return tuple(c * n ** (-delta) for n in range(1, N + 1))


def run_delta_sweep(cfg: DeltaSweepConfig) -> list[SweepRow]:
    """One row per (b vector, delta, model), in that nesting order."""
    tasks = []
    for b in cfg.b_vectors:
        for delta in cfg.delta_grid:
            psi = delta_psi(cfg.c, cfg.N, delta)
            market = Market.from_psi(psi, b)
            for model in cfg.models:
                tasks.append(lambda m=market, mo=model, b=b, psi=psi, d=delta: _model_row(m, mo, b, psi, d))
    return _run(tasks)


def run_psi_grid(cfg: PsiGridConfig) -> list[SweepRow]:
    """One row per (psi1, psi2) and per model the requested metrics come from.

    Equilibrium metrics come from ``nash`` rows and bargaining metrics from
    ``bargaining`` rows; ``gamma`` on each row is that model's trade-off.
    """
    models = []
    if any(m in cfg.metrics for m in NASH_METRICS):
        models.append("nash")
    if any(m in cfg.metrics for m in BARGAIN_METRICS):
        models.append("bargaining")
    tasks = []
    for psi1 in cfg.psi1_grid:
        for psi2 in cfg.psi2_grid:
            psi = (psi1, psi2)
            market = Market.from_psi(psi, cfg.b_vector)
            for model in models:
                tasks.append(lambda m=market, mo=model, psi=psi: _model_row(m, mo, cfg.b_vector, psi, None, cfg.metrics))
    return _run(tasks)


def run_config(cfg: DeltaSweepConfig | PsiGridConfig) -> list[SweepRow]:
    if isinstance(cfg, DeltaSweepConfig):
        return run_delta_sweep(cfg)
    return run_psi_grid(cfg)


_B4 = ((1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0))
_B3 = ((1.0, 1.0), (1.0, 2.0), (2.0, 2.0))

PRESETS: dict[str, tuple[DeltaSweepConfig | PsiGridConfig, ...]] = {
    "fig2": (DeltaSweepConfig(N=2, c=2.0, b_vectors=_B4, models=("centralized", "benchmark")),),
    "fig3": (DeltaSweepConfig(N=2, c=7.0, b_vectors=((1.0, 1.0), (2.0, 1.0)),
                              models=("centralized", "cooperative")),),
    "fig45": tuple(PsiGridConfig(b_vector=b, metrics=NASH_METRICS) for b in ((1.0, 1.0), (2.0, 2.0))),
    "fig67": tuple(PsiGridConfig(b_vector=b, metrics=("beta", "gamma_B")) for b in _B3),
    "fig8": tuple(PsiGridConfig(b_vector=b, metrics=("alpha",)) for b in _B3),
}


def run_preset(name: str) -> list[SweepRow]:
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    rows = []
    for cfg in PRESETS[name]:
        rows.extend(run_config(cfg))
    return rows


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        cells = row.cells()
        writer.writerow([_csv_cell(cells[k]) for k in CSV_HEADER])
    return buf.getvalue()


def write_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            fh.write(rows_to_csv(rows))
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV: {exc.strerror}", str(path)) from exc


def rows_to_json(rows: Sequence[SweepRow]) -> list[dict]:
    out = []
    for row in rows:
        record = {k: _json_value(v) for k, v in row.cells().items()}
        record["b"] = list(row.b)
        record["psi"] = [_json_value(x) for x in row.psi]
        out.append(record)
    return out


def write_json(rows: Sequence[SweepRow], path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w") as fh:
            json.dump(rows_to_json(rows), fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write JSON: {exc.strerror}", str(path)) from exc
