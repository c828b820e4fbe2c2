"""Command-line front end: ``invest-eq solve|sweep|verify``.

Exit codes: 0 success, 1 verification failure or internal error,
2 configuration error, 3 infeasible or degenerate outcome (the solution
document is still printed).  CP labels in output are 1-based.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from . import bargaining, centralized, cooperative, experiments, nash, verify
from .errors import ConfigError
from .model import CpParams, Market, Special, gross_value, p_star, ratio, total_private

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_EMPTY = 3

SOLVE_MODELS = ("centralized", "cooperative", "nash", "bargaining", "benchmark")
FORMATS = ("csv", "json")


@dataclass
class RunConfig:
    """Everything a ``solve`` or ``sweep`` run needs; serialized as JSON."""

    market: list[dict] | None = None
    model: str | None = None
    tol: float = 1e-10
    epsilon: float = 1e-6
    out: str | None = None
    format: str | None = None
    preset: str | None = None
    sweep: dict | None = None

    def validate(self, command: str) -> None:
        for name in ("tol", "epsilon"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0 or not math.isfinite(value):
                raise ConfigError(name, f"must be a positive number, got {value!r}")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError("format", f"expected one of {list(FORMATS)}, got {self.format!r}")
        sources = [k for k in ("market", "preset", "sweep") if getattr(self, k) is not None]
        if len(sources) != 1:
            raise ConfigError("market", f"exactly one of market, preset or sweep must be given, got {sources or 'none'}")
        if command == "solve":
            if self.market is None:
                raise ConfigError("market", "solve needs a market (--psi or --r/--a)")
            if self.model not in SOLVE_MODELS:
                raise ConfigError("model", f"expected one of {list(SOLVE_MODELS)}, got {self.model!r}")
            build_market(self.market)
        else:
            if self.market is not None:
                raise ConfigError("market", "sweep takes a preset or a sweep config, not a market")
            if self.preset is not None and self.preset not in experiments.PRESETS:
                raise ConfigError("preset", f"unknown preset {self.preset!r}; expected one of {sorted(experiments.PRESETS)}")
            if self.sweep is not None:
                experiments.sweep_config_from_dict(self.sweep)

    def to_dict(self) -> dict:
        out = {
            "market": self.market,
            "model": self.model,
            "tol": self.tol,
            "epsilon": self.epsilon,
            "out": self.out,
            "format": self.format,
            "preset": self.preset,
            "sweep": self.sweep,
        }
        return {k: v for k, v in out.items() if v is not None}

    @classmethod
    def from_dict(cls, data: Any) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "expected a JSON object")
        if "kind" in data:
            # a bare sweep config file
            return cls(sweep=data)
        known = {"market", "model", "tol", "epsilon", "out", "format", "preset", "sweep"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        return cls(**data)


def build_market(spec: Any) -> Market:
    """Market from a list of ``{"psi", "b"}`` or ``{"r", "a", "b"}`` objects."""
    if not isinstance(spec, list) or not spec:
        raise ConfigError("market", "expected a non-empty list of CPs")
    cps = []
    for i, entry in enumerate(spec):
        path = f"market[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(path, "expected an object with psi or r/a")
        unknown = sorted(set(entry) - {"psi", "r", "a", "b"})
        if unknown:
            raise ConfigError(f"{path}.{unknown[0]}", "unknown field")
        for key, value in entry.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
        b = entry.get("b", 1.0)
        try:
            if "psi" in entry:
                if "r" in entry or "a" in entry:
                    raise ConfigError(path, "give either psi or r/a, not both")
                cps.append(CpParams.from_psi(entry["psi"], b))
            elif "r" in entry and "a" in entry:
                cps.append(CpParams(entry["r"], entry["a"], b))
            else:
                raise ConfigError(path, "needs psi, or both r and a")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from None
    try:
        return Market(tuple(cps))
    except ValueError as exc:
        raise ConfigError("market", str(exc)) from None


def _floats(name: str, text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(name, f"expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(x) for x in values):
        raise ConfigError(name, f"expected finite numbers, got {text!r}")
    return values


def _market_from_flags(args, base: list[dict] | None) -> list[dict] | None:
    psi = _floats("psi", args.psi)
    r = _floats("r", args.r)
    a = _floats("a", args.a)
    b = _floats("b", args.b)
    if psi is not None and (r is not None or a is not None):
        raise ConfigError("psi", "give either --psi or --r/--a, not both")
    if psi is not None:
        cps = [{"psi": x} for x in psi]
    elif r is not None or a is not None:
        if r is None or a is None:
            raise ConfigError("r" if r is None else "a", "--r and --a must be given together")
        if len(r) != len(a):
            raise ConfigError("a", f"--r has {len(r)} entries but --a has {len(a)}")
        cps = [{"r": x, "a": y} for x, y in zip(r, a)]
    elif base is not None:
        cps = [dict(cp) for cp in base]
    else:
        if b is not None:
            raise ConfigError("b", "--b needs --psi or --r/--a")
        return None
    if b is not None:
        if len(b) != len(cps):
            raise ConfigError("b", f"expected {len(cps)} entries, got {len(b)}")
        for cp, x in zip(cps, b):
            cp["b"] = x
    return cps


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc}") from None
    return RunConfig.from_dict(data)


def resolve_config(args, command: str) -> RunConfig:
    """File values first, then any flags given on the command line."""
    cfg = load_config(args.config)
    if command == "solve":
        cfg.market = _market_from_flags(args, cfg.market)
        if args.model is not None:
            cfg.model = args.model
        if args.epsilon is not None:
            cfg.epsilon = args.epsilon
    else:
        if args.preset is not None:
            cfg.preset, cfg.sweep = args.preset, None
    if args.tol is not None:
        cfg.tol = args.tol
    if args.out is not None:
        cfg.out = args.out
    if args.format is not None:
        cfg.format = args.format
    cfg.validate(command)
    return cfg


def _plain(value: Any) -> Any:
    if isinstance(value, Special):
        return value.value
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def solve_document(cfg: RunConfig) -> tuple[dict, int]:
    market = build_market(cfg.market)
    doc: dict[str, Any] = {"model": cfg.model, "N": len(market)}
    code = EXIT_OK
    if cfg.model == "centralized":
        sol = centralized.solve_centralized(market, tol=cfg.tol)
        doc.update(status="ok", Q=sol.Q_star, q=None, p=sol.p, utilities=None,
                   total_utility=sol.total_utility, gamma=sol.gamma_C, is_interior=sol.is_interior)
    elif cfg.model == "cooperative":
        sol = cooperative.solve_cooperative(market, epsilon=cfg.epsilon, tol=cfg.tol)
        binding = [{"cp": n + 1, "deviation": sorted(i + 1 for i in I)} for n, I in sol.binding_constraints]
        if sol.feasible:
            P = total_private(market, sol.Q_star)
            utilities = tuple(gross_value(cp, sol.Q_star) - x for cp, x in zip(market, sol.q))
            doc.update(status="ok", Q=sol.Q_star, q=sol.q,
                       p=tuple(p_star(cp, sol.Q_star) for cp in market),
                       utilities=utilities, total_utility=sol.total_utility, gamma=ratio(sol.Q_star, P))
        else:
            doc.update(status="infeasible", Q=None, q=None, p=None, utilities=None,
                       total_utility=None, gamma=None)
            code = EXIT_EMPTY
        doc.update(caps=sol.caps, binding_constraints=binding)
    elif cfg.model == "nash":
        sol = nash.solve_nash(market)
        doc.update(status="ok", Q=sol.Q_star, q=sol.q, p=sol.p, utilities=sol.utilities,
                   total_utility=sol.total_utility, gamma=sol.gamma_N,
                   M=[n + 1 for n in sol.M],
                   eta=nash.price_of_anarchy(market), Gamma=nash.utility_ratio_Gamma(market))
    elif cfg.model == "bargaining":
        sol = bargaining.solve_bargaining(market, tol=cfg.tol)
        degenerate = sol.status == bargaining.DEGENERATE
        doc.update(status="degenerate" if degenerate else "ok", Q=sol.Q_star, q=sol.q, p=sol.p,
                   utilities=sol.utilities, disagreement=sol.disagreement,
                   total_utility=sol.total_utility, gamma=sol.gamma_B,
                   beta=sol.beta, alpha=sol.alpha, interior=sol.interior)
        if degenerate:
            code = EXIT_EMPTY
    else:
        Q = centralized.solve_benchmark(market)
        doc.update(status="ok", Q=Q, q=None, p=[0.0] * len(market), utilities=None,
                   total_utility=centralized.benchmark_utility(market), gamma=ratio(Q, 0.0))
    return {k: _plain(v) for k, v in doc.items()}, code


def cmd_solve(args) -> int:
    cfg = resolve_config(args, "solve")
    if args.dump_config:
        print(json.dumps(cfg.to_dict(), indent=2))
        return EXIT_OK
    doc, code = solve_document(cfg)
    text = json.dumps(doc, indent=2)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    print(text)
    return code


def cmd_sweep(args) -> int:
    cfg = resolve_config(args, "sweep")
    if args.dump_config:
        print(json.dumps(cfg.to_dict(), indent=2))
        return EXIT_OK
    if cfg.preset is not None:
        rows = experiments.run_preset(cfg.preset)
    else:
        rows = experiments.run_config(experiments.sweep_config_from_dict(cfg.sweep))
    fmt = cfg.format or ("json" if cfg.out and cfg.out.endswith(".json") else "csv")
    if cfg.out is None:
        if fmt == "json":
            json.dump(experiments.rows_to_json(rows), sys.stdout, indent=1)
            print()
        else:
            sys.stdout.write(experiments.rows_to_csv(rows))
        print(f"{len(rows)} rows", file=sys.stderr)
        return EXIT_OK
    if fmt == "json":
        experiments.write_json(rows, cfg.out)
    else:
        experiments.write_csv(rows, cfg.out)
    print(f"wrote {len(rows)} rows to {cfg.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.random < 0:
        raise ConfigError("random", f"must be >= 0, got {args.random}")
    ok = verify.run_verification(seed=args.seed, n_random=args.random)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invest-eq", description="Public and private CP investment under a neutral ISP.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one market under one model")
    solve.add_argument("--model", choices=SOLVE_MODELS)
    solve.add_argument("--psi", help="comma-separated psi values (r=psi, a=1)")
    solve.add_argument("--r", help="comma-separated revenue rates")
    solve.add_argument("--a", help="comma-separated traffic scales")
    solve.add_argument("--b", help="comma-separated private efficiencies (default 1)")
    solve.add_argument("--epsilon", type=float, help="minimum public share in the cooperative game (default 1e-6)")
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", help="run a figure preset or a custom sweep config")
    sweep.add_argument("--preset", help=f"one of {', '.join(sorted(experiments.PRESETS))}")
    sweep.set_defaults(func=cmd_sweep)

    for p in (solve, sweep):
        p.add_argument("--config", help="JSON run config; flags override its values")
        p.add_argument("--tol", type=float, help="solver tolerance (default 1e-10)")
        p.add_argument("--out", help="output path")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")

    check = sub.add_parser("verify", help="cross-check the solvers against brute-force oracles")
    check.add_argument("--seed", type=int, default=42)
    check.add_argument("--random", type=int, default=50, help="number of random two-CP markets")
    check.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
