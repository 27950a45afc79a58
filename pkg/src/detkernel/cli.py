"""
Command-line front end.

    detkernel gram --fixture A
    detkernel kernel-grid --fixture mixed --n 3 --grid=-1:1:11 --out k.csv
    detkernel verify --suite full --n-max 4
    detkernel rmt --family hermite --n 4 --quantity R1 --grid=-4:4:81
    detkernel --list-fixtures

Reports are JSON (one object, or JSON lines for ``verify``); grids are CSV.
``verify`` exits 1 when any report fails; configuration and budget errors
exit 2 before any integration starts.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .basis import FunctionSet, get_family
from .fixtures import FIXTURES, get_fixture, rule_for
from .kernel import GeneralizedKernel
from .quadrature import DEFAULT_ORACLE_NODES, MAX_GRID_POINTS, MAX_NODES, BudgetError
from . import rmt, theorems

COMMANDS = ("gram", "kernel-grid", "verify", "rmt")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    fixture: str | None = None
    phi: dict | None = None
    psi: dict | None = None
    n: int | None = None
    k: int | None = None
    nodes: int = DEFAULT_ORACLE_NODES
    oracle_nodes: int = DEFAULT_ORACLE_NODES
    grid: str | None = None
    seed: int = 0
    out: str | None = None
    format: str | None = None
    suite: str | None = None
    n_max: int = 4
    family: str = "hermite"
    quantity: str = "R1"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config: expected a JSON object at top level")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError(f"config: unknown field(s) {unknown}")
        if "command" not in d:
            raise ConfigError("config: missing field 'command'")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"config.command: expected one of {COMMANDS}, got {self.command!r}")
        for name in ("nodes", "oracle_nodes"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 1 <= v <= MAX_NODES:
                raise ConfigError(f"config.{name}: expected an integer in 1..{MAX_NODES}")
        if self.oracle_nodes ** theorems.MAX_ORACLE_DIM > MAX_GRID_POINTS:
            raise ConfigError(
                f"config.oracle_nodes: {self.oracle_nodes}^{theorems.MAX_ORACLE_DIM} grid "
                f"points exceed the budget of {MAX_GRID_POINTS}")
        if self.format not in (None, "json", "csv"):
            raise ConfigError("config.format: expected 'json' or 'csv'")
        if self.suite is not None and self.suite not in theorems.SUITES:
            raise ConfigError(f"config.suite: expected one of {theorems.SUITES}")
        if self.fixture is not None and self.fixture not in FIXTURES:
            raise ConfigError(f"config.fixture: unknown fixture {self.fixture!r}")
        if (self.phi is None) != (self.psi is None):
            raise ConfigError("config: 'phi' and 'psi' must be given together")
        if self.grid is not None:
            parse_grid(self.grid)
        if self.quantity not in ("R1", "R2", "Z"):
            raise ConfigError("config.quantity: expected 'R1', 'R2' or 'Z'")


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def parse_grid(text: str) -> np.ndarray:
    try:
        a, b, steps = text.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError:
        raise ConfigError(f"grid: expected 'a:b:steps', got {text!r}") from None
    if steps < 1 or steps > 10_000:
        raise ConfigError("grid: steps must be in 1..10000")
    return np.linspace(a, b, steps)


def _sets(cfg: RunConfig) -> tuple[FunctionSet, FunctionSet, str]:
    if cfg.phi is not None:
        try:
            phi = FunctionSet.from_dict(cfg.phi, "config.phi")
            psi = FunctionSet.from_dict(cfg.psi, "config.psi")
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return phi, psi, "config"
    if cfg.fixture is None:
        raise ConfigError("config: give either 'fixture' or 'phi'/'psi'")
    try:
        phi, psi = get_fixture(cfg.fixture, cfg.n)
    except ValueError as exc:
        raise ConfigError(f"config.n: {exc}") from None
    label = cfg.fixture if cfg.n is None else f"{cfg.fixture}:{cfg.n}"
    return phi, psi, label


def _fmt(v: float) -> str:
    return repr(float(v))


def _table(cfg: RunConfig, header, rows) -> str:
    if cfg.format == "json":
        return "".join(json.dumps(dict(zip(header, map(float, row)))) + "\n" for row in rows)
    return _csv(header, rows)


def _json_only(cfg: RunConfig):
    if cfg.format == "csv":
        raise ConfigError(f"config.format: '{cfg.command}' only emits json")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# -- commands ------------------------------------------------------------------

def cmd_gram(cfg: RunConfig) -> tuple[str, int]:
    _json_only(cfg)
    phi, psi, label = _sets(cfg)
    rule = rule_for(phi, psi, cfg.nodes)
    K = GeneralizedKernel.build(phi, psi, rule)
    doc = {"fixture": label, "nodes": cfg.nodes, "mode": K.mode, **K.gram.to_dict()}
    return json.dumps(doc, sort_keys=True) + "\n", 0


def cmd_kernel_grid(cfg: RunConfig) -> tuple[str, int]:
    phi, psi, _ = _sets(cfg)
    dom = phi.domain
    grid = parse_grid(cfg.grid) if cfg.grid else (
        np.linspace(dom.a, dom.b, 11) if dom.is_finite else np.linspace(-3, 3, 11))
    K = GeneralizedKernel.build(phi, psi, rule_for(phi, psi, cfg.nodes))
    P, Q = np.meshgrid(grid, grid, indexing="ij")
    vals = K(P, Q)
    col = "value" if K.normalized else "C_times_value"
    rows = zip(P.ravel(), Q.ravel(), vals.ravel())
    return _table(cfg, ["p", "q", col], rows), 0


def _verify_reports(cfg: RunConfig) -> list[theorems.TheoremReport]:
    if cfg.suite is not None:
        return theorems.run_suite(cfg.suite, cfg.n_max, cfg.oracle_nodes, cfg.seed)
    phi, psi, label = _sets(cfg)
    rule = rule_for(phi, psi, cfg.oracle_nodes)
    K = GeneralizedKernel.build(phi, psi, rule)
    n = K.n
    ks = [cfg.k] if cfg.k is not None else list(range(max(0, n - theorems.MAX_ORACLE_DIM), n + 1))
    for k in ks:
        if not 0 <= k <= n:
            raise ConfigError(f"config.k: {k} outside 0..{n}")
        if n - k > theorems.MAX_ORACLE_DIM:
            raise ConfigError(f"config.k: n-k = {n - k} exceeds the oracle limit "
                              f"{theorems.MAX_ORACLE_DIM}")
    reports = [theorems.verify_theorem1(K, k, rule=rule, seed=cfg.seed, fixture=label)
               for k in ks]
    if n <= theorems.MAX_ORACLE_DIM:
        reports.append(theorems.verify_andreief(phi, psi, rule, fixture=label))
    for k in range(1, min(n, theorems.MAX_CONTRACTION_K) + 1):
        reports.append(theorems.verify_contraction_k(K, k, rule=rule, seed=cfg.seed,
                                                     fixture=label))
        reports.append(theorems.verify_knorm(K, k, rule=rule, fixture=label))
    return reports


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    _json_only(cfg)
    reports = _verify_reports(cfg)
    text = "".join(r.to_json() + "\n" for r in reports)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"FAIL {r.theorem_id} fixture={r.fixture} n={r.n} k={r.k} "
              f"rel_residual={r.rel_residual:.3e}", file=sys.stderr)
    return text, 1 if failed else 0


def cmd_rmt(cfg: RunConfig) -> tuple[str, int]:
    fam = get_family(cfg.family)
    E = rmt.Ensemble(fam, cfg.n or 4)
    if cfg.quantity == "Z":
        _json_only(cfg)
        doc = {"family": fam.name, "n": E.n,
               "closed_form": rmt.partition_function(E, "closed_form")}
        if E.n <= rmt.MAX_PARTITION_ORACLE_N:
            doc["oracle"] = rmt.partition_function(E, "oracle", cfg.oracle_nodes)
        return json.dumps(doc, sort_keys=True) + "\n", 0
    dom = fam.domain
    default = (dom.a, dom.b) if dom.is_finite else ((0.0, 10.0) if dom.a == 0 else (-4.0, 4.0))
    grid = parse_grid(cfg.grid) if cfg.grid else np.linspace(*default, 41)
    if cfg.quantity == "R1":
        return _table(cfg, ["x", "R1"], ((x, rmt.correlation_Rk(E, [x])) for x in grid)), 0
    if E.n < 2:
        raise ConfigError("config.n: R2 needs n >= 2")
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    vals = rmt.correlation_Rk(E, np.stack([X.ravel(), Y.ravel()], axis=-1))
    return _table(cfg, ["x", "y", "R2"], zip(X.ravel(), Y.ravel(), vals)), 0


HANDLERS = {"gram": cmd_gram, "kernel-grid": cmd_kernel_grid,
            "verify": cmd_verify, "rmt": cmd_rmt}


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute a validated config; returns the payload text and exit status."""
    cfg.validate()
    return HANDLERS[cfg.command](cfg)


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detkernel", description=__doc__.split("\n")[1])
    parser.add_argument("--list-fixtures", action="store_true",
                        help="list the built-in function-set fixtures and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config mirroring RunConfig fields")
        p.add_argument("--fixture")
        p.add_argument("--n", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--nodes", type=int, help="Gauss nodes for overlap integrals")
        p.add_argument("--oracle-nodes", type=int, help="Gauss nodes per oracle axis")
        p.add_argument("--grid", help="evaluation grid 'a:b:steps'")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"))
        if name == "verify":
            p.add_argument("--suite", choices=theorems.SUITES)
            p.add_argument("--n-max", type=int)
        if name == "rmt":
            p.add_argument("--family", choices=("hermite", "legendre", "laguerre"))
            p.add_argument("--quantity", choices=("R1", "R2", "Z"))
    return parser


def config_from_args(args) -> RunConfig:
    base = load_config(args.config) if args.config else {}
    if not isinstance(base, dict):
        raise ConfigError(f"{args.config}: expected a JSON object at top level")
    base.setdefault("command", args.command)
    if base["command"] != args.command:
        raise ConfigError(f"config.command {base['command']!r} conflicts with "
                          f"subcommand {args.command!r}")
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "command":
            base[f.name] = v
    return RunConfig.from_dict(base)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_fixtures:
        for fx in FIXTURES.values():
            sizes = ",".join(map(str, fx.sizes))
            print(f"{fx.name}\tn={sizes}\t{fx.description}")
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = config_from_args(args)
        text, status = run(cfg)
    except (ConfigError, BudgetError) as exc:
        print(f"detkernel: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # e.g. a function set whose weight has no matching default rule
        print(f"detkernel: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
