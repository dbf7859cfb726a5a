"""Command-line harness: ``tau2loop verify | gen | drinfeld | spectrum | decompose | report``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .checks import FAIL, PASS, SKIP, CheckResult, failed, skipped
from .loop_algebra import (
    GEN_LABELS,
    Workspace,
    check_adq_eigen,
    check_adq_identities,
    check_comm_full,
    check_comm_sector,
    check_divided_power_oracle,
    check_lambda,
    lambda_coefficients,
    verify_highest_weight,
    verify_induction_and_finiteness,
    verify_partial_serre,
    verify_serre,
)
from .sl2_decomp import DEFAULT_TOL, SPECTRUM_MAX_DIM, DecompositionError, decompose, drinfeld_roots, spectrum
from .state_space import LatticeConfig
from .transfer_ops import (
    check_boundary_coefficients,
    check_charge_grading,
    check_ground_eigenvalues,
    fourier_consistency,
)

log = logging.getLogger("tau2loop")

SCHEMA = 1
FOURIER_MAX_DIM = 3000
DEFAULT_T = (0.5, 0.3 + 0.2j)


class UsageError(Exception):
    """Bad arguments that argparse cannot catch; exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    N: int
    L: int
    Q: tuple[int, ...] = (0,)
    checks: tuple[str, ...] = ("all",)
    seed: int = 0
    samples: int = 100
    tol: float = DEFAULT_TOL
    t: tuple[complex, ...] = DEFAULT_T
    cache_dir: str | None = None
    out: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        LatticeConfig(self.N, self.L)  # validates N, L
        for q in self.Q:
            if not 0 <= q < self.N:
                raise UsageError(f"Q={q} outside 0..{self.N - 1}")
        if self.samples < 1:
            raise UsageError("--samples must be positive")
        if self.workers < 1:
            raise UsageError("--workers must be positive")

    @property
    def lattice(self) -> LatticeConfig:
        return LatticeConfig(self.N, self.L, 0)

    def to_json(self) -> dict:
        d = asdict(self)
        d["Q"] = list(self.Q)
        d["checks"] = list(self.checks)
        d["t"] = [[complex(t).real, complex(t).imag] for t in self.t]
        d.pop("workers")
        d.pop("out")
        return d


class RunContext:
    """Workspace and settings shared by the check groups of one run."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.lattice = config.lattice
        self._ws: Workspace | None = None

    @property
    def ws(self) -> Workspace:
        if self._ws is None:
            self._ws = Workspace(self.lattice, self.config.cache_dir)
        return self._ws

    @property
    def nonzero_Q(self) -> list[int]:
        qs = [q for q in self.config.Q if q != 0]
        return qs or list(range(1, self.config.N))


def _needs_loop(ids: Sequence[str], fn: Callable[[RunContext], list[CheckResult]]):
    def run(ctx: RunContext) -> list[CheckResult]:
        if not ctx.lattice.loop_ok:
            params = {"N": ctx.lattice.N, "L": ctx.lattice.L}
            return [skipped(i, params, "L not multiple of N") for i in ids]
        return fn(ctx)

    return run


def _fourier(ctx: RunContext) -> list[CheckResult]:
    cfg = ctx.lattice
    if cfg.dim > FOURIER_MAX_DIM:
        return [skipped("fourier.consistency", {"N": cfg.N, "L": cfg.L}, f"N^L > {FOURIER_MAX_DIM}")]
    return [fourier_consistency(cfg, FOURIER_MAX_DIM)]


def _partial_serre(ctx: RunContext) -> list[CheckResult]:
    return [verify_partial_serre(ctx.lattice, n, ctx.ws) for n in range(1, ctx.lattice.r + 1)]


def _l_independence(ctx: RunContext) -> list[CheckResult]:
    g = ctx.ws.extended(ctx.lattice.r + 1)
    return [c for c in g.checks if c.id == "loop.l_independence"][-1:]


def _sl2(ctx: RunContext) -> list[CheckResult]:
    cfg = ctx.lattice
    params = {"N": cfg.N, "L": cfg.L, "tol": ctx.config.tol}
    ids = ("sl2.relations", "sl2.nilpotency", "sl2.eigenspace")
    try:
        out = decompose(cfg, ctx.config.tol, ctx.ws, ctx.config.t)
    except DecompositionError as exc:
        return [failed(i, params, {"error": str(exc)}) for i in ids]
    return out.checks


def _adq_full(corrected: bool) -> Callable[[RunContext], list[CheckResult]]:
    def run(ctx: RunContext) -> list[CheckResult]:
        return [check_adq_identities(ctx.lattice, m, ctx.ws, corrected) for m in range(1, ctx.lattice.N)]

    return run


@dataclass(frozen=True)
class CheckGroup:
    name: str
    ids: tuple[str, ...]
    run: Callable[[RunContext], list[CheckResult]]


# ordered from cheapest to costliest
GROUPS: tuple[CheckGroup, ...] = (
    CheckGroup("lambda", ("lambda.tables",), _needs_loop(("lambda.tables",), lambda c: [check_lambda(c.lattice)])),
    CheckGroup("oracle", ("divided_power.oracle",), lambda c: [check_divided_power_oracle(c.lattice)]),
    CheckGroup("boundary", ("boundary.closed_forms",), lambda c: [check_boundary_coefficients(c.lattice, c.ws.blocks)]),
    CheckGroup("grading", ("monodromy.charge_grading",), lambda c: [check_charge_grading(c.lattice, c.ws.blocks)]),
    CheckGroup(
        "eigen",
        ("tau2.eigen",),
        lambda c: [check_ground_eigenvalues(c.lattice.with_Q(q), c.ws.blocks) for q in c.config.Q],
    ),
    CheckGroup("fourier", ("fourier.consistency",), _fourier),
    CheckGroup("h0", ("h0.consistency",), _needs_loop(("h0.consistency",), lambda c: list(c.ws.gens.checks[:1]))),
    CheckGroup("partial", ("serre.partial",), _needs_loop(("serre.partial",), _partial_serre)),
    CheckGroup("highest", ("highest_weight",), lambda c: [verify_highest_weight(c.lattice, c.ws)]),
    CheckGroup("comm_sector", ("comm.sector",), lambda c: [check_comm_sector(c.lattice, c.ws)]),
    CheckGroup("comm_full", ("comm.full",), lambda c: [check_comm_full(c.lattice, c.ws)]),
    CheckGroup("comm_full_fix", ("comm.full.sign_corrected",), lambda c: [check_comm_full(c.lattice, c.ws, corrected=True)]),
    CheckGroup("adq_eigen", ("adq.eigen",), lambda c: [check_adq_eigen(c.lattice, q, c.ws) for q in c.nonzero_Q]),
    CheckGroup("adq_full", ("adq.full",), _adq_full(False)),
    CheckGroup("adq_full_fix", ("adq.full.sign_corrected",), _adq_full(True)),
    CheckGroup("serre_exh", ("serre.q0.exhaustive",), lambda c: [verify_serre(c.lattice, ws=c.ws if c.lattice.loop_ok else None)]),
    CheckGroup(
        "serre_sampled",
        ("serre.q0.sampled",),
        lambda c: [verify_serre(c.lattice, c.config.samples, c.config.seed, c.ws if c.lattice.loop_ok else None)],
    ),
    CheckGroup("l_indep", ("loop.l_independence",), _needs_loop(("loop.l_independence",), _l_independence)),
    CheckGroup(
        "finite",
        ("xpm.induction", "finite.xminus", "finite.xplus", "finite.descendants"),
        lambda c: verify_induction_and_finiteness(c.lattice, c.ws if c.lattice.loop_ok else None),
    ),
    CheckGroup(
        "sl2",
        ("sl2.relations", "sl2.nilpotency", "sl2.eigenspace"),
        _needs_loop(("sl2.relations", "sl2.nilpotency", "sl2.eigenspace"), _sl2),
    ),
)

CHECK_IDS: tuple[str, ...] = tuple(i for g in GROUPS for i in g.ids)


def resolve_checks(requested: Sequence[str]) -> tuple[str, ...]:
    """Expand ``all`` and validate ids; raises UsageError listing the available ids."""
    out: list[str] = []
    for item in requested:
        for cid in (s.strip() for s in item.split(",")):
            if not cid:
                continue
            if cid == "all":
                out.extend(CHECK_IDS)
            elif cid in CHECK_IDS:
                out.append(cid)
            else:
                raise UsageError(f"unknown check id {cid!r}; available: {', '.join(CHECK_IDS)}")
    return tuple(dict.fromkeys(out))


def _run_groups(config: RunConfig, names: Sequence[str]) -> list[CheckResult]:
    ctx = RunContext(config)
    wanted = set(resolve_checks(config.checks))
    results: list[CheckResult] = []
    for g in GROUPS:
        if g.name in names:
            log.info("running %s", g.name)
            results.extend(r for r in g.run(ctx) if r.id in wanted)
    return results


def _sort_key(r: CheckResult) -> tuple[str, str]:
    return r.id, json.dumps(r.params, sort_keys=True)


def run(config: RunConfig) -> dict:
    """Execute the requested checks and return the report document."""
    t0 = time.perf_counter()
    wanted = set(resolve_checks(config.checks))
    groups = [g.name for g in GROUPS if wanted & set(g.ids)]
    if config.workers > 1 and len(groups) > 1:
        # each worker builds its own workspace; the operator cache is shared on disk
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = pool.map(_run_groups, [config] * len(groups), [[g] for g in groups])
            results = [r for chunk in chunks for r in chunk]
    else:
        results = _run_groups(config, groups)
    results.sort(key=_sort_key)
    summary = {s: sum(r.status == s for r in results) for s in (PASS, FAIL, SKIP)}
    return {
        "schema": SCHEMA,
        "version": __version__,
        "config": config.to_json(),
        "checks": [r.to_json() for r in results],
        "summary": summary,
        "wall_clock_s": round(time.perf_counter() - t0, 3),
    }


def exit_status(report: dict) -> int:
    return 1 if report["summary"].get(FAIL, 0) else 0


def format_report(report: dict) -> str:
    lines = []
    for c in report["checks"]:
        params = " ".join(f"{k}={v}" for k, v in c["params"].items())
        line = f"{c['status'].upper():4}  {c['id']:<26} {params}  ({c['elapsed_ms'] / 1000:.2f}s)"
        if c["status"] != PASS and "witness" in c:
            line += "\n      " + json.dumps(c["witness"], sort_keys=True)
        lines.append(line)
    s = report["summary"]
    lines.append(f"summary: {s[PASS]} pass, {s[FAIL]} fail, {s[SKIP]} skip  [tau2loop {report.get('version', '?')}]")
    return "\n".join(lines)


def _write_json(path: str, doc: dict) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")


# argument handling

def parse_t(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _common(p: argparse.ArgumentParser, checks: bool = False) -> None:
    p.add_argument("--N", type=int, required=True, help="number of spin states, N >= 2")
    p.add_argument("--L", type=int, required=True, help="number of sites")
    p.add_argument("--Q", type=int, action="append", help="charge sector (repeatable, default 0)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numeric tolerance (default 1e-9)")
    p.add_argument("--t", type=parse_t, action="append", help="spectral sample t*, e.g. 0.5 or 0.3+0.2i (repeatable)")
    p.add_argument("--cache-dir", help="directory for cached exact operators")
    p.add_argument("--out", help="output file (JSON report or CSV)")
    if checks:
        p.add_argument("--check", action="append", help="check id, comma list or 'all' (repeatable)")
        p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
        p.add_argument("--samples", type=int, default=100, help="sampled Serre states (default 100)")
        p.add_argument("--workers", type=int, default=1, help="parallel check groups")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tau2loop", description=__doc__)
    parser.add_argument("--version", action="version", version=f"tau2loop {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("verify", help="run exact and numeric checks")
    _common(p, checks=True)
    p = sub.add_parser("gen", help="build and cache the base generators")
    _common(p)
    p = sub.add_parser("drinfeld", help="print the Lambda coefficients and Drinfeld roots")
    _common(p)
    p = sub.add_parser("spectrum", help="dense spectrum of tau_2(t*) on the charge-0 sector as CSV")
    _common(p)
    p = sub.add_parser("decompose", help="sl2 decomposition and its checks")
    _common(p)
    p = sub.add_parser("report", help="pretty-print a stored JSON report")
    p.add_argument("path")
    sub.add_parser("checks", help="list check ids in run order")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    try:
        return RunConfig(
            N=args.N,
            L=args.L,
            Q=tuple(args.Q or (0,)),
            checks=tuple(getattr(args, "check", None) or ("all",)),
            seed=getattr(args, "seed", 0),
            samples=getattr(args, "samples", 100),
            tol=args.tol,
            t=tuple(args.t or DEFAULT_T),
            cache_dir=args.cache_dir,
            out=args.out,
            workers=getattr(args, "workers", 1),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    resolve_checks(cfg.checks)
    report = run(cfg)
    print(format_report(report))
    if cfg.out:
        _write_json(cfg.out, report)
    return exit_status(report)


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    lat = cfg.lattice
    if not lat.loop_ok:
        raise UsageError("L not multiple of N")
    cache = cfg.cache_dir or ".tau2loop-cache"
    ws = Workspace(lat, cache)
    for label in GEN_LABELS:
        op = ws.dp(label, 1)
        print(f"{label}_1  shape={op.shape[0]}x{op.shape[1]}  nnz={op.nnz}")
    print(f"cache: {Path(cache).resolve()}")
    return 0


def cmd_drinfeld(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    if not cfg.lattice.loop_ok:
        raise UsageError("L not multiple of N")
    data = lambda_coefficients(cfg.lattice)
    print(" ".join(str(x) for x in data.lambdas))
    roots = drinfeld_roots(data, cfg.tol)
    for z in roots.roots:
        print(f"{z.real:.15g} {z.imag:+.15g}i")
    print(f"# residual {roots.residual:.3e}  separation {roots.separation:.6g}", file=sys.stderr)
    return 0


def cmd_spectrum(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    lat = cfg.lattice
    if lat.dim > SPECTRUM_MAX_DIM:
        raise UsageError(f"dense spectrum limited to N^L <= {SPECTRUM_MAX_DIM}")
    ws = Workspace(lat, cfg.cache_dir)
    chunks = []
    for t in cfg.t if args.t else (0.5,):
        for q in cfg.Q:
            table = spectrum(lat, t, q, cfg.tol, ws=ws)
            body = table.to_csv()
            chunks.append(body if not chunks else body.split("\n", 1)[1])
            tg = table.target
            print(
                f"# t={t} Q={q} eps=({tg.eigenvalue.real:.12g}{tg.eigenvalue.imag:+.12g}i) multiplicity={tg.multiplicity}",
                file=sys.stderr,
            )
    text = "".join(chunks)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    if not cfg.lattice.loop_ok:
        raise UsageError("L not multiple of N")
    report = run(RunConfig(**{**asdict(cfg), "checks": ("sl2.relations", "sl2.nilpotency", "sl2.eigenspace")}))
    roots = drinfeld_roots(lambda_coefficients(cfg.lattice), cfg.tol)
    print("roots: " + "  ".join(f"{z.real:.12g}{z.imag:+.12g}i" for z in roots.roots))
    print(format_report(report))
    if cfg.out:
        _write_json(cfg.out, report)
    return exit_status(report)


def cmd_report(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read report: {exc}") from None
    if doc.get("schema") != SCHEMA:
        raise UsageError(f"unsupported report schema {doc.get('schema')!r}")
    c = doc.get("config", {})
    print(f"N={c.get('N')} L={c.get('L')} Q={c.get('Q')} seed={c.get('seed')} samples={c.get('samples')}")
    print(format_report(doc))
    return 0


def cmd_checks(args: argparse.Namespace) -> int:
    print("\n".join(CHECK_IDS))
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "gen": cmd_gen,
    "drinfeld": cmd_drinfeld,
    "spectrum": cmd_spectrum,
    "decompose": cmd_decompose,
    "report": cmd_report,
    "checks": cmd_checks,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"tau2loop: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
