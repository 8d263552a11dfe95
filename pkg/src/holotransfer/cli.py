"""Command-line front end.

Tasks and their CSV columns::

    correlation-decay  n,index,re,im,abs,difference,bound
    spectrum           n,index,re,im,abs,difference,bound
    ellipse-search     R_star,r_star,ratio,samples
    lyapunov           n,lyapunov,difference
    ifs-integral       n,re,im,difference
    ifs-lyapunov       n,lyapunov,difference
    chaos-game         steps,seed,estimate

``index`` is 1-based (1 is the leading eigenvalue). ``difference`` is the
distance to the previous row; ``bound`` is ``(r/R)**n`` when the config
declares ``r``. Errors exit with 2 (config), 3 (validation) or 4 (numerical)
and print a one-line JSON record on stderr.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from holotransfer import apps
from holotransfer.config import build_problem, load_config
from holotransfer.errors import ConfigError, HolotransferError
from holotransfer.geometry import DEFAULT_SAMPLES, contraction_search, default_R_grid

log = logging.getLogger(__name__)

TASKS = {
    "correlation-decay": ("ellipse_system",),
    "spectrum": ("ellipse_system", "circle_system"),
    "ellipse-search": ("ellipse_system", "random_matrices", "ifs"),
    "lyapunov": ("random_matrices",),
    "ifs-integral": ("ifs",),
    "ifs-lyapunov": ("ifs",),
    "chaos-game": ("ifs",),
}

N_TASKS = {"correlation-decay", "spectrum", "lyapunov", "ifs-integral", "ifs-lyapunov"}


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def parse_range(text: str) -> list[int]:
    try:
        lo, hi, step = (int(v) for v in text.split(":"))
    except ValueError:
        raise ConfigError(f"--n-range expects MIN:MAX:STEP, got {text!r}") from None
    if step < 1 or lo < 1 or hi < lo:
        raise ConfigError(f"invalid n range {text!r}")
    return list(range(lo, hi + 1, step))


def _eigen_rows(problem, n_list, index):
    obj = problem.obj
    ratio = obj.r / obj.R if getattr(obj, "r", None) is not None else None
    rows, prev = [], None
    for n in n_list:
        values = apps.spectrum(obj, n).eigenvalues
        if index > len(values):
            raise ConfigError(f"eigenvalue index {index} exceeds matrix size {len(values)} at n = {n}")
        lam = complex(values[index - 1])
        diff = None if prev is None else abs(lam - prev)
        rows.append([n, index, lam.real, lam.imag, abs(lam), diff, None if ratio is None else ratio**n])
        prev = lam
    return ["n", "index", "re", "im", "abs", "difference", "bound"], rows


def _scalar_rows(fn, n_list, head):
    rows, prev = [], None
    for n in n_list:
        v = fn(n)
        diff = None if prev is None else abs(v - prev)
        if isinstance(v, complex):
            rows.append([n, v.real, v.imag, diff])
        else:
            rows.append([n, v, diff])
        prev = v
    return head, rows


def run_task(problem, task: str, run: dict) -> tuple[list[str], list[list]]:
    if problem.kind not in TASKS[task]:
        raise ConfigError(f"task {task!r} does not apply to a {problem.kind} config")
    obj = problem.obj
    n_list = run.get("n_list")
    if task in N_TASKS and not n_list:
        raise ConfigError(f"task {task!r} needs --n or --n-range")
    if task == "correlation-decay":
        return _eigen_rows(problem, n_list, 2)
    if task == "spectrum":
        return _eigen_rows(problem, n_list, run.get("eigen_index") or 1)
    if task == "lyapunov":
        return _scalar_rows(lambda n: apps.lyapunov_matrices(obj, n), n_list, ["n", "lyapunov", "difference"])
    if task == "ifs-integral":
        if obj.observable is None:
            raise ConfigError("ifs-integral needs an 'observable' in the config")
        return _scalar_rows(lambda n: apps.ifs_integral(obj, n), n_list, ["n", "re", "im", "difference"])
    if task == "ifs-lyapunov":
        return _scalar_rows(lambda n: apps.ifs_lyapunov(obj, n), n_list, ["n", "lyapunov", "difference"])
    if task == "ellipse-search":
        samples = run.get("samples") or DEFAULT_SAMPLES
        admissible = obj._weights_positive if problem.kind == "random_matrices" else None
        grid = default_R_grid(*apps.SEARCH_RANGE, apps.SEARCH_POINTS)
        rep = contraction_search(obj.maps, obj.foci, grid, samples, admissible)
        return ["R_star", "r_star", "ratio", "samples"], [[rep.R_star, rep.r_star, rep.ratio, rep.samples_per_boundary]]
    if task == "chaos-game":
        if obj.observable is None:
            raise ConfigError("chaos-game needs an 'observable' in the config")
        steps = int(run.get("steps") or 200_000)
        seed = int(run.get("seed") or 0)
        est = apps.chaos_game(obj, obj.observable, steps, seed)
        return ["steps", "seed", "estimate"], [[steps, seed, est]]
    raise ConfigError(f"unknown task {task!r}")


def render_csv(head, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(head)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holotransfer", description="Spectral data of holomorphic transfer operators.")
    p.add_argument("--config", required=True, help="JSON problem description")
    p.add_argument("--task", choices=sorted(TASKS), help="defaults to the config's run.task")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, help="single truncation size")
    g.add_argument("--n-range", help="MIN:MAX:STEP, inclusive")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--format", choices=["csv", "json"], default="csv", help="json also writes a .json mirror next to --out")
    p.add_argument("--eigen-index", type=int, help="1-based eigenvalue index for the spectrum task")
    p.add_argument("--samples", type=int, help=f"boundary samples for geometry checks (default {DEFAULT_SAMPLES})")
    p.add_argument("--seed", type=int, help="seed for the chaos-game task")
    p.add_argument("--steps", type=int, help="iterations for the chaos-game task")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


RUN_KEYS = {"task", "n_list", "eigen_index", "samples", "seed", "steps"}


def resolve_run(args, cfg: dict) -> dict:
    """Merge command-line flags over the config's ``run`` section."""
    run = cfg.get("run") or {}
    if not isinstance(run, dict):
        raise ConfigError("'run' must be an object")
    unknown = set(run) - RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown 'run' entries {sorted(unknown)}; allowed: {sorted(RUN_KEYS)}")
    run = dict(run)
    if args.task:
        run["task"] = args.task
    if args.n is not None:
        run["n_list"] = [args.n]
    elif args.n_range:
        run["n_list"] = parse_range(args.n_range)
    for key in ("eigen_index", "samples", "seed", "steps"):
        v = getattr(args, key)
        if v is not None:
            run[key] = v
    if "task" not in run:
        raise ConfigError("no task given (use --task or a 'run.task' entry)")
    if run["task"] not in TASKS:
        raise ConfigError(f"unknown task {run['task']!r}")
    if run.get("n_list") is not None:
        n_list = run["n_list"]
        if not isinstance(n_list, list) or not all(isinstance(n, int) and n >= 1 for n in n_list):
            raise ConfigError("n_list must be a list of positive integers")
    if run.get("eigen_index") is not None and run["eigen_index"] < 1:
        raise ConfigError("--eigen-index is 1-based")
    if run.get("samples") is not None and run["samples"] < 64:
        raise ConfigError("--samples must be at least 64")
    return run


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        run = resolve_run(args, cfg)
        problem = build_problem(cfg, run.get("samples") or DEFAULT_SAMPLES)
        head, rows = run_task(problem, run["task"], run)
        text = render_csv(head, rows)
        if args.out:
            out = Path(args.out)
            if args.format == "json" and out.suffix == ".json":
                raise ConfigError("--out must not end in .json when a mirror is requested")
            out.write_text(text)
            if args.format == "json":
                mirror = copy.deepcopy(cfg)
                mirror["run"] = run
                mirror["results"] = {"columns": head, "rows": [[fmt(v) for v in r] for r in rows]}
                out.with_suffix(".json").write_text(json.dumps(mirror, indent=2) + "\n")
        else:
            if args.format == "json":
                raise ConfigError("--format json needs --out")
            sys.stdout.write(text)
    except HolotransferError as exc:
        record = {"error": exc.kind, "type": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
