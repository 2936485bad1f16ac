"""Experiment runner.

Subcommands ``synth``, ``synth2d``, ``tcep``, ``lambda-sweep`` and ``hypergrid``
print a tab-separated accuracy table (mean and SD over trials, in percent)
preceded by ``#`` lines echoing every run parameter. ``infer`` scores a single
data file and reports the decision through its exit status.

Exit codes: 0 success (``infer``: X->Y), 1 ``infer``: Y->X, 2 ``infer``:
undecided, 3 some table cells failed, 4 input error, 5 numeric/scorer error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .common import Direction, InputError, KiimhtError
from .datagen import PairDataset, Setting, SettingKind, derive_seed, enumerate_settings, parse_columns_header
from .dataio import (
    ResultRecord,
    atomic_write,
    downsample,
    header_lines,
    load_tcep,
    read_decisions,
    write_results,
)
from .embeddings import Reference, ReweightConfig
from .inference import evaluate_accuracy, infer_pair
from .kernels import KernelConfig
from .projection import LossConfig
from .scorers import IgciReference, Method, ScoreConfig

log = logging.getLogger("kiimht")

OUTPUT_DIR_ENV = "KIIMHT_OUTPUT_DIR"
TABLE_SCHEMA = "# kiimht-table v1"

EXIT_YTOX, EXIT_UNDECIDED, EXIT_PARTIAL, EXIT_INPUT, EXIT_NUMERIC = 1, 2, 3, 4, 5

SWEEP_LAMBDAS = (1e-3, 1e-2, 1e-1, 1.0, 5.0, 10.0, 50.0)
GRID_RANKS = (5, 10, 20, 80, 100)
GRID_LAMBDA_REGS = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)
SYNTH_METHODS = ("IGCI-N", "IGCI-U", "KCDC", "KIIM", "KIIM-HT")
TCEP_METHODS = ("IGCI-N", "IGCI-U", "KCDC", "KIIM", "Rw-KIIM-N", "Rw-KIIM-L",
                "KIIM-HT", "Rw-KIIM-HT-N", "Rw-KIIM-HT-L")
SWEEP_METHODS = ("KCDC", "KIIM", "KIIM-HT")
EXTERNAL_METHODS = ("ANM", "LINGAM")

# seed stream tags, so data and network seeds never collide
_DATA, _NET, _SUBSAMPLE = 11, 13, 17
_KIND_CODE = {SettingKind.Scalar: 1, SettingKind.TwoDim: 2}


@dataclass(frozen=True)
class Variant:
    """A named method column: a scorer plus configuration overrides."""

    label: str
    method: Method
    reweight: Optional[Reference] = None
    igci_reference: Optional[IgciReference] = None
    kcdc_n_lambda: Optional[bool] = None

    def apply(self, cfg: ScoreConfig) -> ScoreConfig:
        if self.reweight is not None:
            cfg = replace(cfg, reweight=ReweightConfig(reference=self.reweight))
        if self.igci_reference is not None:
            cfg = replace(cfg, igci_reference=self.igci_reference)
        if self.kcdc_n_lambda is not None:
            cfg = replace(cfg, kcdc_n_lambda=self.kcdc_n_lambda)
        return cfg


def parse_variant(label: str, default_reweight: Optional[Reference] = None) -> Variant:
    key = label.strip().upper().replace("_", "-")
    if key in EXTERNAL_METHODS:
        raise InputError(
            f"{label} is not implemented here; run it externally and pass its decisions "
            "with --import-decisions (tab-separated: method, item, decision)"
        )
    igci = {"IGCI-U": IgciReference.Uniform, "IGCI-N": IgciReference.Gaussian, "IGCI": IgciReference.Uniform}
    if key in igci:
        return Variant(label, Method.IGCI, igci_reference=igci[key])
    if key == "KCDC":
        return Variant(label, Method.KCDC)
    if key in ("KCDC-NLAMBDA", "KCDC-NL"):
        return Variant(label, Method.KCDC, kcdc_n_lambda=True)
    refs = {"N": Reference.Gaussian, "L": Reference.Laplace}
    for base, method in (("KIIM-HT", Method.KIIM_HT), ("KIIM", Method.KIIM)):
        if key == base:
            return Variant(label, method, reweight=default_reweight)
        if key.startswith("RW-" + base + "-") and key[len(base) + 4:] in refs:
            return Variant(label, method, reweight=refs[key[len(base) + 4:]])
    raise InputError(f"unknown method {label!r}")


# --------------------------------------------------------------------------- tasks


@dataclass
class Outcome:
    label: str
    decision: Optional[Direction]
    score_xy: float = float("nan")
    score_yx: float = float("nan")
    wall_time: float = 0.0
    seed: int = 0
    error: str = ""


def _run_variants(dataset: PairDataset, variants: Sequence[Variant], cfg: ScoreConfig) -> List[Outcome]:
    out = []
    for v in variants:
        vcfg = v.apply(cfg)
        start = time.perf_counter()
        try:
            d = infer_pair(dataset, v.method, vcfg)
            out.append(Outcome(v.label, d.decision, d.score_xy, d.score_yx,
                               time.perf_counter() - start, vcfg.seed))
        except KiimhtError as exc:
            out.append(Outcome(v.label, None, wall_time=time.perf_counter() - start,
                               seed=vcfg.seed, error=str(exc)))
    return out


def _synthetic_task(task) -> List[Outcome]:
    setting, kind, index, trial, k, n, seed, variants, cfg = task
    data_seed = derive_seed(seed, _DATA, _KIND_CODE[kind], index, trial, k)
    net_seed = derive_seed(seed, _NET, _KIND_CODE[kind], index, trial, k)
    return _run_variants(setting.generate(n, data_seed), variants, cfg.with_seed(net_seed))


def _tcep_task(task) -> List[Outcome]:
    pair, index, trial, cap, seed, variants, cfg = task
    sub = downsample(pair, cap, derive_seed(seed, _SUBSAMPLE, index, trial))
    return _run_variants(sub.data, variants, cfg.with_seed(derive_seed(seed, _NET, 3, index, trial)))


def _map(fn, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


# --------------------------------------------------------------------------- tables


@dataclass
class Cell:
    """Accuracy over trials for one table row; ``errors`` holds failure messages."""

    per_trial: List[float]
    errors: List[str]
    errors_counted: bool = False  # failures scored as wrong decisions instead of voiding the cell

    @property
    def status(self) -> str:
        if not self.errors:
            return "ok"
        what = "counted wrong" if self.errors_counted else "failed"
        return f"error ({len(self.errors)} {what}): {self.errors[0]}".replace("\t", " ")

    def fmt(self) -> Tuple[str, str]:
        if (self.errors and not self.errors_counted) or not self.per_trial:
            return "nan", "nan"
        acc = 100.0 * np.asarray(self.per_trial)
        return f"{acc.mean():.2f}", f"{acc.std():.2f}"


def _cell(outcomes_by_trial: Sequence[Sequence[Outcome]], weights=None, count_errors: bool = False) -> Cell:
    """Per-trial accuracy. A failed item voids its trial unless ``count_errors``,
    in which case it is scored as Undecided."""
    per_trial, errors = [], []
    for outs in outcomes_by_trial:
        errors += [o.error for o in outs if o.error]
        if any(o.error for o in outs) and not count_errors:
            continue
        decisions = [o.decision or Direction.Undecided for o in outs]
        per_trial.append(evaluate_accuracy(decisions, [Direction.XtoY] * len(decisions), weights).accuracy)
    return Cell(per_trial, errors, count_errors)


def render_table(params: Dict[str, object], columns: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    lines = [TABLE_SCHEMA, *header_lines(params), "\t".join(columns)]
    lines += ["\t".join(str(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- config


def _fmt_list(values) -> str:
    return ",".join(str(v) for v in values)


def _float_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _methods(args, default: Sequence[str]) -> List[str]:
    if not args.method:
        return list(default)
    out = []
    for item in args.method:
        out += [m for m in item.split(",") if m.strip()]
    return out


def _base_config(args, lam: Optional[float] = None) -> ScoreConfig:
    lam_value = args.lam[0] if lam is None else lam
    return ScoreConfig(
        kernel=KernelConfig(reg=lam_value),
        loss=LossConfig(lambda_reg=args.lambda_reg, iterations=args.iters, hidden=args.hidden, rank=args.rank),
        kiim_rank=args.kiim_rank,
        seed=args.seed,
        kcdc_n_lambda=args.kcdc_n_lambda,
    )


def _default_reweight(args) -> Optional[Reference]:
    return {"none": None, "gaussian": Reference.Gaussian, "laplace": Reference.Laplace}[args.reweight]


def _scale(args, trials_default: int = 5, datasets_default: int = 50) -> Tuple[int, int]:
    trials = args.trials if args.trials is not None else (1 if args.desk_scale else trials_default)
    per_trial = (args.datasets_per_trial if args.datasets_per_trial is not None
                 else (20 if args.desk_scale else datasets_default))
    if trials < 1 or per_trial < 1:
        raise InputError("--trials and --datasets-per-trial must be positive")
    return trials, per_trial


def _params(args, command: str, **extra) -> Dict[str, object]:
    params = {
        "command": command,
        "version": __version__,
        "seed": args.seed,
        "lambda": _fmt_list(args.lam),
        "lambda_reg": args.lambda_reg,
        "rank": args.rank,
        "hidden": args.hidden,
        "iters": args.iters,
        "kiim_rank": args.kiim_rank,
        "reweight": args.reweight,
        "kcdc_n_lambda": args.kcdc_n_lambda,
        "desk_scale": args.desk_scale,
    }
    params.update(extra)
    return params


def _select_settings(kind: SettingKind, wanted: Optional[str]) -> List[Tuple[int, Setting]]:
    indexed = list(enumerate(enumerate_settings(kind)))
    if not wanted:
        return indexed
    keys = {w.strip().upper() for w in wanted.split(",") if w.strip()}
    return [(i, s) for i, s in indexed if s.key.upper() in keys]


def _suite_kinds(args, default: str) -> List[SettingKind]:
    suite = args.suite or default
    return {"scalar": [SettingKind.Scalar], "2d": [SettingKind.TwoDim],
            "both": [SettingKind.Scalar, SettingKind.TwoDim]}[suite]


def _default_n(args, kind: SettingKind) -> int:
    if args.n is not None:
        return args.n
    return 100 if kind is SettingKind.Scalar else 5


def _synthetic_cells(args, kind, settings, variants, cfg, trials, per_trial, n):
    """Run every (setting, trial, dataset) task; return {(setting index, label): Cell} and records."""
    tasks = [(s, kind, i, t, k, n, args.seed, variants, cfg)
             for i, s in settings for t in range(trials) for k in range(per_trial)]
    results = _map(_synthetic_task, tasks, args.jobs)
    cells, records = {}, []
    pos = 0
    digests = {v.label: v.apply(cfg).digest() for v in variants}
    for i, s in settings:
        by_variant: Dict[str, List[List[Outcome]]] = {v.label: [] for v in variants}
        for t in range(trials):
            for v in variants:
                by_variant[v.label].append([])
            for k in range(per_trial):
                for o in results[pos]:
                    by_variant[o.label][t].append(o)
                    records.append(_record(f"{s.key}/t{t}/d{k}", o, digests[o.label]))
                pos += 1
        for v in variants:
            cells[(i, v.label)] = _cell(by_variant[v.label])
    return cells, records


def _record(item: str, o: Outcome, digest: str) -> ResultRecord:
    decision = o.decision if o.decision is not None else Direction.Undecided
    return ResultRecord(item, o.label, digest, decision, o.score_xy, o.score_yx, o.wall_time, o.seed)


# --------------------------------------------------------------------------- commands


def cmd_synth(args, kind: SettingKind = SettingKind.Scalar) -> int:
    trials, per_trial = _scale(args)
    labels = _methods(args, SYNTH_METHODS)
    variants = [parse_variant(m, _default_reweight(args)) for m in labels]
    n = _default_n(args, kind)
    settings = _select_settings(kind, args.settings)
    if not settings:
        raise InputError(f"no settings match {args.settings!r}")
    cfg = _base_config(args)
    cells, records = _synthetic_cells(args, kind, settings, variants, cfg, trials, per_trial, n)
    rows = []
    for i, s in settings:
        for v in variants:
            c = cells[(i, v.label)]
            rows.append([s.label, s.noise.short, v.label, *c.fmt(), len(c.per_trial), c.status])
    command = "synth" if kind is SettingKind.Scalar else "synth2d"
    params = _params(args, command, methods=_fmt_list(labels), n=n, trials=trials,
                     datasets_per_trial=per_trial,
                     settings=_fmt_list(s.key for _, s in settings), cfg_digest=cfg.digest())
    table = render_table(params, ["setting", "noise", "method", "mean", "sd", "trials", "status"], rows)
    return _emit(args, command, table, params, records, any(r[-1] != "ok" for r in rows))


def cmd_synth2d(args) -> int:
    return cmd_synth(args, SettingKind.TwoDim)


def cmd_lambda_sweep(args) -> int:
    trials, per_trial = _scale(args)
    labels = _methods(args, SWEEP_METHODS)
    if args.kcdc_n_lambda and "KCDC-nlambda" not in labels:
        labels.append("KCDC-nlambda")
    variants = [parse_variant(m, _default_reweight(args)) for m in labels]
    lambdas = args.lam if args.lam_given else list(SWEEP_LAMBDAS)
    rows, records, failed = [], [], False
    setting_keys = []
    for kind in _suite_kinds(args, "both"):
        settings = _select_settings(kind, args.settings)
        n = _default_n(args, kind)
        setting_keys += [s.key for _, s in settings]
        per_lambda = []
        for lam in lambdas:
            cfg = _base_config(args, lam)
            cells, recs = _synthetic_cells(args, kind, settings, variants, cfg, trials, per_trial, n)
            per_lambda.append(cells)
            records += [replace(r, item=f"lambda={lam}/{r.item}") for r in recs]
        for i, s in settings:
            for v in variants:
                for lam, cells in zip(lambdas, per_lambda):
                    c = cells[(i, v.label)]
                    failed |= bool(c.errors)
                    rows.append([s.label, s.noise.short, n, v.label, repr(lam), *c.fmt(),
                                 len(c.per_trial), c.status])
    if not setting_keys:
        raise InputError(f"no settings match {args.settings!r}")
    params = _params(args, "lambda-sweep", methods=_fmt_list(labels), lambdas=_fmt_list(lambdas),
                     trials=trials, datasets_per_trial=per_trial, n=args.n if args.n is not None else "default",
                     suite=args.suite or "both", settings=_fmt_list(setting_keys))
    table = render_table(params, ["setting", "noise", "n", "method", "lambda", "mean", "sd", "trials", "status"], rows)
    return _emit(args, "lambda-sweep", table, params, records, failed)


def cmd_hypergrid(args) -> int:
    trials, per_trial = _scale(args)
    ranks = args.grid_rank or list(GRID_RANKS)
    regs = args.grid_lambda_reg or list(GRID_LAMBDA_REGS)
    variant = parse_variant("KIIM-HT", _default_reweight(args))
    rows, summary, records, failed = [], [], [], False
    setting_keys = []
    for kind in _suite_kinds(args, "scalar"):
        settings = _select_settings(kind, args.settings)
        n = _default_n(args, kind)
        setting_keys += [s.key for _, s in settings]
        grid = {}
        for r in ranks:
            for lr in regs:
                base = _base_config(args)
                cfg = replace(base, loss=replace(base.loss, rank=r, lambda_reg=lr))
                cells, recs = _synthetic_cells(args, kind, settings, [variant], cfg, trials, per_trial, n)
                grid[(r, lr)] = cells
                records += [replace(rec, item=f"rank={r}/lambda_reg={lr}/{rec.item}") for rec in recs]
        for i, s in settings:
            means = []
            for (r, lr), cells in grid.items():
                c = cells[(i, variant.label)]
                failed |= bool(c.errors)
                mean, sd = c.fmt()
                rows.append([s.label, s.noise.short, n, r, repr(lr), mean, sd, len(c.per_trial), c.status])
                if not c.errors:
                    means.append(100.0 * float(np.mean(c.per_trial)))
            if means:
                summary.append([s.label, s.noise.short, n, "all", "all",
                                f"{np.mean(means):.2f}", f"{np.std(means):.2f}", len(means), "summary"])
    if not setting_keys:
        raise InputError(f"no settings match {args.settings!r}")
    params = _params(args, "hypergrid", grid_rank=_fmt_list(ranks), grid_lambda_reg=_fmt_list(regs),
                     trials=trials, datasets_per_trial=per_trial, suite=args.suite or "scalar",
                     settings=_fmt_list(setting_keys))
    table = render_table(params, ["setting", "noise", "n", "rank", "lambda_reg", "mean", "sd", "trials", "status"],
                         rows + summary)
    return _emit(args, "hypergrid", table, params, records, failed)


def cmd_tcep(args) -> int:
    if not args.tcep_dir:
        raise InputError("tcep needs --tcep-dir")
    trials = args.trials if args.trials is not None else (1 if args.desk_scale else 5)
    labels = _methods(args, TCEP_METHODS)
    variants = [parse_variant(m, _default_reweight(args)) for m in labels]
    pairs = load_tcep(args.tcep_dir)
    weights = [p.weight for p in pairs] if args.weighted else None
    cfg = _base_config(args)
    tasks = [(p, idx, t, args.cap, args.seed, variants, cfg) for t in range(trials) for idx, p in enumerate(pairs)]
    results = _map(_tcep_task, tasks, args.jobs)
    digests = {v.label: v.apply(cfg).digest() for v in variants}
    by_variant: Dict[str, List[List[Outcome]]] = {v.label: [[] for _ in range(trials)] for v in variants}
    records = []
    for (p, _, t, *_rest), outs in zip(tasks, results):
        for o in outs:
            by_variant[o.label][t].append(o)
            records.append(_record(f"{p.id}/t{t}", o, digests[o.label]))
    rows, failed = [], False
    for v in variants:
        c = _cell(by_variant[v.label], weights, count_errors=True)
        failed |= bool(c.errors)
        rows.append([v.label, *c.fmt(), len(c.per_trial), len(pairs), c.status])
    if args.import_decisions:
        external = read_decisions(args.import_decisions)
        ids = [p.id for p in pairs]
        for method, decisions in sorted(external.items()):
            got = [decisions.get(i, Direction.Undecided) for i in ids]
            acc = evaluate_accuracy(got, [Direction.XtoY] * len(ids), weights).accuracy
            missing = sum(i not in decisions for i in ids)
            status = "imported" if not missing else f"imported ({missing} pairs missing, counted wrong)"
            rows.append([method, f"{100.0 * acc:.2f}", "nan", 1, len(pairs), status])
    params = _params(args, "tcep", methods=_fmt_list(labels), trials=trials, cap=args.cap,
                     tcep_dir=args.tcep_dir, pairs=len(pairs), weighted=args.weighted,
                     import_decisions=args.import_decisions or "", cfg_digest=cfg.digest())
    table = render_table(params, ["method", "mean", "sd", "trials", "pairs", "status"], rows)
    return _emit(args, "tcep", table, params, records, failed)


def _read_pair_file(path: str, x_cols: Optional[List[int]], y_cols: Optional[List[int]]) -> PairDataset:
    from .dataio import _parse_matrix

    p = Path(path)
    if not p.exists():
        raise InputError(f"{path}: no such file")
    data = _parse_matrix(p)
    if x_cols is None:
        with open(p, encoding="utf-8") as fh:
            head = [ln for ln in (fh.readline() for _ in range(5)) if ln.startswith("#")]
        dims = parse_columns_header(head)
        if dims is not None:
            dx, dy = dims
            x_cols, y_cols = list(range(1, dx + 1)), list(range(dx + 1, dx + dy + 1))
        elif data.shape[1] == 2:
            x_cols, y_cols = [1], [2]
        else:
            raise InputError(f"{path}: {data.shape[1]} columns; say which are x and y with --x-cols/--y-cols")
    cols = (x_cols or []) + (y_cols or [])
    if not y_cols or max(cols) > data.shape[1] or min(cols) < 1:
        raise InputError(f"{path}: invalid column selection for {data.shape[1]} columns")
    return PairDataset(data[:, [c - 1 for c in x_cols]], data[:, [c - 1 for c in y_cols]],
                       Direction.XtoY, str(p))


def cmd_infer(args) -> int:
    labels = _methods(args, ["KIIM-HT"])
    if len(labels) != 1:
        raise InputError("infer takes exactly one --method")
    variant = parse_variant(labels[0], _default_reweight(args))
    dataset = _read_pair_file(args.file, args.x_cols, args.y_cols)
    cfg = variant.apply(_base_config(args))
    d = infer_pair(dataset, variant.method, cfg)
    print(f"decision\t{d.decision.value}")
    print(f"score_xy\t{d.score_xy!r}")
    print(f"score_yx\t{d.score_yx!r}")
    print(f"method\t{variant.label}")
    print(f"cfg_digest\t{cfg.digest()}")
    return {Direction.XtoY: 0, Direction.YtoX: EXIT_YTOX, Direction.Undecided: EXIT_UNDECIDED}[d.decision]


def _emit(args, command: str, table: str, params, records, failed: bool) -> int:
    sys.stdout.write(table)
    out = args.out
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{command}.tsv")
    if out:
        atomic_write(out, table)
        log.info("wrote %s", out)
    if args.records:
        if args.no_timing:
            records = [replace(r, wall_time=0.0) for r in records]
        write_results(records, args.records, params)
    return EXIT_PARTIAL if failed else 0


# --------------------------------------------------------------------------- parser


class _LambdaAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.lam_given = True


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--method", action="append", help="method name(s), repeatable or comma-separated")
    common.add_argument("--lambda", dest="lam", type=_float_list, default=[1e-3], action=_LambdaAction,
                        help="kernel regularization (lambda-sweep: comma-separated list)")
    common.add_argument("--lambda-reg", type=float, default=1e-3)
    common.add_argument("--rank", type=int, default=100, help="projection rank of KIIM-HT")
    common.add_argument("--hidden", type=int, default=20)
    common.add_argument("--iters", type=int, default=100)
    common.add_argument("--kiim-rank", type=int, default=10)
    common.add_argument("--trials", type=int)
    common.add_argument("--datasets-per-trial", type=int)
    common.add_argument("--n", type=int, help="sample size (default 100 scalar, 5 two-dimensional)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--reweight", choices=("none", "gaussian", "laplace"), default="none",
                        help="re-weight plain KIIM / KIIM-HT methods")
    common.add_argument("--tcep-dir")
    common.add_argument("--out", help="write the table here (default: $%s/<command>.tsv)" % OUTPUT_DIR_ENV)
    common.add_argument("--records", help="also write one result record per decision to this file")
    common.add_argument("--no-timing", action="store_true",
                        help="store wall_time as 0 so record files are reproducible byte for byte")
    common.add_argument("--desk-scale", action="store_true", help="1 trial x 20 datasets")
    common.add_argument("--kcdc-n-lambda", action="store_true", help="KCDC regularizes with n*lambda")
    common.add_argument("--import-decisions", help="external decisions file merged into the tcep table")
    common.add_argument("--weighted", action="store_true", help="weight TCEP accuracy by pair weights")
    common.add_argument("--settings", help="comma-separated setting keys, e.g. ANM1-N,ANM1+MNM1-U")
    common.add_argument("--suite", choices=("scalar", "2d", "both"))
    common.add_argument("--grid-rank", type=_int_list)
    common.add_argument("--grid-lambda-reg", type=_float_list)
    common.add_argument("--cap", type=int, default=400, help="TCEP downsampling cap")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="kiimht", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="scalar synthetic benchmark").set_defaults(func=cmd_synth)
    sub.add_parser("synth2d", parents=[common], help="two-dimensional synthetic benchmark").set_defaults(
        func=cmd_synth2d)
    sub.add_parser("tcep", parents=[common], help="Tuebingen cause-effect pairs").set_defaults(func=cmd_tcep)
    sub.add_parser("lambda-sweep", parents=[common], help="kernel regularization sweep").set_defaults(
        func=cmd_lambda_sweep)
    sub.add_parser("hypergrid", parents=[common], help="rank x lambda_reg grid for KIIM-HT").set_defaults(
        func=cmd_hypergrid)
    infer = sub.add_parser("infer", parents=[common], help="decide the direction for one data file")
    infer.add_argument("file")
    infer.add_argument("--x-cols", type=_int_list, help="1-based x columns")
    infer.add_argument("--y-cols", type=_int_list, help="1-based y columns")
    infer.set_defaults(func=cmd_infer)
    parser.set_defaults(lam_given=False)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "lam_given"):
        args.lam_given = False
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"kiimht: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KiimhtError as exc:
        print(f"kiimht: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"kiimht: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
