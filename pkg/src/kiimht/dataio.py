"""Tübingen cause-effect pairs loading, downsampling, and result files.

Benchmark directory layout::

    pairmeta.txt      one line per pair: id cause-start cause-end effect-start effect-end weight
    pair0001.txt      whitespace-separated numeric columns, one sample per row
    ...

Result files are tab-separated UTF-8 text: ``#`` comment lines (the first one
carries the schema version, the rest are ``key: value`` run parameters),
then a header row, then one record per line.
"""

from __future__ import annotations

import logging
import os
import tempfile
import warnings
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .common import Direction, InputError, KiimhtError
from .datagen import PairDataset

log = logging.getLogger(__name__)

META_NAME = "pairmeta.txt"
SCHEMA_LINE = "# kiimht-results v1"
PathLike = Union[str, Path]


@dataclass
class TcepPair:
    id: str
    data: PairDataset
    weight: float = 1.0

    @property
    def n(self) -> int:
        return self.data.n


def _parse_matrix(path: Path) -> np.ndarray:
    rows = []
    width = None
    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                row = [float(tok) for tok in text.replace(",", " ").split()]
            except ValueError:
                raise InputError(f"{path}:{lineno}: unparseable row {text[:60]!r}") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InputError(f"{path}:{lineno}: expected {width} columns, found {len(row)}")
            rows.append(row)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def _read_meta(path: Path) -> List[Tuple[str, int, int, int, int, float]]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            toks = line.split()
            if not toks or toks[0].startswith("#"):
                continue
            if len(toks) < 6:
                raise InputError(f"{path}:{lineno}: expected 6 fields, found {len(toks)}")
            try:
                cs, ce, es, ee = (int(float(t)) for t in toks[1:5])
                weight = float(toks[5])
            except ValueError:
                raise InputError(f"{path}:{lineno}: malformed metadata line") from None
            entries.append((toks[0], cs, ce, es, ee, weight))
    return entries


def _pair_file(root: Path, pair_id: str) -> Path:
    candidates = [root / f"pair{pair_id}.txt"]
    if pair_id.isdigit():
        candidates.append(root / f"pair{int(pair_id):04d}.txt")
    for c in candidates:
        if c.exists():
            return c
    raise InputError(f"data file for pair {pair_id} not found in {root}")


def load_tcep(directory: PathLike) -> List[TcepPair]:
    """Load every univariate pair, oriented cause-first.

    Pairs whose cause or effect spans several columns are skipped. Column
    indices are 1-based unless some index in the metadata is 0.
    """
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"{root} is not a directory")
    meta_path = root / META_NAME
    if not meta_path.exists():
        raise InputError(f"missing metadata file {meta_path}")
    entries = _read_meta(meta_path)
    if not entries:
        raise InputError(f"{meta_path} lists no pairs")
    offset = 0 if any(min(e[1:5]) == 0 for e in entries) else 1
    log.info("TCEP metadata uses %d-based column indices", offset)

    pairs = []
    skipped = 0
    for pair_id, cs, ce, es, ee, weight in entries:
        if ce != cs or ee != es:
            skipped += 1
            continue
        data = _parse_matrix(_pair_file(root, pair_id))
        ci, ei = cs - offset, es - offset
        if max(ci, ei) >= data.shape[1] or min(ci, ei) < 0:
            raise InputError(f"pair {pair_id}: column index out of range for {data.shape[1]} columns")
        ds = PairDataset(data[:, [ci]], data[:, [ei]], Direction.XtoY, f"tcep:{pair_id}")
        pairs.append(TcepPair(pair_id, ds, weight))
    log.info("loaded %d TCEP pairs (%d multivariate skipped)", len(pairs), skipped)
    return pairs


def downsample(pair: TcepPair, cap: int = 400, seed: int = 0) -> TcepPair:
    """Keep at most ``cap`` rows: seeded shuffle, then the first ``cap``."""
    if cap < 2:
        raise InputError(f"cap must be at least 2, got {cap}")
    if pair.n <= cap:
        return pair
    idx = np.random.default_rng(seed).permutation(pair.n)[:cap]
    ds = pair.data
    sub = PairDataset(ds.x[idx], ds.y[idx], ds.truth, ds.provenance)
    return TcepPair(pair.id, sub, pair.weight)


@dataclass
class ResultRecord:
    item: str
    method: str
    cfg_digest: str
    decision: Direction
    score_xy: float
    score_yx: float
    wall_time: float
    seed: int

    def __post_init__(self):
        self.decision = Direction(self.decision)
        self.score_xy = float(self.score_xy)
        self.score_yx = float(self.score_yx)
        self.wall_time = float(self.wall_time)
        self.seed = int(self.seed)


RESULT_COLUMNS = tuple(f.name for f in fields(ResultRecord))
_FLOAT_COLUMNS = {"score_xy", "score_yx", "wall_time"}


def _format(value) -> str:
    if isinstance(value, Direction):
        return value.value
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if "\t" in text or "\n" in text:
        raise InputError(f"field value {text!r} contains a tab or newline")
    return text


def atomic_write(path: PathLike, text: str) -> None:
    """Replace ``path`` with ``text`` in one rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def header_lines(params: Optional[Dict[str, object]]) -> List[str]:
    return [f"# {k}: {v}" for k, v in (params or {}).items()]


def write_results(records: Sequence[ResultRecord], path: PathLike,
                  params: Optional[Dict[str, object]] = None) -> None:
    lines = [SCHEMA_LINE, *header_lines(params), "\t".join(RESULT_COLUMNS)]
    for rec in records:
        lines.append("\t".join(_format(getattr(rec, col)) for col in RESULT_COLUMNS))
    atomic_write(path, "\n".join(lines) + "\n")


def read_header(path: PathLike) -> Dict[str, str]:
    """Run parameters stored in the ``# key: value`` comment lines of a result file or table."""
    params = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if ": " in body:
                key, value = body.split(": ", 1)
                params[key] = value
    return params


def read_results(path: PathLike) -> List[ResultRecord]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# kiimht-results "):
        raise InputError(f"{path}: not a results file (missing schema line)")
    if lines[0] != SCHEMA_LINE:
        raise InputError(f"{path}: unsupported schema {lines[0][2:]!r}")
    body = [ln for ln in lines if not ln.startswith("#")]
    if not body:
        raise InputError(f"{path}: missing header row")
    header = body[0].split("\t")
    missing = [c for c in RESULT_COLUMNS if c not in header]
    if missing:
        raise InputError(f"{path}: missing columns {missing}")
    extra = [c for c in header if c not in RESULT_COLUMNS]
    if extra:
        warnings.warn(f"{path}: ignoring unknown columns {extra}", stacklevel=2)
    index = {c: header.index(c) for c in RESULT_COLUMNS}
    records = []
    for lineno, line in enumerate(body[1:], start=2):
        if not line:
            continue
        cells = line.split("\t")
        if len(cells) != len(header):
            raise InputError(f"{path}: record {lineno} has {len(cells)} fields, expected {len(header)}")
        try:
            records.append(ResultRecord(**{c: cells[i] for c, i in index.items()}))
        except (ValueError, KiimhtError) as exc:
            raise InputError(f"{path}: record {lineno}: {exc}") from None
    return records


def read_decisions(path: PathLike) -> Dict[str, Dict[str, Direction]]:
    """Externally produced decisions: tab-separated ``method item decision`` lines.

    Returns ``{method: {item: decision}}``. Lines starting with ``#`` and a
    header line beginning with ``method`` are skipped.
    """
    out: Dict[str, Dict[str, Direction]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            toks = line.split()
            if not toks or toks[0].startswith("#") or (lineno == 1 and toks[0] == "method"):
                continue
            if len(toks) < 3:
                raise InputError(f"{path}:{lineno}: expected method, item, decision")
            try:
                out.setdefault(toks[0], {})[toks[1]] = Direction(toks[2])
            except ValueError:
                raise InputError(f"{path}:{lineno}: unknown decision {toks[2]!r}") from None
    return out
