"""Datasets, held-out splits, MSE evaluation, fine-tune export and result tables."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .core import ChoiceTask, LotteryError, TaskError, format_lottery, parse_lottery
from .learn.search import ensemble_average
from .llm.prompts import render_finetune_prompt
from .metrics import LengthMismatch, RangeViolation, mse

__all__ = [
    "Dataset",
    "Split",
    "PredictionReport",
    "load_dataset",
    "save_dataset",
    "split_dataset",
    "mse",
    "evaluate",
    "evaluate_ensemble",
    "export_finetune_file",
    "report_table",
    "LengthMismatch",
    "RangeViolation",
]

TEXTUAL_HEADER = ["task_id", "text_a", "text_b", "rate_a", "n_participants"]
NUMERIC_HEADER = ["task_id", "lottery_a", "lottery_b", "rate_a", "n_participants"]
REFERENCE_BASELINES = [
    ("RoBERTa (reference)", "Textual only", 0.0095),
    ("Ensemble GPT-4o (reference)", "Textual only", 0.0121),
    ("BEAST-GB (reference, numeric)", "Numeric", 0.0092),
]


class SchemaViolation(ValueError):
    pass


class DuplicateTaskId(ValueError):
    pass


class FileUnreadable(OSError):
    pass


class TooSmall(ValueError):
    pass


class MissingPredictions(KeyError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"no predictions for {len(self.missing)} test ids: {', '.join(self.missing[:20])}")


class MissingLabel(ValueError):
    pass


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    name: str
    tasks: list[ChoiceTask]
    modality: str = "textual"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = [t.task_id for t in self.tasks]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise DuplicateTaskId(f"duplicate task ids: {dupes[:10]}")
        for t in self.tasks:
            ok = {
                "textual": t.has_text,
                "numeric": t.has_numeric,
                "both": t.has_text and t.has_numeric,
            }.get(self.modality)
            if ok is None:
                raise ValueError(f"unknown modality {self.modality!r}")
            if not ok:
                raise SchemaViolation(f"task {t.task_id} lacks the {self.modality} modality")
        self._index = {t.task_id: t for t in self.tasks}

    def __len__(self) -> int:
        return len(self.tasks)

    def __getitem__(self, task_id: str) -> ChoiceTask:
        return self._index[task_id]

    def subset(self, ids: Sequence[str]) -> list[ChoiceTask]:
        return [self._index[i] for i in ids]

    def labels(self, ids: Sequence[str]) -> np.ndarray:
        out = []
        for i in ids:
            r = self._index[i].observed_rate_a
            if r is None:
                raise MissingLabel(f"task {i} has no observed rate")
            out.append(r)
        return np.array(out, dtype=float)


def _opt_float(s: str) -> Optional[float]:
    s = (s or "").strip()
    return float(s) if s else None


def _opt_int(s: str) -> Optional[int]:
    s = (s or "").strip()
    if not s:
        return None
    v = float(s)
    if not v.is_integer():
        raise ValueError(f"participant count {s!r} is not an integer")
    return int(v)


def load_dataset(path: Union[str, Path], format: str = "textual-csv", name: Optional[str] = None) -> Dataset:
    """Read a dataset CSV.

    ``textual-csv`` has columns ``task_id,text_a,text_b,rate_a,n_participants``;
    ``numeric-csv`` and ``synthetic`` have ``task_id,lottery_a,lottery_b,rate_a,n_participants``
    with lotteries written ``payoff:prob;payoff:prob``. ``synthetic`` also reads
    the ``<path>.meta.json`` sidecar. When a file carries both text and
    lottery columns the dataset modality is ``both``.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text, newline=""))
    header = reader.fieldnames or []
    numeric = format in ("numeric-csv", "synthetic")
    if format not in ("textual-csv", "numeric-csv", "synthetic"):
        raise ValueError(f"unknown dataset format {format!r}")
    required = NUMERIC_HEADER[:3] if numeric else TEXTUAL_HEADER[:3]
    missing_cols = [c for c in required if c not in header]
    if missing_cols:
        raise SchemaViolation(f"{path}: missing columns {missing_cols}")
    both = {"text_a", "text_b", "lottery_a", "lottery_b"} <= set(header)

    tasks, errors, seen = [], [], {}
    for row in reader:
        line = reader.line_num
        try:
            tid = (row.get("task_id") or "").strip()
            kw = dict(
                task_id=tid,
                observed_rate_a=_opt_float(row.get("rate_a", "")),
                n_participants=_opt_int(row.get("n_participants", "")),
            )
            if numeric or both:
                kw["option_a_lottery"] = parse_lottery(row["lottery_a"])
                kw["option_b_lottery"] = parse_lottery(row["lottery_b"])
            if not numeric or both:
                kw["option_a_text"] = row["text_a"]
                kw["option_b_text"] = row["text_b"]
                if not row["text_a"] or not row["text_b"]:
                    raise ValueError("empty option text")
            task = ChoiceTask(**kw)
        except (LotteryError, TaskError, ValueError, KeyError, TypeError) as exc:
            errors.append(f"line {line}: {exc}")
            continue
        if tid in seen:
            raise DuplicateTaskId(f"{path}: task id {tid!r} on line {line} first seen on line {seen[tid]}")
        seen[tid] = line
        tasks.append(task)
    if errors:
        raise SchemaViolation(f"{path}: {len(errors)} malformed rows; " + "; ".join(errors[:20]))
    modality = "both" if both else ("numeric" if numeric else "textual")
    meta = {}
    if format == "synthetic":
        meta_path = path.with_name(path.name + ".meta.json")
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
    return Dataset(name or path.stem, tasks, modality, meta)


def _fmt_rate(v: Optional[float]) -> str:
    return "" if v is None else repr(float(v))


def save_dataset(ds: Dataset, path: Union[str, Path], metadata: Optional[dict] = None) -> None:
    """Write ``ds`` in the CSV layout matching its modality (plus a sidecar when ``metadata`` is given)."""
    path = Path(path)
    if ds.modality == "both":
        header = ["task_id", "text_a", "text_b", "lottery_a", "lottery_b", "rate_a", "n_participants"]
    else:
        header = NUMERIC_HEADER if ds.modality == "numeric" else TEXTUAL_HEADER
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for t in ds.tasks:
        row = {"task_id": t.task_id, "rate_a": _fmt_rate(t.observed_rate_a)}
        row["n_participants"] = "" if t.n_participants is None else str(t.n_participants)
        if t.has_text:
            row["text_a"], row["text_b"] = t.option_a_text, t.option_b_text
        if t.has_numeric:
            row["lottery_a"] = format_lottery(t.option_a_lottery)
            row["lottery_b"] = format_lottery(t.option_b_lottery)
        w.writerow([row.get(c, "") for c in header])
    path.write_text(buf.getvalue(), encoding="utf-8")
    if metadata is not None:
        meta_path = path.with_name(path.name + ".meta.json")
        meta_path.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Splits
# ---------------------------------------------------------------------------


class SplitMix64:
    """Pinned 64-bit generator so splits never depend on a library's RNG stream."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next()
            if x < limit:
                return x % bound


def seeded_shuffle(items: Sequence[str], seed: int) -> list[str]:
    """Fisher-Yates over the lexicographically sorted items, driven by SplitMix64."""
    out = sorted(items)
    rng = SplitMix64(seed)
    for i in range(len(out) - 1, 0, -1):
        j = rng.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5 + 1e-9))


@dataclass(frozen=True)
class Split:
    train_ids: tuple[str, ...]
    val_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    seed: int
    fractions: tuple[float, float]

    @property
    def trainval_ids(self) -> tuple[str, ...]:
        return self.train_ids + self.val_ids

    def partition(self, name: str) -> tuple[str, ...]:
        return {"train": self.train_ids, "val": self.val_ids, "test": self.test_ids, "trainval": self.trainval_ids}[
            name
        ]

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def split_dataset(ds: Dataset, test_fraction: float = 0.10, val_fraction: float = 0.10, seed: int = 0) -> Split:
    """Shuffle ids with the pinned generator, take the test block, then validation.

    Block sizes round half up: 1000 tasks give 100 test ids, 1039 give 104.
    """
    if not 0 < test_fraction < 1 or not 0 < val_fraction < 1:
        raise ValueError("fractions must lie in (0, 1)")
    if len(ds) < 10:
        raise TooSmall(f"dataset has {len(ds)} tasks; need at least 10")
    order = seeded_shuffle([t.task_id for t in ds.tasks], seed)
    n_test = _round_half_up(test_fraction * len(order))
    test, rest = order[:n_test], order[n_test:]
    n_val = _round_half_up(val_fraction * len(rest))
    val, train = rest[:n_val], rest[n_val:]
    return Split(tuple(train), tuple(val), tuple(test), seed, (test_fraction, val_fraction))


# ---------------------------------------------------------------------------
# Evaluation and reports
# ---------------------------------------------------------------------------


def fingerprint(config) -> str:
    blob = json.dumps(config, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass
class PredictionReport:
    model_name: str
    training_data: str
    predictions: dict[str, float]
    labels: dict[str, float]
    test_mse: float
    split_seed: int
    config_fingerprint: str
    member_mse: list[float] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def recompute_mse(self) -> float:
        ids = sorted(self.labels)
        return mse([self.predictions[i] for i in ids], [self.labels[i] for i in ids])

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PredictionReport":
        rep = cls(**json.loads(Path(path).read_text(encoding="utf-8")))
        if abs(rep.recompute_mse() - rep.test_mse) > 1e-12:
            raise ValueError(f"{path}: stored MSE does not match its predictions")
        return rep


def load_predictions(path: Union[str, Path]) -> dict[str, float]:
    """Read a ``task_id,prediction`` CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and not {"task_id", "prediction"} <= set(rows[0]):
        raise SchemaViolation(f"{path}: expected columns task_id,prediction")
    return {r["task_id"]: float(r["prediction"]) for r in rows}


def save_predictions(preds: Mapping[str, float], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["task_id", "prediction"])
        for tid, p in preds.items():
            w.writerow([tid, repr(float(p))])


def _test_predictions(preds: Mapping[str, float], split: Split) -> dict[str, float]:
    missing = [i for i in split.test_ids if i not in preds]
    if missing:
        raise MissingPredictions(missing)
    return {i: float(preds[i]) for i in split.test_ids}


def evaluate(
    predictions: Union[Mapping[str, float], str, Path],
    ds: Dataset,
    split: Split,
    *,
    model_name: str = "model",
    training_data: str = "",
    config: Optional[dict] = None,
) -> PredictionReport:
    """Test-set MSE for per-task predictions (a mapping or a prediction CSV)."""
    if isinstance(predictions, (str, Path)):
        predictions = load_predictions(predictions)
    test = _test_predictions(predictions, split)
    labels = dict(zip(split.test_ids, ds.labels(split.test_ids).tolist()))
    score = mse(list(test.values()), [labels[i] for i in test])
    return PredictionReport(
        model_name, training_data, test, labels, score, split.seed, fingerprint(config or {})
    )


def evaluate_ensemble(
    member_predictions: Sequence[Mapping[str, float]],
    ds: Dataset,
    split: Split,
    *,
    model_name: str = "ensemble",
    training_data: str = "",
    config: Optional[dict] = None,
) -> PredictionReport:
    """MSE of the averaged members, recording each member's own MSE as well."""
    if not member_predictions:
        raise ValueError("need at least one member")
    members = [_test_predictions(p, split) for p in member_predictions]
    labels = ds.labels(split.test_ids)
    stacked = [[m[i] for i in split.test_ids] for m in members]
    averaged = ensemble_average(stacked)
    member_scores = [mse(row, labels) for row in stacked]
    score = mse(averaged, labels)
    assert score <= float(np.mean(member_scores)) + 1e-12, "ensemble MSE exceeds mean member MSE"
    return PredictionReport(
        model_name,
        training_data,
        dict(zip(split.test_ids, averaged.tolist())),
        dict(zip(split.test_ids, labels.tolist())),
        score,
        split.seed,
        fingerprint(config or {}),
        member_mse=member_scores,
        notes=[f"average of k={len(members)} predictors"],
    )


def export_finetune_file(ds: Dataset, split: Optional[Split], partition: str, path: Union[str, Path]) -> int:
    """Write one ``{"prompt", "completion"}`` JSON line per task; returns the count.

    The completion is the observed rate as an integer percentage string.
    """
    ids = [t.task_id for t in ds.tasks] if split is None or partition == "all" else split.partition(partition)
    lines = []
    for tid in ids:
        task = ds[tid]
        if task.observed_rate_a is None:
            raise MissingLabel(f"task {tid} has no observed rate")
        pct = _round_half_up(task.observed_rate_a * 100)
        lines.append(json.dumps({"prompt": render_finetune_prompt(task), "completion": str(pct)}, ensure_ascii=False))
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return len(lines)


def report_table(
    reports: Sequence[PredictionReport], format: str = "plain", *, include_reference_baselines: bool = False
) -> str:
    """Rows sorted by MSE at four decimals, then by model name."""
    rows = [(r.model_name, r.training_data, r.test_mse) for r in reports]
    if include_reference_baselines:
        rows += REFERENCE_BASELINES
    if not rows:
        raise ValueError("no reports to tabulate")
    rows.sort(key=lambda r: (f"{r[2]:.4f}", r[0]))
    header = ("Model", "Training Data", "Test MSE")
    body = [(name, data or "--", f"{score:.4f}") for name, data, score in rows]
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        return buf.getvalue()
    if format == "markdown":
        lines = ["| " + " | ".join(header) + " |", "|---|---|---:|"]
        lines += ["| " + " | ".join(r) + " |" for r in body]
        return "\n".join(lines) + "\n"
    if format == "plain":
        widths = [max(len(str(x[i])) for x in [header, *body]) for i in range(3)]
        fmt = lambda r: "  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip()  # noqa: E731
        return "\n".join([fmt(header), fmt(["-" * w for w in widths]), *map(fmt, body)]) + "\n"
    raise ValueError(f"unknown table format {format!r}")
