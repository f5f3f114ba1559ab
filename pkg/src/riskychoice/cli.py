"""``riskychoice`` command line: one subcommand per pipeline stage.

Settings resolve as flag > config file > built-in default. The config file is
TOML; each subcommand reads its own table (``[gen-synthetic]``, ``[train]``,
...) plus the shared ``[split]`` and ``[provider]`` tables, with keys spelled
like the flags (``--test-fraction`` is ``test_fraction``).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import platform
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .beast import BeastParams, SyntheticSpace, generate_synthetic_dataset
from .core import LotteryError, TaskError
from .features import FEATURE_NAMES, feature_matrix, textual_feature_vector
from .harness import (
    Dataset,
    MissingLabel,
    MissingPredictions,
    PredictionReport,
    SchemaViolation,
    evaluate,
    evaluate_ensemble,
    export_finetune_file,
    fingerprint,
    load_dataset,
    load_predictions,
    report_table,
    save_dataset,
    save_predictions,
    split_dataset,
)
from .learn import (
    EmbeddingStore,
    RegressorSpec,
    grid_search,
    load_model,
    pca_apply,
    pca_fit,
    predict,
    save_model,
)
from .learn.embeddings import embed_text, task_representation
from .learn.search import expand_grid
from .llm.client import DiskCache, LLMClient, LLMError, RateLimiter, make_provider
from .llm.prompts import CONDITIONS, load_personalities
from .llm.subjects import AGENTS_PER_TASK, BATCH_SIZE, run_subjects, score_matrix

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger("riskychoice")

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_PROVIDER = 4

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "ridge": {"alpha": [0.01, 0.1, 1.0, 10.0]},
    "linear": {},
    "lasso": {"alpha": [1e-4, 1e-3, 1e-2]},
    "knn": {"k": [5, 10, 25, 50]},
    "svr": {"C": [0.1, 1.0, 10.0]},
    "mlp": {},
    "gbt": {"max_depth": [3, 6, 10]},
    "constant": {},
}


class ConfigInvalid(ValueError):
    pass


class Settings:
    """Flag > config table > default lookup for one subcommand."""

    def __init__(self, args: argparse.Namespace, config: dict, section: str):
        self.args = args
        self.config = config
        self.section = section
        self.resolved: dict[str, Any] = {}

    def get(self, key: str, default: Any = None, *, section: Optional[str] = None) -> Any:
        section = section or self.section
        flag = getattr(self.args, key, None)
        if flag is not None:
            value = flag
        elif key in self.config.get(section, {}):
            value = self.config[section][key]
        else:
            value = default
        self.resolved[f"{section}.{key}"] = value
        return value

    def require(self, key: str, *, section: Optional[str] = None) -> Any:
        value = self.get(key, section=section)
        if value is None:
            raise ConfigInvalid(f"--{key.replace('_', '-')} is required (flag or [{section or self.section}] {key})")
        return value

    def path(self, key: str, *, must_exist: bool = True, section: Optional[str] = None) -> Path:
        p = Path(self.require(key, section=section))
        if must_exist and not p.exists():
            raise ConfigInvalid(f"{key}: {p} does not exist")
        return p


def load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"config {path} is not valid TOML: {exc}") from exc


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file; flags override its values")
    p.add_argument("-o", "--output-dir", help="directory for artifacts and manifest.json (default: out)")
    p.add_argument("--seed", type=int, help="master random seed (default: 0)")
    p.add_argument("--log-level", help="logging level, e.g. INFO or DEBUG (default: WARNING)")


def _dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="dataset CSV path")
    p.add_argument(
        "--format",
        choices=["textual-csv", "numeric-csv", "synthetic"],
        help="dataset file format (default: textual-csv)",
    )


def _split_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--test-fraction", type=float, help="held-out test fraction (default: 0.10)")
    p.add_argument("--val-fraction", type=float, help="validation fraction of the remaining tasks (default: 0.10)")
    p.add_argument("--split-seed", type=int, help="seed of the pinned split shuffle (default: 0)")


def _provider_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--provider", choices=["mock", "openai"], help="LLM provider (default: mock)")
    p.add_argument("--endpoint", help="base URL of an OpenAI-compatible API")
    p.add_argument("--api-key-env", help="environment variable holding the API key (default: OPENAI_API_KEY)")
    p.add_argument("--model-id", help="chat model identifier (default: gpt-4o)")
    p.add_argument("--temperature", type=float, help="sampling temperature")
    p.add_argument("--parallelism", type=int, help="maximum concurrent provider calls (default: 1)")
    p.add_argument("--rate-limit", type=float, help="maximum requests per minute (default: unlimited)")
    p.add_argument("--cache-dir", help="directory for the response cache (default: <output-dir>/cache)")
    p.add_argument("--no-cache", action="store_true", default=None, help="disable the response cache")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskychoice",
        description="Predict Option-A choice rates for binary risky-choice tasks.",
    )
    parser.add_argument("--version", action="version", version=f"riskychoice {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("gen-synthetic", help="generate a BEAST-labeled numeric dataset")
    _common(p)
    p.add_argument("--n", type=int, help="number of tasks (default: 20000)")
    p.add_argument("--n-agents", type=int, help="simulated agents per task (default: 4000)")
    p.add_argument("--workers", type=int, help="worker threads; output does not depend on it (default: 1)")
    p.add_argument("--sure-thing-rate", type=float, help="share of tasks whose Option A is a sure thing")

    p = sub.add_parser("features", help="compute the seven behavioral features per task")
    _common(p)
    _dataset_args(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--numeric", dest="mode", action="store_const", const="numeric", help="exact features from lotteries")
    mode.add_argument("--textual", dest="mode", action="store_const", const="textual", help="LLM-extracted features from option texts")
    p.add_argument("--calls-per-feature", type=int, help="LLM calls averaged per feature (default: 3)")
    _provider_args(p)

    p = sub.add_parser("subjects", help="run LLM agents as simulated subjects")
    _common(p)
    _dataset_args(p)
    p.add_argument(
        "--condition",
        action="append",
        choices=[*CONDITIONS, "all"],
        help="prompting condition; repeatable (default: all)",
    )
    p.add_argument(
        "--personalities",
        choices=["all", "baseline", "personalities"],
        help="baseline only, the ten personalities only, or both (default: all)",
    )
    p.add_argument("--personality-file", help="JSON personality catalog replacing the shipped one")
    p.add_argument("--agents", type=int, help=f"agents per task and setting (default: {AGENTS_PER_TASK})")
    p.add_argument("--batch-size", type=int, help=f"tasks per session (default: {BATCH_SIZE})")
    p.add_argument(
        "--allow-partial-batch",
        action="store_true",
        default=None,
        help="allow a final session with fewer than batch-size tasks",
    )
    _provider_args(p)

    p = sub.add_parser("embed", help="embedding-difference representations v_A - v_B")
    _common(p)
    _dataset_args(p)
    p.add_argument("--embeddings-file", help="precomputed embedding file (JSON lines with a header)")
    p.add_argument("--embed-model", help="embedding model id (default: text-embedding-3-large)")
    p.add_argument("--save-embeddings", help="write every fetched vector to this embedding file")
    _provider_args(p)

    p = sub.add_parser("train", help="grid-search regressors on a representation")
    _common(p)
    _dataset_args(p)
    _split_args(p)
    p.add_argument("--representation", help="CSV with task_id plus one column per input feature")
    p.add_argument("--models", help="comma-separated regressor kinds (default: ridge,knn,gbt,constant)")
    p.add_argument("--pca-retain", type=float, help="fraction of input dimensions kept by PCA (default: off)")
    p.add_argument("--name", help="model name used in reports (default: best spec label)")
    p.add_argument("--training-data", help="training-data tag for reports")

    p = sub.add_parser("predict", help="apply a saved model to a representation")
    _common(p)
    p.add_argument("--model", help="saved model file from train")
    p.add_argument("--representation", help="CSV with task_id plus the model's input columns")

    p = sub.add_parser("evaluate", help="test MSE of one prediction file, or an ensemble of several")
    _common(p)
    _dataset_args(p)
    _split_args(p)
    p.add_argument("--predictions", action="append", help="task_id,prediction CSV; repeat to ensemble")
    p.add_argument("--name", help="model name in the report (default: predictions file stem)")
    p.add_argument("--training-data", help="training-data tag for the report")

    p = sub.add_parser("export-finetune", help="write prompt/completion JSON lines for external fine-tuning")
    _common(p)
    _dataset_args(p)
    _split_args(p)
    p.add_argument(
        "--partition",
        choices=["train", "val", "test", "trainval", "all"],
        help="which split partition to export (default: trainval)",
    )

    p = sub.add_parser("report", help="tabulate saved reports")
    _common(p)
    p.add_argument("--reports", action="append", help="report JSON written by train or evaluate; repeatable")
    p.add_argument("--table-format", choices=["plain", "markdown", "csv"], help="table format (default: plain)")
    p.add_argument(
        "--reference-baselines",
        action="store_true",
        default=None,
        help="append the published reference MSEs as extra rows",
    )
    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, argv: Sequence[str], st: Settings, outputs: Sequence[Path]) -> Path:
    manifest = {
        "command": command,
        "argv": list(argv),
        "settings": st.resolved,
        "config_fingerprint": fingerprint(st.resolved),
        "versions": {"riskychoice": __version__, "python": platform.python_version(), "numpy": np.__version__},
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_matrix(path: Path, ids: Sequence[str], columns: Sequence[str], mat: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["task_id", *columns])
        for tid, row in zip(ids, mat):
            w.writerow([tid, *(repr(float(v)) for v in row)])


def read_matrix(path: Path) -> tuple[list[str], list[str], np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "task_id":
            raise SchemaViolation(f"{path}: first column must be task_id")
        ids, rows = [], []
        for row in reader:
            ids.append(row[0])
            rows.append([float(v) for v in row[1:]])
    return ids, header[1:], np.array(rows, dtype=float).reshape(len(rows), len(header) - 1)


def _dataset(st: Settings) -> Dataset:
    return load_dataset(st.path("dataset"), st.get("format", "textual-csv"))


def _split(st: Settings, ds: Dataset):
    return split_dataset(
        ds,
        float(st.get("test_fraction", 0.10, section="split")),
        float(st.get("val_fraction", 0.10, section="split")),
        int(st.get("split_seed", 0, section="split")),
    )


def _client(st: Settings, out_dir: Path, default_temperature: float) -> LLMClient:
    g = lambda key, default=None: st.get(key, default, section="provider")  # noqa: E731
    kind = g("provider", "mock")
    provider = make_provider(
        kind, endpoint=g("endpoint", "https://api.openai.com/v1"), api_key_env=g("api_key_env", "OPENAI_API_KEY")
    )
    cache = None if g("no_cache", False) else DiskCache(g("cache_dir") or out_dir / "cache")
    rpm = g("rate_limit")
    return LLMClient(
        provider=provider,
        model_id=g("model_id", "gpt-4o"),
        temperature=float(g("temperature", default_temperature)),
        cache=cache,
        rate_limiter=RateLimiter(float(rpm)) if rpm else None,
        parallelism=int(g("parallelism", 1)),
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_gen_synthetic(st: Settings, out: Path) -> list[Path]:
    seed = int(st.get("seed", 0))
    n = int(st.get("n", 20_000))
    beast_cfg = dict(st.config.get("beast", {}))
    if st.get("n_agents") is not None:
        beast_cfg["n_agents"] = st.get("n_agents")
    space_cfg = dict(st.config.get("space", {}))
    if st.get("sure_thing_rate") is not None:
        space_cfg["sure_thing_rate"] = st.get("sure_thing_rate")
    try:
        params = BeastParams.from_dict(beast_cfg)
        space = SyntheticSpace.from_dict(space_cfg)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad [beast]/[space] settings: {exc}") from exc
    st.resolved["beast"] = params.to_dict()
    st.resolved["space"] = space.to_dict()
    tasks = generate_synthetic_dataset(n, space, params, seed, workers=int(st.get("workers", 1)))
    path = out / "synthetic.csv"
    meta = {"beast_params": params.to_dict(), "synthetic_space": space.to_dict(), "seed": seed, "n": n}
    save_dataset(Dataset("synthetic", tasks, "numeric"), path, metadata=meta)
    return [path, path.with_name(path.name + ".meta.json")]


def cmd_features(st: Settings, out: Path) -> list[Path]:
    ds = _dataset(st)
    mode = st.get("mode") or ("textual" if ds.modality == "textual" else "numeric")
    ids = [t.task_id for t in ds.tasks]
    if mode == "numeric":
        mat = feature_matrix(ds.tasks)
        flagged = None
    else:
        client = _client(st, out, default_temperature=0.0)
        calls = int(st.get("calls_per_feature", 3))
        seed = int(st.get("seed", 0))
        results = [textual_feature_vector(t, client, calls, seed=seed, detail=True) for t in ds.tasks]
        mat = np.vstack([r.vector.as_array() for r in results])
        flagged = {tid: r.flagged for tid, r in zip(ids, results) if any(r.flagged.values())}
    path = out / f"features_{mode}.csv"
    write_matrix(path, ids, FEATURE_NAMES, mat)
    outputs = [path]
    if flagged is not None:
        fpath = out / "features_flagged.json"
        fpath.write_text(json.dumps(flagged, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        outputs.append(fpath)
    return outputs


def cmd_subjects(st: Settings, out: Path) -> list[Path]:
    ds = _dataset(st)
    client = _client(st, out, default_temperature=1.0)
    conds = st.get("condition") or ["all"]
    conds = list(CONDITIONS) if "all" in conds else list(dict.fromkeys(conds))
    which = st.get("personalities", "all")
    catalog = load_personalities(st.get("personality_file"))
    settings = {"all": [None, *catalog], "baseline": [None], "personalities": list(catalog)}[which]
    records = run_subjects(
        client,
        ds.tasks,
        conditions=conds,
        personalities=settings,
        agents_per_task=int(st.get("agents", AGENTS_PER_TASK)),
        seed=int(st.get("seed", 0)),
        batch_size=int(st.get("batch_size", BATCH_SIZE)),
        strict=not st.get("allow_partial_batch", False),
    )
    rpath = out / "subject_responses.jsonl"
    rpath.write_text("".join(r.to_json() + "\n" for r in records), encoding="utf-8")
    outputs = [rpath]
    for cond in conds:
        ids, names, mat = score_matrix(records, cond)
        mpath = out / f"subject_scores_{cond}.csv"
        write_matrix(mpath, ids, names, mat)
        outputs.append(mpath)
    n_imputed = sum(r.imputed for r in records)
    if n_imputed:
        logger.warning("%d of %d subject responses were imputed", n_imputed, len(records))
    return outputs


def cmd_embed(st: Settings, out: Path) -> list[Path]:
    ds = _dataset(st)
    store_path = st.get("embeddings_file")
    store = EmbeddingStore.load(store_path) if store_path else None
    provider = cache = None
    if store is None or st.get("provider", section="provider"):
        client = _client(st, out, default_temperature=0.0)
        provider, cache = client.provider, client.cache
    model_id = st.get("embed_model", "text-embedding-3-large")
    fetched = EmbeddingStore(model_id=model_id)
    rows = []
    for t in ds.tasks:
        if not t.has_text:
            raise SchemaViolation(f"task {t.task_id} has no option texts")
        va, vb = (
            embed_text(x, provider, cache, store=store, model_id=model_id) for x in (t.option_a_text, t.option_b_text)
        )
        fetched.add(t.option_a_text, va)
        fetched.add(t.option_b_text, vb)
        rows.append(task_representation(va, vb))
    mat = np.vstack(rows)
    path = out / "embedding_diff.csv"
    write_matrix(path, [t.task_id for t in ds.tasks], [f"d{i}" for i in range(mat.shape[1])], mat)
    outputs = [path]
    save_to = st.get("save_embeddings")
    if save_to:
        fetched.save(save_to)
        outputs.append(Path(save_to))
    return outputs


def _specs(st: Settings) -> list[RegressorSpec]:
    models = st.get("models", "ridge,knn,gbt,constant")
    kinds = [m.strip() for m in models.split(",")] if isinstance(models, str) else list(models)
    grids = st.config.get("train", {}).get("grid", {})
    specs = []
    for kind in kinds:
        grid = grids.get(kind, DEFAULT_GRIDS.get(kind))
        if grid is None:
            raise ConfigInvalid(f"unknown regressor kind {kind!r}")
        grid = {k: v if isinstance(v, list) else [v] for k, v in grid.items()}
        specs.extend(expand_grid(kind, **grid) if grid else [RegressorSpec(kind)])
    return specs


def _align(ds: Dataset, rep_ids: Sequence[str], mat: np.ndarray, ids: Sequence[str]) -> np.ndarray:
    pos = {tid: i for i, tid in enumerate(rep_ids)}
    missing = [i for i in ids if i not in pos]
    if missing:
        raise MissingPredictions(missing)
    return mat[[pos[i] for i in ids]]


def cmd_train(st: Settings, out: Path) -> list[Path]:
    ds = _dataset(st)
    split = _split(st, ds)
    rep_ids, columns, mat = read_matrix(st.path("representation"))
    seed = int(st.get("seed", 0))
    X_tr, X_va, X_te = (_align(ds, rep_ids, mat, ids) for ids in (split.train_ids, split.val_ids, split.test_ids))
    y_tr, y_va = ds.labels(split.train_ids), ds.labels(split.val_ids)
    retain = st.get("pca_retain")
    pca = None
    if retain:
        pca = pca_fit(X_tr, float(retain))
        X_tr, X_va, X_te = (pca_apply(pca, x) for x in (X_tr, X_va, X_te))
    model, board = grid_search(_specs(st), X_tr, y_tr, X_va, y_va, seed)
    name = st.get("name") or model.spec.label
    model_path = out / "model.pkl"
    save_model(model, model_path, {"columns": columns, "pca": pca, "name": name})
    lb_path = out / "leaderboard.csv"
    with open(lb_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["spec", "val_mse", "error"])
        for row in board:
            w.writerow([row.spec.label, "" if row.val_mse is None else f"{row.val_mse:.6f}", row.error or ""])
    all_X = pca_apply(pca, mat) if pca else mat
    preds = dict(zip(rep_ids, predict(model, all_X).tolist()))
    pred_path = out / "predictions.csv"
    save_predictions(preds, pred_path)
    report = evaluate(
        preds, ds, split, model_name=name, training_data=st.get("training_data", ""), config=st.resolved
    )
    report.notes.extend(model.notes)
    rep_path = out / "report.json"
    report.save(rep_path)
    print(report_table([report]), end="")
    return [model_path, lb_path, pred_path, rep_path]


def cmd_predict(st: Settings, out: Path) -> list[Path]:
    model, extra = load_model(st.path("model"))
    rep_ids, columns, mat = read_matrix(st.path("representation"))
    if extra.get("columns") and list(extra["columns"]) != columns:
        raise ConfigInvalid("representation columns differ from those the model was trained on")
    if extra.get("pca") is not None:
        mat = pca_apply(extra["pca"], mat)
    path = out / "predictions.csv"
    save_predictions(dict(zip(rep_ids, predict(model, mat).tolist())), path)
    return [path]


def cmd_evaluate(st: Settings, out: Path) -> list[Path]:
    ds = _dataset(st)
    split = _split(st, ds)
    files = st.get("predictions")
    if not files:
        raise ConfigInvalid("--predictions is required")
    files = [files] if isinstance(files, str) else list(files)
    sets = [load_predictions(f) for f in files]
    name = st.get("name") or (Path(files[0]).stem if len(files) == 1 else f"ensemble(k={len(files)})")
    tag = st.get("training_data", "")
    if len(sets) == 1:
        report = evaluate(sets[0], ds, split, model_name=name, training_data=tag, config=st.resolved)
    else:
        report = evaluate_ensemble(sets, ds, split, model_name=name, training_data=tag, config=st.resolved)
    path = out / "report.json"
    report.save(path)
    print(report_table([report]), end="")
    return [path]


def cmd_export_finetune(st: Settings, out: Path) -> list[Path]:
    ds = _dataset(st)
    partition = st.get("partition", "trainval")
    split = None if partition == "all" else _split(st, ds)
    path = out / f"finetune_{partition}.jsonl"
    count = export_finetune_file(ds, split, partition, path)
    print(f"wrote {count} records to {path}")
    return [path]


def cmd_report(st: Settings, out: Path) -> list[Path]:
    paths = st.get("reports") or []
    paths = [paths] if isinstance(paths, str) else list(paths)
    if not paths and not st.get("reference_baselines"):
        raise ConfigInvalid("--reports is required")
    reports = [PredictionReport.load(p) for p in paths]
    fmt = st.get("table_format", "plain")
    text = report_table(reports, fmt, include_reference_baselines=bool(st.get("reference_baselines", False)))
    ext = {"plain": "txt", "markdown": "md", "csv": "csv"}[fmt]
    path = out / f"report_table.{ext}"
    path.write_text(text, encoding="utf-8")
    print(text, end="")
    return [path]


COMMANDS = {
    "gen-synthetic": cmd_gen_synthetic,
    "features": cmd_features,
    "subjects": cmd_subjects,
    "embed": cmd_embed,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "export-finetune": cmd_export_finetune,
    "report": cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        st = Settings(args, config, args.command)
        logging.basicConfig(level=str(st.get("log_level", "WARNING", section="run")).upper())
        out = Path(st.get("output_dir", "out", section="run"))
        out.mkdir(parents=True, exist_ok=True)
        outputs = COMMANDS[args.command](st, out)
        write_manifest(out, args.command, argv, st, outputs)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchemaViolation, MissingLabel, MissingPredictions, LotteryError, TaskError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except LLMError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
