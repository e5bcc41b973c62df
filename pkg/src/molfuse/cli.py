"""Command-line interface: the full workflow as subcommands.

Exit codes: 0 ok, 2 usage/configuration, 3 data error, 4 runtime/numeric
error.  Every failure prints a single line to stderr of the form
``error[<kind>]: <message>`` where ``<kind>`` is one of ``usage``,
``config``, ``data``, ``runtime``.

Training runs are driven by a JSON config document (see ``DEFAULT_CONFIG``)
with flag overrides; the fully resolved config is persisted into the run
directory so any run can be reproduced from its artifacts alone.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .chem import FEATURE_DIM, parse_smiles, featurize, render_prompt
from .errors import (ConfigError, DataError, MaskError, MolfuseError,
                     NumericError, ParseError, ShapeError)
from .knowledge import (BuiltinProvider, ChatClientConfig, generate_knowledge,
                        save_embeddings)
from .model import (FusionConfig, GinConfig, HeadConfig, VARIANTS,
                    build_variant, load_checkpoint, model_forward)
from .model.network import CLASSIFICATION as HEAD_CLASSIFICATION
from .model.network import REGRESSION as HEAD_REGRESSION
from .pipeline import (TrainConfig, analyze_features, assign_splits,
                       attach_knowledge, destandardize, evaluate,
                       generate_fixtures, get_task, load_dataset,
                       load_knowledge_texts, standardize_targets, train_model)
from .pipeline.dataset import write_skip_log
from .pipeline.tasks import REGRESSION, task_names

SCHEMA_VERSION = 1

DEFAULT_CONFIG: dict = {
    "schema_version": SCHEMA_VERSION,
    "task": None,
    "variant": "full",
    "seed": 0,
    "out_dir": None,
    "data": {
        "csv": None,
        "knowledge": None,
        "allow_skips": False,
    },
    "split": {
        "policy": None,       # null -> task default
        "fractions": None,    # null -> task default
    },
    "provider": {
        "kind": "builtin",
        "dim": 64,
        "seed": 0,
    },
    "model": {
        "gin_layers": 5,
        "gin_hidden": 128,
        "fusion_width": 128,
        "fusion_heads": 4,
        "fusion_expansion": 4,
        "fusion_blocks": 1,
        "head_dropout": 0.5,
    },
    "train": {
        "max_epochs": 100,
        "batch_size": 128,
        "lr": 3e-4,
        "weight_decay": 1e-3,
        "scheduler_factor": 0.5,
        "scheduler_patience": 5,
        "early_stop_patience": 10,
        "gate_lr_scale": 1.0,
    },
}

# maps train-command flag dest names onto config paths
_FLAG_PATHS: dict[str, tuple[str, ...]] = {
    "task": ("task",),
    "variant": ("variant",),
    "seed": ("seed",),
    "out": ("out_dir",),
    "dataset": ("data", "csv"),
    "knowledge": ("data", "knowledge"),
    "allow_skips": ("data", "allow_skips"),
    "policy": ("split", "policy"),
    "fractions": ("split", "fractions"),
    "provider_dim": ("provider", "dim"),
    "provider_seed": ("provider", "seed"),
    "gin_layers": ("model", "gin_layers"),
    "gin_hidden": ("model", "gin_hidden"),
    "fusion_width": ("model", "fusion_width"),
    "fusion_heads": ("model", "fusion_heads"),
    "fusion_expansion": ("model", "fusion_expansion"),
    "fusion_blocks": ("model", "fusion_blocks"),
    "head_dropout": ("model", "head_dropout"),
    "max_epochs": ("train", "max_epochs"),
    "batch_size": ("train", "batch_size"),
    "lr": ("train", "lr"),
    "weight_decay": ("train", "weight_decay"),
    "scheduler_factor": ("train", "scheduler_factor"),
    "scheduler_patience": ("train", "scheduler_patience"),
    "early_stop_patience": ("train", "early_stop_patience"),
    "gate_lr_scale": ("train", "gate_lr_scale"),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting so main() owns codes."""

    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# config resolution


def _merge_config(base: dict, override: dict, path: str = "") -> None:
    """Recursive merge; any key absent from the schema is rejected."""
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {path + key!r} must be an object")
            _merge_config(base[key], value, path + key + ".")
        else:
            base[key] = value


def _parse_fractions(text: str) -> list[float]:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"fractions must be comma-separated numbers: {text!r}") from exc
    if len(parts) != 3:
        raise ConfigError("fractions must be three numbers: train,valid,test")
    return parts


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults <- config file <- explicit flags, unknown keys rejected."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        version = loaded.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(
                f"unsupported config schema_version {version} (expected {SCHEMA_VERSION})")
        _merge_config(config, loaded)
    for dest, path_keys in _FLAG_PATHS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        node = config
        for key in path_keys[:-1]:
            node = node[key]
        node[path_keys[-1]] = value
    if config["split"]["fractions"] is not None:
        fractions = config["split"]["fractions"]
        if isinstance(fractions, str):
            fractions = _parse_fractions(fractions)
        config["split"]["fractions"] = [float(f) for f in fractions]
    return config


def _require(config: dict, value, flag: str):
    if value is None:
        raise ConfigError(f"missing required setting {flag} (flag or config file)")
    return value


def _spec_from_config(config: dict):
    overrides: dict = {"seed": int(config["seed"])}
    if config["split"]["policy"] is not None:
        overrides["split_policy"] = config["split"]["policy"]
    if config["split"]["fractions"] is not None:
        overrides["fractions"] = tuple(config["split"]["fractions"])
    return get_task(config["task"], **overrides)


def _load_bundle(config: dict):
    spec = _spec_from_config(config)
    csv_path = _require(config, config["data"]["csv"], "--dataset")
    bundle = load_dataset(csv_path, spec, allow_skips=bool(config["data"]["allow_skips"]))
    assign_splits(bundle)
    return bundle


def _provider_from_config(config: dict) -> BuiltinProvider:
    provider_cfg = config["provider"]
    if provider_cfg["kind"] != "builtin":
        raise ConfigError(
            f"unknown provider kind {provider_cfg['kind']!r}; available: builtin")
    return BuiltinProvider(native_dim=int(provider_cfg["dim"]),
                           seed=int(provider_cfg["seed"]))


def _attach_knowledge_if_needed(config: dict, bundle, variant: str) -> None:
    if variant not in ("full", "chem_only"):
        return
    knowledge_path = config["data"]["knowledge"]
    if knowledge_path is None:
        raise ConfigError(
            f"variant {variant!r} needs chemist knowledge text; pass --knowledge")
    texts = load_knowledge_texts(knowledge_path)
    attach_knowledge(bundle, texts, _provider_from_config(config))


def _build_model_from_config(config: dict, spec) -> "object":
    model_cfg = config["model"]
    head_type = HEAD_REGRESSION if spec.task_type == REGRESSION else HEAD_CLASSIFICATION
    return build_variant(
        config["variant"],
        gin_cfg=GinConfig(num_layers=int(model_cfg["gin_layers"]),
                          hidden=int(model_cfg["gin_hidden"]),
                          input_dim=FEATURE_DIM),
        fusion_cfg=FusionConfig(width=int(model_cfg["fusion_width"]),
                                heads=int(model_cfg["fusion_heads"]),
                                ffn_expansion=int(model_cfg["fusion_expansion"]),
                                num_blocks=int(model_cfg["fusion_blocks"])),
        head_cfg=HeadConfig(input_dim=int(model_cfg["fusion_width"]),
                            tasks=spec.num_tasks,
                            task_type=head_type,
                            dropout=float(model_cfg["head_dropout"])),
        knowledge_dim=int(config["provider"]["dim"]),
        seed=int(config["seed"]),
    )


# ---------------------------------------------------------------------------
# checkpoint-driven reconstruction (eval / predict / analyze / serve)


def _spec_from_extra(extra: dict, seed_override: int | None = None):
    if "task" not in extra:
        raise DataError("checkpoint carries no task name; cannot rebuild the dataset")
    overrides: dict = {}
    if seed_override is not None:
        overrides["seed"] = seed_override
    elif "split_seed" in extra:
        overrides["seed"] = int(extra["split_seed"])
    if "split_policy" in extra and extra["split_policy"]:
        overrides["split_policy"] = extra["split_policy"]
    if "split_fractions" in extra and extra["split_fractions"]:
        overrides["fractions"] = tuple(extra["split_fractions"])
    return get_task(extra["task"], **overrides)


def _provider_from_extra(extra: dict, model, seed_override: int | None = None) -> BuiltinProvider:
    dim = int(extra.get("provider_dim", model.knowledge_dim))
    if dim != model.knowledge_dim:
        raise ConfigError(
            f"provider dim {dim} does not match model knowledge width {model.knowledge_dim}")
    seed = seed_override if seed_override is not None else int(extra.get("provider_seed", 0))
    return BuiltinProvider(native_dim=dim, seed=seed)


def _rebuild_bundle(model, extra: dict, dataset: str, knowledge: str | None,
                    allow_skips: bool, provider_seed: int | None):
    spec = _spec_from_extra(extra)
    bundle = load_dataset(dataset, spec, allow_skips=allow_skips)
    assign_splits(bundle)
    if spec.task_type == REGRESSION and "label_mean" in extra:
        standardize_targets(bundle, mean=float(extra["label_mean"]),
                            std=float(extra["label_std"]))
    if model.variant in ("full", "chem_only"):
        if knowledge is None:
            raise ConfigError(
                f"variant {model.variant!r} needs chemist knowledge text; pass --knowledge")
        texts = load_knowledge_texts(knowledge)
        attach_knowledge(bundle, texts, _provider_from_extra(extra, model, provider_seed))
    return bundle


def _gate_values(model) -> dict | None:
    if model.variant != "full":
        return None
    gates: dict[str, list[float]] = {"xattn": [], "dense": []}
    for block in range(model.fusion_cfg.num_blocks):
        base = f"fusion.block{block}"
        gates["xattn"].append(float(np.tanh(model.params[f"{base}.alpha_xattn"].data)))
        gates["dense"].append(float(np.tanh(model.params[f"{base}.alpha_dense"].data)))
    return gates


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# subcommands


def cmd_synth(args) -> int:
    out = Path(args.out)
    paths = generate_fixtures(out)
    _emit({"out_dir": str(out),
           "files": sorted(Path(p).name for p in paths.values())})
    return 0


def cmd_prompt(args) -> int:
    spec = get_task(args.task)
    bundle = load_dataset(args.dataset, spec, allow_skips=args.allow_skips)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for record in bundle.records:
        text = render_prompt(record.graph, spec)
        (out / f"{record.rid}.txt").write_text(text, encoding="utf-8")
    with (out / "index.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "smiles"])
        for record in bundle.records:
            writer.writerow([record.rid, record.smiles])
    if bundle.skip_log:
        write_skip_log(bundle, out / "skips.csv")
    _emit({"prompts": len(bundle.records), "skipped": len(bundle.skip_log),
           "out_dir": str(out)})
    return 0


def cmd_generate(args) -> int:
    prompts_dir = Path(args.prompts)
    index_path = prompts_dir / "index.csv"
    if not index_path.exists():
        raise DataError(f"prompt index not found: {index_path} (run the prompt command)")
    rows: list[tuple[str, str]] = []
    with index_path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append((row["id"], row["smiles"]))
    config = ChatClientConfig.from_env(cache_dir=args.cache_dir)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = 0
    with out.open("w", encoding="utf-8") as fh:
        for rid, smiles in rows:
            prompt_path = prompts_dir / f"{rid}.txt"
            if not prompt_path.exists():
                raise DataError(f"prompt file missing for {rid}: {prompt_path}")
            text = generate_knowledge(prompt_path.read_text(encoding="utf-8"), config)
            fh.write(json.dumps({"smiles": smiles, "text": text}, sort_keys=True) + "\n")
            written += 1
    _emit({"responses": written, "out": str(out), "cache_dir": str(args.cache_dir)})
    return 0


def cmd_embed(args) -> int:
    texts = load_knowledge_texts(args.texts)
    if not texts:
        raise DataError(f"no knowledge rows found in {args.texts}")
    provider = BuiltinProvider(native_dim=args.dim, seed=args.provider_seed)
    items = {smiles: provider.embed(text) for smiles, text in texts.items()}
    index_path = save_embeddings(args.out, items)
    _emit({"entries": len(items), "dim": args.dim,
           "provider": provider.id, "index": str(index_path)})
    return 0


def cmd_split(args) -> int:
    config = resolve_config(args)
    _require(config, config["task"], "--task")
    bundle = _load_bundle(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "splits.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "split", "scaffold"])
        for record in bundle.records:
            writer.writerow([record.rid, record.split, record.scaffold])
    write_skip_log(bundle, out / "skips.csv")
    counts = {name: len(bundle.split_records(name)) for name in ("train", "valid", "test")}
    total = sum(counts.values())
    _emit({"counts": counts, "skipped": len(bundle.skip_log),
           "fractions": {k: v / total for k, v in counts.items()},
           "out_dir": str(out)})
    return 0


def cmd_train(args) -> int:
    config = resolve_config(args)
    _require(config, config["task"], "--task")
    out_dir = _require(config, config["out_dir"], "--out")
    if config["variant"] not in VARIANTS:
        raise ConfigError(
            f"unknown variant {config['variant']!r}; expected one of {VARIANTS}")
    if config["variant"] in ("full", "chem_only") and config["data"]["knowledge"] is None:
        raise ConfigError(
            f"variant {config['variant']!r} needs chemist knowledge text; pass --knowledge")
    bundle = _load_bundle(config)
    if bundle.spec.task_type == REGRESSION:
        standardize_targets(bundle)
    _attach_knowledge_if_needed(config, bundle, config["variant"])
    model = _build_model_from_config(config, bundle.spec)
    train_cfg = TrainConfig(seed=int(config["seed"]),
                            **{k: v for k, v in config["train"].items()})
    ckpt_extra = {
        "schema_version": SCHEMA_VERSION,
        "provider_kind": config["provider"]["kind"],
        "provider_dim": int(config["provider"]["dim"]),
        "provider_seed": int(config["provider"]["seed"]),
        "split_policy": bundle.spec.split_policy,
        "split_fractions": list(bundle.spec.fractions),
        "split_seed": bundle.spec.seed,
    }
    result = train_model(model, bundle, train_cfg, out_dir=out_dir,
                         run_config=config, ckpt_extra=ckpt_extra)
    write_skip_log(bundle, Path(out_dir) / "skips.csv")
    _emit({
        "out_dir": str(out_dir),
        "variant": model.variant,
        "task": bundle.spec.name,
        "best_epoch": result.best_epoch,
        "best_val_metric": result.best_metric,
        "epochs_run": len(result.reports),
        "test": {k: v for k, v in result.test_metrics.items() if k != "split"},
    })
    return 0


def cmd_eval(args) -> int:
    model, extra = load_checkpoint(args.checkpoint)
    bundle = _rebuild_bundle(model, extra, args.dataset, args.knowledge,
                             args.allow_skips, args.provider_seed)
    metrics = evaluate(model, bundle, args.split)
    _emit(metrics)
    return 0


def cmd_predict(args) -> int:
    model, extra = load_checkpoint(args.checkpoint)
    graph = parse_smiles(args.smiles)
    features = featurize(graph)
    edges = [(i, j) for i, j, _ in graph.bonds]
    chem = None
    if model.variant in ("full", "chem_only"):
        if not args.knowledge_text or not args.knowledge_text.strip():
            raise ConfigError(
                f"variant {model.variant!r} needs --knowledge-text")
        provider = _provider_from_extra(extra, model, args.provider_seed)
        chem = provider.embed(args.knowledge_text)
    outputs, _ = model_forward(
        model,
        features if model.variant != "chem_only" else None,
        edges if model.variant != "chem_only" else None,
        chem,
        training=False,
    )
    values = outputs.data.astype(float)
    task_name = extra.get("task")
    if task_name:
        spec = get_task(task_name)
        columns = list(spec.label_columns)
    else:
        columns = [f"task_{i}" for i in range(values.shape[0])]
    if model.head_cfg.task_type == HEAD_REGRESSION and "label_mean" in extra:
        spec = get_task(task_name).with_stats(float(extra["label_mean"]),
                                              float(extra["label_std"]))
        values = destandardize(spec, values)
    _emit({
        "smiles": args.smiles,
        "task": task_name,
        "task_type": model.head_cfg.task_type,
        "variant": model.variant,
        "outputs": {name: float(v) for name, v in zip(columns, values)},
        "gates": _gate_values(model),
    })
    return 0


def cmd_analyze(args) -> int:
    model, extra = load_checkpoint(args.checkpoint)
    bundle = _rebuild_bundle(model, extra, args.dataset, args.knowledge,
                             args.allow_skips, args.provider_seed)
    out = Path(args.out)
    results = analyze_features(model, bundle, split=args.split, out_dir=out)
    summary = {
        rep: {
            "samples": len(data["ids"]),
            "explained_variance": [float(v) for v in data["explained_variance"]],
            "mean_entropy": float(np.mean(data["entropy"])),
        }
        for rep, data in results.items()
    }
    _emit({"out_dir": str(out), "representations": summary})
    return 0


def cmd_serve(args) -> int:
    from .server import run_server
    run_server(checkpoint=args.checkpoint, host=args.host, port=args.port,
               provider_seed=args.provider_seed, static_dir=args.static)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_config_flags(parser: argparse.ArgumentParser, *, with_model: bool) -> None:
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--task", help="registered task name "
                                       f"({', '.join(task_names())})")
    parser.add_argument("--dataset", help="CSV file with SMILES and labels")
    parser.add_argument("--seed", type=int, help="seed for splits, init, shuffling")
    parser.add_argument("--policy", choices=("scaffold", "random"),
                        help="split policy override")
    parser.add_argument("--fractions", help="train,valid,test fractions, e.g. 0.8,0.1,0.1")
    parser.add_argument("--allow-skips", action="store_const", const=True,
                        dest="allow_skips", default=None,
                        help="tolerate a skip rate above the 5%% gate")
    if with_model:
        parser.add_argument("--variant", choices=VARIANTS, help="model variant")
        parser.add_argument("--knowledge", help="JSONL of {smiles, text} chemist notes")
        parser.add_argument("--provider-dim", type=int, dest="provider_dim",
                            help="knowledge embedding width")
        parser.add_argument("--provider-seed", type=int, dest="provider_seed",
                            help="builtin embedding provider seed")
        parser.add_argument("--gin-layers", type=int, dest="gin_layers")
        parser.add_argument("--gin-hidden", type=int, dest="gin_hidden")
        parser.add_argument("--fusion-width", type=int, dest="fusion_width")
        parser.add_argument("--fusion-heads", type=int, dest="fusion_heads")
        parser.add_argument("--fusion-expansion", type=int, dest="fusion_expansion")
        parser.add_argument("--fusion-blocks", type=int, dest="fusion_blocks")
        parser.add_argument("--head-dropout", type=float, dest="head_dropout")
        parser.add_argument("--max-epochs", type=int, dest="max_epochs")
        parser.add_argument("--batch-size", type=int, dest="batch_size")
        parser.add_argument("--lr", type=float)
        parser.add_argument("--weight-decay", type=float, dest="weight_decay")
        parser.add_argument("--scheduler-factor", type=float, dest="scheduler_factor")
        parser.add_argument("--scheduler-patience", type=int, dest="scheduler_patience")
        parser.add_argument("--early-stop-patience", type=int, dest="early_stop_patience")
        parser.add_argument("--gate-lr-scale", type=float, dest="gate_lr_scale")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="molfuse",
        description="Multi-modal molecular property prediction: graph network "
                    "plus chemist-knowledge text fused by gated cross-attention.",
        epilog="exit codes: 0 ok, 2 usage/config, 3 data error, 4 runtime error",
    )
    parser.add_argument("--version", action="version", version=f"molfuse {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("synth", help="write the bundled synthetic benchmark CSVs")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("prompt", help="render per-molecule knowledge-extraction prompts")
    p.add_argument("--dataset", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--out", required=True, help="directory for prompt files")
    p.add_argument("--allow-skips", action="store_true")
    p.set_defaults(func=cmd_prompt)

    p = sub.add_parser("generate", help="call the chat service for each prompt (cached)")
    p.add_argument("--prompts", required=True, help="directory written by the prompt command")
    p.add_argument("--cache-dir", required=True, dest="cache_dir")
    p.add_argument("--out", required=True, help="output JSONL of {smiles, text}")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("embed", help="embed knowledge texts into a binary container")
    p.add_argument("--texts", required=True, help="JSONL of {smiles, text}")
    p.add_argument("--provider", choices=("builtin",), default="builtin")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--provider-seed", type=int, default=0, dest="provider_seed")
    p.add_argument("--out", required=True, help="output directory for the container")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("split", help="assign scaffold/random splits and write the table")
    _add_config_flags(p, with_model=False)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a model variant and write the run directory")
    _add_config_flags(p, with_model=True)
    p.add_argument("--out", help="run directory (artifacts + checkpoint)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint on a dataset split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--split", default="test", choices=("train", "valid", "test"))
    p.add_argument("--knowledge", help="JSONL of {smiles, text} chemist notes")
    p.add_argument("--allow-skips", action="store_true")
    p.add_argument("--provider-seed", type=int, dest="provider_seed")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="one-off prediction for a single molecule")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--smiles", required=True)
    p.add_argument("--knowledge-text", dest="knowledge_text",
                   help="chemist note fused with the molecular graph")
    p.add_argument("--provider-seed", type=int, dest="provider_seed")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("analyze", help="feature diagnostics: PCA, entropy, correlation")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="directory for CSV tables and SVG figures")
    p.add_argument("--split", choices=("train", "valid", "test"))
    p.add_argument("--knowledge", help="JSONL of {smiles, text} chemist notes")
    p.add_argument("--allow-skips", action="store_true")
    p.add_argument("--provider-seed", type=int, dest="provider_seed")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="serve the HTTP prediction API over a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--provider-seed", type=int, dest="provider_seed")
    p.add_argument("--static", help="directory of static files to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def _fail(kind: str, exc: BaseException, code: int) -> int:
    message = " ".join(str(exc).split()) or exc.__class__.__name__
    print(f"error[{kind}]: {message}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail("usage", exc, 2)
    try:
        return int(args.func(args) or 0)
    except _UsageError as exc:
        return _fail("usage", exc, 2)
    except ConfigError as exc:
        return _fail("config", exc, 2)
    except ParseError as exc:
        return _fail("data", exc, 3)
    except DataError as exc:
        return _fail("data", exc, 3)
    except OSError as exc:
        return _fail("data", exc, 3)
    except (NumericError, ShapeError, MaskError) as exc:
        return _fail("runtime", exc, 4)
    except MolfuseError as exc:
        return _fail("runtime", exc, 4)


if __name__ == "__main__":
    sys.exit(main())
