"""Experiment driver.

    ovnet <command> --config run.json [--seed N] [--out DIR] [--set key=value ...]

A config file is a JSON object holding the command's parameters and,
optionally, ``"command"``. Command-line flags override file values. Relative
paths inside a config resolve against the config file's directory.

Every run writes ``run.json`` into the output directory with the resolved
config, its SHA-256 hash, the seed and a digest of every artifact. JSON
artifacts also carry a ``provenance`` block, and figures carry the same
information in their PNG metadata.

Exit status: 0 on success, 2 for invalid input (bad config, missing file,
violated precondition), 3 when the computation itself fails.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

from . import plotting
from .datasets import (
    NestedCubeSpec,
    canonical_planes,
    dataset_from_csv,
    dataset_to_csv,
    generate_level_r,
    random_sparse_clusters,
)
from .errors import OvnetError, ValidationError
from .geometry import dump_clusters, dump_planes, load_clusters, load_planes
from .metrics import (
    centroid_accuracy,
    evaluate_accuracy,
    level_r_op_counts,
    op_count_report,
    score_architecture,
    scores_to_csv,
)
from .network import dump_net, load_net
from .orientation import verify_separation
from .planner import PlannerConfig, incremental_separate
from .synthesis import synthesize
from .trainer import TrainConfig, init_weights, train_backprop

TRAIN_KEYS = ("learning_rate", "epochs", "batch_size", "beta", "init_scale",
              "momentum", "stop_at_train_accuracy")

DEFAULTS = {
    "generate": {"n": 3, "r": 1, "radius": None, "train_per_cluster": 100, "test_per_cluster": 50},
    "planes": {"n": 3, "r": 1},
    "plan": {"clusters": None, "random_clusters": None, "initial_planes": None,
             "margin_fraction": 0.4, "max_planes": 256, "pending_capacity": None},
    "verify": {"planes": None, "clusters": None},
    "synthesize": {"planes": None, "clusters": None, "class_count": None, "beta": 5.0,
                   "second_layer": "tanh"},
    "train": {"train": None, "test": None, "dataset": None, "architecture": None,
              "learning_rate": 0.05, "epochs": 500, "batch_size": 16, "beta": 1.0,
              "init_scale": 1.0, "momentum": 0.0, "stop_at_train_accuracy": None},
    "eval": {"model": None, "datasets": None, "clusters": None},
    "score": {"rows": None, "architectures": None, "dataset": None, "train_samples": None,
              "output_units": None, "workers": 1,
              "learning_rate": 0.05, "epochs": 500, "batch_size": 16, "beta": 1.0,
              "init_scale": 1.0, "momentum": 0.0, "stop_at_train_accuracy": None},
    "compare": {"n": 4, "r": 2, "q": None, "N": None, "r_max": None},
}


class Run:
    def __init__(self, command, cfg, seed, out: Path, base: Path):
        self.command = command
        self.cfg = cfg
        self.seed = seed
        self.out = out
        self.base = base
        self.config_hash = config_hash(cfg)
        self.artifacts: dict[str, str] = {}

    @property
    def provenance(self) -> dict:
        return {"command": self.command, "seed": self.seed, "config_hash": self.config_hash}

    def path(self, key) -> Path:
        value = self.cfg.get(key)
        if value is None:
            raise ValidationError(f"config field {key!r} is required")
        return self.resolve(value, key)

    def resolve(self, value, key) -> Path:
        p = Path(value)
        if not p.is_absolute():
            p = self.base / p
        if not p.exists():
            raise ValidationError(f"config field {key!r}: file {str(p)!r} does not exist")
        return p

    def write(self, name: str, text: str):
        data = text.encode()
        (self.out / name).write_bytes(data)
        self.artifacts[name] = hashlib.sha256(data).hexdigest()

    def write_json(self, name: str, obj: dict):
        obj = dict(obj)
        obj["provenance"] = self.provenance
        self.write(name, json.dumps(obj, indent=1))

    def figure(self, name: str, fn, *args):
        fn(*args, self.out / name, provenance=self.provenance)
        self.artifacts[name] = hashlib.sha256((self.out / name).read_bytes()).hexdigest()


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _read(path: Path) -> str:
    return path.read_text()


def _nested_spec(d: dict, seed: int) -> NestedCubeSpec:
    if not isinstance(d, dict):
        raise ValidationError("dataset spec must be a JSON object")
    allowed = {"n", "r", "radius", "train_per_cluster", "test_per_cluster"}
    unknown = set(d) - allowed
    if unknown:
        raise ValidationError(f"unknown dataset fields {sorted(unknown)}")
    return NestedCubeSpec(seed=seed, **d)


def _train_config(cfg: dict, seed: int) -> TrainConfig:
    return TrainConfig(seed=seed, **{k: cfg[k] for k in TRAIN_KEYS})


def _load_datasets(run: Run):
    if run.cfg.get("dataset") is not None:
        return generate_level_r(_nested_spec(run.cfg["dataset"], run.seed))
    train = dataset_from_csv(_read(run.path("train")))
    test = dataset_from_csv(_read(run.path("test")))
    return train, test


# ---------------------------------------------------------------- commands

def cmd_generate(run: Run):
    c = run.cfg
    spec = NestedCubeSpec(c["n"], c["r"], c["radius"], c["train_per_cluster"],
                          c["test_per_cluster"], run.seed)
    train, test = generate_level_r(spec)
    run.write("train.csv", dataset_to_csv(train))
    run.write("test.csv", dataset_to_csv(test))
    run.write("clusters.json", dump_clusters(train.clusters))
    run.write_json("dataset.json", {
        "spec": spec.to_dict(),
        "clusters": len(train.clusters),
        "classes": train.class_count,
        "train_samples": len(train),
        "test_samples": len(test),
    })
    if len(train):
        run.figure("dataset.png", plotting.dataset_projection, train)


def cmd_planes(run: Run):
    run.write("planes.json", dump_planes(canonical_planes(run.cfg["n"], run.cfg["r"])))


def cmd_plan(run: Run):
    c = run.cfg
    if c["clusters"] is not None:
        clusters = load_clusters(_read(run.path("clusters")))
    elif c["random_clusters"] is not None:
        params = dict(c["random_clusters"])
        clusters = random_sparse_clusters(seed=run.seed, **params)
        run.write("clusters.json", dump_clusters(clusters))
    else:
        raise ValidationError("plan needs 'clusters' (a file) or 'random_clusters' (generator settings)")
    initial = load_planes(_read(run.path("initial_planes"))) if c["initial_planes"] else []
    pcfg = PlannerConfig(c["margin_fraction"], c["max_planes"], run.seed, c["pending_capacity"])
    try:
        planes, trace = incremental_separate(clusters, initial, pcfg)
    except OvnetError as exc:
        trace = getattr(exc, "trace", None)
        if trace is not None:
            run.write_json("trace.json", trace.to_dict())
        raise
    run.write("planes.json", dump_planes(planes))
    run.write_json("trace.json", trace.to_dict())
    run.write_json("separation.json", verify_separation(planes, clusters).to_dict())


def cmd_verify(run: Run):
    planes = load_planes(_read(run.path("planes")))
    clusters = load_clusters(_read(run.path("clusters")))
    report = verify_separation(planes, clusters)
    run.write_json("separation.json", report.to_dict())
    print(f"separated: {report.separated}  duplicates: {len(report.duplicate_groups)}  "
          f"cuts: {len(report.cut_clusters)}")


def cmd_synthesize(run: Run):
    c = run.cfg
    planes = load_planes(_read(run.path("planes")))
    clusters = load_clusters(_read(run.path("clusters")))
    net = synthesize(planes, clusters, c["class_count"], c["beta"], c["second_layer"])
    run.write("model.json", dump_net(net, provenance=run.provenance))


def cmd_train(run: Run):
    arch = run.cfg["architecture"]
    if not arch:
        raise ValidationError("config field 'architecture' is required")
    train, test = _load_datasets(run)
    tcfg = _train_config(run.cfg, run.seed)
    net = init_weights(arch, run.seed, tcfg.init_scale, tcfg.beta)
    net, report = train_backprop(net, train, test, tcfg)
    run.write("model.json", dump_net(net, provenance=run.provenance))
    run.write_json("train_report.json", report.to_dict())
    run.write("losses.csv", report.losses_csv())
    run.figure("loss.png", partial(plotting.loss_curve, title="-".join(map(str, arch))),
               report.epoch_losses)
    print(f"train accuracy {report.final_train_accuracy:.5f}  "
          f"test accuracy {report.final_test_accuracy:.5f}  epochs {report.epochs_run}")


def cmd_eval(run: Run):
    net = load_net(_read(run.path("model")))
    sets = run.cfg["datasets"]
    if not isinstance(sets, dict) or not sets:
        raise ValidationError("config field 'datasets' must map split names to CSV files")
    clusters = load_clusters(_read(run.path("clusters"))) if run.cfg["clusters"] else None
    results = {}
    for name, rel in sets.items():
        ds = dataset_from_csv(_read(run.resolve(rel, f"datasets.{name}")), clusters)
        results[name] = {"samples": len(ds), "accuracy": evaluate_accuracy(net, ds)}
        if clusters is not None:
            results[name]["centroid_baseline_accuracy"] = centroid_accuracy(ds)
    run.write_json("accuracy.json", {"arch": list(net.arch), "splits": results})
    for name, r in results.items():
        print(f"{name}: {r['accuracy']:.5f}")


def _train_one(args):
    arch, spec_dict, seed, tcfg = args
    train, test = generate_level_r(_nested_spec(spec_dict, seed))
    net = init_weights(arch, seed, tcfg.init_scale, tcfg.beta)
    _, report = train_backprop(net, train, test, tcfg)
    return len(train), report.final_train_accuracy, report.final_test_accuracy


def cmd_score(run: Run):
    c = run.cfg
    scores = []
    if c["rows"] is not None:
        if c["train_samples"] is None:
            raise ValidationError("config field 'train_samples' is required with 'rows'")
        for row in c["rows"]:
            scores.append(score_architecture(row["architecture"], c["train_samples"],
                                             row["train_accuracy"], row["test_accuracy"],
                                             c["output_units"]))
    elif c["architectures"] is not None:
        if c["dataset"] is None:
            raise ValidationError("config field 'dataset' is required with 'architectures'")
        tcfg = _train_config(c, run.seed)
        jobs = [(arch, c["dataset"], run.seed, tcfg) for arch in c["architectures"]]
        if c["workers"] > 1:
            with ProcessPoolExecutor(c["workers"]) as pool:
                results = list(pool.map(_train_one, jobs))
        else:
            results = [_train_one(j) for j in jobs]
        for arch, (samples, tr, te) in zip(c["architectures"], results):
            scores.append(score_architecture(arch, c["train_samples"] or samples, tr, te,
                                             c["output_units"]))
    else:
        raise ValidationError("score needs 'rows' (precomputed accuracies) or 'architectures'")
    run.write("scores.csv", scores_to_csv(scores))
    run.figure("scores.png", plotting.score_bars, scores)


def cmd_compare(run: Run):
    c = run.cfg
    if c["q"] is not None or c["N"] is not None:
        if c["q"] is None or c["N"] is None:
            raise ValidationError("'q' and 'N' must be given together")
        report = op_count_report(c["q"], c["n"], c["N"])
        run.write_json("opcount.json", report.to_dict())
        return
    report = level_r_op_counts(c["n"], c["r"])
    run.write_json("opcount.json", dict(report.to_dict(), r=c["r"]))
    r_max = c["r_max"] or max(c["r"], 3)
    rows = [level_r_op_counts(c["n"], r) for r in range(1, r_max + 1)]
    lines = ["r,planes,clusters,linear_ops,distance_ops,ratio"]
    lines += [f"{r},{o.planes},{o.clusters},{o.linear_ops},{o.distance_ops},{o.ratio!r}"
              for r, o in enumerate(rows, start=1)]
    run.write("opcount_scaling.csv", "\n".join(lines) + "\n")
    run.figure("opcount.png", plotting.op_count_scaling,
               [(r, o.linear_ops, o.distance_ops) for r, o in enumerate(rows, start=1)])
    print(f"{report.linear_ops} plane multiply-adds vs {report.distance_ops} distance multiply-adds")


COMMANDS = {
    "generate": cmd_generate,
    "planes": cmd_planes,
    "plan": cmd_plan,
    "verify": cmd_verify,
    "synthesize": cmd_synthesize,
    "train": cmd_train,
    "eval": cmd_eval,
    "score": cmd_score,
    "compare": cmd_compare,
}


def _parse_override(item: str):
    if "=" not in item:
        raise ValidationError(f"--set expects key=value, got {item!r}")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def resolve_config(command: str, config_path: str | None, seed: int | None,
                   overrides: list[str]) -> tuple[dict, int, Path, str | None]:
    cfg = dict(DEFAULTS[command])
    base = Path.cwd()
    file_out = None
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise ValidationError(f"config file {config_path!r} does not exist")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file {config_path!r} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object")
        declared = data.pop("command", command)
        if declared != command:
            raise ValidationError(f"config is for command {declared!r}, not {command!r}")
        file_out = data.pop("out", None)
        base = path.resolve().parent
        cfg_seed = data.pop("seed", None)
        if seed is None:
            seed = cfg_seed
        for key, value in data.items():
            if key not in cfg:
                raise ValidationError(f"unknown config field {key!r} for {command}")
            cfg[key] = value
    for item in overrides:
        key, value = _parse_override(item)
        if key == "seed":
            seed = value
            continue
        if key not in cfg:
            raise ValidationError(f"unknown config field {key!r} for {command}")
        cfg[key] = value
    seed = 0 if seed is None else seed
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    cfg["seed"] = seed
    return cfg, seed, base, file_out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ovnet", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="output directory (default: ./out)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config field (JSON value)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, seed, base, file_out = resolve_config(args.command, args.config, args.seed, args.overrides)
        if args.out:
            out = Path(args.out)
        elif file_out:
            # relative to the config file, like every other path in it
            out = base / file_out
        else:
            out = Path("out")
        out.mkdir(parents=True, exist_ok=True)
        run = Run(args.command, cfg, seed, out, base)
        COMMANDS[args.command](run)
        manifest = dict(run.provenance, config=cfg, artifacts=run.artifacts)
        (out / "run.json").write_text(json.dumps(manifest, indent=1))
    except (ValidationError, TypeError) as exc:
        print(f"ovnet {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2
    except OvnetError as exc:
        print(f"ovnet {args.command}: failed: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
