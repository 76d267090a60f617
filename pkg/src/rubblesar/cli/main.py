"""`rubblesar` command-line entry point.

Exit codes: 0 success, 2 I/O or configuration error, 3 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from collections import Counter

from ..fusion import (MODEL_KINDS, DatasetFormatError, ModelFormatError, SingleClassError,
                      dataset_from_csv, dataset_to_csv, dumps_model, evaluate, generate_dataset,
                      loads_model, permutation_importance, stratified_split, train_model)
from ..mission import FleetSpec, UntrainedModelError, run_mission, size_fleet
from ..radar import FEATURE_NAMES, ScenarioTag
from ..scene import (InfeasibleSpecError, empty_scenario, find_clusters, generate_scenario,
                     scenario_from_toml)
from .config import ConfigError, load_config, parse_value

EXIT_OK, EXIT_IO, EXIT_DOMAIN = 0, 2, 3

SWEEP_ROWS = ("StableWood", "StableWoodBricks", "HoverWoodBricks", "Combined")
METRIC_COLUMNS = ("accuracy", "precision", "recall", "f1")


class DomainError(ValueError):
    """Valid input that the models or simulation cannot act on; exit code 3."""


# -- artifact helpers ----------------------------------------------------------

def _comment(provenance):
    return "# " + " ".join(f"{k}={v}" for k, v in provenance.items()) + "\n"


def _write(path, text):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _csv_text(header, rows, provenance):
    buf = io.StringIO()
    buf.write(_comment(provenance))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x):
    return repr(float(x))


def _out(cfg, args, name):
    return args.output or os.path.join(cfg.output_dir, name)


def _load_dataset(path):
    ds = dataset_from_csv(_read(path))
    if len(ds) == 0:
        raise DatasetFormatError(f"{path}: dataset has no rows")
    return ds


def _split(ds, cfg):
    ds.split = stratified_split(ds.rows, cfg.seed, cfg.protocol.test_fraction)
    return ds


def _fit(kind, train, cfg):
    if len(set(train.y.tolist())) < 2:
        raise DomainError("training data holds a single class; need both labels")
    try:
        return train_model(kind, train, cfg.hyper(kind))
    except SingleClassError as exc:
        raise DomainError(str(exc)) from exc


def _load_model(path):
    if path is None or not os.path.exists(path):
        raise UntrainedModelError(f"model file {path!r} not found; run `train` first")
    text = _read(path)
    model = loads_model(text)
    n = json.loads(text).get("n_features")
    if n != len(FEATURE_NAMES):
        raise DomainError(f"model expects {n} features, datasets carry {len(FEATURE_NAMES)}")
    return model


def _metrics_table(rows):
    w = max([8] + [len(name) + 1 for name, _ in rows])
    lines = [f"{'model':<{w}}" + "".join(f"{c.capitalize():>11}" for c in METRIC_COLUMNS)]
    for name, m in rows:
        lines.append(f"{name:<{w}}" + "".join(f"{getattr(m, c):>11.4f}" for c in METRIC_COLUMNS))
    return "\n".join(lines)


def _family_dataset(name, cfg):
    family = "combined" if name == "Combined" else name
    return generate_dataset(family, cfg.protocol_config, cfg.seed, cfg.uwb, cfg.fmcw)


# -- commands ------------------------------------------------------------------

def cmd_generate(cfg, args):
    ds = generate_dataset(cfg.scenarios, cfg.protocol_config, cfg.seed, cfg.uwb, cfg.fmcw)
    path = _write(_out(cfg, args, "dataset.csv"),
                  dataset_to_csv(ds, cfg.provenance(artifact="dataset")))
    counts = Counter((r.scenario_tag.value, r.altitude, r.label) for r in ds.rows)
    print(f"wrote {len(ds)} rows to {path}")
    for (tag, alt, label), n in sorted(counts.items()):
        print(f"  {tag:<18} altitude {alt:<5} label {label}  {n}")
    return EXIT_OK


def cmd_train(cfg, args):
    ds = _split(_load_dataset(args.data), cfg)
    train, test = ds.train, ds.test
    note = ""
    if len(test) == 0:
        test, note = ds, " (no held-out rows; scored on training data)"
    model = _fit(args.model, train, cfg)
    m = evaluate(model, test)
    path = _write(_out(cfg, args, f"model-{args.model}.json"),
                  dumps_model(model, cfg.provenance(artifact="model", kind=args.model)))
    print(f"trained {args.model} on {len(train)} rows; test metrics on {len(test)} rows{note}")
    print(_metrics_table([(args.model.upper(), m)]))
    print(f"model written to {path}")
    return EXIT_OK


def _importance_rows(report):
    return [(FEATURE_NAMES[i], _fmt(report.importance[i]), report.ranking.index(i) + 1)
            for i in range(len(FEATURE_NAMES))]


def cmd_eval(cfg, args):
    model = _load_model(args.model_file)
    ds = _load_dataset(args.data)
    test = _split(ds, cfg).test if args.split == "test" else ds
    if len(test) == 0:
        test = ds
    m = evaluate(model, test)
    rep = permutation_importance(model, test, args.repeats or cfg.importance_repeats, cfg.seed)
    rows = _importance_rows(rep)
    path = _write(_out(cfg, args, "importance.csv"),
                  _csv_text(("feature", "importance", "rank"), rows,
                            cfg.provenance(artifact="importance")))
    print(f"evaluated on {len(test)} rows")
    print(_metrics_table([("model", m)]))
    print("feature importance (permutation, normalized)")
    for name, imp, rank in sorted(rows, key=lambda r: r[2]):
        print(f"  {rank}. {name:<9} {float(imp):.4f}")
    print(f"importance written to {path}")
    return EXIT_OK


def _scenario(cfg, which, seed):
    if which == "demo":
        return generate_scenario(cfg.scenario, seed)
    if which == "empty":
        return empty_scenario(cfg.scenario.width, cfg.scenario.height, seed)
    try:
        scenario, _ = scenario_from_toml(_read(which))
    except (ValueError, KeyError, TypeError) as exc:
        # TOML syntax errors are ValueErrors too: a bad file is a config error
        raise ConfigError(f"{which}: invalid scenario file: {exc!r}") from exc
    return scenario


def _fleet(cfg, scenario):
    clusters = find_clusters(scenario)
    if not clusters:
        return FleetSpec(0, 0)
    auto = size_fleet(clusters, cfg.mission_config)
    return FleetSpec(cfg.fleet.n_ha or auto.n_ha, cfg.fleet.n_la or auto.n_la)


def cmd_simulate(cfg, args):
    model = _load_model(args.model_file)
    out_dir = args.output or cfg.output_dir
    rows, reports = [], []
    for run in range(args.runs):
        seed = cfg.seed + run
        scenario = _scenario(cfg, args.scenario, seed)
        fleet = _fleet(cfg, scenario)
        log, report = run_mission(scenario, fleet, model, seed, cfg.mission_config)
        prov = cfg.provenance(artifact="mission_log", run_seed=seed, scenario=args.scenario)
        suffix = "" if args.runs == 1 else f"-{seed}"
        _write(os.path.join(out_dir, f"mission{suffix}.jsonl"), log.to_jsonl(prov))
        rows.append([seed, fleet.n_ha, fleet.n_la] + report.csv_row())
        reports.append(report)
    header = ("seed", "n_ha", "n_la") + reports[0].CSV_FIELDS
    prov = cfg.provenance(artifact="mission_report", scenario=args.scenario, runs=args.runs)
    _write(os.path.join(out_dir, "mission_report.csv"), _csv_text(header, rows, prov))
    buried = sum(r.buried_total for r in reports)
    found = sum(r.buried_detected for r in reports)
    frac = found / buried if buried else 1.0
    text = [_comment(prov).rstrip("\n")]
    for seed_row, report in zip(rows, reports):
        text += [f"-- seed {seed_row[0]} ({seed_row[1]} HA-UAV, {seed_row[2]} LA-UAV)",
                 report.summary()]
    text.append(f"buried victims detected: {found}/{buried} ({frac:.1%}) over {args.runs} run(s)")
    body = "\n".join(text) + "\n"
    _write(os.path.join(out_dir, "mission_report.txt"), body)
    print(body, end="")
    return EXIT_OK


def sweep_rows(cfg, kind="rf"):
    """Retrain and score one model per scenario row: the data behind the sweep figure."""
    rows = []
    for name in SWEEP_ROWS:
        ds = _family_dataset(name, cfg)
        m = evaluate(_fit(kind, ds.train, cfg), ds.test)
        rows.append((name, m, len(ds.test)))
    return rows


def _metric_rows(rows):
    return [[name] + [_fmt(getattr(m, c)) for c in METRIC_COLUMNS] + [n] for name, m, n in rows]


def cmd_sweep(cfg, args):
    rows = sweep_rows(cfg, args.model)
    path = _write(_out(cfg, args, "sweep.csv"),
                  _csv_text(("scenario",) + METRIC_COLUMNS + ("n_test",), _metric_rows(rows),
                            cfg.provenance(artifact="sweep", model=args.model, axis=args.axis)))
    print(_metrics_table([(name, m) for name, m, _ in rows]))
    print(f"sweep written to {path}")
    return EXIT_OK


def cmd_report(cfg, args):
    out_dir = args.output or cfg.output_dir
    stable = generate_dataset("stable", cfg.protocol_config, cfg.seed, cfg.uwb, cfg.fmcw)
    table1, models = [], {}
    for kind in MODEL_KINDS:
        models[kind] = _fit(kind, stable.train, cfg)
        table1.append((kind.upper(), evaluate(models[kind], stable.test), len(stable.test)))
    fig3 = sweep_rows(cfg, "rf")
    hover = _family_dataset(ScenarioTag.HOVER_WOOD_BRICKS.value, cfg)
    fig4 = []
    for name, ds, model in (("stable", stable, models["rf"]),
                            ("hover", hover, _fit("rf", hover.train, cfg))):
        rep = permutation_importance(model, ds.test, cfg.importance_repeats, cfg.seed)
        fig4 += [[name] + list(r) for r in _importance_rows(rep)]
    prov = cfg.provenance(artifact="report")
    cols = ("model",) + METRIC_COLUMNS + ("n_test",)
    _write(os.path.join(out_dir, "table1.csv"), _csv_text(cols, _metric_rows(table1), prov))
    _write(os.path.join(out_dir, "fig3.csv"),
           _csv_text(("scenario",) + cols[1:], _metric_rows(fig3), prov))
    _write(os.path.join(out_dir, "fig4.csv"),
           _csv_text(("dataset", "feature", "importance", "rank"), fig4, prov))
    text = [_comment(prov).rstrip("\n"),
            "Classifier comparison, stable scenarios",
            _metrics_table([(n, m) for n, m, _ in table1]), "",
            "Random forest per scenario",
            _metrics_table([(n, m) for n, m, _ in fig3]), "",
            "Permutation importance (rank feature importance)"]
    for name in ("stable", "hover"):
        ranked = sorted((r for r in fig4 if r[0] == name), key=lambda r: r[3])
        text.append(f"  {name:<7} " + "  ".join(f"{r[3]}. {r[1]} {float(r[2]):.3f}" for r in ranked))
    body = "\n".join(text) + "\n"
    _write(os.path.join(out_dir, "report.txt"), body)
    print(body, end="")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------

def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="rubblesar",
                                description="Two-tier UAV through-rubble search toolkit.")
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--seed", type=int, help="root seed (overrides run.seed)")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override a config key; VALUE uses TOML syntax")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a protocol dataset CSV")
    g.add_argument("--family", action="append",
                   help="scenario tag or alias (stable, hover, combined); repeatable")
    g.add_argument("--per-class", type=int)
    g.add_argument("--altitudes", type=_float_list, help="comma-separated metres")
    g.add_argument("-o", "--output")

    t = sub.add_parser("train", help="train a classifier and print held-out metrics")
    t.add_argument("--data", required=True)
    t.add_argument("--model", choices=MODEL_KINDS, default="rf")
    t.add_argument("-o", "--output")

    e = sub.add_parser("eval", help="score a model and rank feature importance")
    e.add_argument("--model-file", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--split", choices=("test", "all"), default="test")
    e.add_argument("--repeats", type=int)
    e.add_argument("-o", "--output", help="importance CSV path")

    s = sub.add_parser("simulate", help="run the two-tier search mission")
    s.add_argument("--model-file")
    s.add_argument("--scenario", default="demo", help="demo, empty, or a scenario TOML file")
    s.add_argument("--runs", type=int, default=1, help="consecutive seeds to simulate")
    s.add_argument("-o", "--output", help="output directory")

    w = sub.add_parser("sweep", help="retrain and score per scenario family")
    w.add_argument("--axis", choices=("scenario",), default="scenario")
    w.add_argument("--model", choices=MODEL_KINDS, default="rf")
    w.add_argument("-o", "--output")

    r = sub.add_parser("report", help="classifier table, scenario sweep and importance")
    r.add_argument("-o", "--output", help="output directory")
    return p


def _overrides(args):
    out = []
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        out.append((key.strip(), parse_value(value.strip())))
    if args.seed is not None:
        out.append(("run.seed", args.seed))
    if args.command == "generate":
        if args.family:
            out.append(("protocol.scenarios", args.family))
        if args.per_class is not None:
            out.append(("protocol.per_class", args.per_class))
        if args.altitudes is not None:
            out.append(("protocol.altitudes", args.altitudes))
    if getattr(args, "runs", 1) < 1:
        raise ConfigError("--runs must be >= 1")
    return out


COMMANDS = {"generate": cmd_generate, "train": cmd_train, "eval": cmd_eval,
            "simulate": cmd_simulate, "sweep": cmd_sweep, "report": cmd_report}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, DatasetFormatError, ModelFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, UntrainedModelError, InfeasibleSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
