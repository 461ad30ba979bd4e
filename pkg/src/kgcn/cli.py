"""Command line entry point: ``kgcn {gen-data,train,eval,solve,simulate}``."""

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import CapacityError, FormatError, ParameterError, TrainingDiverged
from .eval import emit_table, evaluate, per_graph_csv
from .gcn import forward, load_model, save_model
from .graph import read_graphs, record_to_graph
from .kis import exact_max_weight_kis, greedy_k_independent_set, set_weight
from .loss import Betas
from .sim import ArrivalProcess, report_csv, run
from .train import DatasetSpec, TrainConfig, build_dataset, make_graph, train_model

USER_ERRORS = (ParameterError, FormatError, CapacityError, OSError)


class UsageError(Exception):
    def __init__(self, message, printed=False):
        super().__init__(message)
        self.printed = printed


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise UsageError(message, printed=True)


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, args, inputs=(), seeds=None):
    """Record what produced the outputs in ``out_dir``. Contains no timestamps."""
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "subcommand": args.command,
        "flags": flags,
        "seeds": seeds or {},
        "inputs": {p: _digest(p) for p in inputs},
        "tool_version": __version__,
    }
    path = os.path.join(out_dir or ".", f"manifest-{args.command}.json")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _write_text(path, text):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _load_split(path):
    meta, items = read_graphs(path)
    if not items:
        raise FormatError(f"{path}: no graph records")
    return meta, items


def cmd_gen_data(args):
    spec = DatasetSpec(args.family, args.n, tuple(args.p_values),
                       (args.count_train, args.count_val, args.count_test), args.seed)
    paths = build_dataset(spec, args.out_dir)
    write_manifest(args.out_dir, args, seeds={"master_seed": args.seed})
    for split, path in paths.items():
        print(f"{split}: {path}")


def cmd_train(args):
    train_path = os.path.join(args.data_dir, "train.jsonl")
    val_path = os.path.join(args.data_dir, "val.jsonl")
    _, train_set = _load_split(train_path)
    _, val_set = _load_split(val_path)
    config = TrainConfig(Betas(args.beta1, args.beta2, args.beta3), k=args.k, epochs=args.epochs,
                         learning_rate=args.lr, optimizer=args.optimizer, seed=args.seed,
                         patience=args.patience, one_sided_p1=args.one_sided_p1)
    model, log = train_model(train_set, val_set, config)
    out_dir = os.path.dirname(args.out_model)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    save_model(model, args.out_model)
    if args.log:
        _write_text(args.log, log.to_csv())
    write_manifest(out_dir, args, inputs=[train_path, val_path], seeds={"train_seed": args.seed})
    best = log.epochs[log.best_epoch]["val_ratio"]
    print(f"best epoch {log.best_epoch}, validation ratio {best:.6f}")


def cmd_eval(args):
    meta, test_set = _load_split(args.data)
    model = load_model(args.model)
    stats = evaluate(model, test_set, args.k)
    test_family = args.test_family or (meta or {}).get("family", "")
    config = {"train_family": args.train_family, "test_family": test_family, "k": args.k,
              "beta1": args.beta1, "beta2": args.beta2, "beta3": args.beta3}
    table = emit_table([(config, stats)])
    if args.out_csv:
        _write_text(args.out_csv, table)
    else:
        sys.stdout.write(table)
    if args.per_graph_csv:
        _write_text(args.per_graph_csv, per_graph_csv(stats))
    if args.out_csv:
        write_manifest(os.path.dirname(args.out_csv), args, inputs=[args.model, args.data])
    if stats.skipped:
        print(f"skipped {stats.skipped} graph(s) with zero greedy weight", file=sys.stderr)


def cmd_solve(args):
    if args.graph == "-":
        lines = [ln for ln in sys.stdin.read().splitlines() if ln.strip()]
        lines = [ln for ln in lines if '"format"' not in ln]
        if args.index >= len(lines):
            raise FormatError(f"stdin has {len(lines)} record(s), index {args.index} requested")
        g, _ = record_to_graph(lines[args.index])
    else:
        _, items = _load_split(args.graph)
        if args.index >= len(items):
            raise FormatError(f"{args.graph} has {len(items)} record(s), index {args.index} requested")
        g = items[args.index][0]
    if args.method == "greedy":
        s = greedy_k_independent_set(g, g.weights, args.k)
    elif args.method == "exact":
        s = exact_max_weight_kis(g, args.k)
    else:
        if not args.model:
            raise UsageError("--model is required for --method gcn-greedy")
        pi, _ = forward(load_model(args.model), g)
        s = greedy_k_independent_set(g, pi * g.weights, args.k)
    print(json.dumps({"method": args.method, "k": args.k, "members": s.nodes,
                      "weight": set_weight(g, s)}))


def cmd_simulate(args):
    inputs = []
    if args.graph:
        _, items = _load_split(args.graph)
        g = items[args.index][0]
        inputs.append(args.graph)
    else:
        if args.family is None or args.n is None or args.param is None:
            raise UsageError("give either --graph or all of --family, --n, --param")
        param = args.param if args.family == "er" else int(args.param)
        g = make_graph(args.family, args.n, param, args.seed)
    model = None
    if args.scheduler == "gcn-greedy":
        if not args.model:
            raise UsageError("--model is required for --scheduler gcn-greedy")
        model = load_model(args.model)
        inputs.append(args.model)
    arrival_seed = int(np.random.SeedSequence([args.seed, 1]).generate_state(1)[0])
    arrivals = ArrivalProcess.parse(args.arrival, seed=arrival_seed)
    report = run(g, args.k, arrivals, args.scheduler, args.horizon, model=model)
    text = report_csv(report, args.window)
    if args.out_csv:
        _write_text(args.out_csv, text)
        write_manifest(os.path.dirname(args.out_csv), args, inputs=inputs,
                       seeds={"seed": args.seed, "arrival_seed": arrival_seed})
    print(f"horizon {report.horizon}, mean total queue {report.mean_queue.sum():.6g}, "
          f"max queue {report.max_queue:.6g}, violations {report.violations}")


def build_parser():
    p = _Parser(prog="kgcn", description="GCN-assisted greedy scheduling for k-tolerant conflict graphs")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("gen-data", help="generate train/val/test graph files")
    s.add_argument("--family", choices=["er", "ba"], required=True)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--p-values", type=float, nargs="+", default=[0.02, 0.05, 0.075, 0.10, 0.15])
    s.add_argument("--count-train", type=int, default=5000)
    s.add_argument("--count-val", type=int, default=50)
    s.add_argument("--count-test", type=int, default=500)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_gen_data)

    s = sub.add_parser("train", help="train a GCN on a generated dataset")
    s.add_argument("--data-dir", required=True)
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--beta1", type=float, default=5.0)
    s.add_argument("--beta2", type=float, default=5.0)
    s.add_argument("--beta3", type=float, default=10.0)
    s.add_argument("--epochs", type=int, default=20)
    s.add_argument("--patience", type=int, default=5)
    s.add_argument("--lr", type=float, default=1e-3)
    s.add_argument("--optimizer", choices=["adam", "sgd"], default="adam")
    s.add_argument("--one-sided-p1", action="store_true",
                   help="only penalise neighbour excess above k (experimental)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-model", required=True)
    s.add_argument("--log", help="CSV file for per-step cost components")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="ratio of GCN-greedy to plain greedy weight on a test set")
    s.add_argument("--model", required=True)
    s.add_argument("--data", required=True)
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--out-csv")
    s.add_argument("--per-graph-csv")
    s.add_argument("--train-family", default="", help="label for the table row")
    s.add_argument("--test-family", default="", help="label; defaults to the data file's family")
    s.add_argument("--beta1", type=float, default=5.0, help="label for the table row")
    s.add_argument("--beta2", type=float, default=5.0, help="label for the table row")
    s.add_argument("--beta3", type=float, default=10.0, help="label for the table row")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("solve", help="schedule a single graph record")
    s.add_argument("graph", nargs="?", default="-", help="graph file, '-' for stdin")
    s.add_argument("--index", type=int, default=0, help="record index within the file")
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--method", choices=["greedy", "exact", "gcn-greedy"], default="greedy")
    s.add_argument("--model")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("simulate", help="queue dynamics under a scheduler")
    s.add_argument("--graph")
    s.add_argument("--index", type=int, default=0)
    s.add_argument("--family", choices=["er", "ba"])
    s.add_argument("--n", type=int)
    s.add_argument("--param", type=float, help="p for er, m for ba")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--scheduler", choices=["greedy", "gcn-greedy", "exact"], default="greedy")
    s.add_argument("--model")
    s.add_argument("--arrival", default="bernoulli:0.1", help="kind:rate, kind in bernoulli|poisson|constant")
    s.add_argument("--horizon", type=int, default=10000)
    s.add_argument("--window", type=int, default=1, help="slots per CSV row")
    s.add_argument("--out-csv")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        args.func(args)
    except UsageError as exc:
        if not exc.printed:
            parser.print_usage(sys.stderr)
            print(f"kgcn: error: {exc}", file=sys.stderr)
        return 1
    except USER_ERRORS as exc:
        print(f"kgcn: error: {exc}", file=sys.stderr)
        return 1
    except TrainingDiverged as exc:
        print(f"kgcn: training failed: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"kgcn: internal error: {exc!r}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
