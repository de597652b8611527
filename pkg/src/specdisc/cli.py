"""Command-line entry point.

Subcommands:
  train    exhaustive search for one class pair, report per max width
  sweep    Z and B searches for all class pairs, plus a Z-vs-B delta table
  table2   six-method linear/ordered baseline comparison on fixed ranges
  scan     evaluate a saved classifier over a WAV file
  export   lower a saved classifier to a min/max netlist (self-checked)
  selftest brute-force oracle and invariant suites

All outputs are written under --output-dir with fixed per-command file
names; identical invocations produce byte-identical files.  Exit codes:
0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from .baselines import table2_run
from .classifier import classifier_from_json, classifier_to_json, classify
from .netlist import netlist_to_json, simulate_netlist, to_netlist
from .search import REPORT_COLUMNS, SearchConfig, report_rows, search_best
from .spectra import PairTask, Split, load_dataset, select_pair
from .stream import FrameSpec, read_pcm, scan


class UsageError(Exception):
    pass


def _write_tsv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(str(c) for c in row) + "\n")


def _parse_pair(text: str) -> PairTask:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise UsageError(f"--pair must be 'classA,classB', got {text!r}")
    try:
        return PairTask(parts[0], parts[1])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load(args):
    return load_dataset(args.data, label_col=args.label_col, split_col=args.split_col)


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args) -> int:
    task = _parse_pair(args.pair)
    d = _load(args)
    train = select_pair(d, task, Split.TRAIN)
    test = select_pair(d, task, Split.TEST)
    cfg = SearchConfig(max_width=args.max_width, kind=args.kind, threads=args.threads)
    report = search_best(train, test, cfg, n_points=d.n_points)
    out = _outdir(args)
    _write_tsv(out / "train_report.tsv", REPORT_COLUMNS, report_rows(task.name, report))
    winners = {
        str(w): json.loads(classifier_to_json(r.best, (task.class_pos, task.class_neg)))
        for w, r in sorted(report.per_width.items())
    }
    (out / "train_winners.json").write_text(json.dumps(winners, indent=2) + "\n")
    return 0


def cmd_sweep(args) -> int:
    d = _load(args)
    labels = d.labels
    if len(labels) < 2:
        raise UsageError("dataset has fewer than two classes")
    out = _outdir(args)
    all_rows = []
    table1 = []
    for a, b in itertools.combinations(labels, 2):
        task = PairTask(a, b)
        train = select_pair(d, task, Split.TRAIN)
        test = select_pair(d, task, Split.TEST)
        results = {}
        for kind in ("Z", "B"):
            cfg = SearchConfig(max_width=args.max_width, kind=kind, threads=args.threads)
            rep = search_best(train, test, cfg, n_points=d.n_points)
            all_rows.extend(report_rows(task.name, rep))
            results[kind] = rep.per_width[args.max_width]
        z, bb = results["Z"], results["B"]
        table1.append([
            task.name,
            repr(z.train_error - bb.train_error),
            repr(z.test_error - bb.test_error),
            repr(z.train_error), repr(bb.train_error),
            repr(z.test_error), repr(bb.test_error),
        ])
    _write_tsv(out / "sweep_report.tsv", REPORT_COLUMNS, all_rows)
    _write_tsv(
        out / "table1.tsv",
        ["pair", "train_err_change", "test_err_change",
         "z_train_err", "b_train_err", "z_test_err", "b_test_err"],
        table1,
    )
    return 0


def cmd_table2(args) -> int:
    d = _load(args)
    rows = table2_run(d)
    out = _outdir(args)
    _write_tsv(
        out / "table2.tsv",
        ["method", "train_err", "test_err", "fisher_train", "fisher_test"],
        [[r["method"], repr(r["train_err"]), repr(r["test_err"]),
          repr(r["fisher_train"]), repr(r["fisher_test"])] for r in rows],
    )
    return 0


def cmd_scan(args) -> int:
    c = classifier_from_json(Path(args.classifier).read_text())
    clip = read_pcm(args.wav)
    spec = FrameSpec(frame_len=args.frame_len, hop=args.hop, window=args.window)
    trace = scan(clip, spec, c, n_out=args.n_out)
    out = _outdir(args)
    _write_tsv(
        out / "trace.tsv",
        ["time_s", "f_value", "theta"],
        [[repr(float(t)), repr(float(v)), repr(trace.theta)]
         for t, v in zip(trace.times, trace.values)],
    )
    return 0


def cmd_export(args) -> int:
    c = classifier_from_json(Path(args.classifier).read_text())
    net = to_netlist(c)
    n = max(c.pos_neuron.range.end, c.neg_neuron.range.end)
    rng = np.random.default_rng(args.seed)
    for _ in range(100):
        values = rng.normal(size=n) * 10.0
        if simulate_netlist(net, values) != classify(c, values):
            raise RuntimeError("netlist simulation disagrees with direct classification")
    out = _outdir(args)
    (out / "netlist.json").write_text(netlist_to_json(net) + "\n")
    return 0


def cmd_selftest(args) -> int:
    from . import selftest

    failures = selftest.run(verbose=True)
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specdisc", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def add_data_opts(sp):
        sp.add_argument("--data", required=True, help="dataset CSV path")
        sp.add_argument("--label-col", default="g")
        sp.add_argument("--split-col", default="speaker")

    def add_common(sp):
        sp.add_argument("--output-dir", required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=0,
                        help="worker threads, 0 = auto")

    sp = sub.add_parser("train", help="search classifiers for one pair")
    add_data_opts(sp)
    add_common(sp)
    sp.add_argument("--pair", required=True, help="e.g. dcl,iy")
    sp.add_argument("--kind", choices=("Z", "B"), default="Z")
    sp.add_argument("--max-width", type=int, default=20)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("sweep", help="Z and B searches for all pairs")
    add_data_opts(sp)
    add_common(sp)
    sp.add_argument("--max-width", type=int, default=12)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("table2", help="linear/ordered baseline comparison")
    add_data_opts(sp)
    add_common(sp)
    sp.set_defaults(func=cmd_table2)

    sp = sub.add_parser("scan", help="scan a classifier over a WAV file")
    add_common(sp)
    sp.add_argument("--classifier", required=True, help="classifier JSON path")
    sp.add_argument("--wav", required=True)
    sp.add_argument("--frame-len", type=int, default=512)
    sp.add_argument("--hop", type=int, default=256)
    sp.add_argument("--window", choices=("hamming", "rectangular"), default="hamming")
    sp.add_argument("--n-out", type=int, default=256)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("export", help="export a classifier as a min/max netlist")
    add_common(sp)
    sp.add_argument("--classifier", required=True)
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("selftest", help="run oracle and invariant suites")
    sp.set_defaults(func=cmd_selftest)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
