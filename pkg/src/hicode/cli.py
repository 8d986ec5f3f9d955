"""Command-line entry point: ``hicode gen|detect|eval|trace``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import io as hio
from .errors import ConfigError, DomainMismatch, HicodeError
from .graph import Layer
from .metrics import jc_precision, jc_recall, jc_scores, modularity, nmi
from .pipeline import PipelineConfig, run_cascade, run_hicode
from .synthgen import LayerSpec, expected_edge_count, generate, preset

log = logging.getLogger("hicode")

DETECT_DEFAULTS = {
    "base": "louvain",
    "reduction": "reduce-weight",
    "max_layers": 8,
    "fixed_layers": None,
    "refine_iters": 30,
    "probe_iters": 5,
    "seed": 0,
    "cascade": False,
}

_INT_KEYS = {"max_layers", "fixed_layers", "refine_iters", "probe_iters", "seed"}


def _parse_layers(text: str) -> list[LayerSpec]:
    specs = []
    for part in text.split(","):
        try:
            k, p = part.split(":")
            specs.append(LayerSpec(int(k), float(p)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad layer spec {part!r}; expected K:P") from None
    return specs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hicode", description="Hidden community detection toolkit.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a layered blockmodel benchmark")
    src = gen.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=["synl2", "synl3"])
    src.add_argument("--layers", type=_parse_layers, help="comma-separated K:P layer specs")
    gen.add_argument("--nodes", type=int, default=3000, help="node count for --layers")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-dir", type=Path, required=True)

    det = sub.add_parser("detect", help="run hidden community detection on an edge list")
    det.add_argument("--input", type=Path, required=True)
    det.add_argument("--config", type=Path, help="key=value file; command-line flags win")
    det.add_argument("--base", choices=["louvain", "labelprop"], default=None)
    det.add_argument("--reduction", choices=["remove", "reduce-edge", "reduce-weight"], default=None)
    det.add_argument("--max-layers", type=int, default=None)
    det.add_argument("--fixed-layers", type=int, default=None)
    det.add_argument("--refine-iters", type=int, default=None)
    det.add_argument("--probe-iters", type=int, default=None)
    det.add_argument("--seed", type=int, default=None)
    det.add_argument("--cascade", action="store_true", default=None, help="run the Cascade baseline")
    det.add_argument("--truth", type=Path, nargs="+", help="truth layers for the NMI trace")
    det.add_argument("--out-dir", type=Path, required=True)

    ev = sub.add_parser("eval", help="compare detected communities to reference communities")
    ev.add_argument("--detected", type=Path, nargs="+", required=True)
    ev.add_argument("--truth", type=Path, nargs="+")
    ev.add_argument("--graph", type=Path, help="edge list; required for modularity")
    ev.add_argument(
        "--metric",
        choices=["jcf1", "jcprecision", "jcrecall", "jc", "nmi", "modularity"],
        default="jcf1",
    )
    ev.add_argument("--matches", action="store_true", help="also print the per-community best matches")

    tr = sub.add_parser("trace", help="re-emit CSV tables from a run manifest")
    tr.add_argument("--manifest", type=Path, required=True)
    tr.add_argument("--table", choices=["sweeps", "selection", "layers"], default="sweeps")
    tr.add_argument("--out", type=Path)
    return parser


def cmd_gen(args) -> int:
    if args.preset:
        inst = preset(args.preset, args.seed)
    else:
        inst = generate(args.nodes, args.layers, args.seed)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "graph.txt", "w") as f:
        hio.write_edge_list(inst.graph, f)
    labels = hio.LabelMap.identity(inst.n)
    for i, layer in enumerate(inst.planted, start=1):
        with open(out / f"planted{i}.cmty", "w") as f:
            hio.write_community_file(hio.layer_lines(layer, labels), f)
    rows = [
        ["preset", args.preset or ""],
        ["nodes", inst.n],
        ["seed", args.seed],
        ["edges", inst.graph.edge_count],
        ["expected_edges", repr(expected_edge_count(inst.n, inst.specs))],
    ]
    for i, spec in enumerate(inst.specs, start=1):
        rows.append([f"layer{i}_num_communities", spec.num_communities])
        rows.append([f"layer{i}_intra_p", repr(spec.intra_p)])
    for i, layer in enumerate(inst.planted, start=1):
        rows.append([f"layer{i}_modularity", repr(modularity(inst.graph, layer))])
    with open(out / "params.csv", "w") as f:
        hio.write_csv(["key", "value"], rows, f)
    log.info("wrote %s (%d nodes, %d edges)", out, inst.n, inst.graph.edge_count)
    return 0


def _detect_settings(args) -> dict:
    settings = dict(DETECT_DEFAULTS)
    if args.config:
        with open(args.config) as f:
            for key, value in hio.read_config_file(f).items():
                if key not in settings:
                    raise ConfigError(f"unknown config key {key!r}")
                if key in _INT_KEYS:
                    settings[key] = int(value) if value.lower() not in ("", "none") else None
                elif key == "cascade":
                    settings[key] = value.lower() in ("1", "true", "yes", "on")
                else:
                    settings[key] = value
    for key in settings:
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    return settings


def cmd_detect(args) -> int:
    s = _detect_settings(args)
    cfg = PipelineConfig(
        detector=s["base"],
        reduction=s["reduction"],
        max_layers=s["max_layers"],
        fixed_layers=s["fixed_layers"],
        refine_iters=s["refine_iters"],
        probe_iters=s["probe_iters"],
        seed=s["seed"],
    )
    cfg.validate()
    t0 = time.perf_counter()
    with open(args.input) as f:
        g, labels = hio.parse_edge_list(f)
    load_time = time.perf_counter() - t0
    truth = None
    if args.truth:
        truth = []
        for path in args.truth:
            with open(path) as f:
                truth.append(Layer.from_communities(hio.read_communities(f, labels), g.n))
    if s["cascade"]:
        stack = run_cascade(g, cfg, truth)
        mode = "cascade"
    else:
        stack = run_hicode(g, cfg, truth)
        mode = "hicode"
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    for i, layer in enumerate(stack.layers, start=1):
        with open(out / f"layer{i}.cmty", "w") as f:
            hio.write_community_file(hio.layer_lines(layer, labels), f)
    with open(out / "manifest.csv", "w") as f:
        hio.write_manifest(hio.manifest_rows(stack, cfg, g, mode), f)
    # Wall-clock times live apart from the manifest so the manifest stays reproducible.
    with open(out / "timings.csv", "w") as f:
        hio.write_csv(["stage", "seconds"], [["load", repr(load_time)]] + [[k, repr(v)] for k, v in stack.timings.items()], f)
    log.info("found %d layers; wrote %s", stack.num_layers, out)
    return 0


def _read_files(paths, labels: hio.LabelMap, grow: bool) -> list[list[int]]:
    comms = []
    for path in paths:
        with open(path) as f:
            for line in hio.read_community_file(f):
                comms.append([labels.add(x) if grow else labels.id_of(x) for x in line])
    return comms


def cmd_eval(args) -> int:
    g = None
    if args.graph:
        with open(args.graph) as f:
            g, labels = hio.parse_edge_list(f)
    else:
        labels = hio.LabelMap()
    grow = g is None
    detected = _read_files(args.detected, labels, grow)
    out = sys.stdout
    if args.metric == "modularity":
        if g is None:
            raise ConfigError("--metric modularity needs --graph")
        score = modularity(g, Layer.from_communities(detected, g.n))
        hio.write_csv(["metric", "score"], [["modularity", repr(score)]], out)
        return 0
    if not args.truth:
        raise ConfigError(f"--metric {args.metric} needs --truth")
    truth = _read_files(args.truth, labels, grow)
    if args.metric == "nmi":
        n = len(labels)
        try:
            a = Layer.from_communities(detected, n)
            b = Layer.from_communities(truth, n)
        except HicodeError as exc:
            raise DomainMismatch(f"nmi needs two partitions of the same nodes: {exc}") from None
        hio.write_csv(["metric", "score"], [["nmi", repr(nmi(a, b))]], out)
        return 0
    if args.metric == "jc":
        scores = jc_scores(detected, truth)
        hio.write_csv(["metric", "score"], [[k, repr(v)] for k, v in scores.items()], out)
    else:
        score = jc_scores(detected, truth)[args.metric]
        hio.write_csv(["metric", "score"], [[args.metric, repr(score)]], out)
    if args.matches:
        out.write("\n")
        rows = []
        for side, report, src in (
            ("detected", jc_precision(detected, truth), detected),
            ("truth", jc_recall(detected, truth), truth),
        ):
            for i, t, j in report.matches:
                rows.append([side, i + 1, t + 1 if t >= 0 else "", len(src[i]), repr(j)])
        hio.write_csv(["side", "community", "best_match", "size", "jaccard"], rows, out)
    return 0


def cmd_trace(args) -> int:
    with open(args.manifest) as f:
        rows = hio.read_manifest(f)
    header, body = hio.trace_table(rows, args.table)
    if args.out:
        with open(args.out, "w") as f:
            hio.write_csv(header, body, f)
    else:
        hio.write_csv(header, body, sys.stdout)
    return 0


COMMANDS = {"gen": cmd_gen, "detect": cmd_detect, "eval": cmd_eval, "trace": cmd_trace}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"hicode {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (HicodeError, OSError) as exc:
        print(f"hicode {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
