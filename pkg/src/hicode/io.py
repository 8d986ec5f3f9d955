"""Text formats: edge lists, community files, run manifests and config files.

See FORMATS.md for byte-level examples.
"""

from __future__ import annotations

import csv
import hashlib
import math
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import InvalidWeight, ParseError, SelfLoop, UnknownLabel
from .graph import Graph, Layer


class LabelMap:
    """Bijection between external string labels and dense node ids."""

    def __init__(self, labels: Iterable[str] = ()):
        self.labels: list[str] = []
        self.index: dict[str, int] = {}
        for label in labels:
            self.add(label)

    def add(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            self.index[label] = len(self.labels)
            self.labels.append(label)
            return self.index[label]

    def id_of(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise UnknownLabel(f"unknown node label {label!r}") from None

    def label_of(self, node: int) -> str:
        return self.labels[node]

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label) -> bool:
        return label in self.index

    @classmethod
    def identity(cls, n: int) -> "LabelMap":
        return cls(str(i) for i in range(n))


def _content_lines(stream: IO[str]):
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_edge_list(stream: IO[str]) -> tuple[Graph, LabelMap]:
    """Read ``u v [w]`` lines; a lone ``u`` declares a (possibly isolated) node.

    Labels get ids in order of first appearance. Repeated pairs are merged by
    summing weights.
    """
    labels = LabelMap()
    us, vs, ws = [], [], []
    for lineno, tok in _content_lines(stream):
        if len(tok) == 1:
            labels.add(tok[0])
            continue
        if len(tok) not in (2, 3):
            raise ParseError(f"expected 'u v [w]', got {len(tok)} fields", lineno)
        if tok[0] == tok[1]:
            raise SelfLoop(f"line {lineno}: self-loop on node {tok[0]!r}")
        w = 1.0
        if len(tok) == 3:
            try:
                w = float(tok[2])
            except ValueError:
                raise ParseError(f"weight {tok[2]!r} is not a number", lineno) from None
            if not math.isfinite(w):
                raise ParseError(f"weight {tok[2]!r} is not finite", lineno)
            if w < 0:
                raise InvalidWeight(f"line {lineno}: negative weight {w}")
        us.append(labels.add(tok[0]))
        vs.append(labels.add(tok[1]))
        ws.append(w)
    return Graph.from_arrays(len(labels), us, vs, ws), labels


def write_edge_list(g: Graph, stream: IO[str], labels: LabelMap | None = None) -> None:
    """Write one edge per line; weights are omitted when every weight is 1."""
    labels = labels or LabelMap.identity(g.n)
    unit = bool(np.all(g.weight == 1.0))
    for u, v, w in g.edges():
        a, b = labels.label_of(u), labels.label_of(v)
        stream.write(f"{a} {b}\n" if unit else f"{a} {b} {w!r}\n")
    touched = np.zeros(g.n, dtype=bool)
    touched[g.src] = True
    touched[g.dst] = True
    for u in np.flatnonzero(~touched).tolist():
        stream.write(f"{labels.label_of(u)}\n")


def graph_digest(g: Graph) -> str:
    h = hashlib.sha256()
    h.update(np.int64(g.n).tobytes())
    for arr in (g.src, g.dst, g.weight):
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def read_community_file(stream: IO[str]) -> list[list[str]]:
    """One community per line, whitespace-separated labels."""
    return [tok for _, tok in _content_lines(stream)]


def read_communities(stream: IO[str], labels: LabelMap) -> list[list[int]]:
    """Read a community file and map every label to its node id."""
    return [[labels.id_of(x) for x in comm] for comm in read_community_file(stream)]


def write_community_file(communities: Iterable[Iterable[str]], stream: IO[str]) -> None:
    for comm in communities:
        stream.write(" ".join(str(x) for x in comm) + "\n")


def layer_lines(layer: Layer, labels: LabelMap) -> list[list[str]]:
    """Communities of ``layer`` as label lists, in canonical order."""
    return [[labels.label_of(u) for u in members.tolist()] for members in layer.communities]


# --- run manifest -----------------------------------------------------------

MANIFEST_FIELDS = ["section", "sweep", "layer", "truth", "name", "value"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def manifest_rows(stack, cfg, g: Graph, mode: str = "hicode") -> list[dict]:
    rows = []

    def add(section, name, value, sweep=None, layer=None, truth=None):
        rows.append(
            {
                "section": section,
                "sweep": _fmt(sweep),
                "layer": _fmt(layer),
                "truth": _fmt(truth),
                "name": name,
                "value": _fmt(value),
            }
        )

    add("config", "mode", mode)
    add("config", "detector", cfg.detector)
    add("config", "reduction", cfg.reduction.value)
    add("config", "max_layers", cfg.max_layers)
    add("config", "fixed_layers", cfg.fixed_layers)
    add("config", "refine_iters", cfg.refine_iters)
    add("config", "probe_iters", cfg.probe_iters)
    add("config", "seed", cfg.seed)
    add("input", "nodes", g.n)
    add("input", "edges", g.edge_count)
    add("input", "total_weight", g.total_weight)
    add("input", "sha256", graph_digest(g))
    add("result", "num_layers", stack.num_layers)
    add("result", "selected_sweep", stack.selected_sweep)
    if stack.selection is not None:
        add("result", "selection_trigger", stack.selection.trigger)
        add("result", "truncated", stack.selection.truncated)
        for r in stack.selection.rows:
            for name in ("orig_0", "red_0", "orig_probe", "red_probe", "delta", "delta_prime"):
                add("selection", name, getattr(r, name), layer=r.num_layers)
    for i, layer in enumerate(stack.layers, start=1):
        add("layer", "num_communities", layer.num_communities, layer=i)
        add("layer", "orig_modularity", stack.orig_modularity[i - 1], layer=i)
        add("layer", "reduced_modularity", stack.reduced_modularity[i - 1], layer=i)
    for rec in stack.trace:
        for i in range(len(rec.orig)):
            add("trace", "orig_modularity", rec.orig[i], sweep=rec.sweep, layer=i + 1)
            add("trace", "reduced_modularity", rec.reduced[i], sweep=rec.sweep, layer=i + 1)
            if rec.nmi is not None:
                for t, v in enumerate(rec.nmi[i], start=1):
                    add("trace", "nmi", v, sweep=rec.sweep, layer=i + 1, truth=t)
    return rows


def write_manifest(rows: Sequence[dict], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=MANIFEST_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def read_manifest(stream: IO[str]) -> list[dict]:
    reader = csv.DictReader(stream)
    if reader.fieldnames != MANIFEST_FIELDS:
        raise ParseError(f"not a manifest: header {reader.fieldnames!r}", 1)
    return list(reader)


def trace_table(rows: Sequence[dict], table: str) -> tuple[list[str], list[list[str]]]:
    """Pivot manifest rows into a wide table: ``sweeps``, ``selection`` or ``layers``."""
    if table == "sweeps":
        recs = [r for r in rows if r["section"] == "trace"]
        truths = sorted({int(r["truth"]) for r in recs if r["truth"]})
        header = ["sweep", "layer", "orig_modularity", "reduced_modularity"]
        header += [f"nmi_truth{t}" for t in truths]
        cells: dict[tuple[int, int], dict[str, str]] = {}
        for r in recs:
            key = (int(r["sweep"]), int(r["layer"]))
            col = f"nmi_truth{r['truth']}" if r["name"] == "nmi" else r["name"]
            cells.setdefault(key, {})[col] = r["value"]
        body = [[str(s), str(i)] + [cells[(s, i)].get(c, "") for c in header[2:]] for s, i in sorted(cells)]
        return header, body
    if table == "selection":
        header = ["num_layers", "orig_0", "red_0", "orig_probe", "red_probe", "delta", "delta_prime"]
        cells = {}
        for r in rows:
            if r["section"] == "selection":
                cells.setdefault(int(r["layer"]), {})[r["name"]] = r["value"]
        return header, [[str(i)] + [cells[i].get(c, "") for c in header[1:]] for i in sorted(cells)]
    if table == "layers":
        header = ["layer", "num_communities", "orig_modularity", "reduced_modularity"]
        cells = {}
        for r in rows:
            if r["section"] == "layer":
                cells.setdefault(int(r["layer"]), {})[r["name"]] = r["value"]
        return header, [[str(i)] + [cells[i].get(c, "") for c in header[1:]] for i in sorted(cells)]
    raise ValueError(f"unknown trace table {table!r}")


def write_csv(header: Sequence[str], body: Iterable[Sequence], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(body)


def read_config_file(stream: IO[str]) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment. Dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out
