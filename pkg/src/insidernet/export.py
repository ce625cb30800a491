"""JSON, CSV and Graphviz DOT renderings of pipeline artifacts.

All writers are deterministic: keys sorted, nodes and edges in a stable
order, floats formatted identically on every run.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import date
from pathlib import Path
from typing import Iterable

from insidernet.anomaly import OutlierEntry, PowerLawFit
from insidernet.errors import EmptyStructure, IoFailure
from insidernet.hypergraph import Hyperedge, Hypergraph
from insidernet.ingest import Side
from insidernet.network import Egonet, Edge, InsiderNetwork
from insidernet.profit import ProfitPoint

SCORES_HEADER = ("insider_id", "v", "e", "f_v", "score", "lof", "total", "rank")
PROFITS_HEADER = ("insider_id", "company", "date", "side", "amount")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def network_to_dict(net: InsiderNetwork) -> dict:
    return {
        "side": net.side.label,
        "mode": net.mode,
        "nodes": net.nodes,
        "edges": [{"a": e.a, "b": e.b, "weight": e.weight, "company": e.company} for e in net.sorted_edges()],
    }


def network_from_dict(data: dict) -> InsiderNetwork:
    net = InsiderNetwork(side=Side.parse(data["side"]), mode=data["mode"])
    net.edges = {(e["a"], e["b"]): Edge(e["a"], e["b"], e["weight"], e["company"]) for e in data["edges"]}
    return net


def hypergraph_to_dict(h: Hypergraph) -> dict:
    return {
        "side": h.side.label,
        "threshold": h.threshold,
        "hyperedges": [
            {
                "company": e.company,
                "members": list(e.members),
                "witness": [d.isoformat() for d in e.witness],
                "length": e.length,
            }
            for e in h.hyperedges
        ],
    }


def hypergraph_from_dict(data: dict) -> Hypergraph:
    side = Side.parse(data["side"])
    edges = [
        Hyperedge(e["company"], side, tuple(e["members"]), tuple(date.fromisoformat(d) for d in e["witness"]))
        for e in data["hyperedges"]
    ]
    return Hypergraph(side=side, threshold=data["threshold"], hyperedges=edges)


def fit_to_dict(fit: PowerLawFit) -> dict:
    return fit.to_dict()


def fit_from_dict(data: dict) -> PowerLawFit:
    return PowerLawFit(data["exponent"], data["intercept"], tuple((p["v"], p["median_e"]) for p in data["points"]))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def scores_csv(report: Iterable[OutlierEntry]) -> str:
    return _csv(
        SCORES_HEADER,
        (
            (r.insider_id, r.v, r.e, f"{r.f_v:.6f}", f"{r.score:.6f}", f"{r.lof:.6f}", f"{r.total:.6f}", r.rank)
            for r in report
        ),
    )


def parse_scores_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        out.append({
            "insider_id": r["insider_id"],
            "v": int(r["v"]),
            "e": int(r["e"]),
            "f_v": float(r["f_v"]),
            "score": float(r["score"]),
            "lof": float(r["lof"]),
            "total": float(r["total"]),
            "rank": int(r["rank"]),
        })
    return out


def profits_csv(points: Iterable[ProfitPoint]) -> str:
    return _csv(
        PROFITS_HEADER,
        ((p.insider_id, p.company, p.date.isoformat(), p.side.value, f"{p.amount:.6f}") for p in points),
    )


def parse_profits_csv(text: str) -> list[ProfitPoint]:
    return [
        ProfitPoint(r["insider_id"], r["company"], date.fromisoformat(r["date"]), Side(r["side"]), float(r["amount"]))
        for r in csv.DictReader(io.StringIO(text))
    ]


def histogram_csv(key: str, hist: dict, percent: bool = False) -> str:
    if percent:
        return _csv((key, "count", "percent"), ((k, n, f"{pct:.6f}") for k, (n, pct) in sorted(hist.items())))
    return _csv((key, "count"), sorted(hist.items()))


def parse_histogram_csv(text: str) -> dict:
    """Inverse of :func:`histogram_csv`; values are counts or (count, percent)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    out = {}
    for row in reader:
        if len(header) == 3:
            out[int(row[0])] = (int(row[1]), float(row[2]))
        else:
            out[int(row[0])] = int(row[1])
    return out


def _quote(name: str) -> str:
    return '"' + str(name).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label(weight) -> str:
    if isinstance(weight, float):
        return f"{weight:.4g}"
    return str(weight)


def network_dot(net: InsiderNetwork, name: str = "network", allow_empty: bool = False) -> str:
    if not net.edges and not allow_empty:
        raise EmptyStructure("network has no edges")
    lines = [f"graph {_quote(name)} {{", "  node [shape=circle];"]
    for node in net.nodes:
        lines.append(f"  {_quote(node)};")
    for e in net.sorted_edges():
        lines.append(f"  {_quote(e.a)} -- {_quote(e.b)} [label={_quote(_label(e.weight))}, company={_quote(e.company)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def egonet_dot(net: InsiderNetwork, ego: Egonet) -> str:
    lines = [f"graph {_quote('egonet_' + ego.ego)} {{", "  node [shape=circle];"]
    for node in ego.members:
        if node == ego.ego:
            lines.append(f"  {_quote(node)} [style=filled, fillcolor=red, ego=true];")
        else:
            lines.append(f"  {_quote(node)};")
    for a, b in ego.edges:
        weight = net.edge(a, b).weight
        lines.append(f"  {_quote(a)} -- {_quote(b)} [label={_quote(_label(weight))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def hypergraph_dot(h: Hypergraph, name: str = "hypergraph", allow_empty: bool = False) -> str:
    """Each hyperedge drawn as a clique inside its own cluster, labelled with its LCS length."""
    if not h.hyperedges and not allow_empty:
        raise EmptyStructure("hypergraph has no hyperedges")
    lines = [f"graph {_quote(name)} {{", "  node [shape=circle];"]
    for v in h.vertices:
        lines.append(f"  {_quote(v)};")
    for k, e in enumerate(h.hyperedges):
        lines.append(f"  subgraph {_quote(f'cluster_{k}')} {{")
        lines.append(f"    label={_quote(f'{e.company} len={e.length}')};")
        for i, a in enumerate(e.members):
            for b in e.members[i + 1:]:
                lines.append(f"    {_quote(a)} -- {_quote(b)} [label={_quote(str(e.length))}, hyperedge={k}];")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(structure, path: str | Path, net: InsiderNetwork | None = None) -> Path:
    """Write a network, egonet (needs ``net`` for weights) or hypergraph as DOT."""
    if isinstance(structure, InsiderNetwork):
        text = network_dot(structure)
    elif isinstance(structure, Hypergraph):
        text = hypergraph_dot(structure)
    elif isinstance(structure, Egonet):
        if net is None:
            raise ValueError("egonet export needs the parent network for edge weights")
        text = egonet_dot(net, structure)
    else:
        raise TypeError(f"cannot render {type(structure).__name__} as DOT")
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"{path}: {exc.strerror or exc}") from exc
    return path
