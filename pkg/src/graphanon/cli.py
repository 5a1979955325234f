"""Command-line pipeline: stats, train, run, rank, attack.

Exit codes: 0 success, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .anonymize import METHODS, anonymize, build_context, read_provenance, verify_k_anonymity, write_provenance
from .community import louvain, write_partition_csv
from .errors import ConfigError
from .evaluate import (QUERIES, loss_report, report_json, risk_reports, write_loss_csv, write_risk_csv)
from .graph import EdgeListParseError, Graph, load_edge_list, write_edge_list
from .metrics import METRIC_IDS, clustering_vector, node_metrics, path_stats, write_metrics_csv
from .similarity import DistanceWeights, SAConfig, train_weights

log = logging.getLogger("graphanon")

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 2, 3
DATA_ENV = "GRAPHANON_DATA"
LOSS_METRICS = METRIC_IDS + ("communities",)


@dataclass
class RunConfig:
    dataset: str = ""
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    k: list[int] = field(default_factory=lambda: [2, 4, 8, 16])
    hub_pct: float = 12.0
    bridge_pct: float = 10.0
    seed: int = 0
    weights: str = ""
    out: str = "runs/out"
    sample_size: int = 200
    epochs: int = 100
    proposals: int = 50

    def validate(self) -> "RunConfig":
        if not self.dataset:
            raise ConfigError("no dataset given")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigError(f"unknown methods {bad}; choose from {sorted(METHODS)}")
        if not self.k or any(k < 2 for k in self.k) or self.k != sorted(set(self.k)):
            raise ConfigError(f"k values must be >= 2, distinct and ascending, got {self.k}")
        for pct in (self.hub_pct, self.bridge_pct):
            if not 0 < pct < 100:
                raise ConfigError(f"percentile must lie in (0, 100), got {pct}")
        if self.sample_size < 1 or self.epochs < 1 or self.proposals < 1:
            raise ConfigError("sample_size, epochs and proposals must be positive")
        return self

    def snapshot(self) -> str:
        lines = []
        for f in fields(self):
            val = getattr(self, f.name)
            for item in val if isinstance(val, list) else [val]:
                lines.append(f"{f.name}={item}")
        return "\n".join(lines) + "\n"


_LIST_KEYS = {"methods": str, "k": int}
_ALIASES = {"method": "methods"}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """``key=value`` lines; list keys repeat; ``#`` starts a comment."""
    cfg = base or RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    lists: dict[str, list] = defaultdict(list)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in types:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in _LIST_KEYS:
                lists[key].extend(_LIST_KEYS[key](v) for v in val.split(",") if v.strip())
            elif types[key] in ("int", int):
                setattr(cfg, key, int(val))
            elif types[key] in ("float", float):
                setattr(cfg, key, float(val))
            else:
                setattr(cfg, key, val)
        except ValueError:
            raise ConfigError(f"config line {lineno}: bad value for {key}: {val!r}") from None
    for key, vals in lists.items():
        setattr(cfg, key, vals)
    return cfg


def resolve_dataset(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    root = os.environ.get(DATA_ENV)
    if root:
        for cand in (Path(root) / name, Path(root) / f"{name}.txt"):
            if cand.exists():
                return cand
    raise ConfigError(f"dataset {name!r} not found (also looked under ${DATA_ENV})")


# ------------------------------------------------------------------ stats


STATS_COLUMNS = ("dataset", "nodes", "edges", "avg_degree", "mean_cc", "apl", "diameter", "communities")


def graph_stats(g: Graph, seed: int = 0) -> dict:
    ps = path_stats(g) if g.m else None
    return {
        "nodes": g.n,
        "edges": g.raw_edge_lines if g.raw_edge_lines is not None else g.m,
        "undirected_edges": g.m,
        "avg_degree": 2.0 * g.m / g.n,
        "mean_cc": float(clustering_vector(g).mean()),
        "apl": ps.apl if ps else 0.0,
        "diameter": ps.diameter if ps else 0,
        "communities": louvain(g, 1.0, seed).count,
    }


def cmd_stats(args) -> int:
    w = csv.writer(sys.stdout, delimiter="\t", lineterminator="\n")
    w.writerow(STATS_COLUMNS)
    for name in args.datasets:
        g = load_edge_list(resolve_dataset(name))
        if g.n == 0:
            continue
        s = graph_stats(g, args.seed)
        w.writerow([name, s["nodes"], s["edges"], f"{s['avg_degree']:.3f}", f"{s['mean_cc']:.3f}",
                    f"{s['apl']:.3f}", s["diameter"], s["communities"]])
    return EXIT_OK


# ------------------------------------------------------------------ train


def _train(g: Graph, cfg: RunConfig):
    sa = SAConfig(epochs=cfg.epochs, proposals=cfg.proposals)
    return train_weights(g, sample_size=cfg.sample_size, config=sa, seed=cfg.seed)


def cmd_train(args) -> int:
    cfg = RunConfig(dataset=args.dataset, seed=args.seed, sample_size=args.sample_size,
                    epochs=args.epochs, proposals=args.proposals)
    g = load_edge_list(resolve_dataset(cfg.dataset))
    res = _train(g, cfg)
    res.weights.save(args.out, g)
    print(f"fitness {res.fitness:.4f} (uniform {res.baseline_fitness:.4f}) -> {args.out}")
    return EXIT_OK


# -------------------------------------------------------------------- run


def cell_name(method: str, k: int) -> str:
    return f"{method}_k{k}"


def run_grid(cfg: RunConfig) -> tuple[int, list[dict]]:
    """Every (method, k) cell of the grid; returns the exit code and summary rows."""
    cfg.validate()
    g = load_edge_list(resolve_dataset(cfg.dataset))
    out = Path(cfg.out)
    (out / ".private").mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(cfg.snapshot())

    if cfg.weights and Path(cfg.weights).exists():
        w = DistanceWeights.load(cfg.weights, g)
        training = {"source": cfg.weights}
    else:
        res = _train(g, cfg)
        w = res.weights
        training = {"fitness": res.fitness, "uniform_fitness": res.baseline_fitness}
    w.save(out / "weights.txt", g)

    base = node_metrics(g)
    base_nc = louvain(g, 1.0, cfg.seed).count
    contexts = {}
    rows: list[dict] = []
    code = EXIT_OK
    for method in cfg.methods:
        for k in cfg.k:
            name = cell_name(method, k)
            row = {"method": method, "k": k, "status": "ok", "verify": "", "nodes": "", "edges": ""}
            try:
                if k not in contexts:
                    contexts[k] = build_context(g, k, cfg.seed, w, cfg.hub_pct, cfg.bridge_pct)
                ctx = contexts[k]
                a = anonymize(g, method, k, ctx, w)
                ver = verify_k_anonymity(a, g, ctx)
                write_edge_list(a.published, out / f"{name}.edges",
                                header=f"{method} k={k} seed={cfg.seed}")
                write_provenance(a, out / ".private" / f"{name}.prov")
                (out / f"{name}.verify.txt").write_text(
                    ("PASS\n" if ver.passed else "FAIL\n") + "".join(f"{v}\n" for v in ver.violations))
                pub_metrics = node_metrics(a.published)
                loss = loss_report(g, a.published, method, k, cfg.seed, base, base_nc)
                risks = [*risk_reports(a, "all", pub_metrics).values(),
                         *risk_reports(a, "anonymized", pub_metrics).values()]
                write_loss_csv([loss], out / f"{name}.loss.csv")
                write_risk_csv([(method, k, r) for r in risks], out / f"{name}.risk.csv")
                write_metrics_csv(a.published, out / f"{name}.metrics.csv", pub_metrics)
                write_partition_csv(louvain(a.published, 1.0, cfg.seed), out / f"{name}.communities.csv")
                extra = {"verify": ver.passed, "published_nodes": a.published.n,
                         "published_edges": a.published.m, "dummies": a.dummies,
                         "excluded": len(a.excluded), "notes": a.notes}
                (out / f"{name}.json").write_text(report_json(loss, risks, extra))
                row.update(verify="pass" if ver.passed else "fail", nodes=a.published.n, edges=a.published.m)
                row.update({m: loss.losses[m] for m in METRIC_IDS})
                row["communities"] = loss.community_raw
                if not ver.passed:
                    code = EXIT_VERIFY
            except Exception as exc:  # a failed cell must not stop the grid
                log.error("cell %s failed: %s", name, exc)
                row["status"] = f"failed: {type(exc).__name__}: {exc}"
                code = code or EXIT_VERIFY
            rows.append(row)

    with (out / "summary.csv").open("w", newline="") as fh:
        cols = ["method", "k", "status", "verify", "nodes", "edges", *LOSS_METRICS]
        wr = csv.DictWriter(fh, cols, extrasaction="ignore", lineterminator="\n")
        wr.writeheader()
        for row in rows:
            wr.writerow({c: (f"{row[c]:.12g}" if isinstance(row.get(c), float) else row.get(c, ""))
                         for c in cols})
    run_info = {
        "dataset": str(cfg.dataset),
        "graph": {"nodes": g.n, "edges": g.m, "fingerprint": g.fingerprint()},
        "seed": cfg.seed,
        "weights": list(w.w),
        "training": training,
        "versions": _versions(),
    }
    (out / "run.json").write_text(json.dumps(run_info, indent=2, sort_keys=True) + "\n")
    return code, rows


def _versions() -> dict:
    import networkx
    import numba
    import scipy

    return {"graphanon": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "networkx": networkx.__version__, "numba": numba.__version__}


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = parse_config(Path(args.config).read_text(), cfg)
    for key in ("dataset", "methods", "k", "hub_pct", "bridge_pct", "seed", "weights", "out",
                "sample_size", "epochs", "proposals"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    return cfg


def cmd_run(args) -> int:
    code, rows = run_grid(_config_from_args(args))
    for row in rows:
        print(f"{row['method']:<12} k={row['k']:<3} {row['status']} {row['verify']}")
    return code


# ------------------------------------------------------------------- rank


def dense_rank(scores: dict[str, float], lower_is_better: bool = True) -> dict[str, int]:
    """Rank 1 is best; equal scores share a rank and the next rank follows on."""
    distinct = sorted(set(scores.values()), reverse=not lower_is_better)
    pos = {s: i + 1 for i, s in enumerate(distinct)}
    return {m: pos[s] for m, s in scores.items()}


def collect_runs(root: Path) -> dict[str, dict[tuple[str, str], dict[int, float]]]:
    """dataset -> (method, metric) -> k -> value, from every run dir under ``root``."""
    data: dict[str, dict] = {}
    run_dirs = sorted({p.parent for p in root.rglob("*.loss.csv")})
    for d in run_dirs:
        dataset = d.name
        info = d / "run.json"
        if info.exists():
            dataset = Path(json.loads(info.read_text())["dataset"]).stem
        table = data.setdefault(dataset, defaultdict(dict))
        for p in sorted(d.glob("*.loss.csv")):
            with p.open() as fh:
                for row in csv.DictReader(fh):
                    if row["metric"] in LOSS_METRICS:
                        table[(row["method"], row["metric"])][int(row["k"])] = float(row["value"])
        for p in sorted(d.glob("*.risk.csv")):
            with p.open() as fh:
                for row in csv.DictReader(fh):
                    if row.get("scope", "all") == "all" and row["bucket"] in (">20", ">1000"):
                        table[(row["method"], row["query"])][int(row["k"])] = float(row["fraction"])
    return data


def rank_tables(data, metrics=LOSS_METRICS, lower_is_better: bool = True):
    """Mean dense rank per (metric, method) and per (dataset, method).

    A case is one (dataset, metric); its score is the mean over k. Methods
    missing a k that others have are flagged and ranked on what they have.
    """
    by_metric: dict[str, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    by_dataset: dict[str, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    gaps: list[str] = []
    for dataset, table in sorted(data.items()):
        methods = sorted({m for m, _ in table})
        for metric in metrics:
            cells = {m: table.get((m, metric), {}) for m in methods}
            ks = set().union(*cells.values()) if cells else set()
            for m, vals in cells.items():
                if set(vals) != ks:
                    gaps.append(f"{dataset}/{metric}/{m}: missing k={sorted(ks - set(vals))}")
            # rounded so that float noise in the mean does not break ties
            scores = {m: round(float(np.mean(list(v.values()))), 12) for m, v in cells.items() if v}
            if not scores:
                continue
            for m, r in dense_rank(scores, lower_is_better).items():
                by_metric[metric][m].append(r)
                by_dataset[dataset][m].append(r)
    mean = lambda d: {row: {m: float(np.mean(v)) for m, v in cols.items()} for row, cols in d.items()}
    return mean(by_metric), mean(by_dataset), gaps


def format_table(title: str, table: dict[str, dict[str, float]]) -> str:
    methods = sorted({m for cols in table.values() for m in cols})
    lines = [title, "\t".join(["", *methods])]
    for row, cols in table.items():
        lines.append("\t".join([row, *(f"{cols[m]:.1f}" if m in cols else "-" for m in methods)]))
    if table:
        avg = {m: np.mean([cols[m] for cols in table.values() if m in cols]) for m in methods}
        lines.append("\t".join(["Avg.", *(f"{avg[m]:.1f}" for m in methods)]))
    return "\n".join(lines) + "\n"


def cmd_rank(args) -> int:
    data = collect_runs(Path(args.reports))
    if not data:
        raise ConfigError(f"no reports under {args.reports}")
    out = []
    by_metric, by_dataset, gaps = rank_tables(data, LOSS_METRICS, True)
    out.append(format_table("INFORMATION LOSS: MEAN RANK BY METRIC", by_metric))
    out.append(format_table("INFORMATION LOSS: MEAN RANK BY DATASET", by_dataset))
    r_metric, r_dataset, r_gaps = rank_tables(data, QUERIES, False)
    out.append(format_table("RISK: MEAN RANK BY QUERY (share in the largest bucket)", r_metric))
    out.append(format_table("RISK: MEAN RANK BY DATASET", r_dataset))
    for gap in sorted(set(gaps + r_gaps)):
        out.append(f"gap: {gap}\n")
    text = "\n".join(out)
    print(text, end="")
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK


# ----------------------------------------------------------------- attack


def cmd_attack(args) -> int:
    published = load_edge_list(args.graph)
    a = read_provenance(args.provenance, published)
    metrics = node_metrics(published)
    risks = [*risk_reports(a, "all", metrics).values(), *risk_reports(a, "anonymized", metrics).values()]
    if args.out:
        write_risk_csv([(a.method, a.k, r) for r in risks], args.out)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["method", "k", "query", "bucket", "fraction", "scope"])
        for r in risks:
            for b in r.buckets:
                w.writerow([a.method, a.k, r.query, b, f"{r.fractions[b]:.6f}", r.scope])
    return EXIT_OK


# ------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphanon", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stats", help="summary statistics of edge-list files")
    s.add_argument("datasets", nargs="+")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_stats)

    t = sub.add_parser("train", help="fit the distance weights by simulated annealing")
    t.add_argument("dataset")
    t.add_argument("-o", "--out", required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--sample-size", type=int, default=200)
    t.add_argument("--epochs", type=int, default=100)
    t.add_argument("--proposals", type=int, default=50)
    t.set_defaults(func=cmd_train)

    r = sub.add_parser("run", help="anonymize and evaluate a method x k grid")
    r.add_argument("--config")
    r.add_argument("--dataset")
    r.add_argument("--method", dest="methods", action="append", choices=sorted(METHODS))
    r.add_argument("-k", dest="k", type=int, action="append")
    r.add_argument("--hub-pct", type=float)
    r.add_argument("--bridge-pct", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--weights")
    r.add_argument("-o", "--out")
    r.add_argument("--sample-size", type=int)
    r.add_argument("--epochs", type=int)
    r.add_argument("--proposals", type=int)
    r.set_defaults(func=cmd_run)

    k = sub.add_parser("rank", help="mean-rank tables over finished runs")
    k.add_argument("reports")
    k.add_argument("-o", "--out")
    k.set_defaults(func=cmd_rank)

    a = sub.add_parser("attack", help="risk report for a published graph and its provenance")
    a.add_argument("graph")
    a.add_argument("provenance")
    a.add_argument("-o", "--out")
    a.set_defaults(func=cmd_attack)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, EdgeListParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
