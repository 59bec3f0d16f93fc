"""Desk-scale benchmark harness: per-run records plus rendered summary tables.

The config file is plain ``key = value`` text (one pair per line, ``#``
comments). Recognized keys:

    runs      = 10                      independent runs per search cell
    seed      = 1                       base seed; run k uses seed + k
    sigma     = auto | <positive float>
    tolerance = 1e-12
    variants  = greedy, random          search variants for the first table
    linkages  = average, single, complete, ward
    output    = out_dir
    dataset   = name: path/to/file.csv  (repeatable; at least one required)

Records append to ``records.tsv`` in the output directory; the rendered
markdown lands in ``tables.md``. Re-running an identical config reproduces
identical numeric cells (timing columns aside). Datasets whose name contains
"mnist" are marked indicative only, since the subset the original experiments
sampled is not pinned down.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .interchange import EPSILON
from .linkage import LINKAGE_KINDS, agglomerate, ward
from .localsearch import GREEDY, RANDOM, SearchConfig, multi_run, search
from .objective import normalized_revenue, revenue
from .similarity import AUTO, gaussian_similarity, load_dataset


@dataclass
class BenchConfig:
    datasets: list = field(default_factory=list)  # (name, path) pairs
    runs: int = 10
    seed: int = 1
    sigma: object = AUTO
    tolerance: float = EPSILON
    variants: list = field(default_factory=lambda: [GREEDY, RANDOM])
    linkages: list = field(default_factory=lambda: ["single", "complete", "ward"])
    output: str = "bench_out"
    config_hash: str = ""

    def validate(self):
        if not self.datasets:
            raise InputError("bench config lists no datasets")
        if self.runs < 1:
            raise InputError(f"runs must be >= 1, got {self.runs}")
        for name, path in self.datasets:
            if not os.path.exists(path):
                raise InputError(f"dataset {name}: file not found: {path}")
        for v in self.variants:
            if v not in (GREEDY, RANDOM):
                raise InputError(f"unknown search variant {v!r}")
        for kind in self.linkages:
            if kind not in LINKAGE_KINDS:
                raise InputError(f"unknown linkage {kind!r}")
        if self.sigma != AUTO and not float(self.sigma) > 0:
            raise InputError(f"sigma must be positive or auto, got {self.sigma}")
        return self


def parse_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read bench config {path}: {exc}") from exc
    cfg = BenchConfig()
    cfg.config_hash = hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if key == "dataset":
            name, sep, dpath = value.partition(":")
            if not sep or not dpath.strip():
                raise InputError(
                    f"config line {lineno}: dataset needs 'name: path'")
            cfg.datasets.append((name.strip(), dpath.strip()))
        elif key == "runs":
            cfg.runs = int(value)
        elif key == "seed":
            cfg.seed = int(value)
        elif key == "sigma":
            cfg.sigma = AUTO if value.lower() == AUTO else float(value)
        elif key == "tolerance":
            cfg.tolerance = float(value)
        elif key == "variants":
            cfg.variants = [v.strip() for v in value.split(",") if v.strip()]
        elif key == "linkages":
            cfg.linkages = [v.strip() for v in value.split(",") if v.strip()]
        elif key == "output":
            cfg.output = value
        else:
            raise InputError(f"config line {lineno}: unknown key {key!r}")
    return cfg.validate()


@dataclass
class RunRecord:
    """One measurement: a dataset/method cell (or one seed of it)."""

    dataset: str
    method: str
    seed: int
    normalized_revenue: float
    steps: int
    wall_time: float
    sigma: float
    tolerance: float
    config_hash: str

    HEADER = ("dataset\tmethod\tseed\tnormalized_revenue\tsteps\twall_time"
              "\tsigma\ttolerance\tconfig_hash")

    def line(self):
        return (f"{self.dataset}\t{self.method}\t{self.seed}"
                f"\t{self.normalized_revenue:.10f}\t{self.steps}"
                f"\t{self.wall_time:.4f}\t{self.sigma:.10g}"
                f"\t{self.tolerance:.3g}\t{self.config_hash}")


def _fmt(x, digits=4):
    return f"{x:.{digits}f}"


def run_bench(cfg, out=print):
    """Execute the full benchmark; returns (records, markdown text)."""
    cfg.validate()
    os.makedirs(cfg.output, exist_ok=True)
    records = []
    search_rows = []
    post_rows = []
    for name, path in cfg.datasets:
        out(f"[bench] dataset {name}: loading {path}")
        data = load_dataset(path)
        w, sigma = gaussian_similarity(data, cfg.sigma)
        out(f"[bench] dataset {name}: n={data.n} d={data.d} sigma={sigma:.6g}")

        t_al = agglomerate(w, "average")
        al_norm = normalized_revenue(t_al, w)
        records.append(RunRecord(name, "average_link", cfg.seed, al_norm, 0,
                                 0.0, sigma, cfg.tolerance, cfg.config_hash))
        row = {"dataset": name, "al": al_norm}
        for variant in cfg.variants:
            scfg = SearchConfig(variant=variant, seed=cfg.seed,
                                tolerance=cfg.tolerance)
            agg = multi_run(w, scfg, cfg.runs, init="random")
            for rep in agg.runs:
                records.append(RunRecord(
                    name, f"{variant}_ls", rep.seed, rep.final_normalized,
                    rep.steps, rep.wall_time, sigma, cfg.tolerance,
                    cfg.config_hash))
            row[variant] = (agg.mean_normalized, agg.max_normalized,
                            agg.mean_steps)
            out(f"[bench] dataset {name}: {variant} mean "
                f"{_fmt(agg.mean_normalized)} max {_fmt(agg.max_normalized)} "
                f"steps {agg.mean_steps:.0f}")
        search_rows.append(row)

        post = {"dataset": name}
        for kind in cfg.linkages:
            start = time.perf_counter()
            base = ward(data) if kind == "ward" else agglomerate(w, kind)
            base_rev = revenue(base, w)
            scfg = SearchConfig(variant=GREEDY, seed=cfg.seed,
                                tolerance=cfg.tolerance)
            _, rep = search(base, w, scfg)
            wall = time.perf_counter() - start
            increase = ((float(rep.final_revenue) - float(base_rev))
                        / float(base_rev) * 100.0)
            records.append(RunRecord(
                name, f"{kind}+greedy", cfg.seed, rep.final_normalized,
                rep.steps, wall, sigma, cfg.tolerance, cfg.config_hash))
            post[kind] = (increase, rep.steps)
            out(f"[bench] dataset {name}: {kind}+greedy +{increase:.2f}% "
                f"in {rep.steps} steps")
        post_rows.append(post)

    md = render_tables(cfg, search_rows, post_rows)
    _append_records(os.path.join(cfg.output, "records.tsv"), records)
    with open(os.path.join(cfg.output, "tables.md"), "w",
              encoding="utf-8") as fh:
        fh.write(md)
    return records, md


def _append_records(path, records):
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8") as fh:
        if fresh:
            fh.write(RunRecord.HEADER + "\n")
        for rec in records:
            fh.write(rec.line() + "\n")


def _mnist_note(name):
    return " (indicative only)" if "mnist" in name.lower() else ""


def render_tables(cfg, search_rows, post_rows):
    lines = ["# Benchmark summary", ""]
    lines.append("## Search from random trees vs average link "
                 f"({cfg.runs} runs/cell, normalized revenue)")
    lines.append("")
    header = ["Dataset", "AL"]
    for variant in cfg.variants:
        header += [f"{variant} avg", f"{variant} max", f"{variant} steps"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for row in search_rows:
        cells = [row["dataset"] + _mnist_note(row["dataset"]),
                 _fmt(row["al"])]
        for variant in cfg.variants:
            mean, mx, steps = row[variant]
            cells += [_fmt(mean), _fmt(mx), f"{steps:.0f}"]
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    lines.append("## Greedy post-processing of linkage baselines")
    lines.append("")
    header = ["Dataset"]
    for kind in cfg.linkages:
        header += [f"{kind} +%", f"{kind} steps"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for row in post_rows:
        cells = [row["dataset"] + _mnist_note(row["dataset"])]
        for kind in cfg.linkages:
            inc, steps = row[kind]
            cells += [f"{inc:.2f}", str(steps)]
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    return "\n".join(lines)
