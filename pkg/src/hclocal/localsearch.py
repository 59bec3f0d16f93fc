"""Greedy and random local-search drivers over the interchange engine.

Both variants run until no move clears the profitability threshold
(gain > tolerance * total_weight; strictly positive in exact mode), or until
an optional step cap. Revenue strictly increases at every step, so
termination is guaranteed. Greedy takes the highest-gain move; random picks
uniformly among all profitable moves under a seeded generator, re-enumerating
each step (enumeration is O(n) anyway).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InternalInvariantError
from .interchange import (EPSILON, apply_move, best_move, build_w,
                          certify_local_optimality, profitable_moves)
from .objective import normalize_revenue, revenue
from .tree import HcTree

GREEDY = "greedy"
RANDOM = "random"


@dataclass
class SearchConfig:
    """Knobs for one local-search run."""

    variant: str = GREEDY
    seed: int = 0
    max_steps: int | None = None
    tolerance: float = EPSILON
    log_every: int | None = None  # None: 1 for n <= 500, else 10

    def __post_init__(self):
        if self.variant not in (GREEDY, RANDOM):
            raise InputError(f"unknown search variant {self.variant!r}")
        if self.max_steps is not None and self.max_steps < 0:
            raise InputError("max_steps must be nonnegative")


@dataclass
class SearchReport:
    """Per-run record: trees, revenue trajectory, timing, certificate."""

    variant: str
    seed: int
    initial_tree: str
    final_tree: str
    initial_revenue: float
    final_revenue: float
    initial_normalized: float | None
    final_normalized: float | None
    steps: int
    trajectory: list = field(default_factory=list)  # (step, revenue) pairs
    wall_time: float = 0.0
    converged: bool = False
    certificate: object = None

    def to_dict(self):
        return {
            "variant": self.variant,
            "seed": self.seed,
            "initial_tree": self.initial_tree,
            "final_tree": self.final_tree,
            "initial_revenue": float(self.initial_revenue),
            "final_revenue": float(self.final_revenue),
            "initial_normalized": _opt_float(self.initial_normalized),
            "final_normalized": _opt_float(self.final_normalized),
            "steps": self.steps,
            "trajectory": [(s, float(r)) for s, r in self.trajectory],
            "wall_time": self.wall_time,
            "converged": self.converged,
            "certificate": None if self.certificate is None
            else self.certificate.to_dict(),
        }


def _opt_float(x):
    return None if x is None else float(x)


def _maybe_normalized(rev, n, total):
    if n > 2 and total > 0:
        return normalize_revenue(rev, n, total)
    return None


def search(t0, w, cfg, log_fn=None):
    """Run local search from ``t0``; returns (final tree, report).

    ``t0`` is not mutated. ``log_fn``, when given, receives
    (step, x, variant, gain, revenue) after every applied move.
    """
    if t0.n != w.n:
        raise InputError(
            f"tree has {t0.n} leaves but similarity matrix is {w.n}x{w.n}")
    t = t0.copy()
    rng = np.random.default_rng(cfg.seed)
    log_every = cfg.log_every
    if log_every is None:
        log_every = 1 if t.n <= 500 else 10

    start = time.perf_counter()
    W = build_w(t, w)
    rev = revenue(t, w)
    initial_rev = rev
    initial_text = t.serialize()
    trajectory = [(0, rev)]
    steps = 0
    converged = False
    while True:
        if cfg.max_steps is not None and steps >= cfg.max_steps:
            if cfg.variant == GREEDY:
                converged = best_move(t, W, cfg.tolerance) is None
            else:
                converged = not profitable_moves(t, W, cfg.tolerance)
            break
        if cfg.variant == GREEDY:
            mv = best_move(t, W, cfg.tolerance)
        else:
            options = profitable_moves(t, W, cfg.tolerance)
            mv = options[int(rng.integers(len(options)))] if options else None
        if mv is None:
            converged = True
            break
        delta = apply_move(t, W, mv)
        rev = rev + delta
        steps += 1
        if log_fn is not None:
            log_fn(steps, mv.x, mv.variant.name, mv.gain, rev)
        if steps % log_every == 0:
            trajectory.append((steps, rev))
    if trajectory[-1][0] != steps:
        trajectory.append((steps, rev))
    wall = time.perf_counter() - start

    final_rev = revenue(t, w)  # fresh recompute, not the accumulated value
    certificate = certify_local_optimality(t, w, cfg.tolerance)
    if converged and not certificate.locally_optimal:
        raise InternalInvariantError(
            "search converged but certification found profitable moves")
    total = w.total_weight
    report = SearchReport(
        variant=cfg.variant,
        seed=cfg.seed,
        initial_tree=initial_text,
        final_tree=t.serialize(),
        initial_revenue=initial_rev,
        final_revenue=final_rev,
        initial_normalized=_maybe_normalized(initial_rev, t.n, total),
        final_normalized=_maybe_normalized(final_rev, t.n, total),
        steps=steps,
        trajectory=trajectory,
        wall_time=wall,
        converged=converged,
        certificate=certificate,
    )
    return t, report


@dataclass
class MultiRunReport:
    """Aggregate over independent seeded runs."""

    runs: list
    mean_normalized: float | None
    max_normalized: float | None
    mean_steps: float
    mean_final_revenue: float

    def to_dict(self):
        return {
            "mean_normalized": _opt_float(self.mean_normalized),
            "max_normalized": _opt_float(self.max_normalized),
            "mean_steps": self.mean_steps,
            "mean_final_revenue": float(self.mean_final_revenue),
            "runs": [r.to_dict() for r in self.runs],
        }


def multi_run(w, cfg, runs, init="random"):
    """``runs`` independent searches; run k uses seed cfg.seed + k.

    ``init`` is either the string "random" (a fresh random tree per run) or a
    fixed HcTree used as the start of every run.
    """
    if runs < 1:
        raise InputError(f"runs must be >= 1, got {runs}")
    reports = []
    for k in range(runs):
        seed = cfg.seed + k
        run_cfg = SearchConfig(variant=cfg.variant, seed=seed,
                               max_steps=cfg.max_steps,
                               tolerance=cfg.tolerance,
                               log_every=cfg.log_every)
        if isinstance(init, HcTree):
            t0 = init
        elif init == "random":
            t0 = HcTree.random(w.n, seed)
        else:
            raise InputError(f"init must be 'random' or an HcTree, got {init!r}")
        _, report = search(t0, w, run_cfg)
        reports.append(report)
    norms = [r.final_normalized for r in reports]
    have_norm = all(x is not None for x in norms)
    return MultiRunReport(
        runs=reports,
        mean_normalized=float(np.mean(norms)) if have_norm else None,
        max_normalized=float(np.max(norms)) if have_norm else None,
        mean_steps=float(np.mean([r.steps for r in reports])),
        mean_final_revenue=float(np.mean(
            [float(r.final_revenue) for r in reports])),
    )
