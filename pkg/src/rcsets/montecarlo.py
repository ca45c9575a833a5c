"""Seeded Monte Carlo experiments checked against exact finite-depth values.

Every comparison targets the exact probability at the simulated depth (the
survival recurrence ``r_d``), never the depth-infinity limit, so the only
error left is sampling error.  Limits are reported alongside for context.

Reproducibility: trials are grouped into fixed blocks of ``BLOCK`` trials
(or handled one by one in tree mode), and each block or trial draws from its
own :class:`~rcsets.measures.RandomStream`.  The partition does not depend on
the number of worker threads, so results are a pure function of the
parameters and the master seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .errors import DomainError, InsufficientSurvivors
from .galton_watson import (
    horizon_bias,
    pruned_branch_probs_general,
    survival_limit,
    survival_recurrence,
    survives,
)
from .intersection import (
    f_n,
    intersection_depth,
    nfold_symbol_law,
    pair_nonempty_possible,
    pair_symbol_law,
    threshold,
)
from .measures import BernoulliPair, OffspringLaw, RandomStream, quad_symbols, trit_symbols

__all__ = [
    "BLOCK",
    "CONFIDENCE",
    "SYSTEMATIC",
    "EstimateRecord",
    "ExperimentReport",
    "wilson_interval",
    "estimate_survival",
    "estimate_pair_emptiness",
    "estimate_nfold_emptiness",
    "pruned_frequency_experiment",
    "converse_distribution_test",
    "ci_calibration",
    "modes_agree",
    "records_to_csv",
    "CSV_COLUMNS",
]

BLOCK = 2048
CONFIDENCE = 0.99
SYSTEMATIC = 0.005
Z = stats.norm.ppf(0.5 + CONFIDENCE / 2)

# stream index layout: 8 bits namespace | 48 bits trial or block | 8 bits member
NS_SURVIVAL = 1
NS_PAIR = 2
NS_NFOLD_TREE = 3
NS_NFOLD_PROCESS = 4
NS_PRUNED = 5
NS_CONVERSE_A = 6
NS_CONVERSE_B = 7


def _stream(seed: int, ns: int, index: int, member: int = 0) -> RandomStream:
    return RandomStream(seed, (ns << 56) | (index << 8) | member)


def wilson_interval(successes: int, trials: int, z: float = Z) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # clamp keeps the point estimate inside despite rounding at 0 and 1
    return float(min(max(centre - half, 0.0), phat)), float(max(min(centre + half, 1.0), phat))


@dataclass(frozen=True)
class EstimateRecord:
    name: str
    value: float
    trials: int
    successes: int
    ci_low: float
    ci_high: float
    master_seed: int
    exact: float
    tolerance: float
    verdict: str
    limit: float | None = None

    @classmethod
    def from_counts(
        cls,
        name: str,
        successes: int,
        trials: int,
        seed: int,
        exact: float,
        tolerance: float | None = None,
        limit: float | None = None,
    ) -> "EstimateRecord":
        lo, hi = wilson_interval(successes, trials)
        value = successes / trials
        if tolerance is None:
            tolerance = (hi - lo) / 2 + SYSTEMATIC
        exact, tolerance = float(exact), float(tolerance)
        verdict = "pass" if abs(value - exact) <= tolerance else "fail"
        return cls(
            name, value, int(trials), int(successes), lo, hi, int(seed), exact, tolerance, verdict,
            None if limit is None else float(limit),
        )

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentReport:
    name: str
    params: dict
    seed: int
    depths: dict
    records: list
    runtime: float = 0.0
    details: dict = field(default_factory=dict)
    verdict: str = "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, include_runtime: bool = True) -> dict:
        out = {
            "name": self.name,
            "params": self.params,
            "seed": self.seed,
            "depths": self.depths,
            "records": [r.to_dict() for r in self.records],
            "details": self.details,
            "verdict": self.verdict,
        }
        if include_runtime:
            out["runtime"] = self.runtime
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=2, **kw)


CSV_COLUMNS = (
    "name",
    "value",
    "trials",
    "successes",
    "ci_low",
    "ci_high",
    "exact",
    "limit",
    "tolerance",
    "verdict",
    "master_seed",
)


def records_to_csv(records: Sequence[EstimateRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        row = rec.to_dict()
        writer.writerow({k: ("" if row[k] is None else row[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def _blocks(trials: int, block: int = BLOCK) -> list[tuple[int, int]]:
    return [(b, min(block, trials - b * block)) for b in range(math.ceil(trials / block))]


def _run_blocks(fn: Callable[[int, int], object], trials: int, threads: int = 1, block: int = BLOCK):
    jobs = _blocks(trials, block)
    if threads <= 1 or len(jobs) == 1:
        return [fn(b, size) for b, size in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def _limit_or_none(law: OffspringLaw) -> float | None:
    return survival_limit(law) if law.a2 > 0 else None


def estimate_survival(
    law: OffspringLaw,
    depth: int,
    trials: int,
    seed: int,
    tolerance: float | None = None,
    threads: int = 1,
) -> EstimateRecord:
    """Fraction of Galton-Watson trees reaching ``depth``, against ``r_depth``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")

    def block(b, size):
        rng = _stream(seed, NS_SURVIVAL, b).generator()
        return int(survives(law, depth, rng, size=size).sum())

    hits = sum(_run_blocks(block, trials, threads))
    exact = survival_recurrence(law, depth).last
    return EstimateRecord.from_counts(
        "survival", hits, trials, seed, exact, tolerance, _limit_or_none(law)
    )


def _tree_mode_empty(params: Sequence[BernoulliPair], depth: int, trials: int, seed: int, ns: int, threads: int) -> int:
    def block(b, size):
        empties = 0
        for t in range(b * BLOCK, b * BLOCK + size):
            streams = [_stream(seed, ns, t, i) for i in range(len(params))]
            if intersection_depth(params, depth, streams) < depth:
                empties += 1
        return empties

    return sum(_run_blocks(block, trials, threads))


def estimate_pair_emptiness(
    a: BernoulliPair,
    b: BernoulliPair,
    depth: int,
    trials: int,
    seed: int,
    tolerance: float | None = None,
    threads: int = 1,
) -> EstimateRecord:
    """Sample two trit codes per trial and test whether their trees share a level-``depth`` node."""
    if not pair_nonempty_possible(a.p, a.q, b.p, b.q):
        raise DomainError("these parameters always give an empty intersection")
    law = pair_symbol_law(a, b)
    empties = _tree_mode_empty([a, b], depth, trials, seed, NS_PAIR, threads)
    exact = 1 - survival_recurrence(law, depth).last
    limit = _limit_or_none(law)
    return EstimateRecord.from_counts(
        "pair_emptiness", empties, trials, seed, exact, tolerance,
        None if limit is None else 1 - limit,
    )


def estimate_nfold_emptiness(
    p: float,
    n: int,
    depth: int,
    trials: int,
    seed: int,
    mode: str = "auto",
    tolerance: float | None = None,
    threads: int = 1,
    check_threshold: bool = True,
) -> EstimateRecord:
    """Emptiness of the intersection of ``n`` μ_p random trees at ``depth``.

    ``tree`` mode samples n trit codes per trial and intersects the decoded
    trees; ``process`` mode runs the intersection's own offspring law as a
    generation-size process.  ``auto`` picks tree mode up to depth 12.
    ``check_threshold=False`` allows parameters at or above the threshold,
    where the emptiness probability tends to 1.
    """
    if check_threshold and not p < threshold(n):
        raise DomainError(f"p={p} is not below threshold({n})={threshold(n):.6f}")
    if mode == "auto":
        mode = "tree" if depth <= 12 else "process"
    law = nfold_symbol_law(p, n)
    if mode == "tree":
        params = [BernoulliPair(p, p)] * n
        empties = _tree_mode_empty(params, depth, trials, seed, NS_NFOLD_TREE, threads)
    elif mode == "process":
        def block(b, size):
            rng = _stream(seed, NS_NFOLD_PROCESS, b).generator()
            return int(size - survives(law, depth, rng, size=size).sum())

        empties = sum(_run_blocks(block, trials, threads))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    exact = 1 - survival_recurrence(law, depth).last
    limit = _limit_or_none(law)
    return EstimateRecord.from_counts(
        f"nfold_emptiness[{mode}]", empties, trials, seed, exact, tolerance,
        None if limit is None else 1 - limit,
    )


def modes_agree(a: EstimateRecord, b: EstimateRecord) -> bool:
    """Do two estimates of one quantity agree within their combined 99% intervals?"""
    return abs(a.value - b.value) <= math.hypot(a.half_width, b.half_width)


@dataclass
class _PrunedSample:
    survivors: int
    symbol_counts: np.ndarray  # pooled over readable levels: (2-way, left, right) order 0,1,2
    prefixes: np.ndarray  # (survivors, k) first k trit symbols of each pruned code


def _pruned_block(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    tail_law: OffspringLaw,
    size: int,
    horizon: int,
    readable: int,
    prefix_len: int,
    rng: np.random.Generator,
) -> _PrunedSample:
    """Grow ``size`` trees to ``readable`` levels, settle which level-``readable``
    nodes reach ``horizon``, and read off the pruned trit symbols."""
    labels = [np.zeros(size, dtype=np.int64)]
    owners = [np.arange(size)]
    parents = [None]
    for k in range(readable):
        syms = draw(rng, labels[k].size)
        has_left = (syms == 0) | (syms == 2)
        has_right = (syms == 1) | (syms == 2)
        keep = np.stack([has_left, has_right], axis=1).ravel()
        lab = labels[k]
        parent = np.repeat(np.arange(lab.size), 2)[keep]
        labels.append(np.stack([2 * lab, 2 * lab + 1], axis=1).ravel()[keep])
        owners.append(owners[k][parent])
        parents.append(parent)

    alive = survives(tail_law, horizon - readable, rng, size=labels[readable].size)
    rows = []
    for k in range(readable - 1, -1, -1):
        right_child = (labels[k + 1] & 1).astype(bool)
        left = np.zeros(labels[k].size, dtype=bool)
        right = np.zeros(labels[k].size, dtype=bool)
        left[parents[k + 1][alive & ~right_child]] = True
        right[parents[k + 1][alive & right_child]] = True
        alive = left | right
        sym = np.where(left & right, 2, np.where(left, 0, 1)).astype(np.int8)
        rows.append((k, owners[k][alive], labels[k][alive], sym[alive]))

    survived = alive  # level 0: one root per trial, in trial order
    level = np.concatenate([np.full(r[1].size, r[0]) for r in rows])
    owner = np.concatenate([r[1] for r in rows])
    label = np.concatenate([r[2] for r in rows])
    sym = np.concatenate([r[3] for r in rows])
    counts = np.bincount(sym, minlength=3)

    order = np.lexsort((label, level, owner))
    owner, sym = owner[order], sym[order]
    starts = np.searchsorted(owner, owner, side="left")
    rank = np.arange(owner.size) - starts
    pick = rank < prefix_len
    idx = np.flatnonzero(survived)
    prefixes = np.zeros((idx.size, prefix_len), dtype=np.int8)
    row_of = np.full(size, -1)
    row_of[idx] = np.arange(idx.size)
    prefixes[row_of[owner[pick]], rank[pick]] = sym[pick]
    return _PrunedSample(int(survived.sum()), counts, prefixes)


def _pruned_sample(draw, tail_law, trials, horizon, readable, prefix_len, seed, ns, threads) -> _PrunedSample:
    def block(b, size):
        rng = _stream(seed, ns, b).generator()
        return _pruned_block(draw, tail_law, size, horizon, readable, prefix_len, rng)

    parts = _run_blocks(block, trials, threads)
    return _PrunedSample(
        sum(p.survivors for p in parts),
        sum(p.symbol_counts for p in parts),
        np.concatenate([p.prefixes for p in parts]),
    )


def _check_horizon(law: OffspringLaw, horizon: int, readable: int, bound: float = SYSTEMATIC) -> float:
    if not 1 <= readable <= horizon:
        raise DomainError("need 1 <= readable <= horizon")
    bias = horizon_bias(law, horizon - readable)
    if bias >= bound:
        raise DomainError(
            f"horizon too close: r_{horizon - readable} - limit = {bias:.2e} >= {bound}"
        )
    return bias


_SYMBOL_NAMES = ("both", "left_only", "right_only")


def pruned_frequency_experiment(
    law: OffspringLaw,
    horizon: int,
    readable: int,
    trials: int,
    seed: int,
    tolerance: float = 0.01,
    threads: int = 1,
) -> ExperimentReport:
    """Pooled pruned-tree branching frequencies against the pruned law."""
    start = time.perf_counter()
    expected = pruned_branch_probs_general(law)
    bias = _check_horizon(law, horizon, readable)

    def draw(rng, count):
        return quad_symbols(law, rng.random(count))

    sample = _pruned_sample(draw, law, trials, horizon, readable, 1, seed, NS_PRUNED, threads)
    if sample.survivors == 0:
        raise InsufficientSurvivors("no tree reached the horizon")
    total = int(sample.symbol_counts.sum())
    # trit symbol 2 is "both"; report in (both, left, right) order
    hits = (sample.symbol_counts[2], sample.symbol_counts[0], sample.symbol_counts[1])
    records = [
        EstimateRecord.from_counts(f"pruned_{name}", int(h), total, seed, e, tolerance)
        for name, h, e in zip(_SYMBOL_NAMES, hits, expected)
    ]
    return ExperimentReport(
        name="pruned_frequencies",
        params={"law": list(law.as_tuple())},
        seed=seed,
        depths={"horizon": horizon, "readable": readable},
        records=records,
        runtime=time.perf_counter() - start,
        details={
            "trials": trials,
            "survivors": sample.survivors,
            "extinct": trials - sample.survivors,
            "symbols": total,
            "horizon_bias": bias,
        },
        verdict="pass" if all(r.passed for r in records) else "fail",
    )


def _chi2_two_sample(a: np.ndarray, b: np.ndarray) -> tuple[float, int, float]:
    table = np.vstack([a, b]).astype(float)
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 0.0, 0, 1.0
    stat, pval, dof, _ = stats.chi2_contingency(table, correction=False)
    return float(stat), int(dof), float(pval)


def converse_distribution_test(
    p: float,
    n: int,
    horizon: int,
    readable: int,
    trials: int,
    seed: int,
    alpha: float = 1e-3,
    intersect_p: float | None = None,
    min_survivors: int = 1000,
    threads: int = 1,
) -> ExperimentReport:
    """Compare codes drawn from μ_{f_n(p)} with pruned n-fold intersections.

    Sample A draws trit codes directly from the symmetric measure with
    parameter f_n(p).  Sample B intersects ``n`` independent μ_q trees
    (``q = intersect_p`` or ``p``), keeps the trials whose intersection
    reaches ``horizon``, prunes, and reads the first ``readable`` trit
    symbols of the pruned code.  Inside the readable levels every common
    node draws one trit per input tree; below them only survival matters,
    which is settled by the intersection's generation-size process.

    Two chi-square homogeneity tests are run, on pooled symbol counts and
    on the frequencies of the first three symbols (depth-3 cylinders), with
    a Bonferroni split of ``alpha``.  The report passes iff neither rejects.
    """
    start = time.perf_counter()
    q = p if intersect_p is None else intersect_p
    for val in (p, q):
        if not 0 <= val < threshold(n):
            raise DomainError(f"p={val} is not below threshold({n})={threshold(n):.6f}")
    if readable < 3:
        raise DomainError("readable depth must be at least 3 to read depth-3 cylinders")
    fp = f_n(p, n)
    target = BernoulliPair(fp, fp)
    tail = nfold_symbol_law(q, n)
    bias = _check_horizon(tail, horizon, readable)
    member = BernoulliPair(q, q)

    def draw_intersection(rng, count):
        syms = trit_symbols(member, rng.random((count, n)))
        left = np.all((syms == 0) | (syms == 2), axis=1)
        right = np.all((syms == 1) | (syms == 2), axis=1)
        return np.where(left & right, 2, np.where(left, 0, np.where(right, 1, 3)))

    b_sample = _pruned_sample(
        draw_intersection, tail, trials, horizon, readable, readable, seed, NS_CONVERSE_B, threads
    )
    if b_sample.survivors < min_survivors:
        raise InsufficientSurvivors(
            f"only {b_sample.survivors} intersections reached level {horizon}"
        )

    def draw_direct(b, size):
        rng = _stream(seed, NS_CONVERSE_A, b).generator()
        return trit_symbols(target, rng.random((size, readable)))

    a_codes = np.concatenate(_run_blocks(draw_direct, trials, threads))
    b_codes = b_sample.prefixes

    a_counts = np.bincount(a_codes.ravel(), minlength=3)
    b_counts = np.bincount(b_codes.ravel(), minlength=3)
    sym_stat, sym_dof, sym_p = _chi2_two_sample(a_counts, b_counts)

    weights = np.array([9, 3, 1])
    a_cyl = np.bincount(a_codes[:, :3] @ weights, minlength=27)
    b_cyl = np.bincount(b_codes[:, :3].astype(np.int64) @ weights, minlength=27)
    cyl_stat, cyl_dof, cyl_p = _chi2_two_sample(a_cyl, b_cyl)

    rejected = min(sym_p, cyl_p) < alpha / 2
    total = int(b_counts.sum())
    expected = (1 - 2 * fp, fp, fp)
    records = [
        EstimateRecord.from_counts(f"intersection_{name}", int(h), total, seed, e, 0.01)
        for name, h, e in zip(_SYMBOL_NAMES, (b_counts[2], b_counts[0], b_counts[1]), expected)
    ]
    return ExperimentReport(
        name="converse_distribution",
        params={"p": p, "n": n, "intersect_p": q, "f_n": fp, "alpha": alpha},
        seed=seed,
        depths={"horizon": horizon, "readable": readable},
        records=records,
        runtime=time.perf_counter() - start,
        details={
            "trials": trials,
            "survivors": b_sample.survivors,
            "horizon_bias": bias,
            "symbol_chi2": {"stat": sym_stat, "dof": sym_dof, "p_value": sym_p},
            "cylinder_chi2": {"stat": cyl_stat, "dof": cyl_dof, "p_value": cyl_p},
            "rejected": bool(rejected),
        },
        verdict="fail" if rejected else "pass",
    )


def ci_calibration(
    law: OffspringLaw, depth: int, trials: int, repetitions: int, seed: int = 0
) -> float:
    """Share of runs (seeds ``seed .. seed+repetitions-1``) whose 99% interval covers ``r_depth``."""
    exact = survival_recurrence(law, depth).last
    covered = 0
    for s in range(seed, seed + repetitions):
        rec = estimate_survival(law, depth, trials, s)
        covered += rec.ci_low <= exact <= rec.ci_high
    return covered / repetitions
