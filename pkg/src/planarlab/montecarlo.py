"""Reproducible Monte Carlo experiments.

Trial ``t`` always draws from ``RngStream(master_seed, t)`` and produces
integer statistics. Aggregates are computed from exact integer sums, so a
summary does not depend on worker count or on the order trials finish in.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
import json
import math
from typing import Iterable, Sequence

import numpy as np

from . import bounds, models, solvers

MODELS = ("words", "binomial", "geometric", "odb", "permutation")
STATISTICS = {
    "words": ("L",),
    "binomial": ("L",),
    "geometric": ("weightedL", "L"),
    "odb": ("height", "L"),
    "permutation": ("LIS",),
}
DEFAULT_CELL_LIMIT = 10**8


class ResourceGuardError(RuntimeError):
    """The requested experiment would exceed the configured cell limit."""


class InvariantViolation(AssertionError):
    """A pathwise inequality failed in some trial; indicates a solver bug."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment.

    ``n`` sets both sides when ``r``/``s`` are omitted; for ``permutation`` it
    is the permutation length N. ``tail_thresholds`` are relative: a value v
    counts toward threshold eps when ``|v - center| >= eps * center``.
    """

    model: str
    n: int | None = None
    r: int | None = None
    s: int | None = None
    k: int | None = None
    p: float | None = None
    trials: int = 100
    master_seed: int = 0
    statistic: str | None = None
    tail_thresholds: tuple[float, ...] = ()
    split_q: int | None = None
    workers: int = 1
    retain_trials: bool = False
    solver: str = "sparse"
    cell_limit: int = DEFAULT_CELL_LIMIT

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        stat = self.statistic or STATISTICS[self.model][0]
        if stat not in STATISTICS[self.model]:
            raise ValueError(f"statistic {stat!r} not available for model {self.model!r}")
        object.__setattr__(self, "statistic", stat)
        object.__setattr__(self, "tail_thresholds", tuple(float(x) for x in self.tail_thresholds))
        r = self.r if self.r is not None else self.n
        s = self.s if self.s is not None else self.n
        if r is None or s is None:
            raise ValueError("size required: give n, or both r and s")
        if r < 1 or s < 1:
            raise ValueError(f"sizes must be >= 1, got r={r}, s={s}")
        object.__setattr__(self, "r", int(r))
        object.__setattr__(self, "s", int(s))
        if self.model in ("geometric", "odb", "permutation") and r != s:
            raise ValueError(f"model {self.model!r} needs a square instance")
        if self.model == "words":
            if self.k is None or self.k < 1:
                raise ValueError(f"words model needs k >= 1, got {self.k}")
        elif self.model == "binomial" or self.model == "odb":
            if self.p is None or not 0 <= self.p <= 1:
                raise ValueError(f"model {self.model!r} needs 0 <= p <= 1, got {self.p}")
        elif self.model == "geometric":
            if self.p is None or not 0 < self.p < 1:
                raise ValueError(f"geometric model needs 0 < p < 1, got {self.p}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.solver not in ("sparse", "dp"):
            raise ValueError(f"solver must be 'sparse' or 'dp', got {self.solver!r}")
        if self.split_q is not None:
            if self.model != "words":
                raise ValueError("split_q applies to the words model only")
            if not 1 <= self.split_q <= min(self.r, self.s):
                raise ValueError(f"split_q must lie in 1..{min(self.r, self.s)}, got {self.split_q}")
        if any(x < 0 for x in self.tail_thresholds):
            raise ValueError("tail thresholds must be nonnegative")

    def echo(self) -> dict:
        d = asdict(self)
        d["tail_thresholds"] = list(self.tail_thresholds)
        return d


@dataclass(frozen=True)
class TailRow:
    threshold: float
    count: int
    total: int

    @property
    def frequency(self) -> float:
        return self.count / self.total

    def as_dict(self):
        return {"threshold": self.threshold, "count": self.count, "total": self.total, "frequency": self.frequency}


def empirical_tail(values: Sequence, center: float, thresholds: Iterable[float]) -> list[TailRow]:
    """Fraction of values with ``|v - center| >= theta`` for each theta."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("empirical_tail needs at least one value")
    dev = np.abs(v - center)
    return [TailRow(float(th), int(np.count_nonzero(dev >= th)), int(v.size)) for th in thresholds]


@dataclass(frozen=True)
class EstimateSummary:
    trials: int
    total: int  # exact sum of the per-trial statistic
    total_sq: int
    mean: float
    variance: float  # unbiased; 0 for a single trial
    se: float
    median: float
    min: int
    max: int
    center: float
    scale: float
    normalized: float  # mean / scale
    tails: tuple[TailRow, ...]
    config: dict
    extras: dict = field(default_factory=dict)
    values: tuple[int, ...] | None = None

    def to_dict(self, timestamp=True) -> dict:
        d = {
            "trials": self.trials,
            "total": self.total,
            "total_sq": self.total_sq,
            "mean": self.mean,
            "variance": self.variance,
            "se": self.se,
            "median": self.median,
            "min": self.min,
            "max": self.max,
            "center": self.center,
            "scale": self.scale,
            "normalized": self.normalized,
            "tails": [
                dict(row.as_dict(), relative=rel)
                for row, rel in zip(self.tails, self.config.get("tail_thresholds", []))
            ],
            "extras": self.extras,
            "config": self.config,
        }
        if self.values is not None:
            d["values"] = list(self.values)
        if timestamp:
            d["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return d


def _sig(x, digits=12):
    if isinstance(x, bool) or isinstance(x, int) or x is None:
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return float(format(x, f".{digits}g"))
    if isinstance(x, dict):
        return {k: _sig(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_sig(v, digits) for v in x]
    return x


def dumps(obj, digits=12) -> str:
    """JSON with floats rounded to ``digits`` significant digits, sorted keys."""
    return json.dumps(_sig(obj, digits), sort_keys=True, indent=2)


def summary_stats(values: Sequence[int]) -> dict:
    """Exact-sum aggregates for integer samples."""
    vals = [int(v) for v in values]
    t = len(vals)
    total = sum(vals)
    total_sq = sum(v * v for v in vals)
    if t > 1:
        var = float(Fraction(t * total_sq - total * total, t * (t - 1)))
    else:
        var = 0.0
    ordered = sorted(vals)
    mid = t // 2
    median = float(ordered[mid]) if t % 2 else (ordered[mid - 1] + ordered[mid]) / 2
    return {
        "trials": t,
        "total": total,
        "total_sq": total_sq,
        "mean": total / t,
        "variance": var,
        "se": math.sqrt(var / t),
        "median": median,
        "min": ordered[0],
        "max": ordered[-1],
    }


def _center_scale(cfg: ExperimentConfig):
    r, s = cfg.r, cfg.s
    if cfg.model == "words":
        c = 2.0 * math.sqrt(r * s / cfg.k)
        return c, c
    if cfg.model == "binomial":
        c = 2.0 * math.sqrt(r * s * cfg.p)
        return c, c
    if cfg.model == "permutation":
        c = 2.0 * math.sqrt(r)
        return c, c
    if cfg.model == "geometric":
        if cfg.statistic == "weightedL":
            return r * bounds.johansson_limit(cfg.p), float(r)
        return 2.0 * math.sqrt(r * s * (1.0 - cfg.p)), float(r)
    # odb
    if cfg.statistic == "height":
        c = r * 2.0 * math.sqrt(cfg.p * (1.0 - cfg.p))
    else:
        c = 2.0 * math.sqrt(r * s * cfg.p)
    return c, float(r)


def check_resources(cfg: ExperimentConfig) -> None:
    """Raise :class:`ResourceGuardError` if a trial would touch too many cells."""
    cells = cfg.r * cfg.s
    limit = cfg.cell_limit
    if cfg.model == "words":
        if cfg.solver == "dp" and cells > limit:
            raise ResourceGuardError(f"DP needs {cells} cells > limit {limit}; use the sparse solver")
        if cells / cfg.k > limit:
            raise ResourceGuardError(f"expected {cells / cfg.k:.3g} matches > limit {limit}")
    elif cfg.model == "binomial":
        dense = cfg.p >= models._DENSE_CUTOFF
        if (dense and cells > limit) or cells * cfg.p > limit:
            raise ResourceGuardError(f"binomial instance with {cells} cells exceeds limit {limit}")
    elif cfg.model in ("geometric", "odb"):
        if cells > limit:
            raise ResourceGuardError(f"{cfg.model} grid with {cells} cells exceeds limit {limit}")
    elif cfg.r > limit:
        raise ResourceGuardError(f"permutation length {cfg.r} exceeds limit {limit}")


def _words_L(w, solver):
    return solvers.lcs_length_dp(w) if solver == "dp" else solvers.lcs_length_sparse(w)


def run_trial(cfg: ExperimentConfig, t: int) -> tuple[int, ...]:
    """Per-trial integers: ``(statistic,)`` or ``(L, sum of block L)`` when splitting."""
    stream = models.RngStream(cfg.master_seed, t)
    if cfg.model == "words":
        w = models.sample_word_pair(cfg.r, cfg.s, cfg.k, stream)
        value = _words_L(w, cfg.solver)
        if cfg.split_q is None:
            return (value,)
        block_sum = _split_sum(w, cfg.split_q, cfg.solver)
        if value < block_sum:
            raise InvariantViolation(f"trial {t}: L = {value} < sum of block L = {block_sum}")
        return (value, block_sum)
    if cfg.model == "binomial":
        g = models.sample_binomial_graph(cfg.r, cfg.s, cfg.p, stream)
        return (solvers.planar_matching_size(g),)
    if cfg.model == "geometric":
        grid = models.sample_geometric_grid(cfg.r, cfg.p, stream)
        if cfg.statistic == "weightedL":
            return (solvers.max_weight_planar(grid),)
        return (solvers.planar_matching_size(models.weights_to_graph(grid)),)
    if cfg.model == "odb":
        mat = models.sample_bernoulli_matrix(cfg.r, cfg.p, stream)
        if cfg.statistic == "height":
            return (solvers.odb_height(mat),)
        return (solvers.planar_matching_size(models.matrix_to_graph(mat)),)
    perm = models.sample_permutation(cfg.r, stream)
    return (solvers.lis_length(perm),)


def _split_sum(w: models.WordPair, q: int, solver="sparse") -> int:
    size = min(w.r, w.s) // q
    total = 0
    for i in range(q):
        sub = models.WordPair(w.k, w.word_a[i * size:(i + 1) * size], w.word_b[i * size:(i + 1) * size])
        total += _words_L(sub, solver)
    return total


def _run_chunk(cfg, indices):
    return [run_trial(cfg, t) for t in indices]


def run_trials(cfg: ExperimentConfig) -> list[tuple[int, ...]]:
    """All per-trial records in trial order."""
    check_resources(cfg)
    indices = list(range(cfg.trials))
    if cfg.workers == 1 or cfg.trials == 1:
        return _run_chunk(cfg, indices)
    chunks = [indices[i::cfg.workers] for i in range(cfg.workers)]
    chunks = [c for c in chunks if c]
    out: list = [None] * cfg.trials
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        for chunk, records in zip(chunks, pool.map(_run_chunk, [cfg] * len(chunks), chunks)):
            for t, rec in zip(chunk, records):
                out[t] = rec
    return out


def summarize(cfg: ExperimentConfig, records: Sequence[tuple[int, ...]]) -> EstimateSummary:
    values = [rec[0] for rec in records]
    st = summary_stats(values)
    center, scale = _center_scale(cfg)
    tails = empirical_tail(values, center, [eps * center for eps in cfg.tail_thresholds])
    extras = {}
    if cfg.split_q is not None:
        blocks = summary_stats([rec[1] for rec in records])
        extras["split"] = {
            "q": cfg.split_q,
            "block_size": min(cfg.r, cfg.s) // cfg.split_q,
            "block_sum_mean": blocks["mean"],
            "block_sum_se": blocks["se"],
            "min_gap": min(rec[0] - rec[1] for rec in records),
            "violations": 0,
        }
    return EstimateSummary(
        trials=st["trials"],
        total=st["total"],
        total_sq=st["total_sq"],
        mean=st["mean"],
        variance=st["variance"],
        se=st["se"],
        median=st["median"],
        min=st["min"],
        max=st["max"],
        center=center,
        scale=scale,
        normalized=st["mean"] / scale if scale else math.nan,
        tails=tuple(tails),
        config=cfg.echo(),
        extras=extras,
        values=tuple(values) if cfg.retain_trials else None,
    )


def run_experiment(cfg: ExperimentConfig) -> EstimateSummary:
    return summarize(cfg, run_trials(cfg))


def trial_records_jsonl(summary: EstimateSummary) -> str:
    """One JSON object per retained trial: ``{"trial": t, "value": v}``."""
    if summary.values is None:
        raise ValueError("summary has no retained trials (set retain_trials=True)")
    return "".join(json.dumps({"trial": t, "value": v}) + "\n" for t, v in enumerate(summary.values))


def monotone_within(means: Sequence[float], ses: Sequence[float], z: float = 2.0) -> list[bool]:
    """For consecutive pairs: is the drop smaller than z combined standard errors?"""
    return [
        means[i + 1] + z * math.hypot(ses[i], ses[i + 1]) >= means[i]
        for i in range(len(means) - 1)
    ]


@dataclass(frozen=True)
class SplitResult:
    n: int
    k: int
    q: int
    block_size: int
    trials: int
    mean_L: float
    mean_block_sum: float
    min_gap: int
    violations: int


def split_experiment(n, k, q, trials, seed, workers=1) -> SplitResult:
    """L(G) against the sum of L over q diagonal blocks of size floor(n/q).

    Raises :class:`InvariantViolation` if any trial has L(G) < sum L(G_i).
    """
    if q > n:
        raise ValueError(f"q={q} exceeds n={n}")
    cfg = ExperimentConfig("words", n=n, k=k, trials=trials, master_seed=seed, split_q=q, workers=workers)
    s = run_experiment(cfg)
    sp = s.extras["split"]
    return SplitResult(n, k, q, sp["block_size"], trials, s.mean, sp["block_sum_mean"], sp["min_gap"], 0)


@dataclass(frozen=True)
class CouplingResult:
    n: int
    p: float
    trials: int
    mean_cardinality: float
    mean_weight: float
    weight_per_n: float
    johansson_limit: float
    violations: int


def coupling_experiment(n, p, trials, seed) -> CouplingResult:
    """Cardinality L on the nonzero-weight graph against the max weight, per grid.

    The weight is the strict planar maximum (one cell per row and column).
    ``johansson_limit`` belongs to up-right paths, which may reuse a row or a
    column, so it is an upper reference here: at n=300, p=0.5 the strict
    weight per n is about 2.6 and the up-right value about 4.7.
    """
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    card, weight = [], []
    for t in range(trials):
        grid = models.sample_geometric_grid(n, p, models.RngStream(seed, t))
        c = solvers.planar_matching_size(models.weights_to_graph(grid))
        w = solvers.max_weight_planar(grid)
        if c > w:
            raise InvariantViolation(f"trial {t}: cardinality {c} > weight {w}")
        card.append(c)
        weight.append(w)
    mw = sum(weight) / trials
    return CouplingResult(n, p, trials, sum(card) / trials, mw, mw / n, bounds.johansson_limit(p), 0)


@dataclass(frozen=True)
class DominanceResult:
    n: int
    p: float
    trials: int
    mean_height: float
    mean_strict: float
    violations: int


def odb_dominance_experiment(n, p, trials, seed) -> DominanceResult:
    """ODB height against strict planar size on the same matrix."""
    hs, ls = [], []
    for t in range(trials):
        mat = models.sample_bernoulli_matrix(n, p, models.RngStream(seed, t))
        h = solvers.odb_height(mat)
        strict = solvers.planar_matching_size(models.matrix_to_graph(mat))
        if h < strict:
            raise InvariantViolation(f"trial {t}: height {h} < strict size {strict}")
        hs.append(h)
        ls.append(strict)
    return DominanceResult(n, p, trials, sum(hs) / trials, sum(ls) / trials, 0)


@dataclass(frozen=True)
class ProfileRow:
    n: int
    mean: float
    se: float
    per_n: float
    per_n_se: float


@dataclass(frozen=True)
class SubadditiveProfile:
    k: int
    rows: tuple[ProfileRow, ...]
    steps_ok: tuple[bool, ...]

    @property
    def monotone(self) -> bool:
        return all(self.steps_ok)


def subadditive_profile(k, n_grid, trials, seed, workers=1) -> SubadditiveProfile:
    """Estimated E[L]/n along an increasing n grid, with a 2-SE monotonicity check."""
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be strictly increasing")
    rows = []
    for n in n_grid:
        s = run_experiment(ExperimentConfig("words", n=n, k=k, trials=trials, master_seed=seed, workers=workers))
        rows.append(ProfileRow(n, s.mean, s.se, s.mean / n, s.se / n))
    steps = monotone_within([r.per_n for r in rows], [r.per_n_se for r in rows])
    return SubadditiveProfile(k, tuple(rows), tuple(steps))


def permutation_lis_experiment(N, trials, seed, workers=1, retain_trials=False) -> EstimateSummary:
    """LIS of uniform random permutations; normalized = mean / (2 sqrt(N))."""
    cfg = ExperimentConfig(
        "permutation", n=N, trials=trials, master_seed=seed, workers=workers, retain_trials=retain_trials
    )
    return run_experiment(cfg)
