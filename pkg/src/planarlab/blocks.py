"""Block partitions of a planar matching: greedy blocks, types, enlargement.

Spread convention. A block may cover at most ``ell`` consecutive nodes on
each side, i.e. ``a_last - a_first <= ell - 1`` (``spread="nodes"``, the
default). That is what makes every block fit inside an ``ell x ell`` window,
which the enlargement step needs. ``spread="difference"`` allows
``a_last - a_first <= ell`` instead; under it a block can span ``ell + 1``
nodes and then the enlarged window no longer contains it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

from .solvers import PlanarMatching

SHORT = "short"
REGULAR = "regular"


@dataclass(frozen=True)
class Block:
    a_first: int
    a_last: int
    b_first: int
    b_last: int
    edge_count: int
    start: int  # index of the block's first edge in the matching

    @property
    def r(self) -> int:
        return self.a_last - self.a_first + 1

    @property
    def s(self) -> int:
        return self.b_last - self.b_first + 1


@dataclass(frozen=True)
class EnlargementReport:
    n: int
    delta: float
    short_count: int
    short_count_ok: bool  # (|S| - 1) e_max <= |M|
    short_bound: float  # 2 delta n / ell
    short_bound_holds: bool
    sum_r: float
    sum_s: float
    # (sum - n - 2 delta n) / (delta n): the constant the O(delta) term needs
    c_hat_r: float
    c_hat_s: float


@dataclass(frozen=True)
class BlockPartition:
    matching: PlanarMatching
    blocks: tuple[Block, ...]
    ell: int
    e_max: int
    spread: str = "nodes"
    labels: tuple[str, ...] | None = None
    enlarged: tuple[tuple[float, float], ...] | None = None
    report: EnlargementReport | None = field(default=None, compare=False)

    @property
    def q(self) -> int:
        return len(self.blocks)


def _spread_limit(ell, spread):
    if spread == "nodes":
        return ell - 1
    if spread == "difference":
        return ell
    raise ValueError(f"spread must be 'nodes' or 'difference', got {spread!r}")


def build_block_partition(m: PlanarMatching, ell, e_max, spread="nodes") -> BlockPartition:
    """Greedy partition: each block runs to the rightmost edge that keeps the
    edge count <= e_max and both spreads within the limit."""
    if ell < 1 or e_max < 1:
        raise ValueError(f"ell and e_max must be >= 1, got ell={ell}, e_max={e_max}")
    limit = _spread_limit(ell, spread)
    edges = m.edges
    blocks = []
    i = 0
    while i < len(edges):
        a0, b0 = edges[i]
        j = i
        while (
            j + 1 < len(edges)
            and j + 2 - i <= e_max
            and edges[j + 1][0] - a0 <= limit
            and edges[j + 1][1] - b0 <= limit
        ):
            j += 1
        blocks.append(Block(a0, edges[j][0], b0, edges[j][1], j - i + 1, i))
        i = j + 1
    return BlockPartition(m, tuple(blocks), int(ell), int(e_max), spread)


def type_of(p: BlockPartition) -> tuple[int, ...]:
    """The 5q-tuple (a_1, a'_1, b_1, b'_1, e_1, ..., e_q)."""
    out = []
    for b in p.blocks:
        out.extend((b.a_first, b.a_last, b.b_first, b.b_last, b.edge_count))
    return tuple(out)


def classify_and_enlarge(p: BlockPartition, delta, n) -> BlockPartition:
    """Label blocks short/regular and fill the enlarged sizes (r_bar, s_bar).

    Short blocks (the last one, or e_i == e_max) become ell x ell. A regular
    block whose successor starts at least ell further in A gets
    (ell, max(delta ell, s_i)); otherwise (max(delta ell, r_i), ell).
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ell = p.ell
    labels = []
    enlarged = []
    for i, b in enumerate(p.blocks):
        last = i == len(p.blocks) - 1
        if last or b.edge_count == p.e_max:
            labels.append(SHORT)
            enlarged.append((float(ell), float(ell)))
            continue
        labels.append(REGULAR)
        nxt = p.blocks[i + 1]
        if nxt.a_first - b.a_first >= ell:
            enlarged.append((float(ell), max(delta * ell, float(b.s))))
        else:
            enlarged.append((max(delta * ell, float(b.r)), float(ell)))

    short = labels.count(SHORT)
    size = len(p.matching)
    sum_r = sum(x for x, _ in enlarged)
    sum_s = sum(y for _, y in enlarged)
    short_bound = 2.0 * delta * n / ell
    report = EnlargementReport(
        n=n,
        delta=delta,
        short_count=short,
        short_count_ok=(short - 1) * p.e_max <= size,
        short_bound=short_bound,
        short_bound_holds=short <= short_bound,
        sum_r=sum_r,
        sum_s=sum_s,
        c_hat_r=(sum_r - n - 2 * delta * n) / (delta * n),
        c_hat_s=(sum_s - n - 2 * delta * n) / (delta * n),
    )
    return replace(p, labels=tuple(labels), enlarged=tuple(enlarged), report=report)


def check_invariants(p: BlockPartition, delta=None) -> list[str]:
    """Every violated partition property, as human-readable strings."""
    problems = []
    edges = p.matching.edges
    limit = _spread_limit(p.ell, p.spread)
    pos = 0
    for i, b in enumerate(p.blocks):
        if b.start != pos:
            problems.append(f"block {i}: starts at edge {b.start}, expected {pos}")
        chunk = edges[b.start:b.start + b.edge_count]
        if not chunk or chunk[0] != (b.a_first, b.b_first) or chunk[-1] != (b.a_last, b.b_last):
            problems.append(f"block {i}: endpoints do not match its edges")
        pos = b.start + b.edge_count
        if not 1 <= b.edge_count <= p.e_max:
            problems.append(f"block {i}: e_i={b.edge_count} outside 1..{p.e_max}")
        if b.a_last - b.a_first > limit or b.b_last - b.b_first > limit:
            problems.append(f"block {i}: spread exceeds {limit}")
        if i + 1 < len(p.blocks) and b.edge_count < p.e_max:
            nxt = p.blocks[i + 1]
            if max(nxt.a_first - b.a_first, nxt.b_first - b.b_first) < p.ell:
                problems.append(f"block {i}: regular but next block starts within ell")
    if pos != len(edges):
        problems.append(f"blocks cover {pos} of {len(edges)} edges")

    if p.labels is not None:
        for i, (b, lab) in enumerate(zip(p.blocks, p.labels)):
            want = SHORT if (i == len(p.blocks) - 1 or b.edge_count == p.e_max) else REGULAR
            if lab != want:
                problems.append(f"block {i}: labelled {lab}, expected {want}")
    if p.enlarged is not None:
        ell = p.ell
        d = delta if delta is not None else (p.report.delta if p.report else None)
        for i, (b, (rb, sb)) in enumerate(zip(p.blocks, p.enlarged)):
            if d is not None and rb * sb < d * ell * ell * (1 - 1e-12):
                problems.append(f"block {i}: r_bar s_bar < delta ell^2")
            if rb + sb > 2 * ell:
                problems.append(f"block {i}: r_bar + s_bar > 2 ell")
            if rb < min(b.r, ell) or sb < min(b.s, ell):
                problems.append(f"block {i}: enlargement shrinks the block")
            if rb < b.r or sb < b.s:
                problems.append(f"block {i}: block does not fit in its enlarged window")
    return problems


def _fmt(x):
    if x is None:
        return "-"
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return format(x, ".12g")


def to_text(p: BlockPartition) -> str:
    """One line per block: ``a_first a_last b_first b_last e_i label r_bar s_bar``."""
    lines = []
    for i, b in enumerate(p.blocks):
        label = p.labels[i] if p.labels is not None else "-"
        rb, sb = p.enlarged[i] if p.enlarged is not None else (None, None)
        lines.append(f"{b.a_first} {b.a_last} {b.b_first} {b.b_last} {b.edge_count} {label} {_fmt(rb)} {_fmt(sb)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_text(text: str) -> list[dict]:
    """Inverse of :func:`to_text` at the record level."""
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        f = line.split()
        if len(f) != 8:
            raise ValueError(f"expected 8 fields, got {len(f)}: {line!r}")
        rows.append({
            "a_first": int(f[0]),
            "a_last": int(f[1]),
            "b_first": int(f[2]),
            "b_last": int(f[3]),
            "edge_count": int(f[4]),
            "label": None if f[5] == "-" else f[5],
            "r_bar": None if f[6] == "-" else float(f[6]),
            "s_bar": None if f[7] == "-" else float(f[7]),
        })
    return rows


def measured_block_ratio(p: BlockPartition, n) -> float:
    """q / (n / ell); the unspecified constant in q = O(n / ell)."""
    return p.q * p.ell / n if n else math.nan
