"""Exact supercell coarse-graining between elementary rules.

A projection ``P`` maps each block of ``N`` cells to one bit.  Rule ``A``
coarse-grains to rule ``B`` under ``P`` when projecting after ``N`` fine
steps equals one coarse step of ``B``.  After ``N`` steps of a radius-1 rule
the middle block of ``3N`` cells depends on those ``3N`` cells only, so the
condition is decided exactly by enumerating the ``2**(3N)`` fine blocks.

Block patterns are indexed with the leftmost cell as the most significant
bit, matching the neighbourhood convention of rule numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .classifier import CLASS_RANK
from .rules import RULE_TABLE, evolve, representative, representatives, unpack_rows
from .validation import check_configuration, check_rule

N_MAX_LIMIT = 4


@dataclass(frozen=True)
class Projection:
    """Block map; ``table[p]`` is the coarse bit of block pattern ``p``."""

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("supercell size must be >= 1")
        if len(self.table) != 1 << self.n:
            raise ValueError(f"table must have {1 << self.n} entries, got {len(self.table)}")
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("table entries must be 0 or 1")

    @classmethod
    def from_code(cls, n: int, code: int) -> "Projection":
        return cls(n, tuple((code >> p) & 1 for p in range(1 << n)))

    @classmethod
    def from_bits(cls, bits: str) -> "Projection":
        size = len(bits)
        n = size.bit_length() - 1
        if size < 2 or 1 << n != size:
            raise ValueError(f"projection bit string length must be a power of two, got {size}")
        return cls(n, tuple(int(ch) for ch in bits))

    @classmethod
    def identity(cls) -> "Projection":
        return cls(1, (0, 1))

    @classmethod
    def block_or(cls, n: int) -> "Projection":
        return cls(n, (0,) + (1,) * ((1 << n) - 1))

    @property
    def code(self) -> int:
        return sum(b << p for p, b in enumerate(self.table))

    @property
    def bits(self) -> str:
        """Serialised form: ``2**N`` characters in pattern-index order."""
        return "".join(str(b) for b in self.table)

    @property
    def surjective(self) -> bool:
        return 0 < sum(self.table) < len(self.table)

    def compose(self, outer: "Projection") -> "Projection":
        """Apply ``self`` blockwise, then ``outer`` on the resulting blocks."""
        n = self.n * outer.n
        blocks = _block_patterns(n).reshape(-1, outer.n, self.n)
        inner_idx = blocks @ (1 << np.arange(self.n - 1, -1, -1))
        coarse = np.asarray(self.table)[inner_idx]
        outer_idx = coarse @ (1 << np.arange(outer.n - 1, -1, -1))
        return Projection(n, tuple(int(b) for b in np.asarray(outer.table)[outer_idx]))


class Inconsistent(NamedTuple):
    """Two fine blocks with equal coarse neighbourhoods but different outcomes."""

    neighborhood: int
    fine_a: tuple[int, ...]
    fine_b: tuple[int, ...]


@dataclass(frozen=True)
class CoarseGrainingMap:
    rule_a: int
    rule_b: int
    projection: Projection

    @property
    def n(self) -> int:
        return self.projection.n

    @property
    def target_representative(self) -> int:
        return representative(self.rule_b)

    def as_row(self) -> str:
        return f"{representative(self.rule_a)},{self.target_representative},{self.n},{self.projection.bits}"


@dataclass
class TransitionGraph:
    nodes: list[int]
    edges: dict[tuple[int, int], list[CoarseGrainingMap]] = field(default_factory=dict)

    def add(self, m: CoarseGrainingMap) -> None:
        key = (representative(m.rule_a), m.target_representative)
        self.edges.setdefault(key, []).append(m)

    def edge_list(self, show_zero: bool = False, self_loops: bool = True) -> list[tuple[int, int]]:
        return sorted(
            (a, b) for a, b in self.edges
            if (show_zero or b != 0) and (self_loops or a != b)
        )

    def witnesses(self, show_zero: bool = False) -> list[CoarseGrainingMap]:
        return [m for key in self.edge_list(show_zero) for m in self.edges[key]]


# --- exact check ------------------------------------------------------------------

@lru_cache(maxsize=8)
def _block_patterns(width: int) -> np.ndarray:
    """All ``2**width`` blocks, row ``p`` being pattern index ``p``."""
    p = np.arange(1 << width)
    shifts = np.arange(width - 1, -1, -1)
    out = ((p[:, None] >> shifts[None, :]) & 1).astype(np.int64)
    out.setflags(write=False)
    return out


def _pattern_index(blocks: np.ndarray) -> np.ndarray:
    n = blocks.shape[-1]
    return blocks @ (1 << np.arange(n - 1, -1, -1))


def open_block_evolve(blocks: np.ndarray, rule: int, steps: int) -> np.ndarray:
    """Evolve rows of ``blocks`` without boundary; each step drops both edge cells."""
    table = RULE_TABLE[rule].astype(np.int64)
    x = np.asarray(blocks, dtype=np.int64)
    for _ in range(steps):
        if x.shape[-1] < 3:
            raise ValueError("block too narrow for the requested number of steps")
        x = table[4 * x[..., :-2] + 2 * x[..., 1:-1] + x[..., 2:]]
    return x


@lru_cache(maxsize=1024)
def _fine_outcome(rule: int, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Left/centre/right block indices and the N-step middle block index.

    One entry per ``3N``-cell fine block.
    """
    blocks = _block_patterns(3 * n)
    mid = open_block_evolve(blocks, rule, n)
    out = tuple(
        _pattern_index(part) for part in (blocks[:, :n], blocks[:, n:2 * n], blocks[:, 2 * n:], mid)
    )
    for arr in out:
        arr.setflags(write=False)
    return out


def coarse_project(cfg, p: Projection) -> np.ndarray:
    arr = check_configuration(cfg, min_width=1)
    if arr.size % p.n:
        raise ValueError(f"width {arr.size} is not divisible by supercell size {p.n}")
    idx = _pattern_index(arr.reshape(-1, p.n).astype(np.int64))
    return np.asarray(p.table, dtype=np.uint8)[idx]


def induced_coarse_rule(rule_a: int, p: Projection, allow_trivial: bool = False):
    """The rule induced by ``rule_a`` under ``p``, or :class:`Inconsistent`.

    Constant projections are rejected unless ``allow_trivial``; then the
    unrealisable coarse neighbourhoods take the constant value, giving rule
    0 or 255.
    """
    rule_a = check_rule(rule_a)
    if not p.surjective:
        if not allow_trivial:
            raise ValueError("projection is not surjective; coarse neighbourhoods are unrealisable")
        return 255 if p.table[0] else 0
    left, centre, right, mid = _fine_outcome(rule_a, p.n)
    table = np.asarray(p.table, dtype=np.int64)
    nb = 4 * table[left] + 2 * table[centre] + table[right]
    out = table[mid]
    rule_b = 0
    for k in range(8):
        sel = np.flatnonzero(nb == k)
        vals = out[sel]
        if vals.min() != vals.max():
            blocks = _block_patterns(3 * p.n)
            i0 = sel[np.argmax(vals == 0)]
            i1 = sel[np.argmax(vals == 1)]
            return Inconsistent(k, tuple(int(v) for v in blocks[i0]), tuple(int(v) for v in blocks[i1]))
        rule_b |= int(vals[0]) << k
    return rule_b


def dynamic_check(rule_a: int, rule_b: int, p: Projection, coarse_steps: int = 10,
                  n_trials: int = 4, coarse_width: int = 16, seed: int = 0) -> bool:
    """Compare projected fine trajectories with coarse ones on random rings."""
    rng = np.random.default_rng(seed)
    width = coarse_width * p.n
    for _ in range(n_trials):
        x = rng.integers(0, 2, width).astype(np.uint8)
        fine = evolve(x, rule_a, coarse_steps * p.n)
        coarse = evolve(coarse_project(x, p), rule_b, coarse_steps).to_array()
        sampled = unpack_rows(fine.rows[::p.n], width)
        projected = np.stack([coarse_project(row, p) for row in sampled])
        if not np.array_equal(projected, coarse):
            return False
    return True


def verify_coarse_graining(rule_a: int, rule_b: int, p: Projection, dynamic: bool = True,
                           coarse_steps: int = 10) -> bool:
    """Exact check, cross-validated against simulated trajectories.

    Raises ``RuntimeError`` if the two disagree, which would mean the
    enumeration itself is wrong.
    """
    induced = induced_coarse_rule(rule_a, p)
    exact = induced == check_rule(rule_b)
    if dynamic and exact and not dynamic_check(rule_a, rule_b, p, coarse_steps):
        raise RuntimeError(f"exact and dynamic checks disagree for {rule_a}->{rule_b} {p.bits}")
    return exact


# --- search -------------------------------------------------------------------------

def _projection_codes(n: int, include_trivial: bool) -> np.ndarray:
    top = 1 << (1 << n)
    codes = np.arange(top, dtype=np.int64)
    return codes if include_trivial else codes[1:-1]


def search_transitions(rule_a: int, n_max: int = 3, n_min: int = 2,
                       include_trivial: bool = False, chunk: int = 2048) -> list[CoarseGrainingMap]:
    """All consistent (N, P) for ``N`` in ``n_min..n_max``, in (N, code) order.

    Every projection is tested at once per ``N``: a map is consistent when
    no coarse neighbourhood is seen with both output bits.
    """
    rule_a = check_rule(rule_a)
    if not 1 <= n_min <= n_max <= N_MAX_LIMIT:
        raise ValueError(f"need 1 <= n_min <= n_max <= {N_MAX_LIMIT}")
    found = []
    for n in range(n_min, n_max + 1):
        left, centre, right, mid = _fine_outcome(rule_a, n)
        patterns = np.arange(1 << n)
        codes = _projection_codes(n, include_trivial)
        for start in range(0, len(codes), chunk):
            batch = codes[start:start + chunk]
            tables = ((batch[:, None] >> patterns[None, :]) & 1).astype(np.int8)
            key = (4 * tables[:, left] + 2 * tables[:, centre] + tables[:, right]) * 2 + tables[:, mid]
            seen = np.zeros((len(batch), 16), dtype=bool)
            rows = np.repeat(np.arange(len(batch)), key.shape[1])
            seen[rows, key.ravel()] = True
            seen = seen.reshape(len(batch), 8, 2)
            ok = ~(seen[:, :, 0] & seen[:, :, 1]).any(axis=1)
            for i in np.flatnonzero(ok):
                p = Projection.from_code(n, int(batch[i]))
                rule_b = induced_coarse_rule(rule_a, p, allow_trivial=include_trivial)
                found.append(CoarseGrainingMap(rule_a, int(rule_b), p))
    return found


def build_transition_graph(n_max: int = 3, include_trivial: bool = False,
                           rules: Sequence[int] | None = None,
                           n_max_overrides: Mapping[int, int] | None = None) -> TransitionGraph:
    """Search every representative and collect edges between representatives.

    ``n_max_overrides`` raises the depth for selected rules, e.g. ``{146: 4}``.
    """
    nodes = representatives()
    graph = TransitionGraph(nodes)
    overrides = dict(n_max_overrides or {})
    for r in (nodes if rules is None else sorted({representative(x) for x in rules})):
        for m in search_transitions(r, overrides.get(r, n_max), include_trivial=include_trivial):
            graph.add(m)
    return graph


class Violation(NamedTuple):
    source: int
    target: int
    source_class: str
    target_class: str


def validate_hierarchy(graph: TransitionGraph, classification: Mapping[int, str]) -> list[Violation]:
    """Edges that move up the I1 < I2 < I3 order (self-loops ignored)."""
    missing = sorted(set(graph.nodes) - set(classification))
    if missing:
        raise KeyError(f"classification lacks representatives {missing}")
    out = []
    for a, b in graph.edge_list(show_zero=True, self_loops=False):
        ca, cb = classification[a], classification[b]
        if CLASS_RANK[cb] > CLASS_RANK[ca]:
            out.append(Violation(a, b, ca, cb))
    return out
