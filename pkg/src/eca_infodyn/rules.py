"""Elementary cellular automaton dynamics on bit-packed ring configurations.

A configuration of width ``W`` is stored as a Python ``int`` whose bit ``i``
is cell ``i``; a full space-time history is a tuple of such words.  All
public functions accept and return plain ``uint8`` arrays so that callers
never need to know about the packing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .validation import check_configuration, check_rule

N_RULES = 256

# RULE_TABLE[rule, 4*l + 2*c + r] is the next state of the centre cell.
RULE_TABLE = ((np.arange(N_RULES)[:, None] >> np.arange(8)[None, :]) & 1).astype(np.uint8)
RULE_TABLE.setflags(write=False)

# Neighbourhood indices whose output bit is 1, per rule.
_ACTIVE = tuple(tuple(int(n) for n in np.flatnonzero(RULE_TABLE[r])) for r in range(N_RULES))


class Symmetry(enum.IntEnum):
    """Elements of the Klein four-group acting on rules and configurations.

    The integer values double as the tie-break order used when several
    variants give the same statistic.
    """

    IDENTITY = 0
    CONJUGATE = 1
    REFLECT = 2
    COMPOSITE = 3

    @property
    def conjugates(self) -> bool:
        return self in (Symmetry.CONJUGATE, Symmetry.COMPOSITE)

    @property
    def reflects(self) -> bool:
        return self in (Symmetry.REFLECT, Symmetry.COMPOSITE)


ALL_SYMMETRIES = tuple(Symmetry)


def rule_output(rule: int, l: int, c: int, r: int) -> int:
    """Next state of a cell whose neighbourhood is ``(l, c, r)``."""
    return int(RULE_TABLE[check_rule(rule), 4 * l + 2 * c + r])


# --- packing -----------------------------------------------------------------

def pack(cfg) -> int:
    arr = np.asarray(cfg, dtype=np.uint8)
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


def unpack(word: int, width: int) -> np.ndarray:
    nbytes = (width + 7) // 8
    raw = np.frombuffer(word.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:width].copy()


def unpack_rows(words, width: int) -> np.ndarray:
    """Unpack a sequence of row words into a ``(len(words), width)`` array."""
    nbytes = (width + 7) // 8
    buf = b"".join(w.to_bytes(nbytes, "little") for w in words)
    raw = np.frombuffer(buf, dtype=np.uint8).reshape(len(words), nbytes)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :width]


def _step_word(x: int, width: int, mask: int, active: tuple[int, ...]) -> int:
    # left[i] = x[i-1], right[i] = x[i+1] on the ring
    left = ((x << 1) | (x >> (width - 1))) & mask
    right = (x >> 1) | ((x & 1) << (width - 1))
    nl, nc, nr = left ^ mask, x ^ mask, right ^ mask
    out = 0
    for n in active:
        out |= (left if n & 4 else nl) & (x if n & 2 else nc) & (right if n & 1 else nr)
    return out


def step(cfg, rule: int) -> np.ndarray:
    """Apply one synchronous update of ``rule`` with periodic boundaries."""
    rule = check_rule(rule)
    arr = check_configuration(cfg)
    width = arr.size
    word = _step_word(pack(arr), width, (1 << width) - 1, _ACTIVE[rule])
    return unpack(word, width)


@dataclass(frozen=True)
class SpacetimeField:
    """History of ``n_steps + 1`` rows; row 0 is the input configuration.

    ``burn_in`` marks the first row of the analysis window.
    """

    rows: tuple[int, ...]
    width: int
    rule: int
    burn_in: int = 0

    def __post_init__(self):
        if not 0 <= self.burn_in < len(self.rows) - 1:
            raise ValueError(
                f"burn_in must lie in [0, {len(self.rows) - 2}], got {self.burn_in}"
            )

    @property
    def n_steps(self) -> int:
        return len(self.rows) - 1

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, t: int) -> np.ndarray:
        return unpack(self.rows[t], self.width)

    def to_array(self) -> np.ndarray:
        return unpack_rows(self.rows, self.width)

    def window(self) -> np.ndarray:
        """Rows ``burn_in .. n_steps`` as a ``(T + 1 - burn_in, W)`` array."""
        return unpack_rows(self.rows[self.burn_in:], self.width)


def evolve(cfg, rule: int, steps: int, burn_in: int = 0) -> SpacetimeField:
    rule = check_rule(rule)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    arr = check_configuration(cfg)
    width = arr.size
    mask = (1 << width) - 1
    active = _ACTIVE[rule]
    word = pack(arr)
    rows = [word]
    for _ in range(steps):
        word = _step_word(word, width, mask, active)
        rows.append(word)
    return SpacetimeField(tuple(rows), width, rule, burn_in)


# --- symmetries ----------------------------------------------------------------

def _conjugate_rule(rule: int) -> int:
    return sum((1 - ((rule >> (7 - n)) & 1)) << n for n in range(8))


def _reflect_rule(rule: int) -> int:
    out = 0
    for n in range(8):
        l, c, r = (n >> 2) & 1, (n >> 1) & 1, n & 1
        out |= ((rule >> (4 * r + 2 * c + l)) & 1) << n
    return out


def transform_rule(rule: int, s: Symmetry) -> int:
    rule = check_rule(rule)
    s = Symmetry(s)
    if s.conjugates:
        rule = _conjugate_rule(rule)
    if s.reflects:
        rule = _reflect_rule(rule)
    return rule


def transform_config(cfg, s: Symmetry) -> np.ndarray:
    arr = check_configuration(cfg, min_width=1)
    s = Symmetry(s)
    if s.conjugates:
        arr = 1 - arr
    if s.reflects:
        arr = arr[::-1]
    return np.ascontiguousarray(arr, dtype=np.uint8)


def equivalence_set(rule: int) -> frozenset[int]:
    """Rules reachable from ``rule`` by conjugation and reflection."""
    rule = check_rule(rule)
    return frozenset(transform_rule(rule, s) for s in ALL_SYMMETRIES)


def representative(rule: int) -> int:
    """Lowest-numbered member of the rule's equivalence class."""
    return min(equivalence_set(rule))


@lru_cache(maxsize=None)
def _representatives() -> tuple[int, ...]:
    return tuple(sorted({representative(r) for r in range(N_RULES)}))


def representatives() -> list[int]:
    """Sorted minimal representatives of the 88 equivalence classes."""
    return list(_representatives())
