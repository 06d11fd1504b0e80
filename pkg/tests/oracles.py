"""Independent reference computations used by several test modules."""

import math
from collections import Counter

import numpy as np


def brute_force_te(target, source, k=1, l=1):
    """TE straight from the definition with explicit joint-count dictionaries."""
    lag = max(k, l)
    n = len(target)
    joint = Counter()
    for t in range(lag, n):
        a = target[t]
        b = tuple(target[t - k:t])
        c = tuple(source[t - l:t])
        joint[a, b, c] += 1
    total = sum(joint.values())
    p_bc, p_ab, p_b = Counter(), Counter(), Counter()
    for (a, b, c), m in joint.items():
        p_bc[b, c] += m
        p_ab[a, b] += m
        p_b[b] += m
    te = 0.0
    for (a, b, c), m in joint.items():
        cond_full = m / p_bc[b, c]
        cond_self = p_ab[a, b] / p_b[b]
        te += (m / total) * math.log2(cond_full / cond_self)
    return te


def all_pairs_te_k1(series):
    """TE for every ordered pair of columns of ``series`` (time, M), k = l = 1.

    Returns an ``(M, M)`` array indexed ``[source, target]``.  Counts come from
    one-hot products, probabilities from the conditional form.
    """
    x = np.asarray(series, dtype=np.int64)
    nxt, cur = x[1:], x[:-1]
    n = nxt.shape[0]
    tgt = np.zeros(nxt.shape + (2, 2))
    for a in (0, 1):
        for b in (0, 1):
            tgt[..., a, b] = (nxt == a) & (cur == b)
    src = np.stack([(cur == 0), (cur == 1)], axis=-1).astype(float)
    joint = np.einsum("txab,tyc->yxabc", tgt, src) / n
    p_bc = joint.sum(axis=2, keepdims=True)
    p_ab = joint.sum(axis=4, keepdims=True)
    p_b = joint.sum(axis=(2, 4), keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (joint / p_bc) / (p_ab / p_b)
        terms = np.where(joint > 0, joint * np.log2(np.where(joint > 0, ratio, 1.0)), 0.0)
    return terms.sum(axis=(2, 3, 4))


def all_binary_series(n):
    """Every binary series of length ``n`` as columns of an ``(n, 2**n)`` array."""
    idx = np.arange(1 << n)
    return ((idx[None, :] >> np.arange(n)[:, None]) & 1).astype(np.uint8)


def eca_step(cells, rule):
    """One periodic update, read off the rule's binary expansion."""
    w = len(cells)
    bits = format(rule, "08b")[::-1]
    return [int(bits[4 * cells[(i - 1) % w] + 2 * cells[i] + cells[(i + 1) % w]]) for i in range(w)]


def ring_coarse_graining_holds(rule_a, rule_b, table, n, blocks=3):
    """Exhaustively compare N fine steps with one coarse step on a ring of ``blocks * n`` cells."""
    width = blocks * n

    def project(cells):
        out = []
        for j in range(0, width, n):
            idx = 0
            for b in cells[j:j + n]:
                idx = 2 * idx + b
            out.append(table[idx])
        return out

    for code in range(1 << width):
        cells = [(code >> i) & 1 for i in range(width)]
        fine = cells
        for _ in range(n):
            fine = eca_step(fine, rule_a)
        if project(fine) != eca_step(project(cells), rule_b):
            return False
    return True
