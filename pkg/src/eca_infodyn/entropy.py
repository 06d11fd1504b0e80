"""Plug-in transfer entropy between binary cell time series.

With ``a`` the target's next state, ``b`` its past ``k`` states and ``c``
the source's past ``l`` states, the plug-in estimate over ``n`` samples is

    n * TE = S(a,b,c) - S(b,c) - S(a,b) + S(b),    S(.) = sum_cells m log2 m

over the cells ``m`` of each empirical joint count table.  Every ``S`` is
evaluated from the *histogram* of table cell values (how many cells hold
count ``m``) with a fixed summation order over ``m``.  As a result the value
is exactly invariant to relabelling symbols, and the single-pair and
all-pairs paths agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .rules import SpacetimeField
from .validation import check_series

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class TEConfig:
    """History lengths for the target (``k``) and source (``l``), in time steps.

    ``bias_correction`` applies a Miller-Madow correction to the two
    conditional entropies; it is off for reproduction runs.
    """

    k: int = 5
    l: int = 2
    bias_correction: bool = False

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise ValueError(f"history lengths must be >= 1, got k={self.k}, l={self.l}")
        if self.k + self.l > 14:
            raise ValueError(f"k + l must not exceed 14, got {self.k + self.l}")

    @property
    def lag(self) -> int:
        return max(self.k, self.l)


@lru_cache(maxsize=64)
def _xlog2x(n: int) -> np.ndarray:
    m = np.arange(n + 1, dtype=np.float64)
    out = np.zeros(n + 1)
    out[2:] = m[2:] * np.log2(m[2:])
    out.setflags(write=False)
    return out


def _sum_xlog2x(hist: np.ndarray) -> np.ndarray:
    """``sum_m hist[..., m] * m log2 m``, accumulated in increasing ``m``."""
    f = _xlog2x(hist.shape[-1] - 1)
    acc = np.zeros(hist.shape[:-1])
    used = np.flatnonzero(hist.reshape(-1, hist.shape[-1])[:, 2:].any(axis=0)) + 2
    for m in used:
        acc += hist[..., m] * f[m]
    return acc


def _te_from_hists(h_abc, h_bc, h_ab, h_b, n: int, bias_correction: bool) -> np.ndarray:
    s_abc, s_bc = _sum_xlog2x(h_abc), _sum_xlog2x(h_bc)
    s_ab, s_b = _sum_xlog2x(h_ab), _sum_xlog2x(h_b)
    # grouping keeps TE(x -> x) exactly zero when k >= l
    te = ((s_abc - s_bc) - (s_ab - s_b)) / n
    if bias_correction:
        k_abc, k_bc = h_abc[..., 1:].sum(-1), h_bc[..., 1:].sum(-1)
        k_ab, k_b = h_ab[..., 1:].sum(-1), h_b[..., 1:].sum(-1)
        te = te + (k_ab - k_b - k_abc + k_bc) / (2.0 * n * _LN2)
    return np.maximum(te, 0.0)


def _value_hist(tables: np.ndarray, n: int, lead: int) -> np.ndarray:
    flat = tables.reshape(lead, -1)
    rows = np.repeat(np.arange(lead), flat.shape[1])
    hist = np.bincount(rows * (n + 1) + flat.ravel(), minlength=lead * (n + 1))
    return hist.reshape(lead, n + 1)


def te_from_counts(counts, bias_correction: bool = False) -> np.ndarray:
    """Transfer entropy in bits from joint count tables.

    ``counts`` has shape ``(..., 2, 2**k, 2**l)`` indexed by
    ``(x_next, x_past, y_past)``; leading axes are batch axes.
    """
    counts = np.asarray(counts, dtype=np.int64)
    batch = counts.shape[:-3]
    lead = int(np.prod(batch, dtype=np.int64))
    counts = counts.reshape((lead,) + counts.shape[-3:])
    totals = counts.sum(axis=(1, 2, 3))
    if lead == 0:
        return np.zeros(batch)
    n = int(totals[0])
    if (totals != n).any():
        raise ValueError("all count tables in a batch must share one sample size")
    if n == 0:
        raise ValueError("count tables are empty")
    c_ab = counts.sum(axis=3)
    h = [
        _value_hist(counts, n, lead),
        _value_hist(counts.sum(axis=1), n, lead),
        _value_hist(c_ab, n, lead),
        _value_hist(c_ab.sum(axis=1), n, lead),
    ]
    return _te_from_hists(*h, n, bias_correction).reshape(batch)


def _history_codes(series: np.ndarray, length: int, lag: int) -> np.ndarray:
    """Encode ``series[t-length .. t-1]`` for ``t = lag .. n-1`` along axis 0.

    Bit ``j-1`` of the code holds ``series[t-j]``.
    """
    n = series.shape[0]
    code = np.zeros((n - lag,) + series.shape[1:], dtype=np.int16)
    for j in range(1, length + 1):
        code |= series[lag - j:n - j].astype(np.int16) << (j - 1)
    return code


def joint_counts(target, source, cfg: TEConfig = TEConfig()) -> np.ndarray:
    """Count table ``(2, 2**k, 2**l)`` over all valid time offsets."""
    x = check_series(target, "target")
    y = check_series(source, "source")
    if x.shape != y.shape:
        raise ValueError(f"series lengths differ: {x.size} != {y.size}")
    if x.size < cfg.lag + 1:
        raise ValueError(f"series of length {x.size} too short for history {cfg.lag}")
    lag = cfg.lag
    a = x[lag:].astype(np.int64)
    b = _history_codes(x, cfg.k, lag).astype(np.int64)
    c = _history_codes(y, cfg.l, lag).astype(np.int64)
    n_b, n_c = 1 << cfg.k, 1 << cfg.l
    flat = np.bincount((a * n_b + b) * n_c + c, minlength=2 * n_b * n_c)
    return flat.reshape(2, n_b, n_c)


def transfer_entropy(target, source, cfg: TEConfig = TEConfig()) -> float:
    """Plug-in estimate of TE from ``source`` to ``target`` in bits."""
    return float(te_from_counts(joint_counts(target, source, cfg), cfg.bias_correction))


def _run_hist(sorted_codes: np.ndarray) -> np.ndarray:
    """Histogram of run lengths per row of a row-sorted code array."""
    rows, n = sorted_codes.shape
    start = np.ones((rows, n), dtype=bool)
    start[:, 1:] = sorted_codes[:, 1:] != sorted_codes[:, :-1]
    pos = np.flatnonzero(start)
    lengths = np.diff(np.append(pos, rows * n))
    hist = np.bincount((pos // n) * (n + 1) + lengths, minlength=rows * (n + 1))
    return hist.reshape(rows, n + 1)


def _window(field) -> np.ndarray:
    if isinstance(field, SpacetimeField):
        return field.window()
    arr = np.asarray(field)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D (time, cell) array, got shape {arr.shape}")
    return arr.astype(np.uint8)


def te_matrix(field, cfg: TEConfig = TEConfig()) -> np.ndarray:
    """``W x W`` matrix with entry ``[y, x]`` = TE from cell y to cell x.

    ``field`` is a :class:`SpacetimeField` (its post burn-in window is used)
    or a ``(time, cell)`` array taken as the window itself.
    """
    window = _window(field)
    rows, width = window.shape
    lag = cfg.lag
    if rows < lag + 1:
        raise ValueError(f"window of length {rows} too short for history {lag}")
    n = rows - lag
    a = window[lag:].astype(np.int16)
    target = (_history_codes(window, cfg.k, lag) << 1) | a  # (b, a)
    source = _history_codes(window, cfg.l, lag)

    # code = (b, c, a): sorting groups (b, c) runs contiguously as well
    tgt = (target >> 1) << (cfg.l + 1) | (target & 1)
    joint = tgt.T[None, :, :] | (source.T[:, None, :] << 1)
    joint = np.sort(joint.reshape(width * width, n), axis=1, kind="stable")
    h_abc = _run_hist(joint)
    h_bc = _run_hist(joint >> 1)

    per_target = np.sort(target.T, axis=1, kind="stable")
    h_ab = _run_hist(per_target)
    h_b = _run_hist(per_target >> 1)

    te = _te_from_hists(
        h_abc.reshape(width, width, n + 1),
        h_bc.reshape(width, width, n + 1),
        h_ab[None, :, :],
        h_b[None, :, :],
        n,
        cfg.bias_correction,
    )
    return te


def te_matrix_pairwise(field, cfg: TEConfig = TEConfig()) -> np.ndarray:
    """Reference path computing each entry with :func:`transfer_entropy`."""
    window = _window(field)
    width = window.shape[1]
    out = np.empty((width, width))
    for y in range(width):
        for x in range(width):
            out[y, x] = transfer_entropy(window[:, x], window[:, y], cfg)
    return out


def mean_te(matrix) -> float:
    """Average over all entries, summed exactly so order never matters."""
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty TE matrix")
    return math.fsum(arr.ravel().tolist()) / arr.size


class TransferEntropyTransformer(TransformerMixin, BaseEstimator):
    """Map space-time fields to TE matrices or their patch averages.

    Parameters
    ----------
    k, l : int
        Target and source history lengths.
    bias_correction : bool
        Apply Miller-Madow correction.
    reduce : {"mean", "matrix"}
        ``"mean"`` returns one averaged value per field, ``"matrix"`` the
        stacked ``(n_fields, W, W)`` matrices.
    """

    def __init__(self, k=5, l=2, bias_correction=False, reduce="mean"):
        self.k = k
        self.l = l
        self.bias_correction = bias_correction
        self.reduce = reduce

    def fit(self, X=None, y=None):
        if self.reduce not in ("mean", "matrix"):
            raise ValueError(f"reduce must be 'mean' or 'matrix', got {self.reduce!r}")
        self.te_config_ = TEConfig(self.k, self.l, self.bias_correction)
        return self

    def transform(self, X):
        if not hasattr(self, "te_config_"):
            self.fit()
        mats = [te_matrix(f, self.te_config_) for f in X]
        if self.reduce == "mean":
            return np.array([mean_te(m) for m in mats])
        return np.stack(mats)
