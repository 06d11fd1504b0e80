"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

MIN_WIDTH = 3


def check_rule(rule) -> int:
    """Return ``rule`` as a plain int, raising ``ValueError`` outside 0..255."""
    if isinstance(rule, (bool, np.bool_)) or not isinstance(rule, numbers.Integral):
        raise TypeError(f"rule must be an integer, got {type(rule).__name__}")
    rule = int(rule)
    if not 0 <= rule <= 255:
        raise ValueError(f"rule must be in [0, 255], got {rule}")
    return rule


def check_width(width, *, odd: bool = False) -> int:
    if not isinstance(width, numbers.Integral) or isinstance(width, bool):
        raise TypeError(f"width must be an integer, got {type(width).__name__}")
    width = int(width)
    if width < MIN_WIDTH:
        raise ValueError(f"width must be >= {MIN_WIDTH}, got {width}")
    if odd and width % 2 == 0:
        raise ValueError(f"width must be odd, got {width}")
    return width


def check_configuration(cfg, *, min_width: int = MIN_WIDTH) -> np.ndarray:
    """Coerce ``cfg`` to a 1-D uint8 array of bits.

    Accepts any sequence of 0/1 values (bools included) or a string of
    ``0``/``1`` characters.
    """
    if isinstance(cfg, str):
        if set(cfg) - {"0", "1"}:
            raise ValueError("configuration strings may only contain '0' and '1'")
        cfg = [int(ch) for ch in cfg]
    arr = np.asarray(cfg)
    if arr.ndim != 1:
        raise ValueError(f"configuration must be 1-D, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("configuration cells must be 0 or 1")
    if arr.size < min_width:
        raise ValueError(f"configuration width must be >= {min_width}, got {arr.size}")
    return arr.astype(np.uint8)


def check_series(series, name: str = "series") -> np.ndarray:
    arr = np.asarray(series)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} must be binary")
    return arr.astype(np.uint8)
