"""
Helper utility functions for Graph Blowup Lab.

Common functions used across the application.
"""

import hashlib
import json
import math
import re
from typing import Any, List, Sequence


def generate_slug(title: str) -> str:
    """
    Generate a filesystem-friendly slug from a run label.

    Args:
        title: The label to convert

    Returns:
        Slug string

    Example:
        >>> generate_slug("Scalar p=2 on Z1 r64")
        'scalar-p2-on-z1-r64'
    """
    slug = title.lower()
    slug = re.sub(r'[^\w\s-]', '', slug)
    slug = re.sub(r'[\s_-]+', '-', slug)
    return slug.strip('-')


def format_real(x: float) -> str:
    """
    Format a real with 17 significant digits (round-trips exactly).

    Example:
        >>> format_real(0.1)
        '0.10000000000000001'
    """
    return f"{x:.17g}"


def settings_hash(payload: Any) -> str:
    """
    Stable short hash of a JSON-serialisable payload.

    Keys are sorted, so dict ordering does not change the hash.

    Example:
        >>> settings_hash({"p": 2}) == settings_hash({"p": 2.0})
        False
    """
    text = json.dumps(payload, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def geometric_grid(lo: float, hi: float, count: int) -> List[float]:
    """
    ``count`` geometrically spaced values from lo to hi inclusive.

    Example:
        >>> geometric_grid(1.0, 100.0, 3)
        [1.0, 10.0, 100.0]
    """
    if count == 1:
        return [float(lo)]
    ratio = (hi / lo) ** (1.0 / (count - 1))
    values = [lo * ratio ** k for k in range(count)]
    values[-1] = float(hi)
    return [float(v) for v in values]


def growth_flag(values: Sequence[float], tolerance: float) -> bool:
    """
    True when a ladder of measurements trends upward beyond ``tolerance``.

    The ladder counts as a trend when no step drops by more than
    ``tolerance``; it is flagged when it then grows by more than
    ``tolerance`` from first to last value.

    Example:
        >>> growth_flag([1.0, 1.02, 1.05], 0.10)
        False
        >>> growth_flag([1.0, 2.0, 4.0], 0.10)
        True
        >>> growth_flag([32.0, 118.0, 344.0, 571.0], 0.10)
        True
        >>> growth_flag([41.8, 41.8, 41.8, 41.8], 0.10)
        False
        >>> growth_flag([1.0, 1.06, 1.12], 0.10)
        True
        >>> growth_flag([32.0, 118.0, 117.0, 571.0], 0.10)
        True
        >>> growth_flag([10.0, 9.5, 10.6, 10.1], 0.10)
        False
    """
    factors = growth_factors(values)
    if not factors:
        return False
    if any(f < 1.0 - tolerance for f in factors):
        return False
    return math.prod(factors) > 1.0 + tolerance


def growth_factors(values: Sequence[float]) -> List[float]:
    """
    Ratios between consecutive positive finite values of a ladder.

    Example:
        >>> growth_factors([1.0, 2.0, 3.0])
        [2.0, 1.5]
    """
    finite = [v for v in values if v is not None and math.isfinite(v) and v > 0]
    return [b / a for a, b in zip(finite, finite[1:])]
