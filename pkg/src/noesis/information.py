"""Exact entropy and mutual information over small discrete tables, in bits."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

__all__ = ["entropy_bits", "mutual_information_bits"]


def entropy_bits(probs: Iterable[float]) -> float:
    """Shannon entropy of a probability vector, with 0 log 0 = 0."""
    total = 0.0
    for p in probs:
        if p > 0.0:
            total -= p * math.log2(p)
    return total


def mutual_information_bits(joint: Sequence[Sequence[float]]) -> float:
    """Mutual information of a joint table, rows and columns as the two variables.

    The table must hold nonnegative entries summing to one; zero cells
    contribute nothing.
    """
    row_marg = [sum(row) for row in joint]
    col_marg = [sum(col) for col in zip(*joint)]
    total = 0.0
    for i, row in enumerate(joint):
        for j, p in enumerate(row):
            if p > 0.0:
                total += p * math.log2(p / (row_marg[i] * col_marg[j]))
    return total
