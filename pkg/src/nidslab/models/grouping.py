"""Correlation-based feature grouping with a hard size cap.

Dimensions are clustered agglomeratively on the distance 1 - |corr|; any
cluster larger than the cap is split by descending the dendrogram, so the
result is a partition whose parts never exceed ``m_max``.
"""

from __future__ import annotations

from typing import List

import numpy as np
from scipy.cluster.hierarchy import linkage, to_tree
from scipy.spatial.distance import squareform


def correlation_distance(rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(rows.T)
    corr = np.nan_to_num(corr, nan=0.0)  # constant dims correlate with nothing
    np.fill_diagonal(corr, 1.0)
    dist = 1.0 - np.abs(corr)
    return np.clip((dist + dist.T) / 2.0, 0.0, None)


def feature_group(rows: np.ndarray, m_max: int) -> List[List[int]]:
    """Partition the feature dimensions into groups of at most m_max."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n_dims = rows.shape[1]
    if n_dims < 2:
        return [[i] for i in range(n_dims)]
    if m_max < 1:
        raise ValueError("m_max must be >= 1")

    dist = correlation_distance(rows)
    tree = to_tree(linkage(squareform(dist, checks=False), method="average"))

    groups: List[List[int]] = []

    def descend(node):
        if node.count <= m_max or node.is_leaf():
            groups.append(sorted(node.pre_order()))
        else:
            descend(node.left)
            descend(node.right)

    descend(tree)
    groups.sort(key=lambda g: g[0])
    return groups
