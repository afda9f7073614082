"""
Rank statistics for one-class scores.
"""

import math
from itertools import groupby
from typing import List, Sequence

import numpy as np


def tied_rank(values: Sequence) -> List[float]:
    """1-based ranks, ties sharing the average of their positions. Works on exact scores."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    position = 0
    for _, group in groupby(order, key=lambda i: values[i]):
        members = list(group)
        average = position + (len(members) + 1) / 2.0
        for i in members:
            ranks[i] = average
        position += len(members)
    return ranks


def auc(anomaly_class_scores: Sequence, normal_class_scores: Sequence) -> float:
    """
    Mann-Whitney AUC: probability that a random (anomalous, normal) pair is
    ordered with the normal score higher, ties counting one half.

    For anomaly scores (negative selection) swap the arguments.
    """
    if len(anomaly_class_scores) == 0 or len(normal_class_scores) == 0:
        raise ValueError("both score lists must be non-empty")
    n_anomalous, n_normal = len(anomaly_class_scores), len(normal_class_scores)
    ranks = np.asarray(tied_rank(list(normal_class_scores) + list(anomaly_class_scores)))
    u_statistic = ranks[:n_normal].sum() - n_normal * (n_normal + 1) / 2.0
    return float(u_statistic / (n_normal * n_anomalous))


def sem(values: Sequence[float]) -> float:
    """Sample standard deviation over sqrt(n); 0 for fewer than two values."""
    if len(values) < 2:
        return 0.0
    return float(np.std(np.asarray(values, dtype=float), ddof=1) / math.sqrt(len(values)))
