"""Exhaustive ground truth for the sign-vector quadratic maximization.

Enumerates c'Kc over all sign vectors (c_1 pinned to +1: the objective is
invariant under a global flip) in Gray-code order, updating Kc and the
objective in O(n) per visited vector. Used to validate the fixed-point
solver on small instances, together with the max-cut form of the same
objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InstanceTooLarge
from .kernel import GramMatrix
from .l1 import validate_sign_vector

DEFAULT_LIMIT = 20


@dataclass
class OracleResult:
    """Best sign vector and objective over the full enumeration.

    objective_histogram optionally holds all 2^(n-1) visited objective
    values in visiting order.
    """

    best_sign: np.ndarray
    best_objective: float
    objective_histogram: list[float] | None = None


def _tie_key(c: np.ndarray) -> tuple:
    # +1 sorts before -1, so the all-plus vector wins exact ties.
    return tuple(0 if ci > 0 else 1 for ci in c)


def enumerate_sign_vectors(gram_matrix: GramMatrix, limit: int = DEFAULT_LIMIT,
                           keep_histogram: bool = False) -> OracleResult:
    """Maximize c'Kc over sign vectors by exhaustive Gray-code search.

    Flipping one entry i updates the objective by 4*K_ii - 4*c_i*(Kc)_i
    and the product Kc by -2*c_i*K[:, i], so each of the 2^(n-1) vectors
    costs O(n). Exact ties are broken toward the vector whose +1 entries
    come first.
    """
    K = gram_matrix.entries
    n = K.shape[0]
    if n > limit:
        raise InstanceTooLarge(f"n={n} exceeds enumeration limit {limit}")

    c = np.ones(n)
    v = K @ c
    obj = float(c @ v)
    best_c = c.copy()
    best_obj = obj
    hist = [obj] if keep_histogram else None

    # Reflected Gray code over entries 1..n-1; step t flips the entry at
    # (number of trailing zeros of t) + 1.
    for t in range(1, 1 << (n - 1)):
        i = (t & -t).bit_length()  # trailing zeros + 1
        obj += 4.0 * K[i, i] - 4.0 * c[i] * v[i]
        v -= 2.0 * c[i] * K[:, i]
        c[i] = -c[i]
        if keep_histogram:
            hist.append(obj)
        if obj > best_obj or (obj == best_obj and _tie_key(c) < _tie_key(best_c)):
            best_obj = obj
            best_c = c.copy()

    # Incremental updates carry rounding drift; report the winner's value
    # recomputed from scratch.
    best_obj = float(best_c @ (K @ best_c))
    return OracleResult(best_sign=best_c, best_objective=best_obj,
                        objective_histogram=hist)


def maxcut_objective(gram_matrix: GramMatrix, c) -> float:
    """The same quadratic form written as a max-cut value.

    With edge weights -K_ij, the value is sum_ij K_ij plus the weight of
    the cut induced by the sign partition; it equals c'Kc identically.
    """
    K = gram_matrix.entries
    c = validate_sign_vector(c, K.shape[0])
    d = c[:, None] - c[None, :]
    cut = float(np.sum(np.triu(-K * d * d, k=1)))
    return float(K.sum()) + cut
