"""Reference implementations of the compiled kernels (used when the extension is absent)."""

from __future__ import annotations

import numpy as np


def orbit_ranks(mats: np.ndarray, vecs: np.ndarray, p: int) -> np.ndarray:
    """Rank mod p of the matrix with columns ``A v`` (A over ``mats``), per row v of ``vecs``."""
    mats = np.asarray(mats, dtype=np.int64)
    vecs = np.asarray(vecs, dtype=np.int64)
    h, k = mats.shape[0], mats.shape[1]
    out = np.zeros(len(vecs), dtype=np.int64)
    images = np.einsum("aij,tj->tia", mats, vecs) % p
    for t in range(len(vecs)):
        w = images[t].tolist()
        row = 0
        for col in range(h):
            if row == k:
                break
            piv = next((i for i in range(row, k) if w[i][col]), None)
            if piv is None:
                continue
            w[row], w[piv] = w[piv], w[row]
            inv = pow(w[row][col], -1, p)
            for i in range(row + 1, k):
                f = w[i][col] * inv % p
                if f:
                    w[i] = [(x - f * y) % p for x, y in zip(w[i], w[row])]
            row += 1
        out[t] = row
    return out


def coset_masks(rows: np.ndarray, offsets: np.ndarray, points: np.ndarray, modulus: int) -> np.ndarray:
    """mask[t, a] = 1 iff ``rows[a] @ points[t] + offsets[a]`` vanishes mod ``modulus``."""
    rows = np.asarray(rows, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    points = np.asarray(points, dtype=np.int64)
    out = np.empty((len(points), rows.shape[0]), dtype=np.uint8)
    for a in range(rows.shape[0]):
        vals = points @ rows[a].T + offsets[a]
        out[:, a] = np.all(vals % modulus == 0, axis=1)
    return out
