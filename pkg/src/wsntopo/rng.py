"""Deterministic random streams and the sampling primitives built on them.

Reproducibility contract
------------------------
Every random draw in this package flows through a counter-based Philox
generator keyed by ``blake2b(seed "/" part "/" part ...)``.  Philox has a
fixed, platform-independent output sequence, and the only primitive consumed
from it is ``Generator.random()`` (uniform doubles).  Integer and subset
draws are derived from those doubles with the documented recipes below, so
any consumer can replay a stream independently:

* ``substream(seed, *path)``   -- Philox generator keyed by the 128-bit
  blake2b digest of ``str(seed)`` joined with ``str(part)`` for each path
  element, separated by ``"/"``.
* ``derive_seed(seed, *path)`` -- top 63 bits of the same digest, for
  handing a child seed to an API that takes plain integers.
* ``rand_below(gen, n)``       -- ``min(int(gen.random() * n), n - 1)``.
* ``sample_indices(gen, n, k)``-- partial Fisher-Yates over ``[0, n)``:
  for ``i`` in ``0..k-1`` swap position ``i`` with position
  ``i + rand_below(gen, n - i)``; the result is the first ``k`` slots in
  draw order.
* ``weighted_index(gen, w)``   -- inverse-CDF lookup on ``np.cumsum(w)``
  with ``u = gen.random() * total``; a zero-mass vector falls back to a
  uniform ``rand_below`` (degenerate weights must still make progress).
* ``weighted_indices_without_replacement(gen, w, k)`` -- ``k`` sequential
  ``weighted_index`` draws, zeroing each winner's weight.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = [
    "substream",
    "derive_seed",
    "rand_below",
    "sample_indices",
    "sample_items",
    "weighted_index",
    "weighted_indices_without_replacement",
]


def _digest(seed: int, path: tuple) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(str(int(seed)).encode("ascii"))
    for part in path:
        h.update(b"/")
        h.update(str(part).encode("utf-8"))
    return h.digest()


def substream(seed: int, *path) -> np.random.Generator:
    """Independent Philox stream for (seed, path).

    Path elements may be ints or short strings naming the purpose of the
    stream, e.g. ``substream(seed, "sweep", fraction_index, trial_index)``.
    """
    key = int.from_bytes(_digest(seed, path), "big")
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, *path) -> int:
    """Stable 63-bit child seed for (seed, path)."""
    return int.from_bytes(_digest(seed, path), "big") >> 65


def rand_below(gen: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n) from one double draw."""
    if n <= 0:
        raise ValueError("rand_below needs n >= 1")
    # clamp guards the (theoretical) u*n == n rounding edge
    return min(int(gen.random() * n), n - 1)


def sample_indices(gen: np.random.Generator, n: int, k: int) -> list[int]:
    """k distinct indices from [0, n), uniform, in draw order."""
    if k > n:
        raise ValueError(f"cannot sample {k} of {n}")
    pool = list(range(n))
    for i in range(k):
        j = i + rand_below(gen, n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def sample_items(gen: np.random.Generator, items, k: int) -> list:
    """k distinct members of ``items``, uniform, in draw order."""
    seq = list(items)
    return [seq[i] for i in sample_indices(gen, len(seq), k)]


def weighted_index(gen: np.random.Generator, weights: np.ndarray) -> int:
    """One index drawn proportionally to ``weights`` (>= 0)."""
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        raise ValueError("weighted_index needs at least one weight")
    cum = np.cumsum(w)
    total = cum[-1]
    if total <= 0.0:
        return rand_below(gen, w.size)
    u = gen.random() * total
    return min(int(np.searchsorted(cum, u, side="right")), w.size - 1)


def weighted_indices_without_replacement(
    gen: np.random.Generator, weights: np.ndarray, k: int
) -> list[int]:
    """k distinct indices, drawn sequentially with probability ~ weight.

    Winners get their weight zeroed; once all remaining mass is zero the
    rest of the draws are uniform over the not-yet-picked indices.
    """
    w = np.asarray(weights, dtype=np.float64).copy()
    if k > w.size:
        raise ValueError(f"cannot sample {k} of {w.size}")
    alive = np.ones(w.size, dtype=bool)
    out: list[int] = []
    for _ in range(k):
        if w.sum() > 0.0:
            idx = weighted_index(gen, w)
            if not alive[idx]:  # float-edge clamp landed on a spent slot
                live = np.flatnonzero(alive)
                idx = int(live[rand_below(gen, live.size)])
        else:
            live = np.flatnonzero(alive)
            idx = int(live[rand_below(gen, live.size)])
        out.append(int(idx))
        w[idx] = 0.0
        alive[idx] = False
    return out
