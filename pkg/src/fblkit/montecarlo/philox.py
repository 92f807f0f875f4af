"""Vectorised Philox4x32-10 counter-based generator.

Every uniform variate is a pure function of (seed, stream, trial, index), so
any partition of trials across workers reproduces the same numbers.
"""

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)


def philox4x32(counter, key, rounds=10):
    """Apply Philox4x32 to ``counter`` (4 uint32 arrays) under ``key`` (2 uint32).

    Arrays broadcast against each other; results are four uint64 arrays
    holding 32-bit values.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK for c in counter)
    k0, k1 = (np.asarray(k, dtype=np.uint64) & _MASK for k in key)
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> _SHIFT) ^ c1 ^ k0,
            p1 & _MASK,
            (p0 >> _SHIFT) ^ c3 ^ k1,
            p0 & _MASK,
        )
    return c0, c1, c2, c3


def uniforms(seed, stream, trials, count):
    """Uniform doubles in [0, 1) of shape ``(len(trials), count)``.

    Variate ``j`` of trial ``t`` is fixed by ``(seed, stream, t, j)`` alone.
    Each Philox block yields two 53-bit doubles.
    """
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    key = (np.uint64(seed & 0xFFFFFFFF), np.uint64(seed >> 32))
    t = np.asarray(trials, dtype=np.uint64)[:, None]
    blocks = np.arange((count + 1) // 2, dtype=np.uint64)[None, :]
    a, b, c, d = philox4x32(
        (blocks, t & _MASK, t >> _SHIFT, np.uint64(stream)), key
    )
    # 27 + 26 bits -> 53-bit mantissa
    u0 = ((a >> np.uint64(5)) * np.uint64(1 << 26) + (b >> np.uint64(6))) * (2.0 ** -53)
    u1 = ((c >> np.uint64(5)) * np.uint64(1 << 26) + (d >> np.uint64(6))) * (2.0 ** -53)
    out = np.empty((t.shape[0], 2 * blocks.shape[1]))
    out[:, 0::2] = u0
    out[:, 1::2] = u1
    return out[:, :count]

