"""Word-sweep kernels.

Classifying every word of length <= L against a finite machine is the hot
inner loop of the equivalence oracles: a sweep touches sum(m**k) words and
each word is one table lookup per symbol.  The kernels walk the m-ary word
tree level by level, so each prefix is evaluated once.

Two backends implement the same contracts:

* ``numba``  - @njit compiled loops (default),
* ``numpy``  - vectorised fallback, no compilation step.

Select with the environment variable ``TOPOMATA_KERNELS=numba|numpy`` before
import.  If numba is unavailable the numpy path is used automatically.
``benchmarks/bench_kernels.py`` times one against the other.

Layout of every sweep result: verdicts for all words of length 0..max_len,
lengths in increasing order, words of equal length in lexicographic order of
symbol indices.  Verdict codes are ACCEPT/REJECT/UNDETERMINED below.

Multi-valued sweeps encode configuration sets as int64 bitmasks, so finite
nondeterministic machines are limited to 62 points here; callers fall back to
pure-Python evaluation beyond that.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

ACCEPT = 0
REJECT = 1
UNDETERMINED = 2

_ENV_VAR = "TOPOMATA_KERNELS"


def sweep_size(n_symbols: int, max_len: int) -> int:
    """Total number of words of length <= max_len over n_symbols letters."""
    return sum(n_symbols**k for k in range(max_len + 1))


# ------------------------------------------------------------------ numpy

def _dta_sweep_numpy(tables, lend, rend, init, klass, max_len, out):
    m = tables.shape[0]
    cur = np.array([lend[init]], dtype=np.int64)
    pos = 0
    for k in range(max_len + 1):
        out[pos : pos + cur.shape[0]] = klass[rend[cur]]
        pos += cur.shape[0]
        if k < max_len:
            # word w+sigma lands at index i*m + j for word i, symbol j
            cur = tables[:, cur].T.ravel()
    return out


def _nta_sweep_numpy(img, lend_img, rend_img, init_mask, acc, rej, subset_mode,
                     max_len, out):
    m, n = img.shape
    zero = np.int64(0)

    def images(row, masks):
        res = np.zeros_like(masks)
        for p in range(n):
            res |= np.where((masks >> np.int64(p)) & 1 == 1, row[p], zero)
        return res

    def classify(finals):
        v = np.full(finals.shape, UNDETERMINED, dtype=np.uint8)
        is_acc = (finals & acc) != 0
        if subset_mode:
            is_rej = ~is_acc & (finals != 0) & ((finals & ~rej) == 0)
        else:
            is_rej = ~is_acc
        v[is_acc] = ACCEPT
        v[is_rej] = REJECT
        return v

    cur = images(lend_img, np.array([init_mask], dtype=np.int64))
    pos = 0
    for k in range(max_len + 1):
        out[pos : pos + cur.shape[0]] = classify(images(rend_img, cur))
        pos += cur.shape[0]
        if k < max_len:
            cur = np.stack([images(img[j], cur) for j in range(m)], axis=1).ravel()
    return out


def _open_flags_numpy(mins):
    """flags[mask] == True iff mask is open for the minimal-neighborhood table."""
    n = mins.shape[0]
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(1 << n, dtype=bool)
    for p in range(n):
        has_p = ((masks >> np.int64(p)) & 1) == 1
        covers = (masks & mins[p]) == mins[p]
        ok &= covers | ~has_p
    return ok


_NUMPY_IMPLS = {
    "dta_sweep": _dta_sweep_numpy,
    "nta_sweep": _nta_sweep_numpy,
    "open_flags": _open_flags_numpy,
}


# ------------------------------------------------------------------ numba

def _build_numba_impls():
    from numba import njit

    @njit(cache=True)
    def dta_sweep(tables, lend, rend, init, klass, max_len, out):
        m = tables.shape[0]
        cur = np.empty(1, dtype=np.int64)
        cur[0] = lend[init]
        pos = 0
        for k in range(max_len + 1):
            for i in range(cur.shape[0]):
                out[pos + i] = klass[rend[cur[i]]]
            pos += cur.shape[0]
            if k < max_len:
                nxt = np.empty(cur.shape[0] * m, dtype=np.int64)
                for i in range(cur.shape[0]):
                    c = cur[i]
                    for j in range(m):
                        nxt[i * m + j] = tables[j, c]
                cur = nxt
        return out

    @njit(cache=True)
    def nta_sweep(img, lend_img, rend_img, init_mask, acc, rej, subset_mode,
                  max_len, out):
        m, n = img.shape
        cur = np.empty(1, dtype=np.int64)
        s = np.int64(0)
        for p in range(n):
            if (init_mask >> p) & 1:
                s |= lend_img[p]
        cur[0] = s
        pos = 0
        for k in range(max_len + 1):
            for i in range(cur.shape[0]):
                final = np.int64(0)
                for p in range(n):
                    if (cur[i] >> p) & 1:
                        final |= rend_img[p]
                if final & acc:
                    out[pos + i] = ACCEPT
                elif subset_mode:
                    if final != 0 and (final & ~rej) == 0:
                        out[pos + i] = REJECT
                    else:
                        out[pos + i] = UNDETERMINED
                else:
                    out[pos + i] = REJECT
            pos += cur.shape[0]
            if k < max_len:
                nxt = np.empty(cur.shape[0] * m, dtype=np.int64)
                for i in range(cur.shape[0]):
                    for j in range(m):
                        t = np.int64(0)
                        for p in range(n):
                            if (cur[i] >> p) & 1:
                                t |= img[j, p]
                        nxt[i * m + j] = t
                cur = nxt
        return out

    @njit(cache=True)
    def open_flags(mins):
        n = mins.shape[0]
        total = 1 << n
        ok = np.ones(total, dtype=np.bool_)
        for mask in range(total):
            for p in range(n):
                if (mask >> p) & 1 and (mask & mins[p]) != mins[p]:
                    ok[mask] = False
                    break
        return ok

    return {"dta_sweep": dta_sweep, "nta_sweep": nta_sweep,
            "open_flags": open_flags}


_numba_impls = None


def _get_numba_impls():
    global _numba_impls
    if _numba_impls is None:
        _numba_impls = _build_numba_impls()
    return _numba_impls


# --------------------------------------------------------------- dispatch

def _pick_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba":
        try:
            import numba  # noqa: F401
        except ImportError:
            warnings.warn("numba unavailable, falling back to numpy kernels")
            return "numpy"
    return choice


_BACKEND = _pick_backend()


def active_backend() -> str:
    return _BACKEND


def get_impl(name: str, backend: str | None = None):
    """Fetch a kernel by name for a specific backend (used by the benchmark)."""
    backend = backend or _BACKEND
    if backend == "numpy":
        return _NUMPY_IMPLS[name]
    return _get_numba_impls()[name]


def dta_sweep(tables, lend, rend, init, klass, max_len):
    """Verdict codes for every word of length <= max_len on a deterministic
    finite machine given as int64 transition tables."""
    out = np.empty(sweep_size(tables.shape[0], max_len), dtype=np.uint8)
    return get_impl("dta_sweep")(tables, lend, rend, np.int64(init), klass,
                                 max_len, out)


def nta_sweep(img, lend_img, rend_img, init_mask, acc_mask, rej_mask,
              subset_mode, max_len):
    """Verdict codes for every word of length <= max_len on a multi-valued
    finite machine; configuration sets are int64 bitmasks (<= 62 points)."""
    if img.shape[1] > 62:
        raise ValueError("bitmask kernels support at most 62 points")
    out = np.empty(sweep_size(img.shape[0], max_len), dtype=np.uint8)
    return get_impl("nta_sweep")(img, lend_img, rend_img, np.int64(init_mask),
                                 np.int64(acc_mask), np.int64(rej_mask),
                                 subset_mode, max_len, out)


def open_flags(mins):
    """Boolean vector over all 2**n masks: which are open for the given
    minimal-neighborhood table (int64 array of length n <= 22)."""
    if mins.shape[0] > 22:
        raise ValueError("open-set scan supports at most 22 points")
    return get_impl("open_flags")(np.asarray(mins, dtype=np.int64))


def warmup():
    """Force kernel compilation so later timing loops measure steady state."""
    t = np.zeros((1, 1), dtype=np.int64)
    e = np.zeros(1, dtype=np.int64)
    k = np.zeros(1, dtype=np.uint8)
    dta_sweep(t, e, e, 0, k, 1)
    one = np.ones((1, 1), dtype=np.int64)
    nta_sweep(one, one[0], one[0], 1, 1, 0, True, 1)
    open_flags(np.ones(1, dtype=np.int64))
