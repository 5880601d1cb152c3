"""Hot integer kernels with numba and pure-numpy implementations.

All kernels operate on ``int64`` rows of doubled coordinates, so every
operation is exact.  The backend is selected by the environment variable
``MFPAIRS_BACKEND``:

* ``auto`` (default): numba when importable, else numpy
* ``numba``: require numba, error if missing
* ``numpy``: force the pure-numpy fallback

Both paths return bit-identical results (asserted in the test suite);
``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import MfpairsError

_MODE = os.environ.get("MFPAIRS_BACKEND", "auto").lower()
if _MODE not in ("auto", "numba", "numpy"):
    raise MfpairsError(f"MFPAIRS_BACKEND must be auto/numba/numpy, got {_MODE!r}")

if _MODE == "numpy":
    _HAVE_NUMBA = False
else:
    try:
        import numba
        from numba import njit
        from numba.typed import Dict as NbDict
        from numba.typed import List as NbList

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - mirror absent
        if _MODE == "numba":
            raise MfpairsError("MFPAIRS_BACKEND=numba but numba is not importable")
        _HAVE_NUMBA = False


def backend() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"


_FAM_CODE = {"A": 0, "B": 1, "C": 2, "D": 3}

# Keys must fit in int64 with headroom; 2**62 keeps subtraction safe.
_KEY_LIMIT = 1 << 62


# ---------------------------------------------------------------------------
# packing rows of bounded ints into single int64 keys (lex-monotone)
# ---------------------------------------------------------------------------

def pack_bounds(lo: int, hi: int, width: int):
    """Radix powers for packing `width` columns in [lo, hi]; None if too wide."""
    base = hi - lo + 1
    if base <= 0:
        base = 1
    total = 1
    pows = []
    for _ in range(width):
        pows.append(total)
        total *= base
        if total >= _KEY_LIMIT:
            return None
    # most-significant digit first keeps packing lexicographically monotone
    return np.array(pows[::-1], dtype=np.int64), np.int64(lo), np.int64(base)


def pack_rows(rows: np.ndarray, pows: np.ndarray, lo) -> np.ndarray:
    return ((rows - lo) * pows[None, :]).sum(axis=1)


# ---------------------------------------------------------------------------
# coalesce: sum multiplicities of identical rows, output in lex order
# ---------------------------------------------------------------------------

def _lexsort_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.arange(len(rows), dtype=np.intp)
    return np.lexsort(rows.T[::-1])


def coalesce_rows(rows: np.ndarray, mults: np.ndarray):
    """(rows, mults) with equal rows merged; rows come back lex-sorted."""
    rows = np.asarray(rows, dtype=np.int64)
    mults = np.asarray(mults, dtype=np.int64)
    if len(rows) == 0:
        return rows.reshape(0, rows.shape[1] if rows.ndim == 2 else 0), mults
    if _HAVE_NUMBA:
        packed = _try_pack(rows)
        if packed is not None:
            order = np.argsort(packed, kind="stable")
            urows_idx, umults = _group_sum_nb(packed[order], mults[order])
            return rows[order][urows_idx], umults
    order = _lexsort_rows(rows)
    srows = rows[order]
    smults = mults[order]
    if len(srows) == 1:
        return srows, smults
    new = np.empty(len(srows), dtype=bool)
    new[0] = True
    new[1:] = np.any(srows[1:] != srows[:-1], axis=1)
    starts = np.flatnonzero(new)
    out_m = np.add.reduceat(smults, starts)
    return srows[starts], out_m


def _try_pack(rows: np.ndarray):
    if rows.shape[1] == 0:
        return None
    lo = int(rows.min())
    hi = int(rows.max())
    pb = pack_bounds(lo, hi, rows.shape[1])
    if pb is None:
        return None
    pows, lo64, _ = pb
    return pack_rows(rows, pows, lo64)


if _HAVE_NUMBA:

    @njit(cache=True)
    def _group_sum_nb(sorted_keys, sorted_mults):  # pragma: no cover - jitted
        n = sorted_keys.shape[0]
        idx = np.empty(n, dtype=np.int64)
        out = np.empty(n, dtype=np.int64)
        g = -1
        prev = np.int64(0)
        for i in range(n):
            k = sorted_keys[i]
            if g < 0 or k != prev:
                g += 1
                idx[g] = i
                out[g] = sorted_mults[i]
                prev = k
            else:
                out[g] += sorted_mults[i]
        return idx[: g + 1], out[: g + 1]


# ---------------------------------------------------------------------------
# orbit expansion: apply per-factor Weyl tables, dedupe per source row
# ---------------------------------------------------------------------------

def expand_orbit(rows: np.ndarray, mults: np.ndarray, block_tables):
    """Union of Weyl orbits of `rows` (assumed pairwise distinct).

    block_tables: list of (a, b, P, S) with P/S the (G, b-a) permutation and
    sign tables of one factor acting on columns [a, b).  Returns (rows,
    mults) of the full orbit union, lex-sorted.  Charges / untouched columns
    pass through.
    """
    rows = np.asarray(rows, dtype=np.int64)
    mults = np.asarray(mults, dtype=np.int64)
    if len(rows) == 0 or not block_tables:
        order = _lexsort_rows(rows)
        return rows[order], mults[order]
    gtotal = 1
    for _, _, P, _ in block_tables:
        gtotal *= len(P)
    chunk = max(1, 4_000_000 // max(gtotal, 1))
    out_rows, out_mults = [], []
    for at in range(0, len(rows), chunk):
        sub = rows[at:at + chunk]
        src = np.arange(len(sub), dtype=np.int64)
        cur = sub
        for a, b, P, S in block_tables:
            cur, src = _expand_block(cur, src, a, b, P, S)
        out_rows.append(cur)
        out_mults.append(mults[at:at + chunk][src])
    all_rows = np.concatenate(out_rows)
    all_mults = np.concatenate(out_mults)
    order = _lexsort_rows(all_rows)
    return all_rows[order], all_mults[order]


def _expand_block(rows, src, a, b, P, S):
    n = len(rows)
    g = len(P)
    if g == 1:
        return rows, src
    imgs = rows[:, a:b][:, P] * S[None, :, :]  # (n, g, w)
    out = np.repeat(rows, g, axis=0)
    out[:, a:b] = imgs.reshape(n * g, b - a)
    src2 = np.repeat(src, g)
    keep = _dedupe_tagged(out, src2)
    return out[keep], src2[keep]


def _dedupe_tagged(rows, tags):
    """Indices keeping one copy of each distinct (tag, row)."""
    if _HAVE_NUMBA:
        packed = _try_pack(rows)
        if packed is not None:
            order = np.lexsort((packed, tags))
            mask = np.empty(len(order), dtype=bool)
            mask[0] = True
            sp = packed[order]
            st = tags[order]
            mask[1:] = (sp[1:] != sp[:-1]) | (st[1:] != st[:-1])
            return np.sort(order[mask])
    keys = np.concatenate([tags[:, None], rows], axis=1)
    order = _lexsort_rows(keys)
    sk = keys[order]
    mask = np.empty(len(order), dtype=bool)
    mask[0] = True
    mask[1:] = np.any(sk[1:] != sk[:-1], axis=1)
    return np.sort(order[mask])


# ---------------------------------------------------------------------------
# Freudenthal weight system of one simple factor
# ---------------------------------------------------------------------------

def factor_weight_system(family: str, rank: int, lam2, simples2, positives2, rho2):
    """Dominant weights and multiplicities of the irrep with h.w. lam2.

    All inputs are doubled integer vectors in the factor's raw gauge
    (A factors: fixed-sum slice).  Returns (rows (D, k) int64, mults (D,)),
    rows lex-sorted.
    """
    lam = np.asarray(lam2, dtype=np.int64)
    S = np.asarray(simples2, dtype=np.int64)
    Pr = np.asarray(positives2, dtype=np.int64)
    rho = np.asarray(rho2, dtype=np.int64)
    fam = _FAM_CODE[family]
    if _HAVE_NUMBA:
        m = int(np.abs(lam).max(initial=0)) + 4
        pb = pack_bounds(-m, m, lam.shape[0])
        if pb is not None:
            pows, lo, _ = pb
            rows, mults, ok = _fw_nb(fam, rank, lam, S, Pr, rho, np.int64(m), pows)
            if not ok:
                raise MfpairsError("freudenthal: inexact division (internal error)")
            order = _lexsort_rows(rows)
            return rows[order], mults[order]
    return _fw_py(fam, rank, lam, S, Pr, rho)


def _dominantize_py(fam, v):
    if fam == 0:
        return tuple(sorted(v, reverse=True))
    w = sorted((abs(x) for x in v), reverse=True)
    if fam == 3 and sum(1 for x in v if x < 0) % 2:
        w[-1] = -w[-1]
    return tuple(w)


def _is_dom_py(fam, v):
    k = len(v)
    if fam == 0:
        return all(v[i] >= v[i + 1] for i in range(k - 1))
    if fam in (1, 2):
        return all(v[i] >= v[i + 1] for i in range(k - 1)) and v[-1] >= 0
    if k == 1:
        return True
    return all(v[i] >= v[i + 1] for i in range(k - 2)) and v[-2] >= abs(v[-1])


def _level_py(fam, lam, v):
    # any fixed positive scaling of the height of lam - v works for sorting
    d = [a - b for a, b in zip(lam, v)]
    s = 0
    run = 0
    k = len(d)
    if fam == 0:  # A: sum of partial sums over first k-1 entries
        for i in range(k - 1):
            run += d[i]
            s += run
        return s
    if fam == 1:  # B
        for i in range(k):
            run += d[i]
            s += run
        return s
    if fam == 2:  # C (scaled by 2)
        for i in range(k):
            run += d[i]
            s += 2 * run if i < k - 1 else run
        return s
    for i in range(k - 1):  # D
        run += d[i]
        s += run
    return s


def _fw_py(fam, rank, lam, S, Pr, rho):
    k = lam.shape[0]
    lam_t = tuple(int(x) for x in lam)
    simples = [tuple(int(x) for x in r) for r in S]
    positives = [tuple(int(x) for x in r) for r in Pr]
    norms = [sum(a * a for a in al) for al in simples]
    seen = {lam_t}
    queue = [lam_t]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        for al, nn in zip(simples, norms):
            p = 2 * sum(a * b for a, b in zip(v, al)) // nn
            if p > 0:
                u = list(v)
                for _ in range(p):
                    for j in range(k):
                        u[j] -= al[j]
                    ut = tuple(u)
                    if ut not in seen:
                        seen.add(ut)
                        queue.append(ut)
    doms = [(v, _level_py(fam, lam_t, v)) for v in queue if _is_dom_py(fam, v)]
    doms.sort(key=lambda t: (t[1], t[0]))
    domset = {v for v, _ in doms}
    lamrho = tuple(a + b for a, b in zip(lam_t, rho))
    top_norm = sum(a * a for a in lamrho)
    mult = {}
    for v, lev in doms:
        if lev == 0:
            mult[v] = 1
            continue
        total4 = 0
        for al in positives:
            kk = 1
            while True:
                u = tuple(a + kk * b for a, b in zip(v, al))
                du = _dominantize_py(fam, u)
                if du not in domset:
                    break
                total4 += mult[du] * sum(a * b for a, b in zip(u, al))
                kk += 1
        vr = tuple(a + b for a, b in zip(v, rho))
        den4 = top_norm - sum(a * a for a in vr)
        if den4 <= 0 or (2 * total4) % den4:
            raise MfpairsError("freudenthal: inexact division (internal error)")
        mult[v] = (2 * total4) // den4
    rows = np.array(sorted(mult.keys()), dtype=np.int64).reshape(len(mult), k)
    mults = np.array([mult[tuple(int(x) for x in r)] for r in rows], dtype=np.int64)
    return rows, mults


if _HAVE_NUMBA:

    @njit(cache=True)
    def _fw_nb(fam, rank, lam, S, Pr, rho, m, pows):  # pragma: no cover - jitted
        k = lam.shape[0]
        nsimp = S.shape[0]
        npos = Pr.shape[0]

        def encode(vec):
            key = np.int64(0)
            for j in range(k):
                key += (vec[j] + m) * pows[j]
            return key

        seen = NbDict.empty(numba.int64, numba.int64)
        queue = NbList.empty_list(numba.int64)
        lam_key = encode(lam)
        seen[lam_key] = 1
        queue.append(lam_key)
        v = np.empty(k, dtype=np.int64)
        u = np.empty(k, dtype=np.int64)
        w = np.empty(k, dtype=np.int64)
        norms = np.empty(nsimp, dtype=np.int64)
        for s in range(nsimp):
            nn = np.int64(0)
            for j in range(k):
                nn += S[s, j] * S[s, j]
            norms[s] = nn
        qi = 0
        while qi < len(queue):
            key = queue[qi]
            qi += 1
            rem = key
            for j in range(k):
                v[j] = rem // pows[j] - m
                rem = rem % pows[j]
            for s in range(nsimp):
                num = np.int64(0)
                for j in range(k):
                    num += v[j] * S[s, j]
                p = (2 * num) // norms[s]
                if p > 0:
                    for j in range(k):
                        u[j] = v[j]
                    for _ in range(p):
                        for j in range(k):
                            u[j] -= S[s, j]
                        ukey = encode(u)
                        if ukey not in seen:
                            seen[ukey] = 1
                            queue.append(ukey)
        # dominant filter + levels
        nq = len(queue)
        domkeys = NbList.empty_list(numba.int64)
        levs = NbList.empty_list(numba.int64)
        for qi in range(nq):
            key = queue[qi]
            rem = key
            for j in range(k):
                v[j] = rem // pows[j] - m
                rem = rem % pows[j]
            is_dom = True
            if fam == 0:
                for j in range(k - 1):
                    if v[j] < v[j + 1]:
                        is_dom = False
                        break
            elif fam == 1 or fam == 2:
                for j in range(k - 1):
                    if v[j] < v[j + 1]:
                        is_dom = False
                        break
                if is_dom and v[k - 1] < 0:
                    is_dom = False
            else:
                for j in range(k - 2):
                    if v[j] < v[j + 1]:
                        is_dom = False
                        break
                if is_dom and k >= 2:
                    a = v[k - 1] if v[k - 1] >= 0 else -v[k - 1]
                    if v[k - 2] < a:
                        is_dom = False
            if not is_dom:
                continue
            # level (scaled height of lam - v)
            s0 = np.int64(0)
            run = np.int64(0)
            if fam == 0:
                for j in range(k - 1):
                    run += lam[j] - v[j]
                    s0 += run
            elif fam == 1:
                for j in range(k):
                    run += lam[j] - v[j]
                    s0 += run
            elif fam == 2:
                for j in range(k):
                    run += lam[j] - v[j]
                    if j < k - 1:
                        s0 += 2 * run
                    else:
                        s0 += run
            else:
                for j in range(k - 1):
                    run += lam[j] - v[j]
                    s0 += run
            domkeys.append(key)
            levs.append(s0)
        nd = len(domkeys)
        keys_arr = np.empty(nd, dtype=np.int64)
        levs_arr = np.empty(nd, dtype=np.int64)
        for i in range(nd):
            keys_arr[i] = domkeys[i]
            levs_arr[i] = levs[i]
        ord1 = np.argsort(keys_arr, kind="mergesort")
        ord2 = np.argsort(levs_arr[ord1], kind="mergesort")
        order = ord1[ord2]
        # recursion over dominants in level order
        mult = NbDict.empty(numba.int64, numba.int64)
        lamrho = np.empty(k, dtype=np.int64)
        for j in range(k):
            lamrho[j] = lam[j] + rho[j]
        top_norm = np.int64(0)
        for j in range(k):
            top_norm += lamrho[j] * lamrho[j]
        ok = True
        for io in range(nd):
            key = keys_arr[order[io]]
            lev = levs_arr[order[io]]
            if lev == 0:
                mult[key] = 1
                continue
            rem = key
            for j in range(k):
                v[j] = rem // pows[j] - m
                rem = rem % pows[j]
            total4 = np.int64(0)
            for r in range(npos):
                kk = np.int64(1)
                while True:
                    inbox = True
                    for j in range(k):
                        u[j] = v[j] + kk * Pr[r, j]
                        if u[j] > m or u[j] < -m:
                            inbox = False
                    if not inbox:
                        break
                    # dominantize u into w
                    for j in range(k):
                        w[j] = u[j]
                    if fam != 0:
                        for j in range(k):
                            if w[j] < 0:
                                w[j] = -w[j]
                    # insertion sort desc
                    for j in range(1, k):
                        key2 = w[j]
                        jj = j - 1
                        while jj >= 0 and w[jj] < key2:
                            w[jj + 1] = w[jj]
                            jj -= 1
                        w[jj + 1] = key2
                    if fam == 3:
                        negs = 0
                        for j in range(k):
                            if u[j] < 0:
                                negs += 1
                        if negs % 2 == 1:
                            w[k - 1] = -w[k - 1]
                    dkey = encode(w)
                    if dkey in seen:
                        if dkey not in mult:
                            ok = False  # level order violated: internal error
                            break
                        term = np.int64(0)
                        for j in range(k):
                            term += u[j] * Pr[r, j]
                        total4 += mult[dkey] * term
                        kk += 1
                    else:
                        break
            den4 = top_norm
            for j in range(k):
                den4 -= (v[j] + rho[j]) * (v[j] + rho[j])
            if den4 <= 0 or (2 * total4) % den4 != 0:
                ok = False
                mult[key] = 0
            else:
                mult[key] = (2 * total4) // den4
        rows = np.empty((nd, k), dtype=np.int64)
        mults = np.empty(nd, dtype=np.int64)
        for i in range(nd):
            key = keys_arr[i]
            rem = key
            for j in range(k):
                rows[i, j] = rem // pows[j] - m
                rem = rem % pows[j]
            mults[i] = mult[key]
        return rows, mults, ok
