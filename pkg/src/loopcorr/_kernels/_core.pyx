# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: subset scans, loop activities, span enumeration.

Mirrors the contracts of `_fallback`; see that module for semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log
from libc.stdint cimport int64_t, uint64_t, uint8_t

cnp.import_array()

BACKEND = "compiled"


def brute_loop_masks(edge_var, edge_check, int n, int m):
    cdef cnp.ndarray[int64_t, ndim=1] ev = np.ascontiguousarray(edge_var, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ec = np.ascontiguousarray(edge_check, dtype=np.int64)
    cdef int E = ev.shape[0]
    if E > 26:
        raise ValueError("brute-force subset scan limited to 26 edges")
    cdef cnp.ndarray[int64_t, ndim=1] deg = np.zeros(n + m, dtype=np.int64)
    cdef int64_t[:] degm = deg
    cdef int64_t[:] evv = ev
    cdef int64_t[:] ecv = ec
    out_list = []
    cdef cnp.ndarray[uint64_t, ndim=1] buf = np.empty(1 << 20, dtype=np.uint64)
    cdef uint64_t[:] bufv = buf
    cdef Py_ssize_t nbuf = 0
    cdef uint64_t total = (<uint64_t>1) << E
    cdef uint64_t s, gray, prev_gray = 0
    cdef int j, i, a, bit
    cdef int bad = 0  # nodes with induced degree exactly 1
    bufv[nbuf] = 0  # empty subset always qualifies
    nbuf += 1
    # Gray-code walk: subset gray(s) = s ^ (s >> 1) flips one edge per step.
    for s in range(1, total):
        gray = s ^ (s >> 1)
        j = 0
        while ((prev_gray ^ gray) >> j) & 1 == 0:
            j += 1
        prev_gray = gray
        i = <int>evv[j]
        a = n + <int>ecv[j]
        bit = <int>((gray >> j) & 1)
        if bit:
            degm[i] += 1
            if degm[i] == 1:
                bad += 1
            elif degm[i] == 2:
                bad -= 1
            degm[a] += 1
            if degm[a] == 1:
                bad += 1
            elif degm[a] == 2:
                bad -= 1
        else:
            degm[i] -= 1
            if degm[i] == 1:
                bad += 1
            elif degm[i] == 0:
                bad -= 1
            degm[a] -= 1
            if degm[a] == 1:
                bad += 1
            elif degm[a] == 0:
                bad -= 1
        if bad == 0:
            if nbuf == bufv.shape[0]:
                out_list.append(np.asarray(buf[:nbuf]).copy())
                nbuf = 0
            bufv[nbuf] = gray
            nbuf += 1
    out_list.append(np.asarray(buf[:nbuf]).copy())
    res = np.concatenate(out_list) if len(out_list) > 1 else out_list[0]
    res.sort()
    return res


def dfs_loop_masks(edge_var, edge_check, int n, int m):
    cdef cnp.ndarray[int64_t, ndim=1] ev = np.ascontiguousarray(edge_var, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ec = np.ascontiguousarray(edge_check, dtype=np.int64)
    cdef int E = ev.shape[0]
    if E > 63:
        raise ValueError("edge masks are limited to 63 edges")
    cdef cnp.ndarray[int64_t, ndim=1] deg_v = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] deg_c = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] rem_v = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] rem_c = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] state = np.zeros(E + 1, dtype=np.int64)
    cdef int64_t[:] dv = deg_v
    cdef int64_t[:] dc = deg_c
    cdef int64_t[:] rv = rem_v
    cdef int64_t[:] rc = rem_c
    cdef int64_t[:] st = state
    cdef int64_t[:] evv = ev
    cdef int64_t[:] ecv = ec
    cdef int k, depth, i, a, s
    cdef uint64_t mask = 0
    for k in range(E):
        rv[evv[k]] += 1
        rc[ecv[k]] += 1
    out_list = []
    cdef cnp.ndarray[uint64_t, ndim=1] buf = np.empty(1 << 20, dtype=np.uint64)
    cdef uint64_t[:] bufv = buf
    cdef Py_ssize_t nbuf = 0
    depth = 0
    while depth >= 0:
        if depth == E:
            if nbuf == bufv.shape[0]:
                out_list.append(np.asarray(buf[:nbuf]).copy())
                nbuf = 0
            bufv[nbuf] = mask
            nbuf += 1
            depth -= 1
            continue
        s = <int>st[depth]
        i = <int>evv[depth]
        a = <int>ecv[depth]
        if s == 0:
            st[depth] = 1
            rv[i] -= 1
            rc[a] -= 1
            if not ((rv[i] == 0 and dv[i] == 1) or (rc[a] == 0 and dc[a] == 1)):
                depth += 1
                st[depth] = 0
                continue
            s = 1
        if s == 1:
            st[depth] = 2
            dv[i] += 1
            dc[a] += 1
            mask |= (<uint64_t>1) << depth
            if not ((rv[i] == 0 and dv[i] == 1) or (rc[a] == 0 and dc[a] == 1)):
                depth += 1
                st[depth] = 0
                continue
            s = 2
        dv[i] -= 1
        dc[a] -= 1
        mask &= ~((<uint64_t>1) << depth)
        rv[i] += 1
        rc[a] += 1
        st[depth] = 0
        depth -= 1
    out_list.append(np.asarray(buf[:nbuf]).copy())
    res = np.concatenate(out_list) if len(out_list) > 1 else out_list[0]
    res.sort()
    return res


def loop_weights(masks, edge_var, edge_check, int n, int m,
                 s_in, t_out, ki_table, ratio_table):
    cdef cnp.ndarray[uint64_t, ndim=1] mk = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef cnp.ndarray[int64_t, ndim=1] ev = np.ascontiguousarray(edge_var, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ec = np.ascontiguousarray(edge_check, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] sv = np.ascontiguousarray(s_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] tv = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] ki = np.ascontiguousarray(ki_table, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] ra = np.ascontiguousarray(ratio_table, dtype=np.float64)
    cdef int E = ev.shape[0]
    # edge ids grouped by check (CSR layout)
    order = np.lexsort((np.asarray(ev), np.asarray(ec)))
    cdef cnp.ndarray[int64_t, ndim=1] ce = np.ascontiguousarray(order, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] coff = np.zeros(m + 1, dtype=np.int64)
    counts = np.bincount(np.asarray(ec), minlength=m)
    coff[1:] = np.cumsum(counts)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(mk.shape[0], dtype=np.float64)
    cdef cnp.ndarray[int64_t, ndim=1] degv = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] degc = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] touched_v = np.empty(max(n, 1), dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] touched_c = np.empty(max(m, 1), dtype=np.int64)
    cdef int64_t[:] dv = degv
    cdef int64_t[:] dc = degc
    cdef int64_t[:] tvx = touched_v
    cdef int64_t[:] tcx = touched_c
    cdef int64_t[:] evv = ev
    cdef int64_t[:] ecv = ec
    cdef int64_t[:] cev = ce
    cdef int64_t[:] coffv = coff
    cdef double[:] svv = sv
    cdef double[:] tvv = tv
    cdef double[:, :] kiv = ki
    cdef double[:, :] rav = ra
    cdef double[:] outv = out
    cdef uint64_t[:] mkv = mk
    cdef Py_ssize_t idx
    cdef uint64_t mask
    cdef int k, e, i, a, p, ntv, ntc
    cdef double w, cw
    for idx in range(mk.shape[0]):
        mask = mkv[idx]
        ntv = 0
        ntc = 0
        for k in range(E):
            if (mask >> k) & 1:
                i = <int>evv[k]
                a = <int>ecv[k]
                if dv[i] == 0:
                    tvx[ntv] = i
                    ntv += 1
                dv[i] += 1
                if dc[a] == 0:
                    tcx[ntc] = a
                    ntc += 1
                dc[a] += 1
        w = 1.0
        for p in range(ntv):
            i = <int>tvx[p]
            w *= kiv[i, dv[i]]
        for p in range(ntc):
            a = <int>tcx[p]
            cw = rav[a, dc[a]]
            for k in range(coffv[a], coffv[a + 1]):
                e = <int>cev[k]
                if (mask >> e) & 1:
                    cw *= svv[e]
                else:
                    cw *= tvv[e]
            w *= cw
        outv[idx] = w
        for p in range(ntv):
            dv[tvx[p]] = 0
        for p in range(ntc):
            dc[tcx[p]] = 0
    return out


def loop_type_counts(masks, edge_var, edge_check, int n, int m, int lmax, int rmax):
    cdef cnp.ndarray[uint64_t, ndim=1] mk = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef cnp.ndarray[int64_t, ndim=1] ev = np.ascontiguousarray(edge_var, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ec = np.ascontiguousarray(edge_check, dtype=np.int64)
    cdef int E = ev.shape[0]
    cdef int width = (lmax - 1) + (rmax - 1)
    cdef cnp.ndarray[int64_t, ndim=2] out = np.zeros((mk.shape[0], width), dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] degv = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] degc = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] touched_v = np.empty(max(n, 1), dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] touched_c = np.empty(max(m, 1), dtype=np.int64)
    cdef int64_t[:] dv = degv
    cdef int64_t[:] dc = degc
    cdef int64_t[:] tvx = touched_v
    cdef int64_t[:] tcx = touched_c
    cdef int64_t[:] evv = ev
    cdef int64_t[:] ecv = ec
    cdef int64_t[:, :] outv = out
    cdef uint64_t[:] mkv = mk
    cdef Py_ssize_t idx
    cdef uint64_t mask
    cdef int k, i, a, p, ntv, ntc, d
    for idx in range(mk.shape[0]):
        mask = mkv[idx]
        ntv = 0
        ntc = 0
        for k in range(E):
            if (mask >> k) & 1:
                i = <int>evv[k]
                a = <int>ecv[k]
                if dv[i] == 0:
                    tvx[ntv] = i
                    ntv += 1
                dv[i] += 1
                if dc[a] == 0:
                    tcx[ntc] = a
                    ntc += 1
                dc[a] += 1
        for p in range(ntv):
            i = <int>tvx[p]
            d = <int>dv[i]
            if 2 <= d <= lmax:
                outv[idx, d - 2] += 1
            dv[i] = 0
        for p in range(ntc):
            a = <int>tcx[p]
            d = <int>dc[a]
            if 2 <= d <= rmax:
                outv[idx, (lmax - 1) + d - 2] += 1
            dc[a] = 0
    return out


def component_all_small(masks, edge_var, edge_check, int n, int m, double max_nodes):
    cdef cnp.ndarray[uint64_t, ndim=1] mk = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef cnp.ndarray[int64_t, ndim=1] ev = np.ascontiguousarray(edge_var, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ec = np.ascontiguousarray(edge_check, dtype=np.int64)
    cdef int E = ev.shape[0]
    if E > 63:
        raise ValueError("edge masks are limited to 63 edges")
    cdef cnp.ndarray[uint64_t, ndim=1] adj = np.zeros(max(E, 1), dtype=np.uint64)
    cdef uint64_t[:] adjv = adj
    cdef int64_t[:] evv = ev
    cdef int64_t[:] ecv = ec
    cdef int k, k2
    for k in range(E):
        for k2 in range(E):
            if k2 != k and (evv[k2] == evv[k] or ecv[k2] == ecv[k]):
                adjv[k] |= (<uint64_t>1) << k2
    cdef cnp.ndarray[uint8_t, ndim=1] out = np.ones(mk.shape[0], dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] seen_v = np.zeros(max(n, 1), dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] seen_c = np.zeros(max(m, 1), dtype=np.uint8)
    cdef uint8_t[:] sv = seen_v
    cdef uint8_t[:] sc = seen_c
    cdef uint8_t[:] outv = out
    cdef uint64_t[:] mkv = mk
    cdef Py_ssize_t idx
    cdef uint64_t rem, comp, frontier, grow, f
    cdef int nodes
    for idx in range(mk.shape[0]):
        rem = mkv[idx]
        while rem != 0:
            comp = rem & (~rem + 1)
            rem &= rem - 1
            frontier = comp
            while frontier != 0:
                grow = 0
                f = frontier
                while f != 0:
                    k = 0
                    while ((f >> k) & 1) == 0:
                        k += 1
                    f &= f - 1
                    grow |= adjv[k] & rem
                comp |= grow
                rem &= ~grow
                frontier = grow
            nodes = 0
            f = comp
            while f != 0:
                k = 0
                while ((f >> k) & 1) == 0:
                    k += 1
                f &= f - 1
                if sv[evv[k]] == 0:
                    sv[evv[k]] = 1
                    nodes += 1
                if sc[ecv[k]] == 0:
                    sc[ecv[k]] = 1
                    nodes += 1
            f = comp
            while f != 0:
                k = 0
                while ((f >> k) & 1) == 0:
                    k += 1
                f &= f - 1
                sv[evv[k]] = 0
                sc[ecv[k]] = 0
            if nodes >= max_nodes:
                outv[idx] = 0
                break
    return out.astype(bool)


def span_logz(basis, h):
    cdef cnp.ndarray[uint8_t, ndim=2] B = np.ascontiguousarray(basis, dtype=np.uint8)
    cdef cnp.ndarray[double, ndim=1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef int k = B.shape[0]
    cdef int n = B.shape[1]
    cdef int j, i
    cdef double S = 0.0
    for i in range(n):
        S += hv[i]
    if k == 0:
        return S
    if k > 40:
        raise ValueError("span enumeration limited to 40 basis vectors")
    supports = []
    cdef cnp.ndarray[int64_t, ndim=1] soff = np.zeros(k + 1, dtype=np.int64)
    for j in range(k):
        idxs = np.nonzero(np.asarray(B[j]))[0]
        supports.append(idxs.astype(np.int64))
        soff[j + 1] = soff[j] + idxs.shape[0]
    cdef cnp.ndarray[int64_t, ndim=1] sflat = (
        np.concatenate(supports) if supports else np.zeros(0, dtype=np.int64)
    )
    cdef cnp.ndarray[double, ndim=1] sgn = np.ones(n, dtype=np.float64)
    cdef int64_t[:] sflatv = sflat
    cdef int64_t[:] soffv = soff
    cdef double[:] sgnv = sgn
    cdef double[:] hvv = hv
    cdef uint64_t total = (<uint64_t>1) << k
    cdef uint64_t s
    cdef int64_t p
    cdef double run_max = S
    cdef double run_sum = 1.0
    cdef double delta
    # Gray-code walk over the 2^k coefficient vectors: step s flips basis
    # vector ctz(s), changing the field sum only on that vector's support.
    for s in range(1, total):
        j = 0
        while ((s >> j) & 1) == 0:
            j += 1
        delta = 0.0
        for p in range(soffv[j], soffv[j + 1]):
            i = <int>sflatv[p]
            delta += sgnv[i] * hvv[i]
            sgnv[i] = -sgnv[i]
        S -= 2.0 * delta
        if S > run_max:
            run_sum = run_sum * exp(run_max - S) + 1.0
            run_max = S
        else:
            run_sum += exp(S - run_max)
    return run_max + log(run_sum)
