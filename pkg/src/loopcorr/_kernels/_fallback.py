"""Pure-Python/numpy implementations of the hot kernels.

Same contracts as the compiled extension `_core`; selected at import time
by `loopcorr._kernels` when the extension is unavailable (or disabled via
LOOPCORR_PURE_PYTHON=1).  Subset scans are vectorized in chunks; the
backtracking enumerator and component analysis use Python-int bitmasks.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

_CHUNK = 1 << 14


def _incidence(idx: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((idx.shape[0], size), dtype=np.uint8)
    out[np.arange(idx.shape[0]), idx] = 1
    return out


def _chunk_bits(masks: np.ndarray, num_edges: int) -> np.ndarray:
    shifts = np.arange(num_edges, dtype=np.uint64)
    return ((masks[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)


def brute_loop_masks(edge_var, edge_check, n: int, m: int) -> np.ndarray:
    """All edge subsets in which no node has induced degree exactly 1.

    Returns ascending uint64 bitmasks (bit k = edge k), including the empty
    subset.  Work is 2^E; callers enforce the cap.
    """
    E = len(edge_var)
    inc_v = _incidence(np.asarray(edge_var), n)
    inc_c = _incidence(np.asarray(edge_check), m)
    total = 1 << E
    found = []
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        masks = np.arange(start, stop, dtype=np.uint64)
        bits = _chunk_bits(masks, E)
        degv = bits @ inc_v
        degc = bits @ inc_c
        ok = ~np.any(degv == 1, axis=1) & ~np.any(degc == 1, axis=1)
        found.append(masks[ok])
    return np.concatenate(found) if found else np.zeros(0, dtype=np.uint64)


def dfs_loop_masks(edge_var, edge_check, n: int, m: int) -> np.ndarray:
    """Same subsets as brute_loop_masks via backtracking with pruning.

    Edges are decided in index order; a node whose last incident edge has
    been decided while its induced degree is exactly 1 prunes the branch.
    """
    E = len(edge_var)
    if E > 63:
        raise ValueError("edge masks are limited to 63 edges")
    ev = list(edge_var)
    ec = list(edge_check)
    deg_v = [0] * n
    deg_c = [0] * m
    rem_v = [0] * n
    rem_c = [0] * m
    for k in range(E):
        rem_v[ev[k]] += 1
        rem_c[ec[k]] += 1
    out = []

    def closes_ok(i, a):
        if rem_v[i] == 0 and deg_v[i] == 1:
            return False
        if rem_c[a] == 0 and deg_c[a] == 1:
            return False
        return True

    # Iterative depth-first scan over the decision tree: state[k] in
    # {0: try skip next, 1: try take next, 2: undo take and backtrack}.
    mask = 0
    depth = 0
    state = [0] * (E + 1)
    while depth >= 0:
        if depth == E:
            out.append(mask)
            depth -= 1
            continue
        st = state[depth]
        i, a = ev[depth], ec[depth]
        if st == 0:
            state[depth] = 1
            rem_v[i] -= 1
            rem_c[a] -= 1
            if closes_ok(i, a):
                depth += 1
                state[depth] = 0
                continue
            # fall through to taking the edge
            st = 1
        if st == 1:
            state[depth] = 2
            deg_v[i] += 1
            deg_c[a] += 1
            mask |= 1 << depth
            if closes_ok(i, a):
                depth += 1
                state[depth] = 0
                continue
            st = 2
        # undo and pop
        deg_v[i] -= 1
        deg_c[a] -= 1
        mask &= ~(1 << depth)
        rem_v[i] += 1
        rem_c[a] += 1
        state[depth] = 0
        depth -= 1
    arr = np.array(sorted(out), dtype=np.uint64)
    return arr


def loop_weights(masks, edge_var, edge_check, n, m, s_in, t_out, ki_table, ratio_table):
    """Activity K(g) for each loop mask.

    Per loop: product over touched variables of ki_table[i, deg],
    times, per touched check, ratio_table[a, deg] and a factor per incident
    edge (s_in[e] if the edge is in the loop else t_out[e]).
    """
    E = len(edge_var)
    ev = np.asarray(edge_var)
    ec = np.asarray(edge_check)
    inc_v = _incidence(ev, n)
    inc_c = _incidence(ec, m)
    order = np.lexsort((ev, ec))  # edges grouped by check
    offsets = np.zeros(m, dtype=np.int64)
    counts = np.bincount(ec, minlength=m)
    offsets[1:] = np.cumsum(counts)[:-1]
    # degree-0 checks yield garbage reduceat segments; they are masked by
    # degc == 0 below, but reduceat still needs in-range offsets
    if E:
        offsets = np.minimum(offsets, E - 1)
    s_cs = np.asarray(s_in)[order]
    t_cs = np.asarray(t_out)[order]
    masks = np.asarray(masks, dtype=np.uint64)
    out = np.empty(masks.shape[0])
    var_ids = np.arange(n)
    check_ids = np.arange(m)
    for start in range(0, masks.shape[0], _CHUNK):
        mk = masks[start : start + _CHUNK]
        bits = _chunk_bits(mk, E)
        degv = bits @ inc_v
        degc = bits @ inc_c
        var_part = np.prod(ki_table[var_ids[None, :], degv], axis=1)
        if m and E:
            f = np.where(bits[:, order] == 1, s_cs[None, :], t_cs[None, :])
            prods = np.multiply.reduceat(f, offsets, axis=1)
            cpart = np.where(degc == 0, 1.0, ratio_table[check_ids[None, :], degc] * prods)
            check_part = np.prod(cpart, axis=1)
        else:
            check_part = np.ones(mk.shape[0])
        out[start : start + mk.shape[0]] = var_part * check_part
    return out


def loop_type_counts(masks, edge_var, edge_check, n, m, lmax, rmax):
    """Induced-degree census per loop: columns (n_2..n_lmax, m_2..m_rmax)."""
    E = len(edge_var)
    inc_v = _incidence(np.asarray(edge_var), n)
    inc_c = _incidence(np.asarray(edge_check), m)
    masks = np.asarray(masks, dtype=np.uint64)
    width = (lmax - 1) + (rmax - 1)
    out = np.empty((masks.shape[0], width), dtype=np.int64)
    for start in range(0, masks.shape[0], _CHUNK):
        mk = masks[start : start + _CHUNK]
        bits = _chunk_bits(mk, E)
        degv = bits @ inc_v
        degc = bits @ inc_c
        cols = [np.sum(degv == s, axis=1) for s in range(2, lmax + 1)]
        cols += [np.sum(degc == tdeg, axis=1) for tdeg in range(2, rmax + 1)]
        out[start : start + mk.shape[0]] = np.stack(cols, axis=1)
    return out


def component_all_small(masks, edge_var, edge_check, n, m, max_nodes: float):
    """True per loop iff every connected component touches < max_nodes nodes.

    Component size counts distinct touched nodes (variables plus checks).
    The empty loop is vacuously small.
    """
    E = len(edge_var)
    adj = [0] * E
    by_var = {}
    by_check = {}
    for k in range(E):
        by_var.setdefault(edge_var[k], []).append(k)
        by_check.setdefault(edge_check[k], []).append(k)
    for group in list(by_var.values()) + list(by_check.values()):
        gm = 0
        for k in group:
            gm |= 1 << k
        for k in group:
            adj[k] |= gm & ~(1 << k)
    out = np.ones(len(masks), dtype=bool)
    for idx, mk in enumerate(np.asarray(masks, dtype=np.uint64)):
        rem = int(mk)
        while rem:
            e0 = (rem & -rem).bit_length() - 1
            comp = 1 << e0
            rem &= ~comp
            frontier = comp
            while frontier:
                grow = 0
                f = frontier
                while f:
                    e = (f & -f).bit_length() - 1
                    f &= f - 1
                    grow |= adj[e] & rem
                comp |= grow
                rem &= ~grow
                frontier = grow
            vs = set()
            cs = set()
            c = comp
            while c:
                e = (c & -c).bit_length() - 1
                c &= c - 1
                vs.add(edge_var[e])
                cs.add(edge_check[e])
            if len(vs) + len(cs) >= max_nodes:
                out[idx] = False
                break
    return out


def span_logz(basis, h) -> float:
    """ln sum over the GF(2) span of `basis` of exp(sum_i (-1)^{x_i} h_i).

    Enumerates the 2^k span in blocks with exact streaming log-sum-exp.
    """
    basis = np.asarray(basis, dtype=np.uint8)
    h = np.asarray(h, dtype=np.float64)
    k = basis.shape[0]
    if k == 0:
        return float(h.sum())
    Bf = basis.astype(np.float64)
    h_total = float(h.sum())
    total = 1 << k
    block = 1 << min(k, 16)
    shifts = np.arange(k, dtype=np.uint64)
    run_max = -math.inf
    run_sum = 0.0
    for start in range(0, total, block):
        idx = np.arange(start, min(start + block, total), dtype=np.uint64)
        bits = ((idx[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.float64)
        parity = np.mod(bits @ Bf, 2.0)
        S = h_total - 2.0 * (parity @ h)
        bm = float(S.max())
        bs = float(np.exp(S - bm).sum())
        if bm > run_max:
            run_sum = run_sum * math.exp(run_max - bm) + bs if run_sum else bs
            run_max = bm
        else:
            run_sum += bs * math.exp(bm - run_max)
    return run_max + math.log(run_sum)
