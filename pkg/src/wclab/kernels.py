"""Hot loops: the finite-domain CSP search and pattern coding.

Everything here works on plain numpy arrays so it can be compiled by numba
(see :mod:`wclab._accel`). Domains are bitsets: ``D[x, w]`` holds values
``64*w .. 64*w+63`` of variable ``x``.

Search status codes: 0 = solution found, 1 = exhausted (no solution),
2 = node budget exceeded.
"""

import numpy as np

from ._accel import jit

ONE = np.uint64(1)
ZERO = np.uint64(0)


@jit
def popcount(w):
    c = 0
    while w:
        w &= w - np.uint64(1)
        c += 1
    return c


@jit
def has_value(D, x, v):
    return (D[x, v >> 6] >> np.uint64(v & 63)) & np.uint64(1) != np.uint64(0)


@jit
def domain_size(D, x):
    c = 0
    for w in range(D.shape[1]):
        c += popcount(D[x, w])
    return c


@jit
def first_value(D, x, after):
    """Smallest value of ``D[x]`` strictly greater than ``after``, or -1."""
    S = D.shape[1] * 64
    v = after + 1
    while v < S:
        word = D[x, v >> 6] >> np.uint64(v & 63)
        if word == np.uint64(0):
            v = ((v >> 6) + 1) << 6
            continue
        if word & np.uint64(1):
            return v
        v += 1
    return -1


@jit
def _enqueue(x, queue, inq, qtail, n):
    if not inq[x]:
        inq[x] = True
        queue[qtail % n] = x
        qtail += 1
    return qtail


@jit
def _revise_arc(D, sz, x, y, r, rel_fwd, rel_bwd, buf):
    """Restrict ``D[y]`` to values supported by ``D[x]``; return new size of y."""
    NW = D.shape[1]
    if sz[x] <= sz[y]:
        for w in range(NW):
            buf[w] = np.uint64(0)
        a = first_value(D, x, -1)
        while a >= 0:
            for w in range(NW):
                buf[w] |= rel_fwd[r, a, w]
            a = first_value(D, x, a)
        for w in range(NW):
            buf[w] &= D[y, w]
    else:
        for w in range(NW):
            buf[w] = D[y, w]
        b = first_value(D, y, -1)
        while b >= 0:
            supported = False
            for w in range(NW):
                if rel_bwd[r, b, w] & D[x, w]:
                    supported = True
                    break
            if not supported:
                buf[b >> 6] &= ~(np.uint64(1) << np.uint64(b & 63))
            b = first_value(D, y, b)
    size = 0
    for w in range(NW):
        size += popcount(buf[w])
    if size != sz[y]:
        for w in range(NW):
            D[y, w] = buf[w]
    return size


@jit
def _revise_table(D, sz, c, con_scope, con_tab, con_dup, tab_ptr, tab_rows, supp,
                  queue, inq, qtail, n):
    """Generalized arc consistency on one table constraint.

    Returns ``(ok, qtail)``; variables whose domain shrank are enqueued.
    """
    K = con_scope.shape[1]
    NW = D.shape[1]
    for s in range(K):
        for w in range(NW):
            supp[s, w] = np.uint64(0)
    t = con_tab[c]
    for row in range(tab_ptr[t], tab_ptr[t + 1]):
        ok = True
        for s in range(K):
            if not has_value(D, con_scope[c, s], tab_rows[row, s]):
                ok = False
                break
        if ok and con_dup[c]:
            for s in range(K):
                for s2 in range(s + 1, K):
                    if con_scope[c, s] == con_scope[c, s2] and tab_rows[row, s] != tab_rows[row, s2]:
                        ok = False
        if ok:
            for s in range(K):
                v = tab_rows[row, s]
                supp[s, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    for s in range(K):
        x = con_scope[c, s]
        size = 0
        for w in range(NW):
            D[x, w] &= supp[s, w]
            size += popcount(D[x, w])
        if size == 0:
            sz[x] = 0
            return False, qtail
        if size != sz[x]:
            sz[x] = size
            qtail = _enqueue(x, queue, inq, qtail, n)
    return True, qtail


@jit
def _arc_consistency(D, sz, queue, inq, qhead, qtail,
                     out_ptr, out_arcs, arc_dst, arc_rel, rel_fwd, rel_bwd,
                     vc_ptr, vc_idx, con_scope, con_tab, con_dup, tab_ptr, tab_rows,
                     buf, supp):
    n = D.shape[0]
    while qhead < qtail:
        x = queue[qhead % n]
        qhead += 1
        inq[x] = False
        for k in range(out_ptr[x], out_ptr[x + 1]):
            a = out_arcs[k]
            y = arc_dst[a]
            size = _revise_arc(D, sz, x, y, arc_rel[a], rel_fwd, rel_bwd, buf)
            if size == 0:
                sz[y] = 0
                return False
            if size != sz[y]:
                sz[y] = size
                qtail = _enqueue(y, queue, inq, qtail, n)
        for k in range(vc_ptr[x], vc_ptr[x + 1]):
            ok, qtail = _revise_table(D, sz, vc_idx[k], con_scope, con_tab, con_dup,
                                      tab_ptr, tab_rows, supp, queue, inq, qtail, n)
            if not ok:
                return False
    return True


@jit
def _coverage(D, sz, hits, hit_scope, hit_dup, queue, inq, qtail):
    """Each required pattern must fit at some placement; a unique fit is forced.

    Returns ``(ok, qtail)``.
    """
    n = D.shape[0]
    H = hits.shape[0]
    P = hit_scope.shape[0]
    K = hit_scope.shape[1]
    NW = D.shape[1]
    for h in range(H):
        count = 0
        last = -1
        for p in range(P):
            fits = True
            for s in range(K):
                if not has_value(D, hit_scope[p, s], hits[h, s]):
                    fits = False
                    break
            if fits and hit_dup[p]:
                for s in range(K):
                    for s2 in range(s + 1, K):
                        if hit_scope[p, s] == hit_scope[p, s2] and hits[h, s] != hits[h, s2]:
                            fits = False
            if fits:
                count += 1
                last = p
                if count > 1:
                    break
        if count == 0:
            return False, qtail
        if count == 1:
            for s in range(K):
                x = hit_scope[last, s]
                v = hits[h, s]
                if sz[x] != 1:
                    for w in range(NW):
                        D[x, w] = np.uint64(0)
                    D[x, v >> 6] = np.uint64(1) << np.uint64(v & 63)
                    sz[x] = 1
                    qtail = _enqueue(x, queue, inq, qtail, n)
    return True, qtail


@jit
def _area_ok(sz, adj_ptr, adj_idx, mod, stack, mark):
    """Every connected component of undecided variables has size divisible by ``mod``."""
    n = sz.shape[0]
    for x in range(n):
        mark[x] = False
    for x in range(n):
        if sz[x] <= 1 or mark[x]:
            continue
        mark[x] = True
        stack[0] = x
        top = 1
        size = 0
        while top > 0:
            top -= 1
            u = stack[top]
            size += 1
            for k in range(adj_ptr[u], adj_ptr[u + 1]):
                v = adj_idx[k]
                if sz[v] > 1 and not mark[v]:
                    mark[v] = True
                    stack[top] = v
                    top += 1
        if size % mod != 0:
            return False
    return True


@jit
def _propagate(D, sz, queue, inq, qhead, qtail,
               out_ptr, out_arcs, arc_dst, arc_rel, rel_fwd, rel_bwd,
               vc_ptr, vc_idx, con_scope, con_tab, con_dup, tab_ptr, tab_rows,
               hits, hit_scope, hit_dup, buf, supp):
    while True:
        if not _arc_consistency(D, sz, queue, inq, qhead, qtail,
                                out_ptr, out_arcs, arc_dst, arc_rel, rel_fwd, rel_bwd,
                                vc_ptr, vc_idx, con_scope, con_tab, con_dup, tab_ptr,
                                tab_rows, buf, supp):
            return False
        qhead = 0
        qtail = 0
        if hits.shape[0] == 0:
            return True
        ok, qtail = _coverage(D, sz, hits, hit_scope, hit_dup, queue, inq, qtail)
        if not ok:
            return False
        if qtail == 0:
            return True


@jit
def _select(sz, mrv):
    best = -1
    best_size = 1 << 62
    for x in range(sz.shape[0]):
        if sz[x] > 1:
            if not mrv:
                return x
            if sz[x] < best_size:
                best = x
                best_size = sz[x]
    return best


@jit
def csp_search(D0, out_ptr, out_arcs, arc_dst, arc_rel, rel_fwd, rel_bwd,
               vc_ptr, vc_idx, con_scope, con_tab, con_dup, tab_ptr, tab_rows,
               hits, hit_scope, hit_dup, adj_ptr, adj_idx, area_mod, mrv, budget):
    """Backtracking with maintained arc consistency.

    Variables are rows of ``D0``. Binary constraints arrive as directed arcs
    (``x -> arc_dst``) with relation bitsets; table constraints as scopes into
    stacked tables. ``hits`` are patterns that must occur at some placement of
    ``hit_scope``. Branching picks the lowest-index open variable (``mrv``
    false: the first solution is then lexicographically least) or the smallest
    domain, ties to the lowest index; values are tried in increasing order.
    With ``area_mod > 1``, every component of undecided variables in the
    ``adj`` graph must have size divisible by ``area_mod`` (tiling pruning).

    Returns ``(status, solution, nodes)``.
    """
    n, NW = D0.shape
    K = max(con_scope.shape[1], hit_scope.shape[1])
    solution = np.full(n, -1, dtype=np.int64)
    Dst = np.empty((n + 1, n, NW), dtype=np.uint64)
    szst = np.empty((n + 1, n), dtype=np.int64)
    var = np.empty(n + 1, dtype=np.int64)
    cursor = np.empty(n + 1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    inq = np.zeros(n, dtype=np.bool_)
    buf = np.empty(NW, dtype=np.uint64)
    supp = np.empty((max(K, 1), NW), dtype=np.uint64)
    stack = np.empty(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)

    Dst[0] = D0
    for x in range(n):
        szst[0, x] = domain_size(D0, x)
        if szst[0, x] == 0:
            return 1, solution, 0
        queue[x] = x
        inq[x] = True
    if not _propagate(Dst[0], szst[0], queue, inq, 0, n,
                      out_ptr, out_arcs, arc_dst, arc_rel, rel_fwd, rel_bwd,
                      vc_ptr, vc_idx, con_scope, con_tab, con_dup, tab_ptr, tab_rows,
                      hits, hit_scope, hit_dup, buf, supp):
        return 1, solution, 0
    if area_mod > 1 and not _area_ok(szst[0], adj_ptr, adj_idx, area_mod, stack, mark):
        return 1, solution, 0
    nodes = 0
    depth = 0
    var[0] = _select(szst[0], mrv)
    if var[0] < 0:
        for x in range(n):
            solution[x] = first_value(Dst[0], x, -1)
        return 0, solution, nodes
    cursor[0] = -1
    while depth >= 0:
        x = var[depth]
        v = first_value(Dst[depth], x, cursor[depth])
        if v < 0:
            depth -= 1
            continue
        cursor[depth] = v
        nodes += 1
        if budget >= 0 and nodes > budget:
            return 2, solution, nodes
        Dn = Dst[depth + 1]
        szn = szst[depth + 1]
        Dn[:, :] = Dst[depth]
        szn[:] = szst[depth]
        for w in range(NW):
            Dn[x, w] = np.uint64(0)
        Dn[x, v >> 6] = np.uint64(1) << np.uint64(v & 63)
        szn[x] = 1
        for y in range(n):
            inq[y] = False
        queue[0] = x
        inq[x] = True
        if not _propagate(Dn, szn, queue, inq, 0, 1,
                          out_ptr, out_arcs, arc_dst, arc_rel, rel_fwd, rel_bwd,
                          vc_ptr, vc_idx, con_scope, con_tab, con_dup, tab_ptr, tab_rows,
                          hits, hit_scope, hit_dup, buf, supp):
            continue
        if area_mod > 1 and not _area_ok(szn, adj_ptr, adj_idx, area_mod, stack, mark):
            continue
        nxt = _select(szn, mrv)
        if nxt < 0:
            for y in range(n):
                solution[y] = first_value(Dn, y, -1)
            return 0, solution, nodes
        depth += 1
        var[depth] = nxt
        cursor[depth] = -1
    return 1, solution, nodes


@jit
def pattern_codes(img, labels, k):
    """``codes[l, x] = sum_j labels[l, img[j, x]] * k**j`` (pattern at x as an integer)."""
    L, n = labels.shape
    W = img.shape[0]
    codes = np.zeros((L, n), dtype=np.int64)
    for l in range(L):
        for x in range(n):
            c = 0
            mult = 1
            for j in range(W):
                c += labels[l, img[j, x]] * mult
                mult *= k
            codes[l, x] = c
    return codes


def pattern_codes_numpy(img, labels, k):
    """Vectorized equivalent of :func:`pattern_codes`."""
    weights = k ** np.arange(img.shape[0], dtype=np.int64)
    return np.einsum("ljx,j->lx", labels[:, img], weights)
