"""Pure-Python kernel backend.

Reference implementations of the hot loops: coupled random walks, the
streaming segment-tree encoder, digest cell updates, union-find and the
banded alignment DP. The compiled backend in ``_ckernel.pyx`` mirrors
these functions bit for bit; parity is enforced by tests.

All string arguments are int64 numpy arrays of symbols; indices handed
across this boundary are 0-based, walk step counts 1-based internally.
"""

import numpy as np

from ._mix import MASK64, PHI64, SALT_C, mix64, prf_bit

BACKEND = "python"

P61 = (1 << 61) - 1
DP_INF = 1 << 30


def _sym(s, n, p, clamp_tail):
    """Symbol at 1-based position p with padding beyond n."""
    if p <= n:
        return int(s[p - 1])
    if clamp_tail and n > 0:
        return int(s[n - 1])
    return 0


# ---------------------------------------------------------------------------
# Coupled random walks


def walk_outputs(s, n, walk_key, m):
    """One walk: (outputs[m], cursors[m+1]); cursors[t] is the pointer at
    the beginning of step t+1, cursors[m] the final pointer."""
    out = np.zeros(m, dtype=np.int64)
    cur = np.zeros(m + 1, dtype=np.int64)
    p = 1
    for t in range(1, m + 1):
        cur[t - 1] = p
        c = _sym(s, n, p, False)
        out[t - 1] = c
        p += prf_bit(walk_key, t, c)
    cur[m] = p
    return out, cur


def pair_stats(x, nx, y, ny, walk_key, m, u, v):
    """Coupled walk over m steps. Returns (progress, p_end, q_end, hit)
    where hit says whether state (u, v) was visited (u <= 0 disables)."""
    p = 1
    q = 1
    progress = 0
    hit = 1 if (u == 1 and v == 1) else 0
    for t in range(1, m + 1):
        cx = _sym(x, nx, p, False)
        cy = _sym(y, ny, q, False)
        if cx != cy:
            progress += 1
        p += prf_bit(walk_key, t, cx)
        q += prf_bit(walk_key, t, cy)
        if u > 0 and p == u and q == v:
            hit = 1
    return progress, p, q, hit


def selfsim_miss(s, big_l, walk_key, p0, q0, max_steps):
    """Walk on two copies of s from state (p0, q0), tail clamped to s[L].

    Returns 1 if state (L, L) is missed, 0 if hit, -1 if the step budget
    ran out. Once the pointers meet they stay coupled, so meeting at or
    before L counts as a hit."""
    n = big_l
    p = p0
    q = q0
    for t in range(1, max_steps + 1):
        if p == q:
            return 0 if p <= big_l else 1
        if q > big_l:
            return 1
        cx = _sym(s, n, p, True)
        cy = _sym(s, n, q, True)
        p += prf_bit(walk_key, t, cx)
        q += prf_bit(walk_key, t, cy)
        if p == big_l and q == big_l:
            return 0
    return -1


def zone_entry(x, nx, y, ny, walk_key, u_start, v_start, max_steps):
    """First state (p, q) with p >= u_start and q >= v_start.

    Returns (p, q, steps); steps == -1 if the budget ran out."""
    p = 1
    q = 1
    if p >= u_start and q >= v_start:
        return p, q, 0
    for t in range(1, max_steps + 1):
        cx = _sym(x, nx, p, False)
        cy = _sym(y, ny, q, False)
        p += prf_bit(walk_key, t, cx)
        q += prf_bit(walk_key, t, cy)
        if p >= u_start and q >= v_start:
            return p, q, t
    return p, q, -1


def gambler_walk(key, a, b, max_steps):
    """Self-looped unbiased 1-D walk from 0 absorbed at -a or +b.

    Returns (hit_b, steps); steps == -1 if the budget ran out."""
    pos = 0
    for t in range(1, max_steps + 1):
        bits = mix64(key ^ ((t * PHI64) & MASK64)) & 3
        if bits == 0:
            pos -= 1
        elif bits == 3:
            pos += 1
        if pos == -a:
            return 0, t
        if pos == b:
            return 1, t
    return 0, -1


# ---------------------------------------------------------------------------
# Digest cell updates (counting sketch with per-limb linear and square sums)


def _key_checksum(l0, l1, l2, salt_ck):
    return mix64(l0 ^ mix64(l1 ^ mix64(l2 ^ salt_ck)))


def _key_cells(l0, l1, l2, salt_cell, ncells):
    """Three distinct cell slots, one per third of the table."""
    region = ncells // 3
    kh = mix64(l0 ^ mix64(l1 ^ mix64(l2 ^ salt_cell)))
    c0 = kh % region
    c1 = region + (mix64(kh ^ 1) % region)
    c2 = 2 * region + (mix64(kh ^ 2) % region)
    return c0, c1, c2


def _tag_term(l0, l1, l2, salt_tag):
    return mix64(l0 ^ mix64(l1 ^ mix64(l2 ^ salt_tag))) % P61


CK_MASK = (1 << 63) - 1

# Cell row layout: count, ks0..ks2, sq0..sq2, ck (checksum masked to 63 bits
# so the whole row fits non-negative int64).
CELL_WIDTH = 8


def cells_build(ncells):
    return np.zeros((ncells, CELL_WIDTH), dtype=np.int64)


def _cell_add(cells, idx, l0, l1, l2, ck):
    row = cells[idx]
    row[0] += 1
    row[1] = (int(row[1]) + l0) % P61
    row[2] = (int(row[2]) + l1) % P61
    row[3] = (int(row[3]) + l2) % P61
    row[4] = (int(row[4]) + l0 * l0) % P61
    row[5] = (int(row[5]) + l1 * l1) % P61
    row[6] = (int(row[6]) + l2 * l2) % P61
    row[7] = int(row[7]) ^ (ck & CK_MASK)


key_checksum = _key_checksum
key_cells = _key_cells
tag_term = _tag_term


def iblt_insert_keys(cells, salt_cell, salt_ck, salt_tag, limbs):
    """Insert each key (row of 48-bit limbs) into its three cells.

    Returns the tag contribution (mod P61) of the inserted keys."""
    ncells = len(cells)
    tag = 0
    for l0, l1, l2 in limbs:
        l0 = int(l0)
        l1 = int(l1)
        l2 = int(l2)
        ck = _key_checksum(l0, l1, l2, salt_ck)
        for idx in _key_cells(l0, l1, l2, salt_cell, ncells):
            _cell_add(cells, idx, l0, l1, l2, ck)
        tag = (tag + _tag_term(l0, l1, l2, salt_tag)) % P61
    return tag


# ---------------------------------------------------------------------------
# Digest decoding: peel singles, resolve stuck two-key cells algebraically.

_INV2 = (P61 + 1) // 2


def _sqrt_mod61(x):
    """Square root mod the Mersenne prime (p = 3 mod 4), or -1."""
    if x == 0:
        return 0
    r = pow(x, (P61 + 1) // 4, P61)
    return r if r * r % P61 == x else -1


def _peel_remove(cells, limbs, sign, salt_cell, salt_ck, ncells, queue):
    l0, l1, l2 = limbs
    ck = _key_checksum(l0, l1, l2, salt_ck) & CK_MASK
    for c in _key_cells(l0, l1, l2, salt_cell, ncells):
        row = cells[c]
        row[0] -= sign
        row[1] = (int(row[1]) - sign * l0) % P61
        row[2] = (int(row[2]) - sign * l1) % P61
        row[3] = (int(row[3]) - sign * l2) % P61
        row[4] = (int(row[4]) - sign * l0 * l0) % P61
        row[5] = (int(row[5]) - sign * l1 * l1) % P61
        row[6] = (int(row[6]) - sign * l2 * l2) % P61
        row[7] = int(row[7]) ^ ck
        if row[0] in (1, -1):
            queue.append(int(c))


def _peel_pop_single(cells, idx, salt_cell, salt_ck, ncells, recovered, queue):
    sign = int(cells[idx, 0])
    if sign not in (1, -1):
        return False
    limbs = []
    for col in (1, 2, 3):
        v = int(cells[idx, col])
        limb = v if sign == 1 else (P61 - v) % P61
        if limb > LIMB_MASK:
            return False
        sq = limb * limb % P61 if sign == 1 else (P61 - limb * limb % P61) % P61
        if int(cells[idx, col + 3]) != sq:
            return False
        limbs.append(limb)
    l0, l1, l2 = limbs
    if int(cells[idx, 7]) != _key_checksum(l0, l1, l2, salt_ck) & CK_MASK:
        return False
    if idx not in _key_cells(l0, l1, l2, salt_cell, ncells):
        return False
    recovered.append((l0, l1, l2, sign))
    _peel_remove(cells, limbs, sign, salt_cell, salt_ck, ncells, queue)
    return True


def _peel_accept_pair(cells, idx, salt_cell, salt_ck, ncells, ka, kb, sa, sb,
                      recovered, queue):
    for limbs in (ka, kb):
        if any(v > LIMB_MASK for v in limbs):
            return False
    cka = _key_checksum(*ka, salt_ck) & CK_MASK
    ckb = _key_checksum(*kb, salt_ck) & CK_MASK
    if (cka ^ ckb) != int(cells[idx, 7]):
        return False
    if idx not in _key_cells(*ka, salt_cell, ncells):
        return False
    if idx not in _key_cells(*kb, salt_cell, ncells):
        return False
    recovered.append((*ka, sa))
    recovered.append((*kb, sb))
    _peel_remove(cells, ka, sa, salt_cell, salt_ck, ncells, queue)
    _peel_remove(cells, kb, sb, salt_cell, salt_ck, ncells, queue)
    return True


def _peel_pop_pair(cells, idx, salt_cell, salt_ck, ncells, recovered, queue):
    count = int(cells[idx, 0])
    if count in (2, -2):
        sign = count // 2
        pairs = []
        for col in (1, 2, 3):
            s1 = int(cells[idx, col])
            s2 = int(cells[idx, col + 3])
            if sign == -1:
                s1 = (P61 - s1) % P61
                s2 = (P61 - s2) % P61
            prod = (s1 * s1 - s2) % P61 * _INV2 % P61
            disc = (s1 * s1 - 4 * prod) % P61
            root = _sqrt_mod61(disc)
            if root < 0:
                return False
            a = (s1 + root) * _INV2 % P61
            b = (s1 - root) % P61 * _INV2 % P61
            pairs.append((a, b))
        # Per-limb roots are unordered; the checksum picks the pairing.
        for combo in range(4):
            i1, i2 = combo & 1, (combo >> 1) & 1
            ka = (pairs[0][0], pairs[1][i1], pairs[2][i2])
            kb = (pairs[0][1], pairs[1][1 - i1], pairs[2][1 - i2])
            if _peel_accept_pair(cells, idx, salt_cell, salt_ck, ncells,
                                 ka, kb, sign, sign, recovered, queue):
                return True
        return False
    if count == 0:
        ka = []
        kb = []
        for col in (1, 2, 3):
            s1 = int(cells[idx, col])  # a - b
            s2 = int(cells[idx, col + 3])  # a^2 - b^2
            if s1 == 0:
                return False  # limbs equal; values unrecoverable here
            ssum = s2 * pow(s1, P61 - 2, P61) % P61
            ka.append((ssum + s1) * _INV2 % P61)
            kb.append((ssum - s1) % P61 * _INV2 % P61)
        return _peel_accept_pair(cells, idx, salt_cell, salt_ck, ncells,
                                 tuple(ka), tuple(kb), 1, -1, recovered, queue)
    return False


def iblt_peel(cells, salt_cell, salt_ck, delta):
    """Decode a subtracted cell table in place.

    Returns (ok, limbs, signs): ok == 0 means overload; otherwise limbs is
    an (r, 3) array of recovered keys and signs their +-1 multiplicities,
    in pop order."""
    ncells = len(cells)
    recovered = []
    queue = [int(i) for i in np.flatnonzero(np.abs(cells[:, 0]) == 1)]
    ok = 1
    while True:
        while queue:
            _peel_pop_single(cells, queue.pop(), salt_cell, salt_ck, ncells,
                             recovered, queue)
            if len(recovered) > delta:
                queue = []
                ok = 0
                break
        if not ok:
            break
        if np.all(cells[:, 0] == 0) and not np.any(cells[:, 1:]):
            break
        # One pass of two-key resolution, draining freed singles as we go.
        counts = cells[:, 0]
        cand = np.flatnonzero((np.abs(counts) == 2)
                              | ((counts == 0) & (cells[:, 1:7] != 0).any(axis=1)))
        progressed = False
        for idx in cand:
            if _peel_pop_pair(cells, int(idx), salt_cell, salt_ck, ncells,
                              recovered, queue):
                progressed = True
                while queue:
                    _peel_pop_single(cells, queue.pop(), salt_cell, salt_ck,
                                     ncells, recovered, queue)
                    if len(recovered) > delta:
                        break
            if len(recovered) > delta:
                ok = 0
                break
        if not ok or not progressed:
            ok = 0
            break
    if not ok or not recovered:
        limbs = np.zeros((0, 3), dtype=np.int64)
        signs = np.zeros(0, dtype=np.int64)
        return ok, limbs, signs
    arr = np.asarray(recovered, dtype=np.int64)
    return 1, arr[:, :3].copy(), arr[:, 3].copy()


# ---------------------------------------------------------------------------
# Streaming segment-tree walk encoder

LIMB_BITS = 48
LIMB_MASK = (1 << LIMB_BITS) - 1


def pack_node_key(depth, index, h, length, alpha, beta):
    """Canonical 144-bit node key as three 48-bit limbs.

    Bit layout (little-endian): depth:8, index:32, hash:64, length:32,
    alpha:1, beta:1, zero padding to 144."""
    v = (
        (depth & 0xFF)
        | ((index & 0xFFFFFFFF) << 8)
        | ((h & MASK64) << 40)
        | ((length & 0xFFFFFFFF) << 104)
        | ((alpha & 1) << 136)
        | ((beta & 1) << 137)
    )
    return v & LIMB_MASK, (v >> 48) & LIMB_MASK, (v >> 96) & LIMB_MASK


def unpack_node_key(l0, l1, l2):
    v = int(l0) | (int(l1) << 48) | (int(l2) << 96)
    depth = v & 0xFF
    index = (v >> 8) & 0xFFFFFFFF
    h = (v >> 40) & MASK64
    length = (v >> 104) & 0xFFFFFFFF
    alpha = (v >> 136) & 1
    beta = (v >> 137) & 1
    if v >> 138:
        return None
    return depth, index, h, length, alpha, beta


def encode_walk_cells(s, n, m, depth, walk_key, hash_base, salt_cell, salt_ck, salt_tag, cells):
    """Run one walk of m = 2**depth steps over s and fill the digest cells
    with the 6-tuple of every segment-tree node. Returns (l01, tag)."""
    # r^(2^j) for combining child hashes of output length 2^j.
    rpow = [hash_base % P61]
    for _ in range(depth):
        rpow.append(rpow[-1] * rpow[-1] % P61)

    start_cur = [1] * (depth + 1)   # pre-image start of the open segment
    prev_cur = [0] * (depth + 1)    # pointer of the step before the segment
    pending = [0] * (depth + 1)     # hash of a finished left child
    tag = 0
    p = 1
    for t in range(1, m + 1):
        c = _sym(s, n, p, False)
        new_p = p + prf_bit(walk_key, t, c)
        h = c % P61
        lvl = depth
        j = t
        while True:
            # Node (lvl, j) just completed with hash h.
            alpha = 1 if (j > 1 and prev_cur[lvl] == start_cur[lvl]) else 0
            beta = 1 if (j < (1 << lvl) and p == new_p) else 0
            length = p - start_cur[lvl] + 1
            l0, l1, l2 = pack_node_key(lvl, j, h, length, alpha, beta)
            ck = _key_checksum(l0, l1, l2, salt_ck)
            for idx in _key_cells(l0, l1, l2, salt_cell, len(cells)):
                _cell_add(cells, idx, l0, l1, l2, ck)
            tag = (tag + _tag_term(l0, l1, l2, salt_tag)) % P61
            if lvl == 0:
                l01 = length
            prev_cur[lvl] = p
            start_cur[lvl] = new_p
            if lvl == 0:
                break
            if j % 2 == 1:
                pending[lvl] = h
                break
            # Right child done: fold into the parent hash. The left half
            # has output length 2^(depth-lvl).
            h = (pending[lvl] + rpow[depth - lvl] * h) % P61
            lvl -= 1
            j //= 2
        p = new_p
    return l01, tag


# ---------------------------------------------------------------------------
# Union-find over alignment edges


def uf_build(size):
    return np.arange(size, dtype=np.int64)


def _uf_find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        parent[a], a = root, parent[a]
    return root


def uf_union_runs(parent, xs, ys, lens, n):
    """Union x position (0-based, node i) with y position (node n+j) for
    each edge of each diagonal run."""
    for x0, y0, ln in zip(xs, ys, lens):
        for off in range(ln):
            ra = _uf_find(parent, int(x0) + off)
            rb = _uf_find(parent, n + int(y0) + off)
            if ra != rb:
                parent[rb] = ra


def uf_roots(parent):
    out = np.empty(len(parent), dtype=np.int64)
    for i in range(len(parent)):
        out[i] = _uf_find(parent, i)
    return out


# ---------------------------------------------------------------------------
# Banded alignment DP over labelled strings

# Move codes in the banded traceback matrix.
DP_UNSET = -1
DP_MATCH = 0
DP_SUB = 1
DP_DEL = 2
DP_INS = 3


def banded_dp(xl, yl, band, sub_ok, ins_ok):
    """Minimum edit cost between two labelled strings, cells restricted to
    |i - j| <= band. Equal labels align free; substituting or inserting
    the j-th y symbol is allowed only where the masks permit.

    Returns (dist, moves) with moves[i][j - i + band]; dist >= DP_INF
    means no feasible alignment inside the band."""
    lx = len(xl)
    ly = len(yl)
    if abs(lx - ly) > band:
        return DP_INF, None
    width = 2 * band + 1
    moves = np.full((lx + 1, width), DP_UNSET, dtype=np.int8)
    prev = np.full(width, DP_INF, dtype=np.int64)
    # Row 0: inserting y[0..j).
    hi = min(ly, band)
    for j in range(hi + 1):
        if j == 0:
            prev[j + band] = 0
        elif prev[j - 1 + band] < DP_INF and ins_ok[j - 1]:
            prev[j + band] = prev[j - 1 + band] + 1
            moves[0][j + band] = DP_INS
    for i in range(1, lx + 1):
        curr = np.full(width, DP_INF, dtype=np.int64)
        lo = max(0, i - band)
        hi = min(ly, i + band)
        for j in range(lo, hi + 1):
            k = j - i + band
            best = DP_INF
            move = DP_UNSET
            if 0 <= k + 1 < width and prev[k + 1] < DP_INF:  # delete x[i-1]
                cand = prev[k + 1] + 1
                if cand < best:
                    best, move = cand, DP_DEL
            if j > 0 and prev[k] < DP_INF:  # diagonal
                if xl[i - 1] == yl[j - 1]:
                    cand = prev[k]
                    if cand < best:
                        best, move = cand, DP_MATCH
                elif sub_ok[j - 1]:
                    cand = prev[k] + 1
                    if cand < best:
                        best, move = cand, DP_SUB
            if j > 0 and k - 1 >= 0 and curr[k - 1] < DP_INF and ins_ok[j - 1]:
                cand = curr[k - 1] + 1
                if cand < best:
                    best, move = cand, DP_INS
            if best < DP_INF:
                curr[k] = best
                moves[i][k] = move
        prev = curr
    dist = int(prev[ly - lx + band]) if abs(ly - lx) <= band else DP_INF
    return dist, moves
