# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend; mirrors ``_pykernel`` bit for bit."""

import numpy as np

from libc.stdint cimport int8_t, int64_t, uint64_t

from ._pykernel import (
    CELL_WIDTH,
    CK_MASK,
    LIMB_BITS,
    LIMB_MASK,
    cells_build,
    pack_node_key,
    unpack_node_key,
    key_checksum,
    key_cells,
    tag_term,
)

BACKEND = "c"

P61 = (1 << 61) - 1
DP_INF = 1 << 30
DP_UNSET = -1
DP_MATCH = 0
DP_SUB = 1
DP_DEL = 2
DP_INS = 3

cdef uint64_t _MASK64 = <uint64_t>0xFFFFFFFFFFFFFFFF
cdef uint64_t _M1 = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t _M2 = <uint64_t>0x94D049BB133111EB
cdef uint64_t _PHI64 = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t _SALT_C = <uint64_t>0xC2B2AE3D27D4EB4F
cdef uint64_t _P61 = (<uint64_t>1 << 61) - 1
cdef int64_t _DP_INF = <int64_t>1 << 30


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * _M1
    z = (z ^ (z >> 27)) * _M2
    return z ^ (z >> 31)


cdef inline uint64_t _prf_bit(uint64_t walk_key, uint64_t step, uint64_t symbol) noexcept nogil:
    return _mix64(walk_key ^ (step * _PHI64) ^ (symbol * _SALT_C)) & 1


cdef inline uint64_t _addmod(uint64_t a, uint64_t b) noexcept nogil:
    cdef uint64_t s = a + b
    if s >= _P61:
        s -= _P61
    return s


cdef extern from *:
    ctypedef unsigned long long uint128_t "unsigned __int128"


cdef inline uint64_t _fold61(uint64_t v) noexcept nogil:
    # Mersenne reduction of a value < 2^62 + 2^61.
    cdef uint64_t r = (v & _P61) + (v >> 61)
    if r >= _P61:
        r -= _P61
    return r


cdef inline uint64_t _mulmod(uint64_t a, uint64_t b) noexcept nogil:
    cdef uint128_t t = <uint128_t>a * <uint128_t>b
    cdef uint64_t lo = <uint64_t>(t & _P61)
    cdef uint64_t hi = <uint64_t>(t >> 61)
    return _fold61(_fold61(hi) + lo)


cdef inline int64_t _sym_c(int64_t[::1] s, int64_t n, int64_t p, bint clamp_tail) noexcept nogil:
    if p <= n:
        return s[p - 1]
    if clamp_tail and n > 0:
        return s[n - 1]
    return 0


def walk_outputs(s, n, walk_key, m):
    """One walk: (outputs[m], cursors[m+1]); cursors[t] is the pointer at
    the beginning of step t+1, cursors[m] the final pointer."""
    cdef int64_t[::1] sv = np.ascontiguousarray(s, dtype=np.int64)
    cdef int64_t nn = n
    cdef uint64_t key = walk_key
    cdef int64_t mm = m
    out_arr = np.zeros(mm, dtype=np.int64)
    cur_arr = np.zeros(mm + 1, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t[::1] cur = cur_arr
    cdef int64_t p = 1, t, c
    for t in range(1, mm + 1):
        cur[t - 1] = p
        c = _sym_c(sv, nn, p, False)
        out[t - 1] = c
        p += <int64_t>_prf_bit(key, <uint64_t>t, <uint64_t>c)
    cur[mm] = p
    return out_arr, cur_arr


def pair_stats(x, nx, y, ny, walk_key, m, u, v):
    """Coupled walk over m steps. Returns (progress, p_end, q_end, hit)
    where hit says whether state (u, v) was visited (u <= 0 disables)."""
    cdef int64_t[::1] xv = np.ascontiguousarray(x, dtype=np.int64)
    cdef int64_t[::1] yv = np.ascontiguousarray(y, dtype=np.int64)
    cdef int64_t nnx = nx, nny = ny, mm = m, uu = u, vv = v
    cdef uint64_t key = walk_key
    cdef int64_t p = 1, q = 1, progress = 0, t, cx, cy
    cdef int hit = 1 if (uu == 1 and vv == 1) else 0
    for t in range(1, mm + 1):
        cx = _sym_c(xv, nnx, p, False)
        cy = _sym_c(yv, nny, q, False)
        if cx != cy:
            progress += 1
        p += <int64_t>_prf_bit(key, <uint64_t>t, <uint64_t>cx)
        q += <int64_t>_prf_bit(key, <uint64_t>t, <uint64_t>cy)
        if uu > 0 and p == uu and q == vv:
            hit = 1
    return progress, p, q, hit


def selfsim_miss(s, big_l, walk_key, p0, q0, max_steps):
    """Walk on two copies of s from state (p0, q0), tail clamped to s[L].

    Returns 1 if state (L, L) is missed, 0 if hit, -1 if the step budget
    ran out. Once the pointers meet they stay coupled, so meeting at or
    before L counts as a hit."""
    cdef int64_t[::1] sv = np.ascontiguousarray(s, dtype=np.int64)
    cdef int64_t L = big_l, p = p0, q = q0, mm = max_steps, t, cx, cy
    cdef uint64_t key = walk_key
    for t in range(1, mm + 1):
        if p == q:
            return 0 if p <= L else 1
        if q > L:
            return 1
        cx = _sym_c(sv, L, p, True)
        cy = _sym_c(sv, L, q, True)
        p += <int64_t>_prf_bit(key, <uint64_t>t, <uint64_t>cx)
        q += <int64_t>_prf_bit(key, <uint64_t>t, <uint64_t>cy)
        if p == L and q == L:
            return 0
    return -1


def zone_entry(x, nx, y, ny, walk_key, u_start, v_start, max_steps):
    """First state (p, q) with p >= u_start and q >= v_start.

    Returns (p, q, steps); steps == -1 if the budget ran out."""
    cdef int64_t[::1] xv = np.ascontiguousarray(x, dtype=np.int64)
    cdef int64_t[::1] yv = np.ascontiguousarray(y, dtype=np.int64)
    cdef int64_t nnx = nx, nny = ny, us = u_start, vs = v_start, mm = max_steps
    cdef uint64_t key = walk_key
    cdef int64_t p = 1, q = 1, t, cx, cy
    if p >= us and q >= vs:
        return p, q, 0
    for t in range(1, mm + 1):
        cx = _sym_c(xv, nnx, p, False)
        cy = _sym_c(yv, nny, q, False)
        p += <int64_t>_prf_bit(key, <uint64_t>t, <uint64_t>cx)
        q += <int64_t>_prf_bit(key, <uint64_t>t, <uint64_t>cy)
        if p >= us and q >= vs:
            return p, q, t
    return p, q, -1


def gambler_walk(key, a, b, max_steps):
    """Self-looped unbiased 1-D walk from 0 absorbed at -a or +b.

    Returns (hit_b, steps); steps == -1 if the budget ran out."""
    cdef uint64_t kk = key, bits
    cdef int64_t aa = a, bb = b, mm = max_steps, pos = 0, t
    for t in range(1, mm + 1):
        bits = _mix64(kk ^ (<uint64_t>t * _PHI64)) & 3
        if bits == 0:
            pos -= 1
        elif bits == 3:
            pos += 1
        if pos == -aa:
            return 0, t
        if pos == bb:
            return 1, t
    return 0, -1


# ---------------------------------------------------------------------------
# Digest cell updates

cdef inline uint64_t _ck_c(uint64_t l0, uint64_t l1, uint64_t l2, uint64_t salt_ck) noexcept nogil:
    return _mix64(l0 ^ _mix64(l1 ^ _mix64(l2 ^ salt_ck)))


cdef inline uint64_t _tag_c(uint64_t l0, uint64_t l1, uint64_t l2, uint64_t salt_tag) noexcept nogil:
    return _fold61(_mix64(l0 ^ _mix64(l1 ^ _mix64(l2 ^ salt_tag))))


cdef inline void _cells_c(uint64_t l0, uint64_t l1, uint64_t l2, uint64_t salt_cell,
                          int64_t ncells, int64_t* c0, int64_t* c1, int64_t* c2) noexcept nogil:
    cdef int64_t region = ncells // 3
    cdef uint64_t kh = _mix64(l0 ^ _mix64(l1 ^ _mix64(l2 ^ salt_cell)))
    c0[0] = <int64_t>(kh % <uint64_t>region)
    c1[0] = region + <int64_t>(_mix64(kh ^ 1) % <uint64_t>region)
    c2[0] = 2 * region + <int64_t>(_mix64(kh ^ 2) % <uint64_t>region)


cdef uint64_t _CK_MASK = (<uint64_t>1 << 63) - 1
cdef uint64_t _MASK48 = (<uint64_t>1 << 48) - 1
cdef uint64_t _MASK32 = (<uint64_t>1 << 32) - 1
cdef uint64_t _MASK8 = <uint64_t>255


cdef inline void _cell_add_c(int64_t[:, ::1] cells, int64_t idx,
                             uint64_t l0, uint64_t l1, uint64_t l2,
                             uint64_t c) noexcept nogil:
    cells[idx, 0] += 1
    cells[idx, 1] = <int64_t>_addmod(<uint64_t>cells[idx, 1], l0)
    cells[idx, 2] = <int64_t>_addmod(<uint64_t>cells[idx, 2], l1)
    cells[idx, 3] = <int64_t>_addmod(<uint64_t>cells[idx, 3], l2)
    cells[idx, 4] = <int64_t>_addmod(<uint64_t>cells[idx, 4], _mulmod(l0, l0))
    cells[idx, 5] = <int64_t>_addmod(<uint64_t>cells[idx, 5], _mulmod(l1, l1))
    cells[idx, 6] = <int64_t>_addmod(<uint64_t>cells[idx, 6], _mulmod(l2, l2))
    cells[idx, 7] = <int64_t>(<uint64_t>cells[idx, 7] ^ (c & _CK_MASK))


def iblt_insert_keys(cells, salt_cell, salt_ck, salt_tag, limbs):
    """Insert each key (row of 48-bit limbs) into its three cells.

    Returns the tag contribution (mod P61) of the inserted keys."""
    cdef int64_t[:, ::1] cv = cells
    cdef int64_t[:, ::1] lv = np.ascontiguousarray(limbs, dtype=np.int64)
    cdef uint64_t s_cell = salt_cell, s_ck = salt_ck, s_tag = salt_tag
    cdef int64_t ncells = cv.shape[0]
    cdef uint64_t tag = 0, l0, l1, l2, c
    cdef int64_t i, c0, c1, c2
    for i in range(lv.shape[0]):
        l0 = <uint64_t>lv[i, 0]
        l1 = <uint64_t>lv[i, 1]
        l2 = <uint64_t>lv[i, 2]
        c = _ck_c(l0, l1, l2, s_ck)
        _cells_c(l0, l1, l2, s_cell, ncells, &c0, &c1, &c2)
        _cell_add_c(cv, c0, l0, l1, l2, c)
        _cell_add_c(cv, c1, l0, l1, l2, c)
        _cell_add_c(cv, c2, l0, l1, l2, c)
        tag = _addmod(tag, _tag_c(l0, l1, l2, s_tag))
    return int(tag)


# ---------------------------------------------------------------------------
# Digest decoding: peel singles, resolve stuck two-key cells algebraically.

cdef uint64_t _INV2 = ((<uint64_t>1 << 61) - 1 + 1) // 2
cdef uint64_t _SQRT_EXP = (((<uint64_t>1 << 61) - 1) + 1) // 4
cdef uint64_t _NO_ROOT = (<uint64_t>1 << 61) - 1  # outside the root range


cdef inline uint64_t _submod(uint64_t a, uint64_t b) noexcept nogil:
    return _addmod(a, _P61 - b if b else 0)


cdef uint64_t _powmod(uint64_t base, uint64_t e) noexcept nogil:
    cdef uint64_t r = 1
    while e:
        if e & 1:
            r = _mulmod(r, base)
        base = _mulmod(base, base)
        e >>= 1
    return r


cdef inline uint64_t _sqrt61(uint64_t x) noexcept nogil:
    if x == 0:
        return 0
    cdef uint64_t r = _powmod(x, _SQRT_EXP)
    if _mulmod(r, r) == x:
        return r
    return _NO_ROOT


cdef void _peel_remove_c(int64_t[:, ::1] cv, uint64_t l0, uint64_t l1, uint64_t l2,
                         int64_t sign, uint64_t s_cell, uint64_t s_ck, int64_t ncells,
                         int64_t[::1] queue, int64_t* qlen) noexcept nogil:
    cdef uint64_t ck = _ck_c(l0, l1, l2, s_ck) & _CK_MASK
    cdef int64_t cs[3]
    cdef int64_t c, i
    _cells_c(l0, l1, l2, s_cell, ncells, &cs[0], &cs[1], &cs[2])
    for i in range(3):
        c = cs[i]
        cv[c, 0] -= sign
        if sign == 1:
            cv[c, 1] = <int64_t>_submod(<uint64_t>cv[c, 1], l0)
            cv[c, 2] = <int64_t>_submod(<uint64_t>cv[c, 2], l1)
            cv[c, 3] = <int64_t>_submod(<uint64_t>cv[c, 3], l2)
            cv[c, 4] = <int64_t>_submod(<uint64_t>cv[c, 4], _mulmod(l0, l0))
            cv[c, 5] = <int64_t>_submod(<uint64_t>cv[c, 5], _mulmod(l1, l1))
            cv[c, 6] = <int64_t>_submod(<uint64_t>cv[c, 6], _mulmod(l2, l2))
        else:
            cv[c, 1] = <int64_t>_addmod(<uint64_t>cv[c, 1], l0)
            cv[c, 2] = <int64_t>_addmod(<uint64_t>cv[c, 2], l1)
            cv[c, 3] = <int64_t>_addmod(<uint64_t>cv[c, 3], l2)
            cv[c, 4] = <int64_t>_addmod(<uint64_t>cv[c, 4], _mulmod(l0, l0))
            cv[c, 5] = <int64_t>_addmod(<uint64_t>cv[c, 5], _mulmod(l1, l1))
            cv[c, 6] = <int64_t>_addmod(<uint64_t>cv[c, 6], _mulmod(l2, l2))
        cv[c, 7] = <int64_t>(<uint64_t>cv[c, 7] ^ ck)
        if cv[c, 0] == 1 or cv[c, 0] == -1:
            queue[qlen[0]] = c
            qlen[0] += 1


cdef bint _peel_single_c(int64_t[:, ::1] cv, int64_t idx, uint64_t s_cell,
                         uint64_t s_ck, int64_t ncells, int64_t[::1] queue,
                         int64_t* qlen, int64_t[:, ::1] rl, int64_t[::1] rs,
                         int64_t* rlen) noexcept nogil:
    cdef int64_t sign = cv[idx, 0]
    if sign != 1 and sign != -1:
        return False
    cdef uint64_t limb, v, sq
    cdef uint64_t limbs[3]
    cdef int64_t col
    for col in range(1, 4):
        v = <uint64_t>cv[idx, col]
        limb = v if sign == 1 else (_P61 - v if v else 0)
        if limb > _MASK48:
            return False
        sq = _mulmod(limb, limb)
        if sign == -1:
            sq = _P61 - sq if sq else 0
        if <uint64_t>cv[idx, col + 3] != sq:
            return False
        limbs[col - 1] = limb
    if <uint64_t>cv[idx, 7] != (_ck_c(limbs[0], limbs[1], limbs[2], s_ck) & _CK_MASK):
        return False
    cdef int64_t cs[3]
    _cells_c(limbs[0], limbs[1], limbs[2], s_cell, ncells, &cs[0], &cs[1], &cs[2])
    if idx != cs[0] and idx != cs[1] and idx != cs[2]:
        return False
    rl[rlen[0], 0] = <int64_t>limbs[0]
    rl[rlen[0], 1] = <int64_t>limbs[1]
    rl[rlen[0], 2] = <int64_t>limbs[2]
    rs[rlen[0]] = sign
    rlen[0] += 1
    _peel_remove_c(cv, limbs[0], limbs[1], limbs[2], sign, s_cell, s_ck, ncells,
                   queue, qlen)
    return True


cdef bint _peel_accept_c(int64_t[:, ::1] cv, int64_t idx, uint64_t s_cell,
                         uint64_t s_ck, int64_t ncells, uint64_t* ka, uint64_t* kb,
                         int64_t sa, int64_t sb, int64_t[::1] queue, int64_t* qlen,
                         int64_t[:, ::1] rl, int64_t[::1] rs,
                         int64_t* rlen) noexcept nogil:
    cdef int64_t i
    for i in range(3):
        if ka[i] > _MASK48 or kb[i] > _MASK48:
            return False
    cdef uint64_t cka = _ck_c(ka[0], ka[1], ka[2], s_ck) & _CK_MASK
    cdef uint64_t ckb = _ck_c(kb[0], kb[1], kb[2], s_ck) & _CK_MASK
    if (cka ^ ckb) != <uint64_t>cv[idx, 7]:
        return False
    cdef int64_t cs[3]
    _cells_c(ka[0], ka[1], ka[2], s_cell, ncells, &cs[0], &cs[1], &cs[2])
    if idx != cs[0] and idx != cs[1] and idx != cs[2]:
        return False
    _cells_c(kb[0], kb[1], kb[2], s_cell, ncells, &cs[0], &cs[1], &cs[2])
    if idx != cs[0] and idx != cs[1] and idx != cs[2]:
        return False
    rl[rlen[0], 0] = <int64_t>ka[0]
    rl[rlen[0], 1] = <int64_t>ka[1]
    rl[rlen[0], 2] = <int64_t>ka[2]
    rs[rlen[0]] = sa
    rlen[0] += 1
    rl[rlen[0], 0] = <int64_t>kb[0]
    rl[rlen[0], 1] = <int64_t>kb[1]
    rl[rlen[0], 2] = <int64_t>kb[2]
    rs[rlen[0]] = sb
    rlen[0] += 1
    _peel_remove_c(cv, ka[0], ka[1], ka[2], sa, s_cell, s_ck, ncells, queue, qlen)
    _peel_remove_c(cv, kb[0], kb[1], kb[2], sb, s_cell, s_ck, ncells, queue, qlen)
    return True


cdef bint _peel_pair_c(int64_t[:, ::1] cv, int64_t idx, uint64_t s_cell,
                       uint64_t s_ck, int64_t ncells, int64_t[::1] queue,
                       int64_t* qlen, int64_t[:, ::1] rl, int64_t[::1] rs,
                       int64_t* rlen) noexcept nogil:
    cdef int64_t count = cv[idx, 0]
    cdef uint64_t s1, s2, prod, disc, root, ssum
    cdef uint64_t pa[3]
    cdef uint64_t pb[3]
    cdef uint64_t ka[3]
    cdef uint64_t kb[3]
    cdef int64_t col, sign, combo, i1, i2
    if count == 2 or count == -2:
        sign = count // 2
        for col in range(1, 4):
            s1 = <uint64_t>cv[idx, col]
            s2 = <uint64_t>cv[idx, col + 3]
            if sign == -1:
                s1 = _P61 - s1 if s1 else 0
                s2 = _P61 - s2 if s2 else 0
            prod = _mulmod(_submod(_mulmod(s1, s1), s2), _INV2)
            disc = _submod(_mulmod(s1, s1), _mulmod(4, prod))
            root = _sqrt61(disc)
            if root == _NO_ROOT:
                return False
            pa[col - 1] = _mulmod(_addmod(s1, root), _INV2)
            pb[col - 1] = _mulmod(_submod(s1, root), _INV2)
        # Per-limb roots are unordered; the checksum picks the pairing.
        for combo in range(4):
            i1 = combo & 1
            i2 = (combo >> 1) & 1
            ka[0] = pa[0]
            ka[1] = pa[1] if i1 == 0 else pb[1]
            ka[2] = pa[2] if i2 == 0 else pb[2]
            kb[0] = pb[0]
            kb[1] = pb[1] if i1 == 0 else pa[1]
            kb[2] = pb[2] if i2 == 0 else pa[2]
            if _peel_accept_c(cv, idx, s_cell, s_ck, ncells, ka, kb, sign, sign,
                              queue, qlen, rl, rs, rlen):
                return True
        return False
    if count == 0:
        for col in range(1, 4):
            s1 = <uint64_t>cv[idx, col]  # a - b
            s2 = <uint64_t>cv[idx, col + 3]  # a^2 - b^2
            if s1 == 0:
                return False  # limbs equal; values unrecoverable here
            ssum = _mulmod(s2, _powmod(s1, _P61 - 2))
            ka[col - 1] = _mulmod(_addmod(ssum, s1), _INV2)
            kb[col - 1] = _mulmod(_submod(ssum, s1), _INV2)
        return _peel_accept_c(cv, idx, s_cell, s_ck, ncells, ka, kb, 1, -1,
                              queue, qlen, rl, rs, rlen)
    return False


def iblt_peel(cells, salt_cell, salt_ck, delta):
    """Decode a subtracted cell table in place.

    Returns (ok, limbs, signs): ok == 0 means overload; otherwise limbs is
    an (r, 3) array of recovered keys and signs their +-1 multiplicities,
    in pop order."""
    cdef int64_t[:, ::1] cv = cells
    cdef uint64_t s_cell = salt_cell, s_ck = salt_ck
    cdef int64_t dd = delta
    cdef int64_t ncells = cv.shape[0]

    queue_arr = np.zeros(ncells + 3 * dd + 64, dtype=np.int64)
    cand_arr = np.zeros(ncells, dtype=np.int64)
    rl_arr = np.zeros((dd + 4, 3), dtype=np.int64)
    rs_arr = np.zeros(dd + 4, dtype=np.int64)
    cdef int64_t[::1] queue = queue_arr
    cdef int64_t[::1] cand = cand_arr
    cdef int64_t[:, ::1] rl = rl_arr
    cdef int64_t[::1] rs = rs_arr
    cdef int64_t qlen = 0, rlen = 0, ncand, ci, i, col
    cdef bint ok = True, progressed, clean

    for i in range(ncells):
        if cv[i, 0] == 1 or cv[i, 0] == -1:
            queue[qlen] = i
            qlen += 1
    with nogil:
        while True:
            while qlen > 0:
                qlen -= 1
                _peel_single_c(cv, queue[qlen], s_cell, s_ck, ncells,
                               queue, &qlen, rl, rs, &rlen)
                if rlen > dd:
                    qlen = 0
                    ok = False
                    break
            if not ok:
                break
            clean = True
            for i in range(ncells):
                if cv[i, 0] != 0:
                    clean = False
                    break
                for col in range(1, 8):
                    if cv[i, col] != 0:
                        clean = False
                        break
                if not clean:
                    break
            if clean:
                break
            # One pass of two-key resolution, draining freed singles as we go.
            ncand = 0
            for i in range(ncells):
                if cv[i, 0] == 2 or cv[i, 0] == -2:
                    cand[ncand] = i
                    ncand += 1
                elif cv[i, 0] == 0:
                    for col in range(1, 7):
                        if cv[i, col] != 0:
                            cand[ncand] = i
                            ncand += 1
                            break
            progressed = False
            for ci in range(ncand):
                if _peel_pair_c(cv, cand[ci], s_cell, s_ck, ncells,
                                queue, &qlen, rl, rs, &rlen):
                    progressed = True
                    while qlen > 0:
                        qlen -= 1
                        _peel_single_c(cv, queue[qlen], s_cell, s_ck, ncells,
                                       queue, &qlen, rl, rs, &rlen)
                        if rlen > dd:
                            break
                if rlen > dd:
                    ok = False
                    break
            if not ok or not progressed:
                ok = False
                break
    if not ok or rlen == 0:
        return (1 if ok else 0), np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return 1, rl_arr[:rlen].copy(), rs_arr[:rlen].copy()


# ---------------------------------------------------------------------------
# Streaming segment-tree walk encoder


def encode_walk_cells(s, n, m, depth, walk_key, hash_base, salt_cell, salt_ck,
                      salt_tag, cells):
    """Run one walk of m = 2**depth steps over s and fill the digest cells
    with the 6-tuple of every segment-tree node. Returns (l01, tag)."""
    cdef int64_t[::1] sv = np.ascontiguousarray(s, dtype=np.int64)
    cdef int64_t nn = n, mm = m, d = depth
    cdef uint64_t key = walk_key
    cdef int64_t[:, ::1] cv = cells
    cdef uint64_t s_cell = salt_cell, s_ck = salt_ck, s_tag = salt_tag
    cdef int64_t ncells = cv.shape[0]

    rpow_arr = np.zeros(d + 1, dtype=np.uint64)
    cdef uint64_t[::1] rpow = rpow_arr
    cdef int64_t lv
    rpow[0] = <uint64_t>(hash_base % P61)
    for lv in range(1, d + 1):
        rpow[lv] = _mulmod(rpow[lv - 1], rpow[lv - 1])

    start_arr = np.ones(d + 1, dtype=np.int64)
    prev_arr = np.zeros(d + 1, dtype=np.int64)
    pend_arr = np.zeros(d + 1, dtype=np.uint64)
    cdef int64_t[::1] start_cur = start_arr
    cdef int64_t[::1] prev_cur = prev_arr
    cdef uint64_t[::1] pending = pend_arr

    cdef uint64_t tag = 0, h, c_ck, l0u, l1u, l2u
    cdef int64_t p = 1, t, c, new_p, lvl, j, length, l01 = 0
    cdef int64_t alpha, beta
    cdef int64_t c0, c1, c2
    for t in range(1, mm + 1):
        c = _sym_c(sv, nn, p, False)
        new_p = p + <int64_t>_prf_bit(key, <uint64_t>t, <uint64_t>c)
        h = <uint64_t>c % _P61
        lvl = d
        j = t
        while True:
            alpha = 1 if (j > 1 and prev_cur[lvl] == start_cur[lvl]) else 0
            beta = 1 if (j < (<int64_t>1 << lvl) and p == new_p) else 0
            length = p - start_cur[lvl] + 1
            # Inline pack_node_key: 144-bit layout into three 48-bit limbs.
            l0u = ((<uint64_t>lvl & _MASK8)
                   | ((<uint64_t>j & _MASK32) << 8)
                   | (h << 40)) & _MASK48
            l1u = (h >> 8) & _MASK48
            l2u = ((h >> 56) | ((<uint64_t>length & _MASK32) << 8)
                   | (<uint64_t>alpha << 40) | (<uint64_t>beta << 41)) & _MASK48
            c_ck = _ck_c(l0u, l1u, l2u, s_ck)
            _cells_c(l0u, l1u, l2u, s_cell, ncells, &c0, &c1, &c2)
            _cell_add_c(cv, c0, l0u, l1u, l2u, c_ck)
            _cell_add_c(cv, c1, l0u, l1u, l2u, c_ck)
            _cell_add_c(cv, c2, l0u, l1u, l2u, c_ck)
            tag = _addmod(tag, _tag_c(l0u, l1u, l2u, s_tag))
            if lvl == 0:
                l01 = length
            prev_cur[lvl] = p
            start_cur[lvl] = new_p
            if lvl == 0:
                break
            if j % 2 == 1:
                pending[lvl] = h
                break
            h = _addmod(pending[lvl], _mulmod(rpow[d - lvl], h))
            lvl -= 1
            j //= 2
        p = new_p
    return int(l01), int(tag)


# ---------------------------------------------------------------------------
# Union-find over alignment edges


def uf_build(size):
    return np.arange(size, dtype=np.int64)


cdef int64_t _find_c(int64_t[::1] parent, int64_t a) noexcept nogil:
    cdef int64_t root = a, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


def uf_union_runs(parent, xs, ys, lens, n):
    """Union x position (0-based, node i) with y position (node n+j) for
    each edge of each diagonal run."""
    cdef int64_t[::1] pv = parent
    cdef int64_t[::1] xv = np.ascontiguousarray(xs, dtype=np.int64)
    cdef int64_t[::1] yv = np.ascontiguousarray(ys, dtype=np.int64)
    cdef int64_t[::1] lv = np.ascontiguousarray(lens, dtype=np.int64)
    cdef int64_t nn = n, i, off, ra, rb
    for i in range(xv.shape[0]):
        for off in range(lv[i]):
            ra = _find_c(pv, xv[i] + off)
            rb = _find_c(pv, nn + yv[i] + off)
            if ra != rb:
                pv[rb] = ra


def uf_roots(parent):
    cdef int64_t[::1] pv = parent
    out_arr = np.empty(pv.shape[0], dtype=np.int64)
    cdef int64_t[::1] ov = out_arr
    cdef int64_t i
    for i in range(pv.shape[0]):
        ov[i] = _find_c(pv, i)
    return out_arr


# ---------------------------------------------------------------------------
# Banded alignment DP over labelled strings


def banded_dp(xl, yl, band, sub_ok, ins_ok):
    """Minimum edit cost between two labelled strings, cells restricted to
    |i - j| <= band. Equal labels align free; substituting or inserting
    the j-th y symbol is allowed only where the masks permit.

    Returns (dist, moves) with moves[i][j - i + band]; dist >= DP_INF
    means no feasible alignment inside the band."""
    cdef int64_t[::1] xv = np.ascontiguousarray(xl, dtype=np.int64)
    cdef int64_t[::1] yv = np.ascontiguousarray(yl, dtype=np.int64)
    cdef const unsigned char[::1] subv = np.ascontiguousarray(sub_ok, dtype=np.uint8)
    cdef const unsigned char[::1] insv = np.ascontiguousarray(ins_ok, dtype=np.uint8)
    cdef int64_t bb = band
    cdef int64_t lx = xv.shape[0], ly = yv.shape[0]
    if lx - ly > bb or ly - lx > bb:
        return DP_INF, None
    cdef int64_t width = 2 * bb + 1
    moves_arr = np.full((lx + 1, width), -1, dtype=np.int8)
    cdef int8_t[:, ::1] moves = moves_arr
    prev_arr = np.full(width, _DP_INF, dtype=np.int64)
    cdef int64_t[::1] prev = prev_arr
    curr_arr = np.full(width, _DP_INF, dtype=np.int64)
    cdef int64_t[::1] curr = curr_arr
    cdef int64_t i, j, lo, hi, k, best, cand
    cdef int8_t move
    hi = ly if ly < bb else bb
    for j in range(hi + 1):
        if j == 0:
            prev[j + bb] = 0
        elif prev[j - 1 + bb] < _DP_INF and insv[j - 1]:
            prev[j + bb] = prev[j - 1 + bb] + 1
            moves[0, j + bb] = DP_INS
    for i in range(1, lx + 1):
        for k in range(width):
            curr[k] = _DP_INF
        lo = i - bb
        if lo < 0:
            lo = 0
        hi = i + bb
        if hi > ly:
            hi = ly
        for j in range(lo, hi + 1):
            k = j - i + bb
            best = _DP_INF
            move = DP_UNSET
            if k + 1 >= 0 and k + 1 < width and prev[k + 1] < _DP_INF:
                cand = prev[k + 1] + 1
                if cand < best:
                    best = cand
                    move = DP_DEL
            if j > 0 and prev[k] < _DP_INF:
                if xv[i - 1] == yv[j - 1]:
                    cand = prev[k]
                    if cand < best:
                        best = cand
                        move = DP_MATCH
                elif subv[j - 1]:
                    cand = prev[k] + 1
                    if cand < best:
                        best = cand
                        move = DP_SUB
            if j > 0 and k - 1 >= 0 and curr[k - 1] < _DP_INF and insv[j - 1]:
                cand = curr[k - 1] + 1
                if cand < best:
                    best = cand
                    move = DP_INS
            if best < _DP_INF:
                curr[k] = best
                moves[i, k] = move
        prev, curr = curr, prev
    cdef int64_t dist
    if ly - lx >= -bb and ly - lx <= bb:
        dist = prev[ly - lx + bb]
    else:
        dist = _DP_INF
    return int(dist), moves_arr
