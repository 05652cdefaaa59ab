"""Compiled inner loops: occurrence-indexed propagation and clause counting.

Literal codes are ``2 * var + negated`` with 0-based ``var``.  Variable
values are int8: 1 true, 0 false, -1 unassigned.

Propagation order reproduces a sequential clause scan exactly: units are
applied in ascending clause index within a pass; a clause that becomes unit
at an index past the clause just applied is handled in the same pass, one at
an earlier index waits for the next pass.  Two min-heaps (current pass, next
pass) stand in for the scan pointer.
"""

import numpy as np
from numba import njit

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def _lit_value(code, vals):
    v = vals[code >> 1]
    if v < 0:
        return -1
    return v ^ (code & 1)


@njit(**_OPTS)
def _heap_push(heap, size, item):
    i = size
    heap[i] = item
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= item:
            break
        heap[i] = heap[parent]
        i = parent
    heap[i] = item
    return size + 1


@njit(**_OPTS)
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    last = heap[size]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        if child + 1 < size and heap[child + 1] < heap[child]:
            child += 1
        if heap[child] >= last:
            break
        heap[i] = heap[child]
        i = child
    if size > 0:
        heap[i] = last
    return top, size


@njit(**_OPTS)
def count_satisfied(lits, starts, alpha):
    m = starts.shape[0] - 1
    count = 0
    for c in range(m):
        for j in range(starts[c], starts[c + 1]):
            code = lits[j]
            if alpha[code >> 1] != bool(code & 1):
                count += 1
                break
    return count


@njit(**_OPTS)
def _rescan_matches(lits, starts, vals, n_unassigned, satisfied):
    m = starts.shape[0] - 1
    for c in range(m):
        un = 0
        sat = False
        for j in range(starts[c], starts[c + 1]):
            lv = _lit_value(lits[j], vals)
            if lv < 0:
                un += 1
            elif lv == 1:
                sat = True
        if un != n_unassigned[c] or sat != satisfied[c]:
            return False
    return True


@njit(**_OPTS)
def _assign(var, value, pos, occ, occ_starts, vals, n_unassigned, satisfied,
            cur, cur_size, nxt, nxt_size):
    vals[var] = value
    true_code = 2 * var + (1 - value)
    false_code = true_code ^ 1
    for j in range(occ_starts[true_code], occ_starts[true_code + 1]):
        c = occ[j]
        satisfied[c] = True
        n_unassigned[c] -= 1
    for j in range(occ_starts[false_code], occ_starts[false_code + 1]):
        c = occ[j]
        n_unassigned[c] -= 1
        if n_unassigned[c] == 1 and not satisfied[c]:
            if c > pos:
                cur_size = _heap_push(cur, cur_size, c)
            else:
                nxt_size = _heap_push(nxt, nxt_size, c)
    return cur_size, nxt_size


@njit(**_OPTS)
def _propagate(lits, starts, occ, occ_starts, vals, n_unassigned, satisfied,
               cur, cur_size, nxt, nxt_size, reasons, trail, trail_size, debug):
    """Run passes until no unit clause remains.

    Returns ``(trail_size, ok)``; ``ok`` is False only when ``debug`` is set
    and the incremental counters ever disagree with a full rescan.
    """
    pos = -1
    while True:
        if cur_size == 0:
            if nxt_size == 0:
                break
            cur, nxt = nxt, cur
            cur_size, nxt_size = nxt_size, 0
            pos = -1
            continue
        c, cur_size = _heap_pop(cur, cur_size)
        if satisfied[c] or n_unassigned[c] != 1:
            continue
        unit = -1
        for j in range(starts[c], starts[c + 1]):
            if vals[lits[j] >> 1] < 0:
                unit = lits[j]
                break
        var = unit >> 1
        pos = c
        reasons[var] = c
        trail[trail_size] = var
        trail_size += 1
        cur_size, nxt_size = _assign(var, 1 - (unit & 1), pos, occ, occ_starts, vals,
                                     n_unassigned, satisfied, cur, cur_size, nxt, nxt_size)
        if debug and not _rescan_matches(lits, starts, vals, n_unassigned, satisfied):
            return trail_size, False
    return trail_size, True


@njit(**_OPTS)
def _init_counters(lits, starts, vals, n_unassigned, satisfied, cur):
    m = starts.shape[0] - 1
    cur_size = 0
    for c in range(m):
        un = 0
        sat = False
        for j in range(starts[c], starts[c + 1]):
            lv = _lit_value(lits[j], vals)
            if lv < 0:
                un += 1
            elif lv == 1:
                sat = True
        n_unassigned[c] = un
        satisfied[c] = sat
        if un == 1 and not sat:
            cur_size = _heap_push(cur, cur_size, c)
    return cur_size


@njit(**_OPTS)
def unit_propagate(lits, starts, occ, occ_starts, partial, debug):
    """Indexed unit propagation from an arbitrary partial assignment.

    Returns ``(values, reasons, trail, ok)``: the propagated vector, the
    forcing clause per newly assigned variable (-1 elsewhere), the variables
    in the order they were forced, and the debug counter check result.
    """
    m = starts.shape[0] - 1
    n = partial.shape[0]
    vals = partial.copy()
    n_unassigned = np.empty(m, np.int32)
    satisfied = np.empty(m, np.bool_)
    cur = np.empty(m, np.int32)
    nxt = np.empty(m, np.int32)
    reasons = np.full(n, -1, np.int32)
    trail = np.empty(n, np.int32)
    cur_size = _init_counters(lits, starts, vals, n_unassigned, satisfied, cur)
    trail_size, ok = _propagate(lits, starts, occ, occ_starts, vals, n_unassigned,
                                satisfied, cur, cur_size, nxt, 0, reasons, trail, 0, debug)
    return vals, reasons, trail[:trail_size], ok


@njit(**_OPTS)
def rebuild_assignment(lits, starts, occ, occ_starts, order, alpha, debug):
    """Seed variables in ``order`` with their ``alpha`` value, propagating after each.

    Counters persist across the per-variable propagation calls.  This is
    equivalent to rebuilding them each time: every call ends at a fixpoint, so
    the only units at the next call's start are the ones the new seed created,
    and each call starts a fresh pass at clause 0.

    Returns ``(new_alpha, satisfied_count, forced_mask, ok)``.
    """
    m = starts.shape[0] - 1
    n = alpha.shape[0]
    vals = np.full(n, -1, np.int8)
    n_unassigned = np.empty(m, np.int32)
    satisfied = np.empty(m, np.bool_)
    cur = np.empty(m, np.int32)
    nxt = np.empty(m, np.int32)
    reasons = np.full(n, -1, np.int32)
    trail = np.empty(n, np.int32)
    cur_size = _init_counters(lits, starts, vals, n_unassigned, satisfied, cur)
    ok = True
    trail_size = 0
    for k in range(order.shape[0]):
        var = order[k]
        if vals[var] >= 0:
            continue
        cur_size, nxt_size = _assign(var, 1 if alpha[var] else 0, -1, occ, occ_starts, vals,
                                     n_unassigned, satisfied, cur, cur_size, nxt, 0)
        trail_size, step_ok = _propagate(lits, starts, occ, occ_starts, vals, n_unassigned,
                                         satisfied, cur, cur_size, nxt, nxt_size,
                                         reasons, trail, trail_size, debug)
        cur_size = 0
        ok = ok and step_ok
    count = 0
    for c in range(m):
        if satisfied[c]:
            count += 1
    out = np.empty(n, np.bool_)
    for i in range(n):
        out[i] = vals[i] == 1
    return out, count, reasons >= 0, ok
