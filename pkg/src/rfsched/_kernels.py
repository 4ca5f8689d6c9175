"""Hot inner-loop kernels shared by the numba and pure-numpy backends.

Everything here operates on plain ndarrays and scalars so that the same
source compiles under ``numba.njit`` and also runs uncompiled.  Higher-level
modules own the typed interfaces and convert to/from these packed forms.

Conventions used throughout:

* period/arrival distributions are packed as ``(kind, param, cdf, eq_cdf)``
  where kind 0 = geometric(param), 1 = deterministic(param), 2 = finite
  table with ``cdf[j] = P(X <= j+1)`` and ``eq_cdf`` the CDF of the
  equilibrium residual life (table kind only);
* queues are ring buffers of packet arrival slots: ``buf[i, (head+k) % cap]``
  is the arrival slot of the k-th oldest packet of queue i;
* the RNG is a splitmix64 counter stream held in a one-element uint64 array,
  so a (seed, replication) pair fully determines every draw.
"""

import numpy as np

from .backend import jit

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D4BE45D9C3A7D9)
_S30 = _U64(30)
_S27 = _U64(27)
_S31 = _U64(31)
_S11 = _U64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53
_BIG = 1 << 62


def make_stream(seed: int, rep: int = 0) -> np.ndarray:
    """Counter-seeded RNG state for (seed, replication).

    Mixing happens in python ints so the derivation is identical on every
    platform; the returned one-element uint64 array is the mutable state.
    """
    mask = (1 << 64) - 1

    def mix(z):
        z = (z + 0x9E3779B97F4A7C15) & mask
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D4BE45D9C3A7D9) & mask
        return z ^ (z >> 31)

    s = mix(seed & mask) ^ mix((rep * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019) & mask)
    return np.array([s & mask], dtype=np.uint64)


def _next_u64(state):
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def _u01(state):
    return float(_next_u64(state) >> _S11) * _INV53


def _sample_period(kind, param, cdf, state):
    u = _u01(state)
    if kind == 0:
        if param >= 1.0:
            return 1
        k = 1 + int(np.floor(np.log1p(-u) / np.log1p(-param)))
        if k < 1:
            k = 1
        return k
    if kind == 1:
        return int(param + 0.5)
    j = 0
    last = cdf.shape[0] - 1
    while j < last and u >= cdf[j]:
        j += 1
    return j + 1


def _sample_equilibrium_residual(kind, param, eq_cdf, state):
    # Integrated-tail law P(R = r) = P(X >= r) / E[X]; for a geometric
    # period it coincides with the period law itself (memorylessness).
    if kind == 0:
        return _sample_period(kind, param, eq_cdf, state)
    if kind == 1:
        d = int(param + 0.5)
        r = 1 + int(_u01(state) * d)
        if r > d:
            r = d
        return r
    u = _u01(state)
    j = 0
    last = eq_cdf.shape[0] - 1
    while j < last and u >= eq_cdf[j]:
        j += 1
    return j + 1


def _channel_init_equilibrium(
    phase,
    residual,
    p_on,
    on_kind,
    on_param,
    on_eq,
    off_kind,
    off_param,
    off_eq,
    state,
):
    rows, cols = phase.shape
    for i in range(rows):
        for j in range(cols):
            if _u01(state) < p_on:
                phase[i, j] = 1
                residual[i, j] = _sample_equilibrium_residual(on_kind, on_param, on_eq, state)
            else:
                phase[i, j] = 0
                residual[i, j] = _sample_equilibrium_residual(off_kind, off_param, off_eq, state)


def _channel_step(
    phase,
    residual,
    conn,
    on_kind,
    on_param,
    on_cdf,
    off_kind,
    off_param,
    off_cdf,
    state,
):
    # Emits the connectivity of the current slot, then advances one slot:
    # residual hits zero -> phase flips and a fresh period is drawn.
    rows, cols = phase.shape
    for i in range(rows):
        for j in range(cols):
            conn[i, j] = phase[i, j]
            residual[i, j] -= 1
            if residual[i, j] == 0:
                if phase[i, j] == 1:
                    phase[i, j] = 0
                    residual[i, j] = _sample_period(off_kind, off_param, off_cdf, state)
                else:
                    phase[i, j] = 1
                    residual[i, j] = _sample_period(on_kind, on_param, on_cdf, state)


def _augment_one(conn, match_r, start, visited_q, visited_r, entry_s, parent_q, bfs_q):
    """Try to grant queue ``start`` one additional server via an alternating
    path over the current server assignment ``match_r`` (server -> queue,
    -1 free).  Returns True and updates ``match_r`` on success; on failure
    the assignment is left untouched."""
    n, m = conn.shape
    for i in range(n):
        visited_q[i] = False
    for r in range(m):
        visited_r[r] = False
    head = 0
    tail = 0
    bfs_q[tail] = start
    tail += 1
    visited_q[start] = True
    entry_s[start] = -1
    while head < tail:
        j = bfs_q[head]
        head += 1
        for r in range(m):
            if conn[j, r] != 0 and not visited_r[r]:
                visited_r[r] = True
                parent_q[r] = j
                k = match_r[r]
                if k < 0:
                    cur = r
                    while True:
                        q = parent_q[cur]
                        nxt = entry_s[q]
                        match_r[cur] = q
                        if nxt < 0:
                            return True
                        cur = nxt
                elif not visited_q[k]:
                    visited_q[k] = True
                    entry_s[k] = r
                    bfs_q[tail] = k
                    tail += 1
    return False


def _max_cardinality(conn, match_r, visited_q, visited_r, entry_s, parent_q, bfs_q):
    n = conn.shape[0]
    for r in range(conn.shape[1]):
        match_r[r] = -1
    size = 0
    for i in range(n):
        if _augment_one(conn, match_r, i, visited_q, visited_r, entry_s, parent_q, bfs_q):
            size += 1
    return size


def _feasible_demands(conn, demands, match_r, visited_q, visited_r, entry_s, parent_q, bfs_q):
    m = conn.shape[1]
    total = 0
    for i in range(demands.shape[0]):
        total += demands[i]
    if total > m:
        return False
    for r in range(m):
        match_r[r] = -1
    for i in range(demands.shape[0]):
        for _ in range(demands[i]):
            if not _augment_one(conn, match_r, i, visited_q, visited_r, entry_s, parent_q, bfs_q):
                return False
    return True


def _assignment_min_cost(cost, assign_row):
    """Square min-cost assignment via shortest augmenting paths with
    potentials (O(s^3)).  Ties resolve to the lowest column index, so the
    result is deterministic.  Fills assign_row[i] = column of row i."""
    s = cost.shape[0]
    u = np.zeros(s + 1)
    v = np.zeros(s + 1)
    p = np.zeros(s + 1, np.int64)
    way = np.zeros(s + 1, np.int64)
    minv = np.zeros(s + 1)
    used = np.zeros(s + 1, np.bool_)
    for i in range(1, s + 1):
        p[0] = i
        j0 = 0
        for j in range(s + 1):
            minv[j] = np.inf
            used[j] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, s + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(s + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    for j in range(1, s + 1):
        if p[j] > 0:
            assign_row[p[j] - 1] = j - 1
    total = 0.0
    for i in range(s):
        total += cost[i, assign_row[i]]
    return total


def _greedy_prefix_schedule(
    t,
    conn,
    buf,
    qhead,
    qlen,
    qcap,
    per_queue_cap,
    served,
    blocked,
    match_r,
    visited_q,
    visited_r,
    entry_s,
    parent_q,
    bfs_q,
):
    """Oldest-first maximal schedule (equivalently: maximum total delay+1).

    Adds packets one at a time in global age order, keeping a running
    server assignment; a queue whose next packet cannot be granted a
    server is blocked for the rest of the slot, which preserves the
    within-queue oldest-first prefix rule.  Equal-age ties go to the queue
    with the fewest ON servers (then lower index): scarce queues claim
    their contested servers before wide queues burn them, which is what
    keeps the schedule delay-dominant over the perfect-matching policy on
    coupled sample paths.  Because servable per-queue count vectors form a
    polymatroid and the per-packet weights delay+1 are nonincreasing
    within a queue, any within-class order reaches the same per-age-class
    service counts, so this greedy attains the maximum-weight schedule and
    serves a superset of the largest feasible set of globally-oldest
    packets.
    """
    n, m = conn.shape
    for r in range(m):
        match_r[r] = -1
    for i in range(n):
        served[i] = 0
        blocked[i] = False
    total = 0
    while total < m:
        best = -1
        best_a = _BIG
        best_w = m + 1
        for i in range(n):
            if blocked[i] or served[i] >= qlen[i] or served[i] >= per_queue_cap:
                continue
            a = buf[i, (qhead[i] + served[i]) % qcap]
            if a > best_a:
                continue
            w = 0
            for r in range(m):
                if conn[i, r] != 0:
                    w += 1
            if a < best_a or w < best_w:
                best_a = a
                best_w = w
                best = i
        if best < 0:
            break
        if _augment_one(conn, match_r, best, visited_q, visited_r, entry_s, parent_q, bfs_q):
            served[best] += 1
            total += 1
        else:
            blocked[best] = True
    return total


def _maxweight_schedule(
    conn,
    qlen,
    served,
    blocked,
    match_r,
    visited_q,
    visited_r,
    entry_s,
    parent_q,
    bfs_q,
):
    # Queue-length-weighted baseline: each granted server scores the
    # queue's length at the start of the slot; greedy by weight.
    n, m = conn.shape
    for r in range(m):
        match_r[r] = -1
    for i in range(n):
        served[i] = 0
        blocked[i] = False
    total = 0
    while total < m:
        best = -1
        best_w = 0
        for i in range(n):
            if blocked[i] or served[i] >= qlen[i]:
                continue
            w = qlen[i]
            if w > best_w:
                best_w = w
                best = i
        if best < 0:
            break
        if _augment_one(conn, match_r, best, visited_q, visited_r, entry_s, parent_q, bfs_q):
            served[best] += 1
            total += 1
        else:
            blocked[best] = True
    return total


def _fbs_enqueue_arrivals(
    t,
    arr_counts,
    fbs_h,
    fbs_n0,
    f_first,
    f_size,
    f_counts,
    f_state,
):
    # f_state: [head, count, capacity_overflow]; frames are a ring buffer.
    fcap = f_first.shape[0]
    n = arr_counts.shape[0]
    for i in range(n):
        for _ in range(arr_counts[i]):
            open_new = False
            if f_state[1] == 0:
                open_new = True
            else:
                last = (f_state[0] + f_state[1] - 1) % fcap
                if t - f_first[last] > fbs_h or f_size[last] >= fbs_n0:
                    open_new = True
            if open_new:
                if f_state[1] >= fcap:
                    f_state[2] = 1
                    return
                last = (f_state[0] + f_state[1]) % fcap
                f_first[last] = t
                f_size[last] = 0
                for k in range(n):
                    f_counts[last, k] = 0
                f_state[1] += 1
            last = (f_state[0] + f_state[1] - 1) % fcap
            f_size[last] += 1
            f_counts[last, i] += 1


def _decide_fbs(
    conn,
    served,
    f_first,
    f_size,
    f_counts,
    f_state,
    demands,
    match_r,
    visited_q,
    visited_r,
    entry_s,
    parent_q,
    bfs_q,
):
    # Serve the HOL frame in full or not at all; X_F=1 also when no frame
    # is pending (service capability, not actual service).
    n = conn.shape[0]
    for i in range(n):
        served[i] = 0
    if f_state[1] == 0:
        return 1
    fcap = f_first.shape[0]
    head = f_state[0] % fcap
    for i in range(n):
        demands[i] = f_counts[head, i]
    if _feasible_demands(conn, demands, match_r, visited_q, visited_r, entry_s, parent_q, bfs_q):
        for i in range(n):
            served[i] = demands[i]
        f_state[0] = (f_state[0] + 1) % fcap
        f_state[1] -= 1
        return 1
    return 0


def _decide_pm(conn, qlen, served, match_r, visited_q, visited_r, entry_s, parent_q, bfs_q):
    n = conn.shape[0]
    for i in range(n):
        served[i] = 0
    size = _max_cardinality(conn, match_r, visited_q, visited_r, entry_s, parent_q, bfs_q)
    if size < n:
        return 0
    for i in range(n):
        if qlen[i] > 0:
            served[i] = 1
    return 1


def _draw_arrivals(
    arr_kind,
    arr_L,
    arr_mu,
    arr_cdf0,
    arr_cdf1,
    arr_a01,
    arr_a10,
    mm_state,
    arr_counts,
    state,
):
    n = arr_counts.shape[0]
    for i in range(n):
        if arr_kind == 0:
            arr_counts[i] = arr_L if _u01(state) < arr_mu else 0
        elif arr_kind == 1:
            u = _u01(state)
            a = 0
            last = arr_cdf0.shape[0] - 1
            while a < last and u >= arr_cdf0[a]:
                a += 1
            arr_counts[i] = a
        else:
            u = _u01(state)
            a = 0
            if mm_state[i] == 0:
                last = arr_cdf0.shape[0] - 1
                while a < last and u >= arr_cdf0[a]:
                    a += 1
            else:
                last = arr_cdf1.shape[0] - 1
                while a < last and u >= arr_cdf1[a]:
                    a += 1
            arr_counts[i] = a
            if mm_state[i] == 0:
                if _u01(state) < arr_a01:
                    mm_state[i] = 1
            else:
                if _u01(state) < arr_a10:
                    mm_state[i] = 0


def _run_slots(
    n,
    horizon,
    warmup,
    gap,
    b_max,
    n_batches,
    policy_code,
    fbs_h,
    fbs_n0,
    p_on,
    on_kind,
    on_param,
    on_cdf,
    on_eq,
    off_kind,
    off_param,
    off_cdf,
    off_eq,
    arr_kind,
    arr_L,
    arr_mu,
    arr_cdf0,
    arr_cdf1,
    arr_a01,
    arr_a10,
    state,
    qcap,
    viol,
    samples,
    x_bits,
    tallies,
):
    """Single-replication slot engine.

    Per-slot order: channel step, arrivals (framed immediately under FBS),
    W(t) sample, policy decision, service.  Outputs land in the
    pre-allocated arrays:

    * ``viol[batch, b]``: samples with W > b, per sample batch;
    * ``samples[batch]``: sample count per batch;
    * ``x_bits``: [X successes, X opportunities] for FBS/PM;
    * ``tallies``: [arrived, served, backlog@mid, backlog@end,
      queue-length slot sum, overflow flag, max W seen].
    """
    m = n
    phase = np.zeros((n, m), np.int8)
    residual = np.zeros((n, m), np.int64)
    conn = np.zeros((n, m), np.uint8)
    buf = np.zeros((n, qcap), np.int64)
    qhead = np.zeros(n, np.int64)
    qlen = np.zeros(n, np.int64)
    served = np.zeros(n, np.int64)
    demands = np.zeros(n, np.int64)
    blocked = np.zeros(n, np.bool_)
    arr_counts = np.zeros(n, np.int64)
    mm_state = np.zeros(n, np.int8)
    match_r = np.zeros(m, np.int64)
    visited_q = np.zeros(n, np.bool_)
    visited_r = np.zeros(m, np.bool_)
    entry_s = np.zeros(n, np.int64)
    parent_q = np.zeros(m, np.int64)
    bfs_q = np.zeros(n, np.int64)
    fcap = qcap
    f_first = np.zeros(fcap, np.int64)
    f_size = np.zeros(fcap, np.int64)
    f_counts = np.zeros((fcap, n), np.int64)
    f_state = np.zeros(3, np.int64)

    if arr_kind == 2:
        pi1 = arr_a01 / (arr_a01 + arr_a10)
        for i in range(n):
            mm_state[i] = 1 if _u01(state) < pi1 else 0

    _channel_init_equilibrium(
        phase, residual, p_on, on_kind, on_param, on_eq, off_kind, off_param, off_eq, state
    )

    total_samples = (horizon - warmup + gap - 1) // gap
    if total_samples < 1:
        total_samples = 1
    sample_idx = 0

    for t in range(horizon):
        _channel_step(
            phase, residual, conn, on_kind, on_param, on_cdf, off_kind, off_param, off_cdf, state
        )
        _draw_arrivals(
            arr_kind, arr_L, arr_mu, arr_cdf0, arr_cdf1, arr_a01, arr_a10, mm_state, arr_counts, state
        )
        for i in range(n):
            if qlen[i] + arr_counts[i] > qcap:
                tallies[5] = 1
                return
            for _ in range(arr_counts[i]):
                buf[i, (qhead[i] + qlen[i]) % qcap] = t
                qlen[i] += 1
            tallies[0] += arr_counts[i]
        if policy_code == 2:
            _fbs_enqueue_arrivals(t, arr_counts, fbs_h, fbs_n0, f_first, f_size, f_counts, f_state)
            if f_state[2] != 0:
                tallies[5] = 1
                return

        if t >= warmup and (t - warmup) % gap == 0:
            w = 0
            for i in range(n):
                if qlen[i] > 0:
                    age = t - buf[i, qhead[i] % qcap]
                    if age > w:
                        w = age
            batch = sample_idx * n_batches // total_samples
            if batch >= n_batches:
                batch = n_batches - 1
            top = w if w <= b_max + 1 else b_max + 1
            for b in range(top):
                viol[batch, b] += 1
            samples[batch] += 1
            sample_idx += 1
            if w > tallies[6]:
                tallies[6] = w

        if policy_code == 0 or policy_code == 1:
            cap = n if policy_code == 1 else m
            _greedy_prefix_schedule(
                t, conn, buf, qhead, qlen, qcap, cap, served, blocked,
                match_r, visited_q, visited_r, entry_s, parent_q, bfs_q,
            )
        elif policy_code == 2:
            bit = _decide_fbs(
                conn, served, f_first, f_size, f_counts, f_state, demands,
                match_r, visited_q, visited_r, entry_s, parent_q, bfs_q,
            )
            if t >= warmup:
                x_bits[0] += bit
                x_bits[1] += 1
        elif policy_code == 3:
            bit = _decide_pm(
                conn, qlen, served, match_r, visited_q, visited_r, entry_s, parent_q, bfs_q
            )
            if t >= warmup:
                x_bits[0] += bit
                x_bits[1] += 1
        else:
            _maxweight_schedule(
                conn, qlen, served, blocked, match_r, visited_q, visited_r, entry_s, parent_q, bfs_q
            )

        for i in range(n):
            if served[i] > 0:
                qhead[i] = (qhead[i] + served[i]) % qcap
                qlen[i] -= served[i]
                tallies[1] += served[i]
        backlog = 0
        for i in range(n):
            backlog += qlen[i]
        if t >= warmup:
            tallies[4] += backlog
        if t == horizon // 2:
            tallies[2] = backlog
    backlog = 0
    for i in range(n):
        backlog += qlen[i]
    tallies[3] = backlog


def _backlog_profile(buf, qhead, qlen, qcap, out):
    """Flatten all backlog arrival slots into out[:total]; returns total."""
    n = qlen.shape[0]
    k = 0
    for i in range(n):
        for r in range(qlen[i]):
            out[k] = buf[i, (qhead[i] + r) % qcap]
            k += 1
    return k


def _profile_dominates(sorted_y, by, sorted_x, bx):
    """True when remaining backlog Y is dominated by X at every arrival-slot
    threshold: #Y-packets arrived <= s never exceeds #X-packets arrived <= s."""
    if by > bx:
        return False
    for k in range(by):
        if sorted_y[k] < sorted_x[k]:
            return False
    return True


def _run_coupled(
    n,
    horizon,
    fbs_h,
    fbs_n0,
    p_on,
    on_kind,
    on_param,
    on_cdf,
    on_eq,
    off_kind,
    off_param,
    off_cdf,
    off_eq,
    arr_kind,
    arr_L,
    arr_mu,
    arr_cdf0,
    arr_cdf1,
    arr_a01,
    arr_a10,
    state,
    qcap,
    viol_counts,
    first_viol,
):
    """Coupled sample-path run of OPF, DWM, FBS and PM on shared arrival and
    channel streams, checking service dominance each slot.

    Two granularities per pair, pairs ordered (OPF,FBS), (OPF,PM),
    (DWM,FBS), (DWM,PM):

    * slots 0..3 of ``viol_counts``: delay dominance W_Y(t) <= W_X(t) --
      the property the rate-function argument consumes;
    * slots 4..7: the stricter remaining-backlog profile dominance at
      every arrival-slot threshold (diagnostic; equal-age batch ties can
      concentrate an old cohort in one queue and break it against PM even
      though W stays dominated).

    ``first_viol`` records the first offending slot per entry.  Returns 1
    on queue overflow, else 0.
    """
    m = n
    npol = 4
    phase = np.zeros((n, m), np.int8)
    residual = np.zeros((n, m), np.int64)
    conn = np.zeros((n, m), np.uint8)
    buf = np.zeros((npol, n, qcap), np.int64)
    qhead = np.zeros((npol, n), np.int64)
    qlen = np.zeros((npol, n), np.int64)
    served = np.zeros(n, np.int64)
    demands = np.zeros(n, np.int64)
    blocked = np.zeros(n, np.bool_)
    arr_counts = np.zeros(n, np.int64)
    mm_state = np.zeros(n, np.int8)
    match_r = np.zeros(m, np.int64)
    visited_q = np.zeros(n, np.bool_)
    visited_r = np.zeros(m, np.bool_)
    entry_s = np.zeros(n, np.int64)
    parent_q = np.zeros(m, np.int64)
    bfs_q = np.zeros(n, np.int64)
    fcap = qcap
    f_first = np.zeros(fcap, np.int64)
    f_size = np.zeros(fcap, np.int64)
    f_counts = np.zeros((fcap, n), np.int64)
    f_state = np.zeros(3, np.int64)
    prof = np.zeros((npol, n * qcap), np.int64)
    sizes = np.zeros(npol, np.int64)

    if arr_kind == 2:
        pi1 = arr_a01 / (arr_a01 + arr_a10)
        for i in range(n):
            mm_state[i] = 1 if _u01(state) < pi1 else 0

    _channel_init_equilibrium(
        phase, residual, p_on, on_kind, on_param, on_eq, off_kind, off_param, off_eq, state
    )

    for t in range(horizon):
        _channel_step(
            phase, residual, conn, on_kind, on_param, on_cdf, off_kind, off_param, off_cdf, state
        )
        _draw_arrivals(
            arr_kind, arr_L, arr_mu, arr_cdf0, arr_cdf1, arr_a01, arr_a10, mm_state, arr_counts, state
        )
        for p in range(npol):
            for i in range(n):
                if qlen[p, i] + arr_counts[i] > qcap:
                    return 1
                for _ in range(arr_counts[i]):
                    buf[p, i, (qhead[p, i] + qlen[p, i]) % qcap] = t
                    qlen[p, i] += 1
        _fbs_enqueue_arrivals(t, arr_counts, fbs_h, fbs_n0, f_first, f_size, f_counts, f_state)
        if f_state[2] != 0:
            return 1

        for p in range(npol):
            if p == 0 or p == 1:
                cap = n if p == 1 else m
                _greedy_prefix_schedule(
                    t, conn, buf[p], qhead[p], qlen[p], qcap, cap, served, blocked,
                    match_r, visited_q, visited_r, entry_s, parent_q, bfs_q,
                )
            elif p == 2:
                _decide_fbs(
                    conn, served, f_first, f_size, f_counts, f_state, demands,
                    match_r, visited_q, visited_r, entry_s, parent_q, bfs_q,
                )
            else:
                _decide_pm(
                    conn, qlen[p], served, match_r, visited_q, visited_r, entry_s, parent_q, bfs_q
                )
            for i in range(n):
                if served[i] > 0:
                    qhead[p, i] = (qhead[p, i] + served[i]) % qcap
                    qlen[p, i] -= served[i]

        for p in range(npol):
            sizes[p] = _backlog_profile(buf[p], qhead[p], qlen[p], qcap, prof[p])
            tmp = np.sort(prof[p, : sizes[p]])
            for k in range(sizes[p]):
                prof[p, k] = tmp[k]
        pair = 0
        for y in range(2):
            for x in range(2, 4):
                wy = t - prof[y, 0] if sizes[y] > 0 else 0
                wx = t - prof[x, 0] if sizes[x] > 0 else 0
                if wy > wx:
                    viol_counts[pair] += 1
                    if first_viol[pair] < 0:
                        first_viol[pair] = t
                if not _profile_dominates(prof[y], sizes[y], prof[x], sizes[x]):
                    viol_counts[4 + pair] += 1
                    if first_viol[4 + pair] < 0:
                        first_viol[4 + pair] = t
                pair += 1
    return 0


def _channel_off_samples(n_cells, on_kind, on_param, on_cdf, on_eq, off_kind, off_param, off_cdf, off_eq, p_on, state):
    """Equilibrium-initialize ``n_cells`` independent channels, emit one slot
    each, and return the number observed OFF (iid draws from the stationary
    law, so a plain binomial band applies)."""
    offs = 0
    phase = np.zeros((1, 1), np.int8)
    residual = np.zeros((1, 1), np.int64)
    conn = np.zeros((1, 1), np.uint8)
    for _ in range(n_cells):
        _channel_init_equilibrium(
            phase, residual, p_on, on_kind, on_param, on_eq, off_kind, off_param, off_eq, state
        )
        _channel_step(
            phase, residual, conn, on_kind, on_param, on_cdf, off_kind, off_param, off_cdf, state
        )
        if conn[0, 0] == 0:
            offs += 1
    return offs


# jit-compiled entry points (inner helpers compile transitively under numba;
# under the numpy backend they run as-is).
maybe_jit = jit
_next_u64 = maybe_jit(_next_u64)
_u01 = maybe_jit(_u01)
_sample_period = maybe_jit(_sample_period)
_sample_equilibrium_residual = maybe_jit(_sample_equilibrium_residual)
_channel_init_equilibrium = maybe_jit(_channel_init_equilibrium)
_channel_step = maybe_jit(_channel_step)
_augment_one = maybe_jit(_augment_one)
_max_cardinality = maybe_jit(_max_cardinality)
_feasible_demands = maybe_jit(_feasible_demands)
_assignment_min_cost = maybe_jit(_assignment_min_cost)
_greedy_prefix_schedule = maybe_jit(_greedy_prefix_schedule)
_maxweight_schedule = maybe_jit(_maxweight_schedule)
_fbs_enqueue_arrivals = maybe_jit(_fbs_enqueue_arrivals)
_decide_fbs = maybe_jit(_decide_fbs)
_decide_pm = maybe_jit(_decide_pm)
_draw_arrivals = maybe_jit(_draw_arrivals)
_run_slots = maybe_jit(_run_slots)
_backlog_profile = maybe_jit(_backlog_profile)
_profile_dominates = maybe_jit(_profile_dominates)
_run_coupled = maybe_jit(_run_coupled)
_channel_off_samples = maybe_jit(_channel_off_samples)
