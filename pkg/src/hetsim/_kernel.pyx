# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event-loop kernel for the four built-in scheduling policies.

Must stay observably identical to the pure-Python engine: same event order
(time, class, insertion counter), same queue semantics, same tie-breaks.
The pure engine's module docstring is the semantics reference; the test
suite cross-checks both backends trace-for-trace.
"""

import numpy as np

# event classes (heap priority within one timestamp)
cdef long long EV_COMPLETION = 0
cdef long long EV_DEADLINE = 1
cdef long long EV_ARRIVAL = 2

# policy codes
cdef long long P_FCFS = 0
cdef long long P_FCFS_NQ = 1
cdef long long P_MECT = 2
cdef long long P_MEET = 3

# task bookkeeping
cdef long long T_NONE = 0
cdef long long T_HELD = 1
cdef long long T_RUNNING = 2
cdef long long T_RESOLVED = 3

# result status codes (mapped to TaskStatus by the wrapper)
cdef long long S_COMPLETED = 0
cdef long long S_REJECTED = 1
cdef long long S_DROPPED = 2
cdef long long S_CANCELLED = 3

cdef long long MIN_HORIZON = 1_000_000


cdef struct Heap:
    long long* time
    long long* cls
    long long* cnt
    long long* pay1
    long long* pay2
    long long n


cdef inline bint _ev_less(Heap* h, long long a, long long b) noexcept nogil:
    if h.time[a] != h.time[b]:
        return h.time[a] < h.time[b]
    if h.cls[a] != h.cls[b]:
        return h.cls[a] < h.cls[b]
    return h.cnt[a] < h.cnt[b]


cdef inline void _swap(Heap* h, long long a, long long b) noexcept nogil:
    h.time[a], h.time[b] = h.time[b], h.time[a]
    h.cls[a], h.cls[b] = h.cls[b], h.cls[a]
    h.cnt[a], h.cnt[b] = h.cnt[b], h.cnt[a]
    h.pay1[a], h.pay1[b] = h.pay1[b], h.pay1[a]
    h.pay2[a], h.pay2[b] = h.pay2[b], h.pay2[a]


cdef inline void _heap_push(Heap* h, long long time, long long cls, long long cnt,
                            long long pay1, long long pay2) noexcept nogil:
    cdef long long i = h.n, parent
    h.time[i] = time
    h.cls[i] = cls
    h.cnt[i] = cnt
    h.pay1[i] = pay1
    h.pay2[i] = pay2
    h.n += 1
    while i > 0:
        parent = (i - 1) >> 1
        if _ev_less(h, i, parent):
            _swap(h, i, parent)
            i = parent
        else:
            break


cdef inline void _heap_pop(Heap* h) noexcept nogil:
    # caller reads slot 0 before calling
    cdef long long i = 0, child
    h.n -= 1
    if h.n == 0:
        return
    _swap(h, 0, h.n)
    while True:
        child = 2 * i + 1
        if child >= h.n:
            break
        if child + 1 < h.n and _ev_less(h, child + 1, child):
            child += 1
        if _ev_less(h, child, i):
            _swap(h, child, i)
            i = child
        else:
            break


def simulate(
    long long[::1] task_type,     # per task: 0-based type index, in workload order
    long long[::1] arrival,
    long long[::1] deadline,
    long long[::1] eet,           # flat [type_index * n_machines + machine]
    signed char[::1] meet_mask,   # flat, 1 where machine type has the min EET
    long long n_machines,
    long long policy,
):
    """Run one simulation; returns plain arrays for the wrapper to assemble."""
    cdef long long T = task_type.shape[0]
    cdef long long M = n_machines

    status_arr = np.full(T, -1, dtype=np.int64)
    machine_arr = np.full(T, -1, dtype=np.int64)
    start_arr = np.full(T, -1, dtype=np.int64)
    finish_arr = np.full(T, -1, dtype=np.int64)
    iv_machine_arr = np.empty(T, dtype=np.int64)
    iv_start_arr = np.empty(T, dtype=np.int64)
    iv_end_arr = np.empty(T, dtype=np.int64)
    iv_seq_arr = np.empty(T, dtype=np.int64)
    iv_done_arr = np.empty(T, dtype=np.int64)

    cdef long long[::1] status = status_arr
    cdef long long[::1] machine = machine_arr
    cdef long long[::1] start = start_arr
    cdef long long[::1] finish = finish_arr
    cdef long long[::1] iv_machine = iv_machine_arr
    cdef long long[::1] iv_start = iv_start_arr
    cdef long long[::1] iv_end = iv_end_arr
    cdef long long[::1] iv_seq = iv_seq_arr
    cdef long long[::1] iv_done = iv_done_arr
    cdef long long iv_n = 0

    # machine state; queue slot M is the FCFS central queue
    cur_task_arr = np.full(M, -1, dtype=np.int64)
    cur_start_arr = np.zeros(M, dtype=np.int64)
    busy_until_arr = np.zeros(M, dtype=np.int64)
    pending_work_arr = np.zeros(M, dtype=np.int64)
    qhead_arr = np.full(M + 1, -1, dtype=np.int64)
    qtail_arr = np.full(M + 1, -1, dtype=np.int64)
    cdef long long[::1] cur_task = cur_task_arr
    cdef long long[::1] cur_start = cur_start_arr
    cdef long long[::1] busy_until = busy_until_arr
    cdef long long[::1] pending_work = pending_work_arr
    cdef long long[::1] qhead = qhead_arr
    cdef long long[::1] qtail = qtail_arr

    # task state; a task sits in at most one queue over its lifetime
    tstate_arr = np.zeros(max(T, 1), dtype=np.int64)
    held_on_arr = np.full(max(T, 1), -1, dtype=np.int64)  # queue slot / running machine
    next_link_arr = np.full(max(T, 1), -1, dtype=np.int64)
    cdef long long[::1] tstate = tstate_arr
    cdef long long[::1] held_on = held_on_arr
    cdef long long[::1] next_link = next_link_arr

    # event heap: at most T arrivals + T deadline checks + T completions
    cdef long long cap = 3 * T + 8
    hp_time_arr = np.empty(cap, dtype=np.int64)
    hp_cls_arr = np.empty(cap, dtype=np.int64)
    hp_cnt_arr = np.empty(cap, dtype=np.int64)
    hp_pay1_arr = np.empty(cap, dtype=np.int64)
    hp_pay2_arr = np.empty(cap, dtype=np.int64)
    cdef long long[::1] hp_time = hp_time_arr
    cdef long long[::1] hp_cls = hp_cls_arr
    cdef long long[::1] hp_cnt = hp_cnt_arr
    cdef long long[::1] hp_pay1 = hp_pay1_arr
    cdef long long[::1] hp_pay2 = hp_pay2_arr

    cdef Heap heap
    heap.time = &hp_time[0]
    heap.cls = &hp_cls[0]
    heap.cnt = &hp_cnt[0]
    heap.pay1 = &hp_pay1[0]
    heap.pay2 = &hp_pay2[0]
    heap.n = 0

    cdef long long counter = 0, last_event = 0
    cdef long long t, m, seq, now, cls, p1, p2, q, best, best_metric, metric, chosen, freed

    for t in range(T):
        _heap_push(&heap, arrival[t], EV_ARRIVAL, counter, t, -1)
        counter += 1

    while heap.n > 0:
        now = heap.time[0]
        cls = heap.cls[0]
        p1 = heap.pay1[0]
        p2 = heap.pay2[0]
        _heap_pop(&heap)
        freed = -1

        if cls == EV_COMPLETION:
            m = p1
            seq = p2
            if cur_task[m] != seq:
                continue  # stale event of a cancelled task; not a processed event
            last_event = now
            iv_machine[iv_n] = m
            iv_start[iv_n] = cur_start[m]
            iv_end[iv_n] = now
            iv_seq[iv_n] = seq
            iv_done[iv_n] = 1
            iv_n += 1
            status[seq] = S_COMPLETED
            machine[seq] = m
            start[seq] = cur_start[m]
            finish[seq] = now
            tstate[seq] = T_RESOLVED
            cur_task[m] = -1
            busy_until[m] = now
            freed = m

        elif cls == EV_DEADLINE:
            last_event = now
            seq = p1
            if tstate[seq] == T_RESOLVED:
                continue
            if tstate[seq] == T_HELD:
                # unlinked lazily at pop time; release its backlog share now
                if policy == P_MECT or policy == P_MEET:
                    pending_work[held_on[seq]] -= eet[task_type[seq] * M + held_on[seq]]
                status[seq] = S_DROPPED
                finish[seq] = now
                tstate[seq] = T_RESOLVED
            else:  # running: cancel at the deadline
                m = held_on[seq]
                iv_machine[iv_n] = m
                iv_start[iv_n] = cur_start[m]
                iv_end[iv_n] = now
                iv_seq[iv_n] = seq
                iv_done[iv_n] = 0
                iv_n += 1
                status[seq] = S_CANCELLED
                machine[seq] = m
                start[seq] = cur_start[m]
                finish[seq] = now
                tstate[seq] = T_RESOLVED
                cur_task[m] = -1
                busy_until[m] = now
                freed = m

        else:  # EV_ARRIVAL
            last_event = now
            seq = p1
            _heap_push(&heap, deadline[seq], EV_DEADLINE, counter, seq, -1)
            counter += 1

            chosen = -1
            if policy == P_FCFS or policy == P_FCFS_NQ:
                for m in range(M):
                    if cur_task[m] < 0:
                        chosen = m
                        break
                if chosen < 0:
                    if policy == P_FCFS:
                        q = M  # central FIFO
                        if qtail[q] < 0:
                            qhead[q] = seq
                        else:
                            next_link[qtail[q]] = seq
                        qtail[q] = seq
                        next_link[seq] = -1
                        tstate[seq] = T_HELD
                        held_on[seq] = q
                    else:
                        status[seq] = S_REJECTED
                        tstate[seq] = T_RESOLVED
            elif policy == P_MECT:
                best = -1
                best_metric = 0
                for m in range(M):
                    metric = busy_until[m]
                    if metric < now:
                        metric = now
                    metric += pending_work[m] + eet[task_type[seq] * M + m]
                    if best < 0 or metric < best_metric:
                        best = m
                        best_metric = metric
                chosen = best
            else:  # P_MEET
                best = -1
                best_metric = 0
                for m in range(M):
                    if not meet_mask[task_type[seq] * M + m]:
                        continue
                    metric = busy_until[m]
                    if metric < now:
                        metric = now
                    metric += pending_work[m]
                    if best < 0 or metric < best_metric:
                        best = m
                        best_metric = metric
                chosen = best

            if chosen >= 0:
                m = chosen
                if cur_task[m] < 0:
                    cur_task[m] = seq
                    cur_start[m] = now
                    busy_until[m] = now + eet[task_type[seq] * M + m]
                    tstate[seq] = T_RUNNING
                    held_on[seq] = m
                    _heap_push(&heap, busy_until[m], EV_COMPLETION, counter, m, seq)
                    counter += 1
                else:
                    # MECT/MEET may target a busy machine: pending FIFO
                    if qtail[m] < 0:
                        qhead[m] = seq
                    else:
                        next_link[qtail[m]] = seq
                    qtail[m] = seq
                    next_link[seq] = -1
                    tstate[seq] = T_HELD
                    held_on[seq] = m
                    pending_work[m] += eet[task_type[seq] * M + m]

        if freed >= 0 and policy != P_FCFS_NQ:
            # feed the freed machine from its queue; stale heads are dropped
            m = freed
            q = M if policy == P_FCFS else m
            while qhead[q] >= 0:
                seq = qhead[q]
                qhead[q] = next_link[seq]
                if qhead[q] < 0:
                    qtail[q] = -1
                if tstate[seq] != T_HELD:
                    continue  # expired earlier; already resolved and accounted
                if policy != P_FCFS:
                    pending_work[m] -= eet[task_type[seq] * M + m]
                if deadline[seq] <= now:
                    status[seq] = S_DROPPED
                    finish[seq] = deadline[seq]
                    tstate[seq] = T_RESOLVED
                    continue
                cur_task[m] = seq
                cur_start[m] = now
                busy_until[m] = now + eet[task_type[seq] * M + m]
                tstate[seq] = T_RUNNING
                held_on[seq] = m
                _heap_push(&heap, busy_until[m], EV_COMPLETION, counter, m, seq)
                counter += 1
                break

    horizon = max(MIN_HORIZON, last_event)
    return (
        status_arr,
        machine_arr,
        start_arr,
        finish_arr,
        iv_machine_arr[:iv_n],
        iv_start_arr[:iv_n],
        iv_end_arr[:iv_n],
        iv_seq_arr[:iv_n],
        iv_done_arr[:iv_n],
        horizon,
        busy_until_arr,
    )
