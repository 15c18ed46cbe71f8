# cython: language_level=3
"""Compiled discrete-event kernel.

Transliteration of ``_core_py.py`` with identical state machine and
float operation order; the two backends must return bit-identical
results.  Keep them in lockstep when editing.
"""

from libc.math cimport INFINITY

# modes
cdef int WORK_REG = 0
cdef int CKPT_REG = 1
cdef int CKPT_EXTRA = 2
cdef int EPS_IDLE = 3
cdef int WORK_PRO = 4
cdef int CKPT_PRO = 5
cdef int DOWN = 6
cdef int RECOVER = 7

# occurrence types
cdef int OCC_FAULT = 0

# strategy codes
cdef int S_YOUNG = 0
cdef int S_EXACT = 1
cdef int S_INSTANT = 2
cdef int S_NO_CKPT = 3
cdef int S_WITH_CKPT = 4

STATUS_DONE = 0
STATUS_STALLED = 1

BACKEND_NAME = "cython"


def simulate_run(int strategy, double base_work, double c, double d,
                 double rr, double t_r, double t_p, double window, double q,
                 double[::1] occ_t, signed char[::1] occ_type,
                 signed char[::1] occ_pred, double[::1] occ_win,
                 double[::1] occ_u, double guard_time):
    """See ``_core_py.simulate_run`` for the contract."""
    cdef Py_ssize_t n = occ_t.shape[0]
    cdef double inf = INFINITY
    cdef long n_pro_periods = int(round(window / t_p)) if t_p > 0.0 else 0

    cdef double t = 0.0
    cdef double seg = 0.0
    cdef double w_reg = 0.0
    cdef double snap_w = 0.0
    cdef double remaining = base_work
    cdef double lost = 0.0
    cdef double ckpt_time = 0.0
    cdef double idle = 0.0
    cdef double down_acc = 0.0
    cdef double rec_acc = 0.0
    cdef double last_protect = 0.0
    cdef double pend_t0 = -inf
    cdef double win_end = -inf
    cdef long pro_left = 0
    cdef bint fin = False
    cdef bint period_full = False
    cdef Py_ssize_t k = 0
    cdef int status = 0

    cdef long n_faults = 0
    cdef long n_pred_faults = 0
    cdef long n_unpred_faults = 0
    cdef long n_true_ann = 0
    cdef long n_false_ann = 0
    cdef long n_trusted = 0
    cdef long n_untrusted = 0
    cdef long n_dropped = 0
    cdef long n_ckpt_reg = 0
    cdef long n_ckpt_extra = 0
    cdef long n_ckpt_pro = 0
    cdef long n_rollbacks = 0
    cdef long n_dr_restarts = 0

    cdef double room, planned, act_end, u_t, dt, new_t, t0
    cdef int mode, was
    cdef bint busy

    # first regular stint
    room = t_r - c - w_reg
    if room < 0.0:
        room = 0.0
    if remaining <= room:
        planned = remaining
        fin = True
        period_full = remaining == room
    else:
        planned = room
        fin = False
        period_full = True
    mode = WORK_REG
    act_end = t + planned

    while True:
        if t > guard_time:
            status = 1
            break
        u_t = occ_t[k] if k < n else inf

        if act_end <= u_t:
            # ----- internal milestone
            dt = act_end - t
            if mode == WORK_REG:
                seg += dt
                w_reg += dt
                if fin:
                    remaining = 0.0
                else:
                    remaining -= dt
                t = act_end
                mode = CKPT_REG
                act_end = t + c
            elif mode == WORK_PRO:
                seg += dt
                if fin:
                    remaining = 0.0
                else:
                    remaining -= dt
                t = act_end
                if strategy == S_WITH_CKPT or fin:
                    mode = CKPT_PRO if strategy == S_WITH_CKPT else CKPT_REG
                    act_end = t + c
                else:
                    # window exhausted without a fault: back to regular work
                    win_end = -inf
                    room = t_r - c - w_reg
                    if room < 0.0:
                        room = 0.0
                    if remaining <= room:
                        planned = remaining
                        fin = True
                        period_full = remaining == room
                    else:
                        planned = room
                        fin = False
                        period_full = True
                    mode = WORK_REG
                    act_end = t + planned
            elif mode == CKPT_REG or mode == CKPT_EXTRA or mode == CKPT_PRO:
                ckpt_time += dt
                t = act_end
                seg = 0.0
                was = mode
                if was == CKPT_REG:
                    n_ckpt_reg += 1
                    if period_full:
                        w_reg = 0.0
                        period_full = False
                elif was == CKPT_EXTRA:
                    n_ckpt_extra += 1
                else:
                    n_ckpt_pro += 1
                snap_w = w_reg
                last_protect = t
                if remaining == 0.0:
                    break  # job complete, final checkpoint taken
                if was == CKPT_REG:
                    if pend_t0 >= 0.0:
                        mode = EPS_IDLE
                        act_end = pend_t0
                    else:
                        room = t_r - c - w_reg
                        if room < 0.0:
                            room = 0.0
                        if remaining <= room:
                            planned = remaining
                            fin = True
                            period_full = remaining == room
                        else:
                            planned = room
                            fin = False
                            period_full = True
                        mode = WORK_REG
                        act_end = t + planned
                elif was == CKPT_EXTRA:
                    # window opens now
                    pend_t0 = -inf
                    if strategy == S_EXACT or strategy == S_INSTANT:
                        room = t_r - c - w_reg
                        if room < 0.0:
                            room = 0.0
                        if remaining <= room:
                            planned = remaining
                            fin = True
                            period_full = remaining == room
                        else:
                            planned = room
                            fin = False
                            period_full = True
                        mode = WORK_REG
                        act_end = t + planned
                    elif strategy == S_NO_CKPT:
                        win_end = t + window
                        room = win_end - t
                        if remaining <= room:
                            planned = remaining
                            fin = True
                        else:
                            planned = room
                            fin = False
                        mode = WORK_PRO
                        act_end = t + planned
                    else:  # S_WITH_CKPT
                        pro_left = n_pro_periods
                        room = t_p - c
                        if room < 0.0:
                            room = 0.0
                        if remaining <= room:
                            planned = remaining
                            fin = True
                        else:
                            planned = room
                            fin = False
                        mode = WORK_PRO
                        act_end = t + planned
                else:  # CKPT_PRO completed
                    pro_left -= 1
                    if pro_left <= 0:
                        win_end = -inf
                        room = t_r - c - w_reg
                        if room < 0.0:
                            room = 0.0
                        if remaining <= room:
                            planned = remaining
                            fin = True
                            period_full = remaining == room
                        else:
                            planned = room
                            fin = False
                            period_full = True
                        mode = WORK_REG
                        act_end = t + planned
                    else:
                        room = t_p - c
                        if room < 0.0:
                            room = 0.0
                        if remaining <= room:
                            planned = remaining
                            fin = True
                        else:
                            planned = room
                            fin = False
                        mode = WORK_PRO
                        act_end = t + planned
            elif mode == EPS_IDLE:
                idle += dt
                t = act_end
                # window opens now (no fresh work to protect)
                pend_t0 = -inf
                if strategy == S_EXACT or strategy == S_INSTANT:
                    room = t_r - c - w_reg
                    if room < 0.0:
                        room = 0.0
                    if remaining <= room:
                        planned = remaining
                        fin = True
                        period_full = remaining == room
                    else:
                        planned = room
                        fin = False
                        period_full = True
                    mode = WORK_REG
                    act_end = t + planned
                elif strategy == S_NO_CKPT:
                    win_end = t + window
                    room = win_end - t
                    if remaining <= room:
                        planned = remaining
                        fin = True
                    else:
                        planned = room
                        fin = False
                    mode = WORK_PRO
                    act_end = t + planned
                else:
                    pro_left = n_pro_periods
                    room = t_p - c
                    if room < 0.0:
                        room = 0.0
                    if remaining <= room:
                        planned = remaining
                        fin = True
                    else:
                        planned = room
                        fin = False
                    mode = WORK_PRO
                    act_end = t + planned
            elif mode == DOWN:
                down_acc += dt
                t = act_end
                mode = RECOVER
                act_end = t + rr
            else:  # RECOVER
                rec_acc += dt
                t = act_end
                last_protect = t
                room = t_r - c - w_reg
                if room < 0.0:
                    room = 0.0
                if remaining <= room:
                    planned = remaining
                    fin = True
                    period_full = remaining == room
                else:
                    planned = room
                    fin = False
                    period_full = True
                mode = WORK_REG
                act_end = t + planned
        else:
            # ----- trace occurrence (may predate t only for pre-run
            # announcements, which advance nothing)
            new_t = u_t if u_t > t else t
            dt = new_t - t
            if dt > 0.0:
                if mode == WORK_REG:
                    seg += dt
                    w_reg += dt
                    remaining -= dt
                elif mode == WORK_PRO:
                    seg += dt
                    remaining -= dt
                elif mode == CKPT_REG or mode == CKPT_EXTRA or mode == CKPT_PRO:
                    ckpt_time += dt
                elif mode == EPS_IDLE:
                    idle += dt
                elif mode == DOWN:
                    down_acc += dt
                else:
                    rec_acc += dt
                t = new_t

            if occ_type[k] == OCC_FAULT:
                n_faults += 1
                if occ_pred[k] != 0:
                    n_pred_faults += 1
                else:
                    n_unpred_faults += 1
                if mode == DOWN:
                    n_dr_restarts += 1
                    act_end = t + d
                elif mode == RECOVER:
                    n_dr_restarts += 1
                    mode = DOWN
                    act_end = t + d
                else:
                    lost += seg
                    remaining += seg
                    seg = 0.0
                    w_reg = snap_w
                    pend_t0 = -inf
                    win_end = -inf
                    pro_left = 0
                    n_rollbacks += 1
                    mode = DOWN
                    act_end = t + d
            else:
                if occ_pred[k] != 0:
                    n_true_ann += 1
                else:
                    n_false_ann += 1
                t0 = occ_win[k]
                busy = (mode != WORK_REG and mode != CKPT_REG) or pend_t0 >= 0.0
                if busy or t0 <= t:
                    n_dropped += 1
                elif occ_u[k] >= q:
                    n_untrusted += 1
                else:
                    n_trusted += 1
                    if mode == WORK_REG:
                        if last_protect < t:
                            # squeeze in a checkpoint ending at the window start
                            pend_t0 = t0
                            mode = CKPT_EXTRA
                            act_end = t0
                        else:
                            # nothing new to protect: idle out the lead time
                            pend_t0 = t0
                            mode = EPS_IDLE
                            act_end = t0
                    else:
                        # mid-checkpoint: let it finish, idle until the window
                        pend_t0 = t0
            k += 1

    useful = base_work - remaining
    return (
        status, t, lost, ckpt_time, idle, down_acc, rec_acc,
        (n_faults, n_pred_faults, n_unpred_faults, n_true_ann, n_false_ann,
         n_trusted, n_untrusted, n_dropped, n_ckpt_reg, n_ckpt_extra,
         n_ckpt_pro, n_rollbacks, n_dr_restarts),
        useful,
    )
