"""Pure-Python discrete-event kernel.

This module and ``_core.pyx`` implement the same state machine with the
same floating-point operations in the same order; results are expected
to agree bit for bit.  Keep the two in lockstep when editing.

The kernel walks a pre-sorted list of occurrences (faults and
prediction announcements) interleaved with self-scheduled milestones
(work-stint ends, checkpoint ends, window deadlines, downtime and
recovery ends).  Ties between an internal milestone and an occurrence
go to the milestone, so a checkpoint scheduled to complete exactly when
a predicted fault strikes commits first; that coincidence is the whole
point of proactive checkpointing.

All trust coins are pre-drawn (one uniform per prediction), so the
kernel itself is deterministic.
"""

from __future__ import annotations

import math

# modes
WORK_REG = 0
CKPT_REG = 1
CKPT_EXTRA = 2
EPS_IDLE = 3
WORK_PRO = 4
CKPT_PRO = 5
DOWN = 6
RECOVER = 7

# occurrence types
OCC_FAULT = 0
OCC_ANN = 1

# strategy codes (see ckptsim.strategies.KERNEL_CODE)
S_YOUNG = 0
S_EXACT = 1
S_INSTANT = 2
S_NO_CKPT = 3
S_WITH_CKPT = 4

STATUS_DONE = 0
STATUS_STALLED = 1

BACKEND_NAME = "python"


def simulate_run(strategy, base_work, c, d, rr, t_r, t_p, window, q,
                 occ_t, occ_type, occ_pred, occ_win, occ_u, guard_time):
    """Run one job to completion against one occurrence stream.

    Returns (status, makespan, lost, ckpt_time, idle, down, rec,
    counters) with counters a 13-tuple of ints; see the driver for field
    names.  Times are seconds; occ_* are equal-length sequences sorted
    by time with faults before announcements on ties.
    """
    occ_t = list(occ_t)
    occ_type = list(occ_type)
    occ_pred = list(occ_pred)
    occ_win = list(occ_win)
    occ_u = list(occ_u)
    n = len(occ_t)

    inf = math.inf
    n_pro_periods = int(round(window / t_p)) if t_p > 0.0 else 0

    t = 0.0
    seg = 0.0            # work since the last completed checkpoint
    w_reg = 0.0          # regular-period work done so far this period
    snap_w = 0.0         # w_reg to restore on rollback
    remaining = base_work
    lost = 0.0
    ckpt_time = 0.0
    idle = 0.0
    down_acc = 0.0
    rec_acc = 0.0
    last_protect = 0.0   # end of last checkpoint or recovery
    pend_t0 = -inf       # window start of the prediction being acted on
    win_end = -inf
    pro_left = 0
    fin = False          # current stint finishes the job
    period_full = False  # current stint completes the regular period
    k = 0
    status = STATUS_DONE

    n_faults = 0
    n_pred_faults = 0
    n_unpred_faults = 0
    n_true_ann = 0
    n_false_ann = 0
    n_trusted = 0
    n_untrusted = 0
    n_dropped = 0
    n_ckpt_reg = 0
    n_ckpt_extra = 0
    n_ckpt_pro = 0
    n_rollbacks = 0
    n_dr_restarts = 0

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
            status = STATUS_STALLED
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
