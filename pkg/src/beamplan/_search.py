"""Depth-first branch-and-bound kernel (numba-compiled, resumable in chunks).

The search branches over route-construction moves: extend the active robot's
path with an unvisited node, or close its route and start the next robot.
Arrival times follow the exact chain t_j = t_i + w_i + T_ij that the time
constraints pin, so a node whose window opens later than the chain arrival
makes the branch infeasible (robots cannot wait).

Pruning:
  * spanning-forest lower bound (see ``_forest_lb``),
  * time-window and return-horizon checks,
  * pairwise service-interval overlap checks against placed collision nodes,
  * state dominance on (visited set, endpoint, robot, first-node threshold)
    keyed by (cost, clock); enabled only when early arrivals cannot violate
    a window-open time, which is when it is provably sound.

All mutable state lives in caller-owned arrays so a solve can be resumed
chunk by chunk under a wall-clock limit.
"""
from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.typed import Dict

CLOSE = 0

# ctl indices
SP = 0
EXPLORED = 1
STATUS = 2          # 0 running, 1 finished (tree exhausted or bound met)
TRACE_LEN = 3
INITIALIZED = 4
# fctl indices
BEST = 0
ROOT_LB = 1

TRACE_CAP = 512


@njit(cache=True)
def _forest_lb(T, mask, last, q, v, nodes, key, intree):
    """Lower bound on the travel still to pay.

    The remaining arcs of any completion form (a) a spanning forest with q+1
    components over {last} + unvisited, where q is the number of robots still
    to start (cost at least MST minus its q most expensive edges), plus
    (b) 2q+1 depot-incident arcs (active close plus two per future route,
    cost at least the smallest 2q+1 of the doubled depot-distance multiset).
    """
    sink = v + 1
    nn = 0
    nodes[nn] = last
    nn += 1
    for u in range(1, v + 1):
        if mask >> (u - 1) & 1:
            nodes[nn] = u
            nn += 1
    mst = 0.0
    top1 = 0.0
    top2 = 0.0
    if nn >= 2:
        for a in range(nn):
            key[a] = 1e300
            intree[a] = 0
        key[0] = 0.0
        for _ in range(nn):
            kmin = 1e300
            imin = -1
            for a in range(nn):
                if intree[a] == 0 and key[a] < kmin:
                    kmin = key[a]
                    imin = a
            intree[imin] = 1
            mst += kmin
            if kmin > top1:
                top2 = top1
                top1 = kmin
            elif kmin > top2:
                top2 = kmin
            ni = nodes[imin]
            for b in range(nn):
                if intree[b] == 0:
                    d = T[ni, nodes[b]]
                    if d < key[b]:
                        key[b] = d
    if q >= 1:
        mst -= top1
    if q >= 2:
        mst -= top2
    d1 = 1e300
    d2 = 1e300
    d3 = 1e300
    for a in range(nn):
        d = T[nodes[a], sink]
        if d < d1:
            d3 = d2
            d2 = d1
            d1 = d
        elif d < d2:
            d3 = d2
            d2 = d
        elif d < d3:
            d3 = d
    need = 2 * q + 1
    dep = d1
    if need >= 2:
        dep += d1
    if need >= 3:
        dep += d2
    if need >= 4:
        dep += d2
    if need >= 5:
        dep += d3
    return mst + dep


@njit(cache=True)
def root_lower_bound(T, K):
    v = T.shape[0] - 2
    nodes = np.zeros(v + 2, dtype=np.int64)
    key = np.zeros(v + 2, dtype=np.float64)
    intree = np.zeros(v + 2, dtype=np.uint8)
    mask = (np.int64(1) << v) - 1
    return _forest_lb(T, mask, 0, K - 1, v, nodes, key, intree)


def new_dominance_tables():
    return (Dict.empty(types.int64, types.float64),
            Dict.empty(types.int64, types.float64))


@njit(cache=True)
def bnb_chunk(T, e, l, w, K, arc_ok, pstart, pflat, allow_idle, use_dom,
              lb_floor, tol, budget,
              ctl, fctl, lv_last, lv_robot, lv_started, lv_thr, lv_time,
              lv_cost, lv_mask, lv_node, lv_ncand, lv_ci, cands, t_node,
              mst_nodes, mst_key, mst_intree, move_cost, best_seq,
              trace_explored, trace_obj, dom_cost, dom_time):
    v = T.shape[0] - 2
    sink = v + 1
    ALL = (np.int64(1) << v) - 1
    e0 = e[0]
    l0 = l[sink]
    idle_thr = np.int64(v + 1)   # sentinel: forces all later robots idle

    def _gen(sp):
        mask = lv_mask[sp]
        last = lv_last[sp]
        robot = lv_robot[sp]
        started = lv_started[sp]
        thr = lv_thr[sp]
        n = 0
        for u in range(1, v + 1):
            if mask >> (u - 1) & 1:
                if started == 0 and u <= thr:
                    continue
                src = last if started == 1 else 0
                if arc_ok[src, u] == 0:
                    continue
                cands[sp, n] = u
                move_cost[n] = T[src, u]
                n += 1
        close_ok = False
        if started == 1 and arc_ok[last, sink] == 1:
            rem = 0
            mm = mask
            while mm:
                rem += mm & 1
                mm >>= 1
            if mask == 0 and robot == K:
                close_ok = True
            elif robot < K and (allow_idle == 1 or rem >= K - robot):
                close_ok = True
        elif started == 0 and allow_idle == 1 and arc_ok[0, sink] == 1:
            close_ok = True
        if close_ok:
            src = last if started == 1 else 0
            cands[sp, n] = CLOSE
            move_cost[n] = T[src, sink]
            n += 1
        for a in range(1, n):
            cu = cands[sp, a]
            cc = move_cost[a]
            b = a - 1
            while b >= 0 and move_cost[b] > cc:
                cands[sp, b + 1] = cands[sp, b]
                move_cost[b + 1] = move_cost[b]
                b -= 1
            cands[sp, b + 1] = cu
            move_cost[b + 1] = cc
        lv_ncand[sp] = n
        lv_ci[sp] = 0

    def _record(obj):
        tl = ctl[TRACE_LEN]
        if tl < TRACE_CAP:
            trace_explored[tl] = ctl[EXPLORED]
            trace_obj[tl] = obj
            ctl[TRACE_LEN] = tl + 1
        else:
            trace_explored[TRACE_CAP - 1] = ctl[EXPLORED]
            trace_obj[TRACE_CAP - 1] = obj

    if ctl[INITIALIZED] == 0:
        lv_last[0] = 0
        lv_robot[0] = 1
        lv_started[0] = 0
        lv_thr[0] = 0
        lv_time[0] = e0
        lv_cost[0] = 0.0
        lv_mask[0] = ALL
        lv_node[0] = -1
        _gen(0)
        ctl[SP] = 0
        fctl[ROOT_LB] = _forest_lb(T, ALL, 0, K - 1, v,
                                   mst_nodes, mst_key, mst_intree)
        ctl[INITIALIZED] = 1
        if fctl[BEST] <= max(lb_floor, fctl[ROOT_LB]) + 1e-12:
            ctl[STATUS] = 1
            return

    sp = ctl[SP]
    spent = np.int64(0)
    while sp >= 0 and spent < budget:
        if lv_ci[sp] >= lv_ncand[sp]:
            nd = lv_node[sp]
            if nd > 0:
                t_node[nd] = -1.0
            sp -= 1
            continue
        mv = cands[sp, lv_ci[sp]]
        lv_ci[sp] += 1
        mask = lv_mask[sp]
        last = lv_last[sp]
        robot = lv_robot[sp]
        started = lv_started[sp]
        thr = lv_thr[sp]
        tnow = lv_time[sp]
        cost = lv_cost[sp]

        spent += 1
        ctl[EXPLORED] += 1

        if mv == CLOSE:
            src = last if started == 1 else 0
            ret = T[src, sink]
            if tnow + ret > l0 + tol:
                continue
            ncost = cost + ret
            if mask == 0 and robot == K:
                if ncost < fctl[BEST] - 1e-12:
                    fctl[BEST] = ncost
                    for d in range(1, sp + 1):
                        best_seq[d - 1] = lv_node[d]
                    best_seq[sp] = CLOSE
                    for d in range(sp + 1, best_seq.shape[0]):
                        best_seq[d] = -9
                    _record(ncost)
                    if ncost <= max(lb_floor, fctl[ROOT_LB]) + 1e-12:
                        ctl[STATUS] = 1
                        ctl[SP] = -1
                        return
                continue
            if robot >= K:
                continue
            lb = ncost + _forest_lb(T, mask, 0, K - robot - 1, v,
                                    mst_nodes, mst_key, mst_intree)
            if lb >= fctl[BEST] - 1e-12:
                continue
            nthr = thr if started == 1 else idle_thr
            if use_dom == 1:
                dkey = (((mask << 6) | 0) << 9) | (np.int64(robot + 1) << 6) | nthr
                if dkey in dom_cost and dom_cost[dkey] <= ncost + 1e-12:
                    continue
                dom_cost[dkey] = ncost
            sp += 1
            lv_last[sp] = 0
            lv_robot[sp] = robot + 1
            lv_started[sp] = 0
            lv_thr[sp] = nthr
            lv_time[sp] = e0
            lv_cost[sp] = ncost
            lv_mask[sp] = mask
            lv_node[sp] = CLOSE
            _gen(sp)
            continue

        u = mv
        src = last if started == 1 else 0
        tu = tnow + T[src, u]
        if tu < e[u] - tol or tu > l[u] + tol:
            continue
        if tu + w[u] + T[u, sink] > l0 + tol:
            continue
        ok = True
        for pi in range(pstart[u], pstart[u + 1]):
            p = pflat[pi]
            tp = t_node[p]
            if tp >= 0.0:
                lo = tu if tu > tp else tp
                hi1 = tu + w[u]
                hi2 = tp + w[p]
                hi = hi1 if hi1 < hi2 else hi2
                if hi - lo > tol:
                    ok = False
                    break
        if not ok:
            continue
        nmask = mask & ~(np.int64(1) << (u - 1))
        if allow_idle == 0:
            rem = 0
            mm = nmask
            while mm:
                rem += mm & 1
                mm >>= 1
            if rem < K - robot:
                continue
        ncost = cost + T[src, u]
        lb = ncost + _forest_lb(T, nmask, u, K - robot, v,
                                mst_nodes, mst_key, mst_intree)
        if lb >= fctl[BEST] - 1e-12:
            continue
        nthr = thr if started == 1 else u
        ntime = tu + w[u]
        if use_dom == 1:
            dkey = (((nmask << 6) | u) << 9) | (np.int64(robot) << 6) | nthr
            if dkey in dom_cost:
                if dom_cost[dkey] <= ncost + 1e-12 and dom_time[dkey] <= ntime + 1e-12:
                    continue
                if ncost < dom_cost[dkey] - 1e-12 or (
                        dom_cost[dkey] <= ncost + 1e-12 and ntime < dom_time[dkey]):
                    dom_cost[dkey] = ncost
                    dom_time[dkey] = ntime
            else:
                dom_cost[dkey] = ncost
                dom_time[dkey] = ntime
        sp += 1
        lv_last[sp] = u
        lv_robot[sp] = robot
        lv_started[sp] = 1
        lv_thr[sp] = nthr
        lv_time[sp] = ntime
        lv_cost[sp] = ncost
        lv_mask[sp] = nmask
        lv_node[sp] = u
        t_node[u] = tu
        _gen(sp)

    ctl[SP] = sp
    if sp < 0:
        ctl[STATUS] = 1
