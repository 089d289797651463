"""Decision procedures for simulation-style relations on finite weighted TS.

All relation checkers compare *observations* of paired states after projecting
them onto a chosen component (time, energy, or the composite pair), and
compute greatest fixpoints by counter-based refinement.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .core import InputError, WeightedTS, num_leq
from .execution import feasible_on
from .jsonio import Int

log = logging.getLogger(__name__)

OBS = ("time", "energy", "composite")
VERDICTS = ("r2_below_r", "r_below_r2", "equi", "both_infeasible_equi", "incomparable_never")


class UnboundedRatio(ArithmeticError):
    pass


@dataclass(frozen=True)
class RelationVerdict:
    relation: str
    holds: bool
    witness: frozenset | None = None
    counterexample: dict | None = None
    c: object = None
    extra: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def to_doc(self) -> dict:
        doc = {"relation": self.relation, "holds": self.holds}
        if self.c is not None:
            doc["c"] = self.c
        if self.counterexample is not None:
            doc["counterexample"] = self.counterexample
        doc.update(self.extra)
        return doc


# -- observation projection ---------------------------------------------------


def projector(ts: WeightedTS, obs: str):
    if obs not in OBS:
        raise InputError(f"unknown observation {obs!r}; expected one of {OBS}")
    name = ts.domain.name
    if name == "time_energy":
        if obs == "time":
            return lambda o: o[0]
        if obs == "energy":
            return lambda o: o[1]
        return lambda o: o
    if obs == name:
        return lambda o: o
    raise InputError(f"cannot project a {name} system onto {obs}")


def _compare(obs):
    if obs == "composite":
        return lambda x, y: num_leq(x[0], y[0]) and num_leq(x[1], y[1])
    return num_leq


def _scale(c, x, obs):
    if obs == "composite":
        cc = c if isinstance(c, tuple) else (c, c)
        return (cc[0] * x[0], cc[1] * x[1])
    return c * x


def _check_alphabets(t1, t2):
    if t1.alphabet != t2.alphabet:
        raise InputError(
            f"alphabet mismatch: {sorted(t1.alphabet)} vs {sorted(t2.alphabet)}"
        )


# -- generic greatest fixpoint ------------------------------------------------


class _Graph:
    def __init__(self, ts: WeightedTS):
        self.out = [list(dict.fromkeys((a, q2) for a, q2, _ in out)) for out in ts.edges]
        self.succ = [dict() for _ in ts.edges]
        self.pred = [dict() for _ in ts.edges]
        for q, out in enumerate(self.out):
            for a, q2 in out:
                self.succ[q].setdefault(a, []).append(q2)
                self.pred[q2].setdefault(a, []).append(q)


def _reachable_pairs(g1, g2, seeds):
    seen = set(seeds)
    todo = deque(seeds)
    while todo:
        p, q = todo.popleft()
        for a, p2 in g1.out[p]:
            for q2 in g2.succ[q].get(a, ()):
                if (p2, q2) not in seen:
                    seen.add((p2, q2))
                    todo.append((p2, q2))
    return seen


def _fixpoint(t1, t2, order_ok, universal, reachable_only):
    """Largest relation satisfying the order clause and the move clause.

    ``universal=False`` gives simulation (some matching move), ``True`` gives
    betterment (at least one move, and every move lands in the relation).
    Returns ``(relation, reasons)``; ``reasons`` maps each rejected pair to the
    clause that removed it, in removal order.
    """
    g1, g2 = _Graph(t1), _Graph(t2)
    if reachable_only:
        seeds = [(p, q) for p in t1.initial for q in t2.initial]
        scope = _reachable_pairs(g1, g2, seeds)
    else:
        scope = {(p, q) for p in t1.states for q in t2.states}

    rel = set()
    reasons = {}
    for pq in scope:
        if order_ok(*pq):
            rel.add(pq)
        else:
            reasons[pq] = ("order",)

    # phase 1: counts against the initial candidate set
    counts = {}
    doomed = []
    for p, q in rel:
        for a, p2 in g1.out[p]:
            succ = g2.succ[q].get(a, ())
            if not succ:
                doomed.append(((p, q), ("missing", a, p2)))
                break
            if universal:
                bad = next((q2 for q2 in succ if (p2, q2) not in rel), None)
                if bad is not None:
                    doomed.append(((p, q), ("unmatched", a, p2, bad)))
                    break
            else:
                n = sum(1 for q2 in succ if (p2, q2) in rel)
                if n == 0:
                    doomed.append(((p, q), ("no_match", a, p2)))
                    break
                counts[(p, q, a, p2)] = n

    # phase 2: each pair leaving rel decrements its predecessors exactly once
    queue = deque()

    def drop(pq, why):
        rel.discard(pq)
        reasons[pq] = why
        queue.append(pq)

    for pq, why in sorted(doomed, key=lambda d: d[0]):
        drop(pq, why)
    while queue:
        p2, q2 = queue.popleft()
        for a, ps in g1.pred[p2].items():
            qs = g2.pred[q2].get(a)
            if not qs:
                continue
            for p in ps:
                for q in qs:
                    if (p, q) not in rel:
                        continue
                    if universal:
                        drop((p, q), ("unmatched", a, p2, q2))
                        continue
                    key = (p, q, a, p2)
                    counts[key] -= 1
                    if counts[key] == 0:
                        drop((p, q), ("no_match", a, p2))
    return rel, reasons


def _explain(t1, t2, pair, reasons, proj1, proj2):
    """Follow removal reasons from ``pair`` down to a concrete violation."""
    path = []
    p, q = pair
    order = {pq: k for k, pq in enumerate(reasons)}
    for _ in range(len(reasons) + 1):
        why = reasons.get((p, q))
        if why is None or why[0] == "order":
            return {
                "pair": [Int(p), Int(q)],
                "clause": "order",
                "left": proj1(t1.observe[p]),
                "right": proj2(t2.observe[q]),
                "path": path,
                "step": Int(len(path)),
            }
        if why[0] == "missing":
            return {
                "pair": [Int(p), Int(q)],
                "clause": "missing_move",
                "action": why[1],
                "path": path,
                "step": Int(len(path)),
            }
        a, p2 = why[1], why[2]
        if why[0] == "unmatched":
            q2 = why[3]
        else:
            # every a-successor was removed earlier; follow the earliest
            q2 = min((q2 for q2 in {x for b, x, _ in t2.edges[q] if b == a}), key=lambda x: order.get((p2, x), -1))
        path.append(a)
        p, q = p2, q2
    raise AssertionError("removal chain did not terminate")


def _verdict(name, t1, t2, rel, reasons, proj1, proj2, universal, c=None):
    if universal:
        bad = next(((p, q) for p in t1.initial for q in t2.initial if (p, q) not in rel), None)
        holds = bad is None
    else:
        bad = None
        for p in t1.initial:
            if not any((p, q) in rel for q in t2.initial):
                bad = (p, t2.initial[0]) if t2.initial else (p, None)
                break
        holds = bad is None
    if holds:
        return RelationVerdict(name, True, witness=frozenset(rel), c=c)
    if bad[1] is None:
        cex = {"pair": [Int(bad[0]), None], "clause": "no_initial_state", "path": [], "step": Int(0)}
    else:
        cex = _explain(t1, t2, bad, reasons, proj1, proj2)
    return RelationVerdict(name, False, witness=frozenset(rel), counterexample=cex, c=c)


# -- public checkers ----------------------------------------------------------


def largest_simulation(t1: WeightedTS, t2: WeightedTS, obs="time", reachable_only=False) -> RelationVerdict:
    """Largest R with O2(q) <= O1(p) and every p-move matched by some q-move.

    With ``reachable_only`` the fixpoint is restricted to pairs reachable from
    the initial pairs by synchronized moves; the verdict is the same and the
    witness is the largest simulation intersected with that set.
    """
    _check_alphabets(t1, t2)
    pr1, pr2 = projector(t1, obs), projector(t2, obs)
    leq = _compare(obs)
    o1, o2 = t1.observe, t2.observe
    rel, reasons = _fixpoint(t1, t2, lambda p, q: leq(pr2(o2[q]), pr1(o1[p])), False, reachable_only)
    return _verdict("sim", t1, t2, rel, reasons, pr1, pr2, universal=False)


def largest_betterment(t1: WeightedTS, t2: WeightedTS, obs="energy", reachable_only=False) -> RelationVerdict:
    """Largest R whose move clause is universal over the q-moves."""
    _check_alphabets(t1, t2)
    pr1, pr2 = projector(t1, obs), projector(t2, obs)
    leq = _compare(obs)
    o1, o2 = t1.observe, t2.observe
    rel, reasons = _fixpoint(t1, t2, lambda p, q: leq(pr2(o2[q]), pr1(o1[p])), True, reachable_only)
    return _verdict("betterment", t1, t2, rel, reasons, pr1, pr2, universal=True)


def check_c_simulation(t1: WeightedTS, t2: WeightedTS, c, obs="energy", reachable_only=False) -> RelationVerdict:
    """Simulation with the order test relaxed to O2(q) <= c * O1(p)."""
    _check_alphabets(t1, t2)
    for ts in (t1, t2):
        if not ts.domain.is_semiring:
            raise InputError(f"{ts.domain.name} weights have no multiplication")
    pr1, pr2 = projector(t1, obs), projector(t2, obs)
    leq = _compare(obs)
    o1, o2 = t1.observe, t2.observe
    rel, reasons = _fixpoint(
        t1, t2, lambda p, q: leq(pr2(o2[q]), _scale(c, pr1(o1[p]), obs)), False, reachable_only
    )
    return _verdict("csim", t1, t2, rel, reasons, pr1, pr2, universal=False, c=c)


def check_by_simulation(spec_ts: WeightedTS, exec_ts: WeightedTS) -> RelationVerdict:
    """Every path of ``exec_ts`` meets every deadline of ``spec_ts``.

    Breadth-first traversal of the synchronized product, so the reported
    counterexample is a shortest violating path.
    """
    if not spec_ts.is_deterministic():
        raise InputError("specification system must be deterministic")
    _check_alphabets(spec_ts, exec_ts)
    pr1, pr2 = projector(spec_ts, "time"), projector(exec_ts, "time")
    seeds = [(p, q) for p in spec_ts.initial for q in exec_ts.initial]
    parent = {pq: None for pq in seeds}
    todo = deque(seeds)

    def path_to(pq):
        acts = []
        while parent[pq] is not None:
            pq, a = parent[pq]
            acts.append(a)
        return acts[::-1]

    while todo:
        p, q = todo.popleft()
        dp, tq = pr1(spec_ts.observe[p]), pr2(exec_ts.observe[q])
        if not num_leq(tq, dp):
            path = path_to((p, q))
            cex = {"pair": [Int(p), Int(q)], "clause": "order", "left": dp, "right": tq,
                   "path": path, "step": Int(len(path))}
            return RelationVerdict("bysim", False, counterexample=cex)
        for a, p2, _ in spec_ts.edges[p]:
            succ = [q2 for b, q2, _ in exec_ts.edges[q] if b == a]
            if not succ:
                path = path_to((p, q))
                cex = {"pair": [Int(p), Int(q)], "clause": "missing_move", "action": a,
                       "path": path, "step": Int(len(path))}
                return RelationVerdict("bysim", False, counterexample=cex)
            for q2 in succ:
                if (p2, q2) not in parent:
                    parent[(p2, q2)] = ((p, q), a)
                    todo.append((p2, q2))
    if not exec_ts.initial and spec_ts.initial:
        cex = {"pair": [Int(spec_ts.initial[0]), None], "clause": "no_initial_state", "path": [], "step": Int(0)}
        return RelationVerdict("bysim", False, counterexample=cex)
    return RelationVerdict("bysim", True, witness=frozenset(parent))


# -- competitive ratio --------------------------------------------------------


def _ratio(x, y):
    if isinstance(x, Rational) and isinstance(y, Rational):
        return Fraction(x) / Fraction(y)
    return x / y


def _path_observations(ts):
    """Observation sequence and labels of a deterministic path, else None."""
    if len(ts.initial) != 1:
        return None
    q = ts.initial[0]
    seen = {q}
    seq = [q]
    while ts.edges[q]:
        if len(ts.edges[q]) > 1:
            return None
        _, q, _ = ts.edges[q][0]
        if q in seen:
            return None
        seen.add(q)
        seq.append(q)
    return seq


def min_c_factor(t1: WeightedTS, t2: WeightedTS, obs="energy"):
    """Least c for which a c-simulation between ``t1`` and ``t2`` exists.

    The verdict only changes at ratios O2(q)/O1(p) of reachable pairs, so the
    search runs over that finite candidate set, using monotonicity in c for a
    binary search, and the result is re-checked before returning.
    """
    if obs == "composite":
        raise InputError("min_c_factor needs a scalar observation")
    _check_alphabets(t1, t2)
    pr1, pr2 = projector(t1, obs), projector(t2, obs)

    s1, s2 = _path_observations(t1), _path_observations(t2)
    if s1 is not None and s2 is not None and _same_labels(t1, s1, t2, s2):
        best, any_positive = 0, False
        for k, (p, q) in enumerate(zip(s1, s2)):
            x, y = pr1(t1.observe[p]), pr2(t2.observe[q])
            if x == 0:
                if y == 0:
                    continue
                raise UnboundedRatio(f"step {k}: reference observes 0 but the other observes {y}")
            any_positive = True
            best = max(best, _ratio(y, x))
        # nothing to compare (all 0/0): report the identity factor
        c = best if any_positive else 1
        if not check_c_simulation(t1, t2, c, obs, reachable_only=True).holds:
            raise AssertionError("pointwise ratio failed verification")
        return c

    g1, g2 = _Graph(t1), _Graph(t2)
    pairs = _reachable_pairs(g1, g2, [(p, q) for p in t1.initial for q in t2.initial])
    cands = {Fraction(0)}
    any_positive = False
    for p, q in pairs:
        x, y = pr1(t1.observe[p]), pr2(t2.observe[q])
        if x > 0:
            any_positive = True
            cands.add(_ratio(y, x))
    cands = sorted(cands)
    if not any_positive and check_c_simulation(t1, t2, 1, obs, reachable_only=True).holds:
        return 1
    if not check_c_simulation(t1, t2, cands[-1], obs, reachable_only=True).holds:
        raise UnboundedRatio("no constant factor makes the second system simulate the first")
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if check_c_simulation(t1, t2, cands[mid], obs, reachable_only=True).holds:
            hi = mid
        else:
            lo = mid + 1
    c = cands[lo]
    assert check_c_simulation(t1, t2, c, obs, reachable_only=True).holds
    return c


def _same_labels(t1, s1, t2, s2):
    l1 = [t1.edges[q][0][0] for q in s1[:-1]]
    l2 = [t2.edges[q][0][0] for q in s2[:-1]]
    n = min(len(l1), len(l2))
    # the longer path only matters if t1 is the longer one (t2 must match it)
    return l1[:n] == l2[:n] and len(l1) <= len(l2)


# -- capability -----------------------------------------------------------------


def capability_compare(r, r2, spec, m) -> str:
    """Classify two configurations by their feasibility on ``spec``.

    ``equi`` means both meet every deadline; ``both_infeasible_equi`` means
    neither does, so the capability order holds only vacuously.
    """
    f_r, f_r2 = feasible_on(r, spec, m), feasible_on(r2, spec, m)
    if f_r and f_r2:
        return "equi"
    if not f_r and not f_r2:
        return "both_infeasible_equi"
    if f_r:
        return "r2_below_r"
    return "r_below_r2"


def capability_leq(r2, r, spec, m) -> bool:
    """``r2`` is at most as capable as ``r``: feasibility of r2 implies that of r."""
    return capability_compare(r, r2, spec, m) in ("r2_below_r", "equi", "both_infeasible_equi")


def equi_capable(r, r2, spec, m) -> bool:
    return capability_compare(r, r2, spec, m) in ("equi", "both_infeasible_equi")


# -- witness validators (used by the property suites) -------------------------


def _obs_leq(t1, t2, obs, c=None):
    pr1, pr2 = projector(t1, obs), projector(t2, obs)
    leq = _compare(obs)
    if c is None:
        return lambda p, q: leq(pr2(t2.observe[q]), pr1(t1.observe[p]))
    return lambda p, q: leq(pr2(t2.observe[q]), _scale(c, pr1(t1.observe[p]), obs))


def is_simulation(rel, t1, t2, obs="time", c=None) -> bool:
    ok = _obs_leq(t1, t2, obs, c)
    g1, g2 = _Graph(t1), _Graph(t2)
    for p, q in rel:
        if not ok(p, q):
            return False
        for a, p2 in g1.out[p]:
            if not any((p2, q2) in rel for q2 in g2.succ[q].get(a, ())):
                return False
    return True


def is_betterment(rel, t1, t2, obs="energy") -> bool:
    ok = _obs_leq(t1, t2, obs)
    g1, g2 = _Graph(t1), _Graph(t2)
    for p, q in rel:
        if not ok(p, q):
            return False
        for a, p2 in g1.out[p]:
            succ = g2.succ[q].get(a, ())
            if not succ or any((p2, q2) not in rel for q2 in succ):
                return False
    return True


def compose(r1, r2) -> frozenset:
    by_first = {}
    for q, s in r2:
        by_first.setdefault(q, []).append(s)
    return frozenset((p, s) for p, q in r1 for s in by_first.get(q, ()))
