"""Execution systems for a workload on a reconfigurable machine.

Fixed-configuration runs, the full nondeterministic reconfigurable system, the
slack-guarded reconfiguration schemes (time-only and time+energy), a greedy
deterministic policy, and the offline energy optimum with its brute-force
oracle.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
import logging
from dataclasses import dataclass
from typing import NamedTuple

from .core import TIME, TIME_ENERGY, InputError, TimeEnergy, TSBuilder, WeightedTS, num_leq
from .jsonio import Int, render_number
from .machine import CostModel, reconfig_energy, reconfig_time
from .workload import WorkloadSpec, deadlines

log = logging.getLogger(__name__)

SCHEMES = ("baseline", "pal_time", "pal_energy", "greedy_min_energy", "optimal_dp")
GUARD_MODES = ("literal", "tight")
BRUTE_FORCE_BOUND = 10**6


class BaselineInfeasible(InputError):
    def __init__(self, step, label, needed, budget):
        self.step = step
        super().__init__(
            f"baseline infeasible: rmax needs {needed} for action {step} ({label}) but the budget is {budget}"
        )


class NoFeasibleSchedule(InputError):
    def __init__(self, step):
        self.step = step
        super().__init__(f"no feasible schedule: every configuration sequence misses deadline {step}")


class ExecState(NamedTuple):
    config: str
    time: object
    energy: object
    step: int


@dataclass(frozen=True)
class Step:
    label: str
    config: str
    weight: TimeEnergy
    state: ExecState


@dataclass(frozen=True)
class Trace:
    start: ExecState
    steps: tuple = ()
    scheme: str | None = None

    @property
    def configs(self):
        return [s.config for s in self.steps]

    @property
    def times(self):
        return [s.state.time for s in self.steps]

    @property
    def energies(self):
        return [s.state.energy for s in self.steps]

    @property
    def final(self) -> ExecState:
        return self.steps[-1].state if self.steps else self.start

    @property
    def total_energy(self):
        return self.final.energy


def _move(m: CostModel, r, r2, label):
    dt = reconfig_time(m, r, r2) + m.time(r2, label)
    de = reconfig_energy(m, r, r2) + m.energy(r2, label)
    return dt, de


def trace_from_configs(spec: WorkloadSpec, m: CostModel, configs, start=None, scheme=None) -> Trace:
    """Replay a configuration sequence starting from ``start`` (default rmax)."""
    r = m.rmax if start is None else start
    state = ExecState(r, 0, 0, 0)
    first = state
    steps = []
    for i, ((label, _), r2) in enumerate(zip(spec.items, configs), start=1):
        dt, de = _move(m, state.config, r2, label)
        state = ExecState(r2, state.time + dt, state.energy + de, i)
        steps.append(Step(label, r2, TimeEnergy(dt, de), state))
    return Trace(first, tuple(steps), scheme)


def run_fixed(r, spec: WorkloadSpec, m: CostModel) -> Trace:
    m._cfg(r)
    return trace_from_configs(spec, m, [r] * len(spec), start=r, scheme=f"fixed:{r}")


def feasible_on(r, spec: WorkloadSpec, m: CostModel) -> bool:
    tr = run_fixed(r, spec, m)
    return all(num_leq(t, d) for t, d in zip(tr.times, deadlines(spec)))


def meets_deadlines(trace: Trace, spec: WorkloadSpec) -> bool:
    return all(num_leq(t, d) for t, d in zip(trace.times, deadlines(spec)))


def trace_to_ts(trace: Trace, alphabet=None) -> WeightedTS:
    """The path transition system of a trace, observing (time, energy)."""
    if alphabet is None:
        alphabet = {s.label for s in trace.steps}
    b = TSBuilder(TIME_ENERGY, alphabet)
    prev, _ = b.state(TimeEnergy(trace.start.time, trace.start.energy), trace.start)
    b.add_initial(prev)
    for s in trace.steps:
        q, _ = b.state(TimeEnergy(s.state.time, s.state.energy), s.state)
        b.edge(prev, s.label, q, s.weight)
        prev = q
    return b.build()


# -- nondeterministic systems ----------------------------------------------


def _horizon(spec, horizon):
    if horizon is None:
        return len(spec)
    if not 0 <= horizon <= len(spec):
        raise InputError(f"horizon {horizon} out of range 0..{len(spec)}")
    return horizon


def _explore(spec: WorkloadSpec, m: CostModel, horizon: int, moves, with_energy: bool) -> WeightedTS:
    """Layered reachability from <rmax, 0, 0>.

    ``moves(config, time, label, deadline)`` lists target configurations; it
    must not depend on energy, which lets one call serve every state sharing
    (step, config, time). States merge on (step, config, time[, energy]).
    """
    domain = TIME_ENERGY if with_energy else TIME
    b = TSBuilder(domain, spec.alphabet)
    start = ExecState(m.rmax, 0, 0 if with_energy else None, 0)
    q0, _ = b.state(TimeEnergy(0, 0) if with_energy else 0, start)
    b.add_initial(q0)
    layer = {(m.rmax, 0, 0): q0}
    ds = deadlines(spec)
    costs = {}
    for i in range(horizon):
        label = spec.items[i].label
        if label not in costs:
            costs[label] = {(r, r2): _move(m, r, r2, label) for r in m.configs for r2 in m.configs}
        cost = costs[label]
        allowed = {}
        nxt = {}
        for (r, t, e), q in layer.items():
            key = (r, t)
            if key not in allowed:
                allowed[key] = moves(r, t, label, ds[i])
            for r2 in allowed[key]:
                dt, de = cost[(r, r2)]
                t2 = t + dt
                e2 = e + de if with_energy else 0
                k2 = (r2, t2, e2)
                q2 = nxt.get(k2)
                if q2 is None:
                    if with_energy:
                        q2, _ = b.state(TimeEnergy(t2, e2), ExecState(r2, t2, e2, i + 1))
                    else:
                        q2, _ = b.state(t2, ExecState(r2, t2, None, i + 1))
                    nxt[k2] = q2
                b.edge(q, label, q2, TimeEnergy(dt, de) if with_energy else dt, trusted=True)
        layer = nxt
    return b.build()


def build_reconfigurable_ts(spec: WorkloadSpec, m: CostModel, horizon=None, with_energy=False) -> WeightedTS:
    """Every configuration choice at every step, starting from rmax."""
    configs = sorted(m.configs)
    return _explore(spec, m, _horizon(spec, horizon), lambda r, t, a, d: configs, with_energy)


def check_baseline(spec: WorkloadSpec, m: CostModel, horizon=None) -> None:
    """Raise unless rmax fits every individual budget up to ``horizon``."""
    for i, (label, budget) in enumerate(spec.items[: _horizon(spec, horizon)], start=1):
        need = m.time(m.rmax, label)
        if not num_leq(need, budget):
            raise BaselineInfeasible(i, label, need, budget)


def pal_allowed(m: CostModel, r, t, label, deadline, guard_mode="literal", energy_guard=False) -> list:
    """Configurations the slack-guarded scheme may pick from ``<r, t>``.

    A non-maximal configuration is allowed when the slack left before the
    deadline covers its execution time plus a reconfiguration reserve; with
    ``energy_guard`` a switch must also save at least twice the reconfiguration
    energy. rmax is always allowed as the safe fallback.
    """
    if guard_mode not in GUARD_MODES:
        raise InputError(f"unknown guard mode {guard_mode!r}")
    slack = deadline - t
    out = []
    for r2 in sorted(m.configs):
        if r2 == m.rmax:
            continue
        # only weaker moves; speeding up goes through the rmax fallback
        if r2 != r and m.time(r2, label) < m.time(r, label):
            continue
        if guard_mode == "literal":
            reserve = 2 * m.delta
        else:
            reserve = reconfig_time(m, r, r2) + m.delta
        if not num_leq(reserve + m.time(r2, label), slack):
            continue
        # staying put is not a reconfiguration, so it has no energy test
        if energy_guard and r2 != r:
            if not num_leq(m.energy(r2, label) + 2 * m.theta, m.energy(r, label)):
                continue
        out.append(r2)
    out.append(m.rmax)
    return out


def build_pal_time_ts(spec: WorkloadSpec, m: CostModel, horizon=None, guard_mode="literal") -> WeightedTS:
    h = _horizon(spec, horizon)
    check_baseline(spec, m, h)

    def moves(r, t, label, d):
        return pal_allowed(m, r, t, label, d, guard_mode)

    return _explore(spec, m, h, moves, with_energy=False)


def build_pal_energy_ts(spec: WorkloadSpec, m: CostModel, horizon=None, guard_mode="literal") -> WeightedTS:
    h = _horizon(spec, horizon)
    check_baseline(spec, m, h)

    def moves(r, t, label, d):
        return pal_allowed(m, r, t, label, d, guard_mode, energy_guard=True)

    return _explore(spec, m, h, moves, with_energy=True)


# -- deterministic policies -------------------------------------------------


def _run_choice(spec, m, choose, scheme) -> Trace:
    ds = deadlines(spec)
    state = ExecState(m.rmax, 0, 0, 0)
    start = state
    steps = []
    for i, (label, _) in enumerate(spec.items):
        r2 = choose(state, label, ds[i], i)
        dt, de = _move(m, state.config, r2, label)
        state = ExecState(r2, state.time + dt, state.energy + de, i + 1)
        steps.append(Step(label, r2, TimeEnergy(dt, de), state))
    return Trace(start, tuple(steps), scheme)


def run_policy(scheme: str, spec: WorkloadSpec, m: CostModel, guard_mode="literal") -> Trace:
    """Run one deterministic scheme over the whole workload."""
    if scheme == "baseline":
        tr = run_fixed(m.rmax, spec, m)
        return Trace(tr.start, tr.steps, "baseline")
    if scheme in ("pal_time", "pal_energy"):
        check_baseline(spec, m)
        energy_guard = scheme == "pal_energy"

        def choose(st, label, d, i):
            allowed = pal_allowed(m, st.config, st.time, label, d, guard_mode, energy_guard)
            return min(allowed, key=lambda r2: (m.energy(r2, label), r2))

        return _run_choice(spec, m, choose, scheme)
    if scheme == "greedy_min_energy":

        def choose(st, label, d, i):
            best = None
            for r2 in sorted(m.configs):
                dt, de = _move(m, st.config, r2, label)
                t2 = st.time + dt
                reserve = 0 if r2 == m.rmax else m.delta
                if num_leq(t2 + reserve, d) and (best is None or de < best[0]):
                    best = (de, r2)
            if best is None:
                raise NoFeasibleSchedule(i + 1)
            return best[1]

        return _run_choice(spec, m, choose, scheme)
    if scheme == "optimal_dp":
        return optimal_offline(spec, m)[0]
    raise InputError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


# -- offline optimum --------------------------------------------------------


class _Entry(NamedTuple):
    time: object
    energy: object
    config: str
    rank: int
    parent: int


def optimal_offline(spec: WorkloadSpec, m: CostModel, objective="energy"):
    """Minimum-energy deadline-feasible configuration sequence.

    Dynamic program over (step, configuration) keeping a Pareto frontier of
    (time, energy). Each entry also carries the lexicographic rank of its
    configuration prefix so that, among equal-energy optima, the
    lexicographically least sequence survives pruning. Returns
    ``(trace, total_energy)``.
    """
    if objective != "energy":
        raise InputError(f"unsupported objective {objective!r}")
    ds = deadlines(spec)
    configs = sorted(m.configs)
    layers = [[_Entry(0, 0, m.rmax, 0, -1)]]
    for i, (label, _) in enumerate(spec.items):
        cand = []
        for idx, ent in enumerate(layers[-1]):
            for r2 in configs:
                dt, de = _move(m, ent.config, r2, label)
                t2 = ent.time + dt
                if num_leq(t2, ds[i]):
                    cand.append((ent.rank, r2, t2, ent.energy + de, idx))
        if not cand:
            raise NoFeasibleSchedule(i + 1)
        cand.sort(key=lambda c: (c[0], c[1]))
        by_config: dict[str, list] = {}
        for rank, (_, r2, t2, e2, idx) in enumerate(cand):
            by_config.setdefault(r2, []).append((t2, e2, rank, idx))
        kept = []
        for r2, group in by_config.items():
            group.sort(key=lambda g: (g[0], g[1], g[2]))
            best = None
            for t2, e2, rank, idx in group:
                if best is None or (e2, rank) < best:
                    best = (e2, rank)
                    kept.append((rank, r2, t2, e2, idx))
        kept.sort()
        layers.append([_Entry(t2, e2, r2, k, idx) for k, (_, r2, t2, e2, idx) in enumerate(kept)])
    last = layers[-1]
    best = min(range(len(last)), key=lambda k: (last[k].energy, last[k].rank))
    seq = []
    for layer in reversed(layers[1:]):
        ent = layer[best]
        seq.append(ent.config)
        best = ent.parent
    seq.reverse()
    tr = trace_from_configs(spec, m, seq, scheme="optimal_dp")
    return tr, tr.total_energy


def brute_force_optimal(spec: WorkloadSpec, m: CostModel, bound=BRUTE_FORCE_BOUND):
    """Exhaustive oracle for :func:`optimal_offline`."""
    n = len(spec)
    configs = sorted(m.configs)
    if len(configs) ** n > bound:
        raise InputError(f"brute force needs {len(configs)}^{n} sequences, over the bound {bound}")
    ds = deadlines(spec)
    best = None
    deepest = 0
    for seq in itertools.product(configs, repeat=n):
        r, t, e = m.rmax, 0, 0
        ok = True
        for i, ((label, _), r2) in enumerate(zip(spec.items, seq)):
            dt, de = _move(m, r, r2, label)
            t, e, r = t + dt, e + de, r2
            if not num_leq(t, ds[i]):
                deepest = max(deepest, i)
                ok = False
                break
        if ok and (best is None or e < best[0]):
            best = (e, seq)
    if best is None:
        raise NoFeasibleSchedule(deepest + 1)
    tr = trace_from_configs(spec, m, best[1], scheme="bruteforce")
    return tr, best[0]


def alpha_hat(m: CostModel, alphabet) -> object:
    """Largest slowdown of any configuration relative to rmax over the alphabet."""
    best = None
    for a in sorted(alphabet):
        base = m.time(m.rmax, a)
        for r in m.configs:
            if base == 0:
                continue
            ratio = Fraction(m.time(r, a)) / base
            if best is None or ratio > best:
                best = ratio
    return 1 if best is None else best


# -- serialization ------------------------------------------------------------

TRACE_COLUMNS = ("i", "label", "config", "t", "e", "deadline")


def trace_to_doc(trace: Trace, spec: WorkloadSpec, scheme=None) -> dict:
    ds = deadlines(spec)
    steps = [
        {"i": Int(k), "label": s.label, "config": s.config, "t": s.state.time, "e": s.state.energy, "deadline": ds[k - 1]}
        for k, s in enumerate(trace.steps, start=1)
    ]
    return {"scheme": scheme or trace.scheme or "", "steps": steps, "total_energy": trace.total_energy}


def trace_to_csv(trace: Trace, spec: WorkloadSpec) -> str:
    lines = [",".join(TRACE_COLUMNS)]
    for row in trace_to_doc(trace, spec)["steps"]:
        lines.append(",".join(
            str(int(row[c])) if c == "i" else row[c] if isinstance(row[c], str) else render_number(row[c])
            for c in TRACE_COLUMNS
        ))
    return "\n".join(lines) + "\n"
