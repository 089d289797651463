"""Weight domains and finite weighted transition systems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Callable, Hashable, Iterable, NamedTuple

EPS = 1e-9
OMEGA = math.inf


class InputError(ValueError):
    """Malformed or out-of-contract input."""


def _exact(x) -> bool:
    t = type(x)
    return t is int or t is Fraction or isinstance(x, Rational)


def num_leq(x, y) -> bool:
    # exact for int/Fraction operands, tolerant once a float is involved
    if _exact(x) and _exact(y):
        return x <= y
    return x <= y + EPS


def num_eq(x, y) -> bool:
    if _exact(x) and _exact(y):
        return x == y
    if x == y:
        return True
    return abs(x - y) <= EPS


def to_number(value, what="value"):
    """Coerce ``value`` into an exact number where possible.

    Strings and floats go through their decimal representation, so ``"0.1"``
    and ``0.1`` both become ``Fraction(1, 10)``.
    """
    if isinstance(value, bool):
        raise InputError(f"{what}: expected a number, got {value!r}")
    if isinstance(value, Rational):
        return value
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            raise InputError(f"{what}: expected a finite number, got {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{what}: not a number: {value!r}") from None
    raise InputError(f"{what}: expected a number, got {type(value).__name__}")


class TimeEnergy(NamedTuple):
    """Composite weight: cumulative (time, energy) under the product order."""

    time: Any
    energy: Any


def _add(x, y):
    return x + y


def _mul(x, y):
    return x * y


def _te_add(x, y):
    return TimeEnergy(x[0] + y[0], x[1] + y[1])


def _te_mul(x, y):
    return TimeEnergy(x[0] * y[0], x[1] * y[1])


def _te_leq(x, y):
    return num_leq(x[0], y[0]) and num_leq(x[1], y[1])


@dataclass(frozen=True)
class WeightDomain:
    """An ordered monoid, optionally extended to a semiring.

    ``combine`` need not be commutative; sequences are always folded from the
    left starting at ``zero``.
    """

    name: str
    zero: Any
    combine: Callable[[Any, Any], Any]
    leq: Callable[[Any, Any], bool]
    omega: Any = None
    times: Callable[[Any, Any], Any] | None = None
    one: Any = None

    def eq(self, x, y) -> bool:
        return self.leq(x, y) and self.leq(y, x)

    @property
    def is_semiring(self) -> bool:
        return self.times is not None and self.one is not None


TIME = WeightDomain("time", 0, _add, num_leq, OMEGA, _mul, 1)
ENERGY = WeightDomain("energy", 0, _add, num_leq, OMEGA, _mul, 1)
TIME_ENERGY = WeightDomain(
    "time_energy", TimeEnergy(0, 0), _te_add, _te_leq, TimeEnergy(OMEGA, OMEGA), _te_mul, TimeEnergy(1, 1)
)

DOMAINS = {d.name: d for d in (TIME, ENERGY, TIME_ENERGY)}


def fold_weights(domain: WeightDomain, ws: Iterable) -> Any:
    acc = domain.zero
    for w in ws:
        acc = domain.combine(acc, w)
    return acc


@dataclass(frozen=True, eq=False)
class WeightedTS:
    """Finite explicit weighted transition system.

    States are integers ``0..n-1``. ``edges[q]`` lists ``(action, target,
    weight)``; a missing edge stands for weight omega. ``info`` is an optional
    side table carrying whatever payload the builder attached to a state.
    """

    domain: WeightDomain
    alphabet: frozenset
    observe: tuple
    edges: tuple
    initial: tuple
    info: tuple = field(default=())

    @property
    def states(self) -> range:
        return range(len(self.observe))

    def __len__(self) -> int:
        return len(self.observe)

    def transitions(self):
        for q, out in enumerate(self.edges):
            for a, q2, w in out:
                yield q, a, q2, w

    def successors(self, q: int, a) -> set:
        if not isinstance(q, int) or not 0 <= q < len(self.observe):
            raise InputError(f"unknown state {q!r}")
        return {(q2, w) for b, q2, w in self.edges[q] if b == a}

    def payload(self, q: int):
        return self.info[q] if self.info else None

    def is_deterministic(self) -> bool:
        if len(self.initial) > 1:
            return False
        for out in self.edges:
            labels = [a for a, _, _ in out]
            if len(labels) != len(set(labels)):
                return False
        return True

    def num_transitions(self) -> int:
        return sum(len(out) for out in self.edges)


def _is_omega(w) -> bool:
    if isinstance(w, tuple):
        return OMEGA in w
    return w == OMEGA


class TSBuilder:
    """Incremental constructor for :class:`WeightedTS`.

    ``key`` in :meth:`state` lets builders merge semantically identical states;
    pass ``None`` to always allocate a fresh one.
    """

    def __init__(self, domain: WeightDomain, alphabet: Iterable):
        self.domain = domain
        self.alphabet = frozenset(alphabet)
        self._observe: list = []
        self._edges: list[list] = []
        self._info: list = []
        self._keys: dict[Hashable, int] = {}
        self._initial: list[int] = []

    def state(self, obs, info=None, key: Hashable | None = None) -> tuple[int, bool]:
        """Return ``(id, created)``."""
        if key is not None and key in self._keys:
            return self._keys[key], False
        q = len(self._observe)
        self._observe.append(obs)
        self._edges.append([])
        self._info.append(info)
        if key is not None:
            self._keys[key] = q
        return q, True

    def add_initial(self, q: int) -> None:
        if q not in self._initial:
            self._initial.append(q)

    def edge(self, q: int, a, q2: int, w, trusted: bool = False) -> None:
        if trusted:
            # caller guarantees known states, a valid action and a finite weight
            self._edges[q].append((a, q2, w))
            return
        if a not in self.alphabet:
            raise InputError(f"action {a!r} not in alphabet")
        n = len(self._observe)
        if not (0 <= q < n and 0 <= q2 < n):
            raise InputError(f"edge {q}->{q2} references unknown state")
        if _is_omega(w):
            # omega-weighted moves are represented by absence
            return
        self._edges[q].append((a, q2, w))

    def build(self) -> WeightedTS:
        if self._observe and not self._initial:
            raise InputError("transition system needs at least one initial state")
        return WeightedTS(
            domain=self.domain,
            alphabet=self.alphabet,
            observe=tuple(self._observe),
            edges=tuple(tuple(out) for out in self._edges),
            initial=tuple(self._initial),
            info=tuple(self._info),
        )


def make_ts(domain, alphabet, observe, transitions, initial, info=None) -> WeightedTS:
    """Build a TS from plain lists; handy for tests and hand-made systems."""
    b = TSBuilder(domain, alphabet)
    for i, o in enumerate(observe):
        b.state(o, None if info is None else info[i])
    for q, a, q2, w in transitions:
        b.edge(q, a, q2, w)
    for q in initial:
        b.add_initial(q)
    return b.build()


def is_cumulative(ts: WeightedTS, domain: WeightDomain | None = None) -> bool:
    domain = domain or ts.domain
    obs, combine = ts.observe, domain.combine
    for q, _a, q2, w in ts.transitions():
        want = combine(obs[q], w)
        # plain equality settles the exact case; eq() absorbs float noise
        if obs[q2] != want and not domain.eq(obs[q2], want):
            return False
    return True


def successors(ts: WeightedTS, q: int, a) -> set:
    return ts.successors(q, a)
