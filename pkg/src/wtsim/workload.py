"""Workloads: action sequences with budgeted times and absolute deadlines."""

from __future__ import annotations

import csv
import io
import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .core import TIME, InputError, TSBuilder, WeightedTS, to_number


class Item(NamedTuple):
    label: str
    budget: object


@dataclass(frozen=True)
class WorkloadSpec:
    items: tuple = ()

    def __post_init__(self):
        items = []
        for k, it in enumerate(self.items):
            label, budget = it
            if not isinstance(label, str) or not label:
                raise InputError(f"item {k}: label must be a non-empty string")
            budget = to_number(budget, f"item {k}: budget")
            if budget < 0:
                raise InputError(f"item {k}: negative budget {budget}")
            items.append(Item(label, budget))
        object.__setattr__(self, "items", tuple(items))

    def __len__(self):
        return len(self.items)

    @property
    def labels(self) -> list[str]:
        return [it.label for it in self.items]

    @property
    def budgets(self) -> list:
        return [it.budget for it in self.items]

    @property
    def alphabet(self) -> frozenset:
        return frozenset(self.labels)

    @classmethod
    def of(cls, pairs: Iterable) -> "WorkloadSpec":
        return cls(tuple(pairs))


def deadlines(spec: WorkloadSpec) -> list:
    return list(itertools.accumulate(spec.budgets))


def build_spec_ts(spec: WorkloadSpec) -> WeightedTS:
    """Deterministic path 0 -a1-> d1 -a2-> d2 ... observing the deadlines.

    States are keyed by index, so zero budgets never merge two states.
    """
    b = TSBuilder(TIME, spec.alphabet)
    prev, _ = b.state(0, info=0)
    b.add_initial(prev)
    d = 0
    for i, (label, budget) in enumerate(spec.items, start=1):
        d = d + budget
        q, _ = b.state(d, info=i)
        b.edge(prev, label, q, budget)
        prev = q
    return b.build()


def prefix(spec: WorkloadSpec, k: int) -> WorkloadSpec:
    if not 0 <= k <= len(spec):
        raise InputError(f"prefix length {k} out of range 0..{len(spec)}")
    return WorkloadSpec(spec.items[:k])


def concat_shifted(s1: WorkloadSpec, s2: WorkloadSpec) -> WorkloadSpec:
    # shifting the tail's deadlines by d_m is the same as concatenating budgets
    return WorkloadSpec(s1.items + s2.items)


def take(stream: Iterable, n: int) -> WorkloadSpec:
    """Bounded unrolling of a (possibly infinite) item stream."""
    return WorkloadSpec(tuple(itertools.islice(stream, n)))


# -- ingestion -------------------------------------------------------------


def _items_from_json(doc) -> list:
    if not isinstance(doc, dict) or "items" not in doc:
        raise InputError('workload document must be an object with an "items" list')
    raw = doc["items"]
    if not isinstance(raw, list):
        raise InputError('"items" must be a list')
    items = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise InputError(f"items[{k}]: expected an object")
        if "label" not in entry or entry["label"] in ("", None):
            raise InputError(f"items[{k}].label: missing")
        if "budget" not in entry:
            raise InputError(f"items[{k}].budget: missing")
        label = entry["label"]
        if not isinstance(label, str):
            raise InputError(f"items[{k}].label: must be a string")
        budget = to_number(entry["budget"], f"items[{k}].budget")
        if budget < 0:
            raise InputError(f"items[{k}].budget: negative budget {budget}")
        items.append((label, budget))
    return items


def _items_from_csv(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return []
    missing = {"index", "label", "budget"} - set(reader.fieldnames)
    if missing:
        raise InputError(f"csv header missing columns: {sorted(missing)}")
    rows = []
    for line, row in enumerate(reader, start=2):
        label = (row["label"] or "").strip()
        if not label:
            raise InputError(f"line {line}: label missing")
        try:
            index = int(row["index"])
        except (TypeError, ValueError):
            raise InputError(f"line {line}: bad index {row['index']!r}") from None
        budget = to_number((row["budget"] or "").strip(), f"line {line}: budget")
        if budget < 0:
            raise InputError(f"line {line}: negative budget {budget}")
        rows.append((index, label, budget))
    rows.sort(key=lambda r: r[0])
    return [(label, budget) for _, label, budget in rows]


def parse_workload(text: str, fmt: str = "json") -> WorkloadSpec:
    """Parse a workload document (``fmt`` is ``json`` or ``csv``)."""
    if fmt == "json":
        try:
            doc = json.loads(text, parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {exc.lineno}: malformed JSON ({exc.msg})") from None
        return WorkloadSpec(tuple(_items_from_json(doc)))
    if fmt == "csv":
        return WorkloadSpec(tuple(_items_from_csv(text)))
    raise InputError(f"unknown workload format {fmt!r}")


def load_workload(path, fmt: str | None = None) -> WorkloadSpec:
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    return parse_workload(path.read_text(), fmt)


def workload_to_doc(spec: WorkloadSpec) -> dict:
    return {"items": [{"label": it.label, "budget": it.budget} for it in spec.items]}


def workload_to_csv(spec: WorkloadSpec) -> str:
    from .jsonio import render_number

    lines = ["index,label,budget"]
    for i, it in enumerate(spec.items):
        lines.append(f"{i},{it.label},{render_number(it.budget)}")
    return "\n".join(lines) + "\n"


# -- synthetic generation ----------------------------------------------------

PROFILES = ("uniform", "bursty")


def _draw(rng: random.Random, lo, hi):
    if isinstance(lo, int) and isinstance(hi, int):
        return rng.randint(lo, hi)
    # 6 decimals keeps budgets exact through JSON round trips
    return Fraction(f"{rng.uniform(float(lo), float(hi)):.6f}").limit_denominator(10**6)


def _check_params(profile: str, params: dict) -> dict:
    if profile not in PROFILES:
        raise InputError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    p = {"min": 1, "max": 10, "labels": ["f"], "burst_prob": 0.2, "burst_len": 3}
    p.update({k: v for k, v in params.items() if v is not None})
    lo, hi = p["min"], p["max"]
    for name in ("min", "max"):
        v = p[name]
        if isinstance(v, bool) or not isinstance(v, (int, float, Fraction)):
            raise InputError(f"{name} must be a number")
    if lo < 0 or hi < lo:
        raise InputError(f"invalid budget range [{lo}, {hi}]")
    if not p["labels"] or not all(isinstance(s, str) and s for s in p["labels"]):
        raise InputError("labels must be a non-empty list of non-empty strings")
    if not 0 <= p["burst_prob"] <= 1:
        raise InputError("burst_prob must lie in [0, 1]")
    if not isinstance(p["burst_len"], int) or p["burst_len"] < 1:
        raise InputError("burst_len must be a positive integer")
    return p


def gen_stream(profile: str, seed: int, **params) -> Iterator[Item]:
    """Endless seeded item stream.

    ``uniform`` draws each budget from [min, max]. ``bursty`` alternates calm
    stretches (budgets in the upper half of the range) with bursts of
    ``burst_len`` tight budgets from the lowest quarter.
    """
    p = _check_params(profile, params)
    rng = random.Random(seed)
    lo, hi, labels = p["min"], p["max"], p["labels"]
    if isinstance(lo, int) and isinstance(hi, int):
        q1, mid = lo + (hi - lo) // 4, lo + (hi - lo) // 2
    else:
        q1, mid = lo + (hi - lo) / 4, lo + (hi - lo) / 2
    burst_left = 0
    while True:
        label = labels[rng.randrange(len(labels))]
        if profile == "uniform":
            yield Item(label, _draw(rng, lo, hi))
            continue
        if burst_left == 0 and rng.random() < p["burst_prob"]:
            burst_left = p["burst_len"]
        if burst_left:
            burst_left -= 1
            yield Item(label, _draw(rng, lo, q1))
        else:
            yield Item(label, _draw(rng, mid, hi))


def gen_synthetic(profile: str, n: int, seed: int, **params) -> WorkloadSpec:
    if not isinstance(n, int) or n < 0:
        raise InputError(f"n must be a non-negative integer, got {n!r}")
    return take(gen_stream(profile, seed, **params), n)
