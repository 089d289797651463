"""Reconfigurable machine models: configurations, cost tables, capability order."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType

from .core import InputError, num_leq, to_number


@dataclass(frozen=True)
class CostModel:
    """Per-(configuration, action) time and energy tables.

    ``tau[r][a]`` is the execution time of action ``a`` on configuration ``r``
    and ``gamma[r][a]`` its energy. Switching between two distinct
    configurations costs ``delta`` seconds and ``theta`` joules.
    """

    configs: tuple
    rmax: str
    tau: dict
    gamma: dict
    delta: object = 0
    theta: object = 0
    # optional per-pair overrides; empty means the constant applies
    delta_pairs: dict = field(default_factory=dict)
    theta_pairs: dict = field(default_factory=dict)

    def __post_init__(self):
        configs = tuple(self.configs)
        if not configs:
            raise InputError("model needs at least one configuration")
        if len(set(configs)) != len(configs):
            raise InputError("configuration names must be unique")
        if any(not isinstance(r, str) or not r for r in configs):
            raise InputError("configuration names must be non-empty strings")
        if self.rmax not in configs:
            raise InputError(f"rmax {self.rmax!r} is not a configuration")
        object.__setattr__(self, "configs", configs)
        for name in ("tau", "gamma"):
            table = {
                r: MappingProxyType({a: to_number(v, f"{name}[{r}][{a}]") for a, v in dict(row).items()})
                for r, row in dict(getattr(self, name)).items()
            }
            object.__setattr__(self, name, MappingProxyType(table))
        object.__setattr__(self, "delta", to_number(self.delta, "delta"))
        object.__setattr__(self, "theta", to_number(self.theta, "theta"))

    def _cfg(self, r):
        if r not in self.configs:
            raise InputError(f"unknown configuration {r!r}")
        return r

    def time(self, r, a):
        try:
            return self.tau[self._cfg(r)][a]
        except KeyError:
            raise InputError(f"tau has no entry for ({r}, {a})") from None

    def energy(self, r, a):
        try:
            return self.gamma[self._cfg(r)][a]
        except KeyError:
            raise InputError(f"gamma has no entry for ({r}, {a})") from None

    def with_(self, **changes) -> "CostModel":
        kw = dict(
            configs=self.configs, rmax=self.rmax, tau=self.tau, gamma=self.gamma,
            delta=self.delta, theta=self.theta,
        )
        kw.update(changes)
        return CostModel(**kw)


def reconfig_time(m: CostModel, r, r2):
    m._cfg(r), m._cfg(r2)
    if r == r2:
        return 0
    return m.delta_pairs.get((r, r2), m.delta)


def reconfig_energy(m: CostModel, r, r2):
    m._cfg(r), m._cfg(r2)
    if r == r2:
        return 0
    return m.theta_pairs.get((r, r2), m.theta)


def elementary_leq(m: CostModel, r2, r, alphabet) -> bool:
    """True iff ``r`` is elementarily at least as capable as ``r2``."""
    return all(num_leq(m.time(r, a), m.time(r2, a)) for a in alphabet)


def alphabet_of(m: CostModel) -> frozenset:
    labels = set()
    for row in m.tau.values():
        labels.update(row)
    for row in m.gamma.values():
        labels.update(row)
    return frozenset(labels)


def validate_model(m: CostModel, alphabet=None) -> list[str]:
    """List every broken invariant; an empty list means the model is usable."""
    alphabet = alphabet_of(m) if alphabet is None else frozenset(alphabet)
    out = []
    if m.delta < 0:
        out.append(f"delta: negative ({m.delta})")
    if m.theta < 0:
        out.append(f"theta: negative ({m.theta})")
    for name, table in (("tau", m.tau), ("gamma", m.gamma)):
        for r in table:
            if r not in m.configs:
                out.append(f"{name}[{r}]: unknown configuration")
        for r in m.configs:
            row = table.get(r, {})
            for a in sorted(alphabet):
                if a not in row:
                    out.append(f"{name}[{r}][{a}]: missing")
                elif row[a] < 0:
                    out.append(f"{name}[{r}][{a}]: negative ({row[a]})")
    for r in m.configs:
        for a in sorted(alphabet):
            t_r = m.tau.get(r, {}).get(a)
            t_max = m.tau.get(m.rmax, {}).get(a)
            if t_r is None or t_max is None:
                continue
            if not num_leq(t_max, t_r):
                out.append(f"rmax {m.rmax} slower than {r} on {a}: {t_max} > {t_r}")
    return out


def parse_model(text: str) -> CostModel:
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}: malformed JSON ({exc.msg})") from None
    return model_from_doc(doc)


def model_from_doc(doc) -> CostModel:
    if not isinstance(doc, dict):
        raise InputError("model document must be an object")
    for key in ("configs", "rmax"):
        if key not in doc:
            raise InputError(f"model: missing {key!r}")
    if not isinstance(doc["configs"], list):
        raise InputError('model: "configs" must be a list')
    names, tau, gamma = [], {}, {}
    for k, c in enumerate(doc["configs"]):
        if not isinstance(c, dict) or "name" not in c:
            raise InputError(f"configs[{k}]: missing name")
        name = c["name"]
        if not isinstance(name, str) or not name:
            raise InputError(f"configs[{k}].name: must be a non-empty string")
        for table, key in ((tau, "tau"), (gamma, "gamma")):
            row = c.get(key)
            if not isinstance(row, dict):
                raise InputError(f"configs[{k}].{key}: expected an object of label -> number")
            table[name] = {a: to_number(v, f"configs[{k}].{key}.{a}") for a, v in row.items()}
        names.append(name)
    return CostModel(
        configs=tuple(names),
        rmax=doc["rmax"],
        tau=tau,
        gamma=gamma,
        delta=doc.get("delta", 0),
        theta=doc.get("theta", 0),
    )


def load_model(path) -> CostModel:
    return parse_model(Path(path).read_text())


def model_to_doc(m: CostModel) -> dict:
    return {
        "configs": [
            {"name": r, "tau": dict(m.tau.get(r, {})), "gamma": dict(m.gamma.get(r, {}))}
            for r in m.configs
        ],
        "rmax": m.rmax,
        "delta": m.delta,
        "theta": m.theta,
    }
