"""Experiment registry and realizable/total parameter classification.

An experiment is declared by the parameter labels it can observe. A query
(a set of labels) is *realizable* when some single experiment observes all
of it. Otherwise it is a *total parameter*: a tuple gathered from
complementary experiments that no one experiment can produce.

Text format, one experiment per line::

    # Bell setup
    11: lambda_11, mu_11
    12: lambda_12, mu_12
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Union


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentDef:
    id: str
    parameters: frozenset[str]

    def __post_init__(self) -> None:
        if not self.id:
            raise RegistryError("experiment id must be nonempty")
        object.__setattr__(self, "parameters", frozenset(self.parameters))
        if not self.parameters:
            raise RegistryError(f"experiment {self.id!r} declares no parameters")
        if any(not label for label in self.parameters):
            raise RegistryError(f"experiment {self.id!r} has an empty label")


@dataclass(frozen=True)
class Realizable:
    experiments: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.experiments:
            raise ValueError("Realizable needs at least one experiment id")

    def __str__(self) -> str:
        return f"Realizable({', '.join(self.experiments)})"


@dataclass(frozen=True)
class TotalParameter:
    def __str__(self) -> str:
        return "TotalParameter"


Classification = Union[Realizable, TotalParameter]


@dataclass(frozen=True)
class Registry:
    """Immutable set of experiments; :meth:`register` returns a new registry."""

    experiments: tuple[ExperimentDef, ...] = ()

    def __len__(self) -> int:
        return len(self.experiments)

    def __contains__(self, experiment_id: str) -> bool:
        return any(e.id == experiment_id for e in self.experiments)

    @property
    def labels(self) -> frozenset[str]:
        return frozenset().union(*(e.parameters for e in self.experiments))

    def register(self, definition: ExperimentDef) -> "Registry":
        if definition.id in self:
            raise RegistryError(f"duplicate experiment id {definition.id!r}")
        return Registry(self.experiments + (definition,))


def register_experiment(registry: Registry, definition: ExperimentDef) -> Registry:
    return registry.register(definition)


def classify(registry: Registry, query: Iterable[str]) -> Classification:
    query = frozenset(query)
    if not query:
        raise RegistryError("empty query")
    unknown = query - registry.labels
    if unknown:
        raise RegistryError(f"unknown parameter label(s): {', '.join(sorted(unknown))}")
    covering = sorted(e.id for e in registry.experiments if query <= e.parameters)
    if covering:
        return Realizable(tuple(covering))
    return TotalParameter()


def realism_assumption_holds(registry: Registry, query: Iterable[str]) -> bool:
    """Whether the labels can be treated as jointly existing values of one experiment."""
    return isinstance(classify(registry, query), Realizable)


def parse_registry(text: str) -> Registry:
    registry = Registry()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        exp_id, sep, rest = line.partition(":")
        if not sep:
            raise RegistryError(f"line {lineno}: expected 'id: label, label, ...'")
        labels = [label.strip() for label in rest.split(",")]
        if any(not label for label in labels):
            raise RegistryError(f"line {lineno}: empty label")
        if len(set(labels)) != len(labels):
            raise RegistryError(f"line {lineno}: repeated label")
        try:
            registry = registry.register(ExperimentDef(exp_id.strip(), frozenset(labels)))
        except RegistryError as exc:
            raise RegistryError(f"line {lineno}: {exc}") from None
    return registry


def load_registry(path: str | os.PathLike) -> Registry:
    with open(path, encoding="utf-8") as fh:
        return parse_registry(fh.read())


def format_registry(registry: Registry) -> str:
    return "".join(
        f"{e.id}: {', '.join(sorted(e.parameters))}\n" for e in registry.experiments
    )


def bell_registry() -> Registry:
    """Four Bell experiments: setting i at A and j at B, observing lambda_ij and mu_ij."""
    registry = Registry()
    for i in (1, 2):
        for j in (1, 2):
            registry = registry.register(
                ExperimentDef(f"{i}{j}", frozenset({f"lambda_{i}{j}", f"mu_{i}{j}"}))
            )
    return registry


def medical_registry() -> Registry:
    """Two complementary treatments a and b that cannot both be given to one patient."""
    return (
        Registry()
        .register(ExperimentDef("a", frozenset({"lambda_a"})))
        .register(ExperimentDef("b", frozenset({"lambda_b"})))
    )
