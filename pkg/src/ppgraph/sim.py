"""Multi-type point processes on the unit square with known dependence.

Poisson types are independent of everything. Cluster types attach to one or
more parent groups; every type in a group scatters offspring around the
same realised parents, which couples those types. Offspring positions wrap
around the torus so intensities stay homogeneous up to the boundary.

Random numbers come from numpy's PCG64 bit generator seeded with the SimSpec
64-bit seed, and are drawn in a fixed order: parents per group (ascending
group id), then each type in declaration order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .pattern import MultiTypePointPattern, ObservationWindow, ValidationError


@dataclass(frozen=True)
class PoissonType:
    intensity: float

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValidationError(f"intensity must be positive, got {self.intensity}")


@dataclass(frozen=True)
class ClusterType:
    """Offspring of the parents in ``groups``; ``mean_offspring`` per parent."""

    parent_intensity: float
    mean_offspring: float
    sigma: float
    groups: tuple[int, ...] = (1,)

    def __post_init__(self):
        groups = (self.groups,) if isinstance(self.groups, int) else tuple(self.groups)
        object.__setattr__(self, "groups", tuple(int(g) for g in groups))
        for name in ("parent_intensity", "mean_offspring", "sigma"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.groups or len(set(self.groups)) != len(self.groups):
            raise ValidationError(f"groups must be a nonempty set of ids, got {self.groups}")


TypeModel = Union[PoissonType, ClusterType]


@dataclass(frozen=True)
class SimSpec:
    types: Mapping[str, TypeModel]
    seed: int = 0
    parent_intensities: dict[int, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "types", dict(self.types))
        if not self.types:
            raise ValidationError("a simulation needs at least one type")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must fit in 64 unsigned bits")
        rho: dict[int, float] = {}
        for label, model in self.types.items():
            if not isinstance(model, (PoissonType, ClusterType)):
                raise ValidationError(f"unknown model for {label!r}: {model!r}")
            if isinstance(model, ClusterType):
                for g in model.groups:
                    if rho.setdefault(g, model.parent_intensity) != model.parent_intensity:
                        raise ValidationError(
                            f"group {g} has conflicting parent intensities "
                            f"{rho[g]} and {model.parent_intensity}")
        object.__setattr__(self, "parent_intensities", dict(sorted(rho.items())))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.types)

    def with_seed(self, seed: int) -> "SimSpec":
        return SimSpec(self.types, seed)


def simulate(spec: SimSpec) -> MultiTypePointPattern:
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    parents = {}
    for g, rho in spec.parent_intensities.items():
        n = rng.poisson(rho)
        parents[g] = rng.random((n, 2))

    xs, ys, ms = [], [], []
    for m, model in enumerate(spec.types.values()):
        if isinstance(model, PoissonType):
            n = rng.poisson(model.intensity)
            pts = rng.random((n, 2))
        else:
            chunks = []
            for g in model.groups:
                par = parents[g]
                k = rng.poisson(model.mean_offspring, size=len(par))
                centres = np.repeat(par, k, axis=0)
                offsets = rng.normal(0.0, model.sigma, size=centres.shape)
                chunks.append(np.mod(centres + offsets, 1.0))
            pts = np.concatenate(chunks) if chunks else np.empty((0, 2))
        xs.append(pts[:, 0])
        ys.append(pts[:, 1])
        ms.append(np.full(len(pts), m))
    return MultiTypePointPattern(ObservationWindow.unit(), spec.labels,
                                 np.concatenate(xs), np.concatenate(ys), np.concatenate(ms))


def structure_of(spec: SimSpec) -> set[tuple[str, str]]:
    """Pairs of types that share a parent group, as sorted label pairs."""
    edges = set()
    for (a, ma), (b, mb) in itertools.combinations(spec.types.items(), 2):
        ga = set(getattr(ma, "groups", ()))
        gb = set(getattr(mb, "groups", ()))
        if ga & gb:
            edges.add(tuple(sorted((a, b))))
    return edges
