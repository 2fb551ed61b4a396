"""Instances, configurations, packings and the basic packing primitives.

A configuration is represented throughout the package as a sorted tuple of
distinct item indices.  That keeps them hashable (column pools are dicts keyed
by configuration) and cheap to compare.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ClassError, InputError, ParameterError, UnsupportedDimensionError

FEAS_EPS = 1e-9

Configuration = tuple  # sorted tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Instance:
    """A vector bin packing instance: ``n`` items with volumes in (0, 1]^d."""

    volumes: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = np.array(self.volumes, dtype=float)
        if v.ndim == 1 and v.size == 0:
            raise InputError("an empty instance needs an explicit dimension; use Instance.empty(d)")
        if v.ndim != 2 or v.shape[1] < 1:
            raise InputError(f"volumes must be an (n, d) array with d >= 1, got shape {v.shape}")
        if v.size and (not np.all(np.isfinite(v)) or np.any(v <= 0.0) or np.any(v > 1.0)):
            raise InputError("every item volume coordinate must lie in (0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "volumes", v)

    @classmethod
    def empty(cls, d: int) -> "Instance":
        return cls(np.zeros((0, d)))

    @classmethod
    def from_items(cls, items: Sequence[Sequence[float]], d: int | None = None, name: str = "") -> "Instance":
        if len(items) == 0:
            if d is None:
                raise InputError("dimension is required for an empty instance")
            return cls(np.zeros((0, d)), name=name)
        inst = cls(np.asarray(items, dtype=float), name=name)
        if d is not None and inst.d != d:
            raise InputError(f"items have dimension {inst.d}, expected {d}")
        return inst

    @property
    def n(self) -> int:
        return self.volumes.shape[0]

    @property
    def d(self) -> int:
        return self.volumes.shape[1]

    def __len__(self) -> int:
        return self.n

    def volume(self, items: Iterable[int]) -> np.ndarray:
        """Total volume vector of ``items``, summed in ascending index order."""
        idx = sorted(items)
        if not idx:
            return np.zeros(self.d)
        return np.add.reduce(self.volumes[idx], axis=0)

    def check_indices(self, items: Iterable[int]) -> list[int]:
        out = []
        for i in items:
            if isinstance(i, (bool, np.bool_)) or not isinstance(i, (int, np.integer)):
                raise InputError(f"item index {i!r} is not an integer")
            if not 0 <= i < self.n:
                raise InputError(f"item index {i} out of range for n={self.n}")
            out.append(int(i))
        return out

    def subset(self, items: Sequence[int]) -> tuple["Instance", list[int]]:
        """Sub-instance on ``items`` plus the map from new index to old index."""
        idx = sorted(self.check_indices(items))
        if not idx:
            return Instance.empty(self.d), []
        return Instance(self.volumes[idx], name=self.name), idx

    def to_dict(self) -> dict:
        return {"d": self.d, "items": [[float(x) for x in row] for row in self.volumes]}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "Instance":
        try:
            d = int(obj["d"])
            items = obj["items"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed instance object: {exc}") from None
        if d < 1:
            raise InputError("d must be a positive integer")
        for row in items:
            if len(row) != d:
                raise InputError(f"item {row!r} does not have {d} coordinates")
        return cls.from_items(items, d=d)

    @classmethod
    def load(cls, path) -> "Instance":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: {exc}") from None
        return cls.from_dict(obj)


def check_configuration(instance: Instance, items: Iterable[int]) -> bool:
    """True iff the items fit in a single bin (up to ``FEAS_EPS``)."""
    idx = instance.check_indices(items)
    if len(set(idx)) != len(idx):
        raise InputError("a configuration cannot repeat an item")
    return bool(np.all(instance.volume(idx) <= 1.0 + FEAS_EPS))


def make_configuration(instance: Instance, items: Iterable[int]) -> Configuration:
    conf = tuple(sorted(instance.check_indices(items)))
    if len(set(conf)) != len(conf):
        raise InputError("a configuration cannot repeat an item")
    if not check_configuration(instance, conf):
        raise InputError(f"items {conf} exceed the bin capacity")
    return conf


@dataclass(frozen=True)
class MultiConfiguration:
    """A multiset of items (item -> positive multiplicity) fitting in one bin."""

    multiplicities: tuple  # sorted tuple of (item, count) pairs

    @classmethod
    def of(cls, mult: Mapping[int, int]) -> "MultiConfiguration":
        pairs = tuple(sorted((int(i), int(c)) for i, c in mult.items() if c))
        if any(c < 0 for _, c in pairs):
            raise InputError("multiplicities must be positive")
        return cls(pairs)

    @classmethod
    def from_set(cls, items: Iterable[int], count: int = 1) -> "MultiConfiguration":
        return cls.of({i: count for i in items})

    def __getitem__(self, item: int) -> int:
        return dict(self.multiplicities).get(item, 0)

    def items(self) -> list[int]:
        return [i for i, _ in self.multiplicities]

    def volume(self, instance: Instance) -> np.ndarray:
        total = np.zeros(instance.d)
        for i, c in self.multiplicities:
            total = total + c * instance.volumes[i]
        return total

    def is_feasible(self, instance: Instance) -> bool:
        return bool(np.all(self.volume(instance) <= 1.0 + FEAS_EPS))

    def __len__(self) -> int:
        return len(self.multiplicities)


@dataclass(frozen=True)
class Packing:
    """Pairwise-disjoint feasible bins whose union is ``covered``."""

    bins: tuple
    covered: frozenset = field(default=frozenset())

    def __post_init__(self):
        bins = tuple(tuple(sorted(int(i) for i in b)) for b in self.bins)
        object.__setattr__(self, "bins", bins)
        if not self.covered:
            object.__setattr__(self, "covered", frozenset(i for b in bins for i in b))

    def __len__(self) -> int:
        return len(self.bins)

    @property
    def size(self) -> int:
        return len(self.bins)

    def violations(self, instance: Instance, target: Iterable[int] | None = None) -> list[str]:
        """Human readable list of everything wrong with this packing."""
        problems = []
        seen: dict[int, int] = {}
        for b, conf in enumerate(self.bins):
            if not conf:
                problems.append(f"bin {b} is empty")
            for i in conf:
                if not 0 <= i < instance.n:
                    problems.append(f"bin {b} holds unknown item {i}")
                    continue
                if i in seen:
                    problems.append(f"item {i} in bins {seen[i]} and {b}")
                seen[i] = b
            valid = [i for i in conf if 0 <= i < instance.n]
            if np.any(instance.volume(valid) > 1.0 + FEAS_EPS):
                problems.append(f"bin {b} overflows: {instance.volume(valid).tolist()}")
        union = set(seen)
        if union != set(self.covered):
            problems.append("bins do not partition the covered set")
        if target is not None and union != set(target):
            missing = sorted(set(target) - union)
            extra = sorted(union - set(target))
            problems.append(f"target mismatch: missing {missing[:10]}, extra {extra[:10]}")
        return problems

    def is_valid(self, instance: Instance, target: Iterable[int] | None = None) -> bool:
        return not self.violations(instance, target)

    def relabel(self, index_map: Sequence[int]) -> "Packing":
        return Packing(tuple(tuple(index_map[i] for i in b) for b in self.bins))

    def to_dict(self) -> dict:
        return {"bins": [list(b) for b in self.bins], "n_bins": len(self.bins)}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "Packing":
        try:
            return cls(tuple(tuple(b) for b in obj["bins"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed solution object: {exc}") from None


def dedup_cover(bins: Iterable[Iterable[int]], target: Iterable[int]) -> Packing:
    """Turn a cover (possibly overlapping) into a partition of ``target``.

    Every item is kept in the first bin that covers it; bins that end up
    empty are dropped.  Subsets of configurations are configurations, so
    feasibility is preserved.
    """
    target = set(target)
    assigned: set[int] = set()
    out = []
    for conf in bins:
        kept = tuple(i for i in sorted(conf) if i in target and i not in assigned)
        if kept:
            assigned.update(kept)
            out.append(kept)
    if assigned != target:
        raise InputError(f"bins do not cover items {sorted(target - assigned)[:10]}")
    return Packing(tuple(out), frozenset(target))


def validate_delta(delta: float) -> int:
    """Check ``delta`` is in (0, 0.1] with an integral inverse; returns 1/delta."""
    try:
        delta = float(delta)
    except (TypeError, ValueError):
        raise ParameterError(f"delta must be a number, got {delta!r}") from None
    if not 0.0 < delta <= 0.1:
        raise ParameterError(f"delta must lie in (0, 0.1], got {delta}")
    inv = round(1.0 / delta)
    if abs(inv * delta - 1.0) > 1e-12:
        raise ParameterError(f"1/delta must be an integer, got 1/{delta} = {1.0 / delta}")
    return inv


@dataclass(frozen=True)
class ItemClass:
    """Large/huge flags for every item of an instance, for a fixed delta."""

    instance: Instance
    delta: float
    is_large: np.ndarray
    is_huge: np.ndarray

    @property
    def large(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.is_large)]

    @property
    def huge(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.is_huge)]

    @property
    def max_class(self) -> int:
        return 2 * round(1.0 / self.delta)

    def large_part(self, conf: Iterable[int]) -> list[int]:
        return [i for i in conf if self.is_large[i]]

    def class_of(self, conf: Iterable[int]) -> int:
        """h if the large part of ``conf`` exceeds 1-delta everywhere and has h items, else 0."""
        big = self.large_part(conf)
        if len(big) < 2:
            return 0
        if np.all(self.instance.volume(big) > 1.0 - self.delta):
            return len(big)
        return 0


def classify(instance: Instance, delta: float) -> ItemClass:
    validate_delta(delta)
    v = instance.volumes
    if instance.n == 0:
        flags = np.zeros(0, dtype=bool)
        return ItemClass(instance, delta, flags, flags.copy())
    is_large = np.any(v > delta, axis=1)
    if instance.d == 2:
        is_huge = np.all(v >= 1.0 - delta, axis=1)
    else:
        is_huge = np.zeros(instance.n, dtype=bool)
    is_large.setflags(write=False)
    is_huge.setflags(write=False)
    return ItemClass(instance, delta, is_large, is_huge)


def _first_fit_order(instance: Instance, items: list[int], decreasing: bool) -> list[int]:
    if not decreasing:
        return sorted(items)
    key = instance.volumes[items].max(axis=1) if items else []
    # stable: ties keep ascending index
    return [items[j] for j in sorted(range(len(items)), key=lambda j: (-key[j], items[j]))]


def first_fit(instance: Instance, subset: Iterable[int] | None = None, decreasing: bool = False) -> Packing:
    """First-Fit over ``subset`` in ascending index order (or max-coordinate decreasing)."""
    items = list(range(instance.n)) if subset is None else instance.check_indices(subset)
    if len(set(items)) != len(items):
        raise InputError("subset contains duplicates")
    order = _first_fit_order(instance, sorted(items), decreasing)
    bins: list[list[int]] = []
    loads: list[np.ndarray] = []
    v = instance.volumes
    for i in order:
        for b, load in enumerate(loads):
            new = load + v[i]
            if np.all(new <= 1.0 + FEAS_EPS):
                bins[b].append(i)
                loads[b] = new
                break
        else:
            bins.append([i])
            loads.append(v[i].copy())
    return Packing(tuple(tuple(b) for b in bins), frozenset(items))


def first_fit_bound(instance: Instance, subset: Iterable[int]) -> float:
    """The First-Fit guarantee 2 * sum_t v_t(S) + 1."""
    return 2.0 * float(instance.volume(subset).sum()) + 1.0


def volume_lower_bound(instance: Instance, subset: Iterable[int] | None = None) -> int:
    items = range(instance.n) if subset is None else subset
    vol = instance.volume(items)
    if vol.size == 0:
        return 0
    # tolerate float drift right at an integer
    return int(math.ceil(float(vol.max()) - FEAS_EPS))


def split_huge(instance: Instance, delta: float) -> tuple[list[int], list[int]]:
    """Separate the delta-huge items; returns (huge, residual) index lists."""
    if instance.d != 2:
        raise UnsupportedDimensionError(f"huge items are defined for d=2 only, got d={instance.d}")
    cls = classify(instance, delta)
    huge = cls.huge
    residual = [i for i in range(instance.n) if not cls.is_huge[i]]
    return huge, residual


def recombine(residual_packing: Packing, huge: Sequence[int], residual_map: Sequence[int] | None = None) -> Packing:
    """One bin per huge item plus the (relabelled) packing of the residual."""
    res = residual_packing.relabel(residual_map) if residual_map is not None else residual_packing
    bins = tuple((i,) for i in huge) + res.bins
    return Packing(bins, frozenset(huge) | res.covered)


def require_class(cls: ItemClass, conf: Configuration, allowed) -> int:
    h = cls.class_of(conf)
    if h not in allowed:
        raise ClassError(f"configuration {conf} has class {h}, expected one of {sorted(allowed)}")
    return h
