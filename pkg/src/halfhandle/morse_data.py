"""Core data model for Morse data of an embedded cobordism with boundary.

The ambient space is Z x [0,1] with dim Z = m.  Inside it sits a compact
cobordism of dimension n+1 whose boundary splits into a bottom piece (over
level 0), a top piece (over level 1) and a vertical wall running between
them.  Projection to [0,1] restricts to a Morse function on the cobordism;
its critical points each carry a kind (interior, boundary stable, boundary
unstable), a Morse index and an exact rational critical value in (0,1).

A full datum holds the critical points, the graph of flow lines between
them, and a combinatorial record of how level set components change when a
critical value is crossed.  Everything is immutable; rewriting steps build
new data, which keeps move scripts replayable.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import (
    InvalidIndexKind,
    PartialConfiguration,
    UnknownId,
    ValidationError,
)

_ID_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class Kind(str, enum.Enum):
    """How a critical point sits relative to the vertical boundary wall.

    Interior points sit away from the wall.  Boundary points sit on the
    wall and come in two flavours, depending on whether the flow near the
    point pushes into the cobordism (stable) or out of it (unstable).
    """

    INTERIOR = "interior"
    BOUNDARY_STABLE = "boundary_stable"
    BOUNDARY_UNSTABLE = "boundary_unstable"

    @property
    def is_boundary(self) -> bool:
        return self is not Kind.INTERIOR


@dataclass(frozen=True)
class Ambient:
    """Dimension bookkeeping: slices of the big manifold are m-dimensional,
    the cobordism is (n+1)-dimensional, so its level sets are n-dimensional.
    """

    m: int
    n: int

    def __post_init__(self):
        if not isinstance(self.m, int) or not isinstance(self.n, int):
            raise ValidationError("ambient dimensions must be integers")
        if self.n < 1:
            raise ValidationError("need n >= 1, got n=%r" % (self.n,))
        if self.m < self.n + 1:
            raise ValidationError(
                "need m >= n+1, got m=%r with n=%r" % (self.m, self.n)
            )

    @property
    def codim(self) -> int:
        return self.m - self.n


def index_bounds(kind: Kind, n: int):
    """Smallest and largest Morse index a point of this kind may carry."""
    if kind is Kind.INTERIOR:
        return 0, n + 1
    if kind is Kind.BOUNDARY_STABLE:
        return 1, n + 1
    return 0, n


def check_index_kind(kind: Kind, index: int, n: int) -> None:
    lo, hi = index_bounds(kind, n)
    if not (lo <= index <= hi):
        raise InvalidIndexKind(
            "index %d out of range [%d, %d] for %s with n=%d"
            % (index, lo, hi, kind.value, n)
        )


@dataclass(frozen=True)
class CriticalPoint:
    """One critical point: id, kind, Morse index and exact critical value."""

    id: str
    kind: Kind
    index: int
    value: Fraction

    def __post_init__(self):
        if not _ID_RE.match(self.id or ""):
            raise ValidationError("bad point id %r" % (self.id,))
        if not isinstance(self.index, int) or self.index < 0:
            raise ValidationError("bad index %r for point %r" % (self.index, self.id))
        value = Fraction(self.value)
        if not (0 < value < 1):
            raise ValidationError(
                "critical value %s of %r not strictly inside (0,1)" % (value, self.id)
            )
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "kind", Kind(self.kind))

    def sort_key(self):
        return (self.value, self.id)


@dataclass(frozen=True)
class DimensionProfile:
    """Dimensions of the six pieces of stable and unstable set at a point.

    ``stable_membrane`` and ``unstable_membrane`` live in the ambient space
    outside the cobordism.  The ``inner`` pair lives in the cobordism away
    from the wall, the ``wall`` pair inside the wall.  ``None`` marks a
    piece that is empty for the given point kind.
    """

    stable_membrane: int
    unstable_membrane: int
    stable_inner: Optional[int]
    unstable_inner: Optional[int]
    stable_wall: Optional[int]
    unstable_wall: Optional[int]

    def as_tuple(self):
        return (
            self.stable_membrane,
            self.unstable_membrane,
            self.stable_inner,
            self.unstable_inner,
            self.stable_wall,
            self.unstable_wall,
        )


def dimension_profile(kind: Kind, index: int, n: int) -> DimensionProfile:
    """Dimension profile of a critical point of the given kind and index.

    Raises InvalidIndexKind when the (kind, index) pair cannot occur on an
    n-dimensional level set.  Valid pairs never produce negative entries.
    """
    kind = Kind(kind)
    check_index_kind(kind, index, n)
    k = index
    if kind is Kind.INTERIOR:
        return DimensionProfile(k + 1, n + 2 - k, k, n + 1 - k, None, None)
    if kind is Kind.BOUNDARY_STABLE:
        return DimensionProfile(k + 1, n + 2 - k, k, None, k - 1, n + 1 - k)
    return DimensionProfile(k + 1, n + 2 - k, None, n + 1 - k, k, n - k)


def is_admissible(
    points: Sequence[CriticalPoint],
    values: Optional[Mapping[str, Fraction]] = None,
) -> bool:
    """Whether the point values follow the admissible order.

    Lower index must sit at a strictly lower value, and when a boundary
    stable and a boundary unstable point share an index the stable one must
    sit strictly lower.  Equal-index, equal-value pairs are fine otherwise.
    With ``values`` given, judge that assignment instead of the stored
    values; it must cover every point.
    """
    vals = {}
    for p in points:
        if values is None:
            vals[p.id] = p.value
        elif p.id in values:
            vals[p.id] = Fraction(values[p.id])
        else:
            raise PartialConfiguration("no target value for point %r" % (p.id,))
    for z in points:
        for w in points:
            if z.id == w.id:
                continue
            if z.index < w.index and not (vals[z.id] < vals[w.id]):
                return False
            if (
                z.index == w.index
                and z.kind is Kind.BOUNDARY_STABLE
                and w.kind is Kind.BOUNDARY_UNSTABLE
                and not (vals[z.id] < vals[w.id])
            ):
                return False
    return True


@dataclass(frozen=True)
class Flags:
    """Asserted global properties of the cobordism.

    Each flag promises the absence of closed (wall-avoiding) connected
    components: of the whole cobordism, of the bottom level set, and of the
    top level set.  The normal form driver needs all three.
    """

    no_closed_cobordism: bool = True
    no_closed_bottom: bool = True
    no_closed_top: bool = True


@dataclass(frozen=True)
class MorseDatum:
    """A complete symbolic Morse datum.

    Points are kept sorted by (value, id); that order is also the replay
    order for the slice effects, so two data with equal fields behave
    identically everywhere.
    """

    ambient: Ambient
    points: tuple
    graph: object  # TrajectoryGraph
    slices: object  # SliceComplex
    flags: Flags = Flags()

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=lambda p: p.sort_key()))
        seen = set()
        for p in pts:
            if p.id in seen:
                raise ValidationError("duplicate point id %r" % (p.id,))
            seen.add(p.id)
        object.__setattr__(self, "points", pts)

    def point(self, point_id: str) -> CriticalPoint:
        for p in self.points:
            if p.id == point_id:
                return p
        raise UnknownId("no critical point with id %r" % (point_id,))

    def has_point(self, point_id: str) -> bool:
        return any(p.id == point_id for p in self.points)

    def values(self):
        return {p.id: p.value for p in self.points}

    def interior_points(self, lo=None, hi=None):
        """Interior points, optionally restricted to an index range."""
        out = []
        for p in self.points:
            if p.kind is not Kind.INTERIOR:
                continue
            if lo is not None and p.index < lo:
                continue
            if hi is not None and p.index > hi:
                continue
            out.append(p)
        return out

    def replace(self, **kw) -> "MorseDatum":
        return replace(self, **kw)


def validate_datum(datum: MorseDatum) -> list:
    """Full invariant report; an empty list means the datum is valid.

    Covers index ranges, flow graph side conditions (strict value order,
    genericity, loci), slice effect replay, and the closed-component flags.
    """
    from . import slice_topology, trajectory  # local import, avoids a cycle

    issues = []
    n = datum.ambient.n
    for p in datum.points:
        try:
            check_index_kind(p.kind, p.index, n)
        except InvalidIndexKind as exc:
            issues.append("point %s: %s" % (p.id, exc))
    issues.extend(trajectory.graph_issues(datum.ambient, datum.points, datum.graph))
    issues.extend(
        slice_topology.slice_issues(datum.ambient, datum.points, datum.slices)
    )
    issues.extend(
        slice_topology.flag_issues(
            datum.ambient, datum.points, datum.slices, datum.flags
        )
    )
    return issues


def is_valid_datum(datum: MorseDatum) -> bool:
    return not validate_datum(datum)
