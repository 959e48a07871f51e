"""Shared builders for hand-made test data."""

from fractions import Fraction

from halfhandle.morse_data import (
    Ambient,
    CriticalPoint,
    Flags,
    Kind,
    MorseDatum,
)
from halfhandle.slice_topology import (
    ComponentEffect,
    EffectKind,
    SliceComplex,
    SliceComponent,
)
from halfhandle.trajectory import FlowEdge, Locus, TrajectoryGraph


def comp(cid, touch=True):
    return SliceComponent(cid, touch)


def pt(pid, kind, index, value):
    return CriticalPoint(pid, kind, index, Fraction(value))


def eff(at, kind, inputs, outputs):
    return ComponentEffect(at, kind, tuple(inputs), tuple(outputs))


def edge(src, dst, count, locus):
    return FlowEdge(src, dst, count, locus)


def datum(m, n, bottom, points, edges, effects, flags=None):
    return MorseDatum(
        Ambient(m, n),
        tuple(points),
        TrajectoryGraph(tuple(edges)),
        SliceComplex(tuple(bottom), tuple(effects)),
        flags if flags is not None else Flags(),
    )


def birth_merge_pair(n=1, m=None):
    """Minimal cancellable interior pair: a sphere born then absorbed."""
    m = m if m is not None else n + 2
    return datum(
        m,
        n,
        [comp("c0", True)],
        [pt("p", Kind.INTERIOR, 0, Fraction(1, 3)),
         pt("q", Kind.INTERIOR, 1, Fraction(2, 3))],
        [edge("p", "q", 1, Locus.INNER)],
        [eff("p", EffectKind.BIRTH, (), (comp("c1", False),)),
         eff("q", EffectKind.MERGE, ("c0", "c1"), (comp("c2", True),))],
    )


def internal_chain_pair(n=4, k=2, m=None):
    """Cancellable pair of internal surgeries at indices k, k+1."""
    m = m if m is not None else n + 2
    return datum(
        m,
        n,
        [comp("c0", True)],
        [pt("p", Kind.INTERIOR, k, Fraction(1, 3)),
         pt("q", Kind.INTERIOR, k + 1, Fraction(2, 3))],
        [edge("p", "q", 1, Locus.INNER)],
        [eff("p", EffectKind.INTERNAL, ("c0",), (comp("c1", True),)),
         eff("q", EffectKind.INTERNAL, ("c1",), (comp("c2", True),))],
    )


def split_death_pair(n=2, m=None):
    """Cancellable pair: a split shedding a closed half that then dies."""
    m = m if m is not None else n + 2
    return datum(
        m,
        n,
        [comp("c0", True)],
        [pt("p", Kind.INTERIOR, n, Fraction(1, 3)),
         pt("q", Kind.INTERIOR, n + 1, Fraction(2, 3))],
        [edge("p", "q", 1, Locus.INNER)],
        [eff("p", EffectKind.SPLIT, ("c0",),
             (comp("c1", True), comp("c2", False))),
         eff("q", EffectKind.DEATH, ("c2",), ())],
    )


def attach_chain_pair(kind, k, n=3, m=None):
    """Cancellable boundary pair: two chained one-to-one attaches."""
    m = m if m is not None else n + 2
    return datum(
        m,
        n,
        [comp("c0", True)],
        [pt("p", kind, k, Fraction(1, 3)),
         pt("q", kind, k + 1, Fraction(2, 3))],
        [edge("p", "q", 1, Locus.WALL)],
        [eff("p", EffectKind.BOUNDARY_ATTACH, ("c0",), (comp("c1", True),)),
         eff("q", EffectKind.BOUNDARY_ATTACH, ("c1",), (comp("c2", True),))],
    )
