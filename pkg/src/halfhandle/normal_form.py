"""Driving Morse data to the boundary half-handle splitting normal form.

The pipeline schedules critical values by index (stable boundary points
below interior points below unstable ones, per index), checks the band
structure this produces, rearranges surgeries of extreme index onto wall
components, splits every interior point of index 1..n into a boundary
stable / unstable pair, and finally packs every point into its own labelled
segment of [0,1].  The result is a decomposition into elementary pieces,
each holding the points of a single kind and index, together with the full
move script that got there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import (
    BadLevels,
    MoveError,
    PipelineBlocked,
    StuckNoJoinablePoint,
)
from .morse_data import Kind, MorseDatum
from .moves import (
    MoveRecord,
    assign_values,
    component_wall_bits,
    realize_configuration,
    split_interior,
)

def scheduled_rank(kind: Kind, index: int) -> int:
    """Position of a (kind, index) cell in the scheduled vertical order.

    Per index: stable attaches first, interior surgeries second, unstable
    attaches third.  Surgery dependencies in well formed data only point
    from lower rank to higher rank (or within one cell, upward in value).
    """
    offset = {Kind.BOUNDARY_STABLE: 1, Kind.INTERIOR: 2, Kind.BOUNDARY_UNSTABLE: 3}
    return 3 * index + offset[Kind(kind)]


def schedule_levels(datum: MorseDatum) -> Dict[str, Fraction]:
    """Target value for every point: its rank over a common denominator."""
    denom = 3 * datum.ambient.n + 6
    return {
        p.id: Fraction(scheduled_rank(p.kind, p.index), denom) for p in datum.points
    }


def band_levels(n: int) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """Cuts (a, c, d, b) bounding the bands of the scheduled configuration.

    Index-0 points and stable index-1 points live below a, the interior
    index-1 level sits in (a, c), the interior index-n level in (d, b),
    everything of index n+1 (and unstable index-n points) above b, and the
    rest strictly between c and d.  For n = 1 the two middle bands agree
    (a = d, c = b) because index 1 and index n coincide.
    """
    denom = 6 * n + 12
    return (
        Fraction(9, denom),
        Fraction(11, denom),
        Fraction(6 * n + 3, denom),
        Fraction(6 * n + 5, denom),
    )


def _category(p, n: int) -> str:
    if p.index == 0 or (p.kind is Kind.BOUNDARY_STABLE and p.index == 1):
        return "low"
    if p.index == n + 1 or (p.kind is Kind.BOUNDARY_UNSTABLE and p.index == n):
        return "high"
    if p.kind is Kind.INTERIOR and p.index == 1:
        return "join_low"
    if p.kind is Kind.INTERIOR and p.index == n:
        return "join_high"
    return "middle"


def tsa_check(
    datum: MorseDatum, a: Fraction, c: Fraction, d: Fraction, b: Fraction
) -> bool:
    """Whether the values show the band structure the driver relies on.

    The four cuts must satisfy 0 < a < c <= d < b < 1 (with a = d and
    c = b when n = 1); otherwise BadLevels.  Returns True when every point
    sits strictly inside the band of its category and the interior points
    of index 1, and of index n, each share a single level.
    """
    n = datum.ambient.n
    a, c, d, b = Fraction(a), Fraction(c), Fraction(d), Fraction(b)
    shape_ok = 0 < a < c < 1 and 0 < d < b < 1
    if n == 1:
        shape_ok = shape_ok and a == d and c == b
    else:
        shape_ok = shape_ok and c <= d
    if not shape_ok:
        raise BadLevels("cuts %s, %s, %s, %s are not banded" % (a, c, d, b))

    bands = {
        "low": (Fraction(0), a),
        "join_low": (a, c),
        "middle": (c, d),
        "join_high": (d, b),
        "high": (b, Fraction(1)),
    }
    shared: Dict[str, Fraction] = {}
    for p in datum.points:
        if p.value in (a, c, d, b):
            return False
        cat = _category(p, n)
        lo, hi = bands[cat]
        if not (lo < p.value < hi):
            return False
        if cat in ("join_low", "join_high"):
            if shared.setdefault(cat, p.value) != p.value:
                return False
    return True


def _joinable(datum: MorseDatum, point_id: str) -> bool:
    """Surgery input touching the wall; positional-free (wall bits are
    fixed per component), unlike the general wall query."""
    bits = component_wall_bits(datum)
    effect = datum.slices.effect_for(point_id)
    return any(bits[cid] for cid in effect.inputs)


def _dependency_order(datum: MorseDatum, group_ids) -> List[str]:
    """Order a same-level group with producers before their consumers.

    The replay at the shared level already runs in id order, so these
    dependencies can never form a cycle on a consistent datum.  Ties go to
    the smaller id, keeping the output deterministic.
    """
    ids = sorted(group_ids)
    produced: Dict[str, str] = {}
    for pid in ids:
        for cid in datum.slices.effect_for(pid).output_ids():
            produced[cid] = pid
    deps = {pid: set() for pid in ids}
    for pid in ids:
        for cid in datum.slices.effect_for(pid).inputs:
            maker = produced.get(cid)
            if maker is not None and maker != pid:
                deps[pid].add(maker)
    order: List[str] = []
    placed: set = set()
    while len(order) < len(ids):
        free = [p for p in ids if p not in placed and deps[p] <= placed]
        if not free:
            raise StuckNoJoinablePoint(
                "circular surgery dependency at one level: %s"
                % ", ".join(p for p in ids if p not in placed)
            )
        order.append(free[0])
        placed.add(free[0])
    return order


def ensure_joinable(
    datum: MorseDatum, levels=None
) -> Tuple[MorseDatum, List[MoveRecord]]:
    """Pull the shared extreme-index levels apart so every point splits.

    The interior index-1 points spread over distinct levels of (a, c) and
    the interior index-n points over (d, b), producers below consumers so
    the surgeries keep replaying; for n = 1 those are the same group and
    the same band.  Every one of them, and every middle-index interior
    point, must join the wall (some surgery input touching it); otherwise
    StuckNoJoinablePoint.
    """
    n = datum.ambient.n
    a, c, d, b = levels if levels is not None else band_levels(n)
    if not tsa_check(datum, a, c, d, b):
        raise BadLevels("joinability pass needs the band structure in place")

    script: List[MoveRecord] = []
    d_cur = datum

    def separate(group, upward, note):
        # slots stay strictly on one side of the shared level, and points
        # leave it producers first (consumers first when going up), so no
        # intermediate state ever starves a surgery still waiting there
        nonlocal d_cur
        if len(group) < 2:
            return
        shared = d_cur.point(group[0]).value
        lo, hi = (shared, b) if upward else (a, shared)
        order = _dependency_order(d_cur, group)
        slots = {
            pid: lo + (hi - lo) * Fraction(t, len(order) + 1)
            for t, pid in enumerate(order, 1)
        }
        for pid in reversed(order) if upward else order:
            d_cur, rec = assign_values(d_cur, {pid: slots[pid]}, note)
            script.append(rec)

    separate([p.id for p in d_cur.interior_points(1, 1)], False, "join_low")
    if n > 1:
        separate([p.id for p in d_cur.interior_points(n, n)], True, "join_high")

    for p in d_cur.interior_points(1, n):
        if not _joinable(d_cur, p.id):
            raise StuckNoJoinablePoint(
                "interior point %s never joins the wall" % (p.id,)
            )
    return d_cur, script


# ---------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True)
class Segment:
    """One labelled interval of the decomposition with its contents."""

    label: str
    lo: Fraction
    hi: Fraction
    point_ids: Tuple[str, ...]
    cert: Tuple  # expected contents, e.g. ("interior", 0) or ("mid",)


@dataclass(frozen=True)
class Decomposition:
    style: str  # "half_handle" | "monotone" | "trivial"
    segments: Tuple[Segment, ...]


def _half_handle_label(p, n: int) -> Optional[Fraction]:
    if p.kind is Kind.INTERIOR:
        if p.index == 0:
            return Fraction(-1, 2)
        if p.index == n + 1:
            return Fraction(n + 1)
        return None  # interior 1..n still needs splitting
    if p.kind is Kind.BOUNDARY_UNSTABLE:
        return Fraction(p.index)
    return Fraction(2 * p.index - 1, 2)  # boundary stable


def _half_handle_cert(label: Fraction, n: int) -> Tuple:
    if label == Fraction(-1, 2):
        return (Kind.INTERIOR.value, 0)
    if label == Fraction(n + 1):
        return (Kind.INTERIOR.value, n + 1)
    if label.denominator == 1:
        return (Kind.BOUNDARY_UNSTABLE.value, int(label))
    return (Kind.BOUNDARY_STABLE.value, int(label + Fraction(1, 2)))


def derive_half_handle_decomposition(datum: MorseDatum) -> Optional[Decomposition]:
    """Read the normal form decomposition off the values, if they show it.

    The 2n+4 segments of equal width 1/(2n+4) carry labels -1/2, 0, 1/2,
    ..., n+1; the segment labelled i holds the unstable index-i points,
    i + 1/2 the stable index-(i+1) points, and the two extremes the
    interior minima and maxima.  Returns None when some point is not
    strictly inside its segment or an interior point of index 1..n remains.
    """
    n = datum.ambient.n
    denom = 2 * n + 4
    labels = [Fraction(-1, 2) + Fraction(i, 2) for i in range(denom)]
    members: Dict[Fraction, List[str]] = {lab: [] for lab in labels}
    for p in datum.points:
        lab = _half_handle_label(p, n)
        if lab is None:
            return None
        lo = Fraction(2 * lab + 1, denom)
        hi = Fraction(2 * lab + 2, denom)
        if not (lo < p.value < hi):
            return None
        members[lab].append(p.id)
    segments = []
    for lab in labels:
        segments.append(
            Segment(
                label=str(lab),
                lo=Fraction(2 * lab + 1, denom),
                hi=Fraction(2 * lab + 2, denom),
                point_ids=tuple(members[lab]),
                cert=_half_handle_cert(lab, n),
            )
        )
    return Decomposition("half_handle", tuple(segments))


def derive_monotone_decomposition(datum: MorseDatum) -> Optional[Decomposition]:
    """Codimension-one shape: a low piece (indices 0 and 1), singleton
    middle pieces with weakly increasing indices, and a high piece
    (indices n and n+1).  Values must be strictly index monotone."""
    n = datum.ambient.n
    if n < 2:
        return None
    for z in datum.points:
        for w in datum.points:
            if z.index < w.index and not (z.value < w.value):
                return None
    low = [p for p in datum.points if p.index <= 1]
    mids = [p for p in datum.points if 2 <= p.index <= n - 1]
    high = [p for p in datum.points if p.index >= n]
    vals = [p.value for p in mids]
    if len(set(vals)) != len(vals):
        return None  # two middle points share a level, no singleton segments
    low_hi = max([p.value for p in low], default=Fraction(0))
    high_lo = min([p.value for p in high], default=Fraction(1))
    cuts = [Fraction(0)]
    anchors = [low_hi] + [p.value for p in mids] + [high_lo]
    for x, y in zip(anchors, anchors[1:]):
        cuts.append((x + y) / 2)
    cuts.append(Fraction(1))
    segments = [
        Segment(
            "low", cuts[0], cuts[1], tuple(p.id for p in low), ("low",)
        )
    ]
    for i, p in enumerate(mids):
        segments.append(
            Segment("mid%d" % (i + 1), cuts[i + 1], cuts[i + 2], (p.id,), ("mid",))
        )
    segments.append(
        Segment("high", cuts[-2], cuts[-1], tuple(p.id for p in high), ("high",))
    )
    return Decomposition("monotone", tuple(segments))


def _trivial_decomposition(datum: MorseDatum) -> Decomposition:
    return Decomposition(
        "trivial",
        (
            Segment(
                "all",
                Fraction(0),
                Fraction(1),
                tuple(p.id for p in datum.points),
                ("any",),
            ),
        ),
    )


def verify_decomposition(datum: MorseDatum, dec: Decomposition) -> bool:
    """Independent check that a decomposition really describes the datum."""
    segs = dec.segments
    if not segs:
        return False
    if segs[0].lo != 0 or segs[-1].hi != 1:
        return False
    for s, t in zip(segs, segs[1:]):
        if s.hi != t.lo:
            return False
    placed = {}
    for s in segs:
        if not (s.lo < s.hi):
            return False
        for pid in s.point_ids:
            if pid in placed or not datum.has_point(pid):
                return False
            placed[pid] = s
            if not (s.lo < datum.point(pid).value < s.hi):
                return False
    if set(placed) != {p.id for p in datum.points}:
        return False

    n = datum.ambient.n
    if dec.style == "half_handle":
        denom = 2 * n + 4
        if len(segs) != denom:
            return False
        labels = [Fraction(-1, 2) + Fraction(i, 2) for i in range(denom)]
        for lab, s in zip(labels, segs):
            if s.label != str(lab):
                return False
            if s.lo != Fraction(2 * lab + 1, denom) or s.hi != Fraction(
                2 * lab + 2, denom
            ):
                return False
            if s.cert != _half_handle_cert(lab, n):
                return False
            for pid in s.point_ids:
                p = datum.point(pid)
                if (p.kind.value, p.index) != s.cert:
                    return False
        return True
    if dec.style == "monotone":
        if len(segs) < 2 or segs[0].cert != ("low",) or segs[-1].cert != ("high",):
            return False
        for s in segs[1:-1]:
            if s.cert != ("mid",) or len(s.point_ids) != 1:
                return False
        last_mid_index = None
        for s in segs[1:-1]:
            p = datum.point(s.point_ids[0])
            if not (2 <= p.index <= n - 1):
                return False
            if last_mid_index is not None and p.index < last_mid_index:
                return False
            last_mid_index = p.index
        for p in datum.points:
            seg = placed[p.id]
            if p.index <= 1 and seg is not segs[0]:
                return False
            if p.index >= n and seg is not segs[-1]:
                return False
            if 2 <= p.index <= n - 1 and seg in (segs[0], segs[-1]):
                return False
        return True
    if dec.style == "trivial":
        return len(segs) == 1 and segs[0].cert == ("any",)
    return False


# ---------------------------------------------------------------------------
# the full driver


def global_split(
    datum: MorseDatum,
) -> Tuple[MorseDatum, Decomposition, List[MoveRecord]]:
    """Drive a datum all the way to the splitting normal form.

    Returns the rewritten datum, its decomposition, and the move script.
    Running it again on its own output returns the same decomposition with
    an empty script.  Needs all three no-closed-component flags (except in
    the trivial codimension-one case n = 1).  Any refused step surfaces as
    PipelineBlocked naming the stage and the original error.
    """
    if datum.ambient.codim >= 2:
        return _global_split_deep(datum)
    return _global_split_codim_one(datum)


def _require_flags(datum: MorseDatum, stage: str):
    f = datum.flags
    if not (f.no_closed_cobordism and f.no_closed_bottom and f.no_closed_top):
        raise PipelineBlocked(
            stage, "driver needs all three no-closed-component flags"
        )


def _global_split_deep(datum):
    dec = derive_half_handle_decomposition(datum)
    if dec is not None and verify_decomposition(datum, dec):
        return datum, dec, []
    _require_flags(datum, "hypotheses")
    n = datum.ambient.n
    script: List[MoveRecord] = []
    d = datum

    def run(stage, fn):
        nonlocal d
        try:
            d, part = fn(d)
        except MoveError as exc:
            raise PipelineBlocked(stage, exc) from exc
        script.extend(part)

    run("schedule", lambda cur: realize_configuration(cur, schedule_levels(cur)))
    cuts = band_levels(n)
    if not tsa_check(d, *cuts):
        raise PipelineBlocked("bands", "scheduling left a point out of its band")
    run("joinability", lambda cur: ensure_joinable(cur, cuts))
    run("separation", _separate_middle_levels)
    run("split", _split_all_interior)
    run("final", lambda cur: realize_configuration(cur, _segment_targets(cur)))
    dec = derive_half_handle_decomposition(d)
    if dec is None or not verify_decomposition(d, dec):
        raise PipelineBlocked("verify", "driver output is not in normal form")
    return d, dec, script


def _separate_middle_levels(datum):
    """Give every interior point of middle index its own level.

    Points sharing a level keep their order; all but the last slide to
    fresh levels in the free gap just below, lowest first, so the replay
    order never changes.
    """
    n = datum.ambient.n
    script: List[MoveRecord] = []
    d = datum
    middle_ids = {p.id for p in d.interior_points(2, n - 1)} if n >= 3 else set()
    levels: Dict[Fraction, List[str]] = {}
    for p in d.points:
        levels.setdefault(p.value, []).append(p.id)
    for v in sorted(levels):
        group = levels[v]
        movers = [pid for pid in group if pid in middle_ids]
        if len(group) < 2 or not movers:
            continue
        if len(movers) == len(group):
            movers = movers[:-1]  # the last one may keep the level
        prev = max(
            [p.value for p in d.points if p.value < v], default=Fraction(0)
        )
        for t, pid in enumerate(movers):
            slot = prev + (v - prev) * Fraction(t + 1, len(movers) + 1)
            d, rec = assign_values(d, {pid: slot}, "separate")
            script.append(rec)
    return d, script


def _split_all_interior(datum):
    script: List[MoveRecord] = []
    d = datum
    n = d.ambient.n
    todo = sorted(d.interior_points(1, n), key=lambda p: p.sort_key())
    for p in todo:
        d, rec = split_interior(d, p.id)
        script.append(rec)
    return d, script


def _segment_targets(datum) -> Dict[str, Fraction]:
    """Final values: every point strictly inside its labelled segment,
    groups spread evenly in their current order."""
    n = datum.ambient.n
    denom = 2 * n + 4
    groups: Dict[Fraction, List[str]] = {}
    for p in datum.points:  # canonical order, so groups stay stable
        lab = _half_handle_label(p, n)
        groups.setdefault(lab, []).append(p.id)
    targets: Dict[str, Fraction] = {}
    for lab, ids in groups.items():
        lo = Fraction(2 * lab + 1, denom)
        hi = Fraction(2 * lab + 2, denom)
        for t, pid in enumerate(ids):
            targets[pid] = lo + (hi - lo) * Fraction(t + 1, len(ids) + 1)
    return targets


def _global_split_codim_one(datum):
    n = datum.ambient.n
    if n == 1:
        return datum, _trivial_decomposition(datum), []
    if not datum.interior_points(2, n - 1):
        dec = derive_monotone_decomposition(datum)
        if dec is not None and verify_decomposition(datum, dec):
            return datum, dec, []
    _require_flags(datum, "hypotheses")
    script: List[MoveRecord] = []
    d = datum

    def run(stage, fn):
        nonlocal d
        try:
            d, part = fn(d)
        except MoveError as exc:
            raise PipelineBlocked(stage, exc) from exc
        script.extend(part)

    def spread(cur):
        ordered = sorted(cur.points, key=lambda p: (p.index, p.sort_key()))
        total = len(ordered)
        targets = {
            p.id: Fraction(i + 1, total + 1) for i, p in enumerate(ordered)
        }
        return realize_configuration(cur, targets)

    run("order", spread)

    def split_middles(cur):
        part: List[MoveRecord] = []
        for p in sorted(cur.interior_points(2, n - 1), key=lambda q: q.sort_key()):
            cur, rec = split_interior(cur, p.id)
            part.append(rec)
        return cur, part

    run("split", split_middles)
    dec = derive_monotone_decomposition(d)
    if dec is None or not verify_decomposition(d, dec):
        raise PipelineBlocked("verify", "driver output is not in normal form")
    return d, dec, script
