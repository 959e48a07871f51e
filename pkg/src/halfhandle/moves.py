"""Rewriting moves on Morse data.

Three families of moves, each with exact side conditions:

* rearrangement: change critical values without changing anything else;
  legal when no chain of flow lines pins the order and no level set effect
  would have to happen before its inputs exist.
* cancellation: erase a pair of points of adjacent index joined by exactly
  one flow line whose slice effects compose to the identity.
* splitting: replace an interior point whose surgery happens on a wall
  component by a boundary stable / boundary unstable pair.

Every move returns the rewritten datum together with a replayable record.
Failures raise a MoveError subclass naming the side condition; the input
datum is never modified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import (
    Blocked,
    BrokenTrajectoryExists,
    EdgeOrderViolation,
    ExtremalIndex,
    Inadmissible,
    IndexMismatch,
    InvalidEffect,
    KindMismatch,
    LocusViolation,
    MoveError,
    NotInterior,
    NotJoinable,
    NotSingleTrajectory,
    PartialConfiguration,
    SwapBlocked,
    UnknownId,
    ValidationError,
)
from .morse_data import (
    CriticalPoint,
    Kind,
    MorseDatum,
    is_admissible,
    validate_datum,
)
from .slice_topology import (
    ComponentEffect,
    EffectKind,
    SliceComplex,
    SliceComponent,
    joinable_to_wall,
    replay,
)
from .trajectory import (
    FlowEdge,
    Locus,
    TrajectoryGraph,
    can_rearrange,
    generic_disjoint,
    has_broken_path,
)


@dataclass(frozen=True)
class MoveRecord:
    """One replayable move: kind, point ids, and target values (rearrange)."""

    kind: str  # "rearrange" | "cancel" | "split"
    ids: Tuple[str, ...]
    values: Tuple[Fraction, ...] = ()
    note: str = ""

    def __post_init__(self):
        if self.kind not in ("rearrange", "cancel", "split"):
            raise ValidationError("unknown move kind %r" % (self.kind,))
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if self.kind == "rearrange" and len(self.values) != len(self.ids):
            raise ValidationError("rearrange needs one value per id")


def component_producers(datum: MorseDatum) -> Dict[str, Optional[str]]:
    """Map each component id to the point that creates it (None for bottom)."""
    out: Dict[str, Optional[str]] = {}
    for c in datum.slices.bottom:
        out[c.id] = None
    for e in datum.slices.effects:
        for c in e.outputs:
            out[c.id] = e.at
    return out


def component_wall_bits(datum: MorseDatum) -> Dict[str, bool]:
    """Map each component id to its wall bit (fixed over its lifetime)."""
    bits = {c.id: c.touches_wall for c in datum.slices.bottom}
    for e in datum.slices.effects:
        for c in e.outputs:
            bits[c.id] = c.touches_wall
    return bits


def check_assignment(datum: MorseDatum, values: Mapping[str, Fraction]):
    """Why the given full value assignment is illegal, or None if it is fine.

    Checks only what moving values can break: edge order and effect replay.
    Returns a (reason, detail) pair; reason is "edge" with the offending
    edge or "replay" with the first replay issue.
    """
    for e in datum.graph.edges:
        if not (values[e.src] < values[e.dst]):
            return ("edge", e)
    candidate = tuple(
        CriticalPoint(p.id, p.kind, p.index, values[p.id]) for p in datum.points
    )
    issues, _, _ = replay(datum.ambient, candidate, datum.slices)
    if issues:
        return ("replay", issues[0])
    return None


def _moved(datum: MorseDatum, assignments: Mapping[str, Fraction]) -> MorseDatum:
    """Datum with new critical values; raises if the result is inconsistent."""
    for pid in assignments:
        if not datum.has_point(pid):
            raise UnknownId("no critical point with id %r" % (pid,))
    values = datum.values()
    for pid, v in assignments.items():
        v = Fraction(v)
        if not (0 < v < 1):
            raise MoveError("target value %s for %r outside (0,1)" % (v, pid))
        values[pid] = v
    problem = check_assignment(datum, values)
    if problem is not None:
        kind, detail = problem
        if kind == "edge":
            raise EdgeOrderViolation(
                "flow line %s->%s would run downhill (%s >= %s)"
                % (detail.src, detail.dst, values[detail.src], values[detail.dst])
            )
        raise InvalidEffect("new order breaks the slice replay: %s" % (detail,))
    new_points = tuple(
        CriticalPoint(p.id, p.kind, p.index, values[p.id]) for p in datum.points
    )
    return datum.replace(points=new_points)


def assign_values(
    datum: MorseDatum, assignments: Mapping[str, Fraction], note: str = ""
) -> Tuple[MorseDatum, MoveRecord]:
    """Move any set of points to new values in one step.

    The workhorse behind rearrangement; drivers use single-point steps.
    Checks edge order and slice replay, nothing else: points with no flow
    line or surgery dependency between them may pass each other freely.
    """
    ids = tuple(sorted(assignments))
    moved = _moved(datum, assignments)
    record = MoveRecord(
        "rearrange", ids, tuple(Fraction(assignments[i]) for i in ids), note
    )
    return moved, record


def rearrange_pair(
    datum: MorseDatum, z_id: str, w_id: str, a: Fraction, b: Fraction
) -> Tuple[MorseDatum, MoveRecord]:
    """Move the pair z (below) and w (above) to values a and b.

    Refused with Blocked when a chain of flow lines runs from z to w, with
    EdgeOrderViolation when a third point's flow line would run downhill,
    and with InvalidEffect when the new order breaks the slice replay.
    """
    z, w = datum.point(z_id), datum.point(w_id)
    if z_id == w_id:
        raise MoveError("rearrange_pair wants two distinct points")
    if not (z.value < w.value):
        raise MoveError(
            "rearrange_pair wants the lower point first (%s is above %s)"
            % (z_id, w_id)
        )
    if not can_rearrange(datum.graph, z_id, w_id):
        raise Blocked(
            "a chain of flow lines runs from %s to %s" % (z_id, w_id)
        )
    return assign_values(datum, {z_id: a, w_id: b})


def apply_record(datum: MorseDatum, record: MoveRecord) -> MorseDatum:
    """Replay one recorded move."""
    if record.kind == "rearrange":
        moved, _ = assign_values(
            datum, dict(zip(record.ids, record.values)), record.note
        )
        return moved
    if record.kind == "cancel":
        out, _ = cancel_pair(datum, record.ids[0], record.ids[1])
        return out
    if record.kind == "split":
        out, _ = split_interior(datum, record.ids[0])
        return out
    raise ValidationError("unknown move kind %r" % (record.kind,))


def apply_script(datum: MorseDatum, script: Iterable[MoveRecord]) -> MorseDatum:
    for record in script:
        datum = apply_record(datum, record)
    return datum


# ---------------------------------------------------------------------------
# realization of a target configuration


def realize_configuration(
    datum: MorseDatum, targets: Mapping[str, Fraction]
) -> Tuple[MorseDatum, List[MoveRecord]]:
    """Rearrange until every point sits at its target value.

    The targets must form an admissible configuration (index order, and in
    codimension one just index monotonicity), keep every flow line running
    uphill, and put every surgery after its inputs exist.  Under those
    conditions the park and place strategy below always succeeds: first
    lift all points, in their current order, into a band above everything,
    then bring them down to their targets from the bottom up.

    Raises SwapBlocked naming two points whose order cannot be flipped.
    """
    want = {}
    for pid, v in targets.items():
        if not datum.has_point(pid):
            raise UnknownId("no critical point with id %r" % (pid,))
        want[pid] = Fraction(v)
    for p in datum.points:
        if p.id not in want:
            raise PartialConfiguration("no target value for point %r" % (p.id,))
    for pid, v in want.items():
        if not (0 < v < 1):
            raise Inadmissible("target value %s for %r outside (0,1)" % (v, pid))

    if datum.ambient.codim >= 2:
        if not is_admissible(datum.points, want):
            raise Inadmissible("target configuration violates the index order")
    else:
        for z in datum.points:
            for w in datum.points:
                if z.index < w.index and not (want[z.id] < want[w.id]):
                    raise Inadmissible(
                        "codimension one targets must be index monotone "
                        "(%s vs %s)" % (z.id, w.id)
                    )

    problem = check_assignment(datum, want)
    if problem is not None:
        kind, detail = problem
        if kind == "edge":
            raise SwapBlocked(
                detail.src,
                detail.dst,
                "flow line %s->%s pins the order, targets invert it"
                % (detail.src, detail.dst),
            )
        # replay broke: the first starving effect names the blocked pair
        consumer, producer = _starving_pair(datum, want)
        raise SwapBlocked(
            consumer,
            producer,
            "surgery at %s needs a component made at %s, targets put it below"
            % (consumer, producer),
        )

    if all(want[p.id] == p.value for p in datum.points):
        return datum, []

    script: List[MoveRecord] = []
    d = datum

    # park everything above current values and targets, preserving order
    ceiling = max(
        [p.value for p in datum.points] + [v for v in want.values()]
    )
    count = len(datum.points)
    ordered = list(datum.points)  # canonical order
    slots = {
        p.id: ceiling + (1 - ceiling) * Fraction(i + 1, count + 2)
        for i, p in enumerate(ordered)
    }
    for p in reversed(ordered):  # topmost first, so nothing is overtaken
        d, rec = assign_values(d, {p.id: slots[p.id]}, "park")
        script.append(rec)

    # place from the bottom up
    for pid in sorted(want, key=lambda i: (want[i], i)):
        d, rec = assign_values(d, {pid: want[pid]}, "place")
        script.append(rec)
    return d, script


def _starving_pair(datum: MorseDatum, values: Mapping[str, Fraction]):
    """First (consumer, producer) pair out of order under the new values."""
    producers = component_producers(datum)
    order = sorted(datum.points, key=lambda p: (values[p.id], p.id))
    seen = set()
    for c in datum.slices.bottom:
        seen.add(c.id)
    for p in order:
        effect = datum.slices.effect_for(p.id)
        for cid in effect.inputs:
            if cid not in seen:
                return p.id, producers.get(cid) or "?"
        for c in effect.outputs:
            seen.add(c.id)
    return order[-1].id, "?"  # unreachable on data whose replay really broke


# ---------------------------------------------------------------------------
# cancellation


def cancel_pair(
    datum: MorseDatum, z_id: str, w_id: str
) -> Tuple[MorseDatum, MoveRecord]:
    """Erase a cancelling pair: indices k and k+1, same kind, joined by a
    single flow line, with slice effects that compose to the identity.

    The surviving effects are rewritten by the single renaming that undoes
    the pair (the component continuing above w becomes the component that
    entered z).  New flow lines are induced for chains that used to run
    through the pair: p -> w and z -> q combine to p -> q with unknown
    count whenever genericity and the value order allow a flow line at all.
    """
    z, w = datum.point(z_id), datum.point(w_id)
    if z.kind is not w.kind:
        raise KindMismatch(
            "cancelling pair must share a kind (%s vs %s)"
            % (z.kind.value, w.kind.value)
        )
    if w.index != z.index + 1:
        raise IndexMismatch(
            "cancelling pair wants indices k, k+1; got %d, %d"
            % (z.index, w.index)
        )
    edge = datum.graph.edge(z_id, w_id)
    if edge is None or edge.count != 1:
        raise NotSingleTrajectory(
            "cancellation wants exactly one flow line %s->%s" % (z_id, w_id)
        )
    expected_locus = Locus.INNER if z.kind is Kind.INTERIOR else Locus.WALL
    if edge.locus is not expected_locus:
        raise LocusViolation(
            "the connecting flow line must run in locus %r, not %r"
            % (expected_locus.value, edge.locus.value)
        )
    if has_broken_path(datum.graph, z_id, w_id):
        raise BrokenTrajectoryExists(
            "a broken chain of flow lines also joins %s to %s" % (z_id, w_id)
        )

    ez = datum.slices.effect_for(z_id)
    ew = datum.slices.effect_for(w_id)
    survivor, final = _inverse_pattern(z, ez, ew)
    bits = component_wall_bits(datum)
    if bits[survivor] != bits[final]:
        raise InvalidEffect(
            "effects at %s and %s are not inverse: wall bits of %r and %r differ"
            % (z_id, w_id, survivor, final)
        )

    rename = {final: survivor}
    new_effects = []
    for e in datum.slices.effects:
        if e.at in (z_id, w_id):
            continue
        new_inputs = tuple(rename.get(cid, cid) for cid in e.inputs)
        new_effects.append(ComponentEffect(e.at, e.kind, new_inputs, e.outputs))
    new_slices = SliceComplex(datum.slices.bottom, tuple(new_effects))
    new_points = tuple(p for p in datum.points if p.id not in (z_id, w_id))

    by_id = {p.id: p for p in datum.points}
    base = datum.graph.without_points([z_id, w_id])
    induced = []
    for into_w in datum.graph.predecessors(w_id):
        if into_w.src == z_id:
            continue
        for from_z in datum.graph.successors(z_id):
            if from_z.dst == w_id:
                continue
            p, q = into_w.src, from_z.dst
            if p == q or base.edge(p, q) is not None:
                continue
            if any(e.src == p and e.dst == q for e in induced):
                continue
            if not (by_id[p].value < by_id[q].value):
                continue  # flow runs uphill, so such a chain cannot survive
            if generic_disjoint(by_id[p], by_id[q], datum.ambient):
                continue
            if into_w.locus is Locus.WALL and from_z.locus is Locus.WALL:
                locus = Locus.WALL
            elif into_w.locus is Locus.INNER and from_z.locus is Locus.INNER:
                locus = Locus.INNER
            else:
                locus = Locus.MEMBRANE
            induced.append(FlowEdge(p, q, None, locus))
    new_graph = base.with_edges(induced)

    out = MorseDatum(datum.ambient, new_points, new_graph, new_slices, datum.flags)
    issues = validate_datum(out)
    if issues:
        raise InvalidEffect(
            "cancellation would leave inconsistent data: %s" % (issues[0],)
        )
    return out, MoveRecord("cancel", (z_id, w_id))


def _inverse_pattern(z: CriticalPoint, ez: ComponentEffect, ew: ComponentEffect):
    """Surviving input and final output of a literal inverse pair of effects.

    Cancelling deletes both effects and renames the final output to the
    survivor.  Anything else (a merge against a split, say, or attaches
    that do not chain) is refused: composing those is not the identity on
    the slice level, so erasing the pair would change the data elsewhere.
    """
    kz, kw = ez.kind, ew.kind
    if kz is EffectKind.BIRTH and kw is EffectKind.MERGE:
        newborn = ez.outputs[0].id
        if newborn not in ew.inputs:
            raise InvalidEffect("the merge does not consume the newborn sphere")
        other = [cid for cid in ew.inputs if cid != newborn][0]
        return other, ew.outputs[0].id
    if kz is EffectKind.INTERNAL and kw is EffectKind.INTERNAL:
        if ew.inputs != (ez.outputs[0].id,):
            raise InvalidEffect("the upper surgery does not consume the lower's output")
        return ez.inputs[0], ew.outputs[0].id
    if kz is EffectKind.SPLIT and kw is EffectKind.DEATH:
        dying = ew.inputs[0]
        if dying not in ez.output_ids():
            raise InvalidEffect("the death does not consume a split output")
        other = [cid for cid in ez.output_ids() if cid != dying][0]
        return ez.inputs[0], other
    if kz is EffectKind.BOUNDARY_ATTACH and kw is EffectKind.BOUNDARY_ATTACH:
        if len(ez.inputs) != 1 or len(ez.outputs) != 1:
            raise InvalidEffect("only chained one-to-one attaches cancel")
        if len(ew.inputs) != 1 or len(ew.outputs) != 1:
            raise InvalidEffect("only chained one-to-one attaches cancel")
        if ew.inputs != (ez.outputs[0].id,):
            raise InvalidEffect("the attaches do not chain")
        return ez.inputs[0], ew.outputs[0].id
    raise InvalidEffect(
        "effects %s then %s do not compose to the identity"
        % (kz.value, kw.value)
    )


# ---------------------------------------------------------------------------
# splitting


def split_interior(datum: MorseDatum, z_id: str) -> Tuple[MorseDatum, MoveRecord]:
    """Replace an interior point by a boundary stable / unstable pair.

    Needs an interior point of index 1..n whose surgery happens on a
    component touching the wall.  The stable half lands just below the old
    value and performs a wall attach; the unstable half lands just above
    and finishes the original surgery, joined to its partner by a single
    flow line in the wall.  Incoming flow lines move to the stable half,
    outgoing ones to the unstable half.
    """
    z = datum.point(z_id)
    n = datum.ambient.n
    if z.kind is not Kind.INTERIOR:
        raise NotInterior("point %r is not interior" % (z_id,))
    if not (1 <= z.index <= n):
        raise ExtremalIndex(
            "split applies to indices 1..%d, point %r has index %d"
            % (n, z_id, z.index)
        )
    if not joinable_to_wall(datum.ambient, datum.points, datum.slices, z_id):
        raise NotJoinable(
            "the surgery at %r happens away from the wall" % (z_id,)
        )
    below = [p.value for p in datum.points if p.value < z.value]
    above = [p.value for p in datum.points if p.value > z.value]
    if len(below) + len(above) != len(datum.points) - 1:
        raise MoveError(
            "point %r shares its critical value; separate the points first"
            % (z_id,)
        )
    gap_lo = z.value - max(below + [Fraction(0)])
    gap_hi = min(above + [Fraction(1)]) - z.value
    v_s = z.value - gap_lo / 2
    v_u = z.value + gap_hi / 3  # thirds above, halves below: pairs never collide

    zs_id, zu_id = z_id + "s", z_id + "u"
    while datum.has_point(zs_id):
        zs_id += "_"
    while datum.has_point(zu_id):
        zu_id += "_"
    zs = CriticalPoint(zs_id, Kind.BOUNDARY_STABLE, z.index, v_s)
    zu = CriticalPoint(zu_id, Kind.BOUNDARY_UNSTABLE, z.index, v_u)

    e_s, e_u = _split_effects(datum, z, zs_id, zu_id)

    new_points = tuple(
        p for p in datum.points if p.id != z_id
    ) + (zs, zu)
    moved_edges = []
    for e in datum.graph.edges:
        src = zu_id if e.src == z_id else e.src
        dst = zs_id if e.dst == z_id else e.dst
        moved_edges.append(FlowEdge(src, dst, e.count, e.locus))
    new_graph = TrajectoryGraph(
        tuple(moved_edges) + (FlowEdge(zs_id, zu_id, 1, Locus.WALL),)
    )
    new_slices = datum.slices.replace_effects(drop=(z_id,), add=(e_s, e_u))
    out = MorseDatum(datum.ambient, new_points, new_graph, new_slices, datum.flags)
    issues = validate_datum(out)
    if issues:
        raise InvalidEffect(
            "splitting would leave inconsistent data: %s" % (issues[0],)
        )
    return out, MoveRecord("split", (z_id,))


def _fresh_component_id(datum: MorseDatum) -> str:
    taken = set()
    for c in datum.slices.bottom:
        taken.add(c.id)
    for e in datum.slices.effects:
        for c in e.outputs:
            taken.add(c.id)
    i = len(taken)
    while "c%d" % i in taken:
        i += 1
    return "c%d" % i


def _split_effects(datum: MorseDatum, z: CriticalPoint, zs_id: str, zu_id: str):
    """The attach pair replacing an interior effect, preserving its boundary.

    The stable half grabs the wall with a tongue (a fresh half-open collar
    component); the unstable half finishes the surgery, reproducing the
    original output ids and bits so that no other effect needs rewriting.
    For a merge the tongue attaches to the input that is not the witness
    (the witness being the most recently created input touching the wall);
    for a split the wall-touching output leaves at the stable half.
    """
    from .slice_topology import pre_states

    effect = datum.slices.effect_for(z.id)
    pre, _ = pre_states(datum.ambient, datum.points, datum.slices)
    state = pre[z.id]
    mid = _fresh_component_id(datum)
    mid_comp = SliceComponent(mid, True)
    producers = component_producers(datum)
    position = {p.id: i for i, p in enumerate(datum.points)}

    def produced_at(cid):
        owner = producers.get(cid)
        return (-1, "") if owner is None else (position[owner], owner)

    if effect.kind is EffectKind.MERGE:
        touching = [cid for cid in effect.inputs if state.get(cid, False)]
        witness = max(touching, key=lambda cid: (produced_at(cid), cid))
        other = [cid for cid in effect.inputs if cid != witness][0]
        e_s = ComponentEffect(
            zs_id, EffectKind.BOUNDARY_ATTACH, (other,), (mid_comp,)
        )
        e_u = ComponentEffect(
            zu_id, EffectKind.BOUNDARY_ATTACH, (witness, mid), effect.outputs
        )
        return e_s, e_u
    if effect.kind is EffectKind.INTERNAL:
        e_s = ComponentEffect(
            zs_id, EffectKind.BOUNDARY_ATTACH, effect.inputs, (mid_comp,)
        )
        e_u = ComponentEffect(
            zu_id, EffectKind.BOUNDARY_ATTACH, (mid,), effect.outputs
        )
        return e_s, e_u
    if effect.kind is EffectKind.SPLIT:
        outs = list(effect.outputs)
        touching = [c for c in outs if c.touches_wall]
        if len(touching) == 1:
            direct = touching[0]  # the closed half must ride the unstable side
        else:
            consumed_at = {}
            for i, p in enumerate(datum.points):
                e = datum.slices.effect_for(p.id)
                for cid in e.inputs:
                    consumed_at.setdefault(cid, i)
            direct = min(
                outs,
                key=lambda c: (consumed_at.get(c.id, len(datum.points)), outs.index(c)),
            )
        other = [c for c in outs if c.id != direct.id][0]
        e_s = ComponentEffect(
            zs_id, EffectKind.BOUNDARY_ATTACH, effect.inputs, (direct, mid_comp)
        )
        e_u = ComponentEffect(zu_id, EffectKind.BOUNDARY_ATTACH, (mid,), (other,))
        return e_s, e_u
    raise InvalidEffect(
        "no attach pair replaces a %s effect" % (effect.kind.value,)
    )
