"""Flow line graph between critical points.

An edge z -> w records that some flow lines run from z up to w.  The locus
says where those lines live: inside the cobordism away from the wall, inside
the wall, or only through the ambient membranes outside the cobordism.  The
count is a positive integer when the number of lines is known and None when
it is not.

Genericity makes many intersections empty for dimension reasons, so edges
are only allowed between pairs that ``generic_disjoint`` does not rule out.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import CycleDetected, ValidationError
from .morse_data import Ambient, CriticalPoint, Kind, dimension_profile


class Locus(str, enum.Enum):
    """Where the recorded flow lines run."""

    INNER = "interior"  # inside the cobordism, away from the wall
    WALL = "boundary"  # inside the vertical boundary wall
    MEMBRANE = "ambient"  # only through the ambient membranes

    @classmethod
    def parse(cls, token: str) -> "Locus":
        for member in cls:
            if member.value == token:
                return member
        raise ValidationError("unknown locus %r" % (token,))


@dataclass(frozen=True)
class FlowEdge:
    """Flow lines from ``src`` up to ``dst``."""

    src: str
    dst: str
    count: Optional[int]  # None means "some, number unknown"
    locus: Locus

    def __post_init__(self):
        if self.src == self.dst:
            raise ValidationError("flow edge loops at %r" % (self.src,))
        if self.count is not None and (
            not isinstance(self.count, int) or self.count < 1
        ):
            raise ValidationError(
                "edge %s->%s: count must be a positive integer or unknown"
                % (self.src, self.dst)
            )
        object.__setattr__(self, "locus", Locus(self.locus))


@dataclass(frozen=True)
class TrajectoryGraph:
    edges: tuple

    def __post_init__(self):
        edges = tuple(sorted(self.edges, key=lambda e: (e.src, e.dst)))
        seen = set()
        for e in edges:
            if (e.src, e.dst) in seen:
                raise ValidationError("duplicate edge %s->%s" % (e.src, e.dst))
            seen.add((e.src, e.dst))
        object.__setattr__(self, "edges", edges)

    def edge(self, src: str, dst: str) -> Optional[FlowEdge]:
        for e in self.edges:
            if e.src == src and e.dst == dst:
                return e
        return None

    def successors(self, point_id: str):
        return [e for e in self.edges if e.src == point_id]

    def predecessors(self, point_id: str):
        return [e for e in self.edges if e.dst == point_id]

    def without_points(self, ids: Iterable[str]) -> "TrajectoryGraph":
        drop = set(ids)
        return TrajectoryGraph(
            tuple(e for e in self.edges if e.src not in drop and e.dst not in drop)
        )

    def with_edges(self, new_edges: Iterable[FlowEdge]) -> "TrajectoryGraph":
        return TrajectoryGraph(self.edges + tuple(new_edges))


def empty_graph() -> TrajectoryGraph:
    return TrajectoryGraph(())


def generic_disjoint(z: CriticalPoint, w: CriticalPoint, ambient: Ambient) -> bool:
    """Whether genericity forces the membranes of z and w to be disjoint.

    True means no flow line from z to w can exist, so the pair may always
    be rearranged past each other.  The four cases, with k the index of z
    and l the index of w:

    * equal indices in codimension >= 2, except a stable point below an
      unstable one (those may still meet inside the wall);
    * k > l, always;
    * z interior and w boundary unstable with l - k <= m - n - 2;
    * z boundary stable and w interior with l - k <= m - n - 2.
    """
    m, n = ambient.m, ambient.n
    # raises InvalidIndexKind on nonsense input
    dimension_profile(z.kind, z.index, n)
    dimension_profile(w.kind, w.index, n)
    k, l = z.index, w.index
    if (
        k == l
        and m >= n + 2
        and not (z.kind is Kind.BOUNDARY_STABLE and w.kind is Kind.BOUNDARY_UNSTABLE)
    ):
        return True
    if k > l:
        return True
    if z.kind is Kind.INTERIOR and w.kind is Kind.BOUNDARY_UNSTABLE:
        if l - k <= m - n - 2:
            return True
    if z.kind is Kind.BOUNDARY_STABLE and w.kind is Kind.INTERIOR:
        if l - k <= m - n - 2:
            return True
    return False


def dimension_sum_oracle(z: CriticalPoint, w: CriticalPoint, ambient: Ambient) -> bool:
    """Disjointness by dimension count, computed from the profiles alone.

    A generic intersection of the unstable set of z with the stable set of
    w is empty when the dimensions sum to less than the dimension of the
    space they meet in, for each of the three loci.  A locus with an empty
    piece contributes nothing.  Agrees with ``generic_disjoint``; the test
    suite checks the two exhaustively against each other.
    """
    m, n = ambient.m, ambient.n
    pz = dimension_profile(z.kind, z.index, n)
    pw = dimension_profile(w.kind, w.index, n)
    checks = (
        (pz.unstable_membrane, pw.stable_membrane, m + 1),
        (pz.unstable_inner, pw.stable_inner, n + 1),
        (pz.unstable_wall, pw.stable_wall, n),
    )
    for du, ds, dim in checks:
        if du is None or ds is None:
            continue
        if du + ds > dim:
            return False
    return True


def broken_closure(graph: TrajectoryGraph):
    """Transitive closure of the edge relation: chains of flow lines.

    Returns a dict mapping each point id with outgoing chains to the frozen
    set of ids reachable through one or more edges.  Raises CycleDetected
    on cyclic input (valid data is acyclic since values strictly increase
    along edges).
    """
    succ = {}
    for e in graph.edges:
        succ.setdefault(e.src, set()).add(e.dst)

    order = []
    state = {}  # 0 visiting, 1 done

    def visit(node):
        stack = [(node, iter(sorted(succ.get(node, ()))))]
        state[node] = 0
        while stack:
            current, it = stack[-1]
            advanced = False
            for nxt in it:
                if state.get(nxt) == 0:
                    raise CycleDetected("flow graph cycle through %r" % (nxt,))
                if nxt not in state:
                    state[nxt] = 0
                    stack.append((nxt, iter(sorted(succ.get(nxt, ())))))
                    advanced = True
                    break
            if not advanced:
                state[current] = 1
                order.append(current)
                stack.pop()

    nodes = set(succ)
    for e in graph.edges:
        nodes.add(e.dst)
    for node in sorted(nodes):
        if node not in state:
            visit(node)

    reach = {}
    for node in order:  # reverse topological order
        acc = set()
        for nxt in succ.get(node, ()):
            acc.add(nxt)
            acc |= reach.get(nxt, frozenset())
        reach[node] = frozenset(acc)
    return {k: v for k, v in reach.items() if v}


def has_path(graph: TrajectoryGraph, src: str, dst: str) -> bool:
    """Whether a chain of one or more edges runs from src to dst."""
    return dst in broken_closure(graph).get(src, frozenset())


def has_broken_path(graph: TrajectoryGraph, src: str, dst: str) -> bool:
    """Whether a chain of two or more edges runs from src to dst."""
    closure = broken_closure(graph)
    for mid in closure.get(src, frozenset()):
        if mid != dst and dst in closure.get(mid, frozenset()):
            return True
    return False


def can_rearrange(graph: TrajectoryGraph, z_id: str, w_id: str) -> bool:
    """Whether the order of z (below) and w (above) is free to change.

    True unless some chain of flow lines runs from z up to w; such a chain
    pins the order of their critical values.
    """
    return not has_path(graph, z_id, w_id)


def graph_issues(ambient: Ambient, points, graph: TrajectoryGraph) -> list:
    """Invariant report for the flow graph against the given points."""
    issues = []
    by_id = {p.id: p for p in points}
    for e in graph.edges:
        tag = "edge %s->%s" % (e.src, e.dst)
        if e.src not in by_id or e.dst not in by_id:
            issues.append("%s: unknown endpoint" % tag)
            continue
        z, w = by_id[e.src], by_id[e.dst]
        if not (z.value < w.value):
            issues.append(
                "%s: values %s >= %s, flow must strictly increase"
                % (tag, z.value, w.value)
            )
        if generic_disjoint(z, w, ambient):
            issues.append("%s: genericity forces this pair apart" % tag)
        if e.locus is Locus.WALL:
            if not (z.kind.is_boundary and w.kind.is_boundary):
                issues.append("%s: wall locus needs boundary points" % tag)
        elif e.locus is Locus.INNER:
            pz = dimension_profile(z.kind, z.index, ambient.n)
            pw = dimension_profile(w.kind, w.index, ambient.n)
            if pz.unstable_inner is None or pw.stable_inner is None:
                issues.append(
                    "%s: inner locus needs inner unstable and stable sets" % tag
                )
    try:
        broken_closure(graph)
    except CycleDetected as exc:
        issues.append(str(exc))
    return issues
