"""The degree-1 map: a 1-cycle becomes a permutation unitary.

A cycle has equal in-flow and out-flow at every vertex of its expanded
multigraph, so the ingoing edges at each vertex can be matched bijectively
with the outgoing ones.  The matching routes every (vertex, ingoing-edge)
basis vector one step along the cycle; all other basis vectors stay fixed.
The resulting operator is an exact permutation matrix, differs from the
identity only between adjacent vertices, and on the integer line its index
pairing recovers the cycle's integer class.

Two matchings of the same cycle differ by the exact product identity

    U_beta = U_alpha * R,    R = (direct sum over x of alpha_x^{-1} o beta_x),

where R is a block-diagonal slot permutation: propagation zero, every block
a finite permutation, hence connected to the identity.  That identity is the
verifiable content of matching independence.  The classical two-conjugation
route through the hybrid intermediate

    U'(x, e) = (target of alpha_x(e), slot of beta_x(e))   for ingoing e

is also constructed here, but it fails in general: the hybrid is injective
only when alpha and beta route every ingoing edge to the same target vertex,
and even then closed tracks of different cycle type obstruct any unitary
conjugation (conjugation preserves the spectrum).  The verification report
records the literal route honestly, with certificates, next to the product
identity that does hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .chains import Chain1, is_cycle
from .graphs import BandedZGraph
from .k0_map import (
    ExpandedEdge,
    ExpandedGraph,
    block_diagonal_slot_permutation,
    expand_graph,
    order_matched_involution,
)
from .operators import (
    BlockIndex,
    CopyEdge,
    Ordinal,
    OperatorError,
    SparseBlockOperator,
    Window,
    block_key,
    block_rank as op_block_rank,
    index_pairing,
)


class NonCycleError(ValueError):
    def __init__(self, vertex, in_count, out_count):
        self.vertex = vertex
        super().__init__(
            f"not a cycle: vertex {vertex!r} has in-flow {in_count} "
            f"but out-flow {out_count}"
        )


class EdgeMatching:
    """Per-vertex bijection from ingoing to outgoing expanded edges."""

    def __init__(self, expanded: ExpandedGraph, per_vertex: dict):
        self.expanded = expanded
        self.per_vertex = {x: dict(m) for x, m in per_vertex.items()}
        for x in expanded.vertices:
            m = self.per_vertex.setdefault(x, {})
            ins = set(expanded.in_edges(x))
            outs = set(expanded.out_edges(x))
            if set(m) != ins or set(m.values()) != outs or len(m) != len(ins):
                raise NonCycleError(x, len(ins), len(outs))

    def at(self, x) -> dict:
        return self.per_vertex[x]

    def inverse_at(self, x) -> dict:
        return {v: k for k, v in self.per_vertex[x].items()}


def canonical_matching(g: ExpandedGraph) -> EdgeMatching:
    """Sort ingoing and outgoing edges by (parent id, copy) and match in
    order; fails naming the first vertex where the flows disagree."""
    per_vertex = {}
    for x in g.vertices:
        ins = g.in_edges(x)
        outs = g.out_edges(x)
        if len(ins) != len(outs):
            raise NonCycleError(x, len(ins), len(outs))
        per_vertex[x] = dict(zip(ins, outs))
    return EdgeMatching(g, per_vertex)


def permuted_matching(g: ExpandedGraph, positions: dict) -> EdgeMatching:
    """Canonical matching with the outgoing side reordered: positions[x][j]
    is the index into the sorted outgoing list that the j-th sorted ingoing
    edge should map to."""
    per_vertex = {}
    for x in g.vertices:
        ins = g.in_edges(x)
        outs = g.out_edges(x)
        if len(ins) != len(outs):
            raise NonCycleError(x, len(ins), len(outs))
        perm = positions.get(x)
        if perm is None:
            per_vertex[x] = dict(zip(ins, outs))
        else:
            if sorted(perm) != list(range(len(outs))):
                raise ValueError(f"bad permutation at vertex {x!r}")
            per_vertex[x] = {e: outs[perm[j]] for j, e in enumerate(ins)}
    return EdgeMatching(g, per_vertex)


@dataclass
class CycleUnitary:
    """Permutation unitary of a cycle together with its expanded graph and
    the matching that produced it.  For line windows the operator is the
    restriction of the infinite one, exact on the window interior."""

    expanded: ExpandedGraph
    matching: Optional[EdgeMatching]
    u: SparseBlockOperator
    window: Optional[Window] = None


def _full_domain(g: ExpandedGraph) -> frozenset:
    return frozenset(
        BlockIndex(x, e.slot) for x in g.vertices for e in g.edges
    )


def _track_map(g: ExpandedGraph, matching: EdgeMatching) -> dict:
    """The basis bijection: ingoing vectors advance along the matching,
    everything else stays put."""
    mapping = {}
    for x in g.vertices:
        route = matching.at(x)
        for e in g.edges:
            b = BlockIndex(x, e.slot)
            if e.target == x:
                out = route[e]
                mapping[b] = BlockIndex(out.target, out.slot)
            else:
                mapping[b] = b
    return mapping


def cycle_unitary(
    gamma: Chain1, matching: Optional[EdgeMatching] = None
) -> CycleUnitary:
    """Build the permutation unitary of a finite-support cycle."""
    if not is_cycle(gamma):
        bad = next(
            x
            for x in gamma.graph.vertices
            if sum(gamma.coeff(e.id) for e in gamma.graph.in_edges(x))
            != sum(gamma.coeff(e.id) for e in gamma.graph.out_edges(x))
        )
        g = expand_graph(gamma.graph, gamma)
        raise NonCycleError(bad, g.in_count(bad), g.out_count(bad))
    g = expand_graph(gamma.graph, gamma)
    if matching is None:
        matching = canonical_matching(g)
    domain = _full_domain(g)
    u = SparseBlockOperator.from_basis_map(domain, _track_map(g, matching))
    return CycleUnitary(expanded=g, matching=matching, u=u)


def permutation_cycle_type(op: SparseBlockOperator) -> Optional[tuple[int, ...]]:
    """Sorted nontrivial cycle lengths when op is a permutation matrix of its
    ambient basis, else None."""
    mapping = {}
    for (r, c), v in op.entries.items():
        if v != 1 or c in mapping:
            return None
        mapping[c] = r
    if set(mapping) != op.domain or set(mapping.values()) != op.domain:
        return None
    lengths = []
    seen = set()
    for start in op.domain:
        if start in seen:
            continue
        n = 0
        cur = start
        while True:
            seen.add(cur)
            n += 1
            cur = mapping[cur]
            if cur == start:
                break
        if n > 1:
            lengths.append(n)
    return tuple(sorted(lengths))


# ---------------------------------------------------------------------------
# matching independence


def matching_correction(
    g: ExpandedGraph, alpha: EdgeMatching, beta: EdgeMatching
) -> SparseBlockOperator:
    """Block-diagonal slot permutation R with U_beta = U_alpha * R.

    At each vertex R reroutes ingoing slots by alpha_x^{-1} o beta_x, so the
    alpha-route of the rerouted slot is exactly the beta-route of the
    original one.
    """
    per_vertex = {}
    for x in g.vertices:
        inv = alpha.inverse_at(x)
        per_vertex[x] = {
            e.slot: inv[beta.at(x)[e]].slot for e in g.in_edges(x)
        }
    return block_diagonal_slot_permutation(_full_domain(g), per_vertex)


def _hybrid_intermediate(
    g: ExpandedGraph, alpha: EdgeMatching, beta: EdgeMatching
) -> tuple[SparseBlockOperator, Optional[tuple]]:
    """The classical intermediate: ingoing vectors go to the alpha target
    vertex but the beta slot.  Returns the matrix and, when it is not a
    basis bijection, a colliding pair of columns as certificate."""
    domain = _full_domain(g)
    mapping = {}
    for x in g.vertices:
        for e in g.edges:
            b = BlockIndex(x, e.slot)
            if e.target == x:
                a_out = alpha.at(x)[e]
                b_out = beta.at(x)[e]
                mapping[b] = BlockIndex(a_out.target, b_out.slot)
            else:
                mapping[b] = b
    collision = None
    seen: dict[BlockIndex, BlockIndex] = {}
    for b in sorted(mapping, key=block_key):
        img = mapping[b]
        if img in seen:
            collision = (seen[img], b, img)
            break
        seen[img] = b
    op = SparseBlockOperator.from_basis_map(domain, mapping, injective=False)
    return op, collision


def _solve_block_conjugator(
    g: ExpandedGraph, alpha: EdgeMatching, beta: EdgeMatching, budget: int = 200_000
):
    """Search for per-vertex permutations pi_x of the ingoing edges with

        alpha_x(pi_x(e)) = pi_y(beta_x(e)),   y = target(beta_x(e)),

    which makes V = (direct sum of pi_x on ingoing slots) satisfy
    U' = V* U_alpha V when the hybrid U' is unitary.  Deterministic
    backtracking; returns (per_vertex slot maps, None) or (None, reason).
    """
    pi: dict = {x: {} for x in g.vertices}
    used: dict = {x: set() for x in g.vertices}
    alpha_inv = {x: alpha.inverse_at(x) for x in g.vertices}
    beta_inv = {x: beta.inverse_at(x) for x in g.vertices}
    points = [
        (x, e)
        for x in g.vertices
        for e in g.in_edges(x)
    ]
    steps = 0

    def propagate(x, e, p, trail):
        nonlocal steps
        stack = [(x, e, p)]
        while stack:
            steps += 1
            if steps > budget:
                raise TimeoutError
            x, e, p = stack.pop()
            cur = pi[x].get(e)
            if cur is not None:
                if cur != p:
                    return False
                continue
            if p in used[x] or p.target != x or p.source != e.source:
                return False
            if alpha.at(x)[p].target != beta.at(x)[e].target:
                return False
            pi[x][e] = p
            used[x].add(p)
            trail.append((x, e, p))
            # forward: the constraint attached to the edge beta_x(e)
            f = beta.at(x)[e]
            stack.append((f.target, f, alpha.at(x)[p]))
            # backward: the constraint attached to the edge e itself
            s = e.source
            e0 = beta_inv[s].get(e)
            if e0 is not None:
                p0 = alpha_inv[s].get(p)
                if p0 is None:
                    return False
                stack.append((s, e0, p0))
        return True

    def undo(trail):
        for x, e, p in trail:
            del pi[x][e]
            used[x].discard(p)

    def solve(idx):
        while idx < len(points) and points[idx][1] in pi[points[idx][0]]:
            idx += 1
        if idx == len(points):
            return True
        x, e = points[idx]
        candidates = [p for p in g.in_edges(x) if p not in used[x]]
        for p in candidates:
            trail: list = []
            if propagate(x, e, p, trail) and solve(idx + 1):
                return True
            undo(trail)
        return False

    try:
        if solve(0):
            return {x: {e.slot: p.slot for e, p in m.items()} for x, m in pi.items()}, None
        return None, "search exhausted: no slot-permutation conjugator exists"
    except TimeoutError:
        return None, "search budget exceeded"


@dataclass
class MatchingIndependenceReport:
    """Exact certificates comparing the unitaries of two matchings.

    correction_* fields document the product identity U_beta = U_alpha * R,
    which holds always.  literal_* fields document the two-conjugation route
    through the hybrid intermediate; when it cannot hold, the report carries
    the obstruction (a column collision of the hybrid, or differing
    permutation cycle types, which no unitary conjugation can reconcile).
    """

    u_alpha: SparseBlockOperator = field(repr=False)
    u_beta: SparseBlockOperator = field(repr=False)
    correction: SparseBlockOperator = field(repr=False)
    correction_identity: bool
    correction_is_permutation: bool
    correction_propagation_zero: bool
    correction_block_ranks: dict
    literal_intermediate: SparseBlockOperator = field(repr=False)
    literal_intermediate_unitary: bool
    literal_collision: Optional[tuple]
    literal_matches_beta: Optional[bool]
    literal_v: Optional[SparseBlockOperator] = field(repr=False)
    literal_v_identity: Optional[bool]
    literal_v_obstruction: Optional[str]
    literal_w: Optional[SparseBlockOperator] = field(repr=False)
    literal_w_identity: Optional[bool]
    literal_w_obstruction: Optional[str]
    cycle_types: tuple

    @property
    def literal_route_ok(self) -> bool:
        return bool(
            self.literal_intermediate_unitary
            and self.literal_v_identity
            and self.literal_w_identity
        )

    @property
    def content_ok(self) -> bool:
        return (
            self.correction_identity
            and self.correction_is_permutation
            and self.correction_propagation_zero
        )

    def to_json(self) -> dict:
        return {
            "correction_identity": self.correction_identity,
            "correction_is_permutation": self.correction_is_permutation,
            "correction_propagation_zero": self.correction_propagation_zero,
            "correction_block_ranks": {
                str(k): v for k, v in sorted(self.correction_block_ranks.items(), key=lambda kv: str(kv[0]))
            },
            "literal_intermediate_unitary": self.literal_intermediate_unitary,
            "literal_v_identity": self.literal_v_identity,
            "literal_v_obstruction": self.literal_v_obstruction,
            "literal_w_identity": self.literal_w_identity,
            "literal_w_obstruction": self.literal_w_obstruction,
            "literal_route_ok": self.literal_route_ok,
            "content_ok": self.content_ok,
            "cycle_types": [list(t) if t else list() for t in self.cycle_types],
        }


def verify_matching_independence(
    gamma: Chain1, alpha: EdgeMatching, beta: EdgeMatching
) -> MatchingIndependenceReport:
    g = alpha.expanded
    cu_a = cycle_unitary(gamma, alpha)
    cu_b = cycle_unitary(gamma, beta)
    u_a, u_b = cu_a.u, cu_b.u

    correction = matching_correction(g, alpha, beta)
    correction_identity = u_a.compose(correction) == u_b
    corr_ok = (
        correction.adjoint().compose(correction)
        == SparseBlockOperator.identity(correction.domain)
    )
    defect = correction.defect()
    block_ranks = {
        x: op_block_rank(defect, x, x)
        for x in g.vertices
        if any(r.vertex == x for (r, _) in defect.entries)
    }
    prop_zero = all(r.vertex == c.vertex for (r, c) in defect.entries)

    hybrid, collision = _hybrid_intermediate(g, alpha, beta)
    unitary = collision is None
    matches_beta = (hybrid == u_b) if unitary else None

    v_op = None
    v_identity = None
    v_obstruction = None
    w_op = None
    w_identity = None
    w_obstruction = None
    types = (permutation_cycle_type(u_a), permutation_cycle_type(u_b))
    if unitary:
        if types[0] is not None and types[0] != types[1]:
            v_obstruction = (
                f"cycle types differ ({types[0]} vs {types[1]}): "
                "no unitary conjugation can exist"
            )
        else:
            per_vertex, reason = _solve_block_conjugator(g, alpha, beta)
            if per_vertex is None:
                v_obstruction = reason
            else:
                v_op = block_diagonal_slot_permutation(u_a.domain, per_vertex)
                v_identity = (
                    v_op.adjoint().compose(u_a).compose(v_op) == hybrid
                )
        # a unitary hybrid always equals U_beta, so the identity is the
        # correct slot-preserving conjugator
        w_op = SparseBlockOperator.identity(u_a.domain)
        w_identity = w_op.adjoint().compose(hybrid).compose(w_op) == u_b
    else:
        v_obstruction = (
            "hybrid intermediate is not injective: columns "
            f"{collision[0]} and {collision[1]} share the image {collision[2]}"
        )
        w_obstruction = (
            "no unitary W exists: W*U'W would be non-injective like U', "
            "but U_beta is a permutation"
        )

    return MatchingIndependenceReport(
        u_alpha=u_a,
        u_beta=u_b,
        correction=correction,
        correction_identity=correction_identity,
        correction_is_permutation=corr_ok,
        correction_propagation_zero=prop_zero,
        correction_block_ranks=block_ranks,
        literal_intermediate=hybrid,
        literal_intermediate_unitary=unitary,
        literal_collision=collision,
        literal_matches_beta=matches_beta,
        literal_v=v_op,
        literal_v_identity=v_identity,
        literal_v_obstruction=v_obstruction,
        literal_w=w_op,
        literal_w_identity=w_identity,
        literal_w_obstruction=w_obstruction,
        cycle_types=types,
    )


# ---------------------------------------------------------------------------
# compression into an ordinal matrix corner


@dataclass
class CompressionResult:
    """Conjugation of a cycle unitary into the corner spanned by the first n
    ordinal slots.  u_tilde carries ordinal slots via the edge numbering;
    conjugating back with t recovers the original operator exactly."""

    u_tilde: SparseBlockOperator
    t: SparseBlockOperator = field(repr=False)
    numbering: tuple
    n: int
    max_valence: int
    confinement_ok: bool
    round_trip_ok: bool


def edge_numbering(g: ExpandedGraph) -> tuple[ExpandedEdge, ...]:
    """Deterministic global numbering: edges sorted by (parent id, copy)."""
    return g.edges


def compress_to_uniform(
    cu: CycleUnitary,
    numbering: Optional[tuple] = None,
    n: Optional[int] = None,
) -> CompressionResult:
    """Conjugate by the block-diagonal permutation that at each vertex swaps
    the first in-count(x) edges of the numbering with the ingoing edges.
    The conjugated operator differs from the identity only in ordinal slots
    up to n, for any n at least the maximal valence."""
    g = cu.expanded
    if numbering is None:
        numbering = edge_numbering(g)
    number = {e.slot: i for i, e in enumerate(numbering, start=1)}
    max_valence = max((g.valence(x) for x in g.vertices), default=0)
    if n is None:
        n = max_valence
    if n < max_valence:
        raise OperatorError(
            f"corner size {n} is smaller than the maximal valence {max_valence}"
        )
    per_vertex = {}
    for x in g.vertices:
        i_x = g.in_count(x)
        first = [numbering[i].slot for i in range(i_x)]
        ins = [e.slot for e in g.in_edges(x)]
        per_vertex[x] = order_matched_involution(first, ins)
    t = block_diagonal_slot_permutation(cu.u.domain, per_vertex)
    conjugated = t.adjoint().compose(cu.u).compose(t)
    round_trip_ok = t.compose(conjugated).compose(t.adjoint()) == cu.u

    relabel = {
        b: BlockIndex(b.vertex, Ordinal(number[b.slot])) for b in cu.u.domain
    }
    u_tilde = SparseBlockOperator(
        frozenset(relabel.values()),
        {(relabel[r], relabel[c]): v for (r, c), v in conjugated.entries.items()},
    )
    confinement_ok = all(
        r.slot.index <= n and c.slot.index <= n
        for (r, c) in u_tilde.defect().entries
    )
    return CompressionResult(
        u_tilde=u_tilde,
        t=t,
        numbering=tuple(numbering),
        n=n,
        max_valence=max_valence,
        confinement_ok=confinement_ok,
        round_trip_ok=round_trip_ok,
    )


# ---------------------------------------------------------------------------
# the integer line


def line_expansion(k: int, lo: int, hi: int) -> ExpandedGraph:
    """Expanded multigraph of the constant-k cycle on the line window
    [lo, hi]: |k| parallel copies of every cell edge, reversed when k < 0."""
    graph = BandedZGraph().window(lo, hi)
    gamma = Chain1(graph, {n: k for n in range(lo, hi)})
    return expand_graph(graph, gamma)


def line_cycle_unitary(
    k: int,
    window: Window,
    copy_permutations: Optional[dict] = None,
) -> CycleUnitary:
    """Restriction to the window of the cycle unitary of the constant-k
    banded cycle.

    The canonical matching routes copy c of the cell arriving at x to copy c
    of the cell leaving x; copy_permutations[x] (a tuple permuting
    0..|k|-1) reroutes the copies at selected vertices.  Columns whose image
    leaves the window are zero, so the operator is unitary on the interior
    and exactly equals the infinite operator there.
    """
    lo, hi = window.lo, window.hi
    g = line_expansion(k, lo, hi) if k != 0 else line_expansion(0, lo, hi)
    domain = _full_domain(g)
    if k == 0:
        return CycleUnitary(
            expanded=g,
            matching=None,
            u=SparseBlockOperator.identity(domain),
            window=window,
        )
    copy_permutations = copy_permutations or {}
    slots = {e.slot for e in g.edges}
    step = 1 if k > 0 else -1
    mapping = {}
    for x in range(lo, hi + 1):
        ins = [e for e in g.edges if e.target == x]
        for j, e in enumerate(sorted(ins, key=lambda e: e.copy)):
            perm = copy_permutations.get(x)
            out_copy = (perm[j] + 1) if perm is not None else e.copy
            out_slot = CopyEdge(e.parent + step, out_copy)
            b = BlockIndex(x, e.slot)
            if out_slot in slots and lo <= x + step <= hi:
                mapping[b] = BlockIndex(x + step, out_slot)
            # otherwise the image leaves the window: zero column
    full = {}
    for b in domain:
        if b in mapping:
            full[b] = mapping[b]
        elif not _is_track(b, k):
            full[b] = b
        # track vectors without an in-window image keep a zero column
    u = SparseBlockOperator.from_basis_map(domain, full)
    return CycleUnitary(expanded=g, matching=None, u=u, window=window)


def _is_track(b: BlockIndex, k: int) -> bool:
    # for the constant-k line cycle, (x, copy of cell n) is a track vector
    # iff the expanded edge targets x: n = x-1 for k > 0, n = x for k < 0
    cell = b.slot.edge
    return cell == (b.vertex - 1 if k > 0 else b.vertex)


def constant_cycle_index(k: int, window: Window) -> int:
    """Index pairing of the constant-k cycle's unitary on the given window;
    the whole degree-1 pipeline for the line."""
    cu = line_cycle_unitary(k, window)
    return index_pairing(cu.u, window)


def line_matching_independence(
    k: int, window: Window, copy_permutations: dict
) -> dict:
    """Exact comparison of the canonical and a rerouted matching for the
    constant-k line cycle: the product identity on the window and equal
    index pairings."""
    if k == 0:
        raise ValueError("needs a nonzero cycle")
    cu_a = line_cycle_unitary(k, window)
    cu_b = line_cycle_unitary(k, window, copy_permutations)
    g = cu_a.expanded
    step = 1 if k > 0 else -1
    per_vertex = {}
    for x, perm in copy_permutations.items():
        if not (window.lo <= x <= window.hi):
            continue
        cell = x - 1 if k > 0 else x
        if not (window.lo <= cell <= window.hi - 1):
            continue
        # alpha^{-1} o beta on the ingoing slots: copy j+1 goes to perm[j]+1
        per_vertex[x] = {
            CopyEdge(cell, j + 1): CopyEdge(cell, perm[j] + 1)
            for j in range(abs(k))
        }
    correction = block_diagonal_slot_permutation(cu_a.u.domain, per_vertex)
    identity_holds = cu_a.u.compose(correction) == cu_b.u
    idx_a = index_pairing(cu_a.u, window)
    idx_b = index_pairing(cu_b.u, window)
    return {
        "correction_identity": identity_holds,
        "index_alpha": idx_a,
        "index_beta": idx_b,
        "indexes_equal": idx_a == idx_b,
    }
