"""Sparse integer block operators on the space spanned by (vertex, slot)
basis vectors.

A slot is either an ordinal position of an abstract Hilbert basis or a copy
of an edge of an expanded graph; together with a vertex it names one basis
vector.  Operators store only their nonzero integer entries over an explicit
finite ambient basis, so adjoints are transposes and every identity checked
here is an exact matrix identity.

Operators over the integer line are realized on truncation windows.  A finite
square matrix always has index zero, so the index pairing is computed as the
trace of P - U*PU against the half-line projection, summed over the central
region of the window where the truncated operator agrees with its infinite
model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Union

from .graphs import idkey
from .intlinalg import rank as matrix_rank


class OperatorError(ValueError):
    pass


class MarginError(OperatorError):
    """Window too small for the requested exact computation."""


class Ordinal(NamedTuple):
    index: int


class CopyEdge(NamedTuple):
    edge: object
    copy: int


Slot = Union[Ordinal, CopyEdge]


class BlockIndex(NamedTuple):
    vertex: object
    slot: Slot


def slot_key(s: Slot) -> tuple:
    if isinstance(s, Ordinal):
        return (0, (0, s.index, ""), 0)
    return (1, idkey(s.edge), s.copy)


def block_key(b: BlockIndex) -> tuple:
    return (idkey(b.vertex), slot_key(b.slot))


Entries = Mapping[tuple[BlockIndex, BlockIndex], int]


class SparseBlockOperator:
    """Integer matrix over an explicit orthonormal basis of BlockIndex."""

    def __init__(self, domain: Iterable[BlockIndex], entries: Entries = ()):
        self.domain = frozenset(domain)
        self.entries: dict[tuple[BlockIndex, BlockIndex], int] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for (r, c), v in items:
            v = int(v)
            if v == 0:
                continue
            if r not in self.domain or c not in self.domain:
                raise OperatorError(f"entry ({r}, {c}) outside the declared basis")
            self.entries[(r, c)] = v

    @classmethod
    def identity(cls, domain: Iterable[BlockIndex]) -> "SparseBlockOperator":
        dom = frozenset(domain)
        return cls(dom, {(b, b): 1 for b in dom})

    @classmethod
    def zero(cls, domain: Iterable[BlockIndex]) -> "SparseBlockOperator":
        return cls(domain, {})

    @classmethod
    def from_basis_map(
        cls,
        domain: Iterable[BlockIndex],
        mapping: Mapping[BlockIndex, BlockIndex],
        injective: bool = True,
    ) -> "SparseBlockOperator":
        """Operator sending basis vector b to mapping[b] (columns indexed by
        the preimage).  Vectors without an image get a zero column."""
        dom = frozenset(domain)
        if injective:
            images = list(mapping.values())
            if len(set(images)) != len(images):
                raise OperatorError("basis map is not injective")
        return cls(dom, {(img, src): 1 for src, img in mapping.items()})

    def entry(self, r: BlockIndex, c: BlockIndex) -> int:
        return self.entries.get((r, c), 0)

    def is_zero(self) -> bool:
        return not self.entries

    def compose(self, other: "SparseBlockOperator") -> "SparseBlockOperator":
        """Matrix product self * other."""
        if self.domain != other.domain:
            raise OperatorError("ambient bases differ")
        by_row: dict[BlockIndex, list[tuple[BlockIndex, int]]] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        acc: dict[tuple[BlockIndex, BlockIndex], int] = {}
        for (r, k), av in self.entries.items():
            for c, bv in by_row.get(k, ()):
                key = (r, c)
                acc[key] = acc.get(key, 0) + av * bv
        return SparseBlockOperator(self.domain, acc)

    def adjoint(self) -> "SparseBlockOperator":
        return SparseBlockOperator(
            self.domain, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def __add__(self, other: "SparseBlockOperator") -> "SparseBlockOperator":
        if self.domain != other.domain:
            raise OperatorError("ambient bases differ")
        acc = dict(self.entries)
        for key, v in other.entries.items():
            acc[key] = acc.get(key, 0) + v
        return SparseBlockOperator(self.domain, acc)

    def __sub__(self, other: "SparseBlockOperator") -> "SparseBlockOperator":
        if self.domain != other.domain:
            raise OperatorError("ambient bases differ")
        acc = dict(self.entries)
        for key, v in other.entries.items():
            acc[key] = acc.get(key, 0) - v
        return SparseBlockOperator(self.domain, acc)

    def __neg__(self) -> "SparseBlockOperator":
        return SparseBlockOperator(
            self.domain, {key: -v for key, v in self.entries.items()}
        )

    def defect(self) -> "SparseBlockOperator":
        """self minus the identity of its ambient basis."""
        return self - SparseBlockOperator.identity(self.domain)

    def __eq__(self, other):
        return (
            isinstance(other, SparseBlockOperator)
            and self.domain == other.domain
            and self.entries == other.entries
        )

    def __repr__(self):
        return (
            f"SparseBlockOperator({len(self.domain)} basis vectors, "
            f"{len(self.entries)} entries)"
        )


def compose(a: SparseBlockOperator, b: SparseBlockOperator) -> SparseBlockOperator:
    return a.compose(b)


def adjoint(a: SparseBlockOperator) -> SparseBlockOperator:
    return a.adjoint()


DistFn = Callable[[object, object], Optional[int]]


def propagation(a: SparseBlockOperator, dist) -> int:
    """Least R with every nonzero entry joining vertices at distance <= R.

    dist may be a callable or any object with a .dist method (a finite
    metric space, or the banded line)."""
    if not callable(dist):
        dist = dist.dist
    best = 0
    for (r, c) in a.entries:
        d = dist(r.vertex, c.vertex)
        if d is None:
            raise OperatorError(
                f"entry joins {r.vertex!r} and {c.vertex!r} at infinite distance"
            )
        if d > best:
            best = d
    return best


def block_rank(a: SparseBlockOperator, x, y) -> int:
    """Exact rank of the (x, y) vertex block over the rationals."""
    cells = {
        (r.slot, c.slot): v
        for (r, c), v in a.entries.items()
        if r.vertex == x and c.vertex == y
    }
    if not cells:
        return 0
    rows = sorted({rs for rs, _ in cells}, key=slot_key)
    cols = sorted({cs for _, cs in cells}, key=slot_key)
    mat = [[cells.get((rs, cs), 0) for cs in cols] for rs in rows]
    return matrix_rank(mat)


def _gram(a: SparseBlockOperator, contract_rows: bool) -> dict:
    """a*a (contracting rows) or aa* (contracting columns) as a plain entry
    dict; grouping by the contracted index avoids intermediate operators."""
    groups: dict[BlockIndex, list[tuple[BlockIndex, int]]] = {}
    for (r, c), v in a.entries.items():
        if contract_rows:
            groups.setdefault(r, []).append((c, v))
        else:
            groups.setdefault(c, []).append((r, v))
    prod: dict[tuple[BlockIndex, BlockIndex], int] = {}
    for vals in groups.values():
        if len(vals) == 1:
            i, v = vals[0]
            key = (i, i)
            prod[key] = prod.get(key, 0) + v * v
        else:
            for i1, v1 in vals:
                for i2, v2 in vals:
                    key = (i1, i2)
                    prod[key] = prod.get(key, 0) + v1 * v2
    return prod


def _is_identity_dict(prod: dict, interior: frozenset) -> bool:
    for (r, c), v in prod.items():
        if v and (r in interior or c in interior):
            if r != c or v != 1:
                return False
    return all(prod.get((b, b), 0) == 1 for b in interior)


def is_unitary_on(
    a: SparseBlockOperator, interior: Optional[Iterable[BlockIndex]] = None
) -> bool:
    """Check a*a = aa* = 1 exactly on the given basis vectors (the whole
    ambient basis when interior is None)."""
    region = frozenset(interior) if interior is not None else a.domain
    if not region <= a.domain:
        raise OperatorError("interior is not contained in the ambient basis")
    # fast path: when every row and column carries at most one entry, both
    # gram matrices are diagonal with the squared entries, so unitarity on
    # the region is a pointwise condition
    rows: dict[BlockIndex, int] = {}
    cols: dict[BlockIndex, int] = {}
    simple = True
    for (r, c), v in a.entries.items():
        if r in rows or c in cols:
            simple = False
            break
        rows[r] = v
        cols[c] = v
    if simple:
        return all(
            abs(rows.get(b, 0)) == 1 and abs(cols.get(b, 0)) == 1 for b in region
        )
    if not _is_identity_dict(_gram(a, contract_rows=True), region):
        return False
    return _is_identity_dict(_gram(a, contract_rows=False), region)


@dataclass(frozen=True)
class Window:
    """Central region [-radius, radius] of the line plus a margin absorbing
    truncation artifacts; operators are realized on [lo, hi]."""

    radius: int
    margin: int

    def __post_init__(self):
        if self.radius < 0 or self.margin < 0:
            raise OperatorError("radius and margin must be nonnegative")

    @property
    def lo(self) -> int:
        return -(self.radius + self.margin)

    @property
    def hi(self) -> int:
        return self.radius + self.margin

    def is_central(self, vertex: int) -> bool:
        return abs(vertex) <= self.radius

    def interior(self, domain: Iterable[BlockIndex]) -> frozenset:
        return frozenset(b for b in domain if self.is_central(b.vertex))


def line_dist(u, v) -> int:
    return abs(u - v)


def half_line_projection(domain: Iterable[BlockIndex]) -> SparseBlockOperator:
    dom = frozenset(domain)
    return SparseBlockOperator(dom, {(b, b): 1 for b in dom if b.vertex >= 0})


def defect_propagation(u: SparseBlockOperator, dist: DistFn = line_dist) -> int:
    """Propagation of u - 1 without materializing the difference: diagonal
    entries land at distance zero, so only the off-diagonal entries count."""
    best = 0
    for (r, c) in u.entries:
        if r == c:
            continue
        d = dist(r.vertex, c.vertex)
        if d is None:
            raise OperatorError(
                f"entry joins {r.vertex!r} and {c.vertex!r} at infinite distance"
            )
        if d > best:
            best = d
    return best


def index_pairing(
    u: SparseBlockOperator, window: Window, check_unitary: bool = True
) -> int:
    """Integer trace of P - u*Pu against the half-line projection P, summed
    over the central region of the window.

    For the infinite operator the support of P - u*Pu sits within the
    propagation distance of the cut at 0, so once the margin dominates the
    propagation the central sum is exact and independent of the window.
    """
    p = defect_propagation(u)
    if window.margin < 2 * p or window.radius < p:
        raise MarginError(
            f"window (radius {window.radius}, margin {window.margin}) too small "
            f"for propagation {p}; need margin >= {2 * p} and radius >= {p}"
        )
    interior = window.interior(u.domain)
    if check_unitary and not is_unitary_on(u, interior):
        raise OperatorError("operator is not unitary on the window interior")
    # diagonal of u*Pu at b is the sum of squares of the entries of the
    # column over b whose row lies on the nonnegative half line
    moved_diag: dict[BlockIndex, int] = {}
    for (r, c), v in u.entries.items():
        if r.vertex >= 0 and c in interior:
            moved_diag[c] = moved_diag.get(c, 0) + v * v
    total = 0
    for b in interior:
        total += (1 if b.vertex >= 0 else 0) - moved_diag.get(b, 0)
    return total


def bilateral_shift(
    window: Window, slots: tuple[Slot, ...] = (Ordinal(1),)
) -> SparseBlockOperator:
    """Truncated forward shift (x, s) -> (x+1, s); the sign oracle for the
    index pairing: its index is -1 per slot."""
    domain = [
        BlockIndex(x, s) for x in range(window.lo, window.hi + 1) for s in slots
    ]
    mapping = {
        BlockIndex(x, s): BlockIndex(x + 1, s)
        for x in range(window.lo, window.hi)
        for s in slots
    }
    return SparseBlockOperator.from_basis_map(domain, mapping)


# ---------------------------------------------------------------------------
# interchange formats


def _label_json(x):
    if isinstance(x, tuple):
        return [_label_json(part) for part in x]
    return x


def _label_from_json(x):
    if isinstance(x, list):
        return tuple(_label_from_json(part) for part in x)
    return x


def _fmt(x) -> str:
    return json.dumps(_label_json(x), separators=(",", ":"))


def _fmt_slot(s: Slot) -> str:
    if isinstance(s, Ordinal):
        return f"o:{s.index}"
    return f"e:{_fmt(s.edge)}:{s.copy}"


def dump_lines(a: SparseBlockOperator) -> list[str]:
    """Line-oriented sorted dump, bit-exact across platforms."""
    rows = []
    for (r, c), v in a.entries.items():
        rows.append((block_key(r), block_key(c), r, c, v))
    rows.sort(key=lambda item: (item[0], item[1]))
    return [
        f"{_fmt(r.vertex)}\t{_fmt_slot(r.slot)}\t{_fmt(c.vertex)}\t{_fmt_slot(c.slot)}\t{v}"
        for _, _, r, c, v in rows
    ]


def _slot_json(s: Slot):
    if isinstance(s, Ordinal):
        return {"ordinal": s.index}
    return {"edge": _label_json(s.edge), "copy": s.copy}


def _slot_from_json(data) -> Slot:
    if "ordinal" in data:
        return Ordinal(data["ordinal"])
    return CopyEdge(_label_from_json(data["edge"]), data["copy"])


def operator_to_json(a: SparseBlockOperator) -> dict:
    basis = sorted(a.domain, key=block_key)
    entries = sorted(a.entries.items(), key=lambda kv: (block_key(kv[0][0]), block_key(kv[0][1])))
    return {
        "basis": [[_label_json(b.vertex), _slot_json(b.slot)] for b in basis],
        "entries": [
            [_label_json(r.vertex), _slot_json(r.slot), _label_json(c.vertex), _slot_json(c.slot), v]
            for (r, c), v in entries
        ],
    }


def operator_from_json(data: dict) -> SparseBlockOperator:
    domain = [
        BlockIndex(_label_from_json(v), _slot_from_json(s)) for v, s in data["basis"]
    ]
    entries = {}
    for rv, rs, cv, cs, val in data["entries"]:
        r = BlockIndex(_label_from_json(rv), _slot_from_json(rs))
        c = BlockIndex(_label_from_json(cv), _slot_from_json(cs))
        entries[(r, c)] = val
    return SparseBlockOperator(domain, entries)
