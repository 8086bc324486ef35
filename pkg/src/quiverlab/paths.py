"""Paths in the double, framed loop words, invariants, intertwiners.

Path literals: arrow ids joined by dots in composition order, so "h3.h1"
applies h1 first, then h3; "e1" is the empty path at vertex 1.  Framed loop
words (paths decorated with powers of gamma delta at intermediate vertices)
are written in brackets with the rightmost factor applied first:
"[2^1 h3.h1 1^2]" means (gamma_2 delta_2)^1 . (h3 h1) . (gamma_1 delta_1)^2.

The empty path evaluates to the identity; pass empty_as_zero=True to
reproduce the literal convention some sources use (it makes every framing
invariant collapse, which is why it is not the default).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidQuiver, RangeViolation, ShapeMismatch
from .linalg import Mat, is_invertible, solve_right
from .quiver import Quiver
from .repspace import FramedPoint, GroupElement, group_act


@dataclass(frozen=True)
class PathExpr:
    """A composable word of arrows; `arrow_ids` in application order."""

    quiver: Quiver
    arrow_ids: tuple
    base_vertex: object = None  # only used when arrow_ids is empty

    def __post_init__(self):
        object.__setattr__(self, "arrow_ids", tuple(self.arrow_ids))
        q = self.quiver
        if not self.arrow_ids:
            if self.base_vertex is None or self.base_vertex not in q.vertices:
                raise InvalidQuiver("empty path needs a valid base vertex")
            return
        prev = None
        for aid in self.arrow_ids:
            arr = q.arrow(aid)
            if prev is not None and prev != arr.h0:
                raise InvalidQuiver(f"path breaks at {aid}: {prev} != {arr.h0}")
            prev = arr.h1

    @property
    def source(self):
        if not self.arrow_ids:
            return self.base_vertex
        return self.quiver.arrow(self.arrow_ids[0]).h0

    @property
    def target(self):
        if not self.arrow_ids:
            return self.base_vertex
        return self.quiver.arrow(self.arrow_ids[-1]).h1

    def __len__(self):
        return len(self.arrow_ids)

    @property
    def is_closed(self):
        return self.source == self.target

    def __mul__(self, other):
        """self after other (matrix-style composition)."""
        if not isinstance(other, PathExpr):
            return NotImplemented
        if other.target != self.source:
            raise InvalidQuiver("paths do not compose")
        if not self.arrow_ids and not other.arrow_ids:
            return PathExpr(self.quiver, (), self.base_vertex)
        return PathExpr(self.quiver, other.arrow_ids + self.arrow_ids)


def empty_path(q, vertex):
    return PathExpr(q, (), vertex)


@dataclass(frozen=True)
class BPathExpr:
    """Alternating word (gamma delta)^{r_{m+1}} . path_m . ... . path_1 . (gamma delta)^{r_1}.

    `vertices` is the chain i_1 .. i_{m+1}; `paths` has length m and
    paths[j] runs from vertices[j] to vertices[j+1]; `loop_exponents` has
    length m+1.
    """

    quiver: Quiver
    vertices: tuple
    loop_exponents: tuple
    paths: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "loop_exponents", tuple(self.loop_exponents))
        object.__setattr__(self, "paths", tuple(self.paths))
        if len(self.vertices) != len(self.paths) + 1:
            raise ShapeMismatch("vertex chain length must be #paths + 1")
        if len(self.loop_exponents) != len(self.vertices):
            raise ShapeMismatch("need one loop exponent per chain vertex")
        if any(r < 0 for r in self.loop_exponents):
            raise RangeViolation("loop exponents must be >= 0")
        for v in self.vertices:
            if v not in self.quiver.vertices:
                raise InvalidQuiver(f"unknown vertex {v}")
        for j, p in enumerate(self.paths):
            if p.source != self.vertices[j] or p.target != self.vertices[j + 1]:
                raise InvalidQuiver(f"segment {j} does not match the vertex chain")

    @property
    def source(self):
        return self.vertices[0]

    @property
    def target(self):
        return self.vertices[-1]

    @property
    def is_path_algebra_element(self):
        return all(r == 0 for r in self.loop_exponents)


# -- literals ---------------------------------------------------------------

_LOOP_TOKEN = re.compile(r"^(-?\d+)\^(\d+)$")
_EMPTY_TOKEN = re.compile(r"^e(-?\d+)$")


def format_path(p: PathExpr) -> str:
    if not p.arrow_ids:
        return f"e{p.base_vertex}"
    return ".".join(reversed(p.arrow_ids))


def parse_path(q: Quiver, text: str) -> PathExpr:
    text = text.strip()
    m = _EMPTY_TOKEN.match(text)
    if m:
        return empty_path(q, int(m.group(1)))
    ids = tuple(reversed([t for t in text.split(".") if t]))
    return PathExpr(q, ids)


def format_bpath(b: BPathExpr) -> str:
    toks = []
    for j in range(len(b.vertices) - 1, -1, -1):
        toks.append(f"{b.vertices[j]}^{b.loop_exponents[j]}")
        if j > 0:
            toks.append(format_path(b.paths[j - 1]))
    return "[" + " ".join(toks) + "]"


def parse_bpath(q: Quiver, text: str) -> BPathExpr:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise InvalidQuiver(f"framed word literal must be bracketed: {text!r}")
    toks = text[1:-1].split()
    if len(toks) % 2 == 0 or not toks:
        raise InvalidQuiver("framed word literal must alternate loops and paths")
    toks = list(reversed(toks))  # now in application order
    vertices, exps, paths = [], [], []
    for k, tok in enumerate(toks):
        if k % 2 == 0:
            m = _LOOP_TOKEN.match(tok)
            if not m:
                raise InvalidQuiver(f"expected vertex^exponent, got {tok!r}")
            vertices.append(int(m.group(1)))
            exps.append(int(m.group(2)))
        else:
            paths.append(parse_path(q, tok))
    return BPathExpr(q, tuple(vertices), tuple(exps), tuple(paths))


def parse_expr(q: Quiver, text: str):
    """Either a path literal or a bracketed framed-word literal."""
    text = text.strip()
    if text.startswith("["):
        return parse_bpath(q, text)
    return parse_path(q, text)


# -- evaluation ----------------------------------------------------------------------


def evaluate(expr, s: FramedPoint, empty_as_zero=False) -> Mat:
    """Evaluate a path or framed word at a point; a (v_target x v_source) matrix.

    The empty path gives the identity on V_i unless empty_as_zero is set.
    """
    if expr.quiver != s.quiver:
        raise ShapeMismatch("expression and point live on different quivers")
    q = s.quiver
    if isinstance(expr, PathExpr):
        vi = s.dims.v_of(q, expr.source)
        if not expr.arrow_ids:
            if empty_as_zero:
                return Mat.zeros(s.field, vi, vi)
            return Mat.identity(s.field, vi)
        acc = s.B[expr.arrow_ids[0]]
        for aid in expr.arrow_ids[1:]:
            acc = s.B[aid] * acc
        return acc
    if isinstance(expr, BPathExpr):
        def loop_power(vertex, r):
            vi = s.dims.v_of(q, vertex)
            m = Mat.identity(s.field, vi)
            gd = s.gamma[vertex] * s.delta[vertex]
            for _ in range(r):
                m = gd * m
            return m

        acc = loop_power(expr.vertices[0], expr.loop_exponents[0])
        for j, p in enumerate(expr.paths):
            acc = evaluate(p, s, empty_as_zero) * acc
            acc = loop_power(expr.vertices[j + 1], expr.loop_exponents[j + 1]) * acc
        return acc
    raise ShapeMismatch(f"cannot evaluate {type(expr).__name__}")


def enumerate_paths(q: Quiver, max_len: int):
    """All nonempty paths of length <= max_len, shortest first, arrows in id
    order; deterministic, so invariant lists line up between points."""
    arrows = sorted(q.arrows, key=lambda a: a.id)
    out_of = {vert: [a for a in arrows if a.h0 == vert] for vert in q.vertices}
    level = [PathExpr(q, (a.id,)) for a in arrows]
    for p in level:
        yield p
    for _ in range(max_len - 1):
        nxt = []
        for p in level:
            for a in out_of[p.target]:
                ext = PathExpr(q, p.arrow_ids + (a.id,))
                nxt.append(ext)
                yield ext
        level = nxt


def lusztig_invariants(s: FramedPoint, max_len: int):
    """The classical generating invariants, exactly evaluated:

      * Tr(path) for every closed path of length 1..max_len,
      * every entry of delta_target . path . gamma_source for every path of
        length 0..max_len (length 0 gives the delta_i gamma_i blocks).

    Returned as (descriptor, value) pairs in a deterministic order.  Constant
    traces of empty paths are omitted: they only encode v_i and would differ
    across points with different fiber dimensions, which is exactly the
    comparison the projection tools need.
    """
    q = s.quiver
    out = []
    for p in enumerate_paths(q, max_len):
        if p.is_closed:
            out.append((("tr", format_path(p)), evaluate(p, s).trace()))

    def framing_entries(p):
        m = s.delta[p.target] * evaluate(p, s) * s.gamma[p.source]
        lit = format_path(p)
        for r in range(m.rows):
            for c in range(m.cols):
                out.append((("fr", lit, r, c), m[r, c]))

    for vert in q.vertices:
        framing_entries(empty_path(q, vert))
    for p in enumerate_paths(q, max_len):
        framing_entries(p)
    return out


# -- intertwiners ----------------------------------------------------------


@dataclass(frozen=True)
class Intertwiner:
    """Vertex-wise maps V_i(s) -> V_i(t) commuting with all the data, with the
    framing identification on D fixed to the identity."""

    blocks: dict  # vertex -> Mat

    def is_invertible(self):
        return all(is_invertible(m) for m in self.blocks.values())


def is_intertwiner(g: Intertwiner, s: FramedPoint, t: FramedPoint) -> bool:
    q = s.quiver
    for a in q.arrows:
        if g.blocks[a.h1] * s.B[a.id] != t.B[a.id] * g.blocks[a.h0]:
            return False
    for vert in q.vertices:
        if g.blocks[vert] * s.gamma[vert] != t.gamma[vert]:
            return False
        if t.delta[vert] * g.blocks[vert] != s.delta[vert]:
            return False
    return True


@dataclass(frozen=True)
class HomSolution:
    """The solution set of the intertwiner equations from s to t.

    The gamma/delta conditions have constant right-hand sides, so the set is
    affine: particular + span(basis).  `exists` is False when the system is
    inconsistent (then both other fields are empty)."""

    exists: bool
    particular: Intertwiner | None
    basis: tuple

    @property
    def dimension(self):
        return len(self.basis) if self.exists else None

    def element(self, coeffs):
        blocks = {v: m for v, m in self.particular.blocks.items()}
        for c, b in zip(coeffs, self.basis):
            for v in blocks:
                blocks[v] = blocks[v] + b.blocks[v].scale(c)
        return Intertwiner(blocks)


def hom_space(s: FramedPoint, t: FramedPoint) -> HomSolution:
    """Exact solution set of the intertwiner equations (framing fixed to Id)."""
    if s.quiver != t.quiver:
        raise ShapeMismatch("points live on different quivers")
    if s.field.name != t.field.name:
        raise ShapeMismatch("points live over different fields")
    q = s.quiver
    field = s.field
    vs = {vert: s.dims.v_of(q, vert) for vert in q.vertices}
    vt = {vert: t.dims.v_of(q, vert) for vert in q.vertices}
    offsets = {}
    total = 0
    for vert in q.vertices:
        offsets[vert] = total
        total += vt[vert] * vs[vert]

    rows = []
    rhs = []

    def add_left(vert, L, R):  # L . g_vert = R, L maps V_vert(t) somewhere
        for r in range(L.rows):
            for c in range(vs[vert]):
                row = [field.zero()] * total
                off = offsets[vert]
                for k in range(vt[vert]):
                    row[off + k * vs[vert] + c] = L[r, k]
                rows.append(row)
                rhs.append(R[r, c])

    def add_right(vert, R0, R):  # g_vert . R0 = R
        for r in range(vt[vert]):
            for c in range(R0.cols):
                row = [field.zero()] * total
                off = offsets[vert]
                for k in range(vs[vert]):
                    row[off + r * vs[vert] + k] = R0[k, c]
                rows.append(row)
                rhs.append(R[r, c])

    # g_{h1} B_h(s) - B_h(t) g_{h0} = 0, entrywise
    for a in q.arrows:
        rr = vt[a.h1]
        cc = vs[a.h0]
        Bs, Bt = s.B[a.id], t.B[a.id]
        for r in range(rr):
            for c in range(cc):
                row = [field.zero()] * total
                off1 = offsets[a.h1]
                for k in range(vs[a.h1]):
                    row[off1 + r * vs[a.h1] + k] = row[off1 + r * vs[a.h1] + k] + Bs[k, c]
                off0 = offsets[a.h0]
                for k in range(vt[a.h0]):
                    row[off0 + k * vs[a.h0] + c] = row[off0 + k * vs[a.h0] + c] - Bt[r, k]
                rows.append(row)
                rhs.append(field.zero())
    for vert in q.vertices:
        add_right(vert, s.gamma[vert], t.gamma[vert])   # g gamma(s) = gamma(t)
        add_left(vert, t.delta[vert], s.delta[vert])    # delta(t) g = delta(s)

    A = Mat(field, len(rows), total, [x for row in rows for x in row])
    from .errors import NoSolution

    try:
        sol = solve_right(A, Mat.column(field, rhs))
    except NoSolution:
        return HomSolution(False, None, ())

    def unpack(vec):
        blocks = {}
        for vert in q.vertices:
            off = offsets[vert]
            blocks[vert] = Mat(
                field, vt[vert], vs[vert],
                [vec[off + k, 0] for k in range(vt[vert] * vs[vert])],
            )
        return Intertwiner(blocks)

    return HomSolution(
        True,
        unpack(sol.particular),
        tuple(unpack(h) for h in sol.homogeneous),
    )


@dataclass(frozen=True)
class OrbitDecision:
    kind: str  # "yes" | "no" | "unknown"
    witness: GroupElement | None = None
    reason: str = ""


def orbit_equivalent(
    s: FramedPoint, t: FramedPoint, trials=24, invariant_len=4, seed=0
) -> OrbitDecision:
    """Decide whether t = g . s for some invertible block tuple g.

    Yes always comes with a verified witness.  No is certified either by an
    invariant mismatch, by an empty or dimension-mismatched hom set, or by a
    zero-dimensional hom set whose single point is singular.  When the hom
    set is positive-dimensional and every tried combination is singular the
    answer stays Unknown: random evaluation cannot soundly prove that the
    determinant vanishes on the whole affine set.
    """
    import random as _random

    if s.dims != t.dims:
        raise ShapeMismatch("orbit comparison needs equal dimension data")
    q = s.quiver
    inv_s = lusztig_invariants(s, invariant_len)
    inv_t = lusztig_invariants(t, invariant_len)
    for (ds_, vs_), (_, vt_) in zip(inv_s, inv_t):
        if vs_ != vt_:
            return OrbitDecision("no", reason=f"invariant mismatch at {ds_}")

    if all(s.dims.v_of(q, vert) == 0 for vert in q.vertices):
        return OrbitDecision("yes", identity_like(s), "all fibers are zero")

    fwd = hom_space(s, t)
    bwd = hom_space(t, s)
    if not fwd.exists or not bwd.exists:
        return OrbitDecision("no", reason="no intertwiner in one direction")
    if fwd.dimension != bwd.dimension:
        return OrbitDecision("no", reason="hom dimensions differ between directions")

    def try_candidate(g: Intertwiner):
        if not g.is_invertible():
            return None
        ge = GroupElement(dict(g.blocks))
        if group_act(ge, s) == t:
            return ge
        return None  # cannot happen for true intertwiners; guards the solver

    w = try_candidate(fwd.particular)
    if w is not None:
        return OrbitDecision("yes", w, "particular solution is invertible")
    r = fwd.dimension
    if r == 0:
        return OrbitDecision("no", reason="hom set is a single singular point")

    n_total = sum(s.dims.v_of(q, vert) for vert in q.vertices)
    for tv in range(1, n_total * r + 2):
        w = try_candidate(fwd.element([tv**j for j in range(1, r + 1)]))
        if w is not None:
            return OrbitDecision("yes", w, "deterministic scan")
    rng = _random.Random(seed)
    for _ in range(trials):
        coeffs = [s.field.random(rng, 7) for _ in range(r)]
        w = try_candidate(fwd.element(coeffs))
        if w is not None:
            return OrbitDecision("yes", w, "random combination")
    return OrbitDecision(
        "unknown", reason="positive-dimensional hom set, all tried combinations singular"
    )


def identity_like(s: FramedPoint) -> GroupElement:
    q = s.quiver
    return GroupElement(
        {vert: Mat.identity(s.field, s.dims.v_of(q, vert)) for vert in q.vertices}
    )
