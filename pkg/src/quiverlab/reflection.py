"""Point-level reflection functors, Coxeter relation checks, dominance
reduction, and the zero-padding / projection moves between fiber dimensions.

The reflection at a vertex replaces V_i by either ker(b_i) (when b_i is
surjective) or a complement of Im(a_i) (when a_i is injective); both choices
satisfy the same defining identities

    a'_i b'_i = a_i b_i - lambda_i Id_{T_i},
    everything away from i unchanged,
    mu(s') = (s_i lambda) Id,

and when lambda_i != 0 they land in the same orbit.  All arithmetic is exact,
so the verifier below is a decision procedure, not a tolerance check.
"""

from __future__ import annotations

from dataclasses import dataclass

import random as _random

from .errors import (
    MomentMismatch,
    RangeViolation,
    RankTooLarge,
    ReflectionUndefined,
)
from .linalg import (
    Mat,
    column_space_basis,
    complete_to_basis,
    hstack,
    inverse,
    kernel_basis,
    rank,
    solve_right,
)
from .paths import orbit_equivalent
from .quiver import (
    RootVec,
    WeightVec,
    cartan_data,
    dominance,
    dot_action,
    genericity,
    reflect_weight,
)
from .repspace import (
    DimData,
    FramedPoint,
    GroupElement,
    assemble_ab,
    group_act,
    moment_matches,
    sample_fiber,
)


@dataclass(frozen=True)
class ReflectionResult:
    point: FramedPoint
    vertex: object
    side: str            # "kernel" or "cokernel"
    lam: WeightVec       # reflected deformation parameter
    m: WeightVec | None  # reflected stability parameter, when given
    a_prime: Mat
    b_prime: Mat
    section: Mat         # kernel basis of b_i, or the complement of Im a_i
    layout: tuple


def _unpack_new_vertex(s, vertex, a2, b2):
    """Split a' and b' back into framing and arrow blocks along the T_i layout."""
    q = s.quiver
    incoming = q.arrows_into(vertex)
    di = s.dims.d_of(q, vertex)
    new_B = {}
    new_gamma = b2.submatrix(range(b2.rows), range(di))
    new_delta = a2.submatrix(range(di), range(a2.cols))
    row0 = di
    col0 = di
    for arr in incoming:
        w = s.dims.v_of(q, arr.h0)
        new_B[arr.bar] = a2.submatrix(range(row0, row0 + w), range(a2.cols))
        new_B[arr.id] = b2.submatrix(range(b2.rows), range(col0, col0 + w)).scale(arr.eps)
        row0 += w
        col0 += w
    return new_B, new_gamma, new_delta


def reflect_point(s: FramedPoint, vertex, lam: WeightVec, m: WeightVec | None = None, side="auto") -> ReflectionResult:
    """Reflect a moment-fiber point at one vertex.

    Preconditions: mu(s) = lambda Id exactly.  side "auto" takes the kernel
    construction when b_i is surjective, otherwise the cokernel construction
    when a_i is injective, and fails with ReflectionUndefined when neither
    applies (possible only when lambda_i = 0).
    """
    q = s.quiver
    idx = q.vertex_index(vertex)
    if not moment_matches(s, lam):
        raise MomentMismatch("point is not on the lambda fiber")
    ab = assemble_ab(s, vertex)
    vi = s.dims.v_of(q, vertex)
    t_dim = ab.a.rows
    lam_i = s.field.coerce(lam[idx])
    field = s.field

    b_epi = rank(ab.b) == vi
    a_mono = rank(ab.a) == vi
    if side == "auto":
        side = "kernel" if b_epi else ("cokernel" if a_mono else None)
        if side is None:
            raise ReflectionUndefined(
                f"at vertex {vertex}: b_i not surjective and a_i not injective"
            )
    elif side == "kernel" and not b_epi:
        raise ReflectionUndefined(f"kernel side needs b_i surjective at {vertex}")
    elif side == "cokernel" and not a_mono:
        raise ReflectionUndefined(f"cokernel side needs a_i injective at {vertex}")
    elif side not in ("kernel", "cokernel"):
        raise RangeViolation(f"unknown side {side!r}")

    rhs = ab.a * ab.b - Mat.scalar(field, t_dim, lam_i)
    if side == "kernel":
        ker = kernel_basis(ab.b)
        a2 = hstack(ker) if ker else Mat.zeros(field, t_dim, 0)
        # a' b' = a b - lambda_i; the columns of a2 are independent and span
        # ker b, which contains Im(rhs), so the solve is exact and unique.
        b2 = solve_right(a2, rhs).particular
        section = a2
    else:
        basis = complete_to_basis(ab.a)  # first vi columns = a
        compl = basis.submatrix(range(t_dim), range(vi, t_dim))
        proj = inverse(basis).submatrix(range(vi, t_dim), range(t_dim))
        a2 = rhs * compl
        b2 = proj
        section = compl

    v_new = a2.cols
    new_B, new_gamma, new_delta = _unpack_new_vertex(s, vertex, a2, b2)
    B = dict(s.B)
    B.update(new_B)
    gamma = dict(s.gamma)
    gamma[vertex] = new_gamma
    delta = dict(s.delta)
    delta[vertex] = new_delta
    vcoords = list(s.dims.v.coords)
    vcoords[idx] = v_new
    dims2 = DimData(s.dims.d, RootVec(tuple(vcoords)))
    s2 = FramedPoint(q, dims2, field, B, gamma, delta)

    lam2 = reflect_weight(q, idx, lam)
    m2 = reflect_weight(q, idx, m) if m is not None else None
    if not moment_matches(s2, lam2):
        raise AssertionError("reflected point is off the reflected fiber")
    return ReflectionResult(s2, vertex, side, lam2, m2, a2, b2, section, ab.layout)


@dataclass(frozen=True)
class ZReport:
    away_arrows: bool      # (1) arrows not touching i unchanged
    away_gamma: bool       # (2)
    away_delta: bool       # (3)
    exact_sequence: bool   # (4) 0 -> V'_i -> T_i -> V_i -> 0
    ab_identity: bool      # (5) a' b' = a b - lambda_i
    moments: bool          # (6) mu = lambda Id on both sides
    messages: tuple

    @property
    def all_pass(self):
        return (
            self.away_arrows
            and self.away_gamma
            and self.away_delta
            and self.exact_sequence
            and self.ab_identity
            and self.moments
        )


def verify_Z_conditions(s: FramedPoint, s2, vertex, lam: WeightVec) -> ZReport:
    """Check the six defining conditions of the reflection correspondence for
    the ordered pair (s, s2) at `vertex`, recomputing a/b from both points.
    Accepts the reflected FramedPoint or a whole ReflectionResult."""
    if isinstance(s2, ReflectionResult):
        s2 = s2.point
    q = s.quiver
    idx = q.vertex_index(vertex)
    msgs = []

    c1 = True
    for a in q.arrows:
        if vertex not in (a.h0, a.h1):
            if s.B[a.id] != s2.B[a.id]:
                c1 = False
                msgs.append(f"arrow {a.id} changed")
    c2 = True
    c3 = True
    for vert in q.vertices:
        if vert == vertex:
            continue
        if s.gamma[vert] != s2.gamma[vert]:
            c2 = False
            msgs.append(f"gamma[{vert}] changed")
        if s.delta[vert] != s2.delta[vert]:
            c3 = False
            msgs.append(f"delta[{vert}] changed")

    ab = assemble_ab(s, vertex)
    ab2 = assemble_ab(s2, vertex)
    vi = s.dims.v_of(q, vertex)
    vi2 = s2.dims.v_of(q, vertex)
    t_dim = ab.a.rows
    t_ok = ab2.a.rows == t_dim  # differs when away-from-i dims were tampered with

    c4 = True
    if rank(ab2.a) != vi2:
        c4 = False
        msgs.append("a' not injective")
    if rank(ab.b) != vi:
        c4 = False
        msgs.append("b not surjective")
    if not t_ok:
        c4 = False
        msgs.append(f"T_i dims differ: {ab2.a.rows} vs {t_dim}")
    elif not (ab.b * ab2.a).is_zero():
        c4 = False
        msgs.append("b . a' != 0")
    if vi + vi2 != t_dim:
        c4 = False
        msgs.append(f"dims {vi} + {vi2} != {t_dim}")

    lam_i = s.field.coerce(lam[idx])
    want = ab.a * ab.b - Mat.scalar(s.field, t_dim, lam_i)
    c5 = t_ok and ab2.a * ab2.b == want
    if not c5:
        msgs.append("a' b' != a b - lambda_i")

    lam2 = reflect_weight(q, idx, lam)
    c6 = moment_matches(s, lam) and moment_matches(s2, lam2)
    if not c6:
        msgs.append("moment equations fail")

    return ZReport(c1, c2, c3, c4, c5, c6, tuple(msgs))


@dataclass(frozen=True)
class WordResult:
    point: FramedPoint
    lam: WeightVec
    m: WeightVec | None
    steps: tuple  # (vertex, side) per letter, in execution order


def reflect_word(s: FramedPoint, word, lam: WeightVec, m: WeightVec | None = None) -> WordResult:
    """Apply reflections along the word, leftmost letter first, updating
    (lambda, m) at every step.  Each step needs (lambda_i, m_i) != (0, 0)."""
    q = s.quiver
    cur, cl, cm = s, lam, m
    steps = []
    for k, vertex in enumerate(word):
        idx = q.vertex_index(vertex)
        mi = cm[idx] if cm is not None else 0
        if cl[idx] == 0 and mi == 0:
            raise ReflectionUndefined(
                f"(lambda_i, m_i) = (0, 0) at step {k} (prefix {list(word[: k + 1])})"
            )
        try:
            res = reflect_point(cur, vertex, cl, cm, side="auto")
        except ReflectionUndefined as e:
            raise ReflectionUndefined(f"step {k} (prefix {list(word[: k + 1])}): {e}")
        cur, cl, cm = res.point, res.lam, res.m
        steps.append((vertex, res.side))
    return WordResult(cur, cl, cm, tuple(steps))


@dataclass(frozen=True)
class RelationCheck:
    kind: str        # "involution" | "commutation" | "braid" | "sides"
    vertices: tuple
    trials: int
    passes: int
    skipped: str = ""

    @property
    def ok(self):
        return bool(self.skipped) or self.passes == self.trials


@dataclass(frozen=True)
class CoxeterReport:
    checks: tuple
    generic: bool

    @property
    def all_pass(self):
        return all(c.ok for c in self.checks)


def check_coxeter(q, d: WeightVec, v: RootVec, lam: WeightVec, m: WeightVec | None = None,
                  trials=50, seed=0) -> CoxeterReport:
    """Sample fiber points and test the Coxeter relations of the reflections
    up to orbit equivalence: involutions at each vertex, commutation for
    non-adjacent pairs, the braid relation for single-edge pairs (multi-edge
    pairs are skipped), plus kernel/cokernel side agreement where
    lambda_i != 0.  Results are informational when (m, lambda) is not generic.
    """
    rng = _random.Random(seed)
    cd = cartan_data(q)
    dims = DimData(d, v)
    m_eff = m if m is not None else WeightVec((0,) * cd.n)
    gen = genericity(cd, m_eff, lam, v, mode="Uv").ok
    checks = []

    def sample():
        return sample_fiber(q, dims, lam, rng=rng)

    def equivalent(x, y):
        return orbit_equivalent(x, y, seed=rng.randrange(2**30)).kind == "yes"

    for idx, vertex in enumerate(q.vertices):
        if lam[idx] == 0 and m_eff[idx] == 0:
            checks.append(RelationCheck("involution", (vertex,), 0, 0,
                                        "lambda_i = m_i = 0"))
            continue
        attempted = passes = 0
        for _ in range(trials):
            s = sample()
            try:
                out = reflect_word(s, [vertex, vertex], lam, m_eff)
            except ReflectionUndefined:
                continue
            attempted += 1
            if equivalent(out.point, s):
                passes += 1
        checks.append(RelationCheck("involution", (vertex,), attempted, passes))

        if lam[idx] != 0:
            # lambda_i != 0 forces b_i epi and a_i mono, so both sides exist.
            passes = 0
            for _ in range(trials):
                s = sample()
                rk = reflect_point(s, vertex, lam, m_eff, side="kernel")
                rc = reflect_point(s, vertex, lam, m_eff, side="cokernel")
                if equivalent(rk.point, rc.point):
                    passes += 1
            checks.append(RelationCheck("sides", (vertex,), trials, passes))

    for i in range(cd.n):
        for j in range(i + 1, cd.n):
            vi_, vj_ = q.vertices[i], q.vertices[j]
            aij = cd.adjacency[i][j]
            if aij == 0:
                words = ([vi_, vj_], [vj_, vi_])
                kind = "commutation"
            elif aij == 1:
                words = ([vi_, vj_, vi_], [vj_, vi_, vj_])
                kind = "braid"
            else:
                checks.append(RelationCheck("braid", (vi_, vj_), 0, 0,
                                            f"a_ij = {aij} >= 2"))
                continue
            attempted = passes = 0
            for _ in range(trials):
                s = sample()
                try:
                    o1 = reflect_word(s, words[0], lam, m_eff)
                    o2 = reflect_word(s, words[1], lam, m_eff)
                except ReflectionUndefined:
                    continue
                attempted += 1
                if equivalent(o1.point, o2.point):
                    passes += 1
            checks.append(RelationCheck(kind, (vi_, vj_), attempted, passes))

    return CoxeterReport(tuple(checks), gen)


# -- dominance reduction -------------------------------------------------------


@dataclass(frozen=True)
class ReductionStep:
    vertex: object
    kind: str  # "reflect" | "drop"
    v_after: tuple


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple
    v: RootVec
    lam: WeightVec
    m: WeightVec | None
    word: tuple  # vertices of the reflect steps, execution order
    dominant: bool
    empty: bool


def reduce_to_dominant(q, d: WeightVec, v: RootVec, lam: WeightVec,
                       m: WeightVec | None = None) -> ReductionTrace:
    """Drive (v, lambda, m) to the dominant chamber of d - C v.

    At the smallest vertex index violating dominance: reflect (dot action on
    v, reflections on lambda and m) when lambda_i != 0, otherwise drop one
    from v_i.  Reflection strictly lowers v_i and drops lower sum(v), so the
    loop terminates; a negative coordinate after a reflection flags the empty
    case and stops.
    """
    cd = cartan_data(q)
    cur_v, cur_l, cur_m = v, lam, m
    steps = []
    word = []
    guard = 0
    while True:
        guard += 1
        if guard > 100000:
            raise AssertionError("dominance reduction did not terminate")
        dom = dominance(cd, d, cur_v)
        if any(c < 0 for c in cur_v.coords):
            return ReductionTrace(tuple(steps), cur_v, cur_l, cur_m, tuple(word),
                                  dominant=False, empty=True)
        bad = next((k for k, slack in enumerate(dom.slacks) if slack < 0), None)
        if bad is None:
            return ReductionTrace(tuple(steps), cur_v, cur_l, cur_m, tuple(word),
                                  dominant=True, empty=False)
        vertex = q.vertices[bad]
        if cur_l[bad] != 0:
            cur_v = dot_action(cd, [bad], d, cur_v)
            cur_l = reflect_weight(cd, bad, cur_l)
            if cur_m is not None:
                cur_m = reflect_weight(cd, bad, cur_m)
            word.append(vertex)
            steps.append(ReductionStep(vertex, "reflect", cur_v.coords))
        else:
            coords = list(cur_v.coords)
            coords[bad] -= 1
            cur_v = RootVec(tuple(coords))
            steps.append(ReductionStep(vertex, "drop", cur_v.coords))


# -- change of fiber dimensions -------------------------------------------------


def j_embed(s: FramedPoint, v_target: RootVec) -> FramedPoint:
    """Zero-pad a point up to larger fiber dimensions (closed immersion)."""
    q = s.quiver
    if len(v_target) != q.n:
        raise RangeViolation("target dims have wrong length")
    for k in range(q.n):
        if v_target[k] < s.dims.v[k]:
            raise RangeViolation("target dims must dominate the current dims")
    dims2 = DimData(s.dims.d, v_target)
    field = s.field

    def pad(mat, r, c):
        out = Mat.zeros(field, r, c)
        data = list(out._d)
        for i in range(mat.rows):
            for j in range(mat.cols):
                data[i * c + j] = mat[i, j]
        return Mat(field, r, c, data)

    B = {
        a.id: pad(s.B[a.id], dims2.v_of(q, a.h1), dims2.v_of(q, a.h0))
        for a in q.arrows
    }
    gamma = {
        vert: pad(s.gamma[vert], dims2.v_of(q, vert), dims2.d_of(q, vert))
        for vert in q.vertices
    }
    delta = {
        vert: pad(s.delta[vert], dims2.d_of(q, vert), dims2.v_of(q, vert))
        for vert in q.vertices
    }
    return FramedPoint(q, dims2, field, B, gamma, delta)


def limit_project(s: FramedPoint, vertex) -> FramedPoint:
    """Drop one dimension at `vertex` along the one-parameter degeneration.

    Needs mu_i(s) = 0 and either b_i not surjective (then a hyperplane
    containing Im b_i is split off) or a_i not injective (then a kernel line
    is).  Lusztig invariants are preserved exactly: the output is the limit
    of a group orbit and every invariant is constant on orbits and continuous.
    """
    q = s.quiver
    idx = q.vertex_index(vertex)
    vi = s.dims.v_of(q, vertex)
    if vi == 0:
        raise RangeViolation(f"v = 0 at {vertex}, nothing to drop")
    ab = assemble_ab(s, vertex)
    if not (ab.b * ab.a).is_zero():
        raise MomentMismatch(f"mu != 0 at {vertex}")
    field = s.field

    rb = rank(ab.b)
    if rb < vi:
        basis = complete_to_basis(column_space_basis(ab.b))
        drop_incoming_rows = True  # conjugated image sits in the first vi-1 coords
    elif rank(ab.a) < vi:
        k = kernel_basis(ab.a)[0]
        full = complete_to_basis(k)   # first column = kernel vector
        cols = list(range(1, vi)) + [0]  # rotate it to the end
        basis = full.submatrix(range(vi), cols)
        drop_incoming_rows = False
    else:
        raise RankTooLarge(f"b_i surjective and a_i injective at {vertex}")

    g_blocks = {
        vert: Mat.identity(field, s.dims.v_of(q, vert)) for vert in q.vertices
    }
    g_blocks[vertex] = inverse(basis)
    s2 = group_act(GroupElement(g_blocks), s)

    vcoords = list(s.dims.v.coords)
    vcoords[idx] = vi - 1
    dims2 = DimData(s.dims.d, RootVec(tuple(vcoords)))

    keep_rows = list(range(vi - 1))

    def cut_rows(m):
        if drop_incoming_rows and not m.submatrix([vi - 1], range(m.cols)).is_zero():
            raise AssertionError("nonzero coordinates outside the chosen hyperplane")
        return m.submatrix(keep_rows, range(m.cols))

    def cut_cols(m):
        if not drop_incoming_rows and not m.submatrix(range(m.rows), [vi - 1]).is_zero():
            raise AssertionError("kernel line is not in the kernel")
        return m.submatrix(range(m.rows), keep_rows)

    B = {}
    for a in q.arrows:
        mat = s2.B[a.id]
        if a.h1 == vertex:
            mat = cut_rows(mat)
        if a.h0 == vertex:
            mat = cut_cols(mat)
        B[a.id] = mat
    gamma = {
        vert: (cut_rows(s2.gamma[vert]) if vert == vertex else s2.gamma[vert])
        for vert in q.vertices
    }
    delta = {
        vert: (cut_cols(s2.delta[vert]) if vert == vertex else s2.delta[vert])
        for vert in q.vertices
    }
    return FramedPoint(q, dims2, field, B, gamma, delta)
