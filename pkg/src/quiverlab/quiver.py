"""Doubled quivers with framing, Cartan bookkeeping, and Weyl group actions.

A quiver here is always the double: arrows come in pairs h, bar(h) running in
opposite directions, no arrow is a loop, and a sign eps with eps(bar h) =
-eps(h) splits the arrow set into two halves.  Vertices are integers; the
order of the `vertices` tuple fixes the coordinate order of every vector.

Three coordinate systems coexist and are kept as distinct types on purpose:
weights (framing dimensions d, stability/deformation parameters m, lambda),
roots (dimension vectors v), and coroots (the test directions u of the
genericity walls).  Mixing them up compiles fine in untyped code and produces
silently wrong reflections, hence the wrappers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidQuiver, NotFiniteType, RangeViolation, ShapeMismatch


@dataclass(frozen=True)
class Arrow:
    id: str
    h0: int  # source vertex
    h1: int  # target vertex
    eps: int
    bar: str  # id of the reversed partner


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        self._validate()

    def _validate(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise InvalidQuiver("duplicate vertices")
        ids = {}
        for a in self.arrows:
            if a.id in ids:
                raise InvalidQuiver(f"duplicate arrow id {a.id}")
            ids[a.id] = a
        for a in self.arrows:
            if a.h0 not in vs or a.h1 not in vs:
                raise InvalidQuiver(f"arrow {a.id} touches unknown vertex")
            if a.h0 == a.h1:
                raise InvalidQuiver(f"arrow {a.id} is a loop")
            if a.eps not in (1, -1):
                raise InvalidQuiver(f"arrow {a.id} has sign {a.eps}")
            if a.bar not in ids:
                raise InvalidQuiver(f"arrow {a.id} has unknown partner {a.bar}")
            b = ids[a.bar]
            if b.bar != a.id or b.id == a.id:
                raise InvalidQuiver(f"bar is not a fixed-point-free involution at {a.id}")
            if (b.h0, b.h1) != (a.h1, a.h0):
                raise InvalidQuiver(f"partner of {a.id} does not reverse it")
            if b.eps != -a.eps:
                raise InvalidQuiver(f"signs of {a.id}/{b.id} do not alternate")

    @cached_property
    def _by_id(self):
        return {a.id: a for a in self.arrows}

    @cached_property
    def _index(self):
        return {v: k for k, v in enumerate(self.vertices)}

    @property
    def n(self):
        return len(self.vertices)

    def vertex_index(self, v):
        try:
            return self._index[v]
        except KeyError:
            raise InvalidQuiver(f"unknown vertex {v}")

    def arrow(self, arrow_id):
        try:
            return self._by_id[arrow_id]
        except KeyError:
            raise InvalidQuiver(f"unknown arrow {arrow_id}")

    def arrows_into(self, v):
        """Arrows with target v, ascending by id (the canonical summand order)."""
        return sorted((a for a in self.arrows if a.h1 == v), key=lambda a: a.id)

    def arrows_out_of(self, v):
        return sorted((a for a in self.arrows if a.h0 == v), key=lambda a: a.id)

    def omega(self):
        """The chosen half: arrows with eps = +1."""
        return [a for a in self.arrows if a.eps == 1]

    def to_json(self):
        return {
            "vertices": list(self.vertices),
            "arrows": [
                {"id": a.id, "from": a.h0, "to": a.h1, "eps": a.eps, "bar": a.bar}
                for a in self.arrows
            ],
        }

    @classmethod
    def from_json(cls, obj):
        arrows = tuple(
            Arrow(d["id"], d["from"], d["to"], d["eps"], d["bar"])
            for d in obj["arrows"]
        )
        return cls(tuple(obj["vertices"]), arrows)


def doubled_quiver(vertices, edges):
    """Double of an undirected multigraph.

    Each edge (u, w) becomes the pair h{k}: u -> w with eps +1 and
    h{k}b: w -> u with eps -1 (k = 1-based edge index).
    """
    arrows = []
    for k, (u, w) in enumerate(edges, start=1):
        arrows.append(Arrow(f"h{k}", u, w, 1, f"h{k}b"))
        arrows.append(Arrow(f"h{k}b", w, u, -1, f"h{k}"))
    return Quiver(tuple(vertices), tuple(arrows))


def dynkin_quiver(name):
    """Dynkin graphs by the usual names: "A1", "A2", ..., "D4", "D5", ...

    A_n is the line 1 - 2 - ... - n; D_n is the line 1 - ... - (n-2) with both
    (n-1) and n attached to (n-2).
    """
    kind, num = name[0].upper(), int(name[1:])
    if kind == "A" and num >= 1:
        return doubled_quiver(range(1, num + 1), [(k, k + 1) for k in range(1, num)])
    if kind == "D" and num >= 4:
        edges = [(k, k + 1) for k in range(1, num - 2)]
        edges += [(num - 2, num - 1), (num - 2, num)]
        return doubled_quiver(range(1, num + 1), edges)
    raise InvalidQuiver(f"unsupported Dynkin name {name!r}")


# -- vectors ---------------------------------------------------------------


@dataclass(frozen=True)
class WeightVec:
    """Coordinates x_i = <x, alpha_i^vee> (framing dims d, parameters m, lambda)."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, k):
        return self.coords[k]


@dataclass(frozen=True)
class RootVec:
    """Coordinates in the simple-root basis (dimension vectors v)."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, k):
        return self.coords[k]


@dataclass(frozen=True)
class CorootVec:
    """Coordinates in the simple-coroot basis (wall test directions u)."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, k):
        return self.coords[k]


def pair(x: WeightVec, u: CorootVec):
    """<x, u^vee> = sum_i x_i u_i in the chosen coordinates."""
    if len(x) != len(u):
        raise ShapeMismatch("pairing length mismatch")
    acc = 0
    for a, b in zip(x.coords, u.coords):
        acc = acc + b * a
    return acc


@dataclass(frozen=True)
class CartanData:
    adjacency: tuple  # a_ij = number of arrows i -> j (symmetric, zero diagonal)
    cartan: tuple     # c_ij = 2 delta_ij - a_ij

    @property
    def n(self):
        return len(self.cartan)


def cartan_data(q: Quiver) -> CartanData:
    n = q.n
    a = [[0] * n for _ in range(n)]
    for arr in q.arrows:
        a[q.vertex_index(arr.h0)][q.vertex_index(arr.h1)] += 1
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise InvalidQuiver("adjacency is not symmetric")  # unreachable for valid doubles
    c = [[(2 if i == j else 0) - a[i][j] for j in range(n)] for i in range(n)]
    return CartanData(tuple(map(tuple, a)), tuple(map(tuple, c)))


def _as_cartan(qc) -> CartanData:
    if isinstance(qc, CartanData):
        return qc
    return cartan_data(qc)


def _check_len(cd, vec, nm):
    if len(vec) != cd.n:
        raise ShapeMismatch(f"{nm} has length {len(vec)}, quiver has {cd.n} vertices")


def reflect_weight(qc, i, x: WeightVec) -> WeightVec:
    """Simple reflection s_i on weight coordinates: x_j -> x_j - c_ij x_i."""
    cd = _as_cartan(qc)
    _check_len(cd, x, "weight")
    ci = cd.cartan[i]
    xi = x.coords[i]
    return WeightVec(tuple(xj - cij * xi for xj, cij in zip(x.coords, ci)))


def reflect_coroot(qc, i, u: CorootVec) -> CorootVec:
    """s_i on coroot coordinates: u -> u - (C u)_i alpha_i^vee."""
    cd = _as_cartan(qc)
    _check_len(cd, u, "coroot")
    t = sum(cij * uj for cij, uj in zip(cd.cartan[i], u.coords))
    new = list(u.coords)
    new[i] -= t
    return CorootVec(tuple(new))


def _dot_once(cd, d, v, i):
    ai = cd.adjacency[i]
    vi_new = d[i] - v[i] + sum(aij * vj for aij, vj in zip(ai, v))
    new = list(v)
    new[i] = vi_new
    return new


def dot_action(qc, word, d: WeightVec, v: RootVec) -> RootVec:
    """Affine dot action of the word on a dimension vector.

    `word` is a sequence of vertex indices; the rightmost letter acts first,
    matching the convention that a word spells a product of reflections.
    """
    cd = _as_cartan(qc)
    _check_len(cd, d, "d")
    _check_len(cd, v, "v")
    cur = list(v.coords)
    for i in reversed(list(word)):
        if not 0 <= i < cd.n:
            raise RangeViolation(f"vertex index {i} out of range")
        cur = _dot_once(cd, d.coords, cur, i)
    return RootVec(tuple(cur))


def variety_dimension(qc, d: WeightVec, v: RootVec):
    """Expected dimension 2 <d, v> - (v, v) = sum_i 2 d_i v_i - v^T C v."""
    cd = _as_cartan(qc)
    _check_len(cd, d, "d")
    _check_len(cd, v, "v")
    lin = sum(2 * di * vi for di, vi in zip(d.coords, v.coords))
    quad = sum(
        v[i] * cd.cartan[i][j] * v[j] for i in range(cd.n) for j in range(cd.n)
    )
    return lin - quad


@dataclass(frozen=True)
class Dominance:
    dominant: bool
    regular: bool
    slacks: tuple  # (d - C v)_i per vertex


def dominance(qc, d: WeightVec, v: RootVec) -> Dominance:
    cd = _as_cartan(qc)
    _check_len(cd, d, "d")
    _check_len(cd, v, "v")
    slacks = tuple(
        d[i] - sum(cij * vj for cij, vj in zip(cd.cartan[i], v.coords))
        for i in range(cd.n)
    )
    return Dominance(
        dominant=all(s >= 0 for s in slacks),
        regular=all(s > 0 for s in slacks),
        slacks=slacks,
    )


# -- Weyl group --------------------------------------------------------------


def is_finite_type(qc) -> bool:
    """Positive definiteness of the Cartan matrix via leading principal minors."""
    cd = _as_cartan(qc)
    for k in range(1, cd.n + 1):
        m = [list(row[:k]) for row in cd.cartan[:k]]
        from .linalg import _det_bareiss_int

        if _det_bareiss_int(m) <= 0:
            return False
    return True


@dataclass(frozen=True)
class WeylElement:
    """Canonical form: the integer action matrix on root coordinates.

    The word is provenance only (a shortest word found by the BFS closure);
    two elements are the same iff their matrices agree.
    """

    matrix: tuple  # tuple of row tuples, v -> M v on root coordinates
    word: tuple

    def apply_root(self, v: RootVec) -> RootVec:
        return RootVec(
            tuple(sum(r * c for r, c in zip(row, v.coords)) for row in self.matrix)
        )

    def apply_coroot(self, u: CorootVec) -> CorootVec:
        return CorootVec(
            tuple(sum(r * c for r, c in zip(row, u.coords)) for row in self.matrix)
        )


def _generator_matrix(cd, i):
    n = cd.n
    rows = []
    for r in range(n):
        if r != i:
            rows.append(tuple(1 if c == r else 0 for c in range(n)))
        else:
            rows.append(tuple((1 if c == i else 0) - cd.cartan[i][c] for c in range(n)))
    return tuple(rows)


def _matmul_int(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def enumerate_weyl(qc):
    """All Weyl group elements by breadth-first closure over the generators.

    Raises NotFiniteType when the Cartan matrix is not positive definite
    (the closure would not terminate).
    """
    cd = _as_cartan(qc)
    if not is_finite_type(cd):
        raise NotFiniteType("Weyl group is infinite")
    n = cd.n
    gens = [_generator_matrix(cd, i) for i in range(n)]
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    seen = {ident: ()}
    frontier = [ident]
    order = [ident]
    while frontier:
        new_frontier = []
        for m in frontier:
            w = seen[m]
            for i, g in enumerate(gens):
                prod = _matmul_int(g, m)  # s_i acting after m: word (i, *w)
                if prod not in seen:
                    seen[prod] = (i,) + w
                    new_frontier.append(prod)
                    order.append(prod)
        frontier = new_frontier
    return [WeylElement(m, seen[m]) for m in order]


def _apply_word_weight(cd, word, x: WeightVec) -> WeightVec:
    """sigma(x) for sigma = s_{w_0} ... s_{w_k} (rightmost acts first)."""
    cur = x
    for i in reversed(list(word)):
        cur = reflect_weight(cd, i, cur)
    return cur


@dataclass(frozen=True)
class GenericityResult:
    ok: bool
    witness_u: CorootVec | None = None
    witness_sigma: tuple | None = None


def _iter_box(caps):
    """All nonzero integer vectors 0 <= u <= caps; empty if any cap < 0."""
    if any(c < 0 for c in caps):
        return
    for u in itertools.product(*(range(c + 1) for c in caps)):
        if any(u):
            yield u


def _k_constant(cd):
    best = 1
    for i in range(cd.n):
        for j in range(cd.n):
            if i != j:
                best = max(best, cd.adjacency[i][j] ** 2)
    return best


def genericity(qc, m: WeightVec, lam: WeightVec, v: RootVec, mode="Uv", d: WeightVec | None = None):
    """Check (m, lambda) against the walls {<u, m> = <u, lambda> = 0}.

    Modes:
      "Uv"      test u in the box 0 < u <= v;
      "UvTilde" test the enlarged box 0 < u <= K v, K = max(1, a_ij^2);
      "Gv"      require, for every Weyl element sigma, that sigma(m, lambda)
                clears the enlarged box of sigma . v (dot action, needs d);
      "Hinf"    test every coroot in the Weyl orbits of the simple coroots.

    Returns a GenericityResult; on failure the violating u (and sigma's word
    for mode Gv) is reported.
    """
    cd = _as_cartan(qc)
    _check_len(cd, m, "m")
    _check_len(cd, lam, "lambda")
    _check_len(cd, v, "v")

    def on_wall(mm, ll, u):
        return pair(mm, CorootVec(u)) == 0 and pair(ll, CorootVec(u)) == 0

    if mode == "Uv":
        for u in _iter_box(v.coords):
            if on_wall(m, lam, u):
                return GenericityResult(False, CorootVec(u))
        return GenericityResult(True)

    if mode == "UvTilde":
        k = _k_constant(cd)
        for u in _iter_box(tuple(k * c for c in v.coords)):
            if on_wall(m, lam, u):
                return GenericityResult(False, CorootVec(u))
        return GenericityResult(True)

    if mode == "Gv":
        if d is None:
            raise RangeViolation("mode Gv needs the framing vector d")
        k = _k_constant(cd)
        for el in enumerate_weyl(cd):
            ms = _apply_word_weight(cd, el.word, m)
            ls = _apply_word_weight(cd, el.word, lam)
            vs = dot_action(cd, el.word, d, v)
            for u in _iter_box(tuple(k * c for c in vs.coords)):
                if on_wall(ms, ls, u):
                    return GenericityResult(False, CorootVec(u), el.word)
        return GenericityResult(True)

    if mode == "Hinf":
        elements = enumerate_weyl(cd)
        seen = set()
        for i in range(cd.n):
            alpha = CorootVec(tuple(1 if j == i else 0 for j in range(cd.n)))
            for el in elements:
                u = el.apply_coroot(alpha).coords
                if u in seen or tuple(-c for c in u) in seen:
                    continue
                seen.add(u)
                if on_wall(m, lam, u):
                    return GenericityResult(False, CorootVec(u))
        return GenericityResult(True)

    raise RangeViolation(f"unknown genericity mode {mode!r}")
