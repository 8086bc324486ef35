"""Stratification of the zero-level moment fiber by reachable dimensions,
exact stratum dimension formulas, and brute-force point counts over small
prime fields (with a budget guard, since enumeration is exponential).
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

from .covariants import reachable_dims
from .errors import BudgetExceeded, RangeViolation
from .fields import PrimeField
from .linalg import Mat
from .quiver import RootVec, WeightVec, cartan_data, dominance
from .repspace import DimData, FramedPoint, moment_matches

DEFAULT_BUDGET = 10_000_000


def v_plus(s: FramedPoint) -> RootVec:
    """Stratum label of a fiber point: dims of the smallest arrow-stable
    subspace family containing the framing images."""
    return RootVec(reachable_dims(s))


def stratum_dimension(q, d: WeightVec, v: RootVec, v_prime: RootVec) -> int:
    """Dimension of the locus in the zero fiber with label v_prime.

    With u = v - v' this is

        dim S - sum v_i^2 - (sum u_i d_i - u^T C v) - u^T C u / 2

    where the last term is an integer because C has even diagonal.
    """
    cd = cartan_data(q)
    n = cd.n
    if len(v_prime) != n or len(v) != n or len(d) != n:
        raise RangeViolation("vector length does not match the quiver")
    for k in range(n):
        if not (0 <= v_prime[k] <= v[k]):
            raise RangeViolation(f"need 0 <= v'_{k} <= v_{k}")
    u = [v[k] - v_prime[k] for k in range(n)]
    cv = [sum(cd.cartan[i][j] * v[j] for j in range(n)) for i in range(n)]
    cu = [sum(cd.cartan[i][j] * u[j] for j in range(n)) for i in range(n)]
    ucv = sum(u[i] * cv[i] for i in range(n))
    ucu = sum(u[i] * cu[i] for i in range(n))
    if ucu % 2 != 0:
        raise AssertionError("u^T C u must be even")
    dim_s = DimData(d, v).space_dimension(q)
    group = sum(v[k] ** 2 for k in range(n))
    return dim_s - group - (sum(u[k] * d[k] for k in range(n)) - ucv) - ucu // 2


@dataclass(frozen=True)
class StratumInfo:
    v_prime: tuple
    dimension: int
    codimension: int


@dataclass(frozen=True)
class CodimReport:
    d: tuple
    v: tuple
    delta_v: int         # dim S - sum of dim gl(V_i) = dimension of the full stratum
    strata: tuple        # StratumInfo, v' ascending lexicographically
    dominant: bool
    regular: bool
    min_proper_codim: int | None  # None when v' = v is the only stratum

    # dominance of d - Cv predicts codim >= 1 on proper strata, regularity
    # predicts codim >= 2; both are vacuous without proper strata
    @property
    def codim_ge_1(self):
        return self.min_proper_codim is None or self.min_proper_codim >= 1

    @property
    def codim_ge_2(self):
        return self.min_proper_codim is None or self.min_proper_codim >= 2


def codim_report(q, d: WeightVec, v: RootVec) -> CodimReport:
    """Dimensions and codimensions (against delta_V) of every stratum v' <= v."""
    n = cartan_data(q).n
    delta_v = stratum_dimension(q, d, v, v)
    dom = dominance(q, d, v)
    infos = []
    min_proper = None
    for combo in itertools.product(*(range(v[k] + 1) for k in range(n))):
        vp = RootVec(combo)
        dim = stratum_dimension(q, d, v, vp)
        codim = delta_v - dim
        if combo != v.coords and (min_proper is None or codim < min_proper):
            min_proper = codim
        infos.append(StratumInfo(combo, dim, codim))
    return CodimReport(
        d.coords, v.coords, delta_v, tuple(infos), dom.dominant, dom.regular, min_proper
    )


def _resolve_budget(budget):
    if budget is not None:
        return budget
    env = os.environ.get("QUIVERLAB_BUDGET")
    if env is not None:
        return int(env)
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class CountResult:
    p: int
    space_dimension: int
    total: int
    strata: tuple  # ((v_prime, count), ...) by v_prime ascending

    def stratum_count(self, v_prime):
        key = tuple(v_prime)
        for vp, c in self.strata:
            if vp == key:
                return c
        return 0


def count_points_Fq(q, dims: DimData, lam: WeightVec, p: int, budget=None) -> CountResult:
    """Enumerate the fiber mu = lambda over F_p and bucket points by stratum.

    The full representation space has p^dim points; the call refuses to start
    when that exceeds the budget (QUIVERLAB_BUDGET or 10^7 by default).
    """
    field = PrimeField(p)
    space_dim = dims.space_dimension(q)
    cap = _resolve_budget(budget)
    if p ** space_dim > cap:
        raise BudgetExceeded(
            f"p^dim = {p}^{space_dim} exceeds the enumeration budget {cap}"
        )

    shapes = []
    for a in sorted(q.arrows, key=lambda a: a.id):
        shapes.append(("B", a.id, dims.v_of(q, a.h1), dims.v_of(q, a.h0)))
    for vert in q.vertices:
        shapes.append(("gamma", vert, dims.v_of(q, vert), dims.d_of(q, vert)))
    for vert in q.vertices:
        shapes.append(("delta", vert, dims.d_of(q, vert), dims.v_of(q, vert)))
    assert sum(r * c for _, _, r, c in shapes) == space_dim

    counts = {}
    total = 0
    for flat in itertools.product(range(p), repeat=space_dim):
        pos = 0
        B, gamma, delta = {}, {}, {}
        for kind, key, r, c in shapes:
            m = Mat(field, r, c, [field.from_int(t) for t in flat[pos : pos + r * c]])
            pos += r * c
            (B if kind == "B" else gamma if kind == "gamma" else delta)[key] = m
        s = FramedPoint(q, dims, field, B, gamma, delta)
        if moment_matches(s, lam):
            label = reachable_dims(s)
            counts[label] = counts.get(label, 0) + 1
            total += 1
    if total != sum(counts.values()):
        raise AssertionError("stratum counts do not add up")
    return CountResult(p, space_dim, total, tuple(sorted(counts.items())))


def growth_slope(counts: dict) -> float:
    """Least squares slope of ln(count) against ln(p); estimates dimension."""
    if len(counts) < 2:
        raise RangeViolation("need counts for at least two primes")
    pts = sorted(counts.items())
    if any(c <= 0 for _, c in pts):
        raise RangeViolation("counts must be positive to take logs")
    xs = [math.log(p) for p, _ in pts]
    ys = [math.log(c) for _, c in pts]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    den = sum((x - xbar) ** 2 for x in xs)
    num = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    return num / den
