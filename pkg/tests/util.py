"""Shared builders for the test suite."""

from fractions import Fraction

import quiverlab as ql


def mat(field, rows):
    """Matrix from nested lists of ints / Fractions (coerced into `field`)."""
    rows = [list(r) for r in rows]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    data = [field.coerce(x) for row in rows for x in row]
    return ql.Mat(field, nr, nc, data)


def frac(a, b=1):
    return Fraction(a, b)


def a1_setup(d=2, v=1, field=ql.QQ):
    q = ql.dynkin_quiver("A1")
    dims = ql.DimData(ql.WeightVec((d,)), ql.RootVec((v,)))
    return q, dims


def a1_point(gamma=(1, 0), delta=(1, 0), field=ql.QQ):
    """The standing single-vertex example: d = (2), v = (1)."""
    q, dims = a1_setup(field=field)
    g = {1: mat(field, [list(gamma)])}
    dl = {1: mat(field, [[x] for x in delta])}
    return ql.FramedPoint(q, dims, field, {}, g, dl)


def a2_setup(d=(1, 1), v=(1, 1)):
    q = ql.dynkin_quiver("A2")
    dims = ql.DimData(ql.WeightVec(tuple(d)), ql.RootVec(tuple(v)))
    return q, dims
