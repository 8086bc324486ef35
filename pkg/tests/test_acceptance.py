"""Release gate: ten end-to-end checks over the whole library.

Each test prints a single ``ACCEPTANCE n: PASS/FAIL - <what it checks>``
line so the battery can be read off a terminal; run with ``pytest -s``.
All algebra is exact (Fraction / Q(i) / F_p), so equality assertions carry
zero tolerance.  The only approximate numbers are the log-growth slopes of
point counts, pinned to +/- 0.35.
"""

import itertools
import json
import random
import subprocess
import sys
from contextlib import contextmanager

import pytest

import quiverlab as ql
from quiverlab import (
    QQ,
    ChiData,
    DimData,
    FiberSampleFailed,
    FramedPoint,
    PrimeField,
    RootVec,
    WeightVec,
    basis_rank_check,
    block,
    cartan_data,
    count_points_Fq,
    det,
    dominance,
    dot_action,
    doubled_quiver,
    dynkin_quiver,
    empty_path,
    enumerate_S_XY,
    eval_covariant,
    group_act,
    growth_slope,
    hstack,
    inverse,
    j_embed,
    limit_project,
    lusztig_invariants,
    moment_map,
    moment_matches,
    orbit_equivalent,
    random_group,
    random_matrix,
    reduce_to_dominant,
    reflect_point,
    reflect_weight,
    reflect_word,
    sample_fiber,
    stratum_dimension,
    verify_Z_conditions,
)
from util import a1_point

Mat = ql.Mat


@contextmanager
def criterion(n, desc):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {n}: FAIL - {desc}")
        raise
    print(f"ACCEPTANCE {n}: PASS - {desc}")


QUIVERS = ("A1", "A2", "A3", "D4")


def sample_until(q, dims, lam, count, seed_base, action):
    """Run `action` on `count` fiber points, resampling past empty draws."""
    done = 0
    seed = seed_base
    while done < count:
        seed += 1
        if seed - seed_base > 40 * count:
            raise AssertionError("fiber sampling starved")
        try:
            s = sample_fiber(q, dims, lam, seed=seed)
        except FiberSampleFailed:
            continue
        action(done, s)
        done += 1


def test_criterion_01_moment_equivariance():
    with criterion(1, "moment map is equivariant on >= 100 random (g, s)"):
        rng = random.Random(17)
        pairs = 0
        for name in QUIVERS:
            q = dynkin_quiver(name)
            for _ in range(26):
                d = WeightVec(tuple(rng.randint(0, 3) for _ in range(q.n)))
                v = RootVec(tuple(rng.randint(0, 3) for _ in range(q.n)))
                dims = DimData(d, v)
                s = FramedPoint.random(q, dims, QQ, rng)
                g = random_group(q, dims, QQ, rng)
                mu = moment_map(s)
                mu2 = moment_map(group_act(g, s))
                for i in q.vertices:
                    assert mu2[i] == g.blocks[i] * mu[i] * inverse(g.blocks[i])
                pairs += 1
        assert pairs >= 100


def test_criterion_02_sampler_soundness():
    with criterion(2, "accepted samples sit on the moment fiber exactly"):
        rng = random.Random(23)
        accepted = 0
        for name in QUIVERS:
            q = dynkin_quiver(name)
            for trial in range(60):
                d = WeightVec(tuple(rng.randint(0, 3) for _ in range(q.n)))
                v = RootVec(tuple(rng.randint(0, 2) for _ in range(q.n)))
                lam = WeightVec(tuple(rng.choice([0, 1, -1]) for _ in range(q.n)))
                try:
                    s = sample_fiber(q, DimData(d, v), lam, seed=trial, retries=5)
                except FiberSampleFailed:
                    continue
                assert moment_matches(s, lam)
                accepted += 1
        assert accepted >= 40

        q = dynkin_quiver("A1")
        with pytest.raises(FiberSampleFailed):
            sample_fiber(q, DimData(WeightVec((0,)), RootVec((1,))),
                         WeightVec((1,)), seed=0)


def test_criterion_03_reflection_contract():
    with criterion(3, "50 reflections per quiver pass all six point checks"):
        cases = {
            "A1": ((2,), (1,)),
            "A2": ((2, 2), (1, 1)),
            "A3": ((2, 2, 2), (1, 1, 1)),
            "D4": ((2, 2, 2, 2), (1, 1, 1, 1)),
        }
        for name, (d, v) in cases.items():
            q = dynkin_quiver(name)
            cd = cartan_data(q)
            dims = DimData(WeightVec(d), RootVec(v))
            lam = WeightVec((1,) * q.n)

            def reflect_and_verify(k, s):
                vertex = q.vertices[k % q.n]
                r = reflect_point(s, vertex, lam)
                rep = verify_Z_conditions(s, r.point, vertex, lam)
                assert rep.all_pass, rep.messages
                idx = q.vertex_index(vertex)
                assert r.lam == reflect_weight(cd, idx, lam)
                assert r.point.dims.v == dot_action(cd, [idx], dims.d, dims.v)

            sample_until(q, dims, lam, 50, 100, reflect_and_verify)

        # transported stability parameter follows the same reflection
        q = dynkin_quiver("A1")
        s = sample_fiber(q, DimData(WeightVec((2,)), RootVec((1,))),
                         WeightVec((1,)), seed=3)
        r = reflect_point(s, 1, WeightVec((1,)), m=WeightVec((3,)))
        assert r.m == WeightVec((-3,))

        # the rank-one worked example, reproduced entry by entry
        s = a1_point(gamma=(1, 0), delta=(1, 0))
        r = reflect_point(s, 1, WeightVec((1,)))
        assert r.point.gamma[1].to_lists() == [[0, -1]]
        assert r.point.delta[1].to_lists() == [[0], [1]]
        assert r.lam == WeightVec((-1,))


def orbit_yes_with_witness(s, t):
    dec = orbit_equivalent(s, t)
    assert dec.kind == "yes", dec.reason
    g = dec.witness
    assert all(det(g.blocks[i]) != 0 for i in g.blocks)
    assert group_act(g, s) == t


def test_criterion_04_coxeter_relations():
    with criterion(4, "involution/commutation/braid/side words agree on orbits"):
        rng = random.Random(29)

        q1 = dynkin_quiver("A1")
        dims1 = DimData(WeightVec((2,)), RootVec((1,)))
        done = 0
        seed = 0
        while done < 50:
            seed += 1
            lam = WeightVec((rng.choice([1, -1, 2, -2, 3]),))
            try:
                s = sample_fiber(q1, dims1, lam, seed=1000 + seed)
            except FiberSampleFailed:
                continue
            w = reflect_word(s, [1, 1], lam)
            assert w.lam == lam
            orbit_yes_with_witness(s, w.point)
            done += 1

        q2 = doubled_quiver([1, 2], [])
        dims2 = DimData(WeightVec((2, 2)), RootVec((1, 1)))
        done = 0
        seed = 0
        while done < 50:
            seed += 1
            lam = WeightVec((rng.choice([1, -1, 2, -2]), rng.choice([1, -1, 2, 3])))
            try:
                s = sample_fiber(q2, dims2, lam, seed=2000 + seed)
            except FiberSampleFailed:
                continue
            w1 = reflect_word(s, [1, 2], lam)
            w2 = reflect_word(s, [2, 1], lam)
            assert w1.lam == w2.lam
            orbit_yes_with_witness(w1.point, w2.point)
            done += 1

        q3 = dynkin_quiver("A2")
        dims3 = DimData(WeightVec((2, 2)), RootVec((1, 1)))
        done = 0
        seed = 0
        while done < 50:
            seed += 1
            a = rng.choice([1, -1, 2, -2, 3])
            b = rng.choice([1, -1, 2, -2, 3])
            if a + b == 0:
                continue
            lam = WeightVec((a, b))
            try:
                s = sample_fiber(q3, dims3, lam, seed=3000 + seed)
            except FiberSampleFailed:
                continue
            w1 = reflect_word(s, [1, 2, 1], lam)
            w2 = reflect_word(s, [2, 1, 2], lam)
            assert w1.lam == w2.lam
            orbit_yes_with_witness(w1.point, w2.point)
            done += 1

        # kernel and cokernel constructions land in the same orbit
        done = 0
        seed = 0
        while done < 50:
            seed += 1
            lam = WeightVec((rng.choice([1, -1, 2]), rng.choice([1, -1, 3])))
            try:
                s = sample_fiber(q3, dims3, lam, seed=4000 + seed)
            except FiberSampleFailed:
                continue
            rk = reflect_point(s, 1, lam, side="kernel")
            rc = reflect_point(s, 1, lam, side="cokernel")
            assert rk.lam == rc.lam
            orbit_yes_with_witness(rk.point, rc.point)
            done += 1


def test_criterion_05_covariant_weight_law():
    with criterion(5, "covariants rescale by prod det(g_i)^m_i on >= 50 trials"):
        rng = random.Random(31)

        q1 = dynkin_quiver("A1")
        chi1 = ChiData((1,), (0,), ((1, 0),), (),
                       {("av", 1, 1, 1): empty_path(q1, 1)})
        dims1 = DimData(WeightVec((2,)), RootVec((1,)))
        for _ in range(30):
            s = FramedPoint.random(q1, dims1, QQ, rng)
            g = random_group(q1, dims1, QQ, rng)
            assert eval_covariant(chi1, group_act(g, s)) == \
                det(g.blocks[1]) * eval_covariant(chi1, s)

        q2 = dynkin_quiver("A2")
        chi2 = ChiData((1, 1), (0, 0), ((1, 0), (2, 0)), (),
                       {("av", 1, 1, 1): empty_path(q2, 1),
                        ("av", 2, 2, 1): empty_path(q2, 2)})
        dims2 = DimData(WeightVec((1, 1)), RootVec((1, 1)))
        for _ in range(25):
            s = FramedPoint.random(q2, dims2, QQ, rng)
            g = random_group(q2, dims2, QQ, rng)
            factor = det(g.blocks[1]) * det(g.blocks[2])
            assert eval_covariant(chi2, group_act(g, s)) == \
                factor * eval_covariant(chi2, s)

        # certificate values on the standing rank-one example
        assert eval_covariant(chi1, a1_point(gamma=(1, 0), delta=(1, 0))) == 1
        assert eval_covariant(chi1, FramedPoint.zero(q1, dims1)) == 0


def compositions(n):
    out = []
    for bits in range(1 << (n - 1)):
        parts, run = [], 1
        for k in range(n - 1):
            if bits >> k & 1:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        out.append(tuple(parts))
    return out


def col2(m, j):
    return m.submatrix([0, 1], [j - 1])


def test_criterion_06_determinant_basis_independence():
    with criterion(6, "rank probe equals the table count for every N <= 5 shape"):
        F = PrimeField(1000003)
        checked = 0
        for n in range(1, 6):
            comps = compositions(n)
            for y in comps:
                for x in comps:
                    S = enumerate_S_XY(y, x)
                    # a full-rank minor over F_p certifies rank over Q
                    r = basis_rank_check(y, x, samples=len(S) + 3, seed=7, field=F)
                    assert r == len(S), (y, x)
                    checked += 1
        assert checked == 341
        assert basis_rank_check((1, 1), (1, 1), samples=5, seed=7) == 2

        rng = random.Random(37)
        z = Mat.zeros(QQ, 2, 2)
        for _ in range(100):
            a, b, c, d = (random_matrix(QQ, 2, 2, rng, 9) for _ in range(4))
            lhs = det(hstack([col2(a, 1), col2(b, 2)])) + \
                det(hstack([col2(b, 1), col2(a, 2)]))
            assert lhs == det(a + b) - det(a) - det(b)
            lhs = (
                det(hstack([col2(a, 1), col2(b, 1)])) * det(hstack([col2(c, 2), col2(d, 2)]))
                - det(hstack([col2(a, 1), col2(b, 2)])) * det(hstack([col2(c, 2), col2(d, 1)]))
                - det(hstack([col2(a, 2), col2(b, 1)])) * det(hstack([col2(c, 1), col2(d, 2)]))
                + det(hstack([col2(a, 2), col2(b, 2)])) * det(hstack([col2(c, 1), col2(d, 1)]))
            )
            rhs = (
                -det(block([[a, b], [c, d]]))
                + det(block([[a, z], [z, d]]))
                + det(block([[z, b], [c, z]]))
            )
            assert lhs == rhs


def test_criterion_07_stratum_counts_and_dimensions():
    with criterion(7, "F_p counts, stratum splits and growth slopes hit the oracle"):
        q = dynkin_quiver("A1")
        dims = DimData(WeightVec((2,)), RootVec((1,)))
        lam = WeightVec((0,))
        totals = {}
        top = {}
        bottom = {}
        for p in (2, 3, 5, 7):
            res = count_points_Fq(q, dims, lam, p)
            totals[p] = res.total
            top[p] = res.stratum_count((1,))
            bottom[p] = res.stratum_count((0,))
        assert totals == {2: 10, 3: 33, 5: 145, 7: 385}
        assert bottom[2] == 4 and bottom[3] == 9
        assert abs(growth_slope(totals) - 3) <= 0.35
        assert abs(growth_slope(top) - 3) <= 0.35
        assert abs(growth_slope(bottom) - 2) <= 0.35

        assert stratum_dimension(q, WeightVec((2,)), RootVec((1,)), RootVec((1,))) == 3
        assert stratum_dimension(q, WeightVec((2,)), RootVec((1,)), RootVec((0,))) == 2
        assert stratum_dimension(q, WeightVec((1,)), RootVec((1,)), RootVec((1,))) == 1
        assert stratum_dimension(q, WeightVec((1,)), RootVec((1,)), RootVec((0,))) == 1


def test_criterion_08_dominance_reduction():
    with criterion(8, "reduction traces match and always terminate"):
        q = dynkin_quiver("A2")
        trace = reduce_to_dominant(q, WeightVec((1, 1)), RootVec((2, 0)),
                                   WeightVec((0, 0)))
        assert [(st.vertex, st.kind) for st in trace.steps] == \
            [(1, "drop"), (1, "drop")]
        assert trace.v == RootVec((0, 0))
        assert trace.dominant and not trace.empty

        q1 = dynkin_quiver("A1")
        trace = reduce_to_dominant(q1, WeightVec((0,)), RootVec((1,)),
                                   WeightVec((1,)))
        assert trace.empty and not trace.dominant

        rng = random.Random(41)
        for k in range(1000):
            q = dynkin_quiver(("A2", "A3", "D4")[k % 3])
            d = WeightVec(tuple(rng.randint(0, 4) for _ in range(q.n)))
            v = RootVec(tuple(rng.randint(0, 4) for _ in range(q.n)))
            lam = WeightVec(tuple(rng.choice([-1, 0, 1, 2]) for _ in range(q.n)))
            trace = reduce_to_dominant(q, d, v, lam)
            assert trace.dominant != trace.empty
            if trace.dominant:
                assert dominance(cartan_data(q), d, trace.v).dominant


def test_criterion_09_invariants_and_projection():
    with criterion(9, "trace invariants survive the group and the limit map"):
        rng = random.Random(43)
        plan = [("A1", (2,), (1,), 40), ("A2", (2, 1), (1, 1), 30),
                ("A3", (1, 2, 1), (1, 1, 1), 20), ("D4", (1, 1, 1, 2), (1, 1, 1, 2), 10)]
        for name, d, v, count in plan:
            q = dynkin_quiver(name)
            dims = DimData(WeightVec(d), RootVec(v))
            for _ in range(count):
                s = FramedPoint.random(q, dims, QQ, rng)
                g = random_group(q, dims, QQ, rng)
                assert lusztig_invariants(group_act(g, s), 6) == \
                    lusztig_invariants(s, 6)

        q = dynkin_quiver("A2")
        dims = DimData(WeightVec((2, 1)), RootVec((1, 1)))
        for seed in range(20):
            s = sample_fiber(q, dims, WeightVec((0, 0)), seed=seed)
            big = j_embed(s, RootVec((2, 1)))  # pad V_1, so b_1 is not onto
            g = random_group(q, big.dims, QQ, random.Random(seed + 999))
            out = limit_project(group_act(g, big), 1)
            assert out.dims.v == s.dims.v
            assert lusztig_invariants(out, 6) == lusztig_invariants(s, 6)


def test_criterion_10_cli_determinism(tmp_path):
    with criterion(10, "every CLI subcommand is byte-identical across reruns"):
        def cli(*argv, check=True):
            proc = subprocess.run(
                [sys.executable, "-m", "quiverlab.cli", *argv],
                capture_output=True, check=check, cwd=tmp_path,
            )
            return proc.stdout

        cli("sample", "--quiver", "A2", "--d", "2,1", "--v", "1,1",
            "--lambda", "1,1", "--seed", "9", "-o", "pt.json")
        cli("reflect", "pt.json", "--vertex", "1", "-o", "rpt.json")
        worked = a1_point(gamma=(1, 0), delta=(1, 0)).to_json()
        worked["lambda"] = ["1"]
        (tmp_path / "wpt.json").write_text(json.dumps(worked))
        chi = {"target_copies": [1], "source_copies": [0], "vectors": [[1, 0]],
               "covectors": [], "entries": [{"key": ["av", 1, 1, 1], "expr": "e1"}]}
        (tmp_path / "chi.json").write_text(json.dumps(chi))

        battery = [
            ["info", "--quiver", "D4", "--weyl", "--d", "1,1,1,2", "--v", "1,1,1,1"],
            ["sample", "--quiver", "A2", "--d", "2,1", "--v", "1,1",
             "--lambda", "1,1", "--seed", "9"],
            ["reflect", "pt.json", "--vertex", "1"],
            ["reflect-word", "pt.json", "--word", "1,2,1"],
            ["invariants", "pt.json", "--max-len", "3"],
            ["invariants", "pt.json", "--format", "csv"],
            ["covariant", "wpt.json", "--chi", "chi.json", "--m", "1"],
            ["check-coxeter", "--quiver", "A2", "--d", "2,2", "--v", "1,1",
             "--lambda", "1,1", "--trials", "2", "--seed", "3"],
            ["reduce", "--quiver", "A2", "--d", "1,1", "--v", "2,0",
             "--lambda", "0,0"],
            ["strata", "--quiver", "A1", "--d", "2", "--v", "1"],
            ["strata", "--quiver", "A1", "--d", "2", "--v", "1", "--format", "csv"],
            ["count", "--quiver", "A1", "--d", "2", "--v", "1", "--lambda", "0",
             "--p", "2,3"],
            ["count", "--quiver", "A1", "--d", "2", "--v", "1", "--lambda", "0",
             "--p", "2,3", "--format", "csv"],
            ["verify", "pt.json", "rpt.json", "--vertex", "1"],
        ]
        for argv in battery:
            first = cli(*argv)
            second = cli(*argv)
            assert first, argv
            assert first == second, argv
