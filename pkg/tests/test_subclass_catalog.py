import random
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from reltest.boolfn import JuntaFunction, TruthTable
from reltest.reldist import rel_dist
from reltest.subclass_catalog import (
    ApproxSet,
    SubclassSpec,
    build_approx,
    permute_table,
    popcount,
    project_majority,
    simple2_check,
    table_bits,
    var_mask,
)

from oracles import tree_tables_by_shapes


def as_tuple(t, k):
    return tuple(int(b) for b in table_bits(t, k))


def lifted_approx(spec, h, kappa, n):
    """Approx built the long way: lift every member to n variables, take the
    majority over the last n - h coordinates on the full cube."""
    out = set()
    for t in spec.enumerate_core():
        f = JuntaFunction(n, list(range(1, spec.k + 1)), table_bits(t, spec.k))
        table = f.table().astype(np.int64)
        if table.sum() == 0:
            continue
        low = table.reshape(-1, 1 << h)  # rows: free coordinates, cols: z
        ones = low.sum(axis=0)
        free = low.shape[0]
        g = (2 * ones > free).astype(np.uint8)
        lifted = np.tile(g, free)
        if Fraction(int((lifted != table).sum()), int(table.sum())) <= kappa:
            out.add(tuple(int(b) for b in g))
    return out


class TestEnumeration:
    def test_parity_k2(self):
        spec = SubclassSpec("parity", 2)
        tables = {as_tuple(t, 2) for t in spec.enumerate_core()}
        assert tables == {(0, 1, 0, 1), (0, 0, 1, 1), (0, 1, 1, 0), (1, 1, 1, 1)}

    def test_juntas_k2(self):
        assert SubclassSpec("juntas", 2).count == 16

    def test_conj_counts(self):
        for k in range(0, 6):
            assert SubclassSpec("conj", k).count == 3 ** k
        assert not SubclassSpec("conj", 3).contains(0)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_dt_matches_shape_oracle(self, k):
        spec = SubclassSpec("dt", k)
        ours = {as_tuple(t, k) for t in spec.enumerate_core()}
        assert ours == tree_tables_by_shapes(k, max(k, 1))
        assert len(ours) == spec.count

    def test_dt_k4_shape_oracle(self):
        spec = SubclassSpec("dt", 4)
        assert {as_tuple(t, 4) for t in spec.enumerate_core()} == tree_tables_by_shapes(4, 4)

    @pytest.mark.parametrize("name,k", [("dt", 3), ("juntas", 2), ("conj", 3), ("parity", 3), ("dt", 2)])
    def test_duplicate_free(self, name, k):
        tables = list(SubclassSpec(name, k).enumerate_core())
        assert len(tables) == len(set(tables))

    @pytest.mark.parametrize("name", ["dt", "juntas", "conj", "parity"])
    def test_permutation_closed(self, name):
        for k in range(1, 4):
            spec = SubclassSpec(name, k)
            for t in spec.enumerate_core():
                for pi in permutations(range(1, k + 1)):
                    assert spec.contains(permute_table(t, k, pi))

    def test_members_depend_only_on_first_k(self):
        spec = SubclassSpec("dt", 3)
        for f in list(spec.functions(5))[:200]:
            assert len(f.variables) == 3

    def test_constant_zero_flags(self):
        assert SubclassSpec("dt", 2).contains_constant0 and SubclassSpec("dt", 2).contains(0)
        assert SubclassSpec("juntas", 2).contains(0)
        assert not SubclassSpec("parity", 2).contains_constant0
        assert not SubclassSpec("parity", 2).contains(0)

    def test_unknown(self):
        with pytest.raises(ValueError):
            SubclassSpec("dnf", 2)
        with pytest.raises(ValueError):
            SubclassSpec("dt", 9)

    def test_aliases(self):
        assert SubclassSpec("size-k-decision-trees", 2).name == "dt"
        assert SubclassSpec("all-k-juntas", 2).name == "juntas"


class TestApprox:
    def test_h_equals_k_is_class(self):
        spec = SubclassSpec("dt", 2)
        approx = build_approx(spec, 2, Fraction(0))
        assert set(approx.tables()) == {t for t in spec.enumerate_core() if t}

    def test_prefix_junta_kept(self):
        # x1 alone projects to itself at h = 1
        spec = SubclassSpec("dt", 2)
        approx = build_approx(spec, 1, Fraction(0))
        assert 0b10 in approx.tables()

    def test_and_excluded(self):
        t = var_mask(2, 1) & var_mask(2, 2)
        g, mism = project_majority(t, 2, 1)
        assert g == 0 and Fraction(mism, popcount(t)) == 1
        for kappa in (Fraction(0), Fraction(1, 4), Fraction(1, 2)):
            approx = build_approx(SubclassSpec("conj", 2), 1, kappa)
            # every conjunction that projects to all-zero loses all its satisfiers
            assert 0 not in approx.tables()

    def test_ones_field(self):
        approx = build_approx(SubclassSpec("juntas", 3), 2, Fraction(1, 3))
        for m in approx.members:
            assert m.ones == popcount(m.table)

    def test_size_bound_grid(self):
        for name in ("dt", "juntas", "conj", "parity"):
            for k in range(1, 4):
                spec = SubclassSpec(name, k)
                for h in range(0, k + 1):
                    for kappa in (Fraction(0), Fraction(1, 200), Fraction(1, 10), Fraction(1, 2), Fraction(1)):
                        assert len(build_approx(spec, h, kappa)) <= spec.count

    @pytest.mark.parametrize("name,k,h,kappa", [
        ("dt", 2, 1, Fraction(1, 2)),
        ("dt", 3, 2, Fraction(1, 3)),
        ("juntas", 2, 1, Fraction(1)),
        ("conj", 3, 2, Fraction(1, 2)),
        ("parity", 3, 2, Fraction(1, 10)),
    ])
    def test_n_independent(self, name, k, h, kappa):
        spec = SubclassSpec(name, k)
        ours = {as_tuple(t, h) for t in build_approx(spec, h, kappa).tables()}
        assert ours == lifted_approx(spec, h, kappa, 10) == lifted_approx(spec, h, kappa, 14)

    def test_deterministic_order(self):
        a = build_approx(SubclassSpec("juntas", 2), 1, Fraction(1))
        b = build_approx(SubclassSpec("juntas", 2), 1, Fraction(1))
        assert a == b
        keys = [as_tuple(t, 1) for t in a.tables()]
        assert keys == sorted(keys)

    def test_dump(self):
        approx = build_approx(SubclassSpec("dt", 2), 2, Fraction(0))
        lines = approx.dump().splitlines()
        assert lines[0] == f"# h=2 kappa=0 members={len(approx)}"
        assert len(lines) == len(approx) + 1
        for line, m in zip(lines[1:], approx.members):
            hexpart, ones = line.split()
            assert int(ones) == m.ones


class TestSimple2:
    def test_self(self):
        spec = SubclassSpec("dt", 2)
        approx = build_approx(spec, 2, Fraction(1, 20))
        g = approx.tables()[0]
        f = JuntaFunction(8, [3, 6], table_bits(g, 2))
        assert simple2_check(f, spec, approx, g, [3, 6])

    def test_random_triples(self):
        rng = random.Random(0)
        spec = SubclassSpec("dt", 2)
        done = 0
        while done < 200:
            h = rng.randint(1, 2)
            kappa = Fraction(rng.choice([0, 1, 1, 2, 5]), 10)
            approx = build_approx(spec, h, kappa)
            if len(approx) == 0:
                continue
            g = rng.choice(approx.tables())
            sigma = rng.sample(range(1, 9), h)
            base = JuntaFunction(8, sigma, table_bits(g, h)).table().copy()
            for x in rng.sample(range(256), rng.randint(0, 40)):
                base[x] ^= 1
            f = TruthTable(8, base)
            if f.count_ones() == 0:
                continue
            g_sigma = JuntaFunction(8, sigma, table_bits(g, h))
            if rel_dist(f, g_sigma).value > 1:
                continue
            assert simple2_check(f, spec, approx, g, sigma)
            done += 1

    def test_not_member(self):
        spec = SubclassSpec("dt", 2)
        approx = ApproxSet(2, Fraction(0), ())
        with pytest.raises(ValueError):
            simple2_check(JuntaFunction(4, [1, 2], [0, 0, 0, 1]), spec, approx, 0b1000, [1, 2])
