import random
from fractions import Fraction

import pytest

from reltest.boolfn import (
    JuntaFunction,
    TruthTable,
    conjunction,
    constant,
    literal,
    parity,
)
from reltest.oracle import EmptyFunction
from reltest.reldist import (
    PreconditionError,
    check_approx_symmetry,
    check_approx_triangle,
    key_junta_gap,
    rel_dist,
    rel_dist_to_class,
    rel_dist_to_core_class,
    rel_dist_to_juntas,
    rerandomization_gap,
)

from oracles import (
    all_juntas_on,
    slow_dist_to_juntas,
    slow_key_junta_gap,
    slow_rel_dist,
    slow_rerandomization_gap,
    values,
)


def random_table(n, rng, p=0.5):
    return TruthTable(n, [int(rng.random() < p) for _ in range(1 << n)])


def perturb(f, rng, flips):
    bits = list(f.table())
    for x in rng.sample(range(len(bits)), flips):
        bits[x] ^= 1
    return TruthTable(f.n, bits)


def all_juntas(n, k):
    for gv in all_juntas_on(n, k):
        yield TruthTable(n, [gv[p] for p in sorted(gv, key=lambda p: sum(b << i for i, b in enumerate(p)))])


class TestRelDist:
    def test_self(self):
        rng = random.Random(0)
        f = random_table(6, rng)
        assert rel_dist(f, f).value == 0

    def test_negated_literal_vs_zero(self):
        f = literal(2, 1).complement()
        assert rel_dist(f, constant(2, 0)).value == 1

    def test_or_vs_x1(self):
        f = TruthTable(2, [0, 1, 1, 1])
        r = rel_dist(f, literal(2, 1))
        assert (r.sym_diff, r.f_ones, r.value) == (1, 3, Fraction(1, 3))

    def test_asymmetric(self):
        f, g = TruthTable(2, [0, 1, 1, 1]), literal(2, 1)
        assert rel_dist(g, f).value == Fraction(1, 2)

    def test_empty_raises(self):
        with pytest.raises(EmptyFunction):
            rel_dist(constant(3, 0), constant(3, 1))

    def test_matches_slow(self):
        rng = random.Random(1)
        for _ in range(40):
            n = rng.randint(1, 7)
            f, g = random_table(n, rng, 0.6), random_table(n, rng)
            if f.count_ones() == 0:
                continue
            assert rel_dist(f, g).value == slow_rel_dist(values(f, n), values(g, n))

    def test_junta_projection_path(self):
        rng = random.Random(2)
        for _ in range(30):
            n = 10
            f = JuntaFunction(n, rng.sample(range(1, n + 1), 3), [rng.getrandbits(1) | (i == 0) for i in range(8)])
            g = JuntaFunction(n, rng.sample(range(1, n + 1), 2), [rng.getrandbits(1) for _ in range(4)])
            assert rel_dist(f, g) == rel_dist(f.to_dense(), g.to_dense())

    def test_large_n_juntas(self):
        f = conjunction(40, [1, 2])
        g = literal(40, 1)
        assert rel_dist(f, g).value == 1
        assert rel_dist(g, f).value == Fraction(1, 2)

    def test_zero_iff_same_satisfiers(self):
        rng = random.Random(3)
        for n in range(1, 13):
            f = random_table(n, rng, 0.7)
            if f.count_ones() == 0:
                continue
            assert rel_dist(f, f.to_dense()).value == 0
            g = perturb(f, rng, 1)
            assert rel_dist(f, g).value > 0

    def test_permutation_invariance(self):
        rng = random.Random(4)
        for _ in range(100):
            n = rng.randint(1, 8)
            f, g = random_table(n, rng, 0.6), random_table(n, rng)
            if f.count_ones() == 0:
                continue
            pi = list(range(1, n + 1))
            rng.shuffle(pi)
            assert rel_dist(f, g).value == rel_dist(f.permute(pi), g.permute(pi)).value


class TestDistanceToClass:
    def test_member(self):
        f = conjunction(6, [2, 5])
        r, w = rel_dist_to_class(f, all_juntas(6, 2))
        assert r.value == 0
        assert list(w.table()) == list(f.table())

    def test_parity_vs_two_juntas(self):
        f = parity(6, [1, 2, 3])
        r, _ = rel_dist_to_class(f, all_juntas(6, 2))
        assert r.value == 1
        assert rel_dist_to_juntas(f, 2)[0].value == 1

    def test_and_with_one_satisfier_removed(self):
        # x1 ∧ x2 on n = 8 has 64 satisfiers; dropping one leaves 63 and the
        # nearest 2-junta (x1 ∧ x2 itself) differs in exactly one point
        bits = list(conjunction(8, [1, 2]).table())
        bits[0b11] = 0
        f = TruthTable(8, bits)
        r, w = rel_dist_to_juntas(f, 2)
        assert (r.sym_diff, r.f_ones) == (1, 63)
        assert r.value == Fraction(1, 63)
        assert sorted(w.variables) == [1, 2]

    def test_empty_enumeration(self):
        with pytest.raises(ValueError):
            rel_dist_to_class(literal(3, 1), iter([]))

    def test_majority_route_matches_brute_force(self):
        rng = random.Random(5)
        for _ in range(25):
            n, k = rng.randint(2, 5), rng.randint(1, 2)
            f = random_table(n, rng, 0.4)
            if f.count_ones() == 0:
                continue
            fast = rel_dist_to_juntas(f, k)[0].value
            assert fast == slow_dist_to_juntas(values(f, n), n, k)
            assert fast == rel_dist_to_class(f, all_juntas(n, k))[0].value

    def test_core_class_matches_brute_force(self):
        rng = random.Random(6)
        k = 2
        cores = [[0, 0, 0, 1], [0, 1, 1, 0]]
        for _ in range(20):
            n = rng.randint(2, 6)
            f = random_table(n, rng, 0.4)
            if f.count_ones() == 0:
                continue
            cands = [JuntaFunction(n, [a, b], c)
                     for a in range(1, n + 1) for b in range(1, n + 1) if a != b for c in cores]
            expect = min(slow_rel_dist(values(f, n), values(g, n)) for g in cands)
            got, w = rel_dist_to_core_class(f, k, cores)
            assert got.value == expect
            assert rel_dist(f, w).value == expect


class TestApproxLemmas:
    def test_symmetry_trivial(self):
        f = literal(4, 2)
        assert check_approx_symmetry(f, f, 0)

    def test_symmetry_precondition(self):
        f = literal(4, 2)
        with pytest.raises(PreconditionError):
            check_approx_symmetry(f, f, Fraction(3, 5))
        with pytest.raises(PreconditionError):
            check_approx_symmetry(f, literal(4, 3), Fraction(1, 4))

    def test_symmetry_random_pairs(self):
        rng = random.Random(7)
        checked = 0
        while checked < 500:
            f = random_table(8, rng, rng.choice([0.05, 0.2, 0.5]))
            ones = f.count_ones()
            if ones == 0:
                continue
            g = perturb(f, rng, rng.randint(0, max(1, ones // 3)))
            if g.count_ones() == 0:
                continue
            d = rel_dist(f, g).value
            if d > Fraction(1, 2):
                continue
            eps = d + Fraction(rng.randint(0, 4), 40)
            if eps > Fraction(1, 2):
                eps = d
            assert check_approx_symmetry(f, g, eps)
            checked += 1

    def test_triangle_trivial(self):
        f = literal(4, 2)
        assert check_approx_triangle(f, f, f, 0, 0)

    def test_triangle_random_triples(self):
        rng = random.Random(8)
        checked = 0
        while checked < 500:
            f = random_table(8, rng, rng.choice([0.05, 0.2, 0.5]))
            ones = f.count_ones()
            if ones == 0:
                continue
            g = perturb(f, rng, rng.randint(0, max(1, ones // 2)))
            if g.count_ones() == 0:
                continue
            h = perturb(g, rng, rng.randint(0, max(1, g.count_ones() // 2)))
            e1, e2 = rel_dist(f, g).value, rel_dist(g, h).value
            assert check_approx_triangle(f, g, h, e1, e2)
            checked += 1

    def test_triangle_precondition(self):
        with pytest.raises(PreconditionError):
            check_approx_triangle(literal(3, 1), literal(3, 2), literal(3, 3), 0, 0)


class TestRerandomization:
    def test_junta_zero(self):
        f = JuntaFunction(7, [2, 6], [0, 1, 1, 1])
        assert rerandomization_gap(f, [2, 6]) == 0
        assert rerandomization_gap(f, [1, 2, 6]) == 0

    def test_parity_half(self):
        assert rerandomization_gap(parity(3, [1, 2, 3]), [1, 2]) == Fraction(1, 2)

    def test_matches_slow(self):
        rng = random.Random(9)
        for _ in range(30):
            n = rng.randint(2, 7)
            f = random_table(n, rng, 0.4)
            if f.count_ones() == 0:
                continue
            J = rng.sample(range(1, n + 1), rng.randint(0, n))
            assert rerandomization_gap(f, J) == slow_rerandomization_gap(values(f, n), n, J)

    def test_far_bound(self):
        # rerandomising off any |J| = k set loses at least eps/4 on far functions
        rng = random.Random(10)
        for _ in range(60):
            n, k = 7, rng.randint(1, 3)
            f = random_table(n, rng, rng.choice([0.1, 0.3, 0.5]))
            if f.count_ones() == 0:
                continue
            eps = rel_dist_to_juntas(f, k)[0].value
            for J in (rng.sample(range(1, n + 1), k) for _ in range(5)):
                assert rerandomization_gap(f, J) >= eps / 4

    def test_empty(self):
        with pytest.raises(EmptyFunction):
            rerandomization_gap(constant(4, 0), [1])


class TestKeyJunta:
    def test_junta_zero(self):
        f = JuntaFunction(6, [1, 4], [0, 1, 1, 0])
        assert key_junta_gap(f, [1, 2, 4], [1, 4]) == 0

    def test_x_equals_j(self):
        rng = random.Random(11)
        f = random_table(6, rng)
        assert key_junta_gap(f, [2, 3], [2, 3]) == 0

    def test_subset_required(self):
        with pytest.raises(PreconditionError):
            key_junta_gap(literal(4, 1), [1, 2], [3])

    def test_matches_slow(self):
        rng = random.Random(12)
        for _ in range(30):
            n = rng.randint(2, 6)
            f = random_table(n, rng, 0.4)
            if f.count_ones() == 0:
                continue
            X = rng.sample(range(1, n + 1), rng.randint(1, n))
            J = rng.sample(X, rng.randint(0, len(X)))
            assert key_junta_gap(f, X, J) == slow_key_junta_gap(values(f, n), n, X, J)

    def test_far_bound_under_premise(self):
        # premise: rerandomising outside X rarely changes f; then any J ⊆ X
        # of size k loses at least eps/5
        rng = random.Random(13)
        hits = 0
        for _ in range(300):
            n, k = 7, rng.randint(1, 2)
            X = sorted(rng.sample(range(1, n + 1), rng.randint(k + 1, 4)))
            core_n = len(X)
            core = [rng.getrandbits(1) for _ in range(1 << core_n)]
            if not any(core):
                continue
            f = JuntaFunction(n, X, core).to_dense()
            eps = rel_dist_to_juntas(f, k)[0].value
            if eps == 0:
                continue
            # f(u) = 1, so Pr[f(u) != f(u_X ∘ w)] is the rerandomisation gap
            assert rerandomization_gap(f, X) <= eps / 20
            for J in (rng.sample(X, k) for _ in range(3)):
                assert key_junta_gap(f, X, J) >= eps / 5
            hits += 1
        assert hits > 100
