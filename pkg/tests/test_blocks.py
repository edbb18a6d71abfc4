import math
import random

import pytest

from reltest.blocks import (
    BlockPartition,
    BlockRestriction,
    ContractViolation,
    binary_search_block,
    random_partition,
)
from reltest.boolfn import JuntaFunction, TruthTable, conjunction, full_mask, literal
from reltest.oracle import QueryOracle


def search(f, partition, a, b, excluded=()):
    o = QueryOracle(f, seed=0)
    fa, fb = o.mq(a), o.mq(b)
    before = o.mq_count
    l, v = binary_search_block(o, partition, excluded, a, b, fa, fb)
    return l, v, o.mq_count - before


def swap_in(v, b, mask):
    return (v & ~mask) | (b & mask)


class TestPartition:
    def test_single_block(self):
        p = random_partition(9, 1, random.Random(0))
        assert p.mask(1) == full_mask(9)
        assert p.block(1) == list(range(1, 10))

    def test_disjoint_cover(self):
        rng = random.Random(1)
        for _ in range(50):
            n, r = rng.randint(1, 30), rng.randint(1, 12)
            p = random_partition(n, r, rng)
            seen = 0
            for l in range(1, r + 1):
                assert seen & p.mask(l) == 0
                seen |= p.mask(l)
                assert all(p.block_of(i) == l for i in p.block(l))
            assert seen == full_mask(n) == p.domain

    def test_restricted_domain(self):
        p = random_partition(8, 3, random.Random(2), domain=0b10110)
        assert p.domain == 0b10110
        assert p.block_of(1) == 0

    def test_from_blocks(self):
        p = BlockPartition.from_blocks(5, [[1, 3], [], [2, 4, 5]])
        assert p.r == 3 and p.mask(2) == 0
        assert p.block_of(4) == 3
        with pytest.raises(ValueError):
            BlockPartition.from_blocks(3, [[1], [1, 2]])

    def test_block_sizes(self):
        n, r = 10_000, 200
        p = random_partition(n, r, random.Random(3))
        mu = n / r
        sigma = math.sqrt(n * (1 / r) * (1 - 1 / r))
        for l in range(1, r + 1):
            assert abs(len(p.block(l)) - mu) <= 5 * sigma

    def test_pair_collision_rate(self):
        rng = random.Random(4)
        r, draws = 20, 100_000
        hits = 0
        for _ in range(draws):
            p = random_partition(2, r, rng)
            hits += p.block_of(1) == p.block_of(2)
        sigma = math.sqrt(draws * (1 / r) * (1 - 1 / r))
        assert abs(hits - draws / r) <= 4 * sigma

    def test_birthday_collisions(self):
        rng = random.Random(5)
        n, r, marked, runs = 40, 200, 5, 10_000
        expect = 1 - math.prod(1 - i / r for i in range(marked))
        hits = 0
        for _ in range(runs):
            p = random_partition(n, r, rng)
            hits += len({p.block_of(i) for i in range(1, marked + 1)}) < marked
        sigma = math.sqrt(runs * expect * (1 - expect))
        assert abs(hits - runs * expect) <= 4 * sigma


class TestBinarySearch:
    def test_dictator(self):
        rng = random.Random(6)
        n = 12
        f = literal(n, 5)
        for _ in range(50):
            p = random_partition(n, 6, rng)
            a = rng.getrandbits(n) | (1 << 4)
            blk = p.mask(p.block_of(5))
            b = swap_in(a, rng.getrandbits(n) & ~(1 << 4), blk)
            l, v, _ = search(f, p, a, b)
            assert l == p.block_of(5)
            assert f(v) != f(swap_in(v, b, p.mask(l)))

    def test_single_candidate(self):
        p = BlockPartition.from_blocks(4, [[1, 2], [3, 4]])
        f = literal(4, 3)
        l, v, q = search(f, p, 0, 0b0100)
        assert l == 2 and v == 0 and q <= 2

    def test_equal_values_rejected(self):
        p = BlockPartition.from_blocks(2, [[1], [2]])
        with pytest.raises(ContractViolation):
            binary_search_block(QueryOracle(literal(2, 1)), p, [], 0, 2, 0, 0)

    def test_excluded_differs_rejected(self):
        p = BlockPartition.from_blocks(2, [[1], [2]])
        with pytest.raises(ContractViolation):
            binary_search_block(QueryOracle(literal(2, 1)), p, [1], 0, 3, 0, 1)

    def test_witness_soundness_and_query_bound(self):
        rng = random.Random(7)
        n, r = 14, 80
        done = 0
        while done < 1000:
            f = TruthTable(n, [int(rng.random() < 0.3) for _ in range(1 << n)]) if done % 100 == 0 else f
            p = random_partition(n, r, rng)
            a, b = rng.getrandbits(n), rng.getrandbits(n)
            if f(a) == f(b):
                continue
            l, v, q = search(f, p, a, b)
            cands = sum(1 for m in p.masks if m & (a ^ b))
            assert q <= max(0, math.ceil(math.log2(cands)))
            assert q <= 2 * math.ceil(math.log2(r))
            assert f(v) != f(swap_in(v, b, p.mask(l)))
            # hence the restriction to block l is non-constant
            fl = BlockRestriction(QueryOracle(f), p.mask(l), v)
            blk = p.mask(l)
            vals = set()
            sub = blk
            while True:
                vals.add(fl.mq(sub))
                if sub == 0:
                    break
                sub = (sub - 1) & blk
            assert vals == {0, 1}
            done += 1

    def test_one_junta_variable_per_block(self):
        rng = random.Random(8)
        n, J = 16, [2, 7, 11]
        core = [rng.getrandbits(1) for _ in range(8)]
        core[0], core[7] = 0, 1
        f = JuntaFunction(n, J, core)
        done = 0
        while done < 300:
            p = random_partition(n, 18, rng)
            if len({p.block_of(j) for j in J}) < len(J):
                continue
            excluded = []
            a = rng.getrandbits(n)
            for _ in range(20):
                b = swap_in(rng.getrandbits(n), a, p.union(excluded))
                if f(a) == f(b):
                    continue
                l, _, _ = search(f, p, a, b, excluded)
                assert len(set(p.block(l)) & set(J)) == 1
                excluded.append(l)
            done += 1


class TestRestriction:
    def test_routes_through_parent(self):
        f = conjunction(6, [1, 4])
        o = QueryOracle(f, seed=1)
        fl = BlockRestriction(o, 0b001000, 0b000001)
        assert fl.mq(0) == 0 and fl.mq(0b001000) == 1
        assert fl.mq(0b110111 | 0b001000) == 1  # bits off the block are ignored
        assert o.mq_count == 3
        assert fl.domain == 0b001000
