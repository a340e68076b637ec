"""Subpath kernel: weight table, merged forest, sweep vs. independent
oracles, and algebraic invariants."""

import math
import random

import numpy as np
import pytest

from conftest import rel_close, shuffle_children
from subpath_kernel.esa import suffix
from subpath_kernel.kernel import (
    KernelParams,
    _prefix_counts,
    _sweep,
    gram_matrix,
    merge_forest,
    merge_trees,
    merged_esa,
    subpath_kernel,
    subpath_kernel_oracle,
    weight_table,
)
from subpath_kernel.trees import LabelTable, parse_tree, random_tree


def pairwise_weight_kernel(t1, t2, lam):
    """Third route: sum W[lcp] over all cross-tree suffix pairs."""
    maxh = max(max(t1.depth), max(t2.depth)) + 1
    w = weight_table(maxh, lam)
    sufs1 = [suffix(t1, v) for v in range(t1.n)]
    sufs2 = [suffix(t2, v) for v in range(t2.n)]
    total = 0.0
    for s1 in sufs1:
        for s2 in sufs2:
            k = 0
            while k < len(s1) and k < len(s2) and s1[k] == s2[k]:
                k += 1
            total += w[k]
    return total


class TestParams:
    @pytest.mark.parametrize("lam", [0.0, -0.5, 1.0001, 2.0])
    def test_out_of_range(self, lam):
        with pytest.raises(ValueError):
            KernelParams(lam=lam)

    def test_boundary_one_allowed(self):
        assert KernelParams(lam=1.0).lam == 1.0


class TestWeightTable:
    def test_unit_decay_counts_lengths(self):
        assert weight_table(5, 1.0) == [0, 1, 2, 3, 4, 5]

    def test_half_decay(self):
        w = weight_table(3, 0.5)
        assert w[3] == pytest.approx(0.875, abs=0)
        assert w == [0.0, 0.5, 0.75, 0.875]

    def test_matches_closed_form(self):
        lam = 0.9
        w = weight_table(50, lam)
        for n in (1, 10, 50):
            closed = lam * (1 - lam**n) / (1 - lam)
            assert rel_close(w[n], closed, 1e-12)

    def test_increment_is_power(self):
        w = weight_table(30, 0.7)
        for n in range(1, 31):
            assert rel_close(w[n] - w[n - 1], 0.7**n, 1e-12)


class TestMerge:
    def test_two_singletons(self):
        m = merge_trees(parse_tree("a"), parse_tree("b"))
        assert len(m.labels) == 4
        assert m.parent == [-1, 0, -1, 2]
        assert m.depth == [0, 1, 0, 1]
        assert m.source == [0, 1, 0, 2]
        assert m.terminals == [0, 2]
        assert m.labels[0] == -2 and m.labels[2] == -1

    def test_component_sizes(self):
        t1, t2 = random_tree(9, 2, 0), random_tree(4, 2, 1)
        m = merge_trees(t1, t2)
        assert len(m.labels) == t1.n + t2.n + 2
        assert m.source.count(1) == t1.n and m.source.count(2) == t2.n

    def test_terminal_validation(self):
        t = parse_tree("a")
        with pytest.raises(ValueError):
            merge_forest([t, t], [-1])
        with pytest.raises(ValueError):
            merge_forest([t, t], [0, -1])
        with pytest.raises(ValueError):
            merge_forest([t, t], [-1, -2])


class TestFrozenValues:
    def test_identical_singletons(self):
        k = subpath_kernel(parse_tree("a"), parse_tree("a"), KernelParams(lam=1.0))
        assert k == 1.0

    def test_disjoint_alphabets_exact_zero(self):
        table = LabelTable()
        k = subpath_kernel(parse_tree("a", table), parse_tree("b", table),
                           KernelParams(lam=0.5))
        assert k == 0.0 and math.copysign(1.0, k) == 1.0

    def test_chain_pair_half_decay(self):
        t = parse_tree("a(b)")
        assert subpath_kernel(t, t, KernelParams(lam=0.5)) == pytest.approx(1.25, abs=1e-15)

    def test_asymmetric_pair_unit_decay(self):
        table = LabelTable()
        k = subpath_kernel(parse_tree("a(b,b)", table), parse_tree("a(b)", table),
                           KernelParams(lam=1.0))
        assert k == pytest.approx(5.0, abs=1e-12)

    def test_oracle_agrees_on_frozen_cases(self):
        table = LabelTable()
        cases = [("a", "a", 1.0), ("a(b)", "a(b)", 0.5), ("a(b,b)", "a(b)", 1.0)]
        for a, b, lam in cases:
            t1, t2 = parse_tree(a, table), parse_tree(b, table)
            assert rel_close(subpath_kernel(t1, t2, KernelParams(lam=lam)),
                             subpath_kernel_oracle(t1, t2, lam), 1e-12)


class TestDifferential:
    def test_against_enumeration_oracle(self):
        rng = random.Random(0)
        for i in range(200):
            sig = rng.choice([1, 2, 5, 26])
            t1 = random_tree(rng.randint(1, 64), sig, 2 * i)
            t2 = random_tree(rng.randint(1, 64), sig, 2 * i + 1)
            lam = rng.choice([0.25, 0.5, 1.0])
            k = subpath_kernel(t1, t2, KernelParams(lam=lam))
            assert rel_close(k, subpath_kernel_oracle(t1, t2, lam), 1e-9)

    def test_against_pairwise_weight_oracle(self):
        rng = random.Random(1)
        for i in range(40):
            t1 = random_tree(rng.randint(1, 40), rng.choice([1, 3]), 31 * i)
            t2 = random_tree(rng.randint(1, 40), rng.choice([1, 3]), 31 * i + 5)
            lam = rng.choice([0.5, 1.0])
            k = subpath_kernel(t1, t2, KernelParams(lam=lam))
            assert rel_close(k, pairwise_weight_kernel(t1, t2, lam), 1e-9)

    def test_builders_agree(self):
        rng = random.Random(2)
        for i in range(30):
            t1 = random_tree(rng.randint(1, 80), 4, 7 * i)
            t2 = random_tree(rng.randint(1, 80), 4, 7 * i + 3)
            a = subpath_kernel(t1, t2, KernelParams(lam=0.5), builder="linear")
            b = subpath_kernel(t1, t2, KernelParams(lam=0.5), builder="reference")
            assert a == b

    def test_self_kernel_positive(self):
        for i in range(10):
            t = random_tree(random.Random(i).randint(1, 30), 3, i)
            assert subpath_kernel(t, t, KernelParams(lam=0.5)) > 0


class TestAlgebraicInvariants:
    def test_symmetry(self):
        rng = random.Random(3)
        for i in range(50):
            t1 = random_tree(rng.randint(1, 50), 3, 11 * i)
            t2 = random_tree(rng.randint(1, 50), 3, 11 * i + 1)
            p = KernelParams(lam=0.5)
            assert rel_close(subpath_kernel(t1, t2, p), subpath_kernel(t2, t1, p), 1e-12)

    def test_unordered_invariance(self):
        rng = random.Random(4)
        for i in range(40):
            t1 = random_tree(rng.randint(2, 50), 3, 13 * i)
            t2 = random_tree(rng.randint(2, 50), 3, 13 * i + 1)
            p = KernelParams(lam=0.5)
            base = subpath_kernel(t1, t2, p)
            shuffled = subpath_kernel(shuffle_children(t1, i), shuffle_children(t2, i + 99), p)
            assert rel_close(base, shuffled, 1e-12)

    def test_tie_break_invariance(self):
        # same-label siblings reorder SA ties; kernel must not move
        table = LabelTable()
        t1 = parse_tree("a(b(c),b(c),b)", table)
        t2 = parse_tree("a(b,b(c))", table)
        p = KernelParams(lam=0.5)
        base = subpath_kernel(t1, t2, p)
        for s in range(5):
            assert rel_close(base, subpath_kernel(shuffle_children(t1, s), t2, p), 1e-12)

    def test_terminal_reencoding_invariance(self):
        rng = random.Random(5)
        for i in range(20):
            t1 = random_tree(rng.randint(1, 40), 3, 17 * i)
            t2 = random_tree(rng.randint(1, 40), 3, 17 * i + 2)
            lam = 0.5
            base = subpath_kernel(t1, t2, KernelParams(lam=lam))
            merged = merge_forest([t1, t2], [-19, -4])
            arr = merged_esa(merged)
            w = weight_table(max(merged.depth) + 1, lam)
            redone = _sweep(arr.sa, arr.lcp, merged.depth, merged.source, w)
            assert rel_close(base, redone, 1e-12)

    def test_decay_polynomial_coefficients(self):
        # K as a polynomial in lam: coefficients are integer pair counts by
        # shared-prefix length; evaluate at several lam against the sweep
        rng = random.Random(6)
        for i in range(20):
            t1 = random_tree(rng.randint(1, 15), 2, 23 * i)
            t2 = random_tree(rng.randint(1, 15), 2, 23 * i + 1)
            c1 = _prefix_counts(t1)
            c2 = _prefix_counts(t2)
            coeff: dict[int, int] = {}
            for s, a in c1.items():
                b = c2.get(s)
                if b:
                    coeff[len(s)] = coeff.get(len(s), 0) + a * b
            for lam in (0.25, 0.5, 1.0):
                want = sum(cnt * lam**k for k, cnt in coeff.items())
                got = subpath_kernel(t1, t2, KernelParams(lam=lam))
                assert rel_close(got, want, 1e-12)

    def test_single_symbol_singletons_scale_linearly(self):
        table = LabelTable()
        t1 = parse_tree("a", table)
        t2 = parse_tree("a", table)
        for lam in (0.25, 0.5, 1.0):
            assert subpath_kernel(t1, t2, KernelParams(lam=lam)) == pytest.approx(lam)


class TestGram:
    def test_single_tree(self):
        t = parse_tree("a(b)")
        p = KernelParams(lam=0.5)
        g = gram_matrix([t], p)
        assert g == [[subpath_kernel(t, t, p)]]
        gn = gram_matrix([t], p, normalize=True)
        assert gn[0][0] == pytest.approx(1.0)

    def test_symmetric_exactly(self):
        trees = [random_tree(random.Random(i).randint(1, 30), 3, i) for i in range(8)]
        g = gram_matrix(trees, KernelParams(lam=0.5))
        for i in range(8):
            for j in range(8):
                assert g[i][j] == g[j][i]

    def test_normalized_diagonal(self):
        trees = [random_tree(10 + i, 3, i) for i in range(5)]
        g = gram_matrix(trees, KernelParams(lam=0.5), normalize=True)
        for i in range(5):
            assert g[i][i] == pytest.approx(1.0)
            for j in range(5):
                assert -1.0 - 1e-9 <= g[i][j] <= 1.0 + 1e-9

    def test_positive_semidefinite(self):
        trees = [random_tree(random.Random(100 + i).randint(1, 40), 4, 100 + i)
                 for i in range(30)]
        g = np.array(gram_matrix(trees, KernelParams(lam=0.5)))
        eig = np.linalg.eigvalsh(g)
        assert eig.min() >= -1e-8 * np.trace(g)

    def test_parallel_matches_serial(self):
        trees = [random_tree(random.Random(200 + i).randint(1, 25), 3, 200 + i)
                 for i in range(10)]
        p = KernelParams(lam=0.5)
        serial = gram_matrix(trees, p, jobs=1)
        parallel = gram_matrix(trees, p, jobs=2)
        assert serial == parallel
