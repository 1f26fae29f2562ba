import numpy as np
import pytest

from treelab.errors import BudgetExceededError
from treelab.kernels import make_ising, make_potts, uniform_kernel
from treelab.trees import (build_tree, classify_correlation_decay, dump_configuration,
                           estimate_correlation, exact_bmc_marginals, exact_correlations,
                           local_correlation_bound, sample_bmc, sample_bmc_batch,
                           sample_iid, sample_uniform_labels, tree_distance,
                           tree_vertex_count)

# chi-square criticals at the two-sided 3-sigma tail probability (0.0027)
CHI2_3SIGMA = {1: 9.00, 2: 11.83, 3: 14.16, 4: 16.25, 6: 20.06}


class TestBuildTree:
    @pytest.mark.parametrize("d,depth,count", [(3, 1, 4), (3, 3, 22), (4, 2, 17)])
    def test_vertex_counts(self, d, depth, count):
        tree = build_tree(d, depth)
        assert tree.n == count
        assert tree_vertex_count(d, depth) == count

    def test_structure(self):
        tree = build_tree(3, 3)
        assert tree.child_count[0] == 3
        internal = (tree.depth_of > 0) & (tree.depth_of < tree.depth)
        assert np.all(tree.child_count[internal] == 2)
        leaves = tree.depth_of == tree.depth
        assert np.all(tree.child_count[leaves] == 0)
        # parent/child tables agree
        for v in range(1, tree.n):
            p = int(tree.parent[v])
            assert v in tree.children[p, : tree.child_count[p]]
            assert tree.depth_of[v] == tree.depth_of[p] + 1
        # explicit level-by-level count for d=4, depth=2: 1 + 4 + 12
        t2 = build_tree(4, 2)
        assert [int((t2.depth_of == l).sum()) for l in range(3)] == [1, 4, 12]

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            build_tree(3, 20, max_vertices=1000)

    def test_degree_check(self):
        with pytest.raises(ValueError):
            build_tree(2, 3)

    def test_tree_distance(self):
        tree = build_tree(3, 3)
        assert tree_distance(tree, 0, 0) == 0
        child = int(tree.children[0, 0])
        grand = int(tree.children[child, 0])
        assert tree_distance(tree, 0, grand) == 2
        assert tree_distance(tree, int(tree.children[0, 0]), int(tree.children[0, 1])) == 2


class TestSampleBmc:
    def test_uniform_kernel_gives_iid(self):
        tree = build_tree(3, 2)
        states = sample_bmc_batch(uniform_kernel(4), tree, np.random.default_rng(0), 20000)
        # root and a leaf are independent uniform: joint close to product
        joint = np.zeros((4, 4))
        leaf = tree.n - 1
        for a, b in zip(states[0], states[leaf]):
            joint[a, b] += 1
        joint /= joint.sum()
        assert np.abs(joint - 1 / 16).max() < 0.01

    def test_near_deterministic_disagreement_rate(self):
        # flip probability per edge is (1 - theta) / 2 = 0.0005
        theta = 0.999
        tree = build_tree(3, 1)
        states = sample_bmc_batch(make_ising(theta), tree, np.random.default_rng(1), 200_000)
        frac = float((states[0] != states[1]).mean())
        expect = (1 - theta) / 2
        sigma = np.sqrt(expect * (1 - expect) / 200_000)
        assert abs(frac - expect) < 3 * sigma

    def test_root_marginal_matches_pi(self):
        kernel = make_potts(5, 0.3)
        tree = build_tree(3, 2)
        states = sample_bmc_batch(kernel, tree, np.random.default_rng(2), 100_000)
        counts = np.bincount(states[0], minlength=5)
        for s in range(5):
            sigma = np.sqrt(0.2 * 0.8 / 100_000)
            assert abs(counts[s] / 100_000 - 0.2) < 3.5 * sigma

    def test_every_vertex_marginal_chi2(self):
        # chi-square at the 3-sigma level per vertex
        kernel = make_ising(0.4)
        tree = build_tree(3, 3)
        reps = 20_000
        states = sample_bmc_batch(kernel, tree, np.random.default_rng(3), reps)
        crit = CHI2_3SIGMA[1]
        worst = 0.0
        for v in range(tree.n):
            counts = np.bincount(states[v], minlength=2)
            chi2 = float((((counts - reps / 2) ** 2) / (reps / 2)).sum())
            worst = max(worst, chi2)
        assert worst < crit * 1.5  # small union slack over 22 vertices

    def test_exchangeability_of_children(self):
        kernel = make_ising(0.5)
        tree = build_tree(3, 2)
        reps = 40_000
        states = sample_bmc_batch(kernel, tree, np.random.default_rng(4), reps)
        c1, c2 = int(tree.children[0, 0]), int(tree.children[0, 1])
        law1 = np.zeros((2, 2))
        law2 = np.zeros((2, 2))
        np.add.at(law1, (states[0], states[c1]), 1)
        np.add.at(law2, (states[0], states[c2]), 1)
        tv = 0.5 * np.abs(law1 / reps - law2 / reps).sum()
        noise = sum(np.sqrt(p * (1 - p) / reps) for p in (law1 / reps).ravel())
        assert tv < 4 * noise

    def test_single_draw_wrapper(self):
        tree = build_tree(3, 2)
        config = sample_bmc(make_ising(0.2), tree, np.random.default_rng(5))
        assert config.states.shape == (tree.n,)
        assert set(np.unique(config.states)) <= {0, 1}


class TestSampleIid:
    def test_point_mass(self):
        tree = build_tree(3, 2)
        config = sample_iid([0.0, 1.0, 0.0], tree, np.random.default_rng(0))
        assert np.all(config.states == 1)

    def test_uniform_labels_in_unit_interval(self):
        tree = build_tree(3, 3)
        field = sample_uniform_labels(tree, np.random.default_rng(1))
        assert field.values.shape == (tree.n,)
        assert np.all((field.values >= 0) & (field.values < 1))

    def test_pair_factorizes(self):
        tree = build_tree(3, 2)
        rng = np.random.default_rng(2)
        reps = 30_000
        joint = np.zeros((2, 2))
        samples = np.stack([sample_iid([0.3, 0.7], tree, rng).states for _ in range(reps)])
        np.add.at(joint, (samples[:, 0], samples[:, 1]), 1)
        joint /= reps
        marg0, marg1 = joint.sum(1), joint.sum(0)
        tv = 0.5 * np.abs(joint - np.outer(marg0, marg1)).sum()
        assert tv < 3 * np.sqrt(0.25 / reps) * 4

    def test_invalid_dist(self):
        tree = build_tree(3, 1)
        with pytest.raises(ValueError):
            sample_iid([0.5, 0.6], tree, np.random.default_rng(0))


class TestExactMarginals:
    def test_ising_edge_entry(self):
        law = exact_bmc_marginals(make_ising(0.2), "edge")
        assert law[0, 0] == pytest.approx(0.3, abs=1e-14)

    def test_uniform_edge(self):
        law = exact_bmc_marginals(uniform_kernel(3), "edge")
        assert np.allclose(law, 1 / 9, atol=1e-14)

    def test_star_normalizes(self):
        law = exact_bmc_marginals(make_potts(3, 0.4), "star", d=4)
        assert law.shape == (3,) * 5
        assert law.sum() == pytest.approx(1.0, abs=1e-12)

    def test_edge_symmetric_under_detailed_balance(self):
        law = exact_bmc_marginals(make_potts(4, 0.3), "edge")
        assert np.allclose(law, law.T, atol=1e-12)

    def test_vertex_is_pi(self):
        kernel = make_potts(5, 0.2)
        assert np.allclose(exact_bmc_marginals(kernel, "vertex"), kernel.pi)

    def test_budget_and_validation(self):
        with pytest.raises(BudgetExceededError):
            exact_bmc_marginals(make_potts(50, 0.3), "star", d=8)
        with pytest.raises(ValueError):
            exact_bmc_marginals(make_ising(0.2), "triangle")
        with pytest.raises(ValueError):
            exact_bmc_marginals(make_ising(0.2), "star")


class TestCorrelations:
    def test_transfer_matrix_matches_power_oracle(self):
        # independent oracle: correlation at distance k for the +-1 encoding of
        # the two-state kernel is theta^k
        theta = 0.5
        enc = np.array([1.0, -1.0])
        exact = exact_correlations(make_ising(theta), enc, 6)
        assert np.allclose(exact, [theta**k for k in range(1, 7)], atol=1e-12)

    def test_sampled_matches_exact(self):
        est = estimate_correlation(make_ising(0.5), 2, [1.0, -1.0], 100_000,
                                   np.random.default_rng(11))
        assert abs(est.value - 0.25) < 3 * est.stderr

    def test_uniform_kernel_uncorrelated(self):
        est = estimate_correlation(uniform_kernel(4), 3, [0.0, 1.0, 2.0, 3.0], 50_000,
                                   np.random.default_rng(12))
        assert abs(est.value) < 3 * est.stderr

    def test_distance_zero(self):
        est = estimate_correlation(make_ising(0.3), 0, [1.0, -1.0], 1000,
                                   np.random.default_rng(0))
        assert est.value == 1.0 and est.stderr == 0.0

    def test_zero_variance_encoding(self):
        with pytest.raises(ValueError):
            estimate_correlation(make_ising(0.3), 2, [1.0, 1.0], 1000,
                                 np.random.default_rng(0))

    def test_bound_value(self):
        assert local_correlation_bound(1, 3) == pytest.approx((4 / 3) * 2**-0.5, abs=1e-12)

    def test_classifier_violation_witness(self):
        verdict = classify_correlation_decay(make_ising(0.8), 3, [1.0, -1.0], 30)
        assert verdict.verdict == "VIOLATES"
        assert verdict.witness == 15

    def test_classifier_consistent(self):
        verdict = classify_correlation_decay(make_ising(0.3), 4, [1.0, -1.0], 200)
        assert verdict.verdict == "CONSISTENT"
        assert verdict.witness is None


def test_dump_configuration_format():
    tree = build_tree(3, 1)
    config = sample_bmc(make_ising(0.2), tree, np.random.default_rng(0))
    lines = dump_configuration(config).strip().split("\n")
    assert len(lines) == 4
    depth, index, state = lines[0].split()
    assert (depth, index) == ("0", "0")
    assert state in ("0", "1")
