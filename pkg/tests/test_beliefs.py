import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causal_gambit import RngStream
from causal_gambit.beliefs import (BeliefInit, StructureMismatchError, beliefs_from_json, beliefs_to_json,
                                   init_beliefs, observation_count, posterior_mean, realize_model,
                                   tv_distance, update, update_many)
from causal_gambit.inference import IncompleteOutcomeError, sample_outcome
from causal_gambit.model import CausalModel, Cpt, validate_model

UNIFORM = BeliefInit("uniform")


def with_prior(beliefs, variable, config, alpha):
    prior = list(beliefs.prior)
    a = np.array(prior[variable])
    a[tuple(config)] = alpha
    prior[variable] = a
    return type(beliefs)(beliefs.structure, tuple(prior), beliefs.counts, beliefs.excluded)


class TestInit:
    def test_uniform_root(self, default_model):
        b = init_beliefs(default_model, UNIFORM)
        assert b.alpha(0).tolist() == [1.0, 1.0]

    def test_random_bounds_and_reproducible(self, default_model):
        b1 = init_beliefs(default_model, BeliefInit("random", 0.5, 2.0), RngStream(4))
        b2 = init_beliefs(default_model, BeliefInit("random", 0.5, 2.0), RngStream(4))
        assert b1 == b2
        for v, cfg in b1.rows():
            a = b1.alpha(v, cfg)
            assert np.all((a >= 0.5) & (a <= 2.0))

    def test_row_count(self, default_model):
        # D: 1, Tr: 1, R|Tr: 2, Y|D,Tr,R: 8
        b = init_beliefs(default_model, UNIFORM)
        assert b.n_rows() == 12 and len(list(b.rows())) == 12

    @pytest.mark.parametrize("lo, hi", [(0.0, 1.0), (-1.0, 2.0), (2.0, 1.0)])
    def test_bad_bounds(self, lo, hi):
        with pytest.raises(ValueError):
            BeliefInit("random", lo, hi)


class TestUpdate:
    def test_root(self, default_model):
        b = update(init_beliefs(default_model, UNIFORM), (0, 0, 0, 0))
        assert b.alpha(0).tolist() == [2.0, 1.0]

    def test_parents_case(self, default_model):
        b = update(init_beliefs(default_model, UNIFORM), (0, 0, 1, 1))  # pill, dies
        assert b.alpha(2, (0,)).tolist() == [1.0, 2.0]
        assert b.alpha(2, (1,)).tolist() == [1.0, 1.0]

    def test_repeated(self, default_model):
        b0 = init_beliefs(default_model, BeliefInit(), RngStream(0))
        b = update_many(b0, [(1, 1, 0, 1)] * 7)
        for v, cfg in b.rows():
            hit = cfg == tuple((1, 1, 0, 1)[p] for p in b.parents(v))
            expected = b0.alpha(v, cfg) + (7 * np.eye(2)[(1, 1, 0, 1)[v]] if hit else 0)
            assert np.array_equal(b.alpha(v, cfg), expected)

    def test_excluded_untouched(self, default_model):
        b = init_beliefs(default_model, UNIFORM, excluded=(1,))
        b = update(b, (0, 1, 0, 0))
        assert b.alpha(1).tolist() == [1.0, 1.0]
        assert b.alpha(0).tolist() == [2.0, 1.0]

    def test_returns_new_store(self, default_model):
        b = init_beliefs(default_model, UNIFORM)
        update(b, (0, 0, 0, 0))
        assert b.alpha(0).tolist() == [1.0, 1.0]

    def test_incomplete(self, default_model):
        with pytest.raises(IncompleteOutcomeError):
            update(init_beliefs(default_model, UNIFORM), (0, 1))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(*[st.integers(0, 1)] * 4), max_size=30), st.randoms())
    def test_commutative(self, outcomes, rnd):
        from causal_gambit import load_default_model
        m = load_default_model()
        b0 = init_beliefs(m, BeliefInit(), RngStream(1))
        shuffled = list(outcomes)
        rnd.shuffle(shuffled)
        assert update_many(b0, outcomes) == update_many(b0, shuffled)


class TestRealize:
    def test_mean(self, default_model):
        b = init_beliefs(default_model, UNIFORM)
        b = with_prior(b, 0, (), [2.0, 2.0])
        b = with_prior(b, 2, (0,), [3.0, 1.0])
        m = realize_model(b, "mean")
        assert m.cpts[0].row().tolist() == [0.5, 0.5]
        assert m.cpts[2].row((0,)).tolist() == [0.75, 0.25]

    def test_sample_valid_and_reproducible(self, default_model):
        b = init_beliefs(default_model, BeliefInit(), RngStream(9), excluded=(1,))
        m1 = realize_model(b, "sample", RngStream(2))
        m2 = realize_model(b, "sample", RngStream(2))
        assert validate_model(m1) == [] and m1 == m2
        assert m1.cpts[1].row().tolist() == [0.5, 0.5]

    def test_parents_follow_ascending_order(self):
        m = CausalModel.build([("A", "01"), ("B", "01"), ("C", "01")],
                              {"A": [0.5, 0.5], "B": [0.5, 0.5],
                               "C": (("B", "A"), [[[0.1, 0.9], [0.2, 0.8]], [[0.3, 0.7], [0.4, 0.6]]])})
        r = realize_model(init_beliefs(m, UNIFORM), "mean")
        assert r.cpts[2].parents == (0, 1) and validate_model(r) == []

    def test_dirichlet_sampler_mean(self):
        from causal_gambit.model import Structure, VariableSpec, Dag
        alpha = np.array([0.7, 2.5, 1.3])
        s = Structure((VariableSpec("X", ("a", "b", "c"), 0),), Dag.empty(1))
        b = init_beliefs(s, UNIFORM)
        b = type(b)(s, (alpha,), b.counts, frozenset())
        rng = RngStream(0)
        draws = np.array([realize_model(b, "sample", rng).cpts[0].row() for _ in range(10_000)])
        assert np.all(np.abs(draws.mean(0) - alpha / alpha.sum()) <= 0.01)


class TestPosteriorMean:
    def test_values(self, default_model):
        b = init_beliefs(default_model, UNIFORM)
        assert posterior_mean(b, 0).tolist() == [0.5, 0.5]
        assert posterior_mean(with_prior(b, 0, (), [1.0, 3.0]), 0).tolist() == [0.25, 0.75]

    def test_counting(self, default_model):
        b = update_many(init_beliefs(default_model, UNIFORM), [(0, 0, 0, 0)] * 100)
        assert posterior_mean(b, 0) == pytest.approx([101 / 102, 1 / 102], abs=1e-15)
        assert observation_count(b, 0) == 100

    def test_unknown_row(self, default_model):
        with pytest.raises(KeyError):
            posterior_mean(init_beliefs(default_model, UNIFORM), 2, (5,))


class TestTvDistance:
    def _one_var(self, truth_row):
        return CausalModel.build([("X", "ab")], {"X": truth_row})

    def test_exact(self, default_model):
        b = init_beliefs(default_model, UNIFORM)
        for v, cfg in b.rows():
            b = with_prior(b, v, cfg, np.asarray(default_model.cpts[v].row(cfg)) * 10 + 1e-300)
        r = tv_distance(b, default_model)
        assert all(abs(d) <= 1e-12 for d in r.per_row.values())

    @pytest.mark.parametrize("alpha, truth, expected", [
        ([1e-300, 1.0], [0.0, 1.0], 0.0),
        ([1.0, 1e-300], [0.0, 1.0], 1.0),
        ([0.6, 0.4], [0.5, 0.5], 0.1),
    ])
    def test_values(self, alpha, truth, expected):
        m = self._one_var(truth)
        b = with_prior(init_beliefs(m, UNIFORM), 0, (), alpha)
        assert tv_distance(b, m).mean == pytest.approx(expected, abs=1e-12)

    def test_min_count_and_exclusion(self, default_model):
        b = init_beliefs(default_model, UNIFORM, excluded=(1,))
        b = update_many(b, [(0, 0, 0, 0)] * 5)
        r = tv_distance(b, default_model, min_count=5)
        assert set(r.per_row) == {(0, ()), (2, (0,)), (3, (0, 0, 0))}
        assert np.isnan(tv_distance(b, default_model, min_count=6).mean)

    def test_structure_mismatch(self, default_model):
        with pytest.raises(StructureMismatchError):
            tv_distance(init_beliefs(default_model, UNIFORM), self._one_var([0.5, 0.5]))

    def test_truth_parent_order_is_irrelevant(self):
        table = np.array([[[0.1, 0.9], [0.2, 0.8]], [[0.3, 0.7], [0.4, 0.6]]])
        m = CausalModel.build([("A", "01"), ("B", "01"), ("C", "01")],
                              {"A": [0.5, 0.5], "B": [0.5, 0.5], "C": (("B", "A"), table)})
        b = init_beliefs(m, UNIFORM)
        b = with_prior(b, 2, (0, 1), [0.3, 0.7])  # A=0, B=1 -> table[1][0]
        assert tv_distance(b, m).per_row[(2, (0, 1))] == pytest.approx(0.0, abs=1e-12)


def test_consistency_under_full_observation(default_model):
    tvs = []
    for seed in range(20):
        rng = RngStream(seed)
        b = init_beliefs(default_model, BeliefInit(), rng)
        for _ in range(20_000):
            b = update(b, sample_outcome(default_model, {}, rng))
        tvs.append(tv_distance(b, default_model).mean)
    assert np.mean(tvs) <= 0.03


def test_json_round_trip(default_model):
    b = update_many(init_beliefs(default_model, BeliefInit(), RngStream(3), excluded=(1,)),
                    [(0, 0, 0, 0), (1, 1, 1, 1)])
    text = beliefs_to_json(b)
    assert '"alpha"' in text and '"p"' not in text
    back = beliefs_from_json(text)
    assert back.excluded == {1}
    for v, cfg in b.rows():
        assert np.array_equal(back.alpha(v, cfg), b.alpha(v, cfg))


def test_cpt_type_exported():
    assert Cpt(0, (), [0.5, 0.5]).row().sum() == 1
