import math

import numpy as np
import pytest

from pccregions.algebra import AbelianGroupSpec, field_make
from pccregions.channels import Channel3IC, make_example
from pccregions.enums import RegionKind
from pccregions.exceptions import ConfigurationError, DomainError, InfeasibilityError
from pccregions.info import binary_entropy, channel_capacity
from pccregions.regions.evaluators import evaluate, member
from pccregions.regions.testchannel import z4_test_channel
from pccregions.search import (
    THREADS_ENV, TABLE1_ALGEBRAS, TABLE1_MU, worker_threads, SearchConfig, Condition, VerdictReport,
    maximize_weighted_rate, table1_search, check_example1, check_prop2, compute_C1, c1_profile, check_prop3,
    check_prop5, check_example7, example8_terms, example8_corners
)

Z4_CAPACITY = 2 - binary_entropy(0.125) - 0.125 * math.log2(3)


def _bsc(d):
    return np.array([[1 - d, d], [d, 1 - d]])


@pytest.fixture
def cheap_config():
    return SearchConfig(kind='alpha_f_3to1', restarts=2, iterations=2, step=0.2, min_step=0.1, seed=7)


class TestWorkerThreads:
    def test_worker_threads__if_unset__should_return_one(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)

        assert worker_threads() == 1

    def test_worker_threads__should_read_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, '3')

        assert worker_threads() == 3

    @pytest.mark.parametrize('value', ('abc', '0', '-2'))
    def test_worker_threads__if_bad_value__should_raise_error(self, monkeypatch, value):
        monkeypatch.setenv(THREADS_ENV, value)

        with pytest.raises(ConfigurationError):
            worker_threads()


class TestSearchConfig:
    def test_init__should_default_to_binary_field(self):
        obj = SearchConfig()

        assert obj.kind is RegionKind.alpha_f_3to1
        assert obj.algebra.order == 2

    def test_init__if_group_kind__should_default_to_cyclic_group(self):
        assert SearchConfig(kind='alpha_g_3to1').algebra.is_cyclic

    @pytest.mark.parametrize('params', (
        {'kind': 'beta'},
        {'mu': (1, -1, 1)},
        {'mu': (1, 1)},
        {'restarts': 0},
        {'card_q': 0},
        {'step': 0.01, 'min_step': 0.1},
    ))
    def test_init__if_bad_parameters__should_raise_error(self, params):
        with pytest.raises(ConfigurationError):
            SearchConfig(**params)

    def test_to_dict__should_be_plain(self):
        res = SearchConfig(mu=(2, 1, 1)).to_dict()

        assert res['kind'] == 'alpha_f_3to1'
        assert res['mu'] == [2.0, 1.0, 1.0]
        assert res['restarts'] == 4


class TestMaximizeWeightedRate:
    def test_maximize_weighted_rate__should_return_member_rates(self, example1, cheap_config):
        res = maximize_weighted_rate(example1, cfg=cheap_config)

        region = evaluate(RegionKind.alpha_f_3to1, res.test_channel)
        assert region.contains(res.rates).feasible
        assert res.value == pytest.approx(sum(res.rates), abs=1e-9)

    def test_maximize_weighted_rate__trace_best_should_not_decrease(self, example1, cheap_config):
        res = maximize_weighted_rate(example1, cfg=cheap_config)

        best = [row.best for row in res.trace]
        assert best == sorted(best)
        assert best[-1] == pytest.approx(res.value)

    def test_maximize_weighted_rate__same_seed__should_reproduce_result(self, example1, cheap_config):
        first = maximize_weighted_rate(example1, cfg=cheap_config)
        second = maximize_weighted_rate(example1, cfg=cheap_config)

        assert first.value == second.value
        assert first.rates == second.rates
        assert np.array_equal(first.test_channel.pmf.probs, second.test_channel.pmf.probs)

    def test_maximize_weighted_rate__should_not_depend_on_thread_count(self, example1, cheap_config, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, '1')
        single = maximize_weighted_rate(example1, cfg=cheap_config)
        monkeypatch.setenv(THREADS_ENV, '2')
        pooled = maximize_weighted_rate(example1, cfg=cheap_config)

        assert single.value == pooled.value
        assert single.rates == pooled.rates

    def test_maximize_weighted_rate__should_override_kind(self, example1, cheap_config):
        res = maximize_weighted_rate(example1, kind='alpha_u', cfg=cheap_config)

        assert res.test_channel.algebras == {}

    def test_maximize_weighted_rate__if_budget_unreachable__should_raise_error(self):
        w = make_example(1).W
        ch = Channel3IC(w, ([1, 1], [0, 0], [0, 0]), (0.5, 0, 0))

        with pytest.raises(InfeasibilityError) as e:
            maximize_weighted_rate(ch, cfg=SearchConfig(restarts=1, iterations=1))

        assert e.value.err == 4

    def test_maximize_weighted_rate__if_users_2_3_over_budget__should_project_onto_budget(self):
        w = make_example(1).W
        ch = Channel3IC(w, ([0, 0], [0, 1], [0, 1]), (0, 0.2, 0.3))
        cfg = SearchConfig(kind='alpha_f_3to1', restarts=3, iterations=3, step=0.2, min_step=0.1, seed=3)

        res = maximize_weighted_rate(ch, cfg=cfg)

        costs = ch.expected_costs(res.test_channel.pmf)
        assert costs[1] <= 0.2 + 1e-9
        assert costs[2] <= 0.3 + 1e-9
        assert res.test_channel.certify(RegionKind.alpha_f_3to1) is res.test_channel

    @pytest.mark.parametrize('kind,order', (('alpha_f_3to1', 3), ('alpha_g_3to1', 4)))
    def test_maximize_weighted_rate__structured_auxiliaries__should_run_to_completion(self, example1, kind, order):
        algebra = field_make(order) if kind == 'alpha_f_3to1' else AbelianGroupSpec.cyclic(order)
        cfg = SearchConfig(kind=kind, algebra=algebra, restarts=2, iterations=2, step=0.2, min_step=0.1)

        res = maximize_weighted_rate(example1, cfg=cfg)

        assert res.test_channel.theta('U2') == order
        assert res.value == pytest.approx(sum(res.rates), abs=1e-9)
        assert len(res.trace) >= 2

    @pytest.mark.slow
    def test_maximize_weighted_rate__interference_free__should_reach_capacities(self):
        deltas = (0.05, 0.1, 0.2)
        ch = Channel3IC(np.einsum('ax,by,cz->abcxyz', *(_bsc(d) for d in deltas)))
        cfg = SearchConfig(kind='alpha_u', card_u=1, restarts=1, iterations=60, step=0.1, min_step=1e-3)

        res = maximize_weighted_rate(ch, cfg=cfg)

        capacities = [channel_capacity(_bsc(d))[0] for d in deltas]
        assert res.value == pytest.approx(sum(capacities), abs=2e-3)
        assert res.rates == pytest.approx(capacities, abs=2e-3)


class TestTable1:
    def test_table1_search__if_unknown_algebra__should_raise_error(self):
        with pytest.raises(DomainError):
            table1_search(1, 'F5')

    @pytest.mark.slow
    @pytest.mark.parametrize('row,winner', ((1, 'F7'), (2, 'F8'), (3, 'Z4')))
    def test_table1_search__winning_algebra_should_dominate_r2(self, row, winner):
        cfg = SearchConfig(mu=TABLE1_MU, restarts=2, iterations=10, step=0.05, min_step=0.005)

        r2 = {name: table1_search(row, name, cfg).rates[1] for name in TABLE1_ALGEBRAS}

        assert all(r2[winner] > v for name, v in r2.items() if name != winner)


class TestCondition:
    @pytest.mark.parametrize('lhs,relation,rhs,tol,expect', (
        (1, '<', 2, 0, True),
        (2, '<', 2, 0, False),
        (2, '<=', 2, 0, True),
        (2.1, '<=', 2, 0.2, True),
        (1, '>', 2, 0, False),
        (1.9, '>=', 2, 0.2, True),
        (1, '==', 1 + 1e-10, 1e-9, True),
        (1, '==', 1.1, 1e-9, False),
    ))
    def test_holds__should_compare_sides(self, lhs, relation, rhs, tol, expect):
        obj = Condition('c', lhs, relation, rhs, tol)

        assert obj.holds is expect
        assert bool(obj) is expect

    def test_init__if_unknown_relation__should_raise_error(self):
        with pytest.raises(DomainError):
            Condition('c', 1, '!=', 2)

    def test_verdict_report__should_lookup_conditions_by_name(self):
        obj = VerdictReport('r', [Condition('a', 1, '<', 2), Condition('b', 3, '<', 2)], {'x': 1})

        assert obj['a'].holds
        assert not obj.holds
        assert obj.to_dict()['conditions'][1]['holds'] is False
        with pytest.raises(KeyError):
            _ = obj['c']


class TestExample1:
    @pytest.mark.parametrize('delta', np.arange(0.1375, 0.21, 0.005))
    def test_check_example1__inside_window__should_hold(self, delta):
        res = check_example1(0.125, 0.01, delta, delta)

        assert res['capacity_by_pcc'].holds
        assert res['usb_excluded'].holds
        assert 1 + binary_entropy(0.1325) > 2 * binary_entropy(delta)
        assert res.classification == 'pcc_strictly_better'

    def test_check_example1__below_window__should_fail_capacity(self):
        res = check_example1(0.125, 0.01, 0.10, 0.10)

        assert not res['capacity_by_pcc'].holds
        assert res['capacity_by_pcc'].lhs == pytest.approx(0.1325, abs=1e-12)

    def test_check_example1__half_crossover__should_fail_exclusion(self):
        assert not check_example1(0.125, 0.01, 0.5, 0.5)['usb_excluded'].holds

    def test_check_example1__corner_should_be_on_region_boundary(self):
        res = check_example1(0.125, 0.01, 0.15, 0.15)

        assert res.values['corner_in_alpha_f_3to1'] == 'boundary'


class TestProp2:
    def test_check_prop2__published_parameters__should_hold(self):
        res = check_prop2(1 / 90, 0.15, 0.01, 0.067)

        assert res['achievability'].holds
        assert res['usb_excluded'].holds
        assert res.values['beta'] == pytest.approx(0.01 * (1 - 0.2775) + 0.99 * 0.2775)

    def test_check_prop2__if_tau_vanishes__should_fail_achievability(self):
        res = check_prop2(1 / 90, 1e-9, 0.01, 0.067)

        assert res.values['theta'] == pytest.approx(0, abs=1e-6)
        assert not res['achievability'].holds


class TestProp3:
    def test_compute_c1__if_budget_zero__should_be_zero(self):
        value, p = compute_C1(make_example(3), tau1=0)

        assert value == 0
        assert p.tolist() == [1.0, 0.0]

    def test_c1_profile__should_be_unimodal(self):
        values = c1_profile(make_example(3), np.linspace(0, 1, 41))
        diffs = np.diff(values)

        falling = np.flatnonzero(diffs < -1e-12)
        assert not len(falling) or np.all(diffs[falling[0]:] <= 1e-12)

    def test_compute_c1__should_respect_cost_cap(self):
        value, p = compute_C1(make_example(3))

        assert p[1] <= 0.01 + 1e-9
        assert value > 0

    def test_check_prop3__should_reproduce_published_margins(self):
        res = check_prop3(0.01, 0.1525, 0.067)

        assert res.values['margin1'] == pytest.approx(0.0048, abs=5e-4)
        assert res.values['margin2'] == pytest.approx(0.0031, abs=5e-4)
        assert res.holds
        assert res.notes


class TestProp5:
    def test_check_prop5__published_point__should_sit_on_boundary(self):
        a = 0.75 - math.sqrt(30) / 8

        res = check_prop5(a, 0.125, a, tol=1e-9)

        assert res.values['beta'] == pytest.approx(0.125, abs=1e-9)
        assert res['group_capacity'].holds
        assert res.values['capacity'] == pytest.approx(1.2583, abs=1e-3)

    def test_check_prop5__corner_should_be_group_region_member(self):
        a = 0.75 - math.sqrt(30) / 8
        res = check_prop5(a, 0.125, a, tol=1e-9)
        ch = make_example(4)
        rates = (res.values['C_star'] - 1e-7, Z4_CAPACITY - 1e-7, Z4_CAPACITY - 1e-7)

        verdict = member(RegionKind.alpha_g_3to1, z4_test_channel(ch, ch.budgets[0]), rates)

        assert verdict.feasible

    def test_check_prop5__if_noise_free_user1__should_vanish(self):
        res = check_prop5(0, 0.125, 0)

        assert res.values['beta'] == 0
        assert res.values['C_star'] == 0


class TestExamples7And8:
    def test_check_example7__published_point__should_hold(self):
        res = check_example7(0.1284, 0.1, 0.2210)

        assert res['alignment'].holds
        assert res['closed_form'].holds
        assert res.classification == 'ptp_capacity'

    @pytest.mark.parametrize('params', ((0.1, 0.01, 0.2), (0.3, 0.05, 0.4)))
    @pytest.mark.parametrize('term', ('A', 'B', 'C', 'D', 'D2'))
    def test_example8_terms__numeric_should_match_closed_form(self, params, term):
        res = example8_terms(*params)

        assert res['numeric'][term] == pytest.approx(res['closed'][term], abs=1e-9)

    def test_example8_corners__first_point__should_follow_closed_forms(self):
        c = example8_terms(0.3, 0.05, 0.4)['closed']

        first, _ = example8_corners(0.3, 0.05, 0.4)

        assert first == pytest.approx((c['C'], max(0, min(c['A'], c['D'])), max(0, min(c['A'], c['B']))), abs=1e-9)

    def test_example8_corners__if_tau_zero__should_be_zero(self):
        first, second = example8_corners(0, 0.01, 0.2)

        assert first == pytest.approx((0, 0, 0), abs=1e-12)
        assert second == pytest.approx((0, 0, 0), abs=1e-12)
