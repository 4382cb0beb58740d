import itertools
import math

import numpy as np
import pytest

from pccregions.algebra import AbelianGroupSpec, WeightVector
from pccregions.exceptions import DomainError
from pccregions.info import (
    JointPmf, QuotientVariable, entropy, conditional_entropy, mutual_information, binary_entropy, binary_convolve,
    group_source_info, group_channel_info, channel_capacity, check_probability
)


def _brute_entropy(probs):
    return -sum(p * math.log2(p) for p in np.ravel(probs) if p > 0)


def _brute_mi(probs):
    """I(A;B|C) by direct summation over a 3-axis tensor"""
    pc = probs.sum(axis=(0, 1))
    pac = probs.sum(axis=1)
    pbc = probs.sum(axis=0)
    res = 0.0
    for a, b, c in itertools.product(*[range(s) for s in probs.shape]):
        p = probs[a, b, c]
        if p > 0:
            res += p * math.log2(p * pc[c] / (pac[a, c] * pbc[b, c]))
    return res


def _symmetric_z4_pmf(delta):
    """Uniform X over Z4 through Y = X + N, N = 0 w.p. 1-δ, else uniform"""
    noise = np.array([1 - delta, delta / 3, delta / 3, delta / 3])
    probs = np.array([[0.25 * noise[(y - x) % 4] for y in range(4)] for x in range(4)])
    return JointPmf(('X', 'Y'), probs)


@pytest.fixture(params=range(20))
def random_pmf(request):
    rng = np.random.default_rng(request.param)
    shape = tuple(rng.integers(2, 5, 3))
    probs = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    if request.param % 3 == 0:
        probs.ravel()[rng.integers(0, probs.size, 2)] = 0
        probs /= probs.sum()
    return JointPmf(('A', 'B', 'C'), probs)


class TestJointPmf:
    def test_init__if_mass_is_not_one__should_raise_error(self):
        with pytest.raises(DomainError):
            JointPmf(('X', ), [0.5, 0.4])

    def test_init__if_negative_entry__should_raise_error(self):
        with pytest.raises(DomainError):
            JointPmf(('X', ), [1.5, -0.5])

    def test_init__if_duplicate_axes__should_raise_error(self):
        with pytest.raises(DomainError):
            JointPmf(('X', 'X'), np.full((2, 2), 0.25))

    def test_init__if_dimensions_mismatch__should_raise_error(self):
        with pytest.raises(DomainError):
            JointPmf(('X', 'Y'), [0.5, 0.5])

    def test_probs__should_be_read_only(self):
        obj = JointPmf(('X', ), [0.5, 0.5])

        with pytest.raises(ValueError):
            obj.probs[0] = 1.0

    def test_marginal__should_follow_requested_order(self, random_pmf):
        res = random_pmf.marginal(('C', 'A'))

        assert res.axes == ('C', 'A')
        assert np.allclose(res.probs, random_pmf.probs.sum(axis=1).T)

    def test_marginal__if_unknown_axis__should_raise_error(self, random_pmf):
        with pytest.raises(DomainError):
            random_pmf.marginal('Z')

    def test_apply__should_append_function_of_sources(self):
        pmf = JointPmf(('X', 'Y'), np.full((2, 2), 0.25))

        res = pmf.apply('S', ('X', 'Y'), lambda x, y: (x + y) % 2, 2)

        assert res.axes == ('X', 'Y', 'S')
        assert np.allclose(res.marginal('S').probs, [0.5, 0.5])
        assert res.probs[1, 1, 0] == pytest.approx(0.25)
        assert res.probs[1, 1, 1] == 0

    def test_apply__if_values_out_of_range__should_raise_error(self):
        pmf = JointPmf(('X', ), [0.5, 0.5])

        with pytest.raises(DomainError):
            pmf.apply('S', 'X', lambda x: x + 1, 2)

    def test_condition_on__if_zero_probability__should_return_none(self):
        pmf = JointPmf(('X', 'Y'), [[0.5, 0.5], [0, 0]])

        assert pmf.condition_on({'X': 1}) is None
        assert np.allclose(pmf.condition_on({'X': 0}).probs, [0.5, 0.5])

    def test_relabel__should_move_mass(self):
        pmf = JointPmf(('X', ), [0.7, 0.2, 0.1])

        res = pmf.relabel('X', [2, 0, 1])

        assert np.allclose(res.probs, [0.2, 0.1, 0.7])

    def test_product__should_be_independent_joint(self):
        res = JointPmf.product(JointPmf.from_vector('X', [0.3, 0.7]), JointPmf.from_vector('Y', [0.5, 0.5]))

        assert res.axes == ('X', 'Y')
        assert mutual_information(res, 'X', 'Y') == pytest.approx(0, abs=1e-12)


class TestEntropy:
    def test_entropy__should_match_brute_force(self, random_pmf):
        assert entropy(random_pmf, ('A', 'B', 'C')) == pytest.approx(_brute_entropy(random_pmf.probs), abs=1e-12)
        assert entropy(random_pmf, 'B') == pytest.approx(
            _brute_entropy(random_pmf.probs.sum(axis=(0, 2))), abs=1e-12
        )

    def test_conditional_entropy__should_match_chain_rule(self, random_pmf):
        expect = _brute_entropy(random_pmf.probs) - _brute_entropy(random_pmf.probs.sum(axis=(0, 1)))

        assert conditional_entropy(random_pmf, ('A', 'B'), 'C') == pytest.approx(expect, abs=1e-12)

    def test_mutual_information__should_match_brute_force(self, random_pmf):
        expect = _brute_mi(random_pmf.probs)

        assert mutual_information(random_pmf, 'A', 'B', 'C') == pytest.approx(max(expect, 0), abs=1e-12)

    def test_mutual_information__should_be_symmetric(self, random_pmf):
        assert mutual_information(random_pmf, 'A', ('B', 'C')) == pytest.approx(
            mutual_information(random_pmf, ('B', 'C'), 'A'), abs=1e-12
        )

    def test_mutual_information__if_axes_overlap__should_raise_error(self, random_pmf):
        with pytest.raises(DomainError):
            mutual_information(random_pmf, ('A', 'B'), 'B')

    def test_entropy__if_no_axes__should_raise_error(self, random_pmf):
        with pytest.raises(DomainError):
            entropy(random_pmf, ())


class TestBinary:
    def test_binary_convolve__should_match_window_endpoint(self):
        assert binary_convolve(1 / 8, 0.01) == pytest.approx(0.1325, abs=1e-12)

    @pytest.mark.parametrize('p,expect', ((0, 0.0), (1, 0.0), (0.5, 1.0), (0.11, 0.499916)))
    def test_binary_entropy(self, p, expect):
        assert binary_entropy(p) == pytest.approx(expect, abs=1e-6)

    @pytest.mark.parametrize('p', (-0.1, 1.1, float('nan')))
    def test_check_probability__if_out_of_range__should_raise_error(self, p):
        with pytest.raises(DomainError):
            check_probability(p)


class TestGroupInformation:
    @pytest.mark.parametrize('p', (2, 3, 5, 7))
    @pytest.mark.parametrize('seed', range(5))
    def test_prime_group__should_collapse_to_mutual_information(self, p, seed):
        rng = np.random.default_rng(seed)
        pmf = JointPmf(('X', 'Y'), rng.dirichlet(np.ones(p * 3)).reshape(p, 3))
        group = AbelianGroupSpec.cyclic(p)
        mi = mutual_information(pmf, 'X', 'Y')

        assert group_source_info(pmf, 'X', 'Y', group) == pytest.approx(mi, abs=1e-10)
        assert group_channel_info(pmf, 'X', 'Y', group) == pytest.approx(mi, abs=1e-10)

    def test_group_channel_info__z4_symmetric_noise__should_match_closed_form(self):
        delta = 1 / 8
        expect = 2 - binary_entropy(delta) - delta * math.log2(3)

        res = group_channel_info(_symmetric_z4_pmf(delta), 'X', 'Y', AbelianGroupSpec.cyclic(4))

        assert expect == pytest.approx(1.2583, abs=1e-3)
        assert res == pytest.approx(expect, abs=1e-9)

    def test_group_channel_info__should_not_exceed_mutual_information(self):
        pmf = _symmetric_z4_pmf(0.3)

        res = group_channel_info(pmf, 'X', 'Y', AbelianGroupSpec.cyclic(4))

        assert res <= mutual_information(pmf, 'X', 'Y') + 1e-12

    def test_group_source_info__if_constant_observation__should_use_empty_axes(self):
        pmf = JointPmf(('X', ), [0.25] * 4)

        res = group_source_info(pmf, 'X', (), AbelianGroupSpec.cyclic(4))

        assert res == pytest.approx(0, abs=1e-12)

    def test_group_info__if_alphabet_is_not_group__should_raise_error(self):
        pmf = JointPmf(('X', 'Y'), np.full((3, 2), 1 / 6))

        with pytest.raises(DomainError):
            group_channel_info(pmf, 'X', 'Y', AbelianGroupSpec.cyclic(4))

    def test_group_info__conditional__should_average_over_given(self):
        inner = _symmetric_z4_pmf(0.1).probs
        probs = np.stack([0.4 * inner, 0.6 * inner])
        pmf = JointPmf(('Q', 'X', 'Y'), probs)
        group = AbelianGroupSpec.cyclic(4)

        res = group_channel_info(pmf, 'X', 'Y', group, WeightVector([1.0]), given='Q')

        assert res == pytest.approx(group_channel_info(_symmetric_z4_pmf(0.1), 'X', 'Y', group), abs=1e-12)

    def test_quotient_variable__should_push_forward_coset_labels(self):
        group = AbelianGroupSpec.cyclic(4)
        pmf = JointPmf(('X', ), [0.1, 0.2, 0.3, 0.4])

        res = QuotientVariable('X', group, (1, )).pushforward(pmf, 'L')

        assert np.allclose(res.marginal('L').probs, [0.4, 0.6])


class TestChannelCapacity:
    @pytest.mark.parametrize('delta', (0.01, 0.1, 0.25))
    def test_channel_capacity__bsc__should_be_one_minus_entropy(self, delta):
        w = [[1 - delta, delta], [delta, 1 - delta]]

        cap, p = channel_capacity(w)

        assert cap == pytest.approx(1 - binary_entropy(delta), abs=1e-8)
        assert np.allclose(p, [0.5, 0.5], atol=1e-4)

    @pytest.mark.parametrize('tau', (0.05, 0.125, 0.3))
    def test_channel_capacity__cost_constrained_bsc__should_meet_budget(self, tau):
        delta = 0.01
        w = [[1 - delta, delta], [delta, 1 - delta]]

        cap, p = channel_capacity(w, costs=[0, 1], budget=tau)

        assert p[1] == pytest.approx(tau, abs=1e-4)
        assert cap == pytest.approx(binary_entropy(binary_convolve(tau, delta)) - binary_entropy(delta), abs=1e-5)

    def test_channel_capacity__if_budget_below_cheapest_cost__should_raise_error(self):
        with pytest.raises(DomainError):
            channel_capacity([[1, 0], [0, 1]], costs=[1, 2], budget=0.5)

    def test_channel_capacity__if_rows_not_pmfs__should_raise_error(self):
        with pytest.raises(DomainError):
            channel_capacity([[0.5, 0.6], [0, 1]])
