import itertools
import math

import numpy as np
import pytest

from pccregions.algebra import (
    SUPPORTED_FIELD_ORDERS, FieldSpec, AbelianGroupSpec, ThetaVector, WeightVector, field_make, parse_algebra,
    theta_map, theta_set, subgroup_H, omega, factorize, is_prime
)
from pccregions.exceptions import ConfigurationError, DomainError, ParseError


@pytest.fixture
def z2_z8_z3():
    return AbelianGroupSpec([(2, 1, 1), (2, 3, 1), (3, 1, 1)])


class TestFieldSpec:
    @pytest.mark.parametrize('order', SUPPORTED_FIELD_ORDERS)
    def test_field_axioms__should_hold_by_exhaustive_scan(self, order):
        f = field_make(order)
        a, b, c = np.meshgrid(np.arange(order), np.arange(order), np.arange(order), indexing='ij')

        assert np.array_equal(f.add(f.add(a, b), c), f.add(a, f.add(b, c)))
        assert np.array_equal(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)))
        assert np.array_equal(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)))
        assert np.array_equal(f.add(a, b), f.add(b, a))
        assert np.array_equal(f.mul(a, b), f.mul(b, a))

    @pytest.mark.parametrize('order', SUPPORTED_FIELD_ORDERS)
    def test_field_inverses__should_exist(self, order):
        f = field_make(order)
        elements = np.arange(order)

        assert np.all(f.add(elements, f.neg(elements)) == 0)
        assert all(f.mul(a, f.inv(a)) == 1 for a in range(1, order))
        assert np.all(f.add(elements, 0) == elements)
        assert np.all(f.mul(elements, 1) == elements)

    @pytest.mark.parametrize('order', (1, 6, 10, 12, 25, 32))
    def test_field_make__if_order_unsupported__should_raise_error(self, order):
        with pytest.raises(ConfigurationError):
            field_make(order)

    def test_init__if_polynomial_reducible__should_raise_error(self):
        with pytest.raises(ConfigurationError):
            FieldSpec(2, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2

    def test_inv__if_zero__should_raise_error(self):
        with pytest.raises(DomainError):
            field_make(7).inv(0)

    @pytest.mark.parametrize('order', (7, 8))
    def test_matmul__should_be_linear(self, order):
        f = field_make(order)
        rng = np.random.default_rng(1)
        g = rng.integers(0, order, (3, 5))
        a, b = rng.integers(0, order, (2, 3))

        assert np.array_equal(f.matmul(f.vector_add(a, b), g), f.vector_add(f.matmul(a, g), f.matmul(b, g)))

    def test_subtraction__should_invert_addition(self):
        f = field_make(9)
        a, b = np.meshgrid(np.arange(9), np.arange(9), indexing='ij')

        assert np.array_equal(f.sub(f.add(a, b), b), a)


class TestAbelianGroupSpec:
    def test_init__should_sort_and_merge_components(self):
        obj = AbelianGroupSpec([(3, 1, 1), (2, 3, 1), (2, 1, 1), (2, 1, 1)])

        assert obj.components == ((2, 1, 2), (2, 3, 1), (3, 1, 1))
        assert obj.order == 2 * 2 * 8 * 3
        assert obj.q_set == ((2, 1), (2, 3), (3, 1))

    @pytest.mark.parametrize('n,components', (
        (4, ((2, 2, 1), )),
        (6, ((2, 1, 1), (3, 1, 1))),
        (12, ((2, 2, 1), (3, 1, 1))),
    ))
    def test_cyclic__should_decompose_into_sylow_components(self, n, components):
        obj = AbelianGroupSpec.cyclic(n)

        assert obj.components == components
        assert obj.order == n
        assert obj.is_cyclic

    def test_group_axioms__should_hold_by_exhaustive_scan(self, z2_z8_z3):
        g = z2_z8_z3
        a, b, c = np.meshgrid(*[np.arange(g.order)] * 3, indexing='ij')

        assert np.array_equal(g.add(g.add(a, b), c), g.add(a, g.add(b, c)))
        assert np.array_equal(g.add(a, b), g.add(b, a))
        assert np.all(g.add(np.arange(g.order), 0) == np.arange(g.order))
        assert all(0 in g.add_table[x] for x in range(g.order))

    def test_residues__should_invert_index_of(self, z2_z8_z3):
        indices = np.arange(z2_z8_z3.order)

        assert np.array_equal(z2_z8_z3.index_of(z2_z8_z3.residues(indices)), indices)

    def test_init__if_component_is_not_prime_power__should_raise_error(self):
        with pytest.raises(ConfigurationError):
            AbelianGroupSpec([(4, 1, 1)])

    def test_is_prime_field(self):
        assert AbelianGroupSpec.cyclic(5).is_prime_field
        assert not AbelianGroupSpec.cyclic(4).is_prime_field


class TestTheta:
    def test_theta_set__should_list_twelve_vectors(self, z2_z8_z3):
        expect = [
            (0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 2, 0), (0, 2, 1),
            (1, 1, 0), (1, 1, 1), (1, 2, 0), (1, 2, 1), (1, 3, 0), (1, 3, 1),
        ]

        res = theta_set(z2_z8_z3)

        assert [t.data for t in res] == expect
        assert all(isinstance(t, ThetaVector) for t in res)

    def test_subgroup_H__should_return_sizes(self, z2_z8_z3):
        res = subgroup_H(z2_z8_z3, (1, 1, 0))

        assert res.order == 12
        assert res.index == 4
        assert len(res.members) == 12
        assert sorted(set(res.labels.tolist())) == [0, 1, 2, 3]

    def test_subgroup_H__should_be_closed_under_addition(self, z2_z8_z3):
        members = subgroup_H(z2_z8_z3, (1, 2, 1)).members

        sums = z2_z8_z3.add(members[:, None], members[None, :])

        assert set(sums.ravel().tolist()) <= set(members.tolist())

    def test_subgroup_H__if_theta_not_in_set__should_raise_error(self, z2_z8_z3):
        with pytest.raises(DomainError):
            subgroup_H(z2_z8_z3, (1, 0, 0))

    def test_theta_map__if_hat_out_of_range__should_raise_error(self, z2_z8_z3):
        with pytest.raises(DomainError):
            theta_map(z2_z8_z3, (2, 0, 0))

    def test_theta_map__should_accept_mapping(self, z2_z8_z3):
        res = theta_map(z2_z8_z3, {(2, 1): 0, (2, 3): 3, (3, 1): 1})

        assert res == (0, 2, 1)

    @pytest.mark.parametrize('theta,expect', (
        ((0, 0, 0), 0.0),
        ((1, 3, 1), 1.0),
        ((0, 2, 0), 2 / (1 + 3 + math.log2(3))),
    ))
    def test_omega__should_weight_log_sizes(self, z2_z8_z3, theta, expect):
        w = WeightVector([1 / 3, 1 / 3, 1 / 3])

        assert omega(z2_z8_z3, theta, w) == pytest.approx(expect, abs=1e-12)

    def test_weight_vector__if_not_pmf__should_raise_error(self):
        with pytest.raises(DomainError):
            WeightVector([0.5, 0.6])


class TestParseAlgebra:
    @pytest.mark.parametrize('value,expect', (
        ('F7', FieldSpec(7)),
        ('F8', FieldSpec(2, 3)),
        ({'field': 4}, FieldSpec(2, 2)),
        ({'field': {'p': 3, 'm': 2}}, FieldSpec(3, 2)),
        ('Z4', AbelianGroupSpec([(2, 2, 1)])),
        ({'group': [{'p': 2, 'r': 1, 'multiplicity': 2}]}, AbelianGroupSpec([(2, 1, 2)])),
    ))
    def test_parse_algebra__should_build_algebra(self, value, expect):
        assert parse_algebra(value) == expect

    @pytest.mark.parametrize('value', ('G4', 'F', 'Fx', 7, {'ring': 4}, {'group': [{'p': 2}]}))
    def test_parse_algebra__if_malformed__should_raise_error(self, value):
        with pytest.raises(ParseError):
            parse_algebra(value)


@pytest.mark.parametrize('n,expect', ((2, [(2, 1)]), (12, [(2, 2), (3, 1)]), (49, [(7, 2)]), (97, [(97, 1)])))
def test_factorize(n, expect):
    assert factorize(n) == expect
    assert is_prime(n) == (expect == [(n, 1)])
