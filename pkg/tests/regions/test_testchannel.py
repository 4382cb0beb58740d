import numpy as np
import pytest

from pccregions.algebra import AbelianGroupSpec, field_make
from pccregions.channels import make_example
from pccregions.enums import RegionKind
from pccregions.exceptions import CertificationError, DomainError, ParseError
from pccregions.info import JointPmf, entropy
from pccregions.regions.testchannel import (
    LAYOUTS, TestChannel, identity_test_channel, degenerate_test_channel, ternary_or_test_channel,
    z4_test_channel, six_auxiliary_test_channel, receiver_pair, own_components
)


class TestTestChannel:
    def test_from_factors__should_build_layout_axes(self, binary_test_channel):
        tc = binary_test_channel

        assert tc.pmf.axes == ('Q', 'U2', 'U3', 'X1', 'X2', 'X3', 'Y1', 'Y2', 'Y3')
        assert tc.theta('U2') == 2
        assert tc.pmf.probs.sum() == pytest.approx(1)

    def test_from_factors__if_factor_not_pmf__should_raise_error(self, example1):
        with pytest.raises(DomainError):
            TestChannel.from_factors(example1, [
                np.array([[0.5, 0.6]]), np.full((1, 2, 2), 0.25), np.full((1, 2, 2), 0.25)
            ])

    def test_from_factors__if_factor_shape_mismatch__should_raise_error(self, example1):
        with pytest.raises(DomainError):
            TestChannel.from_factors(example1, [
                np.array([[0.5, 0.5]]), np.full((1, 4), 0.25), np.full((1, 2, 2), 0.25)
            ])

    def test_init__if_algebra_order_mismatch__should_raise_error(self, binary_test_channel):
        tc = binary_test_channel

        with pytest.raises(DomainError):
            TestChannel(tc.pmf, tc.channel, '3to1', {'U2': field_make(3)})

    def test_init__if_algebra_on_input_axis__should_raise_error(self, binary_test_channel):
        tc = binary_test_channel

        with pytest.raises(DomainError):
            TestChannel(tc.pmf, tc.channel, '3to1', {'X1': field_make(2)})

    def test_derived__should_append_sum_of_auxiliaries(self, binary_test_channel):
        pmf = binary_test_channel.derived

        assert pmf.axes[-1] == 'Z'
        assert entropy(pmf, 'Z') == pytest.approx(1)
        assert np.allclose(pmf.marginal(('U2', 'U3', 'Z')).probs[1, 1], [0.25, 0])

    @pytest.mark.parametrize('kind', (RegionKind.alpha_u, RegionKind.alpha_f_3to1))
    def test_certify__if_admissible__should_return_self(self, binary_test_channel, kind):
        assert binary_test_channel.certify(kind) is binary_test_channel

    def test_certify__if_group_region_on_field__should_raise_error(self, binary_test_channel):
        with pytest.raises(CertificationError) as e:
            binary_test_channel.certify(RegionKind.alpha_g_3to1)

        assert e.value.condition == 'common group'
        assert e.value.err == 3

    @pytest.mark.parametrize('kind', (RegionKind.beta, RegionKind.alpha_f, RegionKind.alpha_uf))
    def test_certify__if_layout_mismatch__should_raise_error(self, binary_test_channel, kind):
        with pytest.raises(CertificationError) as e:
            binary_test_channel.certify(kind)

        assert e.value.condition == 'kind/algebra mismatch'

    def test_certify__if_cost_exceeds_budget__should_name_user(self, example1):
        tc = identity_test_channel(example1, ([0.5, 0.5], [0.5, 0.5], [0.5, 0.5]))

        with pytest.raises(CertificationError) as e:
            tc.certify(RegionKind.alpha_f_3to1)

        assert e.value.condition == 'cost budget of user 1'

    def test_certify__if_users_correlated__should_raise_error(self, binary_test_channel):
        tc = binary_test_channel
        inputs = tc.pmf.marginal(('Q', 'U2', 'U3', 'X1', 'X2', 'X3')).probs.copy()
        # move mass so that U2 = U3 always
        inputs[0, 0, 1] = 0
        inputs[0, 1, 0] = 0
        inputs /= inputs.sum()
        probs = inputs[..., None, None, None] * tc.channel.W[None, None, None]
        pmf = JointPmf(tc.pmf.axes, probs)

        with pytest.raises(CertificationError) as e:
            TestChannel(pmf, tc.channel, '3to1', tc.algebras).certify(RegionKind.alpha_f_3to1)

        assert e.value.condition == 'conditional independence'

    def test_certify__if_outputs_inconsistent__should_raise_error(self, binary_test_channel):
        tc = binary_test_channel
        other = make_example(1, delta1=0.2, delta2=0.15, delta3=0.15, tau=0.125)
        inputs = tc.pmf.probs.sum(axis=(-3, -2, -1))
        pmf = JointPmf(tc.pmf.axes, inputs[..., None, None, None] * other.W)

        with pytest.raises(CertificationError) as e:
            TestChannel(pmf, tc.channel, '3to1', tc.algebras).certify(RegionKind.alpha_f_3to1)

        assert e.value.condition == 'channel consistency'

    def test_certify__if_fields_differ__should_raise_error(self, example1):
        factors = [np.array([[0.9, 0.1]]), np.full((1, 2, 2), 0.25), np.full((1, 2, 2), 0.25)]
        tc = TestChannel.from_factors(example1, factors, algebras={'U2': field_make(2),
                                                                   'U3': AbelianGroupSpec.cyclic(2)})

        with pytest.raises(CertificationError) as e:
            tc.certify(RegionKind.alpha_f_3to1)

        assert e.value.condition == 'common finite field'

    def test_to_json__should_restore_same_test_channel(self, binary_test_channel):
        tc = binary_test_channel

        res = TestChannel.from_json(tc.to_json(), tc.channel)

        assert res.pmf.axes == tc.pmf.axes
        assert np.allclose(res.pmf.probs, tc.pmf.probs)
        assert res.algebras == tc.algebras

    def test_from_json__should_accept_factors(self, example1):
        data = {
            'factors': [[[0.9, 0.1]], [[[0.25, 0.25], [0.25, 0.25]]], [[[0.25, 0.25], [0.25, 0.25]]]],
            'algebras': {'U2': 'F2', 'U3': 'F2'},
        }

        res = TestChannel.from_json(data, example1)

        assert res.algebras['U2'] == field_make(2)
        assert res.pmf.marginal('X1').probs == pytest.approx([0.9, 0.1])

    def test_from_json__if_probs_missing__should_raise_error(self, example1):
        with pytest.raises(ParseError):
            TestChannel.from_json({'layout': '3to1'}, example1)


class TestBuilders:
    def test_degenerate_test_channel__should_fix_auxiliaries(self, example1):
        tc = degenerate_test_channel(example1, ([0.9, 0.1], [0.5, 0.5], [0.5, 0.5]))

        assert entropy(tc.pmf, 'U2') == pytest.approx(0, abs=1e-12)
        assert tc.certify(RegionKind.alpha_f_3to1)

    @pytest.mark.parametrize('layout,kind', (('uf', RegionKind.alpha_uf), ('general', RegionKind.alpha_f)))
    def test_degenerate_test_channel__should_fit_layout(self, example1, layout, kind):
        tc = degenerate_test_channel(example1, ([0.9, 0.1], [0.5, 0.5], [0.5, 0.5]), layout)

        assert tc.layout is LAYOUTS[layout]
        assert tc.certify(kind)

    def test_ternary_or_test_channel__should_embed_binary_inputs_in_f3(self):
        ch = make_example(2)

        tc = ternary_or_test_channel(ch, 1 / 90, 0.15)

        assert tc.theta('U2') == 3
        assert tc.derived.marginal('Z').probs[2] == pytest.approx(0.15 ** 2)
        assert tc.certify(RegionKind.alpha_f_3to1)

    def test_z4_test_channel__should_satisfy_group_condition(self):
        ch = make_example(4)

        tc = z4_test_channel(ch, ch.budgets[0])

        assert tc.certify(RegionKind.alpha_g_3to1)
        assert tc.group_margin(2) > 1

    def test_six_auxiliary_test_channel__should_define_all_sums(self, example1):
        tc = six_auxiliary_test_channel(example1, ([0.9, 0.1], [0.5, 0.5], [0.5, 0.5]))

        assert {'Z1', 'Z2', 'Z3'} <= set(tc.derived.axes)
        assert tc.certify(RegionKind.alpha_f)


@pytest.mark.parametrize('j,pair,own', (
    (1, ('U21', 'U31'), ('U12', 'U13')),
    (2, ('U12', 'U32'), ('U21', 'U23')),
    (3, ('U13', 'U23'), ('U31', 'U32')),
))
def test_component_names(j, pair, own):
    assert receiver_pair(j) == pair
    assert own_components(j) == own
