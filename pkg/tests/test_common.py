from copy import copy, deepcopy

import pytest

from pccregions.common import DocValue, DocDict, UserTuple, format_float, derive_seed


class TestDocValue:
    @pytest.mark.parametrize('init_val', (123, '321'))
    def test_init__should_set_value_and_doc(self, init_val):
        docstr = 'test doc'

        obj = DocValue(init_val, docstr)

        assert obj.value is init_val
        assert obj.doc == docstr

    @pytest.mark.parametrize('init_val', (123, '321'))
    def test_object_interface__should_act_as_initial_value(self, init_val):
        obj = DocValue(init_val, 'test doc')

        assert obj == init_val
        assert isinstance(obj, init_val.__class__)
        assert repr(obj) == repr(init_val)

    @pytest.mark.parametrize('init_val', (None, (), [], object, type))
    def test_init__if_wrong_value_type_was_passed__should_raise_error(self, init_val):
        with pytest.raises(TypeError):
            DocValue(init_val, 'doc')  # noqa

    @pytest.mark.parametrize('copy_func', (copy, deepcopy))
    def test_copy__should_return_different_object(self, copy_func):
        obj = DocValue(2, 'test doc')

        copied = copy_func(obj)

        assert copied.value == 2
        assert copied.doc == 'test doc'
        assert copied is not obj


class TestDocDict:
    def test_init__should_get_initialized_by_docvalue_documented_instances(self):
        obj = DocDict({0: 'Success', 2: 'Parse error'})

        assert obj[2] == 2
        assert obj[2].__doc__ == 'Parse error'
        assert type(obj[2]) == DocValue
        assert obj.keys() == {0, 2}


class TestUserTuple:
    def test_comparison__should_compare_with_plain_tuples(self):
        obj = UserTuple([1, 2, 0])

        assert obj == (1, 2, 0)
        assert obj < (1, 3, 0)
        assert obj >= UserTuple((1, 2, 0))

    def test_hash__should_match_equal_objects(self):
        assert len({UserTuple([0, 1]), UserTuple((0, 1))}) == 1

    def test_getitem__if_slice__should_return_same_class(self):
        class Child(UserTuple):
            pass

        obj = Child((1, 2, 3))

        assert type(obj[1:]) == Child
        assert obj[1:] == (2, 3)
        assert obj[0] == 1


class TestFormatFloat:
    @pytest.mark.parametrize('value,expect', (
        (1 / 3, '0.3333333333'),
        (0.1325, '0.1325'),
        (2.0, '2'),
        (123456789.123456, '123456789.1'),
        (1e-12, '1e-12'),
    ))
    def test_format_float__should_keep_ten_significant_digits(self, value, expect):
        assert format_float(value) == expect


class TestDeriveSeed:
    def test_derive_seed__should_be_deterministic(self):
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)

    def test_derive_seed__if_keys_differ__should_give_different_seeds(self):
        seeds = {derive_seed(7, k) for k in range(100)}

        assert len(seeds) == 100
        assert derive_seed(7, 0) != derive_seed(8, 0)
