import pytest

from pccregions.exceptions import (
    PCCError, ParseError, DomainError, ConfigurationError, CertificationError, InfeasibilityError
)


class TestPCCError:
    def test_init__should_initialize_right_parameters(self):
        obj = PCCError('my message', 4)

        assert obj.msg == 'my message'
        assert obj.err == 4

    @pytest.mark.parametrize('err,description', (
        (0, 'error 0: Success'),
        (2, 'error 2: Input could not be parsed or lies outside the allowed domain'),
        (3, 'error 3: Test channel does not satisfy the region definition'),
        (4, 'error 4: No feasible test channel under the cost budgets'),
        (100500, 'Unknown error 100500'),
    ))
    def test_str__should_return_error_description_and_message(self, err, description):
        expect = 'my message: {}'.format(description)
        obj = PCCError('my message', err)

        assert str(obj) == expect

    @pytest.mark.parametrize('exc_class,expect_err', (
        (ParseError, 2),
        (DomainError, 2),
        (ConfigurationError, 2),
        (InfeasibilityError, 4),
    ))
    def test_init__if_err_omitted__should_use_class_exit_code(self, exc_class, expect_err):
        obj = exc_class('my message')

        assert obj.err == expect_err
        assert isinstance(obj, PCCError)

    @pytest.mark.parametrize('exc_class', (DomainError, ConfigurationError))
    def test_domain_errors__should_be_value_errors(self, exc_class):
        assert issubclass(exc_class, ValueError)


class TestCertificationError:
    def test_init__should_name_violated_condition(self):
        obj = CertificationError('independence', 'U2 and U3 are correlated')

        assert obj.condition == 'independence'
        assert obj.err == 3
        assert str(obj) == 'condition "independence" violated (U2 and U3 are correlated): ' \
                           'error 3: Test channel does not satisfy the region definition'

    def test_init__if_no_detail__should_omit_parentheses(self):
        obj = CertificationError('cost')

        assert obj.msg == 'condition "cost" violated'
