__all__ = [
    'RegionKind',
    'Relation',
    'Membership',
    'ErrorClass',
    'DecodingRule',
    'EXIT_CODES'
]
from enum import Enum

from .common import DocDict


class RegionKind(Enum):
    """Rate region a test channel is evaluated against"""
    beta = 'beta'
    alpha_u = 'alpha_u'
    alpha_f_3to1 = 'alpha_f_3to1'
    alpha_f = 'alpha_f'
    alpha_g_3to1 = 'alpha_g_3to1'
    alpha_uf = 'alpha_uf'

    @property
    def is_polytope(self) -> bool:
        """Whether the region is given directly as half-spaces in the
        rates. Other kinds are decided by LP feasibility over auxiliary
        code parameters
        """
        return self not in (RegionKind.alpha_f, RegionKind.alpha_uf)


class Relation(Enum):
    """Relation of a linear constraint `coeffs·x REL rhs`"""
    lt = '<'
    le = '<='
    eq = '='

    @property
    def strict(self) -> bool:
        return self is Relation.lt

    def combine(self, other: 'Relation') -> 'Relation':
        """Relation of a positive combination of two constraints"""
        if Relation.lt in (self, other):
            return Relation.lt
        if self is Relation.eq and other is Relation.eq:
            return Relation.eq
        return Relation.le


class Membership(Enum):
    """Verdict of a membership query. Boundary points belong to the
    closure of the region but not to the open region itself
    """
    interior = 'interior'
    boundary = 'boundary'
    outside = 'outside'

    @property
    def feasible(self) -> bool:
        """Point lies in the closure"""
        return self is not Membership.outside


class ErrorClass(Enum):
    """Error events counted by the simulator. Classes may overlap in a
    single trial
    """
    list_empty_2 = 'list_empty_2'
    list_empty_3 = 'list_empty_3'
    atypical_1 = 'atypical_1'
    atypical_2 = 'atypical_2'
    atypical_3 = 'atypical_3'
    decode_1 = 'decode_1'
    decode_2 = 'decode_2'
    decode_3 = 'decode_3'


class DecodingRule(Enum):
    """How the simulated receivers pick a message. `typical` accepts the
    unique candidate jointly typical with the output; `likelihood` takes
    the candidate of highest probability under the target pmf, ties
    between different messages counting as ambiguity
    """
    typical = 'typical'
    likelihood = 'likelihood'


EXIT_CODES = DocDict({
    0: 'Success',
    2: 'Input could not be parsed or lies outside the allowed domain',
    3: 'Test channel does not satisfy the region definition',
    4: 'No feasible test channel under the cost budgets',
})
