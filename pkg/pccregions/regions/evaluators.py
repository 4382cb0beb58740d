__all__ = [
    'DEFAULT_SLACK',
    'AUX_VARIABLES',
    'AuxRateVector',
    'beta_outer',
    'alpha_u_3to1',
    'alpha_f_3to1',
    'alpha_f_3to1_params',
    'alpha_g_3to1',
    'alpha_g_3to1_params',
    'alpha_f_general_system',
    'alpha_f_general_member',
    'alpha_uf_3to1_system',
    'alpha_uf_3to1_member',
    'evaluate',
    'member',
    'support'
]
import itertools
import math
from typing import Sequence, Mapping, Optional, Dict, Tuple, Union

from ..algebra import AbelianGroupSpec, WeightVector
from ..enums import RegionKind, Relation
from ..exceptions import DomainError
from ..info import (
    binary_entropy, binary_convolve, conditional_entropy as H, mutual_information as I,
    group_channel_info, group_source_info
)
from .polytope import EPSILON, RATE_VARIABLES, LinearSystem, RatePolytope, MembershipVerdict
from .testchannel import TestChannel, receiver_pair, own_components

DEFAULT_SLACK = 1e-9

AUX_VARIABLES = {
    RegionKind.alpha_f_3to1: ('S2', 'T2', 'K2', 'L2', 'S3', 'T3', 'K3', 'L3'),
    RegionKind.alpha_g_3to1: ('S2', 'T2', 'L2', 'S3', 'T3', 'L3', 'Rg'),
    RegionKind.alpha_f: tuple(
        '{}{}'.format(v, c) for v in 'ST' for c in ('12', '13', '21', '23', '31', '32')
    ) + ('K1', 'K2', 'K3', 'L1', 'L2', 'L3'),
    RegionKind.alpha_uf: ('S21', 'T21', 'S22', 'T22', 'L2', 'S31', 'T31', 'S32', 'T32', 'L3'),
}


class AuxRateVector(dict):
    """Values of the auxiliary code parameters (bits) certifying a rate
    triple, keyed by variable name
    """
    def __init__(self, kind: RegionKind, values: Mapping[str, float]):
        super().__init__((k, float(values[k])) for k in AUX_VARIABLES[kind] if k in values)
        self.kind = kind

    def split_rates(self) -> Dict[str, float]:
        """Rates reassembled from their split parts, for every user
        whose rate is split
        """
        res = {}
        for j in (1, 2, 3):
            parts = [v for k, v in self.items() if k.startswith('T{}'.format(j)) or k == 'L{}'.format(j)]
            if 'L{}'.format(j) in self:
                res['R{}'.format(j)] = sum(parts)
        return res


def _polytope(rows: Sequence[Tuple[Mapping[str, float], float, str]],
              relation: Relation = Relation.lt) -> RatePolytope:
    system = LinearSystem(RATE_VARIABLES).nonnegative()
    for coeffs, rhs, label in rows:
        system = system.constrain(coeffs, relation, rhs, label)
    return RatePolytope.from_system(system)


def _half(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 0.5:
        raise DomainError('{} must be in [0, 1/2], got {}'.format(name, value))
    return value


def beta_outer(tau: Sequence[float], delta: Sequence[float]) -> RatePolytope:
    """Box outer bound R_j ≤ h(δ_j * τ_j) − h(δ_j) for the additive
    binary 3-to-1 channels with Hamming costs
    """
    if len(tau) != 3 or len(delta) != 3:
        raise DomainError('Three budgets and three crossover probabilities expected')
    rows = []
    for j, (t, d) in enumerate(zip(tau, delta), 1):
        t, d = _half(t, 'tau{}'.format(j)), _half(d, 'delta{}'.format(j))
        bound = binary_entropy(binary_convolve(d, t)) - binary_entropy(d)
        rows.append(({'R{}'.format(j): 1}, bound, 'R{} outer bound'.format(j)))
    return _polytope(rows, Relation.le)


def alpha_u_3to1(tc: TestChannel) -> RatePolytope:
    """Region of unstructured superposition coding with binning for a
    3-to-1 test channel
    """
    p = tc.certify(RegionKind.alpha_u).pmf
    rows = [({'R1': 1}, I(p, 'X1', 'Y1', ('Q', 'U2', 'U3')), 'R1')]
    for j, k in ((2, 3), (3, 2)):
        uj, uk, xj, yj = 'U{}'.format(j), 'U{}'.format(k), 'X{}'.format(j), 'Y{}'.format(j)
        rows.append(({'R{}'.format(j): 1}, I(p, (uj, xj), yj, 'Q'), 'R{}'.format(j)))
        rows.append((
            {'R1': 1, 'R{}'.format(j): 1},
            I(p, (uj, 'X1'), 'Y1', ('Q', uk)) + I(p, xj, yj, ('Q', uj)),
            'R1+R{}'.format(j)
        ))
    rows.append((
        {'R1': 1, 'R2': 1, 'R3': 1},
        I(p, ('U2', 'U3', 'X1'), 'Y1', 'Q') + I(p, 'X2', 'Y2', ('Q', 'U2')) + I(p, 'X3', 'Y3', ('Q', 'U3')),
        'R1+R2+R3'
    ))
    return _polytope(rows)


def alpha_f_3to1(tc: TestChannel) -> RatePolytope:
    """Region of partitioned coset codes over a finite field for a
    3-to-1 test channel; receiver 1 decodes Z = U2 ⊕ U3
    """
    p = tc.certify(RegionKind.alpha_f_3to1).derived
    h_z = H(p, 'Z', ('Q', 'Y1'))
    i_1 = I(p, 'X1', ('Z', 'Y1'), 'Q')
    rows = [({'R1': 1}, min(0.0, H(p, 'U2', 'Q') - h_z, H(p, 'U3', 'Q') - h_z) + i_1, 'R1')]
    for j in (2, 3):
        uj, xj, yj = 'U{}'.format(j), 'X{}'.format(j), 'Y{}'.format(j)
        rows.append(({'R{}'.format(j): 1}, I(p, (uj, xj), yj, 'Q'), 'R{}'.format(j)))
        rows.append((
            {'R1': 1, 'R{}'.format(j): 1},
            I(p, xj, yj, ('Q', uj)) + i_1 + H(p, uj, 'Q') - h_z,
            'R1+R{}'.format(j)
        ))
    return _polytope(rows)


def _check_slack(delta: float) -> float:
    if delta <= 0:
        raise DomainError('Slack must be positive, got {}'.format(delta))
    return delta


def _lifted(aux: Sequence[str], rows) -> LinearSystem:
    system = LinearSystem(RATE_VARIABLES + tuple(aux)).nonnegative()
    for coeffs, rel, rhs, label in rows:
        system = system.constrain(coeffs, rel, rhs, label)
    return system


def alpha_f_3to1_params(tc: TestChannel, delta: float = DEFAULT_SLACK) -> LinearSystem:
    """Code-parameter form of the field region before elimination of the
    bin and codebook rates (S_j, T_j, K_j, L_j) with slack `delta`
    """
    _check_slack(delta)
    p = tc.certify(RegionKind.alpha_f_3to1).derived
    log_theta = math.log2(tc.theta('U2'))
    h_x1 = H(p, 'X1', 'Q')
    rows = [({'R1': 1}, Relation.lt, I(p, 'X1', ('Y1', 'Z'), 'Q') - delta, 'R1')]
    for j in (2, 3):
        s, t, k, l, r = ('{}{}'.format(v, j) for v in 'STKLR')
        u, x, y = 'U{}'.format(j), 'X{}'.format(j), 'Y{}'.format(j)
        h_x = H(p, x, 'Q')
        rows += [
            ({r: 1, t: -1, l: -1}, Relation.eq, 0, '{} split'.format(r)),
            ({k: -1}, Relation.lt, -delta, '{} > delta'.format(k)),
            ({t: -1}, Relation.lt, -delta, '{} > delta'.format(t)),
            ({l: -1}, Relation.lt, -delta, '{} > delta'.format(l)),
            ({s: -1, t: 1}, Relation.lt, -(log_theta - H(p, u, 'Q') + delta), 'binning {}'.format(j)),
            ({s: -1, t: 1, k: -1}, Relation.lt, -(log_theta + h_x - H(p, (u, x), 'Q') + delta),
             'superposition {}'.format(j)),
            ({k: 1, l: 1}, Relation.lt, I(p, x, (y, u), 'Q') - delta, 'private {}'.format(j)),
            ({s: 1}, Relation.lt, log_theta - H(p, u, (x, y, 'Q')) - delta, 'coset {}'.format(j)),
            ({s: 1, k: 1, l: 1}, Relation.lt, log_theta + h_x - H(p, (u, x), (y, 'Q')) - delta,
             'joint {}'.format(j)),
            ({'R1': 1, s: 1}, Relation.lt, log_theta + h_x1 - H(p, ('X1', 'Z'), ('Y1', 'Q')) - delta,
             'R1 + {}'.format(s)),
        ]
    return _lifted(AUX_VARIABLES[RegionKind.alpha_f_3to1], rows)


def _with_weights(tc: TestChannel, w: Optional[WeightVector]) -> TestChannel:
    if w is not None:
        tc = TestChannel(tc.pmf, tc.channel, tc.layout.name, tc.algebras, WeightVector(w))
    elif tc.w is None and isinstance(tc.algebras.get('U2'), AbelianGroupSpec):
        tc = TestChannel(tc.pmf, tc.channel, tc.layout.name, tc.algebras, WeightVector.uniform(tc.algebras['U2']))
    return tc


class _GroupTerms:
    """Information quantities shared by the group region and its
    code-parameter form
    """
    def __init__(self, tc: TestChannel):
        p = tc.derived
        group, w = tc.algebras['U2'], tc.w
        self.log_g = math.log2(group.order)
        self.i_z = I(p, 'X1', 'Y1', ('Q', 'Z'))
        self.h_z = H(p, 'Z', 'Q')
        self.c_z = group_channel_info(p, 'Z', 'Y1', group, w, given='Q')
        self.h_u, self.s_u, self.c_u, self.i_x = {}, {}, {}, {}
        for j in (2, 3):
            u = 'U{}'.format(j)
            self.h_u[j] = H(p, u, 'Q')
            self.s_u[j] = group_source_info(p, u, None, group, w, given='Q')
            self.c_u[j] = group_channel_info(p, u, 'Y{}'.format(j), group, w, given='Q')
            self.i_x[j] = I(p, 'X{}'.format(j), 'Y{}'.format(j), ('Q', u))


def alpha_g_3to1(tc: TestChannel, w: Optional[WeightVector] = None) -> RatePolytope:
    """Region of nested coset codes over an Abelian group for a 3-to-1
    test channel. `w` overrides the test channel's weight vector
    (uniform when neither is given)
    """
    tc = _with_weights(tc, w).certify(RegionKind.alpha_g_3to1)
    g = _GroupTerms(tc)
    r1 = g.i_z - g.h_z + min([g.h_z] + [g.h_u[j] + g.c_z - g.s_u[j] for j in (2, 3)])
    rows = [({'R1': 1}, r1, 'R1')]
    for j in (2, 3):
        rows.append(({'R{}'.format(j): 1}, g.i_x[j] + g.c_u[j], 'R{}'.format(j)))
        rows.append((
            {'R1': 1, 'R{}'.format(j): 1},
            g.i_z + g.c_z + g.h_u[j] - g.h_z + g.i_x[j] + min(0.0, g.c_u[j] - g.s_u[j]),
            'R1+R{}'.format(j)
        ))
    return _polytope(rows)


def alpha_g_3to1_params(tc: TestChannel, delta: float = DEFAULT_SLACK,
                        w: Optional[WeightVector] = None) -> LinearSystem:
    """Code-parameter form of the group region over (S_j, T_j, L_j, R_g)
    with slack `delta`. The shared coset code rate R_g is left to the
    solver
    """
    _check_slack(delta)
    tc = _with_weights(tc, w).certify(RegionKind.alpha_g_3to1)
    g = _GroupTerms(tc)
    rows = [
        ({'R1': 1}, Relation.lt, g.i_z - delta, 'R1'),
        ({'R1': 1, 'Rg': 1}, Relation.lt, g.log_g + g.i_z + g.c_z - g.h_z - delta, 'R1 + Rg'),
    ]
    for j in (2, 3):
        s, t, l, r = ('{}{}'.format(v, j) for v in 'STLR')
        rows += [
            ({r: 1, t: -1, l: -1}, Relation.eq, 0, '{} split'.format(r)),
            ({s: -1, t: 1}, Relation.lt, -(g.log_g - g.h_u[j] + delta), 'binning {}'.format(j)),
            ({'Rg': -1, s: 1}, Relation.lt, -delta, 'Rg > {}'.format(s)),
            ({s: -1}, Relation.lt, -(g.s_u[j] + g.log_g - g.h_u[j] + delta), 'coset {}'.format(j)),
            ({t: -1}, Relation.lt, -delta, '{} > delta'.format(t)),
            ({l: -1}, Relation.lt, -delta, '{} > delta'.format(l)),
            ({l: 1}, Relation.lt, g.i_x[j] - delta, 'private {}'.format(j)),
            ({s: 1, l: 1}, Relation.lt, g.log_g + g.i_x[j] + g.c_u[j] - g.h_u[j] - delta, 'joint {}'.format(j)),
        ]
    return _lifted(AUX_VARIABLES[RegionKind.alpha_g_3to1], rows)


def _subsets(items: Sequence[str]):
    return [c for n in range(len(items) + 1) for c in itertools.combinations(items, n)]


def alpha_f_general_system(tc: TestChannel) -> LinearSystem:
    """Lifted system of the general three-user region: every receiver
    decodes the sum of the two components aligned at it
    """
    p = tc.certify(RegionKind.alpha_f).derived
    rows = []
    for j in (1, 2, 3):
        own = own_components(j)
        pair = receiver_pair(j)
        x, y, z = 'X{}'.format(j), 'Y{}'.format(j), 'Z{}'.format(j)
        log_theta = math.log2(tc.theta(pair[0]))
        h_x = H(p, x, 'Q')
        l, k = 'L{}'.format(j), 'K{}'.format(j)
        rows.append(({'R{}'.format(j): 1, 'T' + own[0][1:]: -1, 'T' + own[1][1:]: -1, l: -1},
                     Relation.eq, 0, 'R{} split'.format(j)))
        for subset in _subsets(own):
            rest = tuple(a for a in own if a not in subset)
            log_u = sum(math.log2(tc.theta(a)) for a in subset)
            s_a = {'S' + a[1:]: 1 for a in subset}
            t_a = {'T' + a[1:]: -1 for a in subset}
            name = ','.join(subset) or '-'
            source = dict(s_a, **t_a)
            # superposition of the private layer on the chosen components
            rows.append(({**{v: -c for v, c in source.items()}, k: -1}, Relation.lt,
                         -(log_u + h_x - H(p, subset + (x, ), 'Q')), 'superposition {} [{}]'.format(j, name)))
            if subset:
                rows.append(({v: -c for v, c in source.items()}, Relation.lt,
                             -(log_u - H(p, subset, 'Q')), 'binning {} [{}]'.format(j, name)))
                rows.append((s_a, Relation.lt, log_u - H(p, subset, ('Q', z, x, y) + rest),
                             'components {} [{}]'.format(j, name)))
            for s_pair in pair:
                rows.append(({**s_a, 'S' + s_pair[1:]: 1}, Relation.lt,
                             log_u + log_theta - H(p, subset + (z, ), ('Q', x, y) + rest),
                             'sum {} via {} [{}]'.format(j, s_pair, name)))
            rows.append(({**s_a, k: 1, l: 1}, Relation.lt,
                         log_u + h_x - H(p, subset + (x, ), ('Q', z, y) + rest),
                         'private {} [{}]'.format(j, name)))
            for s_pair in pair:
                rows.append(({**s_a, k: 1, l: 1, 'S' + s_pair[1:]: 1}, Relation.lt,
                             log_u + log_theta + h_x - H(p, subset + (x, z), ('Q', y) + rest),
                             'private and sum {} via {} [{}]'.format(j, s_pair, name)))
    return _lifted(AUX_VARIABLES[RegionKind.alpha_f], rows)


def alpha_f_general_member(tc: TestChannel, rates: Sequence[float], eps: float = EPSILON) -> MembershipVerdict:
    """Decide whether the rate triple is achievable with the test
    channel; the witness holds the code parameters
    """
    return _member(alpha_f_general_system(tc), RegionKind.alpha_f, rates, eps)


def alpha_uf_3to1_system(tc: TestChannel) -> LinearSystem:
    """Lifted system of the 3-to-1 region mixing unstructured codebooks
    (V) with coset codes over a field (U)
    """
    p = tc.certify(RegionKind.alpha_uf).derived
    log_theta = math.log2(tc.theta('U2'))
    v_all = ('V2', 'V3')
    rows = [
        ({'R1': 1}, Relation.lt, I(p, 'X1', ('Y1', 'V2', 'V3', 'Z'), 'Q'), 'R1'),
        ({'T21': 1, 'T31': 1, 'R1': 1}, Relation.lt, I(p, ('V2', 'V3', 'X1'), ('Z', 'Y1'), 'Q'), 'R1 + T21 + T31'),
    ]
    for j in (2, 3):
        other = 5 - j
        u, v, x, y = 'U{}'.format(j), 'V{}'.format(j), 'X{}'.format(j), 'Y{}'.format(j)
        vo = 'V{}'.format(other)
        t1, s2, t2, l = 'T{}1'.format(j), 'S{}2'.format(j), 'T{}2'.format(j), 'L{}'.format(j)
        h_uv = H(p, u, (v, 'Q'))
        rows += [
            ({'R{}'.format(j): 1, t1: -1, t2: -1, l: -1}, Relation.eq, 0, 'R{} split'.format(j)),
            ({s2: -1, t2: 1}, Relation.lt, -(log_theta - h_uv), 'binning {}'.format(j)),
            ({l: 1, s2: 1}, Relation.lt, log_theta - h_uv + I(p, (u, x), y, (v, 'Q')), 'coset {}'.format(j)),
            ({t1: 1, l: 1}, Relation.lt, I(p, u, v, 'Q') + I(p, (v, x), y, (u, 'Q')), 'cloud {}'.format(j)),
            ({l: 1}, Relation.lt, I(p, x, y, (u, v, 'Q')), 'private {}'.format(j)),
            ({t1: 1, s2: 1, l: 1}, Relation.lt, log_theta - h_uv + I(p, (u, v, x), y, 'Q'), 'joint {}'.format(j)),
            ({'R1': 1, s2: 1}, Relation.lt,
             log_theta - H(p, 'Z', 'Q') + I(p, ('X1', 'Z'), v_all + ('Y1', ), 'Q'), 'R1 + {}'.format(s2)),
            ({'R1': 1, t1: 1}, Relation.lt, I(p, ('X1', v), (vo, 'Z', 'Y1'), 'Q'), 'R1 + {}'.format(t1)),
            ({'T21': 1, 'T31': 1, s2: 1, 'R1': 1}, Relation.lt,
             log_theta - H(p, 'Z', ('X1', 'V2', 'V3', 'Q')) + I(p, ('X1', 'V2', 'V3', 'Z'), 'Y1', 'Q'),
             'R1 + T21 + T31 + {}'.format(s2)),
        ]
        for k in (2, 3):
            sk = 'S{}2'.format(k)
            rows.append((
                {'R1': 1, t1: 1, sk: 1}, Relation.lt,
                log_theta - H(p, 'Z', (v, 'Q')) + I(p, ('X1', v, 'Z'), (vo, 'Y1'), 'Q'),
                'R1 + {} + {}'.format(t1, sk)
            ))
    return _lifted(AUX_VARIABLES[RegionKind.alpha_uf], rows)


def alpha_uf_3to1_member(tc: TestChannel, rates: Sequence[float], eps: float = EPSILON) -> MembershipVerdict:
    return _member(alpha_uf_3to1_system(tc), RegionKind.alpha_uf, rates, eps)


def _member(system: LinearSystem, kind: RegionKind, rates: Sequence[float], eps: float) -> MembershipVerdict:
    if len(rates) != 3:
        raise DomainError('Rate triple expected, got {} values'.format(len(rates)))
    verdict = system.feasible(dict(zip(RATE_VARIABLES, rates)), eps)
    verdict.witness = AuxRateVector(kind, verdict.witness)
    return verdict


def evaluate(kind: Union[RegionKind, str], tc: TestChannel) -> Union[RatePolytope, LinearSystem]:
    """Rate polytope of a closed-form region, or the lifted system of a
    region decided by feasibility
    """
    kind = RegionKind(kind)
    evaluators = {
        RegionKind.alpha_u: alpha_u_3to1,
        RegionKind.alpha_f_3to1: alpha_f_3to1,
        RegionKind.alpha_g_3to1: alpha_g_3to1,
        RegionKind.alpha_f: alpha_f_general_system,
        RegionKind.alpha_uf: alpha_uf_3to1_system,
    }
    if kind not in evaluators:
        raise DomainError('Region {} is not evaluated on a test channel'.format(kind.value))
    return evaluators[kind](tc)


def member(kind: Union[RegionKind, str], tc: TestChannel, rates: Sequence[float],
           eps: float = EPSILON) -> MembershipVerdict:
    """Membership of a rate triple in the region of one test channel"""
    kind = RegionKind(kind)
    region = evaluate(kind, tc)
    if kind.is_polytope:
        return region.verdict(rates, eps)
    return _member(region, kind, rates, eps)


def support(region: LinearSystem, mu: Sequence[float]) -> Tuple[float, Tuple[float, float, float]]:
    """max μ·R over the closure of a rate polytope or over the rate
    shadow of a lifted system
    """
    value, point = region.maximize(dict(zip(RATE_VARIABLES, mu)))
    return value, tuple(max(point[v], 0.0) for v in RATE_VARIABLES)
