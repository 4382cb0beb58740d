__all__ = [
    'CERTIFY_TOLERANCE',
    'Layout',
    'LAYOUTS',
    'KIND_LAYOUTS',
    'TestChannel',
    'receiver_pair',
    'own_components',
    'degenerate_test_channel',
    'identity_test_channel',
    'ternary_or_test_channel',
    'z4_test_channel',
    'six_auxiliary_test_channel'
]
import string
from typing import Sequence, Mapping, Optional, Union, Tuple, Dict

import numpy as np

from ..algebra import FieldSpec, AbelianGroupSpec, WeightVector, field_make, parse_algebra
from ..channels import Channel3IC, AXES_X, AXES_Y
from ..enums import RegionKind
from ..exceptions import DomainError, CertificationError, ParseError
from ..info import JointPmf, group_channel_info, group_source_info, mutual_information

CERTIFY_TOLERANCE = 1e-10

Algebra = Union[FieldSpec, AbelianGroupSpec]


class Layout:
    """Axis layout of a test channel.

    Attributes:
        name (str): layout name
        aux (Tuple[str, ...]): auxiliary axes
        user_axes (Tuple[Tuple[str, ...], ...]): axes generated by each
            user, conditionally independent given Q
    """
    def __init__(self, name: str, aux: Sequence[str], user_axes: Sequence[Sequence[str]]):
        self.name = name
        self.aux = tuple(aux)
        self.user_axes = tuple(tuple(a) for a in user_axes)

    @property
    def axes(self) -> Tuple[str, ...]:
        return ('Q', ) + self.aux + AXES_X + AXES_Y

    def __repr__(self):
        return 'Layout({})'.format(self.name)


LAYOUTS = {
    layout.name: layout for layout in (
        Layout('3to1', ('U2', 'U3'), (('X1', ), ('U2', 'X2'), ('U3', 'X3'))),
        Layout('general', ('U12', 'U13', 'U21', 'U23', 'U31', 'U32'),
               (('U12', 'U13', 'X1'), ('U21', 'U23', 'X2'), ('U31', 'U32', 'X3'))),
        Layout('uf', ('U2', 'U3', 'V2', 'V3'), (('X1', ), ('U2', 'V2', 'X2'), ('U3', 'V3', 'X3'))),
    )
}

KIND_LAYOUTS = {
    RegionKind.alpha_u: '3to1',
    RegionKind.alpha_f_3to1: '3to1',
    RegionKind.alpha_g_3to1: '3to1',
    RegionKind.alpha_f: 'general',
    RegionKind.alpha_uf: 'uf',
}


def receiver_pair(j: int) -> Tuple[str, str]:
    """Components (U_ij, U_kj) whose sum receiver j decodes in the
    general layout
    """
    i, k = [u for u in (1, 2, 3) if u != j]
    return 'U{}{}'.format(i, j), 'U{}{}'.format(k, j)


def own_components(j: int) -> Tuple[str, str]:
    """Components (U_ji, U_jk) of user j in the general layout"""
    i, k = [u for u in (1, 2, 3) if u != j]
    return 'U{}{}'.format(j, i), 'U{}{}'.format(j, k)


def _algebra_to_json(algebra: Algebra) -> dict:
    if isinstance(algebra, FieldSpec):
        return {'field': algebra.to_json()}
    return {'group': algebra.to_json()}


class TestChannel:
    """Joint pmf of time-sharing, auxiliary, input and output variables
    together with the algebraic objects the auxiliaries live in.

    Construction only checks the shape of the data. Membership of the
    test channel in the collection a region is defined over is checked
    by `certify`.
    """
    __test__ = False  # not a pytest class

    def __init__(self, pmf: JointPmf, channel: Channel3IC, layout: str = '3to1',
                 algebras: Optional[Mapping[str, Algebra]] = None, w: Optional[WeightVector] = None):
        if layout not in LAYOUTS:
            raise DomainError('Unknown layout {!r}, available are: {}'.format(layout, list(LAYOUTS)))
        self.layout = LAYOUTS[layout]
        if pmf.axes != self.layout.axes:
            raise DomainError('Test channel axes must be {}, got {}'.format(self.layout.axes, pmf.axes))
        for axis, n in zip(AXES_X + AXES_Y, tuple(channel.inputs) + tuple(channel.outputs)):
            if pmf.size(axis) != n:
                raise DomainError('Axis {} has {} symbols, the channel has {}'.format(axis, pmf.size(axis), n))

        self.algebras = dict(algebras or {})  # type: Dict[str, Algebra]
        for axis, algebra in self.algebras.items():
            if axis not in self.layout.aux:
                raise DomainError('Algebra given for non-auxiliary axis {!r}'.format(axis))
            if pmf.size(axis) != algebra.order:
                raise DomainError('Axis {} has {} symbols but its algebra has order {}'.format(
                    axis, pmf.size(axis), algebra.order
                ))
        self.pmf = pmf
        self.channel = channel
        self.w = w
        self._derived = None

    @classmethod
    def from_factors(cls, channel: Channel3IC, factors: Sequence, layout: str = '3to1',
                     q: Optional[Sequence[float]] = None, algebras: Optional[Mapping[str, Algebra]] = None,
                     w: Optional[WeightVector] = None) -> 'TestChannel':
        """Build the joint pmf p(q)·Π_j p(user j axes | q)·W(y⃗|x⃗).

        Args:
            channel (Channel3IC): the channel
            factors: per user, an array of shape (|Q|, sizes of the
                user's axes...) whose slices for every q are pmfs
            layout (str): layout name
            q: pmf of the time-sharing variable, defaults to constant
        """
        if layout not in LAYOUTS:
            raise DomainError('Unknown layout {!r}, available are: {}'.format(layout, list(LAYOUTS)))
        spec = LAYOUTS[layout]
        q = np.array([1.0] if q is None else q, dtype=float)
        if len(factors) != 3:
            raise DomainError('Three user factors expected')
        factors = [np.asarray(f, dtype=float) for f in factors]
        for j, (f, axes) in enumerate(zip(factors, spec.user_axes), 1):
            if f.ndim != len(axes) + 1 or f.shape[0] != len(q):
                raise DomainError('Factor of user {} must have shape (|Q|, {})'.format(j, ', '.join(axes)))
            if np.any(f < 0) or np.any(np.abs(f.reshape(len(q), -1).sum(axis=1) - 1) > 1e-9):
                raise DomainError('Factor of user {} must be a conditional pmf given Q'.format(j))

        letter = {a: string.ascii_letters[i] for i, a in enumerate(spec.axes)}
        subs = [letter['Q']] + [letter['Q'] + ''.join(letter[a] for a in axes) for axes in spec.user_axes]
        subs.append(''.join(letter[a] for a in AXES_X + AXES_Y))
        out = ''.join(letter[a] for a in spec.axes)
        probs = np.einsum('{}->{}'.format(','.join(subs), out), q, *factors, channel.W)
        return cls(JointPmf(spec.axes, probs, tol=1e-9), channel, layout, algebras, w)

    @property
    def derived(self) -> JointPmf:
        """The pmf extended by the sums the decoders reconstruct: `Z`
        (= U2 ⊕ U3) for the 3-to-1 layouts, `Z1`..`Z3` for the general
        one
        """
        if self._derived is None:
            pmf = self.pmf
            if self.layout.name == 'general':
                for j in (1, 2, 3):
                    a, b = receiver_pair(j)
                    if a in self.algebras and b in self.algebras:
                        pmf = self._with_sum(pmf, 'Z{}'.format(j), a, b)
            elif 'U2' in self.algebras and 'U3' in self.algebras:
                pmf = self._with_sum(pmf, 'Z', 'U2', 'U3')
            self._derived = pmf
        return self._derived

    def _with_sum(self, pmf: JointPmf, name: str, a: str, b: str) -> JointPmf:
        algebra = self.algebras[a]
        if self.algebras[b] != algebra:
            raise CertificationError('common algebra', '{} and {} live in different algebras'.format(a, b))
        table = algebra.add_table
        return pmf.apply(name, (a, b), lambda u, v: table[u, v], algebra.order)

    def theta(self, axis: str) -> int:
        """Alphabet size of an auxiliary axis"""
        return self.pmf.size(axis)

    def certify(self, kind: RegionKind) -> 'TestChannel':
        """Check that the test channel belongs to the collection `kind`
        is defined over.

        Raises:
            CertificationError: naming the first violated condition
        """
        kind = RegionKind(kind)
        if kind is RegionKind.beta:
            raise CertificationError('kind/algebra mismatch', 'the outer bound takes no test channel')
        if KIND_LAYOUTS[kind] != self.layout.name:
            raise CertificationError('kind/algebra mismatch', '{} needs the {} layout, got {}'.format(
                kind.value, KIND_LAYOUTS[kind], self.layout.name
            ))
        self._check_consistency()
        self._check_independence()
        self._check_costs()

        if kind in (RegionKind.alpha_f_3to1, RegionKind.alpha_uf):
            self._check_common_field('U2', 'U3')
        elif kind is RegionKind.alpha_f:
            for j in (1, 2, 3):
                self._check_common_field(*receiver_pair(j))
        elif kind is RegionKind.alpha_g_3to1:
            self._check_group_condition()
        return self

    def _check_consistency(self):
        joint = self.pmf.probs
        marginal = joint.sum(axis=(-3, -2, -1))
        expected = marginal[..., None, None, None] * self.channel.W
        if np.abs(joint - expected).max() > CERTIFY_TOLERANCE:
            raise CertificationError('channel consistency', 'p(y | x, aux, q) differs from W')

    def _check_independence(self):
        inner = self.pmf.marginal(('Q', ) + sum(self.layout.user_axes, ()))
        letter = {a: string.ascii_letters[i] for i, a in enumerate(inner.axes)}
        pq = inner.marginal('Q').probs
        safe = np.where(pq > 0, pq, 1.0)
        operands, subs = [pq], [letter['Q']]
        for axes in self.layout.user_axes:
            m = inner.marginal(('Q', ) + axes).probs
            operands.append(m / safe.reshape((-1, ) + (1, ) * len(axes)))
            subs.append(letter['Q'] + ''.join(letter[a] for a in axes))
        product = np.einsum('{}->{}'.format(','.join(subs), ''.join(letter[a] for a in inner.axes)), *operands)
        if np.abs(product - inner.probs).max() > CERTIFY_TOLERANCE:
            raise CertificationError('conditional independence', 'users are not independent given Q')

    def _check_costs(self):
        for j, (cost, budget) in enumerate(zip(self.channel.expected_costs(self.pmf), self.channel.budgets), 1):
            if cost > budget + CERTIFY_TOLERANCE:
                raise CertificationError('cost budget of user {}'.format(j), 'E[cost] = {:.6g} > {:.6g}'.format(
                    cost, budget
                ))

    def _check_common_field(self, a: str, b: str):
        fa, fb = self.algebras.get(a), self.algebras.get(b)
        if not isinstance(fa, FieldSpec) or not isinstance(fb, FieldSpec):
            raise CertificationError('common finite field', '{} and {} must carry a finite field'.format(a, b))
        if fa != fb:
            raise CertificationError('common finite field', '{} is over {}, {} is over {}'.format(a, fa, b, fb))

    def _check_group_condition(self):
        ga, gb = self.algebras.get('U2'), self.algebras.get('U3')
        if not isinstance(ga, AbelianGroupSpec) or ga != gb:
            raise CertificationError('common group', 'U2 and U3 must carry the same Abelian group')
        for j in (2, 3):
            if self.group_margin(j) < -CERTIFY_TOLERANCE:
                raise CertificationError('group condition (iv) of user {}'.format(j))

    def group_margin(self, j: int) -> float:
        """I(Xj;Yj|Q,Uj) + C(Uj;Yj|Q) − S(Uj;0|Q), non-negative for
        admissible group test channels
        """
        u, x, y = 'U{}'.format(j), 'X{}'.format(j), 'Y{}'.format(j)
        group = self.algebras[u]
        return (mutual_information(self.pmf, x, y, ('Q', u))
                + group_channel_info(self.pmf, u, y, group, self.w, given='Q')
                - group_source_info(self.pmf, u, None, group, self.w, given='Q'))

    def to_json(self) -> dict:
        res = {
            'layout': self.layout.name,
            'axes': list(self.pmf.axes),
            'probs': self.pmf.probs.tolist(),
            'algebras': {a: _algebra_to_json(g) for a, g in self.algebras.items()},
        }
        if self.w is not None:
            res['w'] = list(self.w)
        return res

    @classmethod
    def from_json(cls, data: Mapping, channel: Channel3IC) -> 'TestChannel':
        """Load a test channel document. It carries either the full
        joint pmf (`probs`) or the per-user factors (`factors`, `q`)
        """
        try:
            layout = data.get('layout', '3to1')
            algebras = {a: parse_algebra(g) for a, g in data.get('algebras', {}).items()}
            w = WeightVector(data['w']) if data.get('w') is not None else None
            if 'factors' in data:
                return cls.from_factors(channel, data['factors'], layout, data.get('q'), algebras, w)
            pmf = JointPmf(data.get('axes', LAYOUTS[layout].axes), data['probs'], tol=1e-9)
        except (KeyError, TypeError, AttributeError) as e:
            raise ParseError('Malformed test channel document: {}'.format(e))
        return cls(pmf, channel, layout, algebras, w)

    def __repr__(self):
        return 'TestChannel(layout={}, algebras={})'.format(self.layout.name, {
            a: repr(g) for a, g in self.algebras.items()
        })


def _diagonal(px: Sequence[float], size: int) -> np.ndarray:
    """p(u, x) with U = X embedded into an alphabet of `size` symbols"""
    px = np.asarray(px, dtype=float)
    res = np.zeros((size, len(px)))
    res[np.arange(len(px)), np.arange(len(px))] = px
    return res


def _constant_aux(px: Sequence[float], size: int) -> np.ndarray:
    """p(u, x) with U ≡ 0 over `size` symbols"""
    px = np.asarray(px, dtype=float)
    res = np.zeros((size, len(px)))
    res[0] = px
    return res


def degenerate_test_channel(channel: Channel3IC, input_marginals: Sequence[Sequence[float]],
                            layout: str = '3to1', algebra: Optional[Algebra] = None,
                            v_size: int = 1) -> TestChannel:
    """Test channel whose auxiliaries are constant: product inputs with
    the given marginals and every auxiliary fixed at 0. With an algebra
    the structured auxiliaries are placed in it
    """
    algebra = algebra or field_make(2)
    px1, px2, px3 = [np.asarray(m, dtype=float) for m in input_marginals]
    theta = algebra.order
    if layout == '3to1':
        factors = [px1[None], _constant_aux(px2, theta)[None], _constant_aux(px3, theta)[None]]
        algebras = {'U2': algebra, 'U3': algebra}
    elif layout == 'uf':
        def user(px):
            res = np.zeros((theta, v_size, len(px)))
            res[0, 0] = px
            return res[None]
        factors = [px1[None], user(px2), user(px3)]
        algebras = {'U2': algebra, 'U3': algebra}
    elif layout == 'general':
        def user(px):
            res = np.zeros((theta, theta, len(px)))
            res[0, 0] = px
            return res[None]
        factors = [user(px1), user(px2), user(px3)]
        algebras = {a: algebra for a in LAYOUTS['general'].aux}
    else:
        raise DomainError('Unknown layout {!r}'.format(layout))
    w = WeightVector.uniform(algebra) if isinstance(algebra, AbelianGroupSpec) else None
    return TestChannel.from_factors(channel, factors, layout, algebras=algebras, w=w)


def identity_test_channel(channel: Channel3IC, input_marginals: Sequence[Sequence[float]],
                          algebra: Optional[Algebra] = None) -> TestChannel:
    """3-to-1 test channel with U_j = X_j over the given algebra (binary
    field by default) and independent inputs
    """
    algebra = algebra or field_make(channel.inputs[1])
    px1, px2, px3 = [np.asarray(m, dtype=float) for m in input_marginals]
    factors = [px1[None], _diagonal(px2, algebra.order)[None], _diagonal(px3, algebra.order)[None]]
    w = WeightVector.uniform(algebra) if isinstance(algebra, AbelianGroupSpec) else None
    return TestChannel.from_factors(channel, factors, '3to1', algebras={'U2': algebra, 'U3': algebra}, w=w)


def ternary_or_test_channel(channel: Channel3IC, tau1: float, tau: float) -> TestChannel:
    """U_j = X_j ∈ {0, 1} embedded in F3 with P(X_j = 1) = τ and
    P(X1 = 1) = τ1; the ternary sum of U2, U3 determines X2 ∨ X3
    """
    return identity_test_channel(channel, ([1 - tau1, tau1], [1 - tau, tau], [1 - tau, tau]), field_make(3))


def z4_test_channel(channel: Channel3IC, tau: float) -> TestChannel:
    """U_j = X_j uniform over Z4, X1 with mass τ/3 on every non-zero
    symbol
    """
    return identity_test_channel(
        channel,
        ([1 - tau, tau / 3, tau / 3, tau / 3], [0.25] * 4, [0.25] * 4),
        AbelianGroupSpec.cyclic(4)
    )


def six_auxiliary_test_channel(channel: Channel3IC, input_marginals: Sequence[Sequence[float]],
                               order: int = 3) -> TestChannel:
    """General-layout test channel with U_ji = U_jk = X_j for every
    user, all components over F_order
    """
    field = field_make(order)
    factors = []
    for px in input_marginals:
        px = np.asarray(px, dtype=float)
        res = np.zeros((order, order, len(px)))
        for x, p in enumerate(px):
            res[x, x, x] = p
        factors.append(res[None])
    return TestChannel.from_factors(channel, factors, 'general', algebras={
        a: field for a in LAYOUTS['general'].aux
    })
