__all__ = [
    'AXES_X',
    'AXES_Y',
    'TABLE1_ROWS',
    'Channel3IC',
    'ThreeToOneCertificate',
    'is_three_to_one',
    'make_example',
    'push_forward',
    'binary_noise',
    'quaternary_noise'
]
import json
import math
from fractions import Fraction
from typing import Sequence, Mapping, Optional, Union, Callable, Tuple, List

import numpy as np

from .exceptions import DomainError, ParseError
from .info import JointPmf, check_probability

AXES_X = ('X1', 'X2', 'X3')
AXES_Y = ('Y1', 'Y2', 'Y3')

# Cost tables, budgets and noise pmfs of the three published quaternary
# instances. Users 2 and 3 share cost table, budget and noise.
TABLE1_ROWS = (
    {
        'kappa1': (7.7572, 0.3170, 4.9891, 2.2048), 'tau1': 0.8449,
        'noise1': (0.0011, 0.0094, 0.0010, 0.9886),
        'kappa2': (0.2787, 0.3818, 0.3236, 0.6227), 'tau2': 0.3300,
        'noise2': (0.5777, 0.1423, 0.1002, 0.1798),
        'rates': {'F7': 0.3300, 'F8': 0.1489, 'Z4': 0.2556}, 'winner': 'F7',
    },
    {
        'kappa1': (6.1610, 1.1621, 5.0165, 0.0283), 'tau1': 0.2245,
        'noise1': (0.8229, 0.0025, 0.1647, 0.0099),
        'kappa2': (0.1357, 0.2906, 0.3514, 0.2344), 'tau2': 0.2179,
        'noise2': (0.1255, 0.1043, 0.3293, 0.4409),
        'rates': {'F7': 0.0006, 'F8': 0.2179, 'Z4': 0.0000}, 'winner': 'F8',
    },
    {
        'kappa1': (5.3368, 4.1262, 3.7326, 0.0100), 'tau1': 0.1491,
        'noise1': (0.0132, 0.0285, 0.0327, 0.9256),
        'kappa2': (1.4115, 1.9947, 1.1876, 0.9993), 'tau2': 1.2832,
        'noise2': (0.8752, 0.0290, 0.0034, 0.0924),
        'rates': {'F7': 0.6241, 'F8': 0.2952, 'Z4': 1.2832}, 'winner': 'Z4',
    },
)

MAC_DEFAULT = {(0, 0): 0.989, (0, 1): 0.01, (1, 0): 0.02, (1, 1): 0.993}

SLICE_TOLERANCE = 1e-12
FACTOR_TOLERANCE = 1e-10


class Channel3IC:
    """Three-user discrete memoryless interference channel.

    Attributes:
        inputs (Tuple[int, int, int]): input alphabet sizes
        outputs (Tuple[int, int, int]): output alphabet sizes
        W (np.ndarray): transition tensor W[x1, x2, x3, y1, y2, y3]
        costs (Tuple[np.ndarray, ...]): per-user cost tables κ_j
        budgets (Tuple[float, float, float]): per-user budgets τ_j
    """
    def __init__(self, W, costs: Optional[Sequence[Sequence[float]]] = None,
                 budgets: Optional[Sequence[float]] = None, name: str = ''):
        W = np.array(W, dtype=float)
        if W.ndim != 6:
            raise DomainError('Transition tensor must have 6 dimensions, got {}'.format(W.ndim))
        if np.any(W < 0):
            raise DomainError('Transition probabilities must be non-negative')
        slices = W.sum(axis=(3, 4, 5))
        if np.any(np.abs(slices - 1) > SLICE_TOLERANCE):
            raise DomainError('Every conditional slice W(.|x) must sum to 1')

        self.inputs = W.shape[:3]
        self.outputs = W.shape[3:]
        if costs is None:
            costs = [np.zeros(n) for n in self.inputs]
        self.costs = tuple(np.array(c, dtype=float) for c in costs)
        for j, (c, n) in enumerate(zip(self.costs, self.inputs), 1):
            if c.shape != (n, ) or np.any(c < 0) or not np.all(np.isfinite(c)):
                raise DomainError('Cost table of user {} must have {} non-negative finite entries'.format(
                    j, n
                ))
        if budgets is None:
            budgets = [float(c.max()) for c in self.costs]
        self.budgets = tuple(float(b) for b in budgets)
        if len(self.budgets) != 3 or any(b < 0 or not math.isfinite(b) for b in self.budgets):
            raise DomainError('Budgets must be three non-negative finite numbers')

        W.setflags(write=False)
        self.W = W
        self.name = name

    def receiver_kernel(self, j: int) -> np.ndarray:
        """W_{Y_j|X⃗} with shape (n1, n2, n3, m_j)"""
        dropped = tuple(3 + i for i in range(3) if i != j - 1)
        return self.W.sum(axis=dropped)

    def expected_costs(self, pmf: JointPmf) -> List[float]:
        """E[κ_j(X_j)] for every user under the pmf's X marginals"""
        return [pmf.expectation(x, c) for x, c in zip(AXES_X, self.costs)]

    def with_budgets(self, budgets: Sequence[float]) -> 'Channel3IC':
        return Channel3IC(self.W, self.costs, budgets, self.name)

    def to_json(self) -> dict:
        return {
            'inputs': list(self.inputs),
            'outputs': list(self.outputs),
            'W': self.W.tolist(),
            'costs': [c.tolist() for c in self.costs],
            'budgets': list(self.budgets),
        }

    @classmethod
    def from_json(cls, data: Union[str, Mapping]) -> 'Channel3IC':
        """Build a channel from its JSON document. Decimal literals are
        parsed exactly so that slice sums are checked without binary
        rounding

        Raises:
            ParseError: malformed document
            DomainError: the channel violates its invariants
        """
        if isinstance(data, str):
            try:
                data = json.loads(data, parse_float=Fraction)
            except ValueError as e:
                raise ParseError('Malformed channel JSON: {}'.format(e))
        try:
            inputs = tuple(int(n) for n in data['inputs'])
            outputs = tuple(int(m) for m in data['outputs'])
            exact = np.array(data['W'], dtype=object)
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError('Malformed channel document: {}'.format(e))
        if exact.shape != inputs + outputs:
            raise DomainError('W has shape {}, expected {}'.format(exact.shape, inputs + outputs))
        for index in np.ndindex(*inputs):
            total = sum(Fraction(v) for v in exact[index].ravel())
            if abs(total - 1) > Fraction(1, 10 ** 12):
                raise DomainError('Slice W(.|x={}) sums to {}'.format(index, float(total)))
        W = exact.astype(float)
        W = W / W.sum(axis=(3, 4, 5), keepdims=True)
        return cls(W, data.get('costs'), data.get('budgets'), data.get('name', ''))

    def __repr__(self):
        return 'Channel3IC({}inputs={}, outputs={})'.format(
            '{}, '.format(self.name) if self.name else '', self.inputs, self.outputs
        )


class ThreeToOneCertificate:
    """Outcome of the 3-to-1 factorization test. When `holds`, the
    factor channels reproduce W
    """
    def __init__(self, holds: bool, w1: Optional[np.ndarray] = None,
                 w2: Optional[np.ndarray] = None, w3: Optional[np.ndarray] = None):
        self.holds = holds
        self.w1 = w1
        self.w2 = w2
        self.w3 = w3

    def __bool__(self):
        return self.holds

    def __repr__(self):
        return 'ThreeToOneCertificate({})'.format(self.holds)


def is_three_to_one(ch: Channel3IC) -> ThreeToOneCertificate:
    """Whether only receiver 1 sees interference:
    W(y⃗|x⃗) = W1(y1|x⃗)·W2(y2|x2)·W3(y3|x3)
    """
    k1, k2, k3 = (ch.receiver_kernel(j) for j in (1, 2, 3))
    w2 = k2[0, :, 0, :]
    w3 = k3[0, 0, :, :]
    if np.abs(k2 - w2[None, :, None, :]).max() > FACTOR_TOLERANCE:
        return ThreeToOneCertificate(False)
    if np.abs(k3 - w3[None, None, :, :]).max() > FACTOR_TOLERANCE:
        return ThreeToOneCertificate(False)
    product = np.einsum('abcx,by,cz->abcxyz', k1, w2, w3)
    if np.abs(product - ch.W).max() > FACTOR_TOLERANCE:
        return ThreeToOneCertificate(False)
    return ThreeToOneCertificate(True, k1, w2, w3)


def binary_noise(delta: float) -> np.ndarray:
    delta = check_probability(delta, 'crossover probability')
    return np.array([1 - delta, delta])


def quaternary_noise(delta: float) -> np.ndarray:
    """Z4 noise with P(0) = 1−δ and δ/3 on each non-zero symbol"""
    delta = check_probability(delta, 'noise probability')
    return np.array([1 - delta, delta / 3, delta / 3, delta / 3])


def _additive_kernel(inputs: Tuple[int, int, int], modulus: int, noise: np.ndarray,
                     signal: Callable[..., np.ndarray]) -> np.ndarray:
    """K(y|x⃗) = P(N = y − signal(x⃗) mod `modulus`)"""
    x1, x2, x3 = np.meshgrid(*[np.arange(n) for n in inputs], indexing='ij')
    s = np.asarray(signal(x1, x2, x3)) % modulus
    y = np.arange(modulus)
    return noise[(y[None, None, None, :] - s[..., None]) % modulus]


def _z_kernel(own: Callable[..., np.ndarray], interference: Callable[..., np.ndarray],
              beta_z: float, delta: float) -> np.ndarray:
    """Y = (X_own ∧ N1) ⊕ interference ⊕ N2 with P(N1=1)=β_z, P(N2=1)=δ"""
    x1, x2, x3 = np.meshgrid(np.arange(2), np.arange(2), np.arange(2), indexing='ij')
    flip = np.where(own(x1, x2, x3) == 1, beta_z * (1 - delta) + (1 - beta_z) * delta, delta)
    s = interference(x1, x2, x3) % 2
    p_one = np.where(s == 1, 1 - flip, flip)
    return np.stack([1 - p_one, p_one], axis=-1)


def _compose(k1: np.ndarray, k2: np.ndarray, k3: np.ndarray) -> np.ndarray:
    return np.einsum('abcx,abcy,abcz->abcxyz', k1, k2, k3)


def _example1(delta1=0.01, delta2=0.15, delta3=0.15, tau=0.125):
    inputs = (2, 2, 2)
    w = _compose(
        _additive_kernel(inputs, 2, binary_noise(delta1), lambda a, b, c: a ^ b ^ c),
        _additive_kernel(inputs, 2, binary_noise(delta2), lambda a, b, c: b),
        _additive_kernel(inputs, 2, binary_noise(delta3), lambda a, b, c: c),
    )
    return Channel3IC(w, ([0, 1], [0, 0], [0, 0]), (check_probability(tau, 'tau'), 0, 0), 'example 1')


def _example2(delta1=0.01, delta=0.067, tau1=1 / 90, tau=0.15, delta2=None, delta3=None):
    inputs = (2, 2, 2)
    delta2 = delta if delta2 is None else delta2
    delta3 = delta if delta3 is None else delta3
    w = _compose(
        _additive_kernel(inputs, 2, binary_noise(delta1), lambda a, b, c: a ^ (b | c)),
        _additive_kernel(inputs, 2, binary_noise(delta2), lambda a, b, c: b),
        _additive_kernel(inputs, 2, binary_noise(delta3), lambda a, b, c: c),
    )
    tau1, tau = check_probability(tau1, 'tau1'), check_probability(tau, 'tau')
    return Channel3IC(w, ([0, 1], [0, 1], [0, 1]), (tau1, tau, tau), 'example 2')


def _example3(tau1=0.01, tau=0.1525, delta=0.067, mac: Optional[Mapping] = None):
    mac = dict(MAC_DEFAULT if mac is None else mac)
    inputs = (2, 2, 2)
    k1 = np.zeros(inputs + (2, ))
    for x1, x2, x3 in np.ndindex(*inputs):
        p0 = check_probability(mac[(x1, x2 | x3)], 'MAC entry')
        k1[x1, x2, x3] = (p0, 1 - p0)
    w = _compose(
        k1,
        _additive_kernel(inputs, 2, binary_noise(delta), lambda a, b, c: b),
        _additive_kernel(inputs, 2, binary_noise(delta), lambda a, b, c: c),
    )
    tau1, tau = check_probability(tau1, 'tau1'), check_probability(tau, 'tau')
    return Channel3IC(w, ([0, 1], [0, 1], [0, 1]), (tau1, tau, tau), 'example 3')


def _example4(delta1=0.75 - math.sqrt(30) / 8, delta=0.125, tau=0.75 - math.sqrt(30) / 8,
              delta2=None, delta3=None):
    inputs = (4, 4, 4)
    delta2 = delta if delta2 is None else delta2
    delta3 = delta if delta3 is None else delta3
    w = _compose(
        _additive_kernel(inputs, 4, quaternary_noise(delta1), lambda a, b, c: a + b + c),
        _additive_kernel(inputs, 4, quaternary_noise(delta2), lambda a, b, c: b),
        _additive_kernel(inputs, 4, quaternary_noise(delta3), lambda a, b, c: c),
    )
    costs = ([0, 1, 1, 1], [0, 0, 0, 0], [0, 0, 0, 0])
    return Channel3IC(w, costs, (check_probability(tau, 'tau'), 0, 0), 'example 4')


def _pmf4(values: Sequence[float], name: str) -> np.ndarray:
    values = np.array([check_probability(v, name) for v in values])
    if values.shape != (4, ) or abs(values.sum() - 1) > 1e-3:
        raise DomainError('{} must be a pmf on 4 symbols'.format(name))
    # published pmfs are rounded to four decimals
    return values / values.sum()


def _example5(row: int = 1, kappa1=None, tau1=None, noise1=None, kappa2=None, tau2=None, noise2=None):
    if not 1 <= row <= len(TABLE1_ROWS):
        raise DomainError('Table row must be in 1..{}'.format(len(TABLE1_ROWS)))
    params = TABLE1_ROWS[row - 1]
    kappa1 = params['kappa1'] if kappa1 is None else kappa1
    kappa2 = params['kappa2'] if kappa2 is None else kappa2
    tau1 = params['tau1'] if tau1 is None else tau1
    tau2 = params['tau2'] if tau2 is None else tau2
    n1 = _pmf4(params['noise1'] if noise1 is None else noise1, 'noise1')
    n2 = _pmf4(params['noise2'] if noise2 is None else noise2, 'noise2')
    inputs = (4, 4, 4)
    w = _compose(
        _additive_kernel(inputs, 4, n1, lambda a, b, c: a + b + c),
        _additive_kernel(inputs, 4, n2, lambda a, b, c: b),
        _additive_kernel(inputs, 4, n2, lambda a, b, c: c),
    )
    return Channel3IC(w, (kappa1, kappa2, kappa2), (tau1, tau2, tau2), 'example 5')


def _example6(delta1=0.01, delta2=0.15, delta3=0.15, tau=0.125):
    inputs = (2, 2, 2)
    w = _compose(
        _additive_kernel(inputs, 2, binary_noise(delta1), lambda a, b, c: a ^ b ^ c),
        _additive_kernel(inputs, 2, binary_noise(delta2), lambda a, b, c: b ^ c),
        _additive_kernel(inputs, 2, binary_noise(delta3), lambda a, b, c: c),
    )
    return Channel3IC(w, ([0, 1], [0, 0], [0, 0]), (check_probability(tau, 'tau'), 0, 0), 'example 6')


def _example7(tau=0.1284, delta=0.1, beta_z=0.2210):
    tau, delta = check_probability(tau, 'tau'), check_probability(delta, 'delta')
    beta_z = check_probability(beta_z, 'zchannel_beta')
    w = _compose(
        _z_kernel(lambda a, b, c: a, lambda a, b, c: b | c, beta_z, delta),
        _z_kernel(lambda a, b, c: b, lambda a, b, c: a | c, beta_z, delta),
        _z_kernel(lambda a, b, c: c, lambda a, b, c: a | b, beta_z, delta),
    )
    return Channel3IC(w, ([0, 1], [0, 1], [0, 1]), (tau, tau, tau), 'example 7')


def _example8(tau=0.1, delta=0.01, beta_z=0.2):
    tau, delta = check_probability(tau, 'tau'), check_probability(delta, 'delta')
    beta_z = check_probability(beta_z, 'zchannel_beta')
    w = _compose(
        _z_kernel(lambda a, b, c: a, lambda a, b, c: b ^ c, beta_z, delta),
        _z_kernel(lambda a, b, c: b, lambda a, b, c: a | c, beta_z, delta),
        _additive_kernel((2, 2, 2), 2, binary_noise(delta), lambda a, b, c: c),
    )
    return Channel3IC(w, ([0, 1], [0, 1], [0, 1]), (tau, tau, tau), 'example 8')


_EXAMPLES = {
    1: _example1, 2: _example2, 3: _example3, 4: _example4,
    5: _example5, 6: _example6, 7: _example7, 8: _example8,
}


def make_example(k: int, **params) -> Channel3IC:
    """Build one of the eight published example channels.

    Args:
        k (int): example number, 1..8
        **params: example parameters (crossover probabilities `delta*`,
            budgets `tau*`, Z-channel parameter `beta_z`, Table 1 `row`,
            ...). Missing parameters take the published values.

    Raises:
        DomainError: unknown example or out-of-range parameter
    """
    if k not in _EXAMPLES:
        raise DomainError('Unknown example {}, available are 1..8'.format(k))
    try:
        return _EXAMPLES[k](**params)
    except TypeError as e:
        raise DomainError('Bad parameters for example {}: {}'.format(k, e))


def push_forward(ch: Channel3IC, input_pmf: Union[JointPmf, Sequence[Sequence[float]]]) -> JointPmf:
    """Joint pmf over (X1, X2, X3, Y1, Y2, Y3) induced by an input pmf,
    either a JointPmf over the three inputs or three marginals of a
    product input
    """
    if not isinstance(input_pmf, JointPmf):
        marginals = list(input_pmf)
        if len(marginals) != 3:
            raise DomainError('Three input marginals expected')
        input_pmf = JointPmf.product(*[JointPmf.from_vector(x, m) for x, m in zip(AXES_X, marginals)])
    if set(input_pmf.axes) != set(AXES_X):
        raise DomainError('Input pmf axes must be {}, got {}'.format(AXES_X, input_pmf.axes))
    probs = input_pmf.marginal(AXES_X).probs
    if probs.shape != tuple(ch.inputs):
        raise DomainError('Input pmf shape {} does not match alphabets {}'.format(probs.shape, ch.inputs))
    joint = probs[..., None, None, None] * ch.W
    return JointPmf(AXES_X + AXES_Y, joint / joint.sum())
