__all__ = [
    'SUPPORTED_FIELD_ORDERS',
    'REDUCTION_POLYNOMIALS',
    'FieldSpec',
    'AbelianGroupSpec',
    'ThetaVector',
    'WeightVector',
    'Subgroup',
    'field_make',
    'parse_algebra',
    'theta_map',
    'theta_set',
    'subgroup_H',
    'omega',
    'is_prime',
    'factorize'
]
import itertools
import math
from functools import reduce
from typing import Sequence, Tuple, Union, Iterable, Mapping, List, Optional

import numpy as np

from .common import UserTuple
from .exceptions import ConfigurationError, DomainError, ParseError

SUPPORTED_FIELD_ORDERS = (2, 3, 4, 5, 7, 8, 9, 11, 13, 16)

# Coefficients over Z_p, lowest degree first
REDUCTION_POLYNOMIALS = {
    4: (1, 1, 1),        # x^2 + x + 1
    8: (1, 1, 0, 1),     # x^3 + x + 1
    9: (1, 0, 1),        # x^2 + 1
    16: (1, 1, 0, 0, 1)  # x^4 + x + 1
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(math.isqrt(n)) + 1))


def factorize(n: int) -> List[Tuple[int, int]]:
    """Prime factorization of n as (prime, exponent) pairs in
    increasing prime order
    """
    res = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            res.append((d, e))
        d += 1
    if n > 1:
        res.append((n, 1))
    return res


def _poly_trim(a: List[int]) -> List[int]:
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    a = _poly_trim([x % p for x in a])
    b = _poly_trim([x % p for x in b])
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        factor = (a[-1] * inv_lead) % p
        for i, coef in enumerate(b):
            a[i + shift] = (a[i + shift] - factor * coef) % p
        a = _poly_trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Exhaustive check that no monic polynomial of degree 1..m/2
    divides `poly` over Z_p
    """
    m = len(poly) - 1
    for degree in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=degree):
            divisor = list(low) + [1]
            if not any(_poly_mod(poly, divisor, p)):
                return False
    return True


class FieldSpec:
    """Finite field F_θ, θ = p^m. Elements are integers 0..θ-1 whose
    base-p digits are polynomial coefficients (lowest degree first), so
    prime fields are plain residues.

    Arithmetic is done by table lookups; the tables are numpy arrays
    and accept array arguments, e.g. `field.add_table[x, y]` adds two
    vectors elementwise.
    """
    def __init__(self, p: int, m: int = 1, poly: Optional[Sequence[int]] = None):
        if not is_prime(p) or m < 1:
            raise ConfigurationError('Field characteristic must be prime, got p={}, m={}'.format(p, m))
        order = p ** m
        if order not in SUPPORTED_FIELD_ORDERS:
            raise ConfigurationError('Unsupported field order {}, supported are: {}'.format(
                order, SUPPORTED_FIELD_ORDERS
            ))
        if poly is None:
            poly = REDUCTION_POLYNOMIALS.get(order, (0, 1))
        poly = tuple(int(c) % p for c in poly)
        if len(poly) != m + 1 or poly[-1] == 0:
            raise ConfigurationError('Reduction polynomial must have degree {}'.format(m))
        if m > 1 and not is_irreducible(poly, p):
            raise ConfigurationError('Polynomial {} is reducible over Z_{}'.format(poly, p))

        self.p = p
        self.m = m
        self.order = order
        self.poly = poly

        digits = np.array([self._digits(x) for x in range(order)], dtype=np.int64)
        weights = p ** np.arange(m)
        self.add_table = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg_table = ((-digits) % p) @ weights
        self.mul_table = np.array(
            [[self._mul(a, b) for b in range(order)] for a in range(order)], dtype=np.int64
        )
        self.inv_table = np.full(order, -1, dtype=np.int64)
        for a in range(1, order):
            self.inv_table[a] = int(np.flatnonzero(self.mul_table[a] == 1)[0])

    def _digits(self, x: int) -> List[int]:
        return [(x // self.p ** i) % self.p for i in range(self.m)]

    def _from_digits(self, digits: Sequence[int]) -> int:
        return sum(int(d) * self.p ** i for i, d in enumerate(digits))

    def _mul(self, a: int, b: int) -> int:
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] += x * y
        rem = _poly_mod(prod, self.poly, self.p) if self.m > 1 else [prod[0] % self.p]
        return self._from_digits(rem + [0] * (self.m - len(rem)))

    @property
    def elements(self) -> range:
        return range(self.order)

    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.add_table[a, self.neg_table[b]]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def neg(self, a):
        return self.neg_table[a]

    def inv(self, a: int) -> int:
        if a % self.order == 0:
            raise DomainError('Zero has no multiplicative inverse')
        return int(self.inv_table[a])

    def matmul(self, a: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Vector-matrix product over the field. `a` has shape (..., k),
        `g` has shape (k, n); returns shape (..., n)
        """
        a = np.asarray(a, dtype=np.int64)
        g = np.asarray(g, dtype=np.int64)
        if self.m == 1:
            return (a @ g) % self.p

        res = np.zeros(a.shape[:-1] + (g.shape[1],), dtype=np.int64)
        for i in range(g.shape[0]):
            res = self.add_table[res, self.mul_table[a[..., i:i + 1], g[i]]]
        return res

    def vector_add(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (np.asarray(x) + np.asarray(y)) % self.p
        return self.add_table[x, y]

    def to_json(self) -> dict:
        return {'p': self.p, 'm': self.m}

    @classmethod
    def from_json(cls, data: Mapping) -> 'FieldSpec':
        return cls(int(data['p']), int(data.get('m', 1)))

    def __eq__(self, other):
        if not isinstance(other, FieldSpec):
            return False
        return (self.p, self.m, self.poly) == (other.p, other.m, other.poly)

    def __hash__(self):
        return hash(('field', self.p, self.m, self.poly))

    def __repr__(self):
        return 'FieldSpec(F{})'.format(self.order)


def field_make(order: int) -> FieldSpec:
    """Build the field of the given prime-power order with the built-in
    reduction polynomial.

    Raises:
        ConfigurationError: order is not a supported prime power
    """
    factors = factorize(int(order)) if order > 1 else []
    if len(factors) != 1 or order not in SUPPORTED_FIELD_ORDERS:
        raise ConfigurationError('Unsupported field order {}, supported are: {}'.format(
            order, SUPPORTED_FIELD_ORDERS
        ))
    p, m = factors[0]
    return FieldSpec(p, m)


class AbelianGroupSpec:
    """Finite Abelian group G = ⊕ Z_{p^r}^{M_{p,r}}.

    Components are kept in canonical (p, r) order. Elements are tuples
    of residues, one per coordinate (p, r, m); for table lookups they
    are encoded as integers in mixed radix, first coordinate most
    significant.
    """
    def __init__(self, components: Iterable[Tuple[int, int, int]]):
        merged = {}  # type: dict
        for p, r, mult in components:
            p, r, mult = int(p), int(r), int(mult)
            if not is_prime(p) or r < 1 or mult < 0:
                raise ConfigurationError('Bad group component (p={}, r={}, multiplicity={})'.format(
                    p, r, mult
                ))
            merged[(p, r)] = merged.get((p, r), 0) + mult
        self.components = tuple((p, r, m) for (p, r), m in sorted(merged.items()) if m > 0)
        if not self.components:
            raise ConfigurationError('Group must have at least one component')

        self.primes = tuple(sorted({p for p, _, _ in self.components}))
        self.q_set = tuple((p, r) for p, r, _ in self.components)
        self.coordinates = tuple(
            (p, r, i) for p, r, mult in self.components for i in range(1, mult + 1)
        )
        self.moduli = tuple(p ** r for p, r, _ in self.coordinates)
        self.order = reduce(lambda acc, c: acc * c[0] ** (c[1] * c[2]), self.components, 1)
        self._add_table = None

    @classmethod
    def cyclic(cls, n: int) -> 'AbelianGroupSpec':
        """Z_n decomposed into its Sylow components"""
        if n < 2:
            raise ConfigurationError('Cyclic group order must be at least 2')
        return cls((p, e, 1) for p, e in factorize(n))

    @property
    def is_cyclic(self) -> bool:
        return all(m == 1 for _, _, m in self.components) and len(self.primes) == len(self.components)

    @property
    def is_prime_field(self) -> bool:
        return len(self.coordinates) == 1 and self.coordinates[0][1] == 1

    def multiplicity(self, p: int, r: int) -> int:
        for q, s, m in self.components:
            if (q, s) == (p, r):
                return m
        return 0

    def residues(self, index) -> np.ndarray:
        """Residue tuples of element indices, shape (..., coordinates)"""
        index = np.asarray(index, dtype=np.int64)
        res = []
        for mod in reversed(self.moduli):
            res.append(index % mod)
            index = index // mod
        return np.stack(res[::-1], axis=-1)

    def index_of(self, residues) -> np.ndarray:
        residues = np.asarray(residues, dtype=np.int64)
        index = np.zeros(residues.shape[:-1], dtype=np.int64)
        for i, mod in enumerate(self.moduli):
            index = index * mod + residues[..., i] % mod
        return index

    @property
    def add_table(self) -> np.ndarray:
        if self._add_table is None:
            res = self.residues(np.arange(self.order))
            summed = (res[:, None, :] + res[None, :, :]) % np.array(self.moduli)
            self._add_table = self.index_of(summed)
        return self._add_table

    def add(self, a, b):
        return self.add_table[a, b]

    def to_json(self) -> list:
        return [{'p': p, 'r': r, 'multiplicity': m} for p, r, m in self.components]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> 'AbelianGroupSpec':
        return cls((int(c['p']), int(c['r']), int(c['multiplicity'])) for c in data)

    def __eq__(self, other):
        if not isinstance(other, AbelianGroupSpec):
            return False
        return self.components == other.components

    def __hash__(self):
        return hash(('group', self.components))

    def __repr__(self):
        return 'AbelianGroupSpec({})'.format(' + '.join(
            'Z{}^{}'.format(p ** r, m) if m > 1 else 'Z{}'.format(p ** r)
            for p, r, m in self.components
        ))


class ThetaVector(UserTuple):
    """θ-vector: one non-negative integer per (p, r) ∈ Q(G), in the
    order of `AbelianGroupSpec.q_set`
    """


class WeightVector(UserTuple):
    """Pmf w on Q(G), in the order of `AbelianGroupSpec.q_set`"""
    def __init__(self, initlist: Union[Sequence[float], UserTuple] = None):
        super().__init__(float(x) for x in (initlist or ()))
        if any(x < 0 for x in self.data) or abs(sum(self.data) - 1.0) > 1e-12:
            raise DomainError('Weights must be a pmf, got {}'.format(self.data))

    @classmethod
    def uniform(cls, group: AbelianGroupSpec) -> 'WeightVector':
        n = len(group.q_set)
        return cls([1.0 / n] * n)


def _as_q_vector(group: AbelianGroupSpec, values: Union[Sequence[int], Mapping]) -> Tuple[int, ...]:
    if isinstance(values, Mapping):
        values = [values[q] for q in group.q_set]
    values = tuple(int(v) for v in values)
    if len(values) != len(group.q_set):
        raise DomainError('Expected {} components, got {}'.format(len(group.q_set), len(values)))
    return values


def theta_map(group: AbelianGroupSpec, theta_hat: Union[Sequence[int], Mapping]) -> ThetaVector:
    """θ_{p,r} = min over s with (p,s) ∈ Q(G) of |r-s|⁺ + θ̂_{p,s}

    Raises:
        DomainError: some θ̂_{q,s} lies outside [0, s]
    """
    theta_hat = _as_q_vector(group, theta_hat)
    for (q, s), value in zip(group.q_set, theta_hat):
        if not 0 <= value <= s:
            raise DomainError('theta_hat for ({}, {}) must be in [0, {}], got {}'.format(
                q, s, s, value
            ))

    hat = dict(zip(group.q_set, theta_hat))
    return ThetaVector(
        min(max(r - s, 0) + hat[(q, s)] for (q, s) in group.q_set if q == p)
        for p, r in group.q_set
    )


def theta_set(group: AbelianGroupSpec) -> Tuple[ThetaVector, ...]:
    """Θ as the image of `theta_map` over every admissible θ̂, sorted"""
    ranges = [range(s + 1) for _, s in group.q_set]
    return tuple(sorted({theta_map(group, hat) for hat in itertools.product(*ranges)}))


class Subgroup:
    """H_θ = ⊕ p^{θ_{p,r}} Z_{p^r}^{M_{p,r}} together with the coset
    label map x ↦ [x]_θ

    Attributes:
        order (int): |H_θ|
        index (int): |G:H_θ|
        labels (np.ndarray): coset label (0..index-1) of every element
            index of G
    """
    def __init__(self, group: AbelianGroupSpec, theta: ThetaVector):
        self.group = group
        self.theta = theta
        by_q = dict(zip(group.q_set, theta))
        label_moduli = [p ** by_q[(p, r)] for p, r, _ in group.coordinates]
        self.index = int(np.prod(label_moduli))
        self.order = group.order // self.index

        residues = group.residues(np.arange(group.order))
        labels = np.zeros(group.order, dtype=np.int64)
        for i, mod in enumerate(label_moduli):
            labels = labels * mod + residues[:, i] % mod
        self.labels = labels

    @property
    def members(self) -> np.ndarray:
        """Element indices of H_θ itself"""
        return np.flatnonzero(self.labels == 0)

    def __repr__(self):
        return 'Subgroup(theta={}, order={}, index={})'.format(self.theta.data, self.order, self.index)


def subgroup_H(group: AbelianGroupSpec, theta: Union[ThetaVector, Sequence[int]]) -> Subgroup:
    """
    Raises:
        DomainError: θ ∉ Θ
    """
    theta = ThetaVector(_as_q_vector(group, theta))
    if theta not in theta_set(group):
        raise DomainError('{} is not in Theta of {}'.format(theta.data, group))
    return Subgroup(group, theta)


def omega(group: AbelianGroupSpec, theta: Union[ThetaVector, Sequence[int]], w: WeightVector) -> float:
    """ω_θ = Σ θ_{p,r} w_{p,r} log p / Σ r w_{p,r} log p"""
    theta = _as_q_vector(group, theta)
    if len(w) != len(group.q_set):
        raise DomainError('Weight vector length must be {}'.format(len(group.q_set)))
    num = sum(t * wt * math.log2(p) for t, wt, (p, _) in zip(theta, w, group.q_set))
    den = sum(r * wt * math.log2(p) for wt, (p, r) in zip(w, group.q_set))
    return num / den


def parse_algebra(value: Union[str, Mapping]) -> Union[FieldSpec, AbelianGroupSpec]:
    """Algebra from a short name, `F<order>` for a field or `Z<n>` for a
    cyclic group, or from its JSON object `{"field": {"p": 2, "m": 3}}`
    / `{"group": [{"p": 2, "r": 2, "multiplicity": 1}]}`

    Raises:
        ParseError: unrecognized value
    """
    if isinstance(value, str):
        name = value.strip()
        if len(name) > 1 and name[0] in 'FZ' and name[1:].isdigit():
            order = int(name[1:])
            return field_make(order) if name[0] == 'F' else AbelianGroupSpec.cyclic(order)
        raise ParseError('Algebra name must look like F7 or Z4, got {!r}'.format(value))
    if isinstance(value, Mapping):
        try:
            if 'field' in value:
                spec = value['field']
                return field_make(int(spec)) if isinstance(spec, int) else FieldSpec.from_json(spec)
            if 'group' in value:
                return AbelianGroupSpec.from_json(value['group'])
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError('Malformed algebra object: {}'.format(e))
    raise ParseError('Algebra must be a name or an object with "field" or "group", got {!r}'.format(value))
