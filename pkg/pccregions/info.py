__all__ = [
    'PMF_TOLERANCE',
    'JointPmf',
    'QuotientVariable',
    'check_probability',
    'entropy',
    'conditional_entropy',
    'binary_entropy',
    'binary_convolve',
    'mutual_information',
    'group_source_info',
    'group_channel_info',
    'channel_capacity'
]
import itertools
import math
import string
from typing import Sequence, Mapping, Callable, Iterable, Tuple, Optional, Union

import numpy as np

from .algebra import AbelianGroupSpec, WeightVector, ThetaVector, Subgroup, theta_set, omega
from .exceptions import DomainError

PMF_TOLERANCE = 1e-12

Axes = Union[str, Sequence[str]]


def _as_axes(axes: Optional[Axes]) -> Tuple[str, ...]:
    if axes is None:
        return ()
    if isinstance(axes, str):
        return (axes, )
    return tuple(axes)


def check_probability(value: float, name: str = 'probability') -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise DomainError('{} must be in [0, 1], got {}'.format(name, value))
    return value


class JointPmf:
    """Probability tensor over named finite axes.

    Axis values are 0-indexed integers. Instances are immutable: every
    transformation returns a new pmf.
    """
    def __init__(self, axes: Sequence[str], probs, tol: float = PMF_TOLERANCE):
        axes = tuple(axes)
        probs = np.array(probs, dtype=float)
        if probs.ndim != len(axes):
            raise DomainError('Pmf has {} dimensions but {} axes given'.format(probs.ndim, len(axes)))
        if len(set(axes)) != len(axes):
            raise DomainError('Axis names must be unique, got {}'.format(axes))
        if np.any(probs < -tol):
            raise DomainError('Pmf entries must be non-negative')
        total = probs.sum()
        if abs(total - 1.0) > tol:
            raise DomainError('Pmf total mass must be 1, got {!r}'.format(total))

        probs = np.clip(probs, 0.0, None)
        probs.setflags(write=False)
        self.axes = axes
        self.probs = probs

    @property
    def sizes(self) -> Mapping[str, int]:
        return dict(zip(self.axes, self.probs.shape))

    def size(self, axis: str) -> int:
        return self.probs.shape[self._position(axis)]

    def _position(self, axis: str) -> int:
        try:
            return self.axes.index(axis)
        except ValueError:
            raise DomainError('Unknown axis {!r}, available are: {}'.format(axis, self.axes))

    def marginal(self, axes: Axes) -> 'JointPmf':
        """Marginal over `axes`, in the given order"""
        axes = _as_axes(axes)
        positions = [self._position(a) for a in axes]
        dropped = tuple(i for i in range(len(self.axes)) if i not in positions)
        probs = self.probs.sum(axis=dropped) if dropped else self.probs
        kept = [i for i in range(len(self.axes)) if i in positions]
        order = [kept.index(p) for p in positions]
        return JointPmf(axes, np.transpose(probs, order), tol=1e-9)

    def apply(self, name: str, sources: Axes, fn: Callable[..., np.ndarray], size: int) -> 'JointPmf':
        """Append a derived axis `name` = fn(*sources).

        `fn` receives integer arrays (broadcast grids over the source
        alphabets) and must return integers in [0, size).
        """
        sources = _as_axes(sources)
        if name in self.axes:
            raise DomainError('Axis {!r} already exists'.format(name))
        grids = np.meshgrid(*[np.arange(self.size(s)) for s in sources], indexing='ij')
        values = np.asarray(fn(*grids), dtype=np.int64)
        if values.shape != tuple(self.size(s) for s in sources):
            values = np.broadcast_to(values, tuple(self.size(s) for s in sources))
        if np.any(values < 0) or np.any(values >= size):
            raise DomainError('Derived axis {!r} values must lie in [0, {})'.format(name, size))
        onehot = (values[..., None] == np.arange(size)).astype(float)

        letters = string.ascii_letters
        src = ''.join(letters[self._position(s)] for s in sources)
        out = letters[:len(self.axes)]
        new = letters[len(self.axes)]
        probs = np.einsum('{},{}{}->{}{}'.format(out, src, new, out, new), self.probs, onehot)
        return JointPmf(self.axes + (name, ), probs, tol=1e-9)

    def relabel(self, axis: str, permutation: Sequence[int]) -> 'JointPmf':
        """Rename the symbols of `axis`: symbol i becomes permutation[i]"""
        pos = self._position(axis)
        permutation = np.asarray(permutation)
        if sorted(permutation.tolist()) != list(range(self.size(axis))):
            raise DomainError('Not a permutation of the {!r} alphabet'.format(axis))
        probs = np.zeros_like(self.probs)
        moved = np.moveaxis(probs, pos, 0)
        moved[permutation] = np.moveaxis(self.probs, pos, 0)
        return JointPmf(self.axes, probs)

    def condition_on(self, assignment: Mapping[str, int]) -> Optional['JointPmf']:
        """Conditional pmf of the remaining axes given the assignment,
        None when the assignment has zero probability
        """
        index = [slice(None)] * len(self.axes)
        for axis, value in assignment.items():
            index[self._position(axis)] = int(value)
        sliced = self.probs[tuple(index)]
        mass = sliced.sum()
        if mass <= 0:
            return None
        axes = tuple(a for a in self.axes if a not in assignment)
        return JointPmf(axes, sliced / mass, tol=1e-9)

    def average_given(self, given: Axes, fn: Callable[['JointPmf'], float]) -> float:
        """p_Q-weighted average of fn over the conditional pmfs given
        the `given` axes. Zero-probability conditions contribute 0
        """
        given = _as_axes(given)
        if not given:
            return fn(self)
        weights = self.marginal(given).probs
        res = 0.0
        for values in itertools.product(*[range(self.size(g)) for g in given]):
            weight = weights[values]
            if weight <= 0:
                continue
            res += weight * fn(self.condition_on(dict(zip(given, values))))
        return res

    def expectation(self, axis: str, values: Sequence[float]) -> float:
        return float(np.dot(self.marginal(axis).probs, np.asarray(values, dtype=float)))

    @classmethod
    def product(cls, *pmfs: 'JointPmf') -> 'JointPmf':
        """Independent joint of pmfs over disjoint axes"""
        axes = sum((p.axes for p in pmfs), ())
        probs = np.ones(())
        for p in pmfs:
            probs = np.multiply.outer(probs, p.probs)
        return cls(axes, probs, tol=1e-9)

    @classmethod
    def from_vector(cls, axis: str, probs: Sequence[float]) -> 'JointPmf':
        return cls((axis, ), probs)

    def to_json(self) -> dict:
        return {'axes': list(self.axes), 'probs': self.probs.tolist()}

    def __eq__(self, other):
        if not isinstance(other, JointPmf):
            return False
        return self.axes == other.axes and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.axes, self.probs.tobytes()))

    def __repr__(self):
        return 'JointPmf({})'.format(', '.join('{}:{}'.format(a, s) for a, s in self.sizes.items()))


def _flat_entropy(probs: np.ndarray) -> float:
    probs = probs[probs > 0]
    return float(-np.sum(probs * np.log2(probs)))


def entropy(pmf: JointPmf, axes: Axes) -> float:
    """Joint entropy in bits of the given axes

    Raises:
        DomainError: empty axis set or unknown axis
    """
    axes = _as_axes(axes)
    if not axes:
        raise DomainError('Entropy of an empty axis set is undefined')
    return _flat_entropy(pmf.marginal(axes).probs.ravel())


def conditional_entropy(pmf: JointPmf, axes: Axes, given: Optional[Axes] = None) -> float:
    """H(axes | given) = H(axes, given) − H(given)"""
    axes, given = _as_axes(axes), _as_axes(given)
    given = tuple(g for g in given if g not in axes)
    if not given:
        return entropy(pmf, axes)
    return max(entropy(pmf, axes + given) - entropy(pmf, given), 0.0)


def mutual_information(pmf: JointPmf, axes_a: Axes, axes_b: Axes, given: Optional[Axes] = None) -> float:
    """I(A; B | C) in bits, clamped at 0 against rounding

    Raises:
        DomainError: the axis sets overlap
    """
    a, b, c = _as_axes(axes_a), _as_axes(axes_b), _as_axes(given)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise DomainError('Axis sets must be disjoint, got {}, {}, {}'.format(a, b, c))
    if not a or not b:
        raise DomainError('Mutual information needs two non-empty axis sets')
    value = conditional_entropy(pmf, a, c) - conditional_entropy(pmf, a, b + c)
    return max(value, 0.0)


def binary_entropy(p: float) -> float:
    """h_b(p) in bits"""
    p = check_probability(p)
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def binary_convolve(alpha: float, beta: float) -> float:
    """α * β = α(1−β) + (1−α)β"""
    alpha, beta = check_probability(alpha), check_probability(beta)
    return alpha * (1 - beta) + (1 - alpha) * beta


class QuotientVariable:
    """[X]_θ = X + H_θ as a derived axis of a pmf"""
    def __init__(self, source: str, group: AbelianGroupSpec, theta: ThetaVector):
        self.source = source
        self.group = group
        self.subgroup = Subgroup(group, ThetaVector(theta))

    @property
    def size(self) -> int:
        return self.subgroup.index

    def pushforward(self, pmf: JointPmf, name: Optional[str] = None) -> JointPmf:
        if pmf.size(self.source) != self.group.order:
            raise DomainError('Axis {!r} alphabet must be the group {}'.format(self.source, self.group))
        labels = self.subgroup.labels
        return pmf.apply(name or '[{}]'.format(self.source), self.source, lambda x: labels[x], self.size)


def _group_terms(group: AbelianGroupSpec, w: WeightVector):
    """(θ, ω_θ, subgroup) for every θ ∈ Θ"""
    return [(theta, omega(group, theta, w), Subgroup(group, theta)) for theta in theta_set(group)]


def _group_info(pmf: JointPmf, x: str, y: Tuple[str, ...], group: AbelianGroupSpec,
                w: Optional[WeightVector], source: bool) -> float:
    if pmf.size(x) != group.order:
        raise DomainError('Axis {!r} alphabet must be the group {} of order {}'.format(
            x, group, group.order
        ))
    if w is None:
        w = WeightVector.uniform(group)
    log_g = math.log2(group.order)
    base = entropy(pmf, x) - log_g
    label = '[{}]'.format(x)
    values = []
    for theta, om, sub in _group_terms(group, w):
        if source:
            # θ = 0 is excluded; θ with zero weight carries no constraint
            if om <= 0:
                continue
            quotient = pmf.apply(label, x, lambda v: sub.labels[v], sub.index)
            values.append((math.log2(sub.index) - conditional_entropy(quotient, label, y)) / om)
        else:
            if om >= 1:
                continue
            quotient = pmf.apply(label, x, lambda v: sub.labels[v], sub.index)
            values.append(
                (math.log2(sub.order) - conditional_entropy(quotient, x, (label, ) + y)) / (1 - om)
            )
    return base + (max(values) if source else min(values))


def group_source_info(pmf: JointPmf, x: str, y: Optional[Axes], group: AbelianGroupSpec,
                      w: Optional[WeightVector] = None, given: Optional[Axes] = None) -> float:
    """Source coding group mutual information S_w^G(X; Y | given).

    An empty `y` stands for a constant observation. The conditional
    version averages the per-value quantity over the `given` axes.
    """
    y = _as_axes(y)
    return pmf.average_given(given, lambda p: _group_info(p, x, y, group, w, source=True))


def group_channel_info(pmf: JointPmf, x: str, y: Optional[Axes], group: AbelianGroupSpec,
                       w: Optional[WeightVector] = None, given: Optional[Axes] = None) -> float:
    """Channel coding group mutual information C_w^G(X; Y | given)"""
    y = _as_axes(y)
    return pmf.average_given(given, lambda p: _group_info(p, x, y, group, w, source=False))


def _ba_iterate(w: np.ndarray, costs: np.ndarray, s: float, tol: float, max_iter: int) -> np.ndarray:
    p = np.full(w.shape[0], 1.0 / w.shape[0])
    for _ in range(max_iter):
        q = p @ w
        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = np.where(w > 0, w * np.log2(np.where(w > 0, w, 1) / np.where(q > 0, q, 1)), 0.0)
        divergence = ratio.sum(axis=1)
        p_new = p * np.exp2(divergence - s * costs)
        p_new /= p_new.sum()
        if np.abs(p_new - p).max() < tol:
            return p_new
        p = p_new
    return p


def _mi(p: np.ndarray, w: np.ndarray) -> float:
    joint = p[:, None] * w
    return _flat_entropy(joint.sum(axis=0)) - sum(
        px * _flat_entropy(row) for px, row in zip(p, w)
    )


def channel_capacity(w, costs: Optional[Sequence[float]] = None, budget: Optional[float] = None,
                     tol: float = 1e-10, max_iter: int = 20000) -> Tuple[float, np.ndarray]:
    """Blahut–Arimoto capacity of a point-to-point channel, optionally
    under an average cost budget E[κ(X)] ≤ budget.

    The cost constraint is handled by the Lagrangian I − s·E[κ] with
    the multiplier s ≥ 0 found by bisection.

    Args:
        w: transition matrix, rows indexed by input symbol
        costs: cost per input symbol
        budget: average cost budget

    Returns:
        Tuple[float, np.ndarray]: capacity in bits and the input pmf
            achieving it
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or np.any(np.abs(w.sum(axis=1) - 1) > 1e-9):
        raise DomainError('Transition matrix rows must be pmfs')
    costs = np.zeros(w.shape[0]) if costs is None else np.asarray(costs, dtype=float)
    if budget is not None and budget < costs.min() - 1e-12:
        raise DomainError('Budget {} is below the cheapest input cost {}'.format(budget, costs.min()))

    p = _ba_iterate(w, costs, 0.0, tol, max_iter)
    if budget is None or p @ costs <= budget + 1e-12:
        return _mi(p, w), p

    lo, hi = 0.0, 1.0
    while _ba_iterate(w, costs, hi, tol, max_iter) @ costs > budget:
        hi *= 2
        if hi > 1e6:
            break
    for _ in range(60):
        mid = (lo + hi) / 2
        p = _ba_iterate(w, costs, mid, tol, max_iter)
        if p @ costs > budget:
            lo = mid
        else:
            hi = mid
    p = _ba_iterate(w, costs, hi, tol, max_iter)
    return _mi(p, w), p
