__all__ = [
    'EPSILON',
    'RATE_VARIABLES',
    'PROBE_DIRECTIONS',
    'Halfspace',
    'LinearSystem',
    'RatePolytope',
    'MembershipVerdict',
    'fm_eliminate'
]
import logging
from fractions import Fraction
from numbers import Real
from typing import Sequence, Mapping, Iterable, Tuple, Optional, Union, Dict, List, FrozenSet

import numpy as np
from scipy.optimize import linprog

from ..enums import Relation, Membership
from ..exceptions import DomainError, ParseError

logger = logging.getLogger(__name__)

EPSILON = 1e-9
REDUNDANCY_TOLERANCE = 1e-10
RATE_VARIABLES = ('R1', 'R2', 'R3')
PROBE_DIRECTIONS = (
    (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (1, 1, 0), (1, 0, 1), (0, 1, 1),
    (1, 1, 1)
)

Number = Union[int, float, Fraction]


def _exact(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    value = float(value)
    if not np.isfinite(value):
        raise DomainError('Constraint data must be finite, got {}'.format(value))
    return Fraction(value)


class Halfspace:
    """Linear constraint `coeffs·x REL rhs` over the variables of the
    owning system. Coefficients and right-hand side are exact rationals.

    `origin` holds the labels of the input constraints this one was
    derived from by elimination.
    """
    __slots__ = ('coeffs', 'relation', 'rhs', 'origin')

    def __init__(self, coeffs: Sequence[Number], relation: Union[Relation, str], rhs: Number,
                 origin: Union[str, Iterable[str]] = ()):
        self.coeffs = tuple(_exact(c) for c in coeffs)
        self.relation = Relation(relation)
        self.rhs = _exact(rhs)
        self.origin = frozenset([origin] if isinstance(origin, str) else origin)  # type: FrozenSet[str]

    @property
    def label(self) -> str:
        return ' + '.join(sorted(self.origin))

    @property
    def is_trivial(self) -> bool:
        return not any(self.coeffs)

    def margin(self, point: Sequence[float]) -> float:
        """rhs − coeffs·x; non-negative iff the closed constraint holds"""
        return float(self.rhs) - float(np.dot([float(c) for c in self.coeffs], point))

    def scaled(self, factor: Fraction) -> 'Halfspace':
        return Halfspace([c * factor for c in self.coeffs], self.relation, self.rhs * factor, self.origin)

    def normalized(self) -> 'Halfspace':
        scale = max((abs(c) for c in self.coeffs), default=Fraction(0))
        return self.scaled(1 / scale) if scale else self

    def without(self, index: int) -> 'Halfspace':
        return Halfspace(self.coeffs[:index] + self.coeffs[index + 1:], self.relation, self.rhs, self.origin)

    def __eq__(self, other):
        if not isinstance(other, Halfspace):
            return False
        return (self.coeffs, self.relation, self.rhs) == (other.coeffs, other.relation, other.rhs)

    def __hash__(self):
        return hash((self.coeffs, self.relation, self.rhs))

    def __repr__(self):
        return 'Halfspace({}, {!r}, {})'.format(
            [str(c) for c in self.coeffs], self.relation.value, float(self.rhs)
        )


class MembershipVerdict:
    """Outcome of a membership query.

    Attributes:
        status (Membership): interior, boundary or outside
        margin (float): smallest constraint slack at the best witness
        witness (Dict[str, float]): values of the auxiliary variables
            (empty for plain polytopes)
    """
    def __init__(self, status: Membership, margin: float, witness: Optional[Mapping[str, float]] = None):
        self.status = status
        self.margin = margin
        self.witness = dict(witness or {})

    @property
    def feasible(self) -> bool:
        return self.status.feasible

    @property
    def is_member(self) -> bool:
        return self.status is Membership.interior

    def to_dict(self) -> dict:
        return {'status': self.status.value, 'margin': self.margin, 'witness': self.witness}

    def __repr__(self):
        return 'MembershipVerdict({}, margin={:.3g})'.format(self.status.value, self.margin)


def _classify(margin: float, eps: float) -> Membership:
    if margin > eps:
        return Membership.interior
    if margin >= -eps:
        return Membership.boundary
    return Membership.outside


class LinearSystem:
    """System of linear constraints over named variables.

    Strict and non-strict inequalities are kept apart so that
    elimination tracks strictness; feasibility and membership work on
    the closure with a slack `eps`.

    Instances are not modified after construction, every
    transformation returns a new system.
    """
    def __init__(self, variables: Sequence[str], halfspaces: Iterable[Halfspace] = ()):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise DomainError('Variable names must be unique')
        self.halfspaces = tuple(halfspaces)
        for h in self.halfspaces:
            if len(h.coeffs) != len(self.variables):
                raise DomainError('Constraint has {} coefficients, system has {} variables'.format(
                    len(h.coeffs), len(self.variables)
                ))

    def _copy_with(self, halfspaces: Iterable[Halfspace]) -> 'LinearSystem':
        return self.__class__(self.variables, halfspaces)

    def row(self, coeffs: Mapping[str, Number], relation: Union[Relation, str], rhs: Number,
            label: str = '') -> Halfspace:
        unknown = set(coeffs) - set(self.variables)
        if unknown:
            raise DomainError('Unknown variables {}'.format(sorted(unknown)))
        return Halfspace([coeffs.get(v, 0) for v in self.variables], relation, rhs, label)

    def constrain(self, coeffs: Mapping[str, Number], relation: Union[Relation, str], rhs: Number,
                  label: str = '') -> 'LinearSystem':
        """Copy of the system with one more constraint"""
        return self._copy_with(self.halfspaces + (self.row(coeffs, relation, rhs, label), ))

    def nonnegative(self, variables: Optional[Iterable[str]] = None) -> 'LinearSystem':
        """Copy of the system with `x ≥ 0` for the given (default all)
        variables
        """
        variables = self.variables if variables is None else tuple(variables)
        rows = [self.row({v: -1}, Relation.le, 0, '{} >= 0'.format(v)) for v in variables]
        return self._copy_with(self.halfspaces + tuple(rows))

    def index(self, variable: str) -> int:
        try:
            return self.variables.index(variable)
        except ValueError:
            raise DomainError('Unknown variable {!r}, available are: {}'.format(variable, self.variables))

    def __len__(self):
        return len(self.halfspaces)

    def __iter__(self):
        return iter(self.halfspaces)

    def _vector(self, point: Union[Mapping[str, float], Sequence[float]]) -> np.ndarray:
        if isinstance(point, Mapping):
            missing = set(self.variables) - set(point)
            if missing:
                raise DomainError('Point lacks values of {}'.format(sorted(missing)))
            return np.array([float(point[v]) for v in self.variables])
        point = np.asarray(point, dtype=float)
        if point.shape != (len(self.variables), ):
            raise DomainError('Point must have {} coordinates'.format(len(self.variables)))
        return point

    def margins(self, point: Union[Mapping[str, float], Sequence[float]]) -> np.ndarray:
        """Slack of every constraint at the point; equalities give
        −|residual|
        """
        x = self._vector(point)
        res = []
        for h in self.halfspaces:
            m = h.margin(x)
            res.append(-abs(m) if h.relation is Relation.eq else m)
        return np.array(res)

    def contains(self, point: Union[Mapping[str, float], Sequence[float]], eps: float = EPSILON) -> Membership:
        """Membership of a full point: interior when every inequality has
        slack above eps, boundary when some slack is within eps
        """
        x = self._vector(point)
        worst = float('inf')
        for h in self.halfspaces:
            m = h.margin(x)
            if h.relation is Relation.eq:
                if abs(m) > eps:
                    return Membership.outside
                continue
            worst = min(worst, m)
        return _classify(worst, eps)

    def face_distance(self, point: Union[Mapping[str, float], Sequence[float]]) -> float:
        """Euclidean distance from the point to the nearest constraint
        hyperplane
        """
        x = self._vector(point)
        res = float('inf')
        for h in self.halfspaces:
            norm = float(np.linalg.norm([float(c) for c in h.coeffs]))
            if norm > 0:
                res = min(res, abs(h.margin(x)) / norm)
        return res

    def _matrices(self, halfspaces: Sequence[Halfspace], columns: Sequence[int]):
        ub = [h for h in halfspaces if h.relation is not Relation.eq]
        eq = [h for h in halfspaces if h.relation is Relation.eq]

        def mat(rows):
            if not rows:
                return None, None
            a = np.array([[float(h.coeffs[c]) for c in columns] for h in rows]).reshape(len(rows), len(columns))
            b = np.array([float(h.rhs) for h in rows])
            return a, b

        return mat(ub), mat(eq)

    def substitute(self, values: Mapping[str, Number]) -> 'LinearSystem':
        """Fix some variables to values, moving them to the right-hand
        side
        """
        fixed = {self.index(v): _exact(x) for v, x in values.items()}
        keep = [i for i in range(len(self.variables)) if i not in fixed]
        rows = []
        for h in self.halfspaces:
            rhs = h.rhs - sum(h.coeffs[i] * x for i, x in fixed.items())
            rows.append(Halfspace([h.coeffs[i] for i in keep], h.relation, rhs, h.origin))
        return LinearSystem([self.variables[i] for i in keep], rows)

    def feasible(self, fixed: Optional[Mapping[str, Number]] = None, eps: float = EPSILON) -> MembershipVerdict:
        """Decide whether the fixed values extend to a point of the
        system by maximizing a uniform slack t over all inequalities.

        Returns:
            MembershipVerdict: interior if t* > eps, boundary if
                t* ≥ −eps, outside otherwise; the witness holds the
                free variables at the optimum
        """
        system = self.substitute(fixed or {})
        n = len(system.variables)
        (a_ub, b_ub), (a_eq, b_eq) = system._matrices(system.halfspaces, range(n))
        if a_ub is None:
            a_ub, b_ub = np.zeros((1, n)), np.ones(1)
        a_ub = np.hstack([a_ub, np.ones((a_ub.shape[0], 1))])
        if a_eq is not None:
            a_eq = np.hstack([a_eq, np.zeros((a_eq.shape[0], 1))])
        c = np.zeros(n + 1)
        c[-1] = -1.0
        bounds = [(None, None)] * n + [(None, 1.0)]
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method='highs')
        if res.status == 2:
            return MembershipVerdict(Membership.outside, float('-inf'))
        if res.status != 0:
            logger.warning('LP feasibility solver returned status %s: %s', res.status, res.message)
            return MembershipVerdict(Membership.outside, float('-inf'))
        t = float(res.x[-1])
        witness = dict(zip(system.variables, (float(v) for v in res.x[:-1])))
        return MembershipVerdict(_classify(t, eps), t, witness)

    def maximize(self, objective: Mapping[str, float]) -> Tuple[float, Dict[str, float]]:
        """Support function of the closure in direction `objective`

        Raises:
            DomainError: the system is empty or unbounded in that direction
        """
        n = len(self.variables)
        (a_ub, b_ub), (a_eq, b_eq) = self._matrices(self.halfspaces, range(n))
        c = -np.array([float(objective.get(v, 0.0)) for v in self.variables])
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                      bounds=[(None, None)] * n, method='highs')
        if res.status != 0:
            raise DomainError('Cannot maximize over the system: {}'.format(res.message))
        return float(-res.fun), dict(zip(self.variables, (float(v) for v in res.x)))

    def deduplicated(self) -> 'LinearSystem':
        """Drop tautologies and keep the tightest of parallel constraints"""
        best = {}  # type: Dict[tuple, Halfspace]
        order = []
        for h in self.halfspaces:
            if h.is_trivial:
                holds = (h.rhs == 0) if h.relation is Relation.eq else (
                    h.rhs > 0 or (h.rhs == 0 and not h.relation.strict)
                )
                if holds:
                    continue
            n = h.normalized()
            key = (n.coeffs, n.relation is Relation.eq, n.rhs if n.relation is Relation.eq else None)
            current = best.get(key)
            if current is None:
                best[key] = n
                order.append(key)
            elif n.relation is not Relation.eq and (
                    n.rhs < current.rhs or (n.rhs == current.rhs and n.relation.strict)):
                best[key] = n
        return self._copy_with(best[k] for k in order)

    def pruned(self) -> 'LinearSystem':
        """Remove inequalities implied by the others (LP test on the
        closure)
        """
        rows = list(self.deduplicated().halfspaces)
        n = len(self.variables)
        i = 0
        while i < len(rows):
            h = rows[i]
            if h.relation is Relation.eq or h.is_trivial:
                i += 1
                continue
            others = rows[:i] + rows[i + 1:]
            (a_ub, b_ub), (a_eq, b_eq) = self._matrices(others, range(n))
            c = -np.array([float(x) for x in h.coeffs])
            res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                          bounds=[(None, None)] * n, method='highs')
            redundant = res.status == 2 or (
                res.status == 0 and -res.fun <= float(h.rhs) + REDUNDANCY_TOLERANCE * (1 + abs(float(h.rhs)))
            )
            if redundant:
                rows.pop(i)
            else:
                i += 1
        return self._copy_with(rows)

    def eliminate(self, variable: str, prune: bool = True) -> 'LinearSystem':
        return fm_eliminate(self, variable, prune=prune)

    def project(self, keep: Sequence[str], prune: bool = True) -> 'LinearSystem':
        """Fourier–Motzkin projection onto the `keep` variables, in that
        order
        """
        system = self
        for v in [v for v in self.variables if v not in keep]:
            system = fm_eliminate(system, v, prune=prune)
        order = [system.index(v) for v in keep]
        rows = [Halfspace([h.coeffs[i] for i in order], h.relation, h.rhs, h.origin) for h in system]
        return LinearSystem(keep, rows)

    def to_json(self) -> dict:
        return {
            'variables': list(self.variables),
            'halfspaces': [
                {
                    'coeffs': {v: float(c) for v, c in zip(self.variables, h.coeffs) if c},
                    'rel': h.relation.value,
                    'rhs': float(h.rhs),
                    'label': h.label,
                }
                for h in self.halfspaces
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> 'LinearSystem':
        try:
            variables = list(data['variables'])
            system = LinearSystem(variables)
            rows = [
                system.row(h['coeffs'], h['rel'], h['rhs'], h.get('label', ''))
                for h in data['halfspaces']
            ]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError('Malformed linear system document: {}'.format(e))
        return cls(variables, rows)

    def __repr__(self):
        return '{}(variables={}, constraints={})'.format(
            self.__class__.__name__, self.variables, len(self.halfspaces)
        )


def fm_eliminate(system: LinearSystem, variable: str, prune: bool = True) -> LinearSystem:
    """Exact Fourier–Motzkin elimination of one variable.

    An equality containing the variable is used for substitution;
    otherwise every pair of constraints with opposite signs on the
    variable is combined. Strictness survives combination if either
    constraint is strict.

    Args:
        system (LinearSystem): input system
        variable (str): variable to eliminate
        prune (bool): remove redundant constraints afterwards by LP

    Returns:
        LinearSystem: system over the remaining variables with exactly
            the shadow of the input
    """
    k = system.index(variable)
    pivot = next((h for h in system if h.relation is Relation.eq and h.coeffs[k] != 0), None)
    rows = []  # type: List[Halfspace]

    if pivot is not None:
        for h in system:
            if h is pivot:
                continue
            if h.coeffs[k] == 0:
                rows.append(h.without(k))
                continue
            factor = h.coeffs[k] / pivot.coeffs[k]
            coeffs = [a - factor * b for a, b in zip(h.coeffs, pivot.coeffs)]
            rows.append(Halfspace(coeffs, h.relation, h.rhs - factor * pivot.rhs,
                                  h.origin | pivot.origin).without(k))
    else:
        positive, negative = [], []
        for h in system:
            if h.coeffs[k] == 0:
                rows.append(h.without(k))
            elif h.relation is Relation.eq:
                raise AssertionError('equality with the variable is handled by substitution')
            elif h.coeffs[k] > 0:
                positive.append(h)
            else:
                negative.append(h)

        for p in positive:
            for n in negative:
                pos_scalar, neg_scalar = p.coeffs[k], n.coeffs[k]
                coeffs = [a * -neg_scalar + b * pos_scalar for a, b in zip(p.coeffs, n.coeffs)]
                rhs = p.rhs * -neg_scalar + n.rhs * pos_scalar
                rows.append(Halfspace(coeffs, p.relation.combine(n.relation), rhs,
                                      p.origin | n.origin).without(k))

    result = LinearSystem(system.variables[:k] + system.variables[k + 1:], rows).deduplicated()
    if prune:
        result = result.pruned()
    logger.debug('eliminated %s: %d -> %d constraints', variable, len(system), len(result))
    return result


class RatePolytope(LinearSystem):
    """Linear system over the rate triple (R1, R2, R3)"""
    def __init__(self, variables: Sequence[str] = RATE_VARIABLES, halfspaces: Iterable[Halfspace] = ()):
        super().__init__(variables, halfspaces)
        if self.variables != RATE_VARIABLES:
            raise DomainError('Rate polytope variables must be {}'.format(RATE_VARIABLES))

    @classmethod
    def from_system(cls, system: LinearSystem) -> 'RatePolytope':
        if set(system.variables) != set(RATE_VARIABLES):
            system = system.project(RATE_VARIABLES)
        order = [system.index(v) for v in RATE_VARIABLES]
        return cls(RATE_VARIABLES, [
            Halfspace([h.coeffs[i] for i in order], h.relation, h.rhs, h.origin) for h in system
        ])

    def contains(self, point: Union[Mapping[str, float], Sequence[float]], eps: float = EPSILON) -> Membership:
        return super().contains(point, eps)

    def verdict(self, rates: Sequence[float], eps: float = EPSILON) -> MembershipVerdict:
        margins = self.margins(rates)
        worst = float(margins.min()) if len(margins) else float('inf')
        return MembershipVerdict(self.contains(rates, eps), worst)

    def maximize_rates(self, mu: Sequence[float]) -> Tuple[float, Tuple[float, float, float]]:
        """max μ·R over the closure and a maximizing rate triple"""
        value, point = self.maximize(dict(zip(RATE_VARIABLES, mu)))
        return value, tuple(max(point[v], 0.0) for v in RATE_VARIABLES)

    def bound(self, j: int) -> float:
        """Largest R_j in the closure"""
        return self.maximize_rates([1.0 if i == j else 0.0 for i in (1, 2, 3)])[0]

    def corner_probes(self) -> List[Tuple[Tuple[int, ...], Tuple[float, float, float]]]:
        """LP optima of the closure for a fixed set of weight directions"""
        return [(mu, self.maximize_rates(mu)[1]) for mu in PROBE_DIRECTIONS]

    @classmethod
    def from_json(cls, data: Mapping) -> 'RatePolytope':
        return cls.from_system(LinearSystem.from_json(data))
