__all__ = [
    'THREADS_ENV',
    'worker_threads',
    'SearchConfig',
    'SearchResult',
    'TraceRow',
    'Condition',
    'VerdictReport',
    'maximize_weighted_rate',
    'TABLE1_ALGEBRAS',
    'TABLE1_MU',
    'table1_search',
    'check_example1',
    'check_prop2',
    'compute_C1',
    'c1_profile',
    'check_prop3',
    'check_prop5',
    'check_example7',
    'example8_terms',
    'example8_corners'
]
import logging
import math
import operator
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence, Mapping, Optional, List, Tuple, Dict, Union, Any

import numpy as np
from scipy.optimize import minimize_scalar

from .algebra import FieldSpec, AbelianGroupSpec, WeightVector, field_make
from .channels import Channel3IC, make_example, push_forward
from .common import derive_seed
from .enums import RegionKind
from .exceptions import ConfigurationError, DomainError, InfeasibilityError, PCCError
from .info import (
    JointPmf, binary_entropy as h, binary_convolve as conv, check_probability,
    conditional_entropy, entropy, mutual_information
)
from .regions.evaluators import evaluate, support, alpha_f_3to1
from .regions.polytope import RATE_VARIABLES
from .regions.testchannel import LAYOUTS, KIND_LAYOUTS, TestChannel, identity_test_channel

logger = logging.getLogger(__name__)

THREADS_ENV = 'PCCREGIONS_THREADS'
LOG2_3 = math.log2(3)
SUPPORT_TOLERANCE = 1e-12

Algebra = Union[FieldSpec, AbelianGroupSpec]


def worker_threads() -> int:
    """Worker count from the environment, 1 when unset"""
    value = os.environ.get(THREADS_ENV, '1')
    try:
        threads = int(value)
    except ValueError:
        raise ConfigurationError('{} must be an integer, got {!r}'.format(THREADS_ENV, value))
    if threads < 1:
        raise ConfigurationError('{} must be at least 1'.format(THREADS_ENV))
    return threads


class SearchConfig:
    """Settings of the test-channel search.

    Args:
        kind (RegionKind): region to maximize over
        mu (Sequence[float]): weights of the objective μ·R
        algebra: field or group of the structured auxiliaries, binary
            field by default
        card_q (int): time-sharing alphabet size
        card_u (int): auxiliary alphabet size of unstructured kinds
        card_v (int): size of the unstructured layer of the uf kind
        restarts (int): number of random restarts
        iterations (int): refinement passes per restart
        step (float): initial coordinate step
        min_step (float): refinement stops below this step
        seed (int): master seed, restart seeds are derived from it
        share_factors (bool): users 2 and 3 use the same conditional pmf
        aligned_starts (bool): the first restarts of structured kinds
            start from deterministic maps x = a·u mod |X| instead of
            random pmfs
    """
    def __init__(self,
                 kind: Union[RegionKind, str] = RegionKind.alpha_f_3to1,
                 mu: Sequence[float] = (1.0, 1.0, 1.0),
                 algebra: Optional[Algebra] = None,
                 card_q: int = 1,
                 card_u: int = 2,
                 card_v: int = 2,
                 restarts: int = 4,
                 iterations: int = 20,
                 step: float = 0.1,
                 min_step: float = 1e-4,
                 seed: int = 0,
                 share_factors: bool = False,
                 aligned_starts: bool = True):
        self.kind = RegionKind(kind)
        if self.kind is RegionKind.beta:
            raise ConfigurationError('The outer bound is not searched over test channels')
        self.mu = tuple(float(m) for m in mu)
        if len(self.mu) != 3 or any(m < 0 for m in self.mu):
            raise ConfigurationError('mu must be three non-negative weights')
        if min(card_q, card_u, card_v, restarts, iterations) < 1:
            raise ConfigurationError('Alphabet caps, restarts and iterations must be at least 1')
        if not 0 < min_step <= step:
            raise ConfigurationError('Steps must satisfy 0 < min_step <= step')
        if algebra is None and self.kind is not RegionKind.alpha_u:
            algebra = AbelianGroupSpec.cyclic(2) if self.kind is RegionKind.alpha_g_3to1 else field_make(2)
        self.algebra = algebra
        self.card_q = card_q
        self.card_u = card_u
        self.card_v = card_v
        self.restarts = restarts
        self.iterations = iterations
        self.step = step
        self.min_step = min_step
        self.seed = seed
        self.share_factors = share_factors
        self.aligned_starts = aligned_starts

    def to_dict(self) -> dict:
        res = {k: v for k, v in vars(self).items() if k not in ('kind', 'algebra', 'mu')}
        res['kind'] = self.kind.value
        res['mu'] = list(self.mu)
        res['algebra'] = None if self.algebra is None else repr(self.algebra)
        return res


class TraceRow:
    __slots__ = ('restart', 'iteration', 'step', 'objective', 'best')

    def __init__(self, restart: int, iteration: int, step: float, objective: float, best: float):
        self.restart = restart
        self.iteration = iteration
        self.step = step
        self.objective = objective
        self.best = best

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__slots__}


class SearchResult:
    """Best test channel found, its rate triple and the search trace.
    `best` along the trace never decreases
    """
    def __init__(self, test_channel: TestChannel, rates: Tuple[float, float, float], value: float,
                 trace: List[TraceRow]):
        self.test_channel = test_channel
        self.rates = rates
        self.value = value
        self.trace = trace

    def __repr__(self):
        return 'SearchResult(value={:.6g}, rates={})'.format(self.value, tuple(round(r, 6) for r in self.rates))


def _user_shapes(ch: Channel3IC, cfg: SearchConfig) -> List[Tuple[int, ...]]:
    layout = KIND_LAYOUTS[cfg.kind]
    x = ch.inputs
    theta = cfg.card_u if cfg.algebra is None else cfg.algebra.order
    if layout == '3to1':
        return [(x[0], ), (theta, x[1]), (theta, x[2])]
    if layout == 'uf':
        return [(x[0], ), (theta, cfg.card_v, x[1]), (theta, cfg.card_v, x[2])]
    return [(theta, theta, x[0]), (theta, theta, x[1]), (theta, theta, x[2])]


def _algebra_fits(kind: RegionKind, algebra: Optional[Algebra]) -> bool:
    if kind is RegionKind.alpha_u:
        return algebra is None
    if kind is RegionKind.alpha_g_3to1:
        return isinstance(algebra, AbelianGroupSpec)
    return isinstance(algebra, FieldSpec)


def _algebras(cfg: SearchConfig) -> Dict[str, Algebra]:
    if cfg.algebra is None:
        return {}
    layout = LAYOUTS[KIND_LAYOUTS[cfg.kind]]
    structured = layout.aux if layout.name == 'general' else ('U2', 'U3')
    return {a: cfg.algebra for a in structured}


def _normalize(arr: np.ndarray, is_q: bool) -> np.ndarray:
    if is_q:
        return arr / arr.sum()
    flat = arr.reshape(arr.shape[0], -1)
    totals = flat.sum(axis=1, keepdims=True)
    uniform = np.full_like(flat, 1.0 / flat.shape[1])
    flat = np.where(totals > 0, flat / np.where(totals > 0, totals, 1.0), uniform)
    return flat.reshape(arr.shape)


def _project_costs(ch: Channel3IC, cand: List[np.ndarray]) -> List[np.ndarray]:
    """Mix every over-budget user toward a cheap cell until the budget
    is met. The target is the cheapest cell of the current support when
    it fits the budget, so a deterministic map from the auxiliary to the
    input keeps its support, otherwise the cheapest input symbol
    """
    q = cand[0]
    res = [q]
    for j, f in enumerate(cand[1:]):
        costs, budget = ch.costs[j], ch.budgets[j]
        cheapest = int(np.argmin(costs))
        if costs[cheapest] > budget:
            raise InfeasibilityError('User {} cannot meet its budget {} with any input'.format(j + 1, budget))
        flat = f.reshape(f.shape[0], -1)
        cell_costs = np.broadcast_to(costs, f.shape).reshape(flat.shape)
        cost = float(q @ (flat * cell_costs).sum(axis=1))
        if cost > budget:
            masked = np.where(flat > SUPPORT_TOLERANCE, cell_costs, np.inf)
            rows, cells = np.arange(flat.shape[0]), masked.argmin(axis=1)
            target_cost = float(q @ masked[rows, cells])
            if target_cost <= budget:
                target = np.zeros_like(flat)
                target[rows, cells] = 1.0
                target = target.reshape(f.shape)
            else:
                target = np.zeros_like(f)
                target[..., cheapest] = f.sum(axis=-1)
                target_cost = float(costs[cheapest])
            lam = min(1.0, (cost - budget) / (cost - target_cost) + 1e-12)
            f = (1 - lam) * f + lam * target
        res.append(f)
    return res


class _Objective:
    def __init__(self, ch: Channel3IC, cfg: SearchConfig):
        self.ch = ch
        self.cfg = cfg
        self.layout = KIND_LAYOUTS[cfg.kind]
        self.algebras = _algebras(cfg)
        self.w = WeightVector.uniform(cfg.algebra) if isinstance(cfg.algebra, AbelianGroupSpec) else None

    def __call__(self, cand: List[np.ndarray]):
        try:
            tc = TestChannel.from_factors(self.ch, cand[1:], self.layout, cand[0], self.algebras, self.w)
            region = evaluate(self.cfg.kind, tc)
            value, rates = support(region, self.cfg.mu)
        except PCCError:
            # candidate outside the admissible collection or empty region
            return -math.inf, None, None
        return value, rates, tc


def _random_candidate(rng: np.random.Generator, shapes, cfg: SearchConfig) -> List[np.ndarray]:
    cand = [rng.dirichlet(np.ones(cfg.card_q))]
    for shape in shapes:
        size = int(np.prod(shape))
        cand.append(np.stack([rng.dirichlet(np.ones(size)).reshape(shape) for _ in range(cfg.card_q)]))
    if cfg.share_factors:
        cand[3] = cand[2].copy()
    return cand


def _aligned_candidates(shapes, cfg: SearchConfig) -> List[List[np.ndarray]]:
    """Starting points where U_j is uniform over its first m symbols and
    X_j = a·U_j mod |X_j|, for m in (|X_j|, 2) and a in (1, 2)
    """
    if not cfg.aligned_starts or cfg.algebra is None or KIND_LAYOUTS[cfg.kind] != '3to1':
        return []
    res = []
    for m, a in ((None, 1), (2, 2), (2, 1), (None, 2)):
        cand = [np.full(cfg.card_q, 1.0 / cfg.card_q), np.full((cfg.card_q, ) + shapes[0], 1.0 / shapes[0][0])]
        for theta, nx in shapes[1:]:
            size = min(theta, nx if m is None else m)
            f = np.zeros((theta, nx))
            for u in range(size):
                f[u, (a * u) % nx] += 1.0 / size
            cand.append(np.broadcast_to(f, (cfg.card_q, theta, nx)).copy())
        if not any(all(np.array_equal(x, y) for x, y in zip(cand, other)) for other in res):
            res.append(cand)
    return res


def _restart(ch: Channel3IC, cfg: SearchConfig, restart: int):
    rng = np.random.default_rng(derive_seed(cfg.seed, restart))
    objective = _Objective(ch, cfg)
    shapes = _user_shapes(ch, cfg)
    aligned = _aligned_candidates(shapes, cfg)
    start = aligned[restart] if restart < len(aligned) else _random_candidate(rng, shapes, cfg)
    cand = _project_costs(ch, start)
    value, rates, tc = objective(cand)
    trace = [(0, cfg.step, value)]
    step = cfg.step
    free = [0, 1, 2] if cfg.share_factors else [0, 1, 2, 3]

    for iteration in range(1, cfg.iterations + 1):
        improved = False
        for a in free:
            for index in np.ndindex(*cand[a].shape):
                for sign in (1.0, -1.0):
                    trial = [c.copy() for c in cand]
                    trial[a][index] = max(0.0, trial[a][index] + sign * step)
                    trial[a] = _normalize(trial[a], a == 0)
                    if cfg.share_factors:
                        trial[3] = trial[2].copy()
                    trial = _project_costs(ch, trial)
                    t_value, t_rates, t_tc = objective(trial)
                    if t_value > value + 1e-12:
                        cand, value, rates, tc = trial, t_value, t_rates, t_tc
                        improved = True
                        break
        trace.append((iteration, step, value))
        if not improved:
            step /= 2
            if step < cfg.min_step:
                break
    logger.debug('restart %d: objective %.6g after %d passes', restart, value, len(trace) - 1)
    return value, rates, tc, trace


def maximize_weighted_rate(ch: Channel3IC, kind: Union[RegionKind, str, None] = None,
                           mu: Optional[Sequence[float]] = None,
                           cfg: Optional[SearchConfig] = None) -> SearchResult:
    """Search test channels for the largest μ·R over the region of the
    given kind.

    For structured kinds the first restarts start from deterministic
    maps from the auxiliaries to the inputs, the others draw the
    conditional pmfs of each user from a Dirichlet distribution. Every
    start is then refined coordinate by coordinate on a grid that is
    halved whenever a pass brings no improvement.
    Restarts run on `PCCREGIONS_THREADS` worker threads; every restart
    has its own seed so the result does not depend on scheduling.

    Raises:
        InfeasibilityError: no test channel meets the cost budgets
    """
    cfg = cfg or SearchConfig()
    if kind is not None or mu is not None:
        params = vars(cfg).copy()
        params['kind'] = RegionKind(kind) if kind is not None else cfg.kind
        params['mu'] = mu if mu is not None else cfg.mu
        if params['kind'] != cfg.kind and not _algebra_fits(params['kind'], cfg.algebra):
            params['algebra'] = None
        cfg = SearchConfig(**params)

    threads = worker_threads()
    restarts = range(cfg.restarts)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda r: _restart(ch, cfg, r), restarts))
    else:
        outcomes = [_restart(ch, cfg, r) for r in restarts]

    best, trace, best_value = None, [], -math.inf
    for r, (value, rates, tc, rows) in enumerate(outcomes):
        for iteration, step, objective in rows:
            best_value = max(best_value, objective)
            trace.append(TraceRow(r, iteration, step, objective, best_value))
        if tc is not None and (best is None or value > best[0]):
            best = (value, rates, tc)
    if best is None:
        raise InfeasibilityError('No admissible test channel found for {}'.format(cfg.kind.value))
    return SearchResult(best[2], best[1], best[0], trace)


TABLE1_ALGEBRAS = {
    'F7': lambda: (RegionKind.alpha_f_3to1, field_make(7)),
    'F8': lambda: (RegionKind.alpha_f_3to1, field_make(8)),
    'Z4': lambda: (RegionKind.alpha_g_3to1, AbelianGroupSpec.cyclic(4)),
}
TABLE1_MU = (10.0, 1.0, 1.0)


def table1_search(row: int, algebra: str, cfg: Optional[SearchConfig] = None) -> SearchResult:
    """Search one quaternary instance of the published cost/noise table
    over one algebra (F7, F8 or Z4). Users 2 and 3 share their
    conditional pmf; the objective weights user 1 heavily so that the
    reported R2 is the rate left once user 1 is served
    """
    if algebra not in TABLE1_ALGEBRAS:
        raise DomainError('Unknown algebra {!r}, available are: {}'.format(algebra, list(TABLE1_ALGEBRAS)))
    kind, spec = TABLE1_ALGEBRAS[algebra]()
    base = vars(cfg).copy() if cfg is not None else {'mu': TABLE1_MU}
    base.update(kind=kind, algebra=spec, share_factors=True)
    return maximize_weighted_rate(make_example(5, row=row), cfg=SearchConfig(**base))


_RELATIONS = {
    '<': operator.lt,
    '<=': operator.le,
    '>': operator.gt,
    '>=': operator.ge,
}


class Condition:
    """One inequality `lhs REL rhs` with both sides evaluated.
    `tol` loosens the comparison in favour of the condition
    """
    def __init__(self, name: str, lhs: float, relation: str, rhs: float, tol: float = 0.0):
        if relation not in _RELATIONS and relation != '==':
            raise DomainError('Unknown relation {!r}'.format(relation))
        self.name = name
        self.lhs = float(lhs)
        self.relation = relation
        self.rhs = float(rhs)
        self.tol = tol

    @property
    def holds(self) -> bool:
        if self.relation == '==':
            return abs(self.lhs - self.rhs) <= self.tol
        if self.relation in ('<', '<='):
            return _RELATIONS[self.relation](self.lhs, self.rhs + self.tol)
        return _RELATIONS[self.relation](self.lhs + self.tol, self.rhs)

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            'name': self.name, 'lhs': self.lhs, 'relation': self.relation, 'rhs': self.rhs,
            'tol': self.tol, 'holds': self.holds
        }

    def __repr__(self):
        return 'Condition({}: {:.6g} {} {:.6g} -> {})'.format(
            self.name, self.lhs, self.relation, self.rhs, self.holds
        )


class VerdictReport:
    """Named conditions of a claim together with the numbers they were
    computed from
    """
    def __init__(self, name: str, conditions: Sequence[Condition], values: Optional[Mapping[str, Any]] = None,
                 classification: str = '', notes: Sequence[str] = ()):
        self.name = name
        self.conditions = list(conditions)
        self.values = dict(values or {})
        self.classification = classification
        self.notes = list(notes)

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.conditions)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'classification': self.classification,
            'holds': self.holds,
            'conditions': [c.to_dict() for c in self.conditions],
            'values': self.values,
            'notes': self.notes,
        }


def check_example1(tau: float, delta1: float, delta2: float, delta3: float) -> VerdictReport:
    """Conditions under which coset codes reach capacity on the binary
    additive 3-to-1 channel while unstructured codes cannot
    """
    tau, delta1 = check_probability(tau, 'tau'), check_probability(delta1, 'delta1')
    delta2, delta3 = check_probability(delta2, 'delta2'), check_probability(delta3, 'delta3')
    t1 = conv(tau, delta1)
    capacity = Condition('capacity_by_pcc', t1, '<=', min(delta2, delta3))
    excluded = Condition('usb_excluded', h(delta2) + h(delta3), '<', 1 + h(t1))
    corner = (h(t1) - h(delta1), 1 - h(delta2), 1 - h(delta3))

    ch = make_example(1, delta1=delta1, delta2=delta2, delta3=delta3, tau=tau)
    tc = identity_test_channel(ch, ([1 - tau, tau], [0.5, 0.5], [0.5, 0.5]))
    membership = alpha_f_3to1(tc).contains(corner)

    if capacity and excluded:
        classification = 'pcc_strictly_better'
    elif capacity:
        classification = 'pcc_capacity'
    else:
        classification = 'inconclusive'
    return VerdictReport('example1', [capacity, excluded], {
        'corner': list(corner), 'corner_in_alpha_f_3to1': membership.value,
    }, classification)


def check_prop2(tau1: float, tau: float, delta1: float, delta: float) -> VerdictReport:
    """Conditions for the binary OR 3-to-1 channel: achievability of the
    outer bound by ternary coset codes and its exclusion from the
    unstructured region
    """
    tau1, tau = check_probability(tau1, 'tau1'), check_probability(tau, 'tau')
    delta1, delta = check_probability(delta1, 'delta1'), check_probability(delta, 'delta')
    p_or = 2 * tau - tau ** 2
    beta = conv(delta1, p_or)
    theta = (h(tau) - h((1 - tau) ** 2) - (p_or * h(tau ** 2 / p_or) if p_or > 0 else 0.0)
             - h(conv(tau1, delta1)) + h(conv(tau1, beta)))
    private = h(conv(tau, delta)) - h(delta)
    achievable = Condition('achievability', private, '<=', theta)
    excluded = Condition(
        'usb_excluded', h(conv(tau1, delta1)) - h(delta1) + 2 * private, '>', h(conv(tau1, beta)) - h(delta1)
    )
    classification = 'pcc_strictly_better' if achievable and excluded else (
        'pcc_capacity' if achievable else 'inconclusive'
    )
    return VerdictReport('prop2', [achievable, excluded], {
        'beta': beta, 'theta': theta,
        'corner': [h(conv(tau1, delta1)) - h(delta1), private, private],
    }, classification)


def _or_pmf(ch: Channel3IC, p1: float, tau: float) -> JointPmf:
    pmf = push_forward(ch, ([1 - p1, p1], [1 - tau, tau], [1 - tau, tau]))
    return pmf.apply('X2|X3', ('X2', 'X3'), lambda a, b: a | b, 2)


def c1_profile(ch: Channel3IC, grid: Sequence[float], tau: Optional[float] = None) -> np.ndarray:
    """I(X1;Y1|X2∨X3) along a grid of P(X1 = 1)"""
    tau = ch.budgets[1] if tau is None else tau
    return np.array([mutual_information(_or_pmf(ch, p, tau), 'X1', 'Y1', 'X2|X3') for p in grid])


def compute_C1(ch: Channel3IC, tau1: Optional[float] = None,
               tau: Optional[float] = None) -> Tuple[float, np.ndarray]:
    """sup of I(X1;Y1|X2∨X3) over P(X1 = 1) ≤ τ1 with P(Xj = 1) = τ.
    The objective is concave in the input pmf, a bounded scalar search
    finds the maximizer

    Returns:
        Tuple[float, np.ndarray]: C1 and the maximizing pmf of X1
    """
    tau1 = ch.budgets[0] if tau1 is None else check_probability(tau1, 'tau1')
    tau = ch.budgets[1] if tau is None else check_probability(tau, 'tau')
    if tau1 <= 0:
        return 0.0, np.array([1.0, 0.0])

    def negative(p):
        return -mutual_information(_or_pmf(ch, p, tau), 'X1', 'Y1', 'X2|X3')

    cap = min(tau1, 1.0)
    res = minimize_scalar(negative, bounds=(0.0, cap), method='bounded', options={'xatol': 1e-10})
    p, value = float(res.x), -float(res.fun)
    if -negative(cap) >= value:
        p, value = cap, -negative(cap)
    return value, np.array([1 - p, p])


def check_prop3(tau1: float, tau: float, delta: float, mac: Optional[Mapping] = None) -> VerdictReport:
    """Margins of the two conditions for the OR channel coupled through
    a non-additive MAC
    """
    ch = make_example(3, tau1=tau1, tau=tau, delta=delta, mac=mac)
    c1, px1 = compute_C1(ch)
    pmf = _or_pmf(ch, float(px1[1]), tau)
    private = h(conv(tau, delta)) - h(delta)
    lhs1 = c1 + 2 * private
    rhs1 = mutual_information(pmf, ('X1', 'X2', 'X3'), 'Y1')

    t2 = tau ** 2
    sum_entropy = h(t2) + (1 - t2) * h((1 - tau) ** 2 / (1 - t2)) if t2 < 1 else 0.0
    lhs2 = sum_entropy + conditional_entropy(pmf, 'Y1', 'X2|X3') - entropy(pmf, 'Y1')
    rhs2 = min(conditional_entropy(pmf, 'X2', 'Y2'), conditional_entropy(pmf, 'X3', 'Y3'))

    excluded = Condition('usb_excluded', lhs1, '>', rhs1)
    achievable = Condition('achievability', lhs2, '<=', rhs2)
    notes = []
    if abs(px1[1] - 0.99) > 1e-6:
        notes.append(
            'maximizing P(X1=1) is {:.6g}; the value 0.99 quoted for this channel violates the cost '
            'cap {} and is not used'.format(px1[1], tau1)
        )
    return VerdictReport('prop3', [excluded, achievable], {
        'C1': c1, 'p_x1': px1.tolist(), 'margin1': lhs1 - rhs1, 'margin2': rhs2 - lhs2,
        'corner': [c1, private, private],
    }, 'pcc_strictly_better' if excluded and achievable else 'inconclusive', notes)


def _z4_capacity(delta: float) -> float:
    """Capacity of the Z4 channel with noise mass 1−δ at 0"""
    return 2 - h(delta) - delta * LOG2_3


def check_prop5(delta1: float, delta: float, tau: float, tol: float = 1e-12) -> VerdictReport:
    """Conditions under which group codes over Z4 reach capacity while
    unstructured codes cannot
    """
    delta1, delta, tau = (check_probability(v, n) for v, n in ((delta1, 'delta1'), (delta, 'delta'), (tau, 'tau')))
    beta = delta1 + tau - 4 * delta1 * tau / 3
    c_star = h(beta) + beta * LOG2_3 - h(delta1) - delta1 * LOG2_3
    cap = _z4_capacity(delta)
    excluded = Condition('usb_excluded', c_star + 2 * cap, '>', _z4_capacity(delta1))
    achievable = Condition('group_capacity', beta, '<=', delta, tol)
    return VerdictReport('prop5', [excluded, achievable], {
        'beta': beta, 'C_star': c_star, 'capacity': cap, 'corner': [c_star, cap, cap],
    }, 'group_strictly_better' if excluded and achievable else 'inconclusive')


def _ternary(a, b):
    return (a + b) % 3


def check_example7(tau: float, delta: float, beta_z: float) -> VerdictReport:
    """Alignment condition of the symmetric OR channel with Z-channel
    links, under which every user reaches its point-to-point rate
    """
    tau, delta, beta_z = (check_probability(v, n) for v, n in ((tau, 'tau'), (delta, 'delta'), (beta_z, 'beta_z')))
    own = h(conv(tau * beta_z, delta)) - (1 - tau) * h(delta) - tau * h(conv(beta_z, delta))
    ch = make_example(7, tau=tau, delta=delta, beta_z=beta_z)
    pmf = push_forward(ch, [[1 - tau, tau]] * 3).apply('Z', ('X2', 'X3'), _ternary, 3)
    align = entropy(pmf, 'X2') - conditional_entropy(pmf, 'Z', 'Y1')
    numeric = mutual_information(
        pmf.apply('X2|X3', ('X2', 'X3'), lambda a, b: a | b, 2), 'X1', 'Y1', 'X2|X3'
    )
    aligned = Condition('alignment', own, '<=', align)
    consistent = Condition('closed_form', own, '==', numeric, 1e-9)
    rate = 0.5 * own + 0.5 * min(own, align)
    return VerdictReport('example7', [aligned, consistent], {
        'ptp_rate': own, 'alignment_rate': align, 'symmetric_rate': rate,
    }, 'ptp_capacity' if aligned else 'alignment_limited')


def example8_terms(tau: float, delta: float, beta_z: float) -> Dict[str, Dict[str, float]]:
    """Closed forms of the corner bounds of the 3-to-2 channel and the
    same quantities evaluated from the pushed-forward pmf
    """
    tau, delta, beta_z = (check_probability(v, n) for v, n in ((tau, 'tau'), (delta, 'delta'), (beta_z, 'beta_z')))
    tb = tau * beta_z
    p_or = 2 * tau - tau ** 2
    p_xor = conv(tau, tau)
    closed = {
        'A': h(tau) + h(conv(conv(p_xor, delta), tb)) - h(p_xor) - h(conv(tb, delta)),
        'B': h(conv(tau, delta)) - h(delta),
        'C': h(conv(tb, delta)) - (1 - tau) * h(delta) - tau * h(conv(beta_z, delta)),
        'D': (h(conv(conv(tb, delta), p_or)) - (1 - tau) * h(conv(p_or, delta))
              - tau * h(conv(conv(beta_z, p_or), delta))),
        'D2': (h(conv(conv(tb, delta), p_xor)) - (1 - tau) * h(conv(p_xor, delta))
               - tau * h(conv(conv(beta_z, p_xor), delta))),
    }
    ch = make_example(8, tau=tau, delta=delta, beta_z=beta_z)
    pmf = push_forward(ch, [[1 - tau, tau]] * 3)
    pmf = pmf.apply('X2^X3', ('X2', 'X3'), lambda a, b: a ^ b, 2)
    pmf = pmf.apply('X1|X3', ('X1', 'X3'), lambda a, b: a | b, 2)
    pmf = pmf.apply('X1+X3', ('X1', 'X3'), _ternary, 3)
    numeric = {
        'A': entropy(pmf, 'X2') - conditional_entropy(pmf, 'X2^X3', 'Y1'),
        'B': mutual_information(pmf, 'X3', 'Y3'),
        'C': mutual_information(pmf, 'X1', 'Y1', 'X2^X3'),
        'D': mutual_information(pmf, 'X2', 'Y2'),
        'D2': mutual_information(pmf, 'X1', 'Y1'),
        'A2': entropy(pmf, 'X3') - conditional_entropy(pmf, 'X1+X3', 'Y2'),
        'C2': mutual_information(pmf, 'X2', 'Y2', 'X1|X3'),
    }
    return {'closed': closed, 'numeric': numeric}


def example8_corners(tau: float, delta: float, beta_z: float) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    """Rate triples of the two operating points of the 3-to-2 channel:
    users 2, 3 aligning over F2 at receiver 1 (R1 maximal), and users
    1, 3 aligning over F3 at receiver 2 (R2 maximal)
    """
    terms = example8_terms(tau, delta, beta_z)
    n = terms['numeric']
    first = (n['C'], max(0.0, min(n['A'], n['D'])), max(0.0, min(n['A'], n['B'])))
    second = (max(0.0, min(n['A2'], n['D2'])), n['C2'], max(0.0, min(n['A2'], n['B'])))
    return first, second
