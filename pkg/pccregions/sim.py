__all__ = [
    'DEFAULT_ETA',
    'ENUMERATION_BITS',
    'ENUMERATION_ENTRIES',
    'SIM_RATES',
    'ERROR_CLASSES',
    'PCCCode',
    'NestedPair',
    'SimConfig',
    'SimReport',
    'enumerate_vectors',
    'constant_composition',
    'pcc_build',
    'nested_build',
    'typical_mask',
    'encode_user_j',
    'decode_rx1',
    'decode_rx_j',
    'run_trials',
    'error_curve'
]
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Mapping, Tuple, List, Union, Dict

import numpy as np
from scipy.stats import beta as beta_dist

from .algebra import FieldSpec, field_make
from .common import derive_seed
from .enums import RegionKind, ErrorClass, DecodingRule
from .exceptions import ConfigurationError, DomainError
from .info import JointPmf, conditional_entropy, mutual_information
from .regions.evaluators import alpha_f_3to1
from .regions.testchannel import TestChannel
from .search import worker_threads

logger = logging.getLogger(__name__)

DEFAULT_ETA = 0.05
ENUMERATION_BITS = 22
ENUMERATION_ENTRIES = 4 * 10 ** 6
CONFIDENCE = 0.95
TIE_TOLERANCE = 1e-9

SIM_RATES = ('R1', 'S2', 'T2', 'K2', 'L2', 'S3', 'T3', 'K3', 'L3')
ERROR_CLASSES = tuple(c.value for c in ErrorClass)


def _field(field: Union[FieldSpec, int]) -> FieldSpec:
    return field if isinstance(field, FieldSpec) else field_make(field)


def enumerate_vectors(theta: int, k: int) -> np.ndarray:
    """All vectors of F_θ^k as rows; row i holds the base-θ digits of i,
    most significant first
    """
    idx = np.arange(theta ** k)
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.stack([(idx // theta ** (k - 1 - i)) % theta for i in range(k)], axis=1)


def _check_enumeration(k: int, theta: int):
    if k * math.log2(theta) > ENUMERATION_BITS:
        raise ConfigurationError('Code with {} rows over F{} exceeds the enumeration cap of {} bits'.format(
            k, theta, ENUMERATION_BITS
        ))


class PCCCode:
    """Partitioned coset code: codewords a·g ⊕ b for a ∈ F_θ^k, split
    into θ^l equal bins by a random labelling of the index space.

    Args:
        field (FieldSpec): code alphabet
        g: generator matrix, k×n over the field
        b: bias vector of length n
        bins: bin label of every index, values in [0, θ^l)
        l (int): bin exponent
    """
    def __init__(self, field: FieldSpec, g, b, bins, l: int):
        self.field = field
        self.g = np.asarray(g, dtype=np.int64).reshape(-1, len(b))
        self.b = np.asarray(b, dtype=np.int64)
        self.k, self.n = self.g.shape
        self.l = int(l)
        if not 0 <= self.l <= self.k:
            raise ConfigurationError('Bin exponent must be in [0, {}], got {}'.format(self.k, self.l))
        _check_enumeration(self.k, field.order)
        self.bins = np.asarray(bins, dtype=np.int64)
        if self.bins.shape != (self.size, ) or np.any(self.bins < 0) or np.any(self.bins >= self.bin_count):
            raise DomainError('Bin labels must cover all {} indices with values below {}'.format(
                self.size, self.bin_count
            ))
        self._codewords = None

    @property
    def theta(self) -> int:
        return self.field.order

    @property
    def size(self) -> int:
        return self.theta ** self.k

    @property
    def bin_count(self) -> int:
        return self.theta ** self.l

    def index(self, a: Sequence[int]) -> int:
        res = 0
        for digit in a:
            res = res * self.theta + int(digit)
        return res

    def codeword(self, a: Sequence[int]) -> np.ndarray:
        return self.field.vector_add(self.field.matmul(np.asarray(a).reshape(1, -1), self.g)[0], self.b)

    @property
    def codewords(self) -> np.ndarray:
        """Every codeword as a row, in index order"""
        if self._codewords is None:
            words = self.field.vector_add(self.field.matmul(enumerate_vectors(self.theta, self.k), self.g), self.b)
            self._codewords = np.asarray(words, dtype=np.uint8)
            self._codewords.setflags(write=False)
        return self._codewords

    def bin_members(self, message: int) -> np.ndarray:
        return np.flatnonzero(self.bins == message)

    def __repr__(self):
        return 'PCCCode(n={}, k={}, l={}, F{})'.format(self.n, self.k, self.l, self.theta)


class NestedPair:
    """Two partitioned coset codes over one field, the smaller linear
    code being spanned by the leading rows of the larger
    """
    def __init__(self, small: PCCCode, large: PCCCode):
        if small.field != large.field or small.n != large.n:
            raise DomainError('Nested codes must share the field and the blocklength')
        if small.k > large.k or not np.array_equal(small.g, large.g[:small.k]):
            raise DomainError('Generator of the smaller code must be the leading rows of the larger one')
        self.small = small
        self.large = large
        self._sums = None

    @property
    def field(self) -> FieldSpec:
        return self.large.field

    def sum_index(self, a_small: Sequence[int], a_large: Sequence[int]) -> int:
        """Index in the larger code of the coefficient vector of u_small ⊕ u_large"""
        padded = np.zeros(self.large.k, dtype=np.int64)
        padded[:self.small.k] = a_small
        return self.large.index(self.field.vector_add(padded, np.asarray(a_large, dtype=np.int64)))

    @property
    def sum_codewords(self) -> np.ndarray:
        """The sum codebook a·g ⊕ b_small ⊕ b_large for all a, in index order"""
        if self._sums is None:
            bias = self.field.vector_add(self.small.b, self.large.b)
            words = self.field.vector_add(
                self.field.matmul(enumerate_vectors(self.field.order, self.large.k), self.large.g), bias
            )
            self._sums = np.asarray(words, dtype=np.uint8)
            self._sums.setflags(write=False)
        return self._sums

    def __repr__(self):
        return 'NestedPair({!r}, {!r})'.format(self.small, self.large)


def _bins(rng: np.random.Generator, theta: int, k: int, l: int) -> np.ndarray:
    return rng.permutation(theta ** k) % theta ** l


def pcc_build(n: int, k: int, l: int, field: Union[FieldSpec, int], seed: int) -> PCCCode:
    """Draw a code from the uniform ensemble: generator entries, bias
    and bin labels independent and uniform

    Raises:
        ConfigurationError: non-positive blocklength, l > k, or the code
            does not fit the enumeration cap
    """
    field = _field(field)
    if n < 1 or k < 0 or l < 0:
        raise ConfigurationError('Blocklength must be positive and dimensions non-negative')
    if l > k:
        raise ConfigurationError('Bin exponent {} exceeds the number of rows {}'.format(l, k))
    _check_enumeration(k, field.order)
    rng = np.random.default_rng(seed)
    g = rng.integers(0, field.order, (k, n))
    b = rng.integers(0, field.order, n)
    return PCCCode(field, g, b, _bins(rng, field.order, k, l), l)


def nested_build(n: int, s2: int, s3: int, field: Union[FieldSpec, int], seed: int,
                 l2: Optional[int] = None, l3: Optional[int] = None) -> NestedPair:
    """Draw a nested pair: the code with s3 rows and the code spanned by
    its first s2 rows, each with its own bias and bin labels. Bin
    exponents default to the row counts (one codeword per bin)
    """
    field = _field(field)
    if not 0 <= s2 <= s3:
        raise ConfigurationError('Nested pair needs 0 <= s2 <= s3, got {} and {}'.format(s2, s3))
    if n < 1:
        raise ConfigurationError('Blocklength must be positive')
    l2 = s2 if l2 is None else l2
    l3 = s3 if l3 is None else l3
    if l2 > s2 or l3 > s3:
        raise ConfigurationError('Bin exponents must not exceed the row counts')
    _check_enumeration(s3, field.order)
    rng = np.random.default_rng(seed)
    g = rng.integers(0, field.order, (s3, n))
    b2 = rng.integers(0, field.order, n)
    b3 = rng.integers(0, field.order, n)
    small = PCCCode(field, g[:s2], b2, _bins(rng, field.order, s2, l2), l2)
    large = PCCCode(field, g, b3, _bins(rng, field.order, s3, l3), l3)
    return NestedPair(small, large)


def typical_mask(symbols: np.ndarray, pmf: np.ndarray, eta: float) -> np.ndarray:
    """Frequency typicality of sequences over a flat alphabet.

    A sequence is typical when no symbol of zero probability occurs and
    the empirical frequency of every symbol is within `eta` of its
    probability.

    Args:
        symbols: integer array (..., n) of symbol indices
        pmf: flat target pmf
        eta: per-letter deviation

    Returns:
        np.ndarray: boolean array of shape symbols.shape[:-1]
    """
    pmf = np.asarray(pmf, dtype=float).ravel()
    symbols = np.asarray(symbols, dtype=np.int64)
    n = symbols.shape[-1]
    counts = (symbols[..., None] == np.arange(len(pmf))).sum(axis=-2)
    freq = counts / n
    close = np.all(np.abs(freq - pmf) <= eta + 1e-12, axis=-1)
    supported = np.all((pmf > 0) | (counts == 0), axis=-1)
    return close & supported


def _flat(parts: Sequence[np.ndarray], sizes: Sequence[int]) -> np.ndarray:
    res = np.asarray(parts[0], dtype=np.int64)
    for part, size in zip(parts[1:], sizes[1:]):
        res = res * size + np.asarray(part, dtype=np.int64)
    return res


def encode_user_j(code: PCCCode, satellite: Optional[np.ndarray], message: Tuple[int, int], eta: float,
                  target: np.ndarray, rng: np.random.Generator,
                  mapping: Optional[np.ndarray] = None) -> Optional[Tuple[int, int, np.ndarray, np.ndarray]]:
    """Find the jointly typical (coset codeword, satellite codeword)
    pairs in the bins indexed by the message and pick one uniformly.

    Args:
        code (PCCCode): the user's coset code
        satellite: satellite codebook of shape (messages, bin size, n),
            or None when the input is the function `mapping` of U
        message: (bin index in the coset code, satellite message)
        eta (float): typicality deviation
        target: pmf of (U_j, X_j) as a |U|×|X| array
        rng: source of the uniform choice

    Returns:
        (codeword index, satellite index, u^n, x^n), or None when no
        typical pair exists
    """
    m_u, m_x = message
    target = np.asarray(target)
    size_x = target.shape[1]
    members = code.bin_members(m_u)
    words = code.codewords[members]
    if satellite is None:
        xs = mapping[words]
        mask = typical_mask(_flat((words, xs), (0, size_x)), target, eta)
        found = np.flatnonzero(mask)
        if not len(found):
            return None
        pick = found[rng.integers(len(found))]
        return int(members[pick]), 0, words[pick], xs[pick]

    xs = satellite[m_x]
    mask = typical_mask(_flat((words[:, None, :], xs[None, :, :]), (0, size_x)), target, eta)
    found = np.argwhere(mask)
    if not len(found):
        return None
    a, b = found[rng.integers(len(found))]
    return int(members[a]), int(b), words[a], xs[b]


def _log_pmf(pmf: np.ndarray) -> np.ndarray:
    pmf = np.asarray(pmf, dtype=float).ravel()
    return np.where(pmf > 0, np.log2(np.where(pmf > 0, pmf, 1.0)), -np.inf)


def _most_likely(scores: np.ndarray, labels: Sequence) -> Optional[object]:
    """Label of the highest score; None when every score is -inf or
    the best score is shared by different labels
    """
    scores = np.asarray(scores, dtype=float).ravel()
    best = scores.max() if len(scores) else -np.inf
    if not np.isfinite(best):
        return None
    winners = {labels[i] for i in np.flatnonzero(scores >= best - TIE_TOLERANCE)}
    if len(winners) != 1:
        return None
    return winners.pop()


def decode_rx1(pair: NestedPair, x1_codebook: np.ndarray, y1: np.ndarray, eta1: float,
               target: np.ndarray, rule: DecodingRule = DecodingRule.typical) -> Optional[int]:
    """Receiver 1: the unique message whose codeword is jointly typical
    with y1 and some codeword of the sum codebook. With the likelihood
    rule the message of the most probable (sum codeword, x1 codeword)
    pair is taken instead.

    Args:
        target: pmf of (U2 ⊕ U3, X1, Y1) as a 3-d array
        rule (DecodingRule): decision rule

    Returns:
        int: the decoded message, None on ambiguity or when nothing fits
    """
    target = np.asarray(target)
    _, size_x, size_y = target.shape
    sums = pair.sum_codewords
    if rule is DecodingRule.likelihood:
        symbols = _flat((sums[None, :, :], x1_codebook[:, None, :], y1[None, None, :]), (0, size_x, size_y))
        scores = _log_pmf(target)[symbols].sum(axis=-1).max(axis=1)
        return _most_likely(scores, range(len(x1_codebook)))

    found = None
    for m, x1 in enumerate(x1_codebook):
        mask = typical_mask(_flat((sums, x1[None, :], y1[None, :]), (0, size_x, size_y)), target, eta1)
        if mask.any():
            if found is not None:
                return None
            found = m
    return found


def decode_rx_j(code: PCCCode, satellite: Optional[np.ndarray], y: np.ndarray, eta1: float,
                target: np.ndarray, mapping: Optional[np.ndarray] = None,
                rule: DecodingRule = DecodingRule.typical) -> Optional[Tuple[int, int]]:
    """Receiver j ∈ {2, 3}: the unique (bin index, satellite message)
    for which some coset codeword and some satellite codeword are jointly
    typical with y, or the message of the most probable pair under the
    likelihood rule.

    Args:
        target: pmf of (U_j, X_j, Y_j) as a 3-d array
        rule (DecodingRule): decision rule
    """
    target = np.asarray(target)
    _, size_x, size_y = target.shape
    words = code.codewords
    if rule is DecodingRule.likelihood:
        log_target = _log_pmf(target)
        if satellite is None:
            scores = log_target[_flat((words, mapping[words], y[None, :]), (0, size_x, size_y))].sum(axis=-1)
            return _most_likely(scores, [(int(m), 0) for m in code.bins])
        scores, labels = [], []
        for m_x, xs in enumerate(satellite):
            symbols = _flat((words[:, None, :], xs[None, :, :], y[None, None, :]), (0, size_x, size_y))
            scores.append(log_target[symbols].sum(axis=-1).max(axis=1))
            labels.extend((int(m), m_x) for m in code.bins)
        return _most_likely(np.concatenate(scores), labels)

    if satellite is None:
        mask = typical_mask(_flat((words, mapping[words], y[None, :]), (0, size_x, size_y)), target, eta1)
        messages = {(int(code.bins[a]), 0) for a in np.flatnonzero(mask)}
    else:
        messages = set()
        for m_x, xs in enumerate(satellite):
            symbols = _flat((words[:, None, :], xs[None, :, :], y[None, None, :]), (0, size_x, size_y))
            hits = typical_mask(symbols, target, eta1).any(axis=1)
            messages.update((int(code.bins[a]), m_x) for a in np.flatnonzero(hits))
    if len(messages) != 1:
        return None
    return messages.pop()


def _input_map(pmf: JointPmf, u: str, x: str) -> Optional[np.ndarray]:
    """x = f(u) when the input is a function of the auxiliary on its
    support, None otherwise
    """
    joint = pmf.marginal((u, x)).probs
    mapping = np.zeros(joint.shape[0], dtype=np.int64)
    for value, row in enumerate(joint):
        support = np.flatnonzero(row > 1e-12)
        if len(support) > 1:
            return None
        if len(support):
            mapping[value] = support[0]
    return mapping


class SimConfig:
    """Monte Carlo setup for the 3-to-1 scheme.

    Rates are in bits per channel use: R1 for user 1; for users j = 2, 3
    the coset code rows S_j, its bin index T_j, the satellite bin K_j and
    the satellite message L_j. Integer code dimensions follow from the
    blocklength: bin exponents are rounded down so the bin rate never
    exceeds T_j, and `spare_rows` extra rows are added to every coset
    code on top of S_j.

    Args:
        test_channel (TestChannel): 3-to-1 test channel over a finite
            field without time sharing; gives the codebook distributions
            and the typicality targets
        rates (Mapping[str, float]): rates by name, missing ones are 0
        n (int): blocklength
        trials (int): number of simulated blocks
        seed (int): master seed
        eta (float): encoder typicality deviation
        eta1 (float): decoder typicality deviation, at least 4·eta,
            4·eta by default
        decoder (DecodingRule): decision rule of the receivers
        spare_rows (int): coset rows added beyond S_j
    """
    def __init__(self, test_channel: TestChannel, rates: Mapping[str, float], n: int, trials: int = 1000,
                 seed: int = 0, eta: Optional[float] = None, eta1: Optional[float] = None,
                 decoder: Union[DecodingRule, str] = DecodingRule.typical, spare_rows: int = 0):
        unknown = set(rates) - set(SIM_RATES)
        if unknown:
            raise ConfigurationError('Unknown rates {}, available are: {}'.format(sorted(unknown), SIM_RATES))
        self.rates = {name: float(rates.get(name, 0.0)) for name in SIM_RATES}
        if any(r < 0 or math.isnan(r) for r in self.rates.values()):
            raise ConfigurationError('Rates must be non-negative')
        if n < 1 or trials < 0:
            raise ConfigurationError('Blocklength must be positive and trial count non-negative')
        if spare_rows < 0:
            raise ConfigurationError('Spare rows must be non-negative, got {}'.format(spare_rows))
        eta = DEFAULT_ETA if eta is None else eta
        eta1 = 4 * eta if eta1 is None else eta1
        if eta <= 0 or eta1 < 4 * eta:
            raise ConfigurationError('Typicality deviations must satisfy eta > 0 and eta1 >= 4 eta')
        try:
            self.decoder = DecodingRule(decoder)
        except ValueError:
            raise ConfigurationError('Unknown decoder {!r}, available are: {}'.format(
                decoder, [r.value for r in DecodingRule]
            ))

        self.test_channel = test_channel.certify(RegionKind.alpha_f_3to1)
        if test_channel.pmf.size('Q') != 1:
            raise ConfigurationError('Simulation runs without time sharing, |Q| must be 1')
        self.field = test_channel.algebras['U2']
        self.n = int(n)
        self.trials = int(trials)
        self.seed = int(seed)
        self.eta = float(eta)
        self.eta1 = float(eta1)
        self.spare_rows = int(spare_rows)

        pmf = test_channel.derived
        self.maps = {j: _input_map(pmf, 'U{}'.format(j), 'X{}'.format(j)) for j in (2, 3)}
        self.dims = self._dimensions()

    @property
    def channel(self):
        return self.test_channel.channel

    def _dimensions(self) -> Dict[str, int]:
        n, theta = self.n, self.field.order
        log_theta = math.log2(theta)
        dims = {'M1': max(1, int(round(2 ** (n * self.rates['R1']))))}
        for j in (2, 3):
            s, t, k, l = (self.rates['{}{}'.format(v, j)] for v in 'STKL')
            bins = int(math.floor(n * t / log_theta + 1e-6))
            rows = bins + int(math.ceil(n * max(0.0, s - t) / log_theta - 1e-9)) + self.spare_rows
            if self.maps[j] is not None:
                if l > 0:
                    raise ConfigurationError('Input of user {} is a function of U{}, L{} must be 0'.format(j, j, j))
                messages, size = 1, 1
            else:
                messages = max(1, int(round(2 ** (n * l))))
                size = max(1, int(math.ceil(2 ** (n * k) - 1e-9)))
            dims.update({'s{}'.format(j): rows, 'l{}'.format(j): bins, 'MX{}'.format(j): messages,
                         'B{}'.format(j): size})

            _check_enumeration(rows, theta)
            entries = max(theta ** rows * messages * size, theta ** (rows - bins) * size)
            if entries > ENUMERATION_ENTRIES:
                raise ConfigurationError('Codebooks of user {} exceed {} entries'.format(j, ENUMERATION_ENTRIES))
        if dims['M1'] * theta ** max(dims['s2'], dims['s3']) > ENUMERATION_ENTRIES:
            raise ConfigurationError('Decoder 1 search space exceeds {} entries'.format(ENUMERATION_ENTRIES))
        return dims

    def with_blocklength(self, n: int) -> 'SimConfig':
        return SimConfig(self.test_channel, self.rates, n, self.trials, self.seed, self.eta, self.eta1,
                         self.decoder, self.spare_rows)

    @classmethod
    def from_region_corner(cls, test_channel: TestChannel, scale: float = 0.8, n: int = 12, trials: int = 2000,
                           seed: int = 0, eta: Optional[float] = None, eta1: Optional[float] = None,
                           decoder: Union[DecodingRule, str] = DecodingRule.likelihood,
                           spare_rows: int = 1) -> 'SimConfig':
        """Rates at `scale` times the sum-rate corner of the field region
        of the test channel.

        Coset codes get the rows binning needs to reach the target pmf of
        U_j plus `spare_rows` more, so every bin holds several codewords.
        Satellite bins cover I(U_j; X_j) plus one bit per block. The
        encoder deviation defaults to max(DEFAULT_ETA, 1/n), the smallest
        one that admits a type one letter away from the target at short
        blocklengths.
        """
        if scale < 0:
            raise ConfigurationError('Scale must be non-negative')
        if n < 1:
            raise ConfigurationError('Blocklength must be positive')
        eta = max(DEFAULT_ETA, 1.0 / n) if eta is None else eta
        _, corner = alpha_f_3to1(test_channel).maximize_rates((1.0, 1.0, 1.0))
        pmf = test_channel.derived
        log_theta = math.log2(test_channel.theta('U2'))
        rates = {'R1': scale * corner[0]}
        for j in (2, 3):
            u, x = 'U{}'.format(j), 'X{}'.format(j)
            r = scale * corner[j - 1]
            rates['T{}'.format(j)] = r
            rates['S{}'.format(j)] = r + max(0.0, log_theta - conditional_entropy(pmf, u, 'Q'))
            if _input_map(pmf, u, x) is None:
                rates['K{}'.format(j)] = mutual_information(pmf, u, x, 'Q') + 1.0 / n
        return cls(test_channel, rates, n, trials, seed, eta, eta1, decoder, spare_rows)

    def to_dict(self) -> dict:
        return {
            'rates': dict(self.rates), 'n': self.n, 'trials': self.trials, 'seed': self.seed,
            'eta': self.eta, 'eta1': self.eta1, 'decoder': self.decoder.value, 'spare_rows': self.spare_rows,
            'dimensions': dict(self.dims),
        }


class SimReport:
    """Outcome of a batch of trials.

    A trial counts as a block error when any receiver decodes a wrong
    message. Error classes may overlap; `overlaps` counts trials that
    fall in more than one class.
    """
    def __init__(self, n: int, trials: int, errors: int, classes: Mapping[str, int], overlaps: int,
                 mean_costs: Sequence[Optional[float]], seed: int):
        self.n = n
        self.trials = trials
        self.errors = errors
        self.classes = {c: int(classes.get(c, 0)) for c in ERROR_CLASSES}
        self.overlaps = overlaps
        self.mean_costs = list(mean_costs)
        self.seed = seed

    @classmethod
    def empty(cls, n: int = 0, seed: int = 0) -> 'SimReport':
        return cls(n, 0, 0, {}, 0, [None, None, None], seed)

    @property
    def error_rate(self) -> Optional[float]:
        return self.errors / self.trials if self.trials else None

    @property
    def confidence_interval(self) -> Tuple[float, float]:
        """Clopper–Pearson interval of the block-error probability"""
        k, n = self.errors, self.trials
        if n == 0:
            return 0.0, 1.0
        alpha = 1 - CONFIDENCE
        lower = float(beta_dist.ppf(alpha / 2, k, n - k + 1)) if k > 0 else 0.0
        upper = float(beta_dist.ppf(1 - alpha / 2, k + 1, n - k)) if k < n else 1.0
        return lower, upper

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'trials': self.trials,
            'errors': self.errors,
            'error_rate': self.error_rate,
            'confidence_interval': list(self.confidence_interval),
            'classes': dict(self.classes),
            'overlaps': self.overlaps,
            'mean_costs': self.mean_costs,
            'seed': self.seed,
        }

    def __eq__(self, other):
        return isinstance(other, SimReport) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return 'SimReport(n={}, trials={}, errors={})'.format(self.n, self.trials, self.errors)


def _type_counts(pmf: np.ndarray, n: int) -> np.ndarray:
    """Letter counts of the length-n type nearest to `pmf`; letters of
    zero probability get no count
    """
    target = np.asarray(pmf, dtype=float) * n
    counts = np.floor(target + 0.5).astype(np.int64)
    while counts.sum() > n:
        counts[np.argmax(counts - target)] -= 1
    while counts.sum() < n:
        counts[np.argmax(target - counts)] += 1
    return counts


def constant_composition(rng: np.random.Generator, pmf: np.ndarray, size: int, n: int) -> np.ndarray:
    """`size` codewords drawn uniformly from the type class nearest to
    `pmf`, as rows of a (size, n) array
    """
    base = np.repeat(np.arange(len(pmf)), _type_counts(pmf, n))
    return rng.permuted(np.tile(base, (size, 1)), axis=1)


class _Ensemble:
    """Typicality targets of one run. Every trial draws its own codebooks
    from the ensemble, so error rates are ensemble averages
    """
    def __init__(self, cfg: SimConfig):
        pmf = cfg.test_channel.derived
        self.cfg = cfg
        self.p_x1 = pmf.marginal('X1').probs
        self.p_x = {j: pmf.marginal('X{}'.format(j)).probs for j in (2, 3)}
        self.target_enc = {j: pmf.marginal(('U{}'.format(j), 'X{}'.format(j))).probs for j in (2, 3)}
        self.target_dec = {
            j: pmf.marginal(('U{}'.format(j), 'X{}'.format(j), 'Y{}'.format(j))).probs for j in (2, 3)
        }
        self.target_rx1 = pmf.marginal(('Z', 'X1', 'Y1')).probs

    def codebooks(self, t: int) -> Tuple[NestedPair, Dict[int, PCCCode], np.ndarray, Dict[int, np.ndarray]]:
        """Nested pair, coset code per user, x1 codebook and satellite
        codebooks of trial `t`
        """
        cfg, d = self.cfg, self.cfg.dims
        rng = np.random.default_rng(derive_seed(cfg.seed, 0, t))
        small, large = (2, 3) if d['s2'] <= d['s3'] else (3, 2)
        pair = nested_build(cfg.n, d['s{}'.format(small)], d['s{}'.format(large)], cfg.field,
                            derive_seed(cfg.seed, 0, t, 1), d['l{}'.format(small)], d['l{}'.format(large)])
        codes = {small: pair.small, large: pair.large}
        x1_codebook = constant_composition(rng, self.p_x1, d['M1'], cfg.n)
        satellites = {}
        for j in (2, 3):
            if cfg.maps[j] is None:
                shape = (d['MX{}'.format(j)], d['B{}'.format(j)], cfg.n)
                satellites[j] = rng.choice(len(self.p_x[j]), size=shape, p=self.p_x[j])
            else:
                satellites[j] = None
        return pair, codes, x1_codebook, satellites

    def transmit(self, x: Sequence[np.ndarray], rng: np.random.Generator) -> List[np.ndarray]:
        ch = self.cfg.channel
        probs = ch.W[x[0], x[1], x[2]].reshape(self.cfg.n, -1)
        cdf = np.cumsum(probs, axis=1)
        draws = rng.random((self.cfg.n, 1))
        flat = np.minimum((draws > cdf).sum(axis=1), probs.shape[1] - 1)
        return list(np.unravel_index(flat, tuple(ch.outputs)))

    def trial(self, t: int):
        cfg, d = self.cfg, self.cfg.dims
        pair, codes, x1_codebook, satellites = self.codebooks(t)
        rng = np.random.default_rng(derive_seed(cfg.seed, 1, t))
        classes = set()
        field = cfg.field

        m1 = int(rng.integers(d['M1']))
        x = {1: x1_codebook[m1]}
        u, sent = {}, {}
        for j in (2, 3):
            code, sat = codes[j], satellites[j]
            message = (int(rng.integers(code.bin_count)), int(rng.integers(d['MX{}'.format(j)])))
            sent[j] = message
            res = encode_user_j(code, sat, message, cfg.eta, self.target_enc[j], rng, cfg.maps[j])
            if res is None:
                classes.add('list_empty_{}'.format(j))
                members = code.bin_members(message[0])
                a = int(members[rng.integers(len(members))])
                b = int(rng.integers(d['B{}'.format(j)]))
                u[j] = code.codewords[a]
                x[j] = cfg.maps[j][u[j]] if sat is None else sat[message[1], b]
            else:
                _, _, u[j], x[j] = res

        y = self.transmit((x[1], x[2], x[3]), rng)
        z = field.vector_add(u[2].astype(np.int64), u[3].astype(np.int64))
        _, size_x1, size_y1 = self.target_rx1.shape
        if not typical_mask(_flat((z, x[1], y[0]), (0, size_x1, size_y1)), self.target_rx1, cfg.eta1):
            classes.add('atypical_1')
        for j in (2, 3):
            _, size_x, size_y = self.target_dec[j].shape
            if not typical_mask(_flat((u[j], x[j], y[j - 1]), (0, size_x, size_y)), self.target_dec[j], cfg.eta1):
                classes.add('atypical_{}'.format(j))

        if decode_rx1(pair, x1_codebook, y[0], cfg.eta1, self.target_rx1, cfg.decoder) != m1:
            classes.add('decode_1')
        for j in (2, 3):
            decoded = decode_rx_j(codes[j], satellites[j], y[j - 1], cfg.eta1, self.target_dec[j],
                                  cfg.maps[j], cfg.decoder)
            if decoded != sent[j]:
                classes.add('decode_{}'.format(j))

        error = any(c.startswith('decode') for c in classes)
        costs = [float(np.mean(cfg.channel.costs[i][x[i + 1]])) for i in range(3)]
        return error, classes, costs


def run_trials(cfg: SimConfig) -> SimReport:
    """Simulate `cfg.trials` blocks: fresh codebooks, uniform messages,
    encoding, the channel, decoding at all receivers, error
    classification.

    The x1 codebook is constant composition over the type nearest to
    p(x1); coset codes and satellite codebooks come from the uniform and
    i.i.d. ensembles. Every trial has its own seeds so the report depends
    only on the configuration.
    """
    if cfg.trials == 0:
        return SimReport.empty(cfg.n, cfg.seed)
    ensemble = _Ensemble(cfg)
    threads = worker_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(ensemble.trial, range(cfg.trials)))
    else:
        outcomes = [ensemble.trial(t) for t in range(cfg.trials)]

    counts = {c: 0 for c in ERROR_CLASSES}
    errors = overlaps = 0
    cost_sums, clean = np.zeros(3), 0
    for error, classes, costs in outcomes:
        errors += error
        overlaps += len(classes) > 1
        for c in classes:
            counts[c] += 1
        if not error:
            cost_sums += costs
            clean += 1
    mean_costs = [float(c / clean) for c in cost_sums] if clean else [None, None, None]
    logger.debug('n=%d: %d errors in %d trials', cfg.n, errors, cfg.trials)
    return SimReport(cfg.n, cfg.trials, errors, counts, overlaps, mean_costs, cfg.seed)


def error_curve(cfg: SimConfig, blocklengths: Sequence[int]) -> List[SimReport]:
    """Reports for the same rates over several blocklengths"""
    return [run_trials(cfg.with_blocklength(n)) for n in blocklengths]
