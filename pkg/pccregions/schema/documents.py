__all__ = [
    'ChannelDocument',
    'TestChannelDocument',
    'SearchConfigDocument',
    'SimConfigDocument',
    'LinearSystemDocument',
    'load_document'
]
import math
from numbers import Real
from typing import Optional, Any

from .model import Document, Field, documents_registry
from ..algebra import parse_algebra
from ..channels import Channel3IC, make_example
from ..enums import RegionKind, DecodingRule
from ..exceptions import ParseError
from ..regions.polytope import LinearSystem
from ..regions.testchannel import LAYOUTS, TestChannel, identity_test_channel
from ..search import SearchConfig
from ..sim import SimConfig, SIM_RATES

Number = (int, float)


def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool) and math.isfinite(value)


def _positive_int(value: int) -> bool:
    return value > 0


def _non_negative(value) -> bool:
    return value >= 0


def _sizes(value: list) -> bool:
    return len(value) == 3 and all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in value)


def _triple(value: list) -> bool:
    return len(value) == 3 and all(_is_number(v) and v >= 0 for v in value)


def _algebra(value) -> bool:
    parse_algebra(value)
    return True


def _region_kind(value: str) -> bool:
    return value in {k.value for k in RegionKind}


def _example_number(value: int) -> bool:
    return 1 <= value <= 8


def _marginals(value: list) -> bool:
    return len(value) == 3 and all(
        isinstance(m, list) and m and all(_is_number(p) and p >= 0 for p in m) for m in value
    )


def _rates(value: dict) -> bool:
    return set(value) <= set(SIM_RATES) and all(_is_number(v) and v >= 0 for v in value.values())


class _ChannelSource(Document):
    """Channel given inline or as a published example with parameters"""
    example = Field('example', int, validation_cb=_example_number)
    params = Field('params', dict, default={})
    channel = Field('channel', dict)

    def build_channel(self) -> Channel3IC:
        if self.channel is not None:
            if self.example is not None:
                raise ParseError('Give either "channel" or "example" in {} document'.format(self.document_kind))
            return ChannelDocument.from_json(self.channel).build()
        if self.example is None:
            raise ParseError('{} document needs "channel" or "example"'.format(self.document_kind))
        return make_example(self.example, **self.params)


class ChannelDocument(Document):
    """Three-user channel: alphabet sizes, the transition tensor W[x⃗][y⃗],
    per-user cost tables and budgets
    """
    document_kind = 'channel'

    inputs = Field('inputs', list, validation_cb=_sizes, required=True)
    outputs = Field('outputs', list, validation_cb=_sizes, required=True)
    transition = Field('W', list, required=True)
    costs = Field('costs', list, validation_cb=lambda v: len(v) == 3)
    budgets = Field('budgets', list, validation_cb=_triple)
    name = Field('name', str, default='')

    def build(self) -> Channel3IC:
        return Channel3IC.from_json(self.raw_data)


class TestChannelDocument(Document):
    """Joint pmf of a test channel, either in full (`probs` over
    `axes`) or as per-user factors (`factors`, `q`), with the algebras
    of the structured auxiliaries
    """
    __test__ = False
    document_kind = 'test_channel'

    layout = Field('layout', str, validation_cb=lambda v: v in LAYOUTS, default='3to1')
    axes = Field('axes', list)
    probs = Field('probs', list)
    factors = Field('factors', list, validation_cb=lambda v: len(v) == 3)
    q = Field('q', list)
    algebras = Field('algebras', dict, validation_cb=lambda v: all(_algebra(a) for a in v.values()), default={})
    w = Field('w', list, validation_cb=lambda v: all(_is_number(x) and x >= 0 for x in v))

    def build(self, channel: Channel3IC) -> TestChannel:
        if (self.probs is None) == (self.factors is None):
            raise ParseError('Test channel document needs exactly one of "probs" and "factors"')
        return TestChannel.from_json(self.raw_data, channel)


class SearchConfigDocument(_ChannelSource):
    """Test-channel search: the channel, the region kind, the objective
    weights and the search settings. `table1_row` selects a row of the
    published quaternary table instead of a channel
    """
    document_kind = 'search'

    kind = Field('kind', str, validation_cb=_region_kind, get_cb=RegionKind, default=RegionKind.alpha_f_3to1)
    mu = Field('mu', list, validation_cb=_triple)
    algebra = Field('algebra', (str, dict), validation_cb=_algebra, get_cb=parse_algebra)
    table1_row = Field('table1_row', int, validation_cb=lambda v: 1 <= v <= 3)
    card_q = Field('card_q', int, validation_cb=_positive_int)
    card_u = Field('card_u', int, validation_cb=_positive_int)
    card_v = Field('card_v', int, validation_cb=_positive_int)
    restarts = Field('restarts', int, validation_cb=_positive_int)
    iterations = Field('iterations', int, validation_cb=_positive_int)
    step = Field('step', Number, validation_cb=lambda v: v > 0)
    min_step = Field('min_step', Number, validation_cb=lambda v: v > 0)
    seed = Field('seed', int, validation_cb=_non_negative)
    share_factors = Field('share_factors', bool)
    aligned_starts = Field('aligned_starts', bool)

    _CONFIG_FIELDS = ('kind', 'mu', 'algebra', 'card_q', 'card_u', 'card_v', 'restarts', 'iterations', 'step',
                      'min_step', 'seed', 'share_factors', 'aligned_starts')

    def build(self, seed: Optional[int] = None) -> SearchConfig:
        kwargs = {f: getattr(self, f) for f in self._CONFIG_FIELDS if self._fields_mapping[f] in self._raw_data}
        if seed is not None:
            kwargs['seed'] = seed
        return SearchConfig(**kwargs)


class SimConfigDocument(_ChannelSource):
    """Monte Carlo run. The test channel is given inline or built with
    U_j = X_j from input marginals; rates are given explicitly or as a
    scale of the field-region sum-rate corner
    """
    document_kind = 'simulate'

    test_channel = Field('test_channel', dict)
    marginals = Field('marginals', list, validation_cb=_marginals)
    algebra = Field('algebra', (str, dict), validation_cb=_algebra, get_cb=parse_algebra, default='F2')
    rates = Field('rates', dict, validation_cb=_rates)
    scale = Field('scale', Number, validation_cb=_non_negative, default=0.8)
    n = Field('n', int, validation_cb=_positive_int, default=12)
    blocklengths = Field('blocklengths', list, validation_cb=lambda v: all(
        isinstance(n, int) and not isinstance(n, bool) and n > 0 for n in v
    ))
    trials = Field('trials', int, validation_cb=_non_negative, default=1000)
    seed = Field('seed', int, validation_cb=_non_negative, default=0)
    eta = Field('eta', Number, validation_cb=lambda v: 0 < v <= 1)
    eta1 = Field('eta1', Number, validation_cb=lambda v: v > 0)
    decoder = Field('decoder', str, validation_cb=lambda v: v in {r.value for r in DecodingRule},
                    get_cb=DecodingRule)
    spare_rows = Field('spare_rows', int, validation_cb=_non_negative)

    def build_test_channel(self, channel: Channel3IC) -> TestChannel:
        if self.test_channel is not None:
            return TestChannelDocument.from_json(self.test_channel).build(channel)
        algebra = self.algebra if not isinstance(self.algebra, str) else parse_algebra(self.algebra)
        marginals = self.marginals
        if marginals is None:
            first = [1.0 / channel.inputs[0]] * channel.inputs[0]
            if channel.inputs[0] == 2:
                tau = min(channel.budgets[0], 0.5)
                first = [1 - tau, tau]
            marginals = [first] + [[1.0 / n] * n for n in channel.inputs[1:]]
        return identity_test_channel(channel, marginals, algebra)

    def build(self, seed: Optional[int] = None) -> SimConfig:
        channel = self.build_channel()
        tc = self.build_test_channel(channel)
        seed = self.seed if seed is None else seed
        if self.rates is not None:
            return SimConfig(tc, self.rates, self.n, self.trials, seed, self.eta, self.eta1,
                             self.decoder or DecodingRule.typical, self.spare_rows or 0)
        extra = {f: getattr(self, f) for f in ('decoder', 'spare_rows') if getattr(self, f) is not None}
        return SimConfig.from_region_corner(tc, self.scale, self.n, self.trials, seed, self.eta, self.eta1, **extra)


class LinearSystemDocument(Document):
    """Linear system over named variables as written by `LinearSystem.to_json`"""
    document_kind = 'linear_system'

    variables = Field('variables', list, validation_cb=lambda v: all(isinstance(x, str) for x in v), required=True)
    halfspaces = Field('halfspaces', list, required=True)

    def build(self) -> LinearSystem:
        return LinearSystem.from_json(self.raw_data)


def load_document(kind: str, data: Any) -> Document:
    """Validate a document of a registered kind"""
    if kind not in documents_registry:
        raise ParseError('Unknown document kind {!r}, available are: {}'.format(kind, sorted(documents_registry)))
    return documents_registry[kind].from_json(data)
