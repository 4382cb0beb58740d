import abc
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Type, Any, Iterable, TextIO, Mapping, List, Union, KeysView, Optional, Sequence

import fire
import numpy as np
import prettytable
import wrapt
from fire.core import FireError

from pccregions import __version__
from pccregions.common import format_float
from pccregions.enums import RegionKind
from pccregions.exceptions import PCCError, ParseError, DomainError
from pccregions.regions.evaluators import evaluate, member, support
from pccregions.regions.polytope import PROBE_DIRECTIONS, RATE_VARIABLES, RatePolytope
from pccregions.schema.documents import (
    ChannelDocument, TestChannelDocument, SearchConfigDocument, SimConfigDocument, LinearSystemDocument
)
from pccregions.search import (
    worker_threads, maximize_weighted_rate, table1_search, check_example1, check_prop2, check_prop3, check_prop5,
    check_example7, example8_corners, example8_terms, VerdictReport
)
from pccregions.sim import run_trials, error_curve

opt_io_format = 'ascii_table'
data_in = sys.stdin
data_out = sys.stdout

MEMBER_HEADERS = ['R1', 'R2', 'R3', 'status', 'margin']
PROBE_HEADERS = ['mu', 'value', 'R1', 'R2', 'R3']
CURVE_HEADERS = ['n', 'trials', 'errors', 'error_rate', 'ci_lower', 'ci_upper']
TRACE_HEADERS = ['restart', 'iteration', 'step', 'objective', 'best']


class BaseFormatter(metaclass=abc.ABCMeta):
    """Base class for particular formatters"""
    class WriterInterface(metaclass=abc.ABCMeta):
        def __init__(self, ostream: TextIO, headers: list):
            self._ostream = ostream
            self._headers = headers
            self._writer = None

        @abc.abstractmethod
        def write(self, record: Mapping[str, str]) -> None:
            pass

        @abc.abstractmethod
        def flush(self) -> None:
            pass

    def __init__(self, istream: TextIO, ostream: TextIO, headers: Iterable[str]):
        self._istream = istream
        self._ostream = ostream
        self._headers = list(headers)

    @staticmethod
    def get_formatter(io_format: str) -> 'Type[BaseFormatter]':
        if io_format not in io_formats:
            raise FireError("{} format(s) are only supported", sorted(io_formats.keys()))
        return io_formats[io_format]

    def validate_headers(self, input_headers: Union[set, KeysView]):
        headers = set(self._headers)
        extra = set(input_headers) - headers
        if extra:
            raise ParseError("Unknown fields in input: {}".format(sorted(extra)))

        missed = headers - set(input_headers)
        if missed:
            raise ParseError("Missed fields in input: {}".format(sorted(missed)))

    @abc.abstractmethod
    def get_reader(self) -> Iterable[Mapping[str, str]]:
        pass

    @abc.abstractmethod
    def get_writer(self) -> WriterInterface:
        pass


class CSVFormatter(BaseFormatter):
    """Formatter for comma-separated values format"""
    class CSVWriter(BaseFormatter.WriterInterface):
        def write(self, record: Mapping[str, str]) -> None:
            record = {k: record.get(k) for k in self._headers}

            if self._writer is None:
                self._writer = csv.DictWriter(self._ostream, self._headers)
                self._writer.writeheader()

            self._writer.writerow(record)

        def flush(self) -> None:
            if self._writer is None:
                self._writer = csv.DictWriter(self._ostream, self._headers)
                self._writer.writeheader()

            self._ostream.flush()

    def get_reader(self) -> Iterable[Mapping[str, str]]:
        def _reader():
            checked = False
            for item in csv.DictReader(self._istream):
                if checked is False:
                    self.validate_headers(item.keys())
                    checked = True

                yield {k: item[k] for k in self._headers}

        return _reader()

    def get_writer(self) -> BaseFormatter.WriterInterface:
        return CSVFormatter.CSVWriter(self._ostream, self._headers)


class ASCIITableFormatter(BaseFormatter):
    class ASCIITableWriter(BaseFormatter.WriterInterface):
        def write(self, record: Mapping[str, str]) -> None:
            if self._writer is None:
                self._writer = prettytable.PrettyTable(field_names=self._headers, align='l')

            self._writer.add_row([record.get(k) for k in self._headers])

        def flush(self) -> None:
            if self._writer is None:
                self._writer = prettytable.PrettyTable(field_names=self._headers, align='l')

            self._ostream.write(self._writer.get_string())
            self._ostream.write('\n')
            self._ostream.flush()

    def get_writer(self) -> BaseFormatter.WriterInterface:
        return ASCIITableFormatter.ASCIITableWriter(self._ostream, self._headers)

    def get_reader(self) -> Iterable[Mapping[str, str]]:
        raise FireError(
            'You should to specify input data format, e.g. `pccregions --format=csv ...`'
        )


io_formats = {
    'csv': CSVFormatter,
    'ascii_table': ASCIITableFormatter
}


def _plain(value: Any) -> Any:
    """JSON-ready copy with floats rounded to the output precision"""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return float(format_float(value))
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    return str(value)


def canonical_json(document: Any) -> str:
    return json.dumps(_plain(document), sort_keys=True, separators=(',', ':'), ensure_ascii=False)


class RunManifest:
    """Provenance of one CLI run. The digest covers only the canonical
    result JSON, so equal inputs give equal digests
    """
    def __init__(self, subcommand: str, config_path: Optional[str], seed: Optional[int], wall_clock: float,
                 result: Any):
        self.subcommand = subcommand
        self.config_path = config_path
        self.seed = seed
        self.version = __version__
        self.wall_clock = wall_clock
        self.digest = hashlib.sha256(canonical_json(result).encode('utf-8')).hexdigest()

    def to_dict(self) -> dict:
        return {
            'subcommand': self.subcommand,
            'config_path': self.config_path,
            'seed': self.seed,
            'version': self.version,
            'wall_clock': self.wall_clock,
            'output_digest': self.digest,
        }


def _read_text(path: str) -> str:
    try:
        with open(path, 'r') as f:
            return f.read()
    except OSError as e:
        raise ParseError('Unable to read {}: {}'.format(path, e))


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix='.pccregions-')
    try:
        with os.fdopen(fd, 'w') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _region_kind(kind: str) -> RegionKind:
    if kind not in {k.value for k in RegionKind}:
        raise DomainError('Unknown region kind, available are: {}'.format([k.value for k in RegionKind]))
    return RegionKind(kind)


def _names(value: Union[str, Sequence[str]]) -> List[str]:
    if isinstance(value, str):
        return [v.strip() for v in value.split(',') if v.strip()]
    return [str(v) for v in value]


class CLI:
    """PCC rate-region command-line interface

    Typical CLI usage:
        $ pccregions <command> [parameters]

    JSON results (regions, search results, reports) go to `--out` or to
    stdout and carry a `manifest` object. Tables (membership verdicts,
    corner probes, error curves) are written in the `--format` to
    `--file` or stdout.

    Every command has its own help contents, just type it and append
    `--help` at the end.

    Exit codes: 0 success, 2 parse or domain error, 3 certification
    error, 4 infeasibility.

    Args:
        format: format for tables. Possible values are: ascii_table,
            csv. Default is ascii_table.
        file: read and write tables to/from this file instead of
            stdin/stdout. Written tables replace the file atomically
        verbose: log computation progress to stderr
    """
    def __init__(self):
        self.__call__()

    def __call__(self, *, format: str = 'ascii_table', file: str = None, verbose: bool = False):
        if format not in io_formats:
            # Workaround of "Could not consume arg" message appearing
            # instead of exception message problem
            sys.stderr.write("ERROR: Unknown format '{}', available are: {}\n".format(
                format, list(sorted(io_formats.keys()))
            ))
            raise FireError("Unknown format '{}', available are: {}".format(
                format, list(sorted(io_formats.keys()))
            ))

        global opt_io_format
        opt_io_format = format

        logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, stream=sys.stderr, force=True)

        if file:
            d = os.path.dirname(os.path.abspath(file))
            if not os.path.isdir(d):
                sys.stderr.write("ERROR: Directory '{}' does not exist\n".format(d))
                raise FireError("Directory {} does not exist".format(d))

            global data_in
            global data_out
            data_in = io.StringIO(_read_text(file) if os.path.exists(file) else '')
            data_out = WriteFile(file)

        return self

    @staticmethod
    def _emit(subcommand: str, result: Mapping, *, config_path: Optional[str] = None, seed: Optional[int] = None,
              started: float, out: Optional[str] = None):
        manifest = RunManifest(subcommand, config_path, seed, round(time.time() - started, 3), result)
        document = dict(_plain(result))
        document['manifest'] = manifest.to_dict()
        text = json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + '\n'
        if out:
            _atomic_write(out, text)
        else:
            data_out.write(text)
            data_out.flush()

    @staticmethod
    def _table(headers: List[str], records: Iterable[Mapping[str, Any]]):
        formatter = BaseFormatter.get_formatter(opt_io_format)(data_in, data_out, headers)
        writer = formatter.get_writer()
        for record in records:
            writer.write({k: format_float(v) if isinstance(v, float) else v for k, v in record.items()})
        writer.flush()

    @staticmethod
    def _load(channel: str, test_channel: str):
        ch = ChannelDocument.from_json(_read_text(channel)).build()
        tc = TestChannelDocument.from_json(_read_text(test_channel)).build(ch)
        return ch, tc

    def region(self, channel: str, test_channel: str, *, kind: str = 'alpha_f_3to1', out: str = None):
        """
        Evaluate the rate region of a test channel. Closed-form kinds
        give a rate polytope, alpha_f and alpha_uf give the lifted
        system over rates and code parameters. With `--out` the JSON
        goes to that file and the corner probes are printed as a table.

        Args:
            channel: channel JSON file
            test_channel: test channel JSON file
            kind: region kind, one of beta, alpha_u, alpha_f_3to1,
                alpha_g_3to1, alpha_f, alpha_uf
            out: write the region JSON to this file
        """
        started = time.time()
        kind = _region_kind(kind)
        _, tc = self._load(channel, test_channel)
        region = evaluate(kind, tc)
        probes = [(mu, ) + support(region, mu) for mu in PROBE_DIRECTIONS]
        result = {
            'kind': kind.value,
            'region': region.to_json(),
            'corner_probes': [{'mu': list(mu), 'value': v, 'rates': list(r)} for mu, v, r in probes],
        }
        self._emit('region', result, config_path=channel, started=started, out=out)
        if out:
            self._table(PROBE_HEADERS, (
                dict(zip(RATE_VARIABLES, r), mu=' '.join(str(m) for m in mu), value=v) for mu, v, r in probes
            ))

    def member(self, channel: str, test_channel: str, *, kind: str = 'alpha_f_3to1', eps: float = 1e-9):
        """
        Decide membership of rate triples read as CSV (columns R1, R2,
        R3) from `--file` or stdin. Requires `--format=csv` for input.

        Args:
            channel: channel JSON file
            test_channel: test channel JSON file
            kind: region kind
            eps: slack of strict inequalities
        """
        kind = _region_kind(kind)
        _, tc = self._load(channel, test_channel)
        formatter = BaseFormatter.get_formatter(opt_io_format)(data_in, data_out, RATE_VARIABLES)
        triples = []
        for record in formatter.get_reader():
            try:
                triples.append([float(record[v]) for v in RATE_VARIABLES])
            except ValueError as e:
                raise ParseError('Bad rate value: {}'.format(e))

        with ThreadPoolExecutor(max_workers=worker_threads()) as pool:
            verdicts = list(pool.map(lambda rates: member(kind, tc, rates, eps), triples))
        rows = [
            dict(zip(RATE_VARIABLES, rates), status=v.status.value, margin=v.margin)
            for rates, v in zip(triples, verdicts)
        ]

        self._table(MEMBER_HEADERS, rows)

    def search(self, config: str, *, seed: int, out: str = None):
        """
        Search test channels maximizing a weighted sum rate. With `out`
        given the search trace is printed as a table as well.

        Args:
            config: search JSON file (channel or example, kind, mu,
                algebra, search settings; `table1_row` selects a row of
                the published quaternary table)
            seed: master seed
            out: write the result JSON to this file
        """
        started = time.time()
        doc = SearchConfigDocument.from_json(_read_text(config))
        cfg = doc.build(seed=seed)
        if doc.table1_row is not None:
            name = doc.raw_data.get('algebra')
            if not isinstance(name, str):
                raise ParseError('Table search needs the algebra as a name: F7, F8 or Z4')
            res = table1_search(doc.table1_row, name, cfg)
        else:
            res = maximize_weighted_rate(doc.build_channel(), cfg=cfg)
        result = {
            'config': cfg.to_dict(),
            'value': res.value,
            'rates': list(res.rates),
            'test_channel': res.test_channel.to_json(),
            'trace': [row.to_dict() for row in res.trace],
        }
        self._emit('search', result, config_path=config, seed=seed, started=started, out=out)
        if out:
            self._table(TRACE_HEADERS, (row.to_dict() for row in res.trace))

    def verify(self, prop: str, *, tau: float = None, tau1: float = None, delta: float = None,
               delta1: float = None, delta2: float = None, delta3: float = None, beta_z: float = None,
               out: str = None):
        """
        Check the conditions of a published example or proposition.
        Missing parameters take the published values.

        Args:
            prop: one of 1, 2, 3, 5, ex7, ex8
            tau: cost budget of users 2, 3 (user 1 in example 1)
            tau1: cost budget of user 1
            delta: crossover probability of users 2, 3
            delta1: crossover probability of user 1
            delta2: crossover probability of user 2 (example 1)
            delta3: crossover probability of user 3 (example 1)
            beta_z: Z-channel parameter (examples 7, 8)
            out: write the report JSON to this file
        """
        started = time.time()
        given = {k: v for k, v in dict(tau=tau, tau1=tau1, delta=delta, delta1=delta1, delta2=delta2,
                                       delta3=delta3, beta_z=beta_z).items() if v is not None}
        checks = {
            '1': (check_example1, dict(tau=0.125, delta1=0.01, delta2=0.15, delta3=0.15)),
            '2': (check_prop2, dict(tau1=1 / 90, tau=0.15, delta1=0.01, delta=0.067)),
            '3': (check_prop3, dict(tau1=0.01, tau=0.1525, delta=0.067)),
            '5': (check_prop5, dict(delta1=0.75 - math.sqrt(30) / 8, delta=0.125, tau=0.75 - math.sqrt(30) / 8)),
            'ex7': (check_example7, dict(tau=0.1284, delta=0.1, beta_z=0.2210)),
            'ex8': (None, dict(tau=0.1, delta=0.01, beta_z=0.2)),
        }
        prop = str(prop)
        if prop not in checks:
            raise DomainError('Unknown proposition {!r}, available are: {}'.format(prop, list(checks)))
        fn, params = checks[prop]
        unknown = set(given) - set(params)
        if unknown:
            raise DomainError('Parameters {} do not apply to {}'.format(sorted(unknown), prop))
        params.update(given)

        if fn is None:
            first, second = example8_corners(**params)
            result = {'name': 'example8', 'first_point': list(first), 'second_point': list(second),
                      'terms': example8_terms(**params), 'params': params}
        else:
            report = fn(**params)  # type: VerdictReport
            for note in report.notes:
                sys.stderr.write('WARN: {}\n'.format(note))
            result = dict(report.to_dict(), params=params)
        self._emit('verify', result, started=started, out=out)

    def project(self, sys: str, *, keep: Union[str, Sequence[str]] = 'R1,R2,R3', prune: bool = True,
                out: str = None):
        """
        Project a linear system onto a subset of its variables by
        Fourier-Motzkin elimination.

        Args:
            sys: linear system JSON file
            keep: comma-separated variables to keep
            prune: remove redundant inequalities after every elimination
            out: write the projected system JSON to this file
        """
        started = time.time()
        system = LinearSystemDocument.from_json(_read_text(sys)).build()
        projected = system.project(_names(keep), prune=prune)
        if tuple(projected.variables) == RATE_VARIABLES:
            projected = RatePolytope.from_system(projected)
        self._emit('project', {'system': projected.to_json()}, config_path=sys, started=started, out=out)

    def simulate(self, config: str, *, seed: int, out: str = None):
        """
        Monte Carlo simulation of the coset-code scheme on a 3-to-1
        channel. With `blocklengths` in the config the error curve is
        printed as a table as well.

        Args:
            config: simulation JSON file
            seed: master seed
            out: write the report JSON to this file
        """
        started = time.time()
        doc = SimConfigDocument.from_json(_read_text(config))
        cfg = doc.build(seed=seed)
        if doc.blocklengths:
            reports = error_curve(cfg, doc.blocklengths)
        else:
            reports = [run_trials(cfg)]
        result = {'config': cfg.to_dict(), 'reports': [r.to_dict() for r in reports]}
        self._emit('simulate', result, config_path=config, seed=seed, started=started, out=out)
        if doc.blocklengths and out:
            self._table(CURVE_HEADERS, ({
                'n': r.n, 'trials': r.trials, 'errors': r.errors, 'error_rate': r.error_rate,
                'ci_lower': r.confidence_interval[0], 'ci_upper': r.confidence_interval[1]
            } for r in reports))


class WriteFile(wrapt.ObjectProxy):
    """Text buffer standing for a table file. Every flush replaces the
    file with the buffer contents atomically
    """
    def __init__(self, path: str):
        super().__init__(io.StringIO())
        self._self_path = path

    def flush(self):
        self.__wrapped__.flush()
        _atomic_write(self._self_path, self.__wrapped__.getvalue())


def main():
    try:
        fire.Fire(CLI())
    except PCCError as e:
        sys.stderr.write('ERROR: {}\n'.format(e))
        sys.exit(e.err)


if __name__ == '__main__':
    main()
