import io
import json
import sys

import pytest

from pccregions import cli
from pccregions.channels import Channel3IC, make_example
from pccregions.cli import (
    CSVFormatter, ASCIITableFormatter, RunManifest, canonical_json, main
)
from pccregions.exceptions import ParseError
from pccregions.regions.polytope import LinearSystem, RatePolytope
from pccregions.schema.documents import LinearSystemDocument


@pytest.fixture(autouse=True)
def streams(monkeypatch):
    data_in, data_out = io.StringIO(), io.StringIO()
    monkeypatch.setattr(cli, 'data_in', data_in)
    monkeypatch.setattr(cli, 'data_out', data_out)
    monkeypatch.setattr(cli, 'opt_io_format', 'ascii_table')
    return data_in, data_out


@pytest.fixture
def channel_files(tmp_path, example1, binary_test_channel):
    ch_path, tc_path = tmp_path / 'channel.json', tmp_path / 'test_channel.json'
    ch_path.write_text(json.dumps(example1.to_json()))
    tc_path.write_text(json.dumps(binary_test_channel.to_json()))
    return str(ch_path), str(tc_path)


def run(monkeypatch, *args):
    monkeypatch.setattr(sys, 'argv', ['pccregions'] + [str(a) for a in args])
    main()


def run_exit_code(monkeypatch, *args):
    with pytest.raises(SystemExit) as e:
        run(monkeypatch, *args)

    return e.value.code


class TestVerify:
    def test_verify__should_print_report_with_manifest(self, monkeypatch, streams):
        run(monkeypatch, 'verify', 1)

        res = json.loads(streams[1].getvalue())
        assert res['name'] == 'example1'
        assert res['holds'] is True
        assert res['manifest']['subcommand'] == 'verify'
        assert len(res['manifest']['output_digest']) == 64

    def test_verify__if_out_given__should_write_file(self, monkeypatch, streams, tmp_path):
        out = tmp_path / 'report.json'

        run(monkeypatch, 'verify', 'ex7', '--out={}'.format(out))

        assert streams[1].getvalue() == ''
        assert json.loads(out.read_text())['classification'] == 'ptp_capacity'

    def test_verify__same_input__should_give_same_digest(self, monkeypatch, streams):
        run(monkeypatch, 'verify', 2)
        first = json.loads(streams[1].getvalue())['manifest']['output_digest']
        streams[1].seek(0)
        streams[1].truncate()
        run(monkeypatch, 'verify', 2)
        second = json.loads(streams[1].getvalue())['manifest']['output_digest']

        assert first == second

    def test_verify__if_unknown_proposition__should_exit_with_domain_code(self, monkeypatch):
        assert run_exit_code(monkeypatch, 'verify', 4) == 2

    def test_verify__if_foreign_parameter__should_exit_with_domain_code(self, monkeypatch):
        assert run_exit_code(monkeypatch, 'verify', 'ex7', '--tau1=0.1') == 2


class TestRegion:
    def test_region__should_print_region_and_probes(self, monkeypatch, streams, channel_files):
        run(monkeypatch, 'region', *channel_files)

        res = json.loads(streams[1].getvalue())
        assert res['kind'] == 'alpha_f_3to1'
        assert res['region']['variables'] == ['R1', 'R2', 'R3']
        assert res['corner_probes']

    def test_region__if_layout_mismatch__should_exit_with_certification_code(self, monkeypatch, channel_files):
        assert run_exit_code(monkeypatch, 'region', *channel_files, '--kind=alpha_f') == 3

    @pytest.mark.parametrize('kind', ('alpha_z', 'beta'))
    def test_region__if_kind_not_evaluable__should_exit_with_domain_code(self, monkeypatch, channel_files, kind):
        assert run_exit_code(monkeypatch, 'region', *channel_files, '--kind={}'.format(kind)) == 2

    def test_region__if_file_missing__should_exit_with_parse_code(self, monkeypatch, tmp_path):
        missing = str(tmp_path / 'missing.json')

        assert run_exit_code(monkeypatch, 'region', missing, missing) == 2


class TestMember:
    def test_member__should_write_verdicts_to_file(self, monkeypatch, channel_files, tmp_path):
        path = tmp_path / 'rates.csv'
        path.write_text('R1,R2,R3\n0.1,0.1,0.1\n1,1,1\n')

        run(monkeypatch, '--format=csv', '--file={}'.format(path), 'member', *channel_files)

        lines = path.read_text().splitlines()
        assert lines[0] == 'R1,R2,R3,status,margin'
        assert lines[1].split(',')[3] == 'interior'
        assert lines[2].split(',')[3] == 'outside'
        assert len(lines) == 3

    def test_member__should_replace_file_atomically(self, monkeypatch, channel_files, tmp_path):
        path = tmp_path / 'rates.csv'
        path.write_text('R1,R2,R3\n0.1,0.1,0.1\n')
        inode = path.stat().st_ino

        run(monkeypatch, '--format=csv', '--file={}'.format(path), 'member', *channel_files)

        assert path.stat().st_ino != inode
        assert path.read_text().splitlines()[0] == 'R1,R2,R3,status,margin'
        assert not list(tmp_path.glob('.pccregions-*'))

    def test_member__if_unknown_kind__should_exit_with_domain_code(self, monkeypatch, channel_files):
        assert run_exit_code(monkeypatch, 'member', *channel_files, '--kind=alpha_z') == 2


class TestSearch:
    def test_search__if_out_given__should_print_trace_table(self, monkeypatch, streams, tmp_path):
        config, out = tmp_path / 'search.json', tmp_path / 'result.json'
        config.write_text(json.dumps({'example': 1, 'restarts': 1, 'iterations': 1}))

        run(monkeypatch, '--format=csv', 'search', config, '--seed=0', '--out={}'.format(out))

        lines = streams[1].getvalue().splitlines()
        res = json.loads(out.read_text())
        assert lines[0] == 'restart,iteration,step,objective,best'
        assert len(lines) == len(res['trace']) + 1
        assert res['trace']

    def test_search__if_budget_unreachable__should_exit_with_infeasibility_code(self, monkeypatch, tmp_path):
        ch = Channel3IC(make_example(1).W, ([1, 1], [0, 0], [0, 0]), (0.5, 0, 0))
        config = tmp_path / 'search.json'
        config.write_text(json.dumps({'channel': ch.to_json(), 'restarts': 1, 'iterations': 1}))

        assert run_exit_code(monkeypatch, 'search', config, '--seed=0') == 4

    def test_search__if_config_malformed__should_exit_with_parse_code(self, monkeypatch, tmp_path):
        config = tmp_path / 'search.json'
        config.write_text('{"example": 1, "restarts": 0}')

        assert run_exit_code(monkeypatch, 'search', config, '--seed=0') == 2


class TestProject:
    def test_project__should_eliminate_extra_variables(self, monkeypatch, tmp_path):
        system = LinearSystem(('R1', 'R2', 'R3', 'T')) \
            .constrain({'R1': 1, 'T': -1}, '<=', 0) \
            .constrain({'T': 1}, '<=', 0.5) \
            .constrain({'R2': 1}, '<=', 1) \
            .constrain({'R3': 1}, '<=', 1) \
            .nonnegative()
        source, out = tmp_path / 'system.json', tmp_path / 'projected.json'
        source.write_text(json.dumps(system.to_json()))

        run(monkeypatch, 'project', source, '--out={}'.format(out))

        res = json.loads(out.read_text())
        projected = RatePolytope.from_system(LinearSystemDocument.from_json(res['system']).build())
        assert res['manifest']['subcommand'] == 'project'
        assert projected.bound(1) == pytest.approx(0.5)
        assert projected.bound(2) == pytest.approx(1)


class TestSimulate:
    def test_simulate__should_report_every_blocklength(self, monkeypatch, streams, tmp_path):
        config = tmp_path / 'sim.json'
        config.write_text(json.dumps({'example': 1, 'blocklengths': [4, 6], 'trials': 3}))

        run(monkeypatch, 'simulate', config, '--seed=1')

        res = json.loads(streams[1].getvalue())
        assert [r['n'] for r in res['reports']] == [4, 6]
        assert res['manifest']['seed'] == 1


class TestManifest:
    def test_canonical_json__should_sort_keys_and_round_floats(self):
        assert canonical_json({'b': 1 / 3, 'a': [True, None]}) == '{"a":[true,null],"b":0.3333333333}'

    def test_digest__should_ignore_provenance(self):
        first = RunManifest('verify', None, 1, 0.5, {'x': 1.0})
        second = RunManifest('search', 'cfg.json', 2, 7.0, {'x': 1.0})

        assert first.digest == second.digest
        assert first.to_dict()['wall_clock'] == 0.5


class TestFormatters:
    def test_csv_writer__should_write_header_and_rows(self):
        out = io.StringIO()
        writer = CSVFormatter(io.StringIO(), out, ['a', 'b']).get_writer()

        writer.write({'a': '1', 'b': '2'})
        writer.flush()

        assert out.getvalue().splitlines() == ['a,b', '1,2']

    def test_csv_writer__if_no_records__should_write_header(self):
        out = io.StringIO()

        CSVFormatter(io.StringIO(), out, ['a', 'b']).get_writer().flush()

        assert out.getvalue().strip() == 'a,b'

    @pytest.mark.parametrize('data', ('a,b,c\n1,2,3\n', 'a\n1\n'))
    def test_csv_reader__if_headers_differ__should_raise_error(self, data):
        reader = CSVFormatter(io.StringIO(data), io.StringIO(), ['a', 'b']).get_reader()

        with pytest.raises(ParseError):
            list(reader)

    def test_ascii_table_writer__should_render_table(self):
        out = io.StringIO()
        writer = ASCIITableFormatter(io.StringIO(), out, ['a', 'b']).get_writer()

        writer.write({'a': 'x', 'b': 'y'})
        writer.flush()

        assert '| a | b |' in out.getvalue()
        assert '| x | y |' in out.getvalue()
