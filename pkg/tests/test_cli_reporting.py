"""
Tests for the command line, report formats and the survey cache
"""

import json

import pytest

from src.cli.cache import CACHE_FILE, SurveyCache, decode_record, encode_record
from src.cli.config import CACHE_ENV, Command, OutputFormat, RunConfig, default_cache_dir
from src.cli.reporting import format_rows
from src.cli.workbench_cli import EXIT_ERROR, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main
from src.errors import CacheReadError, CacheVersionError, ConfigError
from src.experiments.survey import PrimeSurveyRecord, survey_prime


def run(capsys, *argv):
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


# ============================================================================
# COMMANDS
# ============================================================================

def test_hxyz_csv(capsys):
    status, out, _ = run(capsys, 'hxyz', '--x', '100', '--y', '2', '--z', '4')
    assert status == EXIT_OK
    assert out == "x,y,z,H\n100,2,4,50\n"


def test_hxyz_jsonl(capsys):
    status, out, _ = run(capsys, 'hxyz', '--x', '100', '--y', '2', '--z', '4', '--format', 'jsonl')
    assert status == EXIT_OK
    assert json.loads(out) == {'x': 100, 'y': 2, 'z': 4, 'H': 50}


def test_hxyz_shifted(capsys):
    status, out, _ = run(capsys, 'hxyz-shifted', '--x', '30', '--y', '2', '--z', '4', '--lambda', '-1')
    assert status == EXIT_OK
    assert out.splitlines() == ['x,y,z,lambda,H_shifted', '30,2,4,-1,6']


def test_sieve(capsys):
    status, out, _ = run(capsys, 'sieve', '--x', '100')
    assert status == EXIT_OK
    assert out.splitlines() == ['x,pi,largest', '100,25,97']


def test_bounds(capsys):
    status, out, _ = run(capsys, 'bounds', '--x', '100', '--k', '2')
    assert status == EXIT_OK
    assert 'qk_bound,862.125' in out.splitlines()


def test_survey_and_cache(capsys, tmp_path):
    status, out, _ = run(capsys, 'survey', '--x-hi', '11', '--cache-dir', str(tmp_path))
    assert status == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == 'q,min_exponent,a,b,m1,m2,oracle_min,supersingular_min'
    assert lines[1] == '5,2,1,0,2,2,2,6'
    assert len(lines) == 4

    cached = (tmp_path / CACHE_FILE).read_text().splitlines()
    assert cached[0] == 'v1|5|2|2|1|0|2|2|6|12'
    assert len(cached) == 3

    status, again, _ = run(capsys, 'survey', '--x-hi', '11', '--cache-dir', str(tmp_path), '--resume')
    assert status == EXIT_OK
    assert again == out


def test_survey_oracle_mode_leaves_cells_empty(capsys, tmp_path):
    status, out, _ = run(capsys, 'survey', '--x-hi', '7', '--mode', 'oracle-only',
                         '--cache-dir', str(tmp_path))
    assert status == EXIT_OK
    assert out.splitlines()[1:] == ['5,,,,,,2,', '7,,,,,,2,']


def test_survey_writes_output_file(capsys, tmp_path):
    target = tmp_path / 'survey.csv'
    status, out, _ = run(capsys, 'survey', '--x-hi', '7', '--cache-dir', str(tmp_path),
                         '--output', str(target))
    assert status == EXIT_OK
    assert out == ''
    assert target.read_text().startswith('q,min_exponent')


def test_census_within_bound(capsys):
    status, out, _ = run(capsys, 'census', '--x', '100', '--k1', '2')
    assert status == EXIT_OK
    assert out.splitlines() == ['x,k1,observed,bound,exceeds', '100,2,10,862.125,false']


def test_census_fault_injection(capsys):
    status, out, err = run(capsys, 'census', '--x', '100', '--k1', '2', '--bound-scale', '0.001')
    assert status == EXIT_VIOLATION
    assert out.splitlines()[1].endswith(',true')
    assert 'check failed' in err


def test_threshold_summary(capsys, tmp_path):
    status, out, _ = run(capsys, 'threshold', '--x', '50', '--cache-dir', str(tmp_path))
    assert status == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == 'x,rule,primes,exceptions,fraction,violations'
    assert lines[1].startswith('50,constant(0),13,')
    assert lines[1].endswith(',0')


def test_threshold_details(capsys, tmp_path):
    status, out, _ = run(capsys, 'threshold', '--x', '50', '--details', '--cache-dir', str(tmp_path))
    assert status == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith('x,q,min_exponent,threshold,m1,m2')
    assert lines[1].startswith('50,5,2,')


def test_duke_command(capsys):
    status, out, _ = run(capsys, 'duke', '--x', '10000', '--epsilon', '0.05', '--realize', '0')
    assert status == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == 'x,epsilon,q,p,k,exponent,threshold,a,b,genus2_bound'
    assert lines[1].startswith('10000,0.05,1093,7,1029,147,')


def test_usage_errors(capsys):
    assert run(capsys, 'hxyz', '--x', '100', '--y', '5', '--z', '4')[0] == EXIT_USAGE
    assert run(capsys, 'duke', '--x', '10000', '--epsilon', '0.2')[0] == EXIT_USAGE
    status, _, err = run(capsys, 'census')
    assert status == EXIT_USAGE
    assert '--x' in err
    with pytest.raises(SystemExit):
        main(['no-such-command'])


def test_survey_capacity_is_usage_error(capsys, tmp_path):
    status, _, err = run(capsys, 'survey', '--x-hi', '3000', '--cache-dir', str(tmp_path))
    assert status == EXIT_USAGE
    assert 'p_exhaustive' in err


# ============================================================================
# CONFIG
# ============================================================================

def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(command=Command.SIEVE).validate()
    with pytest.raises(ConfigError):
        RunConfig(command=Command.THRESHOLD, x=100, eta=0.02).validate()
    config = RunConfig(command=Command.MERTENS, x_grid=[10**8, 10**6]).validate()
    assert config.grid() == [10**6, 10**8]


def test_default_cache_dir(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert default_cache_dir() == tmp_path
    monkeypatch.delenv(CACHE_ENV)
    assert default_cache_dir().name == '.workbench_cache'


# ============================================================================
# REPORTS
# ============================================================================

def test_report_cells():
    rows = [{'a': 1, 'b': 0.1234567, 'c': True, 'd': None}]
    header = ['a', 'b', 'c', 'd']
    assert format_rows(rows, header) == "a,b,c,d\n1,0.123457,true,\n"
    assert json.loads(format_rows(rows, header, OutputFormat.JSONL)) == \
        {'a': 1, 'b': 0.123457, 'c': True, 'd': None}


def test_empty_report_keeps_header():
    assert format_rows([], ['q', 'm2']) == "q,m2\n"
    assert format_rows([], ['q', 'm2'], OutputFormat.JSONL) == ""


# ============================================================================
# CACHE
# ============================================================================

def test_cache_line_format():
    record = survey_prime(5)
    assert encode_record(record) == 'v1|5|2|2|1|0|2|2|6|12'
    assert decode_record(encode_record(record)) == record
    oracle = PrimeSurveyRecord(q=7, oracle_min=2)
    assert encode_record(oracle) == 'v1|7|2|||||||0'
    assert decode_record('v1|7|2|||||||0') == oracle


def test_cache_store_merges(tmp_path):
    cache = SurveyCache(tmp_path)
    cache.store([PrimeSurveyRecord(q=7, oracle_min=2)])
    cache.store([PrimeSurveyRecord(q=5, oracle_min=2)])
    assert list(cache.read_all()) == [5, 7]
    assert sorted(cache.load(6, 10)) == [7]
    assert SurveyCache(tmp_path, read_enabled=False).load(0, 100) == {}
    assert list(tmp_path.iterdir()) == [tmp_path / CACHE_FILE]


def test_cache_version_error_reports_offset(tmp_path):
    good = 'v1|5|2|||||||0\n'
    (tmp_path / CACHE_FILE).write_text(good + 'v2|7|2|||||||0\n')
    with pytest.raises(CacheVersionError) as err:
        SurveyCache(tmp_path).read_all()
    assert err.value.offset == len(good)


def test_cache_malformed_line(tmp_path):
    (tmp_path / CACHE_FILE).write_text('v1|5|two|||||||0\n')
    with pytest.raises(CacheReadError) as err:
        SurveyCache(tmp_path).read_all()
    assert err.value.offset == 0
    (tmp_path / CACHE_FILE).write_text('garbage\n')
    with pytest.raises(CacheReadError):
        SurveyCache(tmp_path).read_all()


def test_cache_ignores_leftover_temp_file(tmp_path):
    (tmp_path / '.survey.abc.tmp').write_text('half written')
    cache = SurveyCache(tmp_path)
    assert cache.read_all() == {}
    cache.store([PrimeSurveyRecord(q=5, oracle_min=2)])
    assert list(cache.read_all()) == [5]


def test_corrupt_cache_fails_resumed_survey(capsys, tmp_path):
    (tmp_path / CACHE_FILE).write_text('v9|5|2|||||||0\n')
    status, _, err = run(capsys, 'survey', '--x-hi', '7', '--cache-dir', str(tmp_path), '--resume')
    assert status == EXIT_ERROR
    assert 'CacheVersionError' in err


def test_cache_rejects_line_without_prime(tmp_path):
    good = 'v1|5|2|||||||0\n'
    (tmp_path / CACHE_FILE).write_text(good + 'v1|||||||||\n')
    with pytest.raises(CacheReadError) as err:
        SurveyCache(tmp_path).read_all()
    assert err.value.offset == len(good)
    with pytest.raises(CacheReadError):
        decode_record('v1|7|2|2|1||2|2|4|8')


# ============================================================================
# COMMAND NAMES AND DETERMINISM
# ============================================================================

def test_published_command_names(capsys, tmp_path):
    status, out, _ = run(capsys, 'thm1', '--x', '50', '--cache-dir', str(tmp_path))
    assert status == EXIT_OK
    assert out.splitlines()[1].startswith('50,constant(0),13,')

    status, out, _ = run(capsys, 'thm3', '--x', '50', '--cache-dir', str(tmp_path))
    assert status == EXIT_OK
    assert out.splitlines()[1].startswith('50,half(0.05),13,')

    status, out, _ = run(capsys, 'ford-sweep', '--x', '1000', '--y-list', '10')
    assert status == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == 'y,z,u,H,H_shifted,estimate,ratio,ratio_shifted'
    assert lines[1].startswith('10,20,')


def test_descriptive_aliases_match(capsys, tmp_path):
    _, published, _ = run(capsys, 'ford-sweep', '--x', '1000', '--y-list', '10,12')
    _, alias, _ = run(capsys, 'sweep', '--x', '1000', '--y-list', '10,12')
    assert alias == published
    _, published, _ = run(capsys, 'thm3', '--x', '50', '--cache-dir', str(tmp_path))
    _, alias, _ = run(capsys, 'half-threshold', '--x', '50', '--cache-dir', str(tmp_path))
    assert alias == published


def test_survey_output_independent_of_threads(capsys, tmp_path):
    _, single, _ = run(capsys, 'survey', '--x-hi', '500', '--threads', '1',
                       '--cache-dir', str(tmp_path / 'one'))
    _, pooled, _ = run(capsys, 'survey', '--x-hi', '500', '--threads', '4',
                       '--cache-dir', str(tmp_path / 'four'))
    assert pooled == single
    assert len(single.splitlines()) == 94


def test_interrupted_survey_resumes_to_same_output(capsys, tmp_path):
    cache_dir = tmp_path / 'interrupted'
    run(capsys, 'survey', '--x-hi', '300', '--cache-dir', str(cache_dir))
    (cache_dir / '.survey.partial.tmp').write_text('v1|307|')
    status, resumed, _ = run(capsys, 'survey', '--x-hi', '500', '--resume', '--threads', '2',
                             '--cache-dir', str(cache_dir))
    assert status == EXIT_OK
    _, fresh, _ = run(capsys, 'survey', '--x-hi', '500', '--cache-dir', str(tmp_path / 'fresh'))
    assert resumed == fresh
