"""
Tests de la CLI (typer) con CliRunner
"""

import json

import pytest
from typer.testing import CliRunner

from cartas.cli import EXIT_ERROR, EXIT_FAILED, EXIT_INFEASIBLE, EXIT_OK, app


runner = CliRunner()


def _run(tmp_path, *extra, name='salida'):
    out = tmp_path / name
    result = runner.invoke(app, ['run', '--a', '7', '--c', '1', '--d', '2', '--k', '2', '--out', str(out), *extra])
    return result, out


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def test_run_writes_transcript_and_deal(tmp_path):
    result, out = _run(tmp_path, '--seed', '42')
    assert result.exit_code == EXIT_OK, result.output
    assert '✅ C deducido por Bob' in result.output

    transcript = json.loads((out / 'transcript.json').read_text(encoding='utf-8'))
    deal = json.loads((out / 'deal.json').read_text(encoding='utf-8'))
    assert transcript['seed'] == 42
    assert transcript['params'] == {'a': 7, 'b': 41, 'c': 1, 'd': 2, 'k': 2, 'modulus': []}
    assert len(transcript['f']) == 49
    assert transcript['claimed_C'] == deal['C']
    assert '_encoding' in transcript


def test_run_infeasible_parameters(tmp_path):
    result = runner.invoke(app, ['run', '--a', '3', '--c', '1', '--d', '2', '--k', '1',
                                 '--out', str(tmp_path / 'x')])
    assert result.exit_code == EXIT_INFEASIBLE
    assert 'cond4' in result.output
    assert not (tmp_path / 'x').exists()


def test_run_without_feasible_k(tmp_path):
    result = runner.invoke(app, ['run', '--a', '3', '--c', '1', '--out', str(tmp_path / 'x')])
    assert result.exit_code == EXIT_INFEASIBLE


def test_run_in_three_dimensions(tmp_path):
    result = runner.invoke(app, ['run', '--a', '7', '--c', '4', '--d', '3', '--k', '2', '--seed', '1',
                                 '--out', str(tmp_path / 'd3')])
    assert result.exit_code == EXIT_OK, result.output
    transcript = json.loads((tmp_path / 'd3' / 'transcript.json').read_text(encoding='utf-8'))
    assert transcript['params']['b'] == 332


def test_run_seed_from_environment(tmp_path):
    out = tmp_path / 'env'
    result = runner.invoke(app, ['run', '--a', '7', '--c', '1', '--d', '2', '--k', '2', '--out', str(out)],
                           env={'RC_SEED': '7'})
    assert result.exit_code == EXIT_OK
    assert json.loads((out / 'transcript.json').read_text(encoding='utf-8'))['seed'] == 7


def test_run_is_reproducible(tmp_path):
    _, first = _run(tmp_path, '--seed', '5', name='uno')
    _, second = _run(tmp_path, '--seed', '5', name='dos')
    for name in ('transcript.json', 'deal.json'):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_run_random_leftover(tmp_path):
    result, _ = _run(tmp_path, '--seed', '3', '--mode', 'random')
    assert result.exit_code == EXIT_OK, result.output


def test_run_many_seeds(tmp_path):
    result, out = _run(tmp_path, '--seed', '10', '--runs', '3')
    assert result.exit_code == EXIT_OK, result.output
    combined = json.loads((out / 'runs.json').read_text(encoding='utf-8'))
    assert combined['metadata']['seeds'] == [10, 11, 12]
    assert combined['metadata']['totales']['legales'] == 3
    assert (out / 'runs.csv').exists()


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify(out, report):
    return runner.invoke(app, ['verify', '--transcript', str(out / 'transcript.json'),
                               '--deal', str(out / 'deal.json'), '--out', str(report)])


def test_verify_valid_run(tmp_path):
    _, out = _run(tmp_path, '--seed', '42')
    report_path = tmp_path / 'report.json'
    result = _verify(out, report_path)
    assert result.exit_code == EXIT_OK, result.output

    report = json.loads(report_path.read_text(encoding='utf-8'))
    assert report['pass'] is True
    assert report['seed'] == 42
    assert all(report['checks'].values())
    assert report['safety']['leaks'] == []


def test_verify_tampered_colour(tmp_path):
    _, out = _run(tmp_path, '--seed', '42')
    path = out / 'transcript.json'
    data = json.loads(path.read_text(encoding='utf-8'))
    data['colour'] = 3 - data['colour']
    path.write_text(json.dumps(data), encoding='utf-8')

    result = _verify(out, tmp_path / 'report.json')
    assert result.exit_code == EXIT_FAILED
    assert '❌ colour' in result.output


def test_verify_malformed_input(tmp_path):
    _, out = _run(tmp_path, '--seed', '42')
    (out / 'transcript.json').write_text('{', encoding='utf-8')
    result = _verify(out, tmp_path / 'report.json')
    assert result.exit_code == EXIT_ERROR

    result = runner.invoke(app, ['verify', '--out', str(tmp_path / 'r.json')])
    assert result.exit_code == EXIT_ERROR

    _, out = _run(tmp_path, '--seed', '42', name='nulo')
    path = out / 'transcript.json'
    data = json.loads(path.read_text(encoding='utf-8'))
    data['params'] = None
    path.write_text(json.dumps(data), encoding='utf-8')
    result = _verify(out, tmp_path / 'r2.json')
    assert result.exit_code == EXIT_ERROR
    assert 'Entrada mal formada' in result.output


def test_verify_figure_example_reports_leaks(tmp_path):
    report_path = tmp_path / 'ejemplo.json'
    result = runner.invoke(app, ['verify', '--example', '--out', str(report_path)])
    assert result.exit_code == EXIT_FAILED
    assert 'punto 02' in result.output
    assert 'punto 10' in result.output

    report = json.loads(report_path.read_text(encoding='utf-8'))
    assert report['pass'] is False
    assert report['informative'] is True
    assert report['checks']['rich'] is False
    assert {leak['point'] for leak in report['safety']['leaks']} == {'02', '10', '21'}


# ---------------------------------------------------------------------------
# params
# ---------------------------------------------------------------------------

def test_params_report():
    result = runner.invoke(app, ['params', '--a', '49', '--c', '171', '--d', '3', '--k', '7'])
    assert result.exit_code == EXIT_OK
    assert '➡️  FACTIBLE' in result.output
    assert 'c/a ≈ 3.49' in result.output


def test_params_searches_k():
    result = runner.invoke(app, ['params', '--a', '7', '--c', '1', '--json'])
    assert result.exit_code == EXIT_OK
    data = json.loads(result.output)
    assert data['k'] == 1 and data['feasible'] is True

    result = runner.invoke(app, ['params', '--a', '3', '--c', '1'])
    assert result.exit_code == EXIT_OK
    assert 'Ningún k' in result.output


def test_params_infeasible_report():
    result = runner.invoke(app, ['params', '--a', '7', '--c', '2', '--d', '2', '--k', '2'])
    assert result.exit_code == EXIT_OK
    assert 'NO FACTIBLE' in result.output
    assert '❌ σ_d(a) ≥ k(c+3)' in result.output


def test_suggest():
    result = runner.invoke(app, ['params', 'suggest', '--a', '49'])
    assert result.exit_code == EXIT_OK
    assert '✅ d3: a=49, d=3, k=7, c=171, b=117429' in result.output

    result = runner.invoke(app, ['params', 'suggest', '--a', '4'])
    assert result.exit_code == EXIT_INFEASIBLE
    result = runner.invoke(app, ['params', 'suggest', '--a', '49', '--regime', 'd9'])
    assert result.exit_code == EXIT_INFEASIBLE


def test_sweep_to_stdout_and_files(tmp_path):
    result = runner.invoke(app, ['params', 'sweep', '--max-a', '8', '--d', '2'])
    assert result.exit_code == EXIT_OK
    assert result.output.splitlines()[0] == 'a,d,k,c_max,b'
    assert '7,2,2,1,41' in result.output

    csv_path = tmp_path / 'atlas.csv'
    xlsx_path = tmp_path / 'atlas.xlsx'
    result = runner.invoke(app, ['params', 'sweep', '--max-a', '8', '--d', '2', '--d', '3',
                                 '--out', str(csv_path), '--excel', str(xlsx_path)])
    assert result.exit_code == EXIT_OK
    assert csv_path.read_text(encoding='utf-8').startswith('a,d,k,c_max,b')
    assert xlsx_path.exists()


def test_corollary(tmp_path):
    path = tmp_path / 'corolario.csv'
    result = runner.invoke(app, ['params', 'corollary', '--max-a', '101', '--out', str(path)])
    assert result.exit_code == EXIT_OK
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'N,a,k,c,b,ratio'
    assert lines[3].startswith('3,37,6,112,')


# ---------------------------------------------------------------------------
# hue
# ---------------------------------------------------------------------------

def test_hue_of_a_line_under_trivial_colouring(tmp_path):
    dump = tmp_path / 'hue.json'
    result = runner.invoke(app, ['hue', '--a', '3', '--points', '0,3,6', '--out', str(dump)])
    assert result.exit_code == EXIT_OK, result.output
    assert '12 miembros' in result.output
    data = json.loads(dump.read_text(encoding='utf-8'))
    assert len(data['members']) == 12
    assert all(m['distinguished'] for m in data['members'])


def test_hue_cap_truncates():
    result = runner.invoke(app, ['hue', '--a', '3', '--points', '0,3,6', '--cap', '2'])
    assert result.exit_code == EXIT_OK
    assert '(truncado)' in result.output


def test_hue_size_guard():
    result = runner.invoke(app, ['hue', '--a', '11', '--points', '0,1'])
    assert result.exit_code == EXIT_INFEASIBLE


def test_hue_example():
    result = runner.invoke(app, ['hue', '--example'])
    assert result.exit_code == EXIT_OK
    assert 'Hue de {00, 01, 02, 12, 22}' in result.output


@pytest.mark.parametrize('args', [
    ['hue'],
    ['hue', '--a', '6', '--points', '0'],
    ['hue', '--a', '3', '--points', '0,x'],
    ['hue', '--a', '3', '--points', '0,3,6', '--cap', '0'],
])
def test_hue_bad_arguments(args):
    result = runner.invoke(app, args)
    assert result.exit_code == EXIT_ERROR


def test_hue_lists_members_that_are_not_distinguished():
    # 00,10,20 y 00,01,02: dos rectas del mismo color bajo el 1-coloreado
    result = runner.invoke(app, ['hue', '--a', '3', '--points', '0,1,2,3,6'])
    assert result.exit_code == EXIT_OK, result.output
    assert '❌ {00, 01, 02, 10, 20}' in result.output
    assert 'no es muy distinguido' in result.output
