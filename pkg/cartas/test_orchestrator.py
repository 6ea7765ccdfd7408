"""
Tests del orquestador de partidas
"""

import json

import pandas as pd

from cartas.core.finite_geometry import field_make
from cartas.orchestrator import ProtocolOrchestrator
from cartas.protocol.transcript import ProtocolParams


def test_run_all_and_save(tmp_path):
    params = ProtocolParams.create(a=7, c=1, b=41, k=2)
    orchestrator = ProtocolOrchestrator(params, seeds=[1, 2, 3], safety=True, safety_sample=6,
                                        max_workers=2, verbose=False)
    records = orchestrator.run_all()

    assert [r.seed for r in records] == [1, 2, 3]
    for record in records:
        assert record.error is None
        assert record.ok
        assert record.heavy_lines == 1
        assert record.density >= 3
        assert len(record.safety.cards) == 6

    orchestrator.save_combined(tmp_path)
    combined = json.loads((tmp_path / 'runs.json').read_text(encoding='utf-8'))
    assert combined['metadata']['totales'] == {'partidas': 3, 'legales': 3, 'informativas': 3, 'errores': 0}
    df = pd.read_csv(tmp_path / 'runs.csv')
    assert list(df['seed']) == [1, 2, 3]
    assert df['verified'].all()


def test_errors_are_recorded():
    params = ProtocolParams(a=3, b=5, c=1, d=2, k=1, field=field_make(3))
    # f(D∖B) tiene 4 puntos de F_3^2: siempre 4 rectas con ≥ 2 de ellos
    orchestrator = ProtocolOrchestrator(params, seeds=range(10), safety=False, max_workers=1, verbose=False)
    records = orchestrator.run_all()
    failed = [r for r in records if r.error]
    assert failed
    assert all('TooManyHeavyLines' in r.error for r in failed)
    assert not any(r.ok for r in failed)
