"""
Orchestrator - Ejecuta muchas partidas del protocolo y verifica cada una
Reparte, ejecuta los cuatro anuncios, audita legalidad, informatividad y
(opcionalmente) seguridad débil, y guarda un resumen combinado.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import pandas as pd

from cartas import __version__
from cartas.core.colouring import density, lines_meeting
from cartas.core.errors import CartasError
from cartas.core.parallel import parallel_map
from cartas.protocol.players import run_protocol
from cartas.protocol.transcript import Deal, ProtocolParams, Transcript, deal_random, save_json, seeded_rng
from cartas.protocol.verification import SafetyReport, audit_execution, check_informative, check_weak_safety
from cartas.utils.config import config_value


@dataclass
class ExecutionRecord:
    """Una partida: reparto, transcripción y resultado de las comprobaciones"""

    seed: int
    deal: Optional[Deal] = None
    transcript: Optional[Transcript] = None
    audit: Dict[str, bool] = field(default_factory=dict)
    informative: Optional[bool] = None
    safety: Optional[SafetyReport] = None
    heavy_lines: Optional[int] = None
    density: Optional[int] = None
    error: Optional[str] = None

    @property
    def verified(self) -> bool:
        return bool(self.audit) and all(self.audit.values())

    @property
    def ok(self) -> bool:
        safe = self.safety is None or self.safety.passed
        return self.error is None and self.verified and bool(self.informative) and safe

    def to_row(self) -> Dict:
        return {
            'seed': self.seed,
            'colour': self.transcript.colour if self.transcript else None,
            'heavy_lines': self.heavy_lines,
            'density': self.density,
            'verified': self.verified,
            'informative': self.informative,
            'safe': None if self.safety is None else self.safety.passed,
            'leaks': None if self.safety is None else len(self.safety.leaks),
            'error': self.error,
        }


class ProtocolOrchestrator:
    """
    Orquesta la ejecución de partidas independientes (una por semilla)
    """

    def __init__(
        self,
        params: ProtocolParams,
        seeds: Iterable[int],
        leftover: Optional[str] = None,
        safety: bool = True,
        safety_sample: Optional[int] = None,
        max_workers: Optional[int] = None,
        verbose: bool = True,
    ):
        self.params = params
        self.seeds = list(seeds)
        self.leftover = leftover or config_value('protocolo', 'leftover', 'fixed')
        self.safety = safety
        self.safety_sample = safety_sample
        self.max_workers = max_workers or int(config_value('paralelo', 'max_workers', 4))
        self.verbose = verbose
        self.records: List[ExecutionRecord] = []

    def run_one(self, seed: int, deal: Optional[Deal] = None) -> ExecutionRecord:
        """Una partida completa con su verificación"""
        params = self.params
        record = ExecutionRecord(seed=seed)
        try:
            record.deal = deal or deal_random(params.a, params.b, params.c, seeded_rng(seed, 'deal'))
            record.transcript = run_protocol(record.deal, params, seed, self.leftover)

            E = record.transcript.image(record.deal.A | record.deal.C)
            record.heavy_lines = len(lines_meeting(params.space, E, params.a - params.k))
            record.density = density(record.transcript.xi)
            record.audit = audit_execution(record.transcript, record.deal)
            record.informative = check_informative(record.transcript, record.deal)

            if self.safety:
                cards = None
                if self.safety_sample:
                    outside = sorted(set(record.deal.deck) - record.deal.C)
                    rng = seeded_rng(seed, 'safety')
                    cards = rng.sample(outside, min(self.safety_sample, len(outside)))
                record.safety = check_weak_safety(record.transcript, record.deal, cards=cards)
        except CartasError as e:
            record.error = f"{type(e).__name__}: {e}"
        return record

    def run_all(self) -> List[ExecutionRecord]:
        """Ejecuta todas las semillas en el pool de workers"""
        p = self.params
        if self.verbose:
            print(f"\n{'='*80}")
            print(f"🚀 ORQUESTADOR - Protocolo de coloreado")
            print(f"📍 (a, b, c, d, k) = ({p.a}, {p.b}, {p.c}, {p.d}, {p.k}) sobre {p.field}")
            print(f"{'='*80}\n")

        results = parallel_map(
            self.seeds,
            self.run_one,
            max_workers=self.max_workers,
            verbose=self.verbose,
            label=lambda seed: f"semilla {seed}",
        )
        self.records = [
            r if r is not None else ExecutionRecord(seed=s, error='fallo del worker')
            for s, r in zip(self.seeds, results)
        ]

        if self.verbose:
            self._print_summary()
        return self.records

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_row() for r in self.records])

    def _print_summary(self):
        """Imprime resumen de todas las partidas"""
        total = len(self.records)
        verified = sum(r.verified for r in self.records)
        informative = sum(bool(r.informative) for r in self.records)
        errors = [r for r in self.records if r.error]
        print(f"\n{'='*80}")
        print(f"📊 RESUMEN FINAL - {total} partidas")
        print(f"{'='*80}")
        print(f"✅ Ejecuciones legales: {verified}/{total}")
        print(f"✅ Informativas (C deducido): {informative}/{total}")
        if self.safety:
            safe = sum(1 for r in self.records if r.safety is not None and r.safety.passed)
            print(f"✅ Seguridad débil: {safe}/{total}")
        if errors:
            print(f"❌ Errores: {len(errors)}")
            for r in errors[:5]:
                print(f"   • semilla {r.seed}: {r.error}")
        print(f"{'='*80}\n")

    def save_combined(self, output_dir: Path) -> Path:
        """Guarda el resumen combinado (JSON) y la tabla por semilla (CSV)"""
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)

        df = self.to_dataframe()
        combined = {
            'metadata': {
                'version': __version__,
                'params': self.params.to_dict(),
                'seeds': self.seeds,
                'leftover': self.leftover,
                'totales': {
                    'partidas': len(self.records),
                    'legales': int(sum(r.verified for r in self.records)),
                    'informativas': int(sum(bool(r.informative) for r in self.records)),
                    'errores': int(sum(1 for r in self.records if r.error)),
                },
            },
            'runs': [r.to_row() for r in self.records],
        }
        filepath = save_json(combined, output_dir / 'runs.json')
        df.to_csv(output_dir / 'runs.csv', index=False)

        if self.verbose:
            print(f"💾 Resumen guardado: {filepath}")
        return filepath
