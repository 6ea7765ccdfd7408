"""
Protocolo de coloreado: repartos, jugadores, transcripciones y verificación
"""

from cartas.protocol.transcript import Deal, ProtocolParams, Transcript, deal_random, seeded_rng
from cartas.protocol.players import Alice, Bob, Player, run_protocol

__all__ = [
    'Deal',
    'ProtocolParams',
    'Transcript',
    'deal_random',
    'seeded_rng',
    'Alice',
    'Bob',
    'Player',
    'run_protocol',
]
