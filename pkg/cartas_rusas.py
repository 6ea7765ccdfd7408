#!/usr/bin/env python3
"""
Protocolo de coloreado para las cartas rusas generalizadas
Punto de entrada: reparte, ejecuta, verifica y explora parámetros

Uso:
    python cartas_rusas.py run --a 7 --c 1 --d 2 --k 2 --seed 42
    python cartas_rusas.py verify --transcript salida/transcript.json --deal salida/deal.json
    python cartas_rusas.py params --a 49 --c 171 --d 3 --k 7
"""

from cartas.cli import main


if __name__ == "__main__":
    main()
