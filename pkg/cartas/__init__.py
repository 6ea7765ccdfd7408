"""
cartas - Protocolo de coloreado para el problema generalizado de las cartas rusas
"""

__version__ = '1.0.0'
