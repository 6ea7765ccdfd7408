"""
Utilidades del proyecto
"""

from .config import load_config, config_value

__all__ = [
    'load_config',
    'config_value',
]
