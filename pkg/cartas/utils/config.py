"""
Carga de configuración desde config/protocolo.yaml
"""

from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

import yaml


CONFIG_PATH = Path(__file__).parent.parent.parent / 'config' / 'protocolo.yaml'


@lru_cache(maxsize=None)
def _load_all() -> Dict[str, Any]:
    """Lee el YAML completo una sola vez por proceso"""
    try:
        with open(CONFIG_PATH, 'r', encoding='utf-8') as f:
            return yaml.safe_load(f) or {}
    except FileNotFoundError:
        print(f"⚠️  Archivo de configuración no encontrado: {CONFIG_PATH}")
        return {}


def load_config(section: str) -> Dict[str, Any]:
    """
    Devuelve una sección de la configuración.

    Args:
        section: Clave de primer nivel (ej: 'colouring', 'params')

    Returns:
        Diccionario de la sección, vacío si no existe
    """
    return dict(_load_all().get(section, {}) or {})


def config_value(section: str, key: str, default: Any) -> Any:
    """Valor concreto con fallback al default del código"""
    return load_config(section).get(key, default)
