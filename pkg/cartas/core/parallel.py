"""
Utilidades para paralelizar trabajo independiente (cartas, semillas, barridos)
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, List, Optional, Sequence
import time


def parallel_map(
    items: Sequence[Any],
    worker_function: Callable,
    max_workers: int = 4,
    timeout: Optional[float] = None,
    verbose: bool = False,
    label: Callable[[Any], str] = str,
) -> List[Any]:
    """
    Ejecuta `worker_function` sobre cada item en un pool de threads

    Args:
        items: Items a procesar (ej: cartas, semillas)
        worker_function: Función que procesa cada item
        max_workers: Número máximo de threads; 1 ejecuta en secuencia
        timeout: Timeout global en segundos (None = sin límite)
        verbose: Mostrar progreso
        label: Cómo nombrar cada item en los mensajes

    Returns:
        Resultados en el mismo orden que `items` (None si falló)
    """
    results: List[Any] = [None] * len(items)

    if verbose:
        print(f"🔄 Procesando {len(items)} items con {max_workers} workers...")

    start_time = time.time()

    if max_workers <= 1:
        for pos, item in enumerate(items):
            results[pos] = _run_one(worker_function, item, verbose, label)
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            future_to_pos = {
                executor.submit(worker_function, item): pos
                for pos, item in enumerate(items)
            }

            for future in as_completed(future_to_pos, timeout=timeout):
                pos = future_to_pos[future]
                try:
                    results[pos] = future.result()
                    if verbose:
                        print(f"   ✅ {label(items[pos])}: OK")
                except Exception as e:
                    if verbose:
                        print(f"   ❌ {label(items[pos])}: {str(e)[:80]}")
                    results[pos] = None

    elapsed = time.time() - start_time

    if verbose:
        successful = len([r for r in results if r is not None])
        print(f"⏱️  Completado en {elapsed:.2f}s ({successful}/{len(items)} exitosos)")

    return results


def _run_one(worker_function: Callable, item: Any, verbose: bool, label: Callable[[Any], str]) -> Any:
    try:
        result = worker_function(item)
        if verbose:
            print(f"   ✅ {label(item)}: OK")
        return result
    except Exception as e:
        if verbose:
            print(f"   ❌ {label(item)}: {str(e)[:80]}")
        return None
