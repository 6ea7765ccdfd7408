"""
Interfaz de línea de comandos

Subcomandos:
    run      reparte, ejecuta el protocolo y guarda transcripción y reparto
    verify   audita una transcripción (legalidad, informatividad, seguridad débil)
    params   factibilidad, búsqueda de k, regímenes asintóticos y atlas
    hue      explora el hue de un conjunto de puntos en espacios pequeños

Códigos de salida: 0 ok, 1 comprobación fallida, 2 parámetros no factibles o
límite de tamaño, 3 error del protocolo o entrada mal formada.
"""

import json
from pathlib import Path
from typing import List, Optional

import typer

from cartas import __version__
from cartas.core.colouring import (
    FIGURE_A,
    FIGURE_C,
    Colouring,
    as_point_set,
    density,
    figure_example_colouring,
    hue_explore,
    is_distinguished,
    lines_meeting,
)
from cartas.core.errors import CartasError, MalformedTranscript, RegimeInfeasibleAtThisA
from cartas.core.finite_geometry import affine_space, field_for_order
from cartas.core.params import REGIMES, corollary_table, dimension_for, feasible, search_k, suggest_params, sweep
from cartas.orchestrator import ProtocolOrchestrator
from cartas.protocol.players import run_protocol
from cartas.protocol.transcript import (
    ProtocolParams,
    deal_random,
    load_deal,
    load_json,
    load_transcript,
    save_json,
    seeded_rng,
)
from cartas.protocol.verification import (
    audit_execution,
    check_informative,
    check_weak_safety,
    figure_example_execution,
)
from cartas.utils.config import config_value


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_ERROR = 3

app = typer.Typer(
    help="Protocolo de coloreado para el problema generalizado de las cartas rusas",
    no_args_is_help=True,
    add_completion=False,
)
params_app = typer.Typer(help="Factibilidad de parámetros", invoke_without_command=True)
app.add_typer(params_app, name='params')


def _seed(seed: Optional[int]) -> int:
    return seed if seed is not None else int(config_value('protocolo', 'default_seed', 2025))


def _fail(message: str, code: int):
    typer.echo(message, err=True)
    raise typer.Exit(code)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

@app.command()
def run(
    a: int = typer.Option(..., '--a', help="Cartas de Alice (potencia de primo)"),
    c: int = typer.Option(..., '--c', help="Cartas de Cath"),
    b: Optional[int] = typer.Option(None, '--b', help="Cartas de Bob (por defecto a^d − a − c)"),
    d: Optional[int] = typer.Option(None, '--d', help="Dimensión (por defecto de a+b+c = a^d, o 2)"),
    k: Optional[int] = typer.Option(None, '--k', help="Colores (por defecto el menor factible)"),
    seed: Optional[int] = typer.Option(None, '--seed', envvar='RC_SEED'),
    deal_path: Optional[Path] = typer.Option(None, '--deal', help="Reparto JSON a usar"),
    out: Path = typer.Option(Path('salida'), '--out', help="Directorio de salida"),
    mode: str = typer.Option('fixed', '--mode', help="Color de rectas sobrantes: fixed | random"),
    force: bool = typer.Option(False, '--force', help="Ejecutar aunque los parámetros no sean factibles"),
    runs: int = typer.Option(1, '--runs', help="Número de semillas consecutivas"),
    safety: bool = typer.Option(False, '--safety/--no-safety', help="Comprobar seguridad débil en cada partida"),
):
    """Reparte, ejecuta los cuatro anuncios y guarda transcript.json y deal.json"""
    seed = _seed(seed)

    if d is None:
        d = dimension_for(a, b, c) if b is not None else 2
        if d is None:
            _fail(f"❌ a+b+c = {a + b + c} no es una potencia de a={a}", EXIT_INFEASIBLE)
    if k is None:
        k = search_k(a, c, d)
        if k is None:
            if not force:
                _fail(f"❌ Ningún k hace factibles (a={a}, c={c}, d={d}); usa --force", EXIT_INFEASIBLE)
            k = 1

    report = feasible(a, c, d, k)
    if not report.feasible and not force:
        failed = [n for n in ('cond1', 'cond2', 'cond3', 'cond4', 'cond5') if not getattr(report, n)]
        _fail(f"❌ Parámetros no factibles ({', '.join(failed)}); usa --force", EXIT_INFEASIBLE)

    try:
        params = ProtocolParams.create(a=a, b=b, c=c, d=d, k=k)
    except CartasError as e:
        _fail(f"❌ {e}", EXIT_INFEASIBLE)

    max_lines = int(config_value('cli', 'random_leftover_max_lines', 200_000))
    if mode == 'random' and params.space.line_count > max_lines and not force:
        _fail(f"❌ leftover=random con {params.space.line_count} rectas excede {max_lines}; usa --force",
              EXIT_INFEASIBLE)

    if runs > 1:
        orchestrator = ProtocolOrchestrator(params, range(seed, seed + runs), leftover=mode, safety=safety)
        records = orchestrator.run_all()
        orchestrator.save_combined(out)
        if any(r.error for r in records):
            raise typer.Exit(EXIT_ERROR)
        raise typer.Exit(EXIT_OK if all(r.ok for r in records) else EXIT_FAILED)

    try:
        deal = load_deal(deal_path) if deal_path else deal_random(a, params.b, c, seeded_rng(seed, 'deal'))
        transcript = run_protocol(deal, params, seed, leftover=mode)
    except CartasError as e:
        _fail(f"❌ {type(e).__name__}: {e}", EXIT_ERROR)

    out.mkdir(parents=True, exist_ok=True)
    save_json(transcript.to_dict(), out / 'transcript.json')
    save_json(
        {**deal.to_dict(), 'params': params.to_dict(), 'seed': seed, 'version': __version__},
        out / 'deal.json',
    )

    E = transcript.image(deal.A | deal.C)
    heavy = lines_meeting(params.space, E, params.a - params.k)
    ok = sorted(transcript.claimed_C) == sorted(deal.C)
    typer.echo(f"{'='*80}")
    typer.echo(f"🃏 (a, b, c, d, k) = ({params.a}, {params.b}, {params.c}, {params.d}, {params.k}), semilla {seed}")
    typer.echo(f"🎨 Color anunciado: {transcript.colour}")
    typer.echo(f"📊 |L_{params.a - params.k}(E)| = {len(heavy)}, densidad = {density(transcript.xi)}")
    typer.echo(f"{'✅' if ok else '❌'} C deducido por Bob: {list(transcript.claimed_C)}")
    typer.echo(f"💾 Guardado en {out}/transcript.json y {out}/deal.json")
    raise typer.Exit(EXIT_OK if ok else EXIT_FAILED)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@app.command()
def verify(
    transcript_path: Optional[Path] = typer.Option(None, '--transcript'),
    deal_path: Optional[Path] = typer.Option(None, '--deal'),
    out: Path = typer.Option(Path('verify_report.json'), '--out', help="Informe JSON"),
    example: bool = typer.Option(False, '--example', help="Verificar el ejemplo inseguro de F_3^2"),
    workers: Optional[int] = typer.Option(None, '--workers', help="Threads para la seguridad débil"),
):
    """Audita legalidad, informatividad y seguridad débil de una ejecución"""
    try:
        if example:
            transcript, deal = figure_example_execution()
        else:
            if transcript_path is None or deal_path is None:
                _fail("❌ Indica --transcript y --deal (o --example)", EXIT_ERROR)
            transcript = load_transcript(transcript_path)
            deal = load_deal(deal_path)

        checks = audit_execution(transcript, deal)
        informative = check_informative(transcript, deal)
        safety = check_weak_safety(transcript, deal, max_workers=workers) if checks['alice_line'] else None
    except MalformedTranscript as e:
        _fail(f"❌ Entrada mal formada: {e}", EXIT_ERROR)
    except CartasError as e:
        _fail(f"❌ {type(e).__name__}: {e}", EXIT_ERROR)

    space = transcript.params.space
    passed = all(checks.values()) and informative and safety is not None and safety.passed
    report = {
        'version': __version__,
        'params': transcript.params.to_dict(),
        'seed': transcript.seed,
        'pass': passed,
        'checks': checks,
        'informative': informative,
        'safety': safety.to_dict() if safety is not None else None,
    }
    save_json(report, out)

    typer.echo(f"{'='*80}")
    typer.echo(f"📊 VERIFICACIÓN - semilla {transcript.seed}")
    typer.echo(f"{'='*80}")
    for name, value in checks.items():
        typer.echo(f"{'✅' if value else '❌'} {name}")
    typer.echo(f"{'✅' if informative else '❌'} informative")
    if safety is not None:
        typer.echo(f"{'✅' if safety.passed else '❌'} weak_safety ({len(safety.cards)} cartas)")
        for leak in safety.leaks:
            sides = ' y '.join(leak['missing'])
            typer.echo(f"   ⚠️  Fuga: carta {leak['card']} (punto {leak['point']}) sin testigo en {sides}")
    typer.echo(f"💾 Informe guardado: {out}")
    raise typer.Exit(EXIT_OK if passed else EXIT_FAILED)


# ---------------------------------------------------------------------------
# params
# ---------------------------------------------------------------------------

@params_app.callback()
def params(
    ctx: typer.Context,
    a: Optional[int] = typer.Option(None, '--a'),
    c: Optional[int] = typer.Option(None, '--c'),
    d: int = typer.Option(2, '--d'),
    k: Optional[int] = typer.Option(None, '--k', help="Si se omite se busca el menor factible"),
    as_json: bool = typer.Option(False, '--json'),
    exhaustive: bool = typer.Option(False, '--exhaustive', help="Condición 4 exacta (a^d ≤ 81)"),
):
    """Informe de factibilidad para (a, c, d, k)"""
    if ctx.invoked_subcommand is not None:
        return
    if a is None or c is None:
        _fail("❌ Indica --a y --c (o un subcomando: suggest, sweep, corollary)", EXIT_INFEASIBLE)

    searched = k is None
    if searched:
        k = search_k(a, c, d)
        if k is None:
            if as_json:
                typer.echo(json.dumps({'a': a, 'c': c, 'd': d, 'k': None, 'feasible': False}))
            else:
                typer.echo(f"❌ Ningún k ∈ [1, {a - 1}] hace factibles (a={a}, c={c}, d={d})")
            raise typer.Exit(EXIT_OK)

    report = feasible(a, c, d, k, exhaustive=exhaustive)
    if as_json:
        typer.echo(json.dumps({**report.to_dict(), 'version': __version__}, indent=2))
        raise typer.Exit(EXIT_OK)

    labels = {
        'cond1': 'a es potencia de primo',
        'cond2': f'b = a^d − a − c = {report.b} ≥ 0',
        'cond3': 'k < a',
        'cond4': f'|L_(a−k)(S)| ≤ k para |S| ≤ a+c (vía {report.via})',
        'cond5': 'σ_d(a) ≥ k(c+3)',
    }
    typer.echo(f"{'='*80}")
    typer.echo(f"📊 FACTIBILIDAD (a={a}, c={c}, d={d}, k={k}){' [k buscado]' if searched else ''}")
    typer.echo(f"{'='*80}")
    for name, text in labels.items():
        typer.echo(f"{'✅' if getattr(report, name) else '❌'} {text}")
    typer.echo(f"💡 Forma simplificada c < ak − 3k(k+1)/2: {'sí' if report.simplified_ok else 'no'}")
    typer.echo(f"➡️  {'FACTIBLE' if report.feasible else 'NO FACTIBLE'}, c/a ≈ {report.ratio:.2f}")


@params_app.command()
def suggest(
    a: int = typer.Option(..., '--a'),
    regime: str = typer.Option('d3', '--regime', help=f"Régimen: {' | '.join(REGIMES)}"),
    as_json: bool = typer.Option(False, '--json'),
):
    """Parámetros del régimen asintótico para este a"""
    try:
        s = suggest_params(a, regime)
    except (RegimeInfeasibleAtThisA, ValueError) as e:
        _fail(f"❌ {e}", EXIT_INFEASIBLE)

    if as_json:
        typer.echo(json.dumps({'regime': s.regime, 'a': s.a, 'd': s.d, 'k': s.k, 'c': s.c, 'b': s.b,
                               'report': s.report.to_dict(), 'version': __version__}, indent=2))
        return
    typer.echo(f"✅ {s.regime}: a={s.a}, d={s.d}, k={s.k}, c={s.c}, b={s.b}, c/a ≈ {s.c / s.a:.2f}")


@params_app.command('sweep')
def sweep_cmd(
    max_a: int = typer.Option(..., '--max-a'),
    d: Optional[List[int]] = typer.Option(None, '--d', help="Dimensiones (repetible), por defecto 2, 3 y 4"),
    out: Optional[Path] = typer.Option(None, '--out', help="CSV de salida (por defecto a stdout)"),
    excel: Optional[Path] = typer.Option(None, '--excel', help="Además, guardar en Excel"),
):
    """Atlas de factibilidad: mayor c para cada (a, d, k)"""
    df = sweep(max_a, tuple(d) if d else (2, 3, 4))
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(out, index=False)
        typer.echo(f"💾 Atlas guardado: {out} ({len(df)} filas)")
    else:
        typer.echo(df.to_csv(index=False), nl=False)
    if excel:
        excel.parent.mkdir(parents=True, exist_ok=True)
        df.to_excel(excel, index=False, engine='openpyxl')
        typer.echo(f"💾 Excel guardado: {excel}")


@params_app.command()
def corollary(
    max_a: int = typer.Option(169, '--max-a'),
    max_n: int = typer.Option(5, '--max-n'),
    out: Optional[Path] = typer.Option(None, '--out'),
):
    """Menor a con c/a > N en el régimen d3, para cada N"""
    df = corollary_table(max_a, max_n)
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(out, index=False)
        typer.echo(f"💾 Tabla guardada: {out}")
    else:
        typer.echo(df.to_string(index=False))


# ---------------------------------------------------------------------------
# hue
# ---------------------------------------------------------------------------

@app.command()
def hue(
    a: Optional[int] = typer.Option(None, '--a', help="Orden del cuerpo"),
    d: int = typer.Option(2, '--d'),
    points: Optional[str] = typer.Option(None, '--points', help="Índices de punto separados por comas"),
    xi_path: Optional[Path] = typer.Option(None, '--xi', help="Coloreado JSON (por defecto el trivial)"),
    transcript_path: Optional[Path] = typer.Option(None, '--transcript'),
    deal_path: Optional[Path] = typer.Option(None, '--deal'),
    cap: Optional[int] = typer.Option(None, '--cap'),
    force: bool = typer.Option(False, '--force'),
    example: bool = typer.Option(False, '--example', help="Coloreado inseguro de F_3^2 con E = {00,01,02,12,22}"),
    out: Optional[Path] = typer.Option(None, '--out', help="Volcado JSON"),
):
    """Vuelca el hue de E y si cada miembro sigue siendo distinguido"""
    try:
        if example:
            space = affine_space(field_for_order(3), 2)
            xi = figure_example_colouring(space)
            E = frozenset(space.point_from_label(s) for s in (*FIGURE_A, *FIGURE_C))
        elif transcript_path is not None and deal_path is not None:
            transcript = load_transcript(transcript_path)
            deal = load_deal(deal_path)
            space, xi = transcript.params.space, transcript.xi
            E = transcript.image(deal.A | deal.C)
        else:
            if a is None or points is None:
                _fail("❌ Indica --a y --points, o --transcript y --deal, o --example", EXIT_ERROR)
            space = affine_space(field_for_order(a), d)
            xi = Colouring.from_dict(space, load_json(xi_path)) if xi_path else Colouring.trivial(space)
            E = as_point_set(int(p) for p in points.split(',') if p.strip())
    except CartasError as e:
        _fail(f"❌ {type(e).__name__}: {e}", EXIT_ERROR)
    except ValueError as e:
        _fail(f"❌ Entrada inválida: {e}", EXIT_ERROR)
    if cap is not None and cap < 1:
        _fail("❌ --cap debe ser ≥ 1", EXIT_ERROR)

    max_points = int(config_value('cli', 'hue_max_points', 81))
    if space.size > max_points and not force:
        _fail(f"❌ El espacio tiene {space.size} puntos (> {max_points}); usa --force", EXIT_INFEASIBLE)

    hue_class = hue_explore(xi, E, cap)
    members = sorted(hue_class.members, key=lambda F: sorted(F))
    dump = []
    typer.echo(f"{'='*80}")
    typer.echo(f"🔄 Hue de {{{', '.join(sorted(space.label(x) for x in E))}}}: {len(members)} miembros"
               f"{' (truncado)' if hue_class.truncated else ''}")
    typer.echo(f"{'='*80}")
    for F in members:
        ok = is_distinguished(xi, F)
        labels = sorted(space.label(x) for x in F)
        dump.append({'points': labels, 'distinguished': ok})
        typer.echo(f"{'✅' if ok else '❌'} {{{', '.join(labels)}}}")
    bad = sum(1 for m in dump if not m['distinguished'])
    if bad:
        typer.echo(f"⚠️  {bad} miembros con dos rectas del mismo color: no es muy distinguido")

    if out:
        save_json({
            'version': __version__,
            'params': {'q': space.q, 'd': space.d},
            'seed': None,
            'E': sorted(space.label(x) for x in E),
            'truncated': hue_class.truncated,
            'members': dump,
        }, out)
        typer.echo(f"💾 Volcado guardado: {out}")


def main():
    app()


if __name__ == '__main__':
    main()
