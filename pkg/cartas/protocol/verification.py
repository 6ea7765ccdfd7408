"""
Verificación independiente de ejecuciones
Legalidad de cada anuncio, informatividad y seguridad débil construyendo
explícitamente repartos alternativos para cada carta fuera de C.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from cartas.core.colouring import (
    FIGURE_A,
    FIGURE_C,
    apply_swap,
    find_critical,
    full_lines,
    is_perfect,
    is_rich,
    figure_example_colouring,
)
from cartas.core.errors import InvalidParameters, MalformedTranscript, NotALine
from cartas.core.finite_geometry import Line
from cartas.core.parallel import parallel_map
from cartas.protocol.transcript import Deal, ProtocolParams, Transcript
from cartas.utils.config import config_value


CHECKS = ('f_bijective', 'colouring_k', 'alice_line', 'rich', 'very_distinguished', 'colour', 'claimed_C')


def _check_shape(transcript: Transcript, deal: Deal):
    params = transcript.params
    if (deal.a, deal.b, deal.c) != (params.a, params.b, params.c):
        raise MalformedTranscript(
            f"Reparto {(deal.a, deal.b, deal.c)} incompatible con parámetros {(params.a, params.b, params.c)}"
        )
    size = params.space.size
    if len(transcript.f) != params.n or any(not 0 <= x < size for x in transcript.f):
        raise MalformedTranscript(f"f debe tener {params.n} entradas en 0..{size - 1}")


def very_distinguished_certificate(
    transcript: Transcript,
    E: Iterable[int],
    hint: Optional[Sequence[Line]] = None,
    strict: bool = True,
) -> Optional[str]:
    """
    'perfect', 'critical' o None.

    En modo estricto sólo vale un coloreado perfecto (lo que Bob construye);
    si no, también un testigo de rectas críticas.
    """
    xi = transcript.xi
    params = transcript.params
    if is_perfect(xi, E, params.a, params.k):
        return 'perfect'
    if strict:
        return None
    if find_critical(xi, E, hint=hint) is not None:
        return 'critical'
    return None


def _deal_checks(
    transcript: Transcript,
    deal: Deal,
    hint: Optional[Sequence[Line]] = None,
    strict: bool = True,
) -> Tuple[Dict[str, bool], Optional[str]]:
    """Comprobaciones que dependen del reparto (no de ξ por sí solo), y el certificado usado"""
    space = transcript.params.space
    xi = transcript.xi

    alice_points = transcript.image(deal.A)
    try:
        alice_line = space.line_containing(alice_points)
    except NotALine:
        alice_line = None

    certificate = very_distinguished_certificate(transcript, transcript.image(deal.A | deal.C), hint, strict)
    return {
        'alice_line': alice_line is not None,
        'very_distinguished': certificate is not None,
        'colour': alice_line is not None and xi.colour(alice_line) == transcript.colour,
        'claimed_C': frozenset(transcript.claimed_C) == deal.C,
    }, certificate


def audit_execution(
    transcript: Transcript,
    deal: Deal,
    rich_mode: str = 'density',
    strict: bool = True,
) -> Dict[str, bool]:
    """
    Cada comprobación de legalidad por separado.

    Args:
        transcript: Ejecución a auditar
        deal: Reparto verdadero
        rich_mode: 'density' o 'exhaustive'
        strict: Exigir coloreado perfecto para f(A ∪ C); con False basta un
            testigo crítico (muy distinguido igualmente)

    Raises:
        MalformedTranscript: si f o el reparto no tienen la forma esperada
    """
    _check_shape(transcript, deal)
    # ξ debe usar exactamente los k colores anunciados
    same_k = transcript.xi.k == transcript.params.k
    checks = {
        'f_bijective': len(set(transcript.f)) == len(transcript.f),
        'colouring_k': same_k,
        'rich': same_k and is_rich(transcript.xi, transcript.params.c, rich_mode),
    }
    checks.update(_deal_checks(transcript, deal, strict=strict)[0])
    return {name: checks[name] for name in CHECKS}


def verify_execution(transcript: Transcript, deal: Deal, strict: bool = True) -> bool:
    """Todos los anuncios fueron legales para el reparto dado"""
    return all(audit_execution(transcript, deal, strict=strict).values())


def check_informative(transcript: Transcript, deal: Deal) -> bool:
    """
    Bob: exactamente una recta del color anunciado dentro de f(A ∪ C).
    Alice: C anunciado es disjunto de A y de tamaño c, así que B = D∖A∖C.
    """
    _check_shape(transcript, deal)
    E = transcript.image(deal.A | deal.C)
    matches = [line for line in full_lines(transcript.params.space, E)
               if transcript.xi.colour(line) == transcript.colour]
    claimed = frozenset(transcript.claimed_C)
    return (
        len(matches) == 1
        and not claimed & deal.A
        and len(claimed) == transcript.params.c
    )


# ---------------------------------------------------------------------------
# Seguridad débil
# ---------------------------------------------------------------------------

@dataclass
class Witness:
    """Ejecución alternativa con la misma transcripción"""

    card: int
    side: str
    line_index: int
    line_points: List[str]
    alt_deal: Deal
    certificate: str

    def to_dict(self) -> Dict:
        return {
            'card': self.card,
            'side': self.side,
            'line_index': self.line_index,
            'line_points': self.line_points,
            'alt_deal': self.alt_deal.to_dict(),
            'certificate': self.certificate,
        }


@dataclass
class CardSafety:
    card: int
    point: str
    in_A: Optional[Witness] = None
    in_B: Optional[Witness] = None

    @property
    def passed(self) -> bool:
        return self.in_A is not None and self.in_B is not None

    @property
    def missing(self) -> List[str]:
        return [side for side, w in (('A', self.in_A), ('B', self.in_B)) if w is None]

    def to_dict(self) -> Dict:
        return {
            'card': self.card,
            'point': self.point,
            'pass': self.passed,
            'in_A': self.in_A.to_dict() if self.in_A else None,
            'in_B': self.in_B.to_dict() if self.in_B else None,
        }


@dataclass
class SafetyReport:
    cards: List[CardSafety] = field(default_factory=list)
    sampled: bool = False

    @property
    def passed(self) -> bool:
        return all(card.passed for card in self.cards)

    @property
    def leaks(self) -> List[Dict]:
        return [
            {'card': card.card, 'point': card.point, 'missing': card.missing}
            for card in self.cards if not card.passed
        ]

    def to_dict(self) -> Dict:
        return {
            'pass': self.passed,
            'sampled': self.sampled,
            'checked_cards': len(self.cards),
            'leaks': self.leaks,
            'cards': [card.to_dict() for card in self.cards],
        }


class _SafetyContext:
    """
    Lo que Cath ve: la transcripción y su mano C.

    La recta verdadera f(A) sólo se usa para comprobar el intercambio que
    lleva a cada ejecución alternativa.
    """

    def __init__(self, transcript: Transcript, deal: Deal):
        self.transcript = transcript
        self.params = transcript.params
        self.space = transcript.params.space
        self.xi = transcript.xi
        self.C = deal.C
        self.fC = transcript.image(deal.C)
        self.E = transcript.image(deal.A | deal.C)
        self.true_line = self.space.line_containing(transcript.image(deal.A))
        base = find_critical(self.xi, self.E)
        self.base_lines: List[Line] = list(base.lines) if base else []

    def hint_for(self, line: Line) -> List[Line]:
        """Testigo heredado: el de E con f(A) sustituida por la nueva recta"""
        return [l for l in self.base_lines if l.index != self.true_line.index] + [line]

    def candidate_lines(
        self, point: int, avoid: FrozenSet[int], tried: Optional[Set[int]] = None,
    ) -> Iterable[Line]:
        """Rectas del color anunciado por `point` que evitan `avoid`; `tried` salta las ya vistas"""
        for rank in range(self.space.direction_count):
            idx = self.space.line_index_through(point, rank)
            if tried is not None:
                if idx in tried:
                    continue
                tried.add(idx)
            if self.xi.colour(idx) != self.transcript.colour:
                continue
            line = self.space.line(idx)
            if line.points.isdisjoint(avoid):
                yield line

    def try_witness(self, card: int, side: str, line: Line) -> Optional[Witness]:
        swapped = apply_swap(self.xi, self.E, self.true_line, line)
        if swapped is None or swapped != line.points | self.fC:
            return None

        alt_A = frozenset(self.transcript.card_of_point[x] for x in line.points)
        deck = frozenset(range(1, self.params.n + 1))
        try:
            alt_deal = Deal(A=alt_A, B=deck - alt_A - self.C, C=self.C)
        except InvalidParameters:
            return None

        hint = self.hint_for(line)
        checks, certificate = _deal_checks(self.transcript, alt_deal, hint, strict=False)
        if not all(checks.values()):
            return None
        return Witness(
            card=card,
            side=side,
            line_index=line.index,
            line_points=sorted(self.space.label(x) for x in line.points),
            alt_deal=alt_deal,
            certificate=certificate,
        )

    def check_card(self, card: int) -> CardSafety:
        x = self.transcript.point_of(card)
        result = CardSafety(card=card, point=self.space.label(x))

        # x ∈ A': recta del color anunciado por f(x) que evite f(C)
        for line in self.candidate_lines(x, self.fC):
            result.in_A = self.try_witness(card, 'A', line)
            if result.in_A is not None:
                break

        # x ∈ B'': recta del color anunciado que evite f(C) y f(x)
        avoid = self.fC | {x}
        tried: Set[int] = set()
        for y in range(self.space.size):
            if y in avoid:
                continue
            for line in self.candidate_lines(y, avoid, tried):
                result.in_B = self.try_witness(card, 'B', line)
                if result.in_B is not None:
                    break
            if result.in_B is not None:
                break
        return result


def check_weak_safety(
    transcript: Transcript,
    deal: Deal,
    cards: Optional[Iterable[int]] = None,
    max_workers: Optional[int] = None,
    verbose: bool = False,
) -> SafetyReport:
    """
    Para cada carta x ∉ C busca dos ejecuciones alternativas con la misma
    transcripción: una con x en la mano de Alice y otra con x en la de Bob.

    Args:
        transcript: Ejecución a comprobar
        deal: Reparto verdadero (sólo se usan C y la recta f(A))
        cards: Subconjunto de cartas a comprobar (None = todas las x ∉ C)
        max_workers: Threads para repartir las cartas
        verbose: Mostrar progreso

    Returns:
        SafetyReport; las cartas sin alguno de los dos testigos aparecen en `leaks`
    """
    _check_shape(transcript, deal)
    ctx = _SafetyContext(transcript, deal)

    outside = sorted(card for card in range(1, transcript.params.n + 1) if card not in deal.C)
    selected = outside if cards is None else sorted(set(cards) - deal.C)
    workers = max_workers or int(config_value('paralelo', 'safety_workers', 1))

    results = parallel_map(selected, ctx.check_card, max_workers=workers, verbose=verbose,
                           label=lambda card: f"carta {card}")
    report = SafetyReport(sampled=cards is not None)
    for card, result in zip(selected, results):
        if result is None:
            result = CardSafety(card=card, point=ctx.space.label(transcript.point_of(card)))
        report.cards.append(result)
    return report


def figure_example_execution() -> Tuple[Transcript, Deal]:
    """
    Ejecución inventada sobre F_3^2 con el 2-coloreado inseguro:
    A = {00,01,02}, C = {12,22}, carta i en el punto de índice i−1.

    Cath ve que ninguna recta de color 1 evita C y 02, así que sabe que
    Alice tiene la carta de 02.
    """
    params = ProtocolParams.create(a=3, b=4, c=2, d=2, k=2)
    space = params.space
    xi = figure_example_colouring(space)
    f = tuple(range(space.size))

    def cards(labels) -> FrozenSet[int]:
        return frozenset(space.point_from_label(s) + 1 for s in labels)

    A, C = cards(FIGURE_A), cards(FIGURE_C)
    deal = Deal(A=A, B=frozenset(range(1, 10)) - A - C, C=C)
    colour = xi.colour(space.line_containing(x - 1 for x in A))
    transcript = Transcript(params=params, seed=0, f=f, xi=xi, colour=colour, claimed_C=tuple(sorted(C)))
    return transcript, deal
