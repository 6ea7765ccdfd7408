"""
Tests del protocolo: repartos, los cuatro pasos y la transcripción
"""

import random

import pytest

from cartas.core.colouring import Colouring, density, is_perfect
from cartas.core.errors import (
    AmbiguousLine,
    InvalidParameters,
    MalformedTranscript,
    NoMatchingLine,
    NotALine,
    ProtocolError,
    SizeMismatch,
    TooManyHeavyLines,
)
from cartas.core.finite_geometry import field_make
from cartas.protocol.players import (
    Alice,
    Bob,
    alice_colour,
    alice_map,
    bob_colouring,
    bob_deduce,
    run_protocol,
)
from cartas.protocol.transcript import (
    Deal,
    ProtocolParams,
    Transcript,
    deal_random,
    load_deal,
    load_transcript,
    save_json,
    seeded_rng,
)
from cartas.protocol.verification import check_weak_safety, figure_example_execution, verify_execution


@pytest.fixture(scope='module')
def plane():
    return ProtocolParams.create(a=7, c=1, b=41, k=2)


@pytest.fixture(scope='module')
def space3():
    return ProtocolParams.create(a=7, c=4, b=332, k=2)


def _run(params, seed, leftover=None):
    deal = deal_random(params.a, params.b, params.c, seeded_rng(seed, 'deal'))
    return run_protocol(deal, params, seed, leftover), deal


# ---------------------------------------------------------------------------
# Repartos y parámetros
# ---------------------------------------------------------------------------

def test_deal_random_is_a_partition():
    deal = deal_random(7, 41, 1, random.Random(4))
    assert (deal.a, deal.b, deal.c) == (7, 41, 1)
    assert deal.A | deal.B | deal.C == set(range(1, 50))
    assert deal == deal_random(7, 41, 1, random.Random(4))


def test_deal_validation():
    with pytest.raises(InvalidParameters):
        Deal(A={1, 2}, B={2, 3}, C=set())
    with pytest.raises(InvalidParameters):
        Deal(A={1, 2}, B={4}, C=set())
    with pytest.raises(MalformedTranscript):
        Deal.from_dict({'A': [1]})
    with pytest.raises(MalformedTranscript):
        Deal.from_dict({'A': [1, 2], 'B': [2], 'C': []})
    for broken in (None, [], 'ABC'):
        with pytest.raises(MalformedTranscript):
            Deal.from_dict(broken)


def test_params_create(plane, space3):
    assert (plane.a, plane.b, plane.c, plane.d, plane.k) == (7, 41, 1, 2, 2)
    assert (space3.d, space3.n) == (3, 343)
    assert ProtocolParams.create(a=7, c=1).k == 1
    assert ProtocolParams.create(a=9, c=1, d=2, k=2).field.modulus == (1, 0, 1)

    with pytest.raises(InvalidParameters):
        ProtocolParams.create(a=6, c=1)
    with pytest.raises(InvalidParameters):
        ProtocolParams.create(a=7, c=1, b=40)
    with pytest.raises(InvalidParameters):
        ProtocolParams.create(a=3, c=1, d=2)
    with pytest.raises(InvalidParameters):
        ProtocolParams(a=7, b=41, c=1, d=2, k=7, field=field_make(7))


# ---------------------------------------------------------------------------
# Pasos
# ---------------------------------------------------------------------------

def test_alice_map(plane):
    deal = deal_random(7, 41, 1, random.Random(1))
    f = alice_map(deal.A, plane, random.Random(2))
    assert sorted(f) == list(range(49))
    line = plane.space.line_containing(f[card - 1] for card in deal.A)
    assert len(line) == 7

    with pytest.raises(SizeMismatch):
        alice_map(sorted(deal.A)[:6], plane, random.Random(2))


def test_bob_colouring_is_perfect_and_dense(plane):
    for seed in range(10):
        deal = deal_random(7, 41, 1, random.Random(seed))
        f = alice_map(deal.A, plane, random.Random(seed + 100))
        xi = bob_colouring(f, deal.B, plane, random.Random(seed + 200))
        E = frozenset(f[card - 1] for card in deal.A | deal.C)
        assert is_perfect(xi, E)
        assert density(xi) >= plane.c + 2


def test_too_many_heavy_lines():
    params = ProtocolParams(a=3, b=5, c=1, d=2, k=1, field=field_make(3))
    f = tuple(range(9))
    # f(D∖B) = {00, 10, 20, 01}: cuatro rectas con ≥ 2 puntos
    with pytest.raises(TooManyHeavyLines):
        bob_colouring(f, range(5, 10), params, random.Random(0))


def test_bob_colouring_depends_only_on_bobs_hand(space3):
    deal = deal_random(7, 332, 4, random.Random(3))
    f = alice_map(deal.A, space3, random.Random(4))
    # Mismo B, otra partición de D∖B entre Alice y Cath
    a_card, c_card = min(deal.A), min(deal.C)
    other = Deal(A=(deal.A - {a_card}) | {c_card}, B=deal.B, C=(deal.C - {c_card}) | {a_card})

    first = bob_colouring(f, deal.B, space3, random.Random(9))
    second = bob_colouring(f, other.B, space3, random.Random(9))
    assert first.to_dict() == second.to_dict()

    bobs = [Bob(space3, hand.B, random.Random(9)) for hand in (deal, other)]
    assert bobs[0].announce([f]).to_dict() == bobs[1].announce([f]).to_dict()


def test_alice_colour_needs_a_line():
    transcript, deal = figure_example_execution()
    params = transcript.params
    assert alice_colour(transcript.f, transcript.xi, deal.A, params) == transcript.colour
    with pytest.raises(NotALine):
        alice_colour(transcript.f, transcript.xi, {1, 2, 4}, params)


def test_bob_deduce_errors():
    transcript, deal = figure_example_execution()
    params = transcript.params
    assert bob_deduce(transcript.f, transcript.xi, transcript.colour, deal.B, params) == deal.C

    trivial = Colouring.trivial(params.space)
    # f(A ∪ C) contiene dos rectas, ambas de color 1
    with pytest.raises(AmbiguousLine):
        bob_deduce(transcript.f, trivial, 1, deal.B, params)
    with pytest.raises(NoMatchingLine):
        bob_deduce(transcript.f, trivial, 2, deal.B, params)


def test_players_refuse_out_of_turn(plane):
    deal = deal_random(7, 41, 1, random.Random(0))
    alice = Alice(plane, deal.A, random.Random(0))
    bob = Bob(plane, deal.B, random.Random(0))
    with pytest.raises(ProtocolError):
        alice.announce([None])
    with pytest.raises(ProtocolError):
        bob.announce([])
    with pytest.raises(ProtocolError):
        bob.announce([None, None, None, None])


# ---------------------------------------------------------------------------
# Ejecuciones completas
# ---------------------------------------------------------------------------

def _assert_correct(transcript, deal):
    assert frozenset(transcript.claimed_C) == deal.C
    assert verify_execution(transcript, deal)


def _assert_correct_and_safe(transcript, deal):
    _assert_correct(transcript, deal)
    report = check_weak_safety(transcript, deal)
    assert report.passed
    assert len(report.cards) == deal.a + deal.b
    for card in report.cards:
        for witness in (card.in_A, card.in_B):
            assert witness.alt_deal.C == deal.C
            assert verify_execution(transcript, witness.alt_deal, strict=False)


def test_run_protocol_plane(plane):
    for seed in range(20):
        transcript, deal = _run(plane, seed)
        _assert_correct(transcript, deal)


@pytest.mark.slow
def test_run_protocol_plane_many_seeds(plane):
    for seed in range(500):
        transcript, deal = _run(plane, seed)
        _assert_correct_and_safe(transcript, deal)


def test_run_protocol_space(space3):
    for seed in range(3):
        transcript, deal = _run(space3, seed)
        _assert_correct(transcript, deal)


@pytest.mark.slow
def test_run_protocol_space_many_seeds(space3):
    for seed in range(50):
        transcript, deal = _run(space3, seed)
        _assert_correct_and_safe(transcript, deal)


def test_run_protocol_without_cath():
    params = ProtocolParams.create(a=7, c=0, d=2, k=2)
    assert params.b == 42
    transcript, deal = _run(params, 3)
    assert transcript.claimed_C == ()
    assert verify_execution(transcript, deal)


def test_run_protocol_random_leftover(plane):
    transcript, deal = _run(plane, 8, leftover='random')
    assert len(transcript.xi.exceptions) > 2
    _assert_correct(transcript, deal)


def test_run_protocol_is_deterministic(plane):
    first, deal = _run(plane, 42)
    second = run_protocol(deal, plane, 42)
    assert first.to_dict() == second.to_dict()
    other = run_protocol(deal, plane, 43)
    assert other.f != first.f


def test_run_protocol_size_mismatch(plane):
    deal = deal_random(7, 40, 2, random.Random(0))
    with pytest.raises(SizeMismatch):
        run_protocol(deal, plane, 0)


# ---------------------------------------------------------------------------
# Transcripción
# ---------------------------------------------------------------------------

def test_transcript_files(plane, tmp_path):
    transcript, deal = _run(plane, 5)
    save_json(transcript.to_dict(), tmp_path / 'transcript.json')
    save_json(deal.to_dict(), tmp_path / 'deal.json')

    loaded = load_transcript(tmp_path / 'transcript.json')
    loaded_deal = load_deal(tmp_path / 'deal.json')
    assert loaded.f == transcript.f
    assert loaded.xi.agrees_with(transcript.xi)
    assert loaded_deal == deal
    assert verify_execution(loaded, loaded_deal)


def test_malformed_transcripts(plane, tmp_path):
    transcript, _ = _run(plane, 6)
    data = transcript.to_dict()

    with pytest.raises(MalformedTranscript):
        Transcript.from_dict([])
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict({})
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict({**data, 'f': data['f'][:-1]})
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict({**data, 'f': [99] + data['f'][1:]})
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict({**data, 'xi': {'by_direction': [1, 2]}})
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict({k: v for k, v in data.items() if k != 'colour'})
    for params in (None, [], 7):
        with pytest.raises(MalformedTranscript):
            Transcript.from_dict({**data, 'params': params})
    # ξ con otro número de colores que el anunciado
    one_colour = {'k': 1, 'by_direction': [0] * 8, 'exceptions': [], 'default': 1}
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict({**data, 'xi': one_colour, 'colour': 1})
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict({**data, 'xi': {**data['xi'], 'k': 3}})

    broken = tmp_path / 'roto.json'
    broken.write_text('{"f": [1, 2', encoding='utf-8')
    with pytest.raises(MalformedTranscript):
        load_transcript(broken)
    with pytest.raises(MalformedTranscript):
        load_transcript(tmp_path / 'no_existe.json')
