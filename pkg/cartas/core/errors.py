"""
Jerarquía de excepciones del protocolo de coloreado
Todas heredan de CartasError para poder capturarlas en bloque desde la CLI
"""


class CartasError(Exception):
    """Base de todos los errores del proyecto"""


# --- Cuerpos finitos -------------------------------------------------------

class FieldError(CartasError, ValueError):
    pass


class NotPrime(FieldError):
    pass


class ReducibleModulus(FieldError):
    pass


class NoDefaultModulus(FieldError):
    pass


# --- Geometría -------------------------------------------------------------

class GeometryError(CartasError, ValueError):
    pass


class CoincidentPoints(GeometryError):
    pass


class NotALine(GeometryError):
    pass


# --- Coloreados ------------------------------------------------------------

class ColouringError(CartasError, ValueError):
    pass


class TooLargeForExhaustive(ColouringError):
    pass


class DuplicateColourInWitness(ColouringError):
    pass


class NotEnoughDirections(ColouringError):
    pass


class DuplicateSpecialLines(ColouringError):
    pass


class TooManySpecialLines(ColouringError):
    pass


# --- Protocolo -------------------------------------------------------------

class ProtocolError(CartasError):
    pass


class InvalidParameters(ProtocolError, ValueError):
    pass


class SizeMismatch(ProtocolError):
    pass


class TooManyHeavyLines(ProtocolError):
    pass


class NoMatchingLine(ProtocolError):
    pass


class AmbiguousLine(ProtocolError):
    pass


# --- Transcripciones y parámetros -----------------------------------------

class TranscriptError(CartasError):
    pass


class MalformedTranscript(TranscriptError, ValueError):
    pass


class ParamsError(CartasError):
    pass


class RegimeInfeasibleAtThisA(ParamsError):
    pass
