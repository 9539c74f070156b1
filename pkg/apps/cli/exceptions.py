from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    PROPERTY_VIOLATED = 1
    USAGE_ERROR = 2
    BUDGET_EXCEEDED = 3


class DocumentError(Exception):
    """
    Documento de workflow o escenario ilegible, mal formado o desconocido
    """
