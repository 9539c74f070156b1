from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from apps.reconfiguration.models import ExecutionTrace, TransitionLabel


class PropertyId(str, Enum):
    R1 = 'R1'
    R2 = 'R2'
    R3 = 'R3'
    R4 = 'R4'
    DEADLOCK_FREE = 'DeadlockFree'
    R1_WEAK = 'R1-weak'

    @classmethod
    def parse(cls, text: str) -> 'PropertyId':
        aliases = {prop.value.lower(): prop for prop in cls}
        aliases['deadlock'] = cls.DEADLOCK_FREE
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"Propiedad desconocida: '{text}'")


# Propiedades que se verifican si no se indica otra cosa
DEFAULT_PROPERTIES: Tuple[PropertyId, ...] = (
    PropertyId.R1, PropertyId.R2, PropertyId.R3, PropertyId.R4, PropertyId.DEADLOCK_FREE,
)


@dataclass(frozen=True)
class LtsStats:
    states: int
    transitions: int
    max_depth: int
    acyclic: bool


@dataclass(frozen=True)
class Edge:
    """
    Transición del LTS entre índices de estados, con las etiquetas que emitió
    """
    source: int
    label: TransitionLabel
    target: int
    emitted: Tuple[TransitionLabel, ...] = ()


@dataclass(frozen=True)
class CheckReport:
    """
    Veredicto de una propiedad. holds es falso si y solo si hay contraejemplo.
    """
    property: PropertyId
    holds: bool
    stats: LtsStats
    counterexample: Optional[ExecutionTrace] = None
