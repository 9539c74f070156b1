from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, Optional, Tuple

from .exceptions import UnknownActivityError

MAX_ACTIVITY_ID_LENGTH = 64

# Resultado de una decisión que representa el rechazo de negocio de un pedido
REJECT_OUTCOME = 'reject'


class ActivityKind(str, Enum):
    TASK = 'Task'
    DECISION = 'Decision'
    FORK = 'Fork'
    JOIN = 'Join'
    FINAL = 'Final'

    @property
    def is_routing(self) -> bool:
        """
        Fork y Join solo enrutan tokens: se disparan solos y no aparecen en las trazas
        """
        return self in (ActivityKind.FORK, ActivityKind.JOIN)


class ViolationKind(str, Enum):
    MISSING_ENTRY = 'missing-entry'
    DUPLICATE_ID = 'duplicate-id'
    BAD_ID = 'bad-id'
    UNKNOWN_SUCCESSOR = 'unknown-successor'
    UNREACHABLE = 'unreachable'
    CYCLE = 'cycle'
    DEAD_END = 'dead-end'
    BAD_ARITY = 'bad-arity'
    DUPLICATE_OUTCOME = 'duplicate-outcome'
    UNBALANCED_FORK = 'unbalanced-fork'


@dataclass(frozen=True)
class Activity:
    """
    Nodo del grafo de actividades.
        - successors: sucesores en orden de declaración.
        - outcomes: solo para decisiones, un resultado por sucesor (mismo orden).
    """
    id: str
    kind: ActivityKind
    successors: Tuple[str, ...] = ()
    outcomes: Tuple[str, ...] = ()

    def successor_for(self, outcome: str) -> Optional[str]:
        for label, target in zip(self.outcomes, self.successors):
            if label == outcome:
                return target
        return None


@dataclass(frozen=True)
class Configuration:
    """
    Estructura del grafo de actividades de un workflow: la unidad que reemplaza la reconfiguración
    """
    id: str
    entry: str
    activities: Tuple[Activity, ...]

    @cached_property
    def index(self) -> Dict[str, Activity]:
        return {activity.id: activity for activity in self.activities}

    def __contains__(self, activity_id: object) -> bool:
        return activity_id in self.index

    def activity(self, activity_id: str) -> Activity:
        try:
            return self.index[activity_id]
        except KeyError:
            raise UnknownActivityError(self.id, activity_id)

    @cached_property
    def visible_activities(self) -> Tuple[str, ...]:
        return tuple(sorted(a.id for a in self.activities if not a.kind.is_routing))


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    activity: str

    def __str__(self):
        return f"VIOLATION {self.kind.value} {self.activity}"


@dataclass(frozen=True, order=True)
class Trace:
    """
    Actividades visibles completadas por un pedido, en orden de finalización
    """
    steps: Tuple[str, ...] = field(default=())

    def __iter__(self) -> Iterator[str]:
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __str__(self):
        return ' '.join(self.steps)


@dataclass(frozen=True)
class WorkflowSpec:
    """
    Par de configuraciones: la antigua (C1) y la nueva (C2)
    """
    old: Configuration
    new: Configuration

    def configuration(self, config_id: str) -> Configuration:
        if config_id == self.old.id:
            return self.old
        if config_id == self.new.id:
            return self.new
        raise KeyError(config_id)
