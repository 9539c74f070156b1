import hashlib
import re
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from functools import cached_property
from typing import List, Optional, Tuple

from apps.workflows.models import Trace


class StrategyVariant(str, Enum):
    ABORT = 'Abort'
    SUSPEND_RESUME = 'SuspendResume'
    OVERLAP = 'Overlap'


@dataclass(frozen=True)
class ReconfigurationStrategy:
    """
    Estrategia de reconfiguración.
        - Abort: cambio casi instantáneo, se abortan los pedidos en curso.
        - SuspendResume: los pedidos en curso se suspenden hasta completar la reconfiguración.
        - Overlap: los pedidos antiguos se ejecutan en paralelo con las tareas de reconfiguración.
    reconfig_steps es la duración del intervalo de reconfiguración en acciones internas.
    """
    variant: StrategyVariant
    reconfig_steps: int = 0

    def __str__(self):
        if self.variant is StrategyVariant.ABORT:
            return self.variant.value
        return f"{self.variant.value}(k={self.reconfig_steps})"


class TriggerKind(str, Enum):
    NONDETERMINISTIC = 'Nondeterministic'
    AFTER_N_ACCEPTS = 'AfterNAccepts'


TRIGGER_PATTERN = re.compile(r'^(?:Nondeterministic|AfterNAccepts\((\d+)\))$')


@dataclass(frozen=True)
class ReconfigTrigger:
    kind: TriggerKind = TriggerKind.NONDETERMINISTIC
    count: int = 0

    @classmethod
    def parse(cls, text: str) -> 'ReconfigTrigger':
        match = TRIGGER_PATTERN.match(text.strip())
        if match is None:
            raise ValueError(f"Disparador desconocido: '{text}'")
        if match.group(1) is None:
            return cls()
        return cls(TriggerKind.AFTER_N_ACCEPTS, int(match.group(1)))

    def __str__(self):
        if self.kind is TriggerKind.NONDETERMINISTIC:
            return self.kind.value
        return f"{self.kind.value}({self.count})"


@dataclass(frozen=True)
class Scenario:
    """
    Acota el modelo para la verificación exhaustiva: presupuesto de llegadas,
    estrategia y momento en que arranca la reconfiguración
    """
    arrival_budget: int
    strategy: ReconfigurationStrategy
    reconfig_trigger: ReconfigTrigger = field(default_factory=ReconfigTrigger)

    def problems(self) -> List[str]:
        found = []
        if self.arrival_budget < 0:
            found.append('arrival_budget debe ser mayor o igual a cero')
        if self.strategy.reconfig_steps < 0:
            found.append('reconfig_steps debe ser mayor o igual a cero')
        if self.strategy.variant is StrategyVariant.ABORT and self.strategy.reconfig_steps != 0:
            found.append('la estrategia Abort es casi instantánea: reconfig_steps debe ser 0')
        trigger = self.reconfig_trigger
        if trigger.kind is TriggerKind.AFTER_N_ACCEPTS and trigger.count > self.arrival_budget:
            found.append('AfterNAccepts no puede superar el presupuesto de llegadas')
        return found


class Phase(IntEnum):
    RUNNING_OLD = 0
    RECONFIGURING = 1
    RUNNING_NEW = 2

    @property
    def label(self) -> str:
        return {0: 'RunningOld', 1: 'Reconfiguring', 2: 'RunningNew'}[self.value]


@dataclass(frozen=True)
class EngineMode:
    phase: Phase = Phase.RUNNING_OLD
    steps_remaining: int = 0


@dataclass(frozen=True)
class Order:
    """
    Pedido en curso.
        - accepted_under: configuración cuyo grafo ejecuta el pedido.
        - accepted_after_start: si fue aceptado al iniciar la reconfiguración o después;
          decide contra qué configuración se evalúa su conformidad.
        - tokens: posiciones actuales, ordenadas.
        - trace: actividades visibles completadas.
    """
    serial: int
    accepted_under: str
    accepted_after_start: bool
    tokens: Tuple[str, ...]
    trace: Tuple[str, ...] = ()
    suspended: bool = False

    def advance(self, tokens: Tuple[str, ...], activity: str) -> 'Order':
        return replace(self, tokens=tokens, trace=self.trace + (activity,))

    def as_trace(self) -> Trace:
        return Trace(self.trace)


@dataclass(frozen=True)
class Flags:
    """
    Marcas monótonas: una vez verdaderas lo son en todos los sucesores
    """
    forced_rejection_seen: bool = False
    old_nonconforming: bool = False
    new_nonconforming: bool = False

    @property
    def conformance_violation_seen(self) -> bool:
        return self.old_nonconforming or self.new_nonconforming


@dataclass(frozen=True)
class GlobalState:
    """
    Estado explorado por el verificador.
    Los pedidos se guardan ordenados por número de serie y sus tokens ordenados,
    así la igualdad estructural es la igualdad canónica.
    """
    mode: EngineMode
    orders: Tuple[Order, ...]
    arrivals_remaining: int
    next_order_serial: int
    flags: Flags = field(default_factory=Flags)

    def order(self, serial: int) -> Optional[Order]:
        for order in self.orders:
            if order.serial == serial:
                return order
        return None

    @property
    def phase(self) -> Phase:
        return self.mode.phase

    def canonical(self) -> str:
        orders = tuple(
            (o.serial, o.accepted_under, o.accepted_after_start, o.tokens, o.trace, o.suspended)
            for o in sorted(self.orders, key=lambda o: o.serial)
        )
        flags = (self.flags.forced_rejection_seen, self.flags.old_nonconforming, self.flags.new_nonconforming)
        return repr((self.mode.phase.label, self.mode.steps_remaining, orders,
                     self.arrivals_remaining, self.next_order_serial, flags))

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode('utf-8')).hexdigest()[:16]


class LabelKind(IntEnum):
    ACCEPT = 0
    STEP = 1
    BUSINESS_REJECT = 2
    COMPLETE = 3
    START_RECONFIG = 4
    RECONFIG_STEP = 5
    COMPLETE_RECONFIG = 6
    ABORT_ORDER = 7
    SUSPEND = 8
    RESUME = 9


LABEL_NAMES = {
    LabelKind.ACCEPT: 'Accept',
    LabelKind.STEP: 'Step',
    LabelKind.BUSINESS_REJECT: 'BusinessReject',
    LabelKind.COMPLETE: 'Complete',
    LabelKind.START_RECONFIG: 'StartReconfig',
    LabelKind.RECONFIG_STEP: 'ReconfigStep',
    LabelKind.COMPLETE_RECONFIG: 'CompleteReconfig',
    LabelKind.ABORT_ORDER: 'AbortOrder',
    LabelKind.SUSPEND: 'Suspend',
    LabelKind.RESUME: 'Resume',
}


@dataclass(frozen=True, order=True)
class TransitionLabel:
    """
    Una acción atómica intercalada. Los campos no usados quedan en su valor
    centinela para que el orden total entre etiquetas esté siempre definido.
    """
    kind: LabelKind
    order: int = -1
    activity: str = ''
    outcome: str = ''
    config: str = ''

    @classmethod
    def accept(cls, serial: int, config_id: str) -> 'TransitionLabel':
        return cls(LabelKind.ACCEPT, order=serial, config=config_id)

    @classmethod
    def step(cls, serial: int, activity: str, outcome: Optional[str] = None) -> 'TransitionLabel':
        return cls(LabelKind.STEP, order=serial, activity=activity, outcome=outcome or '')

    @classmethod
    def business_reject(cls, serial: int, activity: str) -> 'TransitionLabel':
        return cls(LabelKind.BUSINESS_REJECT, order=serial, activity=activity)

    @classmethod
    def complete(cls, serial: int) -> 'TransitionLabel':
        return cls(LabelKind.COMPLETE, order=serial)

    @classmethod
    def of_order(cls, kind: LabelKind, serial: int) -> 'TransitionLabel':
        return cls(kind, order=serial)

    @property
    def name(self) -> str:
        return LABEL_NAMES[self.kind]

    def __str__(self):
        if self.order < 0:
            return self.name
        args = [str(self.order)] + [part for part in (self.activity, self.outcome, self.config) if part]
        return f"{self.name}({','.join(args)})"


START_RECONFIG = TransitionLabel(LabelKind.START_RECONFIG)
RECONFIG_STEP = TransitionLabel(LabelKind.RECONFIG_STEP)
COMPLETE_RECONFIG = TransitionLabel(LabelKind.COMPLETE_RECONFIG)


@dataclass(frozen=True)
class TraceStep:
    label: TransitionLabel
    emitted: Tuple[TransitionLabel, ...]
    digest: str

    @property
    def text(self) -> str:
        return ';'.join(str(label) for label in (self.label,) + self.emitted)


@dataclass(frozen=True)
class ExecutionTrace:
    """
    Secuencia de transiciones desde el estado inicial, con el resumen de cada estado alcanzado
    """
    initial_digest: str
    steps: Tuple[TraceStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def labels(self) -> Tuple[TransitionLabel, ...]:
        return tuple(step.label for step in self.steps)

    def flat_labels(self) -> List[TransitionLabel]:
        """
        Etiquetas disparadas junto con las emitidas por cada una, en orden
        """
        return [label for step in self.steps for label in (step.label,) + step.emitted]

    @property
    def final_digest(self) -> str:
        return self.steps[-1].digest if self.steps else self.initial_digest

    def lines(self) -> List[str]:
        return [f"{index} {step.text} {step.digest}" for index, step in enumerate(self.steps)]
