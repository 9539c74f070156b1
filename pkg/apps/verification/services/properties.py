import logging
from typing import Callable, Iterable, List, Optional

from apps.reconfiguration.models import ExecutionTrace, GlobalState, Phase, Scenario, TransitionLabel
from apps.reconfiguration.services import ReconfigurationEngine
from apps.workflows.models import WorkflowSpec

from ..models import CheckReport, PropertyId
from .exploration import Lts, explore

logger = logging.getLogger(__name__)


def is_quiescent(state: GlobalState) -> bool:
    return state.phase is Phase.RUNNING_NEW and not state.orders and state.arrivals_remaining == 0


class PropertyChecker:
    """
    Verifica R1-R4, ausencia de bloqueos y la lectura existencial de R1
    sobre un LTS ya explorado
    """

    def __init__(self, lts: Lts):
        self.lts = lts

    def check(self, prop: PropertyId) -> CheckReport:
        counterexample = self.counterexample(prop)
        report = CheckReport(prop, counterexample is None, self.lts.stats, counterexample)
        logger.info("%s %s", prop.value, 'HOLDS' if report.holds else 'FAILS')
        return report

    def check_all(self, properties: Iterable[PropertyId]) -> List[CheckReport]:
        return [self.check(prop) for prop in properties]

    def counterexample(self, prop: PropertyId) -> Optional[ExecutionTrace]:
        lts = self.lts
        if prop is PropertyId.R1:
            return shortest_counterexample(lts, state_predicate=lambda s: s.flags.forced_rejection_seen)
        if prop is PropertyId.R2:
            return shortest_counterexample(lts, state_predicate=lambda s: s.flags.old_nonconforming)
        if prop is PropertyId.R3:
            return shortest_counterexample(lts, state_predicate=lambda s: s.flags.new_nonconforming)
        if prop is PropertyId.R4:
            # el estado más cercano que está en un ciclo o es terminal fuera de RunningNew
            bad_terminal = lts.find_state(lambda s: s.phase is not Phase.RUNNING_NEW, terminal_only=True)
            candidates = lts.cycle_indices[:1] + ([] if bad_terminal is None else [bad_terminal])
            return lts.path_to(min(candidates)) if candidates else None
        if prop is PropertyId.DEADLOCK_FREE:
            return self._terminal_witness(lambda s: not is_quiescent(s))
        if prop is PropertyId.R1_WEAK:
            clean = lts.find_state(lambda s: not s.flags.forced_rejection_seen, terminal_only=True)
            if clean is not None:
                return None
            if lts.terminal_indices:
                return lts.path_to(lts.terminal_indices[0])
            # sin estados terminales ninguna ejecución termina
            return lts.path_to(lts.cycle_indices[0])
        raise ValueError(prop)

    def _terminal_witness(self, predicate: Callable[[GlobalState], bool]) -> Optional[ExecutionTrace]:
        index = self.lts.find_state(predicate, terminal_only=True)
        return None if index is None else self.lts.path_to(index)


def shortest_counterexample(lts: Lts,
                            state_predicate: Optional[Callable[[GlobalState], bool]] = None,
                            label_predicate: Optional[Callable[[TransitionLabel], bool]] = None,
                            ) -> Optional[ExecutionTrace]:
    """
    Camino de largo mínimo hasta un estado (o una transición) que cumple el predicado.
    Si nada lo cumple devuelve None.
    """
    if state_predicate is not None:
        index = lts.find_state(state_predicate)
        return None if index is None else lts.path_to(index)
    if label_predicate is not None:
        edge = lts.find_edge(label_predicate)
        if edge is None:
            return None
        prefix = lts.path_to(edge.source)
        return ExecutionTrace(prefix.initial_digest, prefix.steps + lts.trace_of([edge]).steps)
    raise ValueError('Se requiere un predicado sobre estados o sobre etiquetas')


def check(spec: WorkflowSpec, scenario: Scenario, prop: PropertyId,
          max_states: Optional[int] = None) -> CheckReport:
    lts = explore(ReconfigurationEngine(spec, scenario), max_states)
    return PropertyChecker(lts).check(prop)
