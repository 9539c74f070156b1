import logging
import random
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from apps.workflows.models import WorkflowSpec

from ..exceptions import ScriptIndexError
from ..models import ExecutionTrace, GlobalState, Scenario, TraceStep, TransitionLabel
from .engine import ReconfigurationEngine

logger = logging.getLogger(__name__)


class RandomPolicy:
    """
    Elige uniformemente entre las acciones habilitadas; determinista dada la semilla
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def choose(self, position: int, labels: Sequence[TransitionLabel]) -> int:
        return self._rng.randrange(len(labels))


class ScriptPolicy:
    """
    Sigue una lista de índices sobre las acciones habilitadas (ordenadas).
    Agotado el guion, continúa con la primera acción habilitada.
    """

    def __init__(self, indices: Sequence[int]):
        self.indices = list(indices)

    def choose(self, position: int, labels: Sequence[TransitionLabel]) -> int:
        if position >= len(self.indices):
            return 0
        index = self.indices[position]
        if not 0 <= index < len(labels):
            raise ScriptIndexError(position, index, len(labels))
        return index


@dataclass(frozen=True)
class Simulation:
    trace: ExecutionTrace
    final_state: GlobalState


class Simulator:
    """
    Ejecuta el sistema siguiendo enabled/apply hasta que no quede acción habilitada.
    El LTS alcanzable es acíclico, así que la ejecución siempre termina.
    """

    @staticmethod
    def simulate(engine: ReconfigurationEngine, policy) -> Simulation:
        state = engine.initial_state()
        initial_digest = state.digest
        steps: List[TraceStep] = []
        while True:
            labels = engine.enabled(state)
            if not labels:
                break
            label = labels[policy.choose(len(steps), labels)]
            state, emitted = engine.transition(state, label, check=False)
            steps.append(TraceStep(label, emitted, state.digest))
        logger.debug("Simulación terminada tras %d transiciones en %s", len(steps), state.digest)
        return Simulation(ExecutionTrace(initial_digest, tuple(steps)), state)

    @staticmethod
    def replay(engine: ReconfigurationEngine, labels: Sequence[TransitionLabel]) -> Tuple[GlobalState, ExecutionTrace]:
        """
        Reproduce una secuencia de etiquetas comprobando que cada una esté habilitada
        """
        state = engine.initial_state()
        initial_digest = state.digest
        steps: List[TraceStep] = []
        for label in labels:
            state, emitted = engine.transition(state, label)
            steps.append(TraceStep(label, emitted, state.digest))
        return state, ExecutionTrace(initial_digest, tuple(steps))


def run(spec: WorkflowSpec, scenario: Scenario, policy) -> ExecutionTrace:
    return Simulator.simulate(ReconfigurationEngine(spec, scenario), policy).trace
