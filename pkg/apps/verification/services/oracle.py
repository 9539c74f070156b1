from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Set, Tuple

from apps.reconfiguration.models import GlobalState, Phase, TransitionLabel
from apps.reconfiguration.services import ReconfigurationEngine

from ..models import PropertyId

SAFETY = (PropertyId.R1, PropertyId.R2, PropertyId.R3, PropertyId.R4, PropertyId.DEADLOCK_FREE)


def path_violations(states: List[GlobalState]) -> Set[PropertyId]:
    """
    Propiedades que viola un camino maximal, evaluadas directamente sobre sus estados
    """
    found: Set[PropertyId] = set()
    if any(s.flags.forced_rejection_seen for s in states):
        found.add(PropertyId.R1)
    if any(s.flags.old_nonconforming for s in states):
        found.add(PropertyId.R2)
    if any(s.flags.new_nonconforming for s in states):
        found.add(PropertyId.R3)
    last = states[-1]
    if last.phase is not Phase.RUNNING_NEW:
        found |= {PropertyId.R4, PropertyId.DEADLOCK_FREE}
    elif last.orders or last.arrivals_remaining:
        found.add(PropertyId.DEADLOCK_FREE)
    return found


def iter_maximal_paths(engine: ReconfigurationEngine) -> Iterator[Tuple[List[TransitionLabel], List[GlobalState]]]:
    """
    Enumera todos los caminos maximales sin compartir nada entre ellos.
    Crece de forma combinatoria: solo para instancias muy pequeñas.
    """
    stack = [([], [engine.initial_state()])]
    while stack:
        labels, states = stack.pop()
        enabled = engine.enabled(states[-1])
        if not enabled:
            yield labels, states
            continue
        for label in reversed(enabled):
            stack.append((labels + [label], states + [engine.apply(states[-1], label)]))


@dataclass(frozen=True)
class _Summary:
    violations: FrozenSet[PropertyId]
    clean_terminal: bool
    paths: int


@dataclass(frozen=True)
class OracleVerdicts:
    holds: Dict[PropertyId, bool]
    maximal_paths: int


class PathOracle:
    """
    Oráculo de fuerza bruta: recorre en profundidad todos los caminos maximales
    directamente sobre enabled/apply, sin la BFS ni el grafo del verificador.
    Los resultados por sufijo se memorizan por estado; un estado repetido dentro
    del camino actual es un ciclo y por lo tanto un camino que no termina.
    """

    def __init__(self, engine: ReconfigurationEngine):
        self.engine = engine
        self._memo: Dict[GlobalState, _Summary] = {}
        self._on_path: Set[GlobalState] = set()

    def verdicts(self) -> OracleVerdicts:
        root = self._visit(self.engine.initial_state())
        holds = {prop: prop not in root.violations for prop in SAFETY}
        holds[PropertyId.R1_WEAK] = root.clean_terminal
        return OracleVerdicts(holds, root.paths)

    def _visit(self, state: GlobalState) -> _Summary:
        if state in self._on_path:
            return _Summary(frozenset({PropertyId.R4}), False, 0)
        if state in self._memo:
            return self._memo[state]

        self._on_path.add(state)
        labels = self.engine.enabled(state)
        if not labels:
            summary = _Summary(
                frozenset(path_violations([state])),
                not state.flags.forced_rejection_seen,
                1,
            )
        else:
            own = path_violations([state]) - {PropertyId.R4, PropertyId.DEADLOCK_FREE}
            clean = False
            paths = 0
            for label in labels:
                child = self._visit(self.engine.apply(state, label))
                own |= child.violations
                clean = clean or child.clean_terminal
                paths += child.paths
            summary = _Summary(frozenset(own), clean, paths)
        self._on_path.discard(state)
        self._memo[state] = summary
        return summary


def oracle_verdicts(engine: ReconfigurationEngine) -> OracleVerdicts:
    return PathOracle(engine).verdicts()
