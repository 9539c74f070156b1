import logging
from collections import Counter
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from .exceptions import OutcomeError, WorkflowError
from .models import (
    MAX_ACTIVITY_ID_LENGTH,
    ActivityKind,
    Configuration,
    Trace,
    Violation,
    ViolationKind,
)

logger = logging.getLogger(__name__)

# Multiconjunto de posiciones de tokens, siempre ordenado
Marking = Tuple[str, ...]
Move = Tuple[str, Optional[str]]


class ForkStructure:
    """
    Empareja cada Fork con el Join que cierra todas sus ramas y detecta
    anidamientos mal formados. Solo tiene sentido sobre grafos acíclicos
    sin sucesores desconocidos ni aridades incorrectas.
    """

    def __init__(self, cfg: Configuration, graph: nx.DiGraph):
        self.cfg = cfg
        self.graph = graph
        self.matches: Dict[str, Optional[str]] = {}
        self.regions: Dict[str, Set[str]] = {}
        self.join_arity: Dict[str, int] = {}
        self.offenders: Set[str] = set()

    def analyse(self) -> 'ForkStructure':
        forks = sorted(a.id for a in self.cfg.activities if a.kind is ActivityKind.FORK)
        for fork_id in forks:
            self.match(fork_id)
        for activity in self.cfg.activities:
            if activity.kind is ActivityKind.JOIN and activity.id not in self.join_arity:
                self.offenders.add(activity.id)
        return self

    def match(self, fork_id: str) -> Optional[str]:
        if fork_id in self.matches:
            return self.matches[fork_id]
        self.matches[fork_id] = None
        fork = self.cfg.activity(fork_id)

        ends: Set[Optional[str]] = set()
        branch_regions: List[Set[str]] = []
        for head in fork.successors:
            end, region = self._walk(head)
            ends.add(end)
            branch_regions.append(region)
        if None in ends or len(ends) != 1:
            self.offenders.add(fork_id)
            return None
        join_id = ends.pop()

        # las ramas no comparten actividades antes del Join
        region: Set[str] = set()
        for branch in branch_regions:
            shared = branch & region
            if shared:
                self.offenders.add(min(shared))
            region |= branch

        # nadie entra a la región sino por el propio Fork
        for node in region:
            for pred in self.graph.predecessors(node):
                if pred not in region and pred != fork_id:
                    self.offenders.add(node)
        for pred in self.graph.predecessors(join_id):
            if pred not in region and pred != fork_id:
                self.offenders.add(join_id)

        if join_id in self.join_arity:
            self.offenders.add(join_id)
            return None
        self.join_arity[join_id] = len(fork.successors)
        self.matches[fork_id] = join_id
        self.regions[fork_id] = region
        return join_id

    def _walk(self, node: str) -> Tuple[Optional[str], Set[str]]:
        region: Set[str] = set()
        current = node
        while True:
            activity = self.cfg.activity(current)
            if activity.kind is ActivityKind.JOIN:
                return current, region
            if activity.kind is ActivityKind.FINAL:
                return None, region
            region.add(current)
            if activity.kind is ActivityKind.TASK:
                current = activity.successors[0]
            elif activity.kind is ActivityKind.FORK:
                inner = self.match(current)
                if inner is None:
                    return None, region
                region |= self.regions[current] | {inner}
                current = self.cfg.activity(inner).successors[0]
            else:
                results = [self._walk(successor) for successor in activity.successors]
                ends = {end for end, _ in results}
                if None in ends or len(ends) != 1:
                    return None, region
                for _, branch in results:
                    region |= branch
                return ends.pop(), region


class ConfigurationValidator:
    """
    Verifica las reglas de buena formación de una configuración.
    Las violaciones son datos: nunca se lanzan como excepción.
    """

    @staticmethod
    def graph(cfg: Configuration) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(cfg.index)
        for activity in cfg.activities:
            for successor in activity.successors:
                if successor in cfg.index:
                    graph.add_edge(activity.id, successor)
        return graph

    @staticmethod
    def validate(cfg: Configuration) -> List[Violation]:
        found: Set[Tuple[ViolationKind, str]] = set()

        counts = Counter(activity.id for activity in cfg.activities)
        for activity_id, count in counts.items():
            if count > 1:
                found.add((ViolationKind.DUPLICATE_ID, activity_id))
            if not activity_id or len(activity_id) > MAX_ACTIVITY_ID_LENGTH:
                found.add((ViolationKind.BAD_ID, activity_id))

        if cfg.entry not in cfg.index:
            found.add((ViolationKind.MISSING_ENTRY, cfg.entry))

        structural = False
        for activity in cfg.activities:
            for kind in ConfigurationValidator._arity_violations(activity):
                found.add((kind, activity.id))
                structural = True
            if any(successor not in cfg.index for successor in activity.successors):
                found.add((ViolationKind.UNKNOWN_SUCCESSOR, activity.id))
                structural = True

        graph = ConfigurationValidator.graph(cfg)
        if cfg.entry in graph:
            reachable = nx.descendants(graph, cfg.entry) | {cfg.entry}
            for node in graph.nodes:
                if node not in reachable:
                    found.add((ViolationKind.UNREACHABLE, node))

        cyclic = False
        for component in nx.strongly_connected_components(graph):
            node = min(component)
            if len(component) > 1 or graph.has_edge(node, node):
                found.add((ViolationKind.CYCLE, node))
                cyclic = True

        finals = {a.id for a in cfg.activities if a.kind is ActivityKind.FINAL}
        finishing = set(finals)
        for final in finals:
            finishing |= nx.ancestors(graph, final)
        for node in graph.nodes:
            if node not in finishing:
                found.add((ViolationKind.DEAD_END, node))

        if not cyclic and not structural:
            structure = ForkStructure(cfg, graph).analyse()
            for node in structure.offenders:
                found.add((ViolationKind.UNBALANCED_FORK, node))

        violations = [Violation(kind, activity) for kind, activity in found]
        return sorted(violations, key=lambda v: (v.kind.value, v.activity))

    @staticmethod
    def _arity_violations(activity) -> List[ViolationKind]:
        count = len(activity.successors)
        kind = activity.kind
        if kind in (ActivityKind.TASK, ActivityKind.JOIN):
            return [] if count == 1 else [ViolationKind.BAD_ARITY]
        if kind is ActivityKind.FINAL:
            return [] if count == 0 else [ViolationKind.BAD_ARITY]
        if kind is ActivityKind.FORK:
            ok = count >= 2 and len(set(activity.successors)) == count
            return [] if ok else [ViolationKind.BAD_ARITY]
        result = []
        if count < 2 or len(activity.outcomes) != count:
            result.append(ViolationKind.BAD_ARITY)
        if len(set(activity.outcomes)) != len(activity.outcomes):
            result.append(ViolationKind.DUPLICATE_OUTCOME)
        return result


@lru_cache(maxsize=32)
def join_arity(cfg: Configuration) -> Dict[str, int]:
    """
    Tokens que necesita cada Join para dispararse: uno por rama de su Fork.
    Un Join sin Fork emparejado (configuración inválida) espera a todos sus predecesores.
    """
    graph = ConfigurationValidator.graph(cfg)
    arity = {
        a.id: max(graph.in_degree(a.id), 1)
        for a in cfg.activities if a.kind is ActivityKind.JOIN
    }
    if nx.is_directed_acyclic_graph(graph):
        try:
            arity.update(ForkStructure(cfg, graph).analyse().join_arity)
        except (IndexError, WorkflowError):
            logger.debug("Estructura fork/join incompleta en %s", cfg.id)
    return arity


class TokenGame:
    """
    Lectura operacional de un grafo de actividades: los tokens marcan el avance,
    Fork duplica, Join sincroniza y Final consume.
    """

    @staticmethod
    def initial_marking(cfg: Configuration) -> Marking:
        tokens: Counter = Counter()
        TokenGame._produce(cfg, tokens, cfg.entry)
        return tuple(sorted(tokens.elements()))

    @staticmethod
    def _produce(cfg: Configuration, tokens: Counter, target: str) -> None:
        activity = cfg.activity(target)
        if activity.kind is ActivityKind.FORK:
            for successor in activity.successors:
                TokenGame._produce(cfg, tokens, successor)
        elif activity.kind is ActivityKind.JOIN:
            tokens[target] += 1
            needed = join_arity(cfg)[target]
            if tokens[target] >= needed:
                tokens[target] -= needed
                if not tokens[target]:
                    del tokens[target]
                TokenGame._produce(cfg, tokens, activity.successors[0])
        else:
            tokens[target] += 1

    @staticmethod
    def moves(cfg: Configuration, marking: Marking) -> List[Move]:
        """
        Movimientos habilitados, en orden determinista: (actividad, resultado)
        """
        result: List[Move] = []
        for activity_id in sorted(set(marking)):
            activity = cfg.activity(activity_id)
            if activity.kind is ActivityKind.DECISION:
                result.extend((activity_id, outcome) for outcome in sorted(activity.outcomes))
            elif not activity.kind.is_routing:
                result.append((activity_id, None))
        return result

    @staticmethod
    def fire(cfg: Configuration, marking: Marking, activity_id: str, outcome: Optional[str] = None) -> Marking:
        activity = cfg.activity(activity_id)
        if activity.kind.is_routing:
            raise WorkflowError(f"'{activity_id}' es una actividad de enrutamiento y no se ejecuta como paso")
        if activity_id not in marking:
            raise WorkflowError(f"No hay token en '{activity_id}'")
        targets = successors(cfg, activity_id, outcome)
        if activity.kind is not ActivityKind.DECISION:
            targets = activity.successors

        tokens = Counter(marking)
        tokens[activity_id] -= 1
        if not tokens[activity_id]:
            del tokens[activity_id]
        for target in targets:
            TokenGame._produce(cfg, tokens, target)
        return tuple(sorted(tokens.elements()))


def validate_configuration(cfg: Configuration) -> List[Violation]:
    return ConfigurationValidator.validate(cfg)


def successors(cfg: Configuration, activity_id: str, outcome: Optional[str] = None) -> FrozenSet[str]:
    """
    Sucesores inmediatos de una actividad.
    El resultado es obligatorio para las decisiones y prohibido para el resto.
    """
    activity = cfg.activity(activity_id)
    if activity.kind is ActivityKind.DECISION:
        if outcome is None:
            raise OutcomeError(f"La decisión '{activity_id}' requiere un resultado")
        target = activity.successor_for(outcome)
        if target is None:
            raise OutcomeError(f"Resultado '{outcome}' desconocido en '{activity_id}'")
        return frozenset({target})
    if outcome is not None:
        raise OutcomeError(f"'{activity_id}' no es una decisión y no admite resultado")
    return frozenset(activity.successors)


def conforms(trace: Iterable[str], cfg: Configuration) -> bool:
    """
    Indica si la traza es una ejecución completa del juego de tokens de la configuración.
    El resultado de las decisiones no queda en la traza, por eso se rastrea
    el conjunto de marcados posibles.
    """
    markings = {TokenGame.initial_marking(cfg)}
    for step in trace:
        activity = cfg.index.get(step)
        if activity is None or activity.kind.is_routing:
            return False
        outcomes = sorted(activity.outcomes) if activity.kind is ActivityKind.DECISION else [None]
        markings = {
            TokenGame.fire(cfg, marking, step, outcome)
            for marking in markings if step in marking
            for outcome in outcomes
        }
        if not markings:
            return False
    return () in markings


def enumerate_traces(cfg: Configuration, max_len: int) -> List[Trace]:
    """
    Todas las ejecuciones completas de largo <= max_len, en orden lexicográfico
    """
    if max_len < 0:
        raise ValueError('max_len debe ser mayor o igual a cero')

    found: Set[Tuple[str, ...]] = set()

    def explore(marking: Marking, steps: Tuple[str, ...]) -> None:
        if not marking:
            found.add(steps)
            return
        if len(steps) == max_len:
            return
        for activity_id, outcome in TokenGame.moves(cfg, marking):
            explore(TokenGame.fire(cfg, marking, activity_id, outcome), steps + (activity_id,))

    explore(TokenGame.initial_marking(cfg), ())
    return sorted(Trace(steps) for steps in found)
