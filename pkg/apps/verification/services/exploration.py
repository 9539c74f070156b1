import logging
from collections import deque
from functools import cached_property
from typing import Callable, Dict, List, Optional

import networkx as nx
from django.conf import settings

from apps.reconfiguration.models import ExecutionTrace, GlobalState, TraceStep, TransitionLabel
from apps.reconfiguration.services import ReconfigurationEngine

from ..exceptions import StateBudgetExceeded
from ..models import Edge, LtsStats

logger = logging.getLogger(__name__)


class Lts:
    """
    Sistema de transiciones etiquetado alcanzable desde el estado inicial.
    Los estados quedan en orden BFS, así que el primer estado que cumple un
    predicado es también uno de profundidad mínima.
    """

    def __init__(self, engine: ReconfigurationEngine, states: List[GlobalState], edges: List[Edge],
                 parents: List[Optional[int]], depths: List[int]):
        self.engine = engine
        self.states = states
        self.edges = edges
        self.parents = parents
        self.depths = depths
        self.outgoing: List[List[int]] = [[] for _ in states]
        for position, edge in enumerate(edges):
            self.outgoing[edge.source].append(position)

    @cached_property
    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.states)))
        graph.add_edges_from((edge.source, edge.target) for edge in self.edges)
        return graph

    @cached_property
    def stats(self) -> LtsStats:
        return LtsStats(
            states=len(self.states),
            transitions=len(self.edges),
            max_depth=max(self.depths),
            acyclic=nx.is_directed_acyclic_graph(self.graph),
        )

    def is_terminal(self, index: int) -> bool:
        return not self.outgoing[index]

    @property
    def terminal_indices(self) -> List[int]:
        return [index for index in range(len(self.states)) if self.is_terminal(index)]

    @cached_property
    def cycle_indices(self) -> List[int]:
        """
        Estados que están en algún ciclo, en orden BFS
        """
        found = set(nx.nodes_with_selfloops(self.graph))
        for component in nx.strongly_connected_components(self.graph):
            if len(component) > 1:
                found |= component
        return sorted(found)

    def find_state(self, predicate: Callable[[GlobalState], bool], terminal_only: bool = False) -> Optional[int]:
        for index, state in enumerate(self.states):
            if terminal_only and not self.is_terminal(index):
                continue
            if predicate(state):
                return index
        return None

    def find_edge(self, predicate: Callable[[TransitionLabel], bool]) -> Optional[Edge]:
        best: Optional[Edge] = None
        for edge in self.edges:
            if any(predicate(label) for label in (edge.label,) + edge.emitted):
                if best is None or self.depths[edge.source] < self.depths[best.source]:
                    best = edge
        return best

    def path_to(self, index: int) -> ExecutionTrace:
        """
        Camino de largo mínimo desde el estado inicial, por los enlaces padre de la BFS
        """
        path: List[Edge] = []
        while self.parents[index] is not None:
            edge = self.edges[self.parents[index]]
            path.append(edge)
            index = edge.source
        path.reverse()
        return self.trace_of(path)

    def trace_of(self, path: List[Edge]) -> ExecutionTrace:
        steps = tuple(TraceStep(edge.label, edge.emitted, self.states[edge.target].digest) for edge in path)
        return ExecutionTrace(self.states[0].digest, steps)


class Explorer:
    """
    Búsqueda en anchura sobre enabled/apply con deduplicación por codificación canónica
    """

    @staticmethod
    def explore(engine: ReconfigurationEngine, max_states: Optional[int] = None) -> Lts:
        limit = max_states if max_states is not None else settings.RECONFIG_MAX_STATES
        initial = engine.initial_state()
        states: List[GlobalState] = [initial]
        index: Dict[GlobalState, int] = {initial: 0}
        parents: List[Optional[int]] = [None]
        depths: List[int] = [0]
        edges: List[Edge] = []

        queue = deque([0])
        while queue:
            source = queue.popleft()
            state = states[source]
            for label in engine.enabled(state):
                successor, emitted = engine.transition(state, label, check=False)
                target = index.get(successor)
                if target is None:
                    if len(states) >= limit:
                        logger.warning("Exploración abortada: límite de %d estados", limit)
                        raise StateBudgetExceeded(limit, len(states) + 1)
                    target = len(states)
                    states.append(successor)
                    index[successor] = target
                    parents.append(len(edges))
                    depths.append(depths[source] + 1)
                    queue.append(target)
                edges.append(Edge(source, label, target, emitted))

        lts = Lts(engine, states, edges, parents, depths)
        logger.info("Exploración %s: %d estados, %d transiciones",
                    engine.scenario.strategy, len(states), len(edges))
        return lts


def explore(engine: ReconfigurationEngine, max_states: Optional[int] = None) -> Lts:
    return Explorer.explore(engine, max_states)
