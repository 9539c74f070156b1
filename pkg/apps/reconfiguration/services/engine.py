import logging
from dataclasses import replace
from typing import List, Optional, Tuple

from apps.workflows.exceptions import InvalidConfigurationError
from apps.workflows.models import REJECT_OUTCOME, ActivityKind, WorkflowSpec
from apps.workflows.services import TokenGame, conforms, validate_configuration

from ..exceptions import InvalidScenarioError, LabelNotEnabledError
from ..models import (
    COMPLETE_RECONFIG,
    RECONFIG_STEP,
    START_RECONFIG,
    EngineMode,
    GlobalState,
    LabelKind,
    Order,
    Phase,
    Scenario,
    StrategyVariant,
    TransitionLabel,
    TriggerKind,
)

logger = logging.getLogger(__name__)

Emitted = Tuple[TransitionLabel, ...]


class ReconfigurationEngine:
    """
    Semántica operacional de paso pequeño por intercalado: pedidos en curso más
    el proceso de reconfiguración, parametrizada por la estrategia del escenario.
    Todas las operaciones son funciones puras de sus argumentos.
    """

    def __init__(self, spec: WorkflowSpec, scenario: Scenario):
        for cfg in (spec.old, spec.new):
            violations = validate_configuration(cfg)
            if violations:
                raise InvalidConfigurationError(cfg.id, violations)
        problems = scenario.problems()
        if problems:
            raise InvalidScenarioError(problems)
        self.spec = spec
        self.scenario = scenario

    @property
    def variant(self) -> StrategyVariant:
        return self.scenario.strategy.variant

    def initial_state(self) -> GlobalState:
        return GlobalState(
            mode=EngineMode(Phase.RUNNING_OLD),
            orders=(),
            arrivals_remaining=self.scenario.arrival_budget,
            next_order_serial=0,
        )

    def acceptance_config(self, state: GlobalState) -> Optional[str]:
        """
        Configuración bajo la que se aceptaría un pedido nuevo; None si las llegadas esperan
        """
        phase = state.phase
        if phase is Phase.RUNNING_OLD:
            # con AfterNAccepts exactamente n pedidos preceden a la reconfiguración
            trigger = self.scenario.reconfig_trigger
            if trigger.kind is TriggerKind.AFTER_N_ACCEPTS and state.next_order_serial >= trigger.count:
                return None
            return self.spec.old.id
        if phase is Phase.RECONFIGURING:
            return self.spec.new.id if self.variant is StrategyVariant.OVERLAP else None
        return self.spec.new.id

    def _trigger_ready(self, state: GlobalState) -> bool:
        trigger = self.scenario.reconfig_trigger
        if trigger.kind is TriggerKind.NONDETERMINISTIC:
            return True
        return state.next_order_serial >= trigger.count

    def enabled(self, state: GlobalState) -> List[TransitionLabel]:
        labels: List[TransitionLabel] = []
        phase = state.phase

        config_id = self.acceptance_config(state)
        if state.arrivals_remaining > 0 and config_id is not None:
            labels.append(TransitionLabel.accept(state.next_order_serial, config_id))

        suspended_window = phase is Phase.RECONFIGURING and self.variant is StrategyVariant.SUSPEND_RESUME
        if not suspended_window:
            for order in state.orders:
                if not order.suspended:
                    labels.extend(self._order_labels(order))

        if phase is Phase.RUNNING_OLD and self._trigger_ready(state):
            labels.append(START_RECONFIG)
        elif phase is Phase.RECONFIGURING:
            if state.mode.steps_remaining > 0:
                labels.append(RECONFIG_STEP)
            elif self.variant is not StrategyVariant.OVERLAP or not self._old_orders_in_flight(state):
                labels.append(COMPLETE_RECONFIG)
        return sorted(labels)

    def _old_orders_in_flight(self, state: GlobalState) -> bool:
        return any(order.accepted_under == self.spec.old.id for order in state.orders)

    def _order_labels(self, order: Order) -> List[TransitionLabel]:
        cfg = self.spec.configuration(order.accepted_under)
        labels = []
        for activity_id, outcome in TokenGame.moves(cfg, order.tokens):
            kind = cfg.activity(activity_id).kind
            if kind is ActivityKind.FINAL and len(order.tokens) == 1:
                labels.append(TransitionLabel.complete(order.serial))
            elif kind is ActivityKind.DECISION and outcome == REJECT_OUTCOME:
                labels.append(TransitionLabel.business_reject(order.serial, activity_id))
            else:
                labels.append(TransitionLabel.step(order.serial, activity_id, outcome))
        return labels

    def apply(self, state: GlobalState, label: TransitionLabel) -> GlobalState:
        return self.transition(state, label)[0]

    def transition(self, state: GlobalState, label: TransitionLabel,
                   check: bool = True) -> Tuple[GlobalState, Emitted]:
        """
        Sucesor determinista de `state` por `label` y las etiquetas que la acción emite
        de forma atómica (AbortOrder, Suspend, Resume).
        """
        if check and label not in self.enabled(state):
            raise LabelNotEnabledError(label, state.digest)
        kind = label.kind
        if kind is LabelKind.ACCEPT:
            return self._accept(state, label), ()
        if kind in (LabelKind.STEP, LabelKind.BUSINESS_REJECT, LabelKind.COMPLETE):
            return self._order_step(state, label), ()
        if kind is LabelKind.START_RECONFIG:
            return self._start_reconfig(state)
        if kind is LabelKind.RECONFIG_STEP:
            mode = EngineMode(Phase.RECONFIGURING, state.mode.steps_remaining - 1)
            return replace(state, mode=mode), ()
        if kind is LabelKind.COMPLETE_RECONFIG:
            return self._complete_reconfig(state)
        raise LabelNotEnabledError(label, state.digest)

    def _accept(self, state: GlobalState, label: TransitionLabel) -> GlobalState:
        cfg = self.spec.configuration(label.config)
        order = Order(
            serial=label.order,
            accepted_under=cfg.id,
            accepted_after_start=state.phase is not Phase.RUNNING_OLD,
            tokens=TokenGame.initial_marking(cfg),
        )
        return replace(
            state,
            orders=state.orders + (order,),
            arrivals_remaining=state.arrivals_remaining - 1,
            next_order_serial=state.next_order_serial + 1,
        )

    def _order_step(self, state: GlobalState, label: TransitionLabel) -> GlobalState:
        order = state.order(label.order)
        cfg = self.spec.configuration(order.accepted_under)
        if label.kind is LabelKind.COMPLETE:
            activity_id = order.tokens[0]
            outcome = None
        else:
            activity_id = label.activity
            outcome = REJECT_OUTCOME if label.kind is LabelKind.BUSINESS_REJECT else (label.outcome or None)
        tokens = TokenGame.fire(cfg, order.tokens, activity_id, outcome)
        advanced = order.advance(tokens, activity_id)

        if label.kind is not LabelKind.COMPLETE:
            orders = tuple(advanced if o.serial == order.serial else o for o in state.orders)
            return replace(state, orders=orders)

        orders = tuple(o for o in state.orders if o.serial != order.serial)
        flags = state.flags
        required = self.spec.new if order.accepted_after_start else self.spec.old
        if not conforms(advanced.trace, required):
            logger.debug("Pedido %s no conforme con %s: %s", order.serial, required.id, advanced.trace)
            if order.accepted_after_start:
                flags = replace(flags, new_nonconforming=True)
            else:
                flags = replace(flags, old_nonconforming=True)
        return replace(state, orders=orders, flags=flags)

    def _start_reconfig(self, state: GlobalState) -> Tuple[GlobalState, Emitted]:
        serials = [order.serial for order in state.orders]
        if self.variant is StrategyVariant.ABORT:
            emitted = tuple(TransitionLabel.of_order(LabelKind.ABORT_ORDER, s) for s in serials)
            flags = replace(state.flags, forced_rejection_seen=True) if serials else state.flags
            return replace(state, mode=EngineMode(Phase.RUNNING_NEW), orders=(), flags=flags), emitted

        mode = EngineMode(Phase.RECONFIGURING, self.scenario.strategy.reconfig_steps)
        if self.variant is StrategyVariant.SUSPEND_RESUME:
            emitted = tuple(TransitionLabel.of_order(LabelKind.SUSPEND, s) for s in serials)
            orders = tuple(replace(order, suspended=True) for order in state.orders)
            return replace(state, mode=mode, orders=orders), emitted
        return replace(state, mode=mode), ()

    def _complete_reconfig(self, state: GlobalState) -> Tuple[GlobalState, Emitted]:
        resumed = tuple(
            TransitionLabel.of_order(LabelKind.RESUME, order.serial)
            for order in state.orders if order.suspended
        )
        orders = tuple(replace(order, suspended=False) for order in state.orders)
        return replace(state, mode=EngineMode(Phase.RUNNING_NEW), orders=orders), resumed


def initial_state(spec: WorkflowSpec, scenario: Scenario) -> GlobalState:
    return ReconfigurationEngine(spec, scenario).initial_state()


def enabled(state: GlobalState, spec: WorkflowSpec, scenario: Scenario) -> List[TransitionLabel]:
    return ReconfigurationEngine(spec, scenario).enabled(state)


def apply(state: GlobalState, label: TransitionLabel, spec: WorkflowSpec, scenario: Scenario) -> GlobalState:
    return ReconfigurationEngine(spec, scenario).apply(state, label)
