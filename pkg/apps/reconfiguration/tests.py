import re

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from apps.casestudy.services import workflow_spec
from apps.workflows.exceptions import InvalidConfigurationError
from apps.workflows.models import Activity, ActivityKind, Configuration, WorkflowSpec

from .exceptions import InvalidScenarioError, LabelNotEnabledError, ScriptIndexError
from .models import (
    COMPLETE_RECONFIG,
    RECONFIG_STEP,
    START_RECONFIG,
    LabelKind,
    Phase,
    ReconfigTrigger,
    ReconfigurationStrategy,
    Scenario,
    StrategyVariant,
    TransitionLabel,
    TriggerKind,
)
from .serializers import ScenarioSerializer
from .services import RandomPolicy, ReconfigurationEngine, ScriptPolicy, Simulator, apply, enabled, initial_state, run

ABORT = StrategyVariant.ABORT
SUSPEND = StrategyVariant.SUSPEND_RESUME
OVERLAP = StrategyVariant.OVERLAP


def make_engine(variant: StrategyVariant, budget: int, steps: int = 0,
                trigger: ReconfigTrigger = ReconfigTrigger()) -> ReconfigurationEngine:
    scenario = Scenario(budget, ReconfigurationStrategy(variant, steps), trigger)
    return ReconfigurationEngine(workflow_spec(), scenario)


def walk(engine, state, *labels):
    for label in labels:
        state = engine.apply(state, label)
    return state


class InitialStateTests(SimpleTestCase):

    def test_budget_zero_has_no_accept(self):
        engine = make_engine(OVERLAP, 0, 2)
        state = engine.initial_state()
        self.assertFalse(any(label.kind is LabelKind.ACCEPT for label in engine.enabled(state)))

    def test_budget_three(self):
        state = initial_state(workflow_spec(), Scenario(3, ReconfigurationStrategy(OVERLAP, 2)))
        self.assertEqual(state.arrivals_remaining, 3)
        self.assertEqual(state.next_order_serial, 0)
        self.assertEqual(state.phase, Phase.RUNNING_OLD)
        self.assertEqual(state.orders, ())
        self.assertFalse(state.flags.forced_rejection_seen)
        self.assertFalse(state.flags.conformance_violation_seen)

    def test_invalid_scenarios(self):
        with self.assertRaises(InvalidScenarioError):
            make_engine(ABORT, 1, 2)
        with self.assertRaises(InvalidScenarioError):
            make_engine(OVERLAP, 2, 2, ReconfigTrigger(TriggerKind.AFTER_N_ACCEPTS, 3))

    def test_invalid_configuration(self):
        broken = Configuration('C9', 'A', (Activity('A', ActivityKind.TASK, ('A',)),))
        spec = WorkflowSpec(old=workflow_spec().old, new=broken)
        with self.assertRaises(InvalidConfigurationError):
            ReconfigurationEngine(spec, Scenario(1, ReconfigurationStrategy(OVERLAP, 1)))


class EnabledTests(SimpleTestCase):

    def test_only_start_reconfig_without_work(self):
        for variant, steps in ((ABORT, 0), (SUSPEND, 2), (OVERLAP, 2)):
            engine = make_engine(variant, 0, steps)
            self.assertEqual(engine.enabled(engine.initial_state()), [START_RECONFIG])

    def test_suspend_window_only_allows_reconfig_steps(self):
        engine = make_engine(SUSPEND, 2, 2)
        state = walk(engine, engine.initial_state(),
                     TransitionLabel.accept(0, 'C1'),
                     TransitionLabel.step(0, 'OrderReceipt'),
                     START_RECONFIG)
        self.assertEqual(state.mode.steps_remaining, 2)
        self.assertTrue(state.order(0).suspended)
        self.assertEqual(engine.enabled(state), [RECONFIG_STEP])

    def test_overlap_runs_old_orders_with_new_arrivals(self):
        engine = make_engine(OVERLAP, 2, 2)
        state = walk(engine, engine.initial_state(),
                     TransitionLabel.accept(0, 'C1'),
                     TransitionLabel.step(0, 'OrderReceipt'),
                     START_RECONFIG)
        labels = engine.enabled(state)
        self.assertIn(TransitionLabel.step(0, 'Evaluation', 'accept'), labels)
        self.assertIn(TransitionLabel.business_reject(0, 'Evaluation'), labels)
        self.assertIn(TransitionLabel.accept(1, 'C2'), labels)
        self.assertIn(RECONFIG_STEP, labels)
        self.assertEqual(labels, sorted(labels))

    def test_overlap_completion_waits_for_old_orders(self):
        engine = make_engine(OVERLAP, 1, 0)
        state = walk(engine, engine.initial_state(), TransitionLabel.accept(0, 'C1'), START_RECONFIG)
        self.assertNotIn(COMPLETE_RECONFIG, engine.enabled(state))
        state = walk(engine, state,
                     TransitionLabel.step(0, 'OrderReceipt'),
                     TransitionLabel.business_reject(0, 'Evaluation'),
                     TransitionLabel.complete(0))
        self.assertEqual(engine.enabled(state), [COMPLETE_RECONFIG])

    def test_after_n_accepts_holds_back_arrivals(self):
        engine = make_engine(ABORT, 2, 0, ReconfigTrigger(TriggerKind.AFTER_N_ACCEPTS, 1))
        self.assertEqual(engine.enabled(engine.initial_state()), [TransitionLabel.accept(0, 'C1')])
        state = walk(engine, engine.initial_state(), TransitionLabel.accept(0, 'C1'))
        labels = engine.enabled(state)
        self.assertIn(START_RECONFIG, labels)
        self.assertFalse(any(label.kind is LabelKind.ACCEPT for label in labels))

    def test_module_level_functions(self):
        spec = workflow_spec()
        scenario = Scenario(1, ReconfigurationStrategy(OVERLAP, 1))
        state = initial_state(spec, scenario)
        label = enabled(state, spec, scenario)[0]
        self.assertEqual(label, TransitionLabel.accept(0, 'C1'))
        self.assertEqual(apply(state, label, spec, scenario).arrivals_remaining, 0)


class ApplyTests(SimpleTestCase):

    def test_accept_decrements_arrivals(self):
        engine = make_engine(OVERLAP, 2, 1)
        state = engine.apply(engine.initial_state(), TransitionLabel.accept(0, 'C1'))
        self.assertEqual(state.arrivals_remaining, 1)
        self.assertEqual(state.next_order_serial, 1)
        self.assertEqual(state.order(0).tokens, ('OrderReceipt',))
        self.assertFalse(state.order(0).accepted_after_start)

    def test_abort_switches_in_one_step(self):
        engine = make_engine(ABORT, 1, 0, ReconfigTrigger(TriggerKind.AFTER_N_ACCEPTS, 1))
        state = engine.apply(engine.initial_state(), TransitionLabel.accept(0, 'C1'))
        successor, emitted = engine.transition(state, START_RECONFIG)
        self.assertEqual(successor.phase, Phase.RUNNING_NEW)
        self.assertEqual(successor.orders, ())
        self.assertTrue(successor.flags.forced_rejection_seen)
        self.assertEqual(emitted, (TransitionLabel.of_order(LabelKind.ABORT_ORDER, 0),))

    def test_independent_steps_commute(self):
        engine = make_engine(OVERLAP, 2, 1)
        state = walk(engine, engine.initial_state(),
                     TransitionLabel.accept(0, 'C1'), START_RECONFIG, TransitionLabel.accept(1, 'C2'))
        a = TransitionLabel.step(0, 'OrderReceipt')
        b = TransitionLabel.step(1, 'OrderReceipt')
        self.assertEqual(walk(engine, state, a, b), walk(engine, state, b, a))

    def test_label_not_enabled(self):
        engine = make_engine(OVERLAP, 1, 1)
        with self.assertRaises(LabelNotEnabledError):
            engine.apply(engine.initial_state(), RECONFIG_STEP)

    def test_suspended_orders_resume_on_old_graph(self):
        engine = make_engine(SUSPEND, 1, 1)
        state = walk(engine, engine.initial_state(), TransitionLabel.accept(0, 'C1'), START_RECONFIG, RECONFIG_STEP)
        state, emitted = engine.transition(state, COMPLETE_RECONFIG)
        self.assertEqual(emitted, (TransitionLabel.of_order(LabelKind.RESUME, 0),))
        self.assertFalse(state.order(0).suspended)
        self.assertEqual(state.order(0).accepted_under, 'C1')
        self.assertIn(TransitionLabel.step(0, 'OrderReceipt'), engine.enabled(state))

    def test_complete_evaluates_conformance(self):
        engine = make_engine(OVERLAP, 1, 0)
        state = walk(engine, engine.initial_state(),
                     TransitionLabel.accept(0, 'C1'),
                     TransitionLabel.step(0, 'OrderReceipt'),
                     TransitionLabel.step(0, 'Evaluation', 'accept'),
                     TransitionLabel.step(0, 'Shipping'),
                     TransitionLabel.step(0, 'Billing'),
                     TransitionLabel.step(0, 'Archiving'),
                     TransitionLabel.complete(0))
        self.assertEqual(state.orders, ())
        self.assertFalse(state.flags.conformance_violation_seen)


class SimulationTests(SimpleTestCase):

    def test_budget_zero_is_a_forced_chain(self):
        for steps in range(4):
            engine = make_engine(SUSPEND, 0, steps)
            trace = Simulator.simulate(engine, RandomPolicy(7)).trace
            expected = [START_RECONFIG] + [RECONFIG_STEP] * steps + [COMPLETE_RECONFIG]
            self.assertEqual(list(trace.labels), expected)

    def test_same_seed_same_trace(self):
        scenario = Scenario(2, ReconfigurationStrategy(OVERLAP, 2))
        first = run(workflow_spec(), scenario, RandomPolicy(42))
        second = run(workflow_spec(), scenario, RandomPolicy(42))
        self.assertEqual(first.lines(), second.lines())

    def test_line_format(self):
        engine = make_engine(OVERLAP, 2, 2)
        for line in Simulator.simulate(engine, RandomPolicy(3)).trace.lines():
            self.assertRegex(line, re.compile(r'^\d+ \S+ [0-9a-f]{16}$'))

    def test_script_policy(self):
        engine = make_engine(SUSPEND, 0, 1)
        trace = Simulator.simulate(engine, ScriptPolicy([0, 0])).trace
        self.assertEqual(len(trace), 3)
        with self.assertRaises(ScriptIndexError):
            Simulator.simulate(engine, ScriptPolicy([1]))

    def test_random_runs_finish_after_reconfiguration(self):
        engine = make_engine(OVERLAP, 2, 2)
        for seed in range(1000):
            final = Simulator.simulate(engine, RandomPolicy(seed)).final_state
            self.assertEqual(final.phase, Phase.RUNNING_NEW)

    @settings(max_examples=150, deadline=None)
    @given(
        variant=st.sampled_from([ABORT, SUSPEND, OVERLAP]),
        budget=st.integers(min_value=0, max_value=3),
        steps=st.integers(min_value=0, max_value=2),
        seed=st.integers(min_value=0, max_value=2 ** 32),
    )
    def test_execution_invariants(self, variant, budget, steps, seed):
        engine = make_engine(variant, budget, 0 if variant is ABORT else steps)
        trace = Simulator.simulate(engine, RandomPolicy(seed)).trace
        state = engine.initial_state()
        started = False
        for step in trace.steps:
            successor = engine.apply(state, step.label)
            self.assertEqual(successor.digest, step.digest)
            # la fase nunca retrocede
            self.assertGreaterEqual(successor.phase, state.phase)
            # las marcas son monótonas
            for name in ('forced_rejection_seen', 'old_nonconforming', 'new_nonconforming'):
                self.assertGreaterEqual(getattr(successor.flags, name), getattr(state.flags, name))
            # sin desalojo: solo el pedido nombrado por la etiqueta cambia sus tokens
            for order in state.orders:
                after = successor.order(order.serial)
                if order.serial != step.label.order and after is not None:
                    self.assertEqual(after.tokens, order.tokens)
                    self.assertEqual(after.trace, order.trace)
            if step.label.kind is LabelKind.ACCEPT:
                accepted = successor.order(step.label.order)
                self.assertEqual(accepted.accepted_under, 'C2' if started else 'C1')
            if step.label == START_RECONFIG:
                started = True
            if successor.phase is Phase.RUNNING_OLD:
                self.assertTrue(all(o.accepted_under == 'C1' for o in successor.orders))
            state = successor
        self.assertEqual(engine.enabled(state), [])


class LabelTests(SimpleTestCase):

    def test_rendering(self):
        self.assertEqual(str(TransitionLabel.accept(0, 'C1')), 'Accept(0,C1)')
        self.assertEqual(str(TransitionLabel.step(1, 'Evaluation', 'accept')), 'Step(1,Evaluation,accept)')
        self.assertEqual(str(TransitionLabel.business_reject(1, 'Evaluation')), 'BusinessReject(1,Evaluation)')
        self.assertEqual(str(TransitionLabel.complete(2)), 'Complete(2)')
        self.assertEqual(str(START_RECONFIG), 'StartReconfig')
        self.assertEqual(str(TransitionLabel.of_order(LabelKind.ABORT_ORDER, 0)), 'AbortOrder(0)')

    def test_total_order(self):
        labels = [COMPLETE_RECONFIG, TransitionLabel.step(1, 'A'), TransitionLabel.accept(3, 'C2'),
                  TransitionLabel.step(0, 'B'), START_RECONFIG]
        self.assertEqual(sorted(labels)[0], TransitionLabel.accept(3, 'C2'))
        self.assertEqual(sorted(labels)[1], TransitionLabel.step(0, 'B'))
        self.assertEqual(sorted(labels)[-1], COMPLETE_RECONFIG)


class ScenarioSerializerTests(SimpleTestCase):

    def test_parses_document(self):
        serializer = ScenarioSerializer(data={
            'arrival_budget': 2,
            'strategy': {'variant': 'Abort', 'reconfig_steps': 0},
            'reconfig_trigger': 'AfterNAccepts(1)',
        })
        self.assertTrue(serializer.is_valid(), serializer.errors)
        scenario = serializer.save()
        self.assertEqual(scenario.reconfig_trigger, ReconfigTrigger(TriggerKind.AFTER_N_ACCEPTS, 1))
        self.assertEqual(scenario.strategy, ReconfigurationStrategy(ABORT, 0))

    def test_rejects_abort_with_duration(self):
        serializer = ScenarioSerializer(data={
            'arrival_budget': 1,
            'strategy': {'variant': 'Abort', 'reconfig_steps': 3},
        })
        self.assertFalse(serializer.is_valid())

    def test_rejects_unknown_trigger(self):
        serializer = ScenarioSerializer(data={
            'arrival_budget': 1,
            'strategy': {'variant': 'Overlap', 'reconfig_steps': 1},
            'reconfig_trigger': 'Sometimes',
        })
        self.assertFalse(serializer.is_valid())
        self.assertIn('reconfig_trigger', serializer.errors)
