import itertools

from django.test import SimpleTestCase

from apps.casestudy.services import scenario, workflow_spec
from apps.reconfiguration.models import (
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
from apps.reconfiguration.services import RandomPolicy, ReconfigurationEngine, Simulator

from .exceptions import StateBudgetExceeded
from .models import DEFAULT_PROPERTIES, PropertyId
from .serializers import CheckReportSerializer
from .services import PropertyChecker, check, explore, iter_maximal_paths, oracle_verdicts, shortest_counterexample
from .services.export import graphviz, report_lines
from .services.oracle import SAFETY, path_violations

ABORT = StrategyVariant.ABORT
SUSPEND = StrategyVariant.SUSPEND_RESUME
OVERLAP = StrategyVariant.OVERLAP

ORDER_KINDS = (LabelKind.STEP, LabelKind.BUSINESS_REJECT, LabelKind.COMPLETE)


def make_engine(variant, budget, steps=0, trigger=ReconfigTrigger()):
    return ReconfigurationEngine(workflow_spec(), Scenario(budget, ReconfigurationStrategy(variant, steps), trigger))


def builtin_engine(name):
    return ReconfigurationEngine(workflow_spec(), scenario(name))


def small_scenarios():
    for variant, budget in itertools.product((ABORT, SUSPEND, OVERLAP), (0, 1, 2)):
        for steps in ((0,) if variant is ABORT else (0, 1, 2)):
            strategy = ReconfigurationStrategy(variant, steps)
            yield Scenario(budget, strategy)
            if budget >= 1:
                yield Scenario(budget, strategy, ReconfigTrigger(TriggerKind.AFTER_N_ACCEPTS, 1))


class FaultyEngine(ReconfigurationEngine):
    """
    Acepta con la configuración antigua los pedidos que deberían ir por la nueva
    """

    def acceptance_config(self, state):
        config_id = super().acceptance_config(state)
        return self.spec.old.id if config_id == self.spec.new.id else config_id


class StalledReconfigEngine(ReconfigurationEngine):
    """
    ReconfigStep no descuenta pasos: la reconfiguración nunca termina
    """

    def transition(self, state, label, check=True):
        successor, emitted = super().transition(state, label, check)
        if label.kind is LabelKind.RECONFIG_STEP:
            return state, emitted
        return successor, emitted


class NeverCompletingEngine(ReconfigurationEngine):
    """
    CompleteReconfig nunca se habilita
    """

    def enabled(self, state):
        return [label for label in super().enabled(state) if label != COMPLETE_RECONFIG]


class ExplorationTests(SimpleTestCase):

    def test_budget_zero_chain(self):
        lts = explore(make_engine(SUSPEND, 0, 2))
        self.assertEqual(lts.stats.states, 5)
        self.assertEqual(lts.stats.transitions, 4)
        self.assertTrue(lts.stats.acyclic)
        self.assertEqual(lts.stats.max_depth, 4)
        self.assertEqual(lts.terminal_indices, [4])

    def test_exploration_is_deterministic(self):
        first = explore(builtin_engine('overlap'))
        second = explore(builtin_engine('overlap'))
        self.assertEqual(first.stats, second.stats)
        self.assertEqual([s.digest for s in first.states], [s.digest for s in second.states])
        self.assertEqual(first.edges, second.edges)

    def test_state_budget(self):
        with self.assertRaises(StateBudgetExceeded) as ctx:
            explore(builtin_engine('overlap'), max_states=3)
        self.assertEqual(ctx.exception.max_states, 3)
        # el límite es inclusivo
        self.assertEqual(explore(make_engine(SUSPEND, 0, 2), max_states=5).stats.states, 5)

    def test_suspend_never_steps_orders_while_reconfiguring(self):
        lts = explore(builtin_engine('suspend'))
        for edge in lts.edges:
            if lts.states[edge.source].phase is Phase.RECONFIGURING:
                self.assertNotIn(edge.label.kind, ORDER_KINDS + (LabelKind.ACCEPT,))

    def test_overlap_runs_both_configurations_at_once(self):
        lts = explore(builtin_engine('overlap'))
        index = lts.find_state(lambda s: {o.accepted_under for o in s.orders} == {'C1', 'C2'})
        self.assertIsNotNone(index)
        self.assertEqual(lts.states[index].phase, Phase.RECONFIGURING)

    def test_random_runs_end_in_terminal_states(self):
        for name in ('abort', 'suspend', 'overlap'):
            engine = builtin_engine(name)
            lts = explore(engine)
            reachable = {state.digest for state in lts.states}
            terminal = {lts.states[index].digest for index in lts.terminal_indices}
            for seed in range(1000):
                trace = Simulator.simulate(engine, RandomPolicy(seed)).trace
                self.assertTrue({step.digest for step in trace.steps} <= reachable)
                self.assertIn(trace.final_digest, terminal)


class PropertyCheckerTests(SimpleTestCase):

    def test_builtin_verdicts(self):
        expected = {
            'abort': {PropertyId.R1: False, PropertyId.R2: True, PropertyId.R3: True,
                      PropertyId.R4: True, PropertyId.DEADLOCK_FREE: True, PropertyId.R1_WEAK: True},
            'suspend': dict.fromkeys(list(DEFAULT_PROPERTIES) + [PropertyId.R1_WEAK], True),
            'overlap': dict.fromkeys(list(DEFAULT_PROPERTIES) + [PropertyId.R1_WEAK], True),
        }
        for name, verdicts in expected.items():
            checker = PropertyChecker(explore(builtin_engine(name)))
            for prop, holds in verdicts.items():
                report = checker.check(prop)
                self.assertEqual(report.holds, holds, (name, prop))
                self.assertEqual(report.counterexample is None, holds)

    def test_abort_counterexample_is_minimal(self):
        report = check(workflow_spec(), scenario('abort'), PropertyId.R1)
        self.assertFalse(report.holds)
        trace = report.counterexample
        self.assertEqual(list(trace.labels), [TransitionLabel.accept(0, 'C1'), TransitionLabel(LabelKind.START_RECONFIG)])
        self.assertEqual([str(label) for label in trace.flat_labels()],
                         ['Accept(0,C1)', 'StartReconfig', 'AbortOrder(0)'])

    def test_abort_with_single_arrival(self):
        engine = make_engine(ABORT, 1, 0, ReconfigTrigger(TriggerKind.AFTER_N_ACCEPTS, 1))
        report = PropertyChecker(explore(engine)).check(PropertyId.R1)
        self.assertFalse(report.holds)
        self.assertEqual(report.counterexample.flat_labels()[-1], TransitionLabel.of_order(LabelKind.ABORT_ORDER, 0))

    def test_counterexamples_replay(self):
        engine = builtin_engine('abort')
        report = PropertyChecker(explore(engine)).check(PropertyId.R1)
        state, replayed = Simulator.replay(engine, report.counterexample.labels)
        self.assertEqual(replayed, report.counterexample)
        self.assertTrue(state.flags.forced_rejection_seen)

    def test_budget_zero_preserves_conformance(self):
        for variant, steps in ((ABORT, 0), (SUSPEND, 1), (OVERLAP, 2)):
            checker = PropertyChecker(explore(make_engine(variant, 0, steps)))
            self.assertTrue(checker.check(PropertyId.R2).holds)
            self.assertTrue(checker.check(PropertyId.R3).holds)
            self.assertTrue(checker.check(PropertyId.R1).holds)

    def test_termination_up_to_three_arrivals(self):
        for variant, budget in itertools.product((SUSPEND, OVERLAP), (0, 1, 2, 3)):
            checker = PropertyChecker(explore(make_engine(variant, budget, 1)))
            self.assertTrue(checker.check(PropertyId.R4).holds, (variant, budget))
            self.assertTrue(checker.check(PropertyId.DEADLOCK_FREE).holds, (variant, budget))

    def test_wrong_acceptance_configuration_breaks_r3(self):
        engine = FaultyEngine(workflow_spec(), Scenario(1, ReconfigurationStrategy(OVERLAP, 0)))
        checker = PropertyChecker(explore(engine))
        report = checker.check(PropertyId.R3)
        self.assertFalse(report.holds)
        self.assertTrue(checker.check(PropertyId.R2).holds)
        state, _ = Simulator.replay(engine, report.counterexample.labels)
        self.assertTrue(state.flags.new_nonconforming)
        self.assertEqual(report.counterexample.labels[0], TransitionLabel(LabelKind.START_RECONFIG))

    def test_property_parsing(self):
        self.assertIs(PropertyId.parse('deadlock'), PropertyId.DEADLOCK_FREE)
        self.assertIs(PropertyId.parse(' r1-weak '), PropertyId.R1_WEAK)
        with self.assertRaises(ValueError):
            PropertyId.parse('R5')


class ShortestCounterexampleTests(SimpleTestCase):

    def test_label_predicate(self):
        lts = explore(builtin_engine('abort'))
        trace = shortest_counterexample(lts, label_predicate=lambda label: label.kind is LabelKind.ABORT_ORDER)
        self.assertEqual(len(trace), 2)
        self.assertEqual(str(trace.flat_labels()[-1]), 'AbortOrder(0)')

    def test_unreachable_predicate(self):
        lts = explore(builtin_engine('overlap'))
        self.assertIsNone(shortest_counterexample(lts, state_predicate=lambda s: s.flags.forced_rejection_seen))
        self.assertIsNone(shortest_counterexample(lts, label_predicate=lambda label: label.kind is LabelKind.SUSPEND))

    def test_initial_state_match_is_empty_trace(self):
        lts = explore(builtin_engine('overlap'))
        trace = shortest_counterexample(lts, state_predicate=lambda s: s.phase is Phase.RUNNING_OLD)
        self.assertEqual(len(trace), 0)
        self.assertEqual(trace.final_digest, lts.states[0].digest)

    def test_requires_a_predicate(self):
        with self.assertRaises(ValueError):
            shortest_counterexample(explore(make_engine(ABORT, 0)))


class OracleTests(SimpleTestCase):

    def test_checker_agrees_with_path_oracle(self):
        for scn in small_scenarios():
            engine = ReconfigurationEngine(workflow_spec(), scn)
            checker = PropertyChecker(explore(engine))
            verdicts = oracle_verdicts(engine)
            for prop in SAFETY + (PropertyId.R1_WEAK,):
                self.assertEqual(checker.check(prop).holds, verdicts.holds[prop], (scn, prop))

    def test_oracle_agrees_with_explicit_path_enumeration(self):
        for variant, steps in ((ABORT, 0), (SUSPEND, 1), (OVERLAP, 1)):
            engine = make_engine(variant, 1, steps)
            paths = list(iter_maximal_paths(engine))
            verdicts = oracle_verdicts(engine)
            self.assertEqual(len(paths), verdicts.maximal_paths)
            violated = set().union(*(path_violations(states) for _, states in paths))
            for prop in SAFETY:
                self.assertEqual(verdicts.holds[prop], prop not in violated, (variant, prop))
            clean = any(not states[-1].flags.forced_rejection_seen for _, states in paths)
            self.assertEqual(verdicts.holds[PropertyId.R1_WEAK], clean)


class ExportTests(SimpleTestCase):

    def test_dot_has_one_node_per_state(self):
        lts = explore(builtin_engine('suspend'))
        lines = list(graphviz(lts))
        self.assertEqual(lines[0], 'digraph "lts" {\n')
        self.assertEqual(sum(1 for line in lines if ' [shape=' in line), lts.stats.states)
        self.assertEqual(sum(1 for line in lines if ' -> ' in line), lts.stats.transitions)
        self.assertEqual(sum(1 for line in lines if 'doubleoctagon' in line), 1)

    def test_text_report(self):
        report = check(workflow_spec(), scenario('abort'), PropertyId.R1)
        lines = report_lines(report)
        self.assertEqual(lines[0], f"R1 FAILS states={report.stats.states} transitions={report.stats.transitions}")
        self.assertEqual(lines[1], '  counterexample: Accept(0,C1) StartReconfig AbortOrder(0)')
        verbose = report_lines(report, verbose=True)
        self.assertEqual(len(verbose), 4)
        self.assertTrue(verbose[-1].startswith('    1 StartReconfig;AbortOrder(0) '))

    def test_json_report(self):
        report = check(workflow_spec(), scenario('abort'), PropertyId.R1)
        data = CheckReportSerializer(report).data
        self.assertEqual(data['property'], 'R1')
        self.assertFalse(data['holds'])
        self.assertEqual(data['counterexample'], ['Accept(0,C1)', 'StartReconfig', 'AbortOrder(0)'])
        self.assertEqual(data['stats']['states'], report.stats.states)
        passing = CheckReportSerializer(check(workflow_spec(), scenario('abort'), PropertyId.R2)).data
        self.assertIsNone(passing['counterexample'])


class TerminationFailureTests(SimpleTestCase):

    def assertAgreesWithOracle(self, engine, checker):
        verdicts = oracle_verdicts(engine)
        for prop in SAFETY + (PropertyId.R1_WEAK,):
            self.assertEqual(checker.check(prop).holds, verdicts.holds[prop], prop)

    def test_stalled_reconfiguration_is_a_cycle(self):
        engine = StalledReconfigEngine(workflow_spec(), Scenario(1, ReconfigurationStrategy(OVERLAP, 1)))
        lts = explore(engine)
        checker = PropertyChecker(lts)
        self.assertFalse(lts.stats.acyclic)
        self.assertEqual(lts.terminal_indices, [])

        report = checker.check(PropertyId.R4)
        self.assertFalse(report.holds)
        self.assertEqual(list(report.counterexample.labels), [START_RECONFIG])
        state, replayed = Simulator.replay(engine, report.counterexample.labels)
        self.assertEqual(replayed, report.counterexample)
        self.assertEqual(engine.apply(state, RECONFIG_STEP), state)

        # ninguna ejecución termina, tampoco sin rechazos forzados
        self.assertFalse(checker.check(PropertyId.R1_WEAK).holds)
        self.assertTrue(checker.check(PropertyId.R1).holds)
        self.assertAgreesWithOracle(engine, checker)

    def test_unfinished_reconfiguration_deadlocks(self):
        engine = NeverCompletingEngine(workflow_spec(), Scenario(1, ReconfigurationStrategy(SUSPEND, 1)))
        lts = explore(engine)
        checker = PropertyChecker(lts)
        self.assertTrue(lts.stats.acyclic)

        report = checker.check(PropertyId.R4)
        self.assertFalse(report.holds)
        self.assertEqual(list(report.counterexample.labels), [START_RECONFIG, RECONFIG_STEP])
        state, _ = Simulator.replay(engine, report.counterexample.labels)
        self.assertEqual(state.phase, Phase.RECONFIGURING)
        self.assertEqual(engine.enabled(state), [])

        self.assertFalse(checker.check(PropertyId.DEADLOCK_FREE).holds)
        self.assertTrue(checker.check(PropertyId.R1_WEAK).holds)
        self.assertAgreesWithOracle(engine, checker)
