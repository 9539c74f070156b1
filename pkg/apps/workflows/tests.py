import itertools

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from apps.casestudy.services import config1, config2

from .exceptions import OutcomeError, UnknownActivityError
from .models import Activity, ActivityKind, Configuration, Trace, ViolationKind
from .serializers import ConfigurationSerializer
from .services import TokenGame, conforms, enumerate_traces, join_arity, successors, validate_configuration

TASK = ActivityKind.TASK
FINAL = ActivityKind.FINAL


def single_final() -> Configuration:
    return Configuration('S', 'Close', (Activity('Close', FINAL),))


def kinds(cfg: Configuration):
    return [(v.kind, v.activity) for v in validate_configuration(cfg)]


class ValidateConfigurationTests(SimpleTestCase):

    def test_minimal_configuration_is_valid(self):
        self.assertEqual(validate_configuration(single_final()), [])

    def test_two_node_cycle_is_reported_once(self):
        cfg = Configuration('X', 'A', (
            Activity('A', TASK, ('B',)),
            Activity('B', ActivityKind.DECISION, ('A', 'Close'), ('loop', 'done')),
            Activity('Close', FINAL),
        ))
        self.assertEqual(kinds(cfg), [(ViolationKind.CYCLE, 'A')])

    def test_case_study_configurations_are_valid(self):
        self.assertEqual(validate_configuration(config1()), [])
        self.assertEqual(validate_configuration(config2()), [])

    def test_unreachable_and_dead_end(self):
        cfg = Configuration('X', 'A', (
            Activity('A', TASK, ('Close',)),
            Activity('Orphan', TASK, ('Close',)),
            Activity('Close', FINAL),
            Activity('Stuck', ActivityKind.JOIN, ('Stuck2',)),
            Activity('Stuck2', TASK, ('Stuck',)),
        ))
        found = kinds(cfg)
        self.assertIn((ViolationKind.UNREACHABLE, 'Orphan'), found)
        self.assertIn((ViolationKind.DEAD_END, 'Stuck'), found)
        self.assertIn((ViolationKind.CYCLE, 'Stuck'), found)

    def test_arity_and_outcomes(self):
        cfg = Configuration('X', 'A', (
            Activity('A', TASK, ('D', 'Close')),
            Activity('D', ActivityKind.DECISION, ('Close', 'Close'), ('ok', 'ok')),
            Activity('F', ActivityKind.FORK, ('Close',)),
            Activity('Close', FINAL, ('A',)),
        ))
        found = kinds(cfg)
        self.assertIn((ViolationKind.BAD_ARITY, 'A'), found)
        self.assertIn((ViolationKind.DUPLICATE_OUTCOME, 'D'), found)
        self.assertIn((ViolationKind.BAD_ARITY, 'F'), found)
        self.assertIn((ViolationKind.BAD_ARITY, 'Close'), found)

    def test_missing_entry_and_unknown_successor(self):
        cfg = Configuration('X', 'Nowhere', (
            Activity('A', TASK, ('Ghost',)),
            Activity('Close', FINAL),
        ))
        found = kinds(cfg)
        self.assertIn((ViolationKind.MISSING_ENTRY, 'Nowhere'), found)
        self.assertIn((ViolationKind.UNKNOWN_SUCCESSOR, 'A'), found)

    def test_fork_branches_sharing_an_activity_are_unbalanced(self):
        cfg = Configuration('X', 'F', (
            Activity('F', ActivityKind.FORK, ('A', 'B')),
            Activity('A', TASK, ('Shared',)),
            Activity('B', TASK, ('Shared',)),
            Activity('Shared', TASK, ('J',)),
            Activity('J', ActivityKind.JOIN, ('Close',)),
            Activity('Close', FINAL),
        ))
        self.assertIn((ViolationKind.UNBALANCED_FORK, 'Shared'), kinds(cfg))

    def test_fork_branch_reaching_final_is_unbalanced(self):
        cfg = Configuration('X', 'F', (
            Activity('F', ActivityKind.FORK, ('A', 'Close')),
            Activity('A', TASK, ('Close',)),
            Activity('Close', FINAL),
        ))
        self.assertIn((ViolationKind.UNBALANCED_FORK, 'F'), kinds(cfg))

    def test_join_without_fork_is_unbalanced(self):
        cfg = Configuration('X', 'A', (
            Activity('A', TASK, ('J',)),
            Activity('J', ActivityKind.JOIN, ('Close',)),
            Activity('Close', FINAL),
        ))
        self.assertEqual(kinds(cfg), [(ViolationKind.UNBALANCED_FORK, 'J')])

    def test_nested_fork_with_decision_inside_branch(self):
        cfg = Configuration('N', 'F', (
            Activity('F', ActivityKind.FORK, ('G', 'D')),
            Activity('G', ActivityKind.FORK, ('A', 'B')),
            Activity('A', TASK, ('JG',)),
            Activity('B', TASK, ('JG',)),
            Activity('JG', ActivityKind.JOIN, ('J',)),
            Activity('D', ActivityKind.DECISION, ('X', 'Y'), ('left', 'right')),
            Activity('X', TASK, ('J',)),
            Activity('Y', TASK, ('J',)),
            Activity('J', ActivityKind.JOIN, ('Close',)),
            Activity('Close', FINAL),
        ))
        self.assertEqual(validate_configuration(cfg), [])
        self.assertEqual(join_arity(cfg), {'JG': 2, 'J': 2})
        traces = enumerate_traces(cfg, 10)
        self.assertTrue(traces)
        for trace in traces:
            self.assertTrue(conforms(trace, cfg))
            self.assertEqual(len(set(trace.steps)), len(trace.steps))


class SuccessorsTests(SimpleTestCase):

    def test_decision_outcome(self):
        self.assertEqual(successors(config1(), 'Evaluation', 'reject'), {'Close'})

    def test_final_has_no_successors(self):
        self.assertEqual(successors(config1(), 'Close'), frozenset())

    def test_fork_enters_every_branch(self):
        self.assertEqual(successors(config2(), 'PayAndShip'), {'Shipping', 'NotifyCustomer'})

    def test_errors(self):
        with self.assertRaises(UnknownActivityError):
            successors(config1(), 'Packing')
        with self.assertRaises(OutcomeError):
            successors(config1(), 'Evaluation')
        with self.assertRaises(OutcomeError):
            successors(config1(), 'Evaluation', 'maybe')
        with self.assertRaises(OutcomeError):
            successors(config1(), 'Shipping', 'accept')


class TokenGameTests(SimpleTestCase):

    def test_join_waits_for_every_branch(self):
        cfg = config2()
        marking = TokenGame.initial_marking(cfg)
        for activity, outcome in [('OrderReceipt', None), ('Evaluation', 'accept'), ('Billing', None)]:
            marking = TokenGame.fire(cfg, marking, activity, outcome)
        self.assertEqual(marking, ('NotifyCustomer', 'Shipping'))
        marking = TokenGame.fire(cfg, marking, 'Shipping')
        self.assertEqual(marking, ('NotifyCustomer', 'Sync'))
        self.assertEqual(TokenGame.moves(cfg, marking), [('NotifyCustomer', None)])
        self.assertEqual(TokenGame.fire(cfg, marking, 'NotifyCustomer'), ('Archiving',))

    def test_join_arity_cache_is_bounded(self):
        for position in range(100):
            join_arity(Configuration(f'X{position}', 'Close', (Activity('Close', FINAL),)))
        info = join_arity.cache_info()
        self.assertIsNotNone(info.maxsize)
        self.assertLessEqual(info.currsize, info.maxsize)


class ConformanceTests(SimpleTestCase):

    def test_empty_trace_never_conforms(self):
        self.assertFalse(conforms([], single_final()))
        self.assertFalse(conforms([], config1()))

    def test_reject_path(self):
        self.assertTrue(conforms(['OrderReceipt', 'Evaluation', 'Close'], config1()))

    def test_routing_activities_are_not_trace_steps(self):
        trace = ['OrderReceipt', 'Evaluation', 'Billing', 'PayAndShip', 'Shipping', 'NotifyCustomer', 'Sync',
                 'Archiving', 'Close']
        self.assertFalse(conforms(trace, config2()))

    def test_enumerate_short_bounds(self):
        self.assertEqual(enumerate_traces(single_final(), 1), [Trace(('Close',))])
        self.assertEqual(enumerate_traces(config1(), 2), [])
        self.assertEqual(enumerate_traces(single_final(), 0), [])
        with self.assertRaises(ValueError):
            enumerate_traces(config1(), -1)

    def test_enumerate_contains_both_paths(self):
        traces = enumerate_traces(config1(), 8)
        self.assertEqual(traces, sorted(traces))
        self.assertIn(Trace(('OrderReceipt', 'Evaluation', 'Close')), traces)
        self.assertIn(Trace(('OrderReceipt', 'Evaluation', 'Shipping', 'Billing', 'Archiving', 'Close')), traces)

    def test_valid_configurations_have_short_complete_runs(self):
        for cfg in (single_final(), config1(), config2()):
            self.assertTrue(enumerate_traces(cfg, 2 * len(cfg.activities)))

    def test_conforms_matches_enumeration_exhaustively(self):
        # todas las palabras sobre el alfabeto visible, hasta largo 8 para C1
        for cfg, bound in ((config1(), 8), (config2(), 6)):
            language = {trace.steps for trace in enumerate_traces(cfg, bound)}
            mismatches = [
                word
                for length in range(bound + 1)
                for word in itertools.product(cfg.visible_activities, repeat=length)
                if conforms(word, cfg) != (word in language)
            ]
            self.assertEqual(mismatches, [], cfg.id)

    @settings(max_examples=300, deadline=None)
    @given(data=st.data())
    def test_conforms_matches_enumeration_up_to_eight(self, data):
        cfg = data.draw(st.sampled_from([config1(), config2()]))
        language = set(enumerate_traces(cfg, 8))
        base = data.draw(st.sampled_from(sorted(language)))
        steps = list(base.steps)
        # mutación: intercambio, borrado o inserción sobre una traza válida
        mutation = data.draw(st.sampled_from(['keep', 'swap', 'drop', 'insert']))
        position = data.draw(st.integers(min_value=0, max_value=len(steps) - 1))
        if mutation == 'swap' and position + 1 < len(steps):
            steps[position], steps[position + 1] = steps[position + 1], steps[position]
        elif mutation == 'drop':
            del steps[position]
        elif mutation == 'insert':
            steps.insert(position, data.draw(st.sampled_from(cfg.visible_activities)))
        self.assertEqual(conforms(steps, cfg), Trace(tuple(steps)) in language)


class ConfigurationSerializerTests(SimpleTestCase):

    def test_decision_requires_outcome_pairs(self):
        serializer = ConfigurationSerializer(data={
            'id': 'X', 'entry': 'D',
            'activities': [
                {'id': 'D', 'kind': 'Decision', 'successors': ['Close']},
                {'id': 'Close', 'kind': 'Final'},
            ],
        })
        self.assertFalse(serializer.is_valid())
        self.assertIn('activities', serializer.errors)

    def test_builds_configuration(self):
        serializer = ConfigurationSerializer(data={
            'id': 'X', 'entry': 'D',
            'activities': [
                {'id': 'D', 'kind': 'Decision', 'successors': {'accept': 'Close', 'reject': 'Close'}},
                {'id': 'Close', 'kind': 'Final', 'successors': []},
            ],
        })
        self.assertTrue(serializer.is_valid(), serializer.errors)
        cfg = serializer.save()
        self.assertEqual(cfg.activity('D').outcomes, ('accept', 'reject'))
        self.assertEqual(validate_configuration(cfg), [])
