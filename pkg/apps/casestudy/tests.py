import json

from django.test import SimpleTestCase

from apps.reconfiguration.serializers import ScenarioSerializer
from apps.verification.models import PropertyId
from apps.verification.services import check
from apps.workflows.models import Trace
from apps.workflows.serializers import WorkflowSpecSerializer
from apps.workflows.services import conforms, enumerate_traces, validate_configuration

from .services import SCENARIO_FIXTURES_DIR, WORKFLOW_FIXTURE, config1, config2, default_scenarios, workflow_spec

REJECTED = ['OrderReceipt', 'Evaluation', 'Close']


class CaseStudyWorkflowTests(SimpleTestCase):

    def test_configurations_are_valid(self):
        self.assertEqual(validate_configuration(config1()), [])
        self.assertEqual(validate_configuration(config2()), [])

    def test_old_configuration_ships_before_billing(self):
        self.assertTrue(conforms(['OrderReceipt', 'Evaluation', 'Shipping', 'Billing', 'Archiving', 'Close'],
                                 config1()))
        self.assertFalse(conforms(['OrderReceipt', 'Evaluation', 'Billing', 'Shipping', 'Archiving', 'Close'],
                                  config1()))

    def test_new_configuration_interleaves_shipping_and_notification(self):
        prefix = ['OrderReceipt', 'Evaluation', 'Billing']
        suffix = ['Archiving', 'Close']
        self.assertTrue(conforms(prefix + ['Shipping', 'NotifyCustomer'] + suffix, config2()))
        self.assertTrue(conforms(prefix + ['NotifyCustomer', 'Shipping'] + suffix, config2()))
        self.assertFalse(conforms(prefix + ['Shipping'] + suffix, config2()))

    def test_rejected_orders_conform_to_both(self):
        self.assertTrue(conforms(REJECTED, config1()))
        self.assertTrue(conforms(REJECTED, config2()))

    def test_languages_only_share_the_reject_path(self):
        shared = set(enumerate_traces(config1(), 12)) & set(enumerate_traces(config2(), 12))
        self.assertEqual(shared, {Trace(tuple(REJECTED))})

    def test_language_sizes(self):
        self.assertEqual(len(enumerate_traces(config1(), 12)), 2)
        self.assertEqual(len(enumerate_traces(config2(), 12)), 3)


class FixtureTests(SimpleTestCase):

    def test_workflow_fixture_matches_builtin(self):
        text = WORKFLOW_FIXTURE.read_text(encoding='utf-8')
        serializer = WorkflowSpecSerializer(data=json.loads(text))
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save(), workflow_spec())

    def test_workflow_fixture_is_canonical_serialization(self):
        rendered = json.dumps(WorkflowSpecSerializer(workflow_spec()).data, indent=2) + '\n'
        self.assertEqual(rendered, WORKFLOW_FIXTURE.read_text(encoding='utf-8'))

    def test_scenario_fixtures_match_builtins(self):
        for name, scenario in default_scenarios():
            path = SCENARIO_FIXTURES_DIR / f"{name}.json"
            serializer = ScenarioSerializer(data=json.loads(path.read_text(encoding='utf-8')))
            self.assertTrue(serializer.is_valid(), serializer.errors)
            self.assertEqual(serializer.save(), scenario)


class ScenarioVerdictTests(SimpleTestCase):

    def test_only_abort_forces_rejections(self):
        spec = workflow_spec()
        verdicts = {name: check(spec, scenario, PropertyId.R1).holds for name, scenario in default_scenarios()}
        self.assertEqual(verdicts, {'abort': False, 'suspend': True, 'overlap': True})

    def test_every_strategy_terminates(self):
        spec = workflow_spec()
        for name, scenario in default_scenarios():
            self.assertTrue(check(spec, scenario, PropertyId.R4).holds, name)
            self.assertTrue(check(spec, scenario, PropertyId.R2).holds, name)
            self.assertTrue(check(spec, scenario, PropertyId.R3).holds, name)
