import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from .exceptions import ExitCode


class ReconfigCommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, payload):
        path = self.tmp / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding='utf-8')
        return str(path)

    def run_command(self, *args):
        out = StringIO()
        call_command('reconfig', *args, stdout=out)
        return out.getvalue().splitlines()

    def assertExitCode(self, code, *args):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('reconfig', *args, stdout=out)
        self.assertEqual(ctx.exception.returncode, code)
        return out.getvalue().splitlines()


class ValidateCommandTests(ReconfigCommandTestCase):

    def test_builtin_is_valid(self):
        self.assertEqual(self.run_command('validate', 'casestudy'), [])

    def test_reports_violations(self):
        path = self.write('cycle.json', {
            'id': 'X', 'entry': 'A',
            'activities': [
                {'id': 'A', 'kind': 'Task', 'successors': ['B']},
                {'id': 'B', 'kind': 'Decision', 'successors': {'loop': 'A', 'done': 'Close'}},
                {'id': 'Close', 'kind': 'Final'},
            ],
        })
        lines = self.assertExitCode(ExitCode.PROPERTY_VIOLATED, 'validate', path)
        self.assertEqual(lines, ['VIOLATION cycle A'])

    def test_unreadable_documents(self):
        self.assertExitCode(ExitCode.USAGE_ERROR, 'validate', str(self.tmp / 'missing.json'))
        broken = self.write('broken.json', '{"old": ')
        with self.assertRaisesMessage(CommandError, 'línea 1'):
            call_command('reconfig', 'validate', broken, stdout=StringIO())

    def test_schema_errors(self):
        path = self.write('schema.json', {'id': 'X', 'entry': 'A', 'activities': []})
        self.assertExitCode(ExitCode.USAGE_ERROR, 'validate', path)


class SimulateCommandTests(ReconfigCommandTestCase):

    def test_same_seed_same_output(self):
        first = self.run_command('simulate', 'casestudy', '--scenario=overlap', '--seed=11')
        second = self.run_command('simulate', 'casestudy', '--scenario=overlap', '--seed=11')
        self.assertEqual(first, second)
        self.assertTrue(first)
        self.assertTrue(first[-1].startswith(f"{len(first) - 1} "))

    def test_abort_emits_abort_order_for_orders_in_flight(self):
        lines = self.run_command('simulate', 'casestudy', '--scenario=abort', '--script=0,1')
        self.assertTrue(lines[0].startswith('0 Accept(0,C1) '))
        self.assertTrue(lines[1].startswith('1 StartReconfig;AbortOrder(0) '))

    def test_abort_without_orders_in_flight(self):
        lines = self.run_command('simulate', 'casestudy', '--scenario=abort', '--script=0,0,1,0')
        self.assertTrue(lines[2].startswith('2 BusinessReject(0,Evaluation) '))
        self.assertTrue(lines[3].startswith('3 Complete(0) '))
        self.assertRegex(lines[4], r'^4 StartReconfig [0-9a-f]{16}$')
        self.assertFalse(any('AbortOrder' in line for line in lines))

    def test_budget_zero_scenario_file(self):
        path = self.write('idle.json', {
            'arrival_budget': 0,
            'strategy': {'variant': 'SuspendResume', 'reconfig_steps': 2},
        })
        lines = self.run_command('simulate', 'casestudy', f'--scenario={path}')
        self.assertEqual([line.split()[1] for line in lines],
                         ['StartReconfig', 'ReconfigStep', 'ReconfigStep', 'CompleteReconfig'])

    def test_trace_file(self):
        target = self.tmp / 'trace.txt'
        lines = self.run_command('simulate', 'casestudy', '--scenario=suspend', '--seed=3', f'--trace={target}')
        self.assertEqual(lines, [])
        expected = self.run_command('simulate', 'casestudy', '--scenario=suspend', '--seed=3')
        self.assertEqual(target.read_text(encoding='utf-8').splitlines(), expected)

    def test_usage_errors(self):
        self.assertExitCode(ExitCode.USAGE_ERROR, 'simulate', 'casestudy', '--scenario=nightly')
        self.assertExitCode(ExitCode.USAGE_ERROR, 'simulate', 'casestudy', '--scenario=abort', '--script=7')
        self.assertExitCode(ExitCode.USAGE_ERROR, 'simulate', 'casestudy', '--scenario=abort', '--script=a,b')
        invalid = self.write('invalid.json', {
            'arrival_budget': 1,
            'strategy': {'variant': 'Abort', 'reconfig_steps': 2},
        })
        self.assertExitCode(ExitCode.USAGE_ERROR, 'simulate', 'casestudy', f'--scenario={invalid}')


class CheckCommandTests(ReconfigCommandTestCase):

    def test_overlap_holds(self):
        lines = self.run_command('check', 'casestudy', '--scenario=overlap')
        self.assertEqual([line.split()[:2] for line in lines], [
            ['R1', 'HOLDS'], ['R2', 'HOLDS'], ['R3', 'HOLDS'], ['R4', 'HOLDS'], ['DeadlockFree', 'HOLDS'],
        ])

    def test_abort_fails_with_counterexample(self):
        lines = self.assertExitCode(ExitCode.PROPERTY_VIOLATED, 'check', 'casestudy', '--scenario=abort',
                                    '--properties=R1,R1-weak')
        self.assertTrue(lines[0].startswith('R1 FAILS states='))
        self.assertEqual(lines[1], '  counterexample: Accept(0,C1) StartReconfig AbortOrder(0)')
        self.assertTrue(lines[2].startswith('R1-weak HOLDS '))

    def test_json_output(self):
        out = StringIO()
        with self.assertRaises(CommandError):
            call_command('reconfig', 'check', 'casestudy', '--scenario=abort', '--format=json', stdout=out)
        payload = json.loads(out.getvalue())
        self.assertEqual([item['property'] for item in payload], ['R1', 'R2', 'R3', 'R4', 'DeadlockFree'])
        self.assertEqual(payload[0]['counterexample'], ['Accept(0,C1)', 'StartReconfig', 'AbortOrder(0)'])
        self.assertIsNone(payload[1]['counterexample'])

    def test_dot_output(self):
        target = self.tmp / 'lts.dot'
        lines = self.run_command('check', 'casestudy', '--scenario=suspend', '--properties=R4', f'--dot={target}')
        states = int(lines[0].split('states=')[1].split()[0])
        dot = target.read_text(encoding='utf-8')
        self.assertTrue(dot.startswith('digraph'))
        self.assertEqual(dot.count(' [shape='), states)

    def test_state_budget(self):
        self.assertExitCode(ExitCode.BUDGET_EXCEEDED, 'check', 'casestudy', '--scenario=overlap', '--max-states=3')
        self.assertExitCode(ExitCode.BUDGET_EXCEEDED, 'check', 'casestudy', '--scenario=abort', '--max-states=1')

    def test_unknown_property(self):
        self.assertExitCode(ExitCode.USAGE_ERROR, 'check', 'casestudy', '--scenario=overlap', '--properties=R9')


class CompareCommandTests(ReconfigCommandTestCase):

    def test_one_row_per_strategy(self):
        lines = self.run_command('compare', 'casestudy')
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[0].startswith('abort Abort states='))
        self.assertTrue(lines[1].startswith('suspend SuspendResume(k=2) states='))
        self.assertTrue(lines[2].startswith('overlap Overlap(k=2) states='))
        self.assertIn('R1=FAILS', lines[0])
        self.assertIn('R1-weak=HOLDS', lines[0])
        self.assertIn('R1=HOLDS', lines[2])
