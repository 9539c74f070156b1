import json
import logging
from pathlib import Path
from typing import Any, Dict, List

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, CommandParser

from apps.casestudy.services import default_scenarios
from apps.reconfiguration.exceptions import ReconfigurationError
from apps.reconfiguration.services import RandomPolicy, ReconfigurationEngine, ScriptPolicy, Simulator
from apps.verification.exceptions import StateBudgetExceeded
from apps.verification.models import DEFAULT_PROPERTIES, PropertyId
from apps.verification.serializers import CheckReportSerializer
from apps.verification.services import PropertyChecker, explore
from apps.verification.services.export import report_lines, to_file
from apps.workflows.exceptions import WorkflowError
from apps.workflows.services import validate_configuration

from ...exceptions import DocumentError, ExitCode
from ...services import DocumentLoader

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        'Modelo ejecutable de reconfiguración dinámica de workflows: '
        'validación de configuraciones, simulación y verificación exhaustiva de R1-R4.'
    )

    def add_arguments(self, parser: CommandParser) -> None:
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        validate = subparsers.add_parser('validate', help='Valida las configuraciones de un workflow')
        validate.add_argument('workflow', help='`casestudy` o ruta a un documento JSON')

        simulate = subparsers.add_parser('simulate', help='Ejecuta una traza aleatoria o guionada')
        simulate.add_argument('workflow')
        simulate.add_argument('--scenario', required=True, help='Nombre incorporado o ruta a un escenario')
        policy = simulate.add_mutually_exclusive_group()
        policy.add_argument('--seed', type=int, default=None)
        policy.add_argument('--script', default=None, help='Índices separados por comas')
        simulate.add_argument('--trace', dest='trace_path', default=None, help='Archivo de salida')

        check = subparsers.add_parser('check', help='Explora el LTS y verifica las propiedades')
        check.add_argument('workflow')
        check.add_argument('--scenario', required=True)
        check.add_argument('--properties', default=','.join(p.value for p in DEFAULT_PROPERTIES))
        check.add_argument('--dot', dest='dot_path', default=None)
        check.add_argument('--max-states', dest='max_states', type=int, default=None)
        check.add_argument('--format', dest='output_format', choices=['text', 'json'], default='text')
        check.add_argument('--verbose', dest='verbose_trace', action='store_true')

        compare = subparsers.add_parser('compare', help='Compara las tres estrategias incorporadas')
        compare.add_argument('workflow')
        compare.add_argument('--max-states', dest='max_states', type=int, default=None)

    def handle(self, *args: Any, **options: Any) -> None:
        handlers = {
            'validate': self.handle_validate,
            'simulate': self.handle_simulate,
            'check': self.handle_check,
            'compare': self.handle_compare,
        }
        try:
            code = handlers[options['subcommand']](options)
        except (DocumentError, WorkflowError, ReconfigurationError, ValueError) as exc:
            raise CommandError(str(exc), returncode=ExitCode.USAGE_ERROR)
        except StateBudgetExceeded as exc:
            raise CommandError(str(exc), returncode=ExitCode.BUDGET_EXCEEDED)
        if code is ExitCode.PROPERTY_VIOLATED:
            raise CommandError('Se encontraron violaciones', returncode=ExitCode.PROPERTY_VIOLATED)

    def _emit(self, lines: List[str]) -> None:
        for line in lines:
            self.stdout.write(line)

    def handle_validate(self, options: Dict[str, Any]) -> ExitCode:
        lines = []
        for cfg in DocumentLoader.configurations(options['workflow']):
            violations = validate_configuration(cfg)
            logger.info("Configuración %s: %d violaciones", cfg.id, len(violations))
            lines.extend(str(violation) for violation in violations)
        self._emit(lines)
        return ExitCode.PROPERTY_VIOLATED if lines else ExitCode.OK

    def handle_simulate(self, options: Dict[str, Any]) -> ExitCode:
        spec = DocumentLoader.workflow(options['workflow'])
        scenario = DocumentLoader.scenario(options['scenario'])
        engine = ReconfigurationEngine(spec, scenario)

        if options['script'] is not None:
            try:
                indices = [int(part) for part in options['script'].split(',') if part.strip()]
            except ValueError:
                raise DocumentError(f"--script inválido: '{options['script']}'")
            policy = ScriptPolicy(indices)
        else:
            seed = options['seed'] if options['seed'] is not None else settings.RECONFIG_DEFAULT_SEED
            policy = RandomPolicy(seed)

        lines = Simulator.simulate(engine, policy).trace.lines()
        if options['trace_path']:
            Path(options['trace_path']).write_text(''.join(f"{line}\n" for line in lines), encoding='utf-8')
        else:
            self._emit(lines)
        return ExitCode.OK

    def handle_check(self, options: Dict[str, Any]) -> ExitCode:
        spec = DocumentLoader.workflow(options['workflow'])
        scenario = DocumentLoader.scenario(options['scenario'])
        properties = [PropertyId.parse(text) for text in options['properties'].split(',') if text.strip()]

        lts = explore(ReconfigurationEngine(spec, scenario), options['max_states'])
        reports = PropertyChecker(lts).check_all(properties)
        if options['dot_path']:
            to_file(options['dot_path'], lts)

        if options['output_format'] == 'json':
            payload = [CheckReportSerializer(report).data for report in reports]
            self.stdout.write(json.dumps(payload, indent=2))
        else:
            for report in reports:
                self._emit(report_lines(report, options['verbose_trace']))
        if all(report.holds for report in reports):
            return ExitCode.OK
        return ExitCode.PROPERTY_VIOLATED

    def handle_compare(self, options: Dict[str, Any]) -> ExitCode:
        """
        Una fila por estrategia incorporada: es un informe, no una aserción
        """
        spec = DocumentLoader.workflow(options['workflow'])
        properties = list(DEFAULT_PROPERTIES) + [PropertyId.R1_WEAK]
        for name, scenario in default_scenarios():
            lts = explore(ReconfigurationEngine(spec, scenario), options['max_states'])
            verdicts = ' '.join(
                f"{report.property.value}={'HOLDS' if report.holds else 'FAILS'}"
                for report in PropertyChecker(lts).check_all(properties)
            )
            self.stdout.write(
                f"{name} {scenario.strategy} states={lts.stats.states} "
                f"transitions={lts.stats.transitions} {verdicts}"
            )
        return ExitCode.OK
