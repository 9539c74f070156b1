from pathlib import Path
from typing import List, Tuple

from apps.reconfiguration.models import (
    ReconfigTrigger,
    ReconfigurationStrategy,
    Scenario,
    StrategyVariant,
    TriggerKind,
)
from apps.workflows.models import Activity, ActivityKind, Configuration, WorkflowSpec

FIXTURES_DIR = Path(__file__).resolve().parent / 'fixtures'
WORKFLOW_FIXTURE = FIXTURES_DIR / 'casestudy.json'
SCENARIO_FIXTURES_DIR = FIXTURES_DIR / 'scenarios'

# Nombre con el que la línea de comandos resuelve el caso de estudio incorporado
BUILTIN_WORKFLOW = 'casestudy'

TASK = ActivityKind.TASK
DECISION = ActivityKind.DECISION


def config1() -> Configuration:
    """
    Configuración 1 del workflow de pedidos: se envía antes de facturar.
    Reconstrucción propia; los grafos originales no están publicados.
    """
    return Configuration(
        id='C1',
        entry='OrderReceipt',
        activities=(
            Activity('OrderReceipt', TASK, ('Evaluation',)),
            Activity('Evaluation', DECISION, ('Shipping', 'Close'), ('accept', 'reject')),
            Activity('Shipping', TASK, ('Billing',)),
            Activity('Billing', TASK, ('Archiving',)),
            Activity('Archiving', TASK, ('Close',)),
            Activity('Close', ActivityKind.FINAL),
        ),
    )


def config2() -> Configuration:
    """
    Configuración 2: se factura antes de enviar y, en paralelo al envío, se notifica al cliente
    """
    return Configuration(
        id='C2',
        entry='OrderReceipt',
        activities=(
            Activity('OrderReceipt', TASK, ('Evaluation',)),
            Activity('Evaluation', DECISION, ('Billing', 'Close'), ('accept', 'reject')),
            Activity('Billing', TASK, ('PayAndShip',)),
            Activity('PayAndShip', ActivityKind.FORK, ('Shipping', 'NotifyCustomer')),
            Activity('Shipping', TASK, ('Sync',)),
            Activity('NotifyCustomer', TASK, ('Sync',)),
            Activity('Sync', ActivityKind.JOIN, ('Archiving',)),
            Activity('Archiving', TASK, ('Close',)),
            Activity('Close', ActivityKind.FINAL),
        ),
    )


def workflow_spec() -> WorkflowSpec:
    return WorkflowSpec(old=config1(), new=config2())


def default_scenarios() -> List[Tuple[str, Scenario]]:
    """
    Un escenario por estrategia, con presupuesto 2 y k = 2: los valores mínimos
    que muestran dos pedidos solapados entre ambas configuraciones
    """
    return [
        ('abort', Scenario(
            arrival_budget=2,
            strategy=ReconfigurationStrategy(StrategyVariant.ABORT, 0),
            reconfig_trigger=ReconfigTrigger(TriggerKind.AFTER_N_ACCEPTS, 1),
        )),
        ('suspend', Scenario(
            arrival_budget=2,
            strategy=ReconfigurationStrategy(StrategyVariant.SUSPEND_RESUME, 2),
        )),
        ('overlap', Scenario(
            arrival_budget=2,
            strategy=ReconfigurationStrategy(StrategyVariant.OVERLAP, 2),
        )),
    ]


def scenario(name: str) -> Scenario:
    return dict(default_scenarios())[name]
