from .engine import ReconfigurationEngine, apply, enabled, initial_state
from .simulation import RandomPolicy, ScriptPolicy, Simulation, Simulator, run

__all__ = [
    'ReconfigurationEngine', 'apply', 'enabled', 'initial_state',
    'RandomPolicy', 'ScriptPolicy', 'Simulation', 'Simulator', 'run',
]
