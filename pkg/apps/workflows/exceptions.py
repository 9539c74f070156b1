from typing import List


class WorkflowError(Exception):
    """
    Error base del modelo de workflows
    """


class UnknownActivityError(WorkflowError):
    def __init__(self, config_id: str, activity: str):
        self.config_id = config_id
        self.activity = activity
        super().__init__(f"La actividad '{activity}' no existe en la configuración {config_id}")


class OutcomeError(WorkflowError):
    """
    Resultado ausente, desconocido o no permitido para el tipo de actividad
    """


class InvalidConfigurationError(WorkflowError):
    def __init__(self, config_id: str, violations: List['Violation']):  # noqa: F821
        self.config_id = config_id
        self.violations = violations
        detail = ', '.join(f'{v.kind.value}@{v.activity}' for v in violations)
        super().__init__(f"La configuración {config_id} no es válida: {detail}")
