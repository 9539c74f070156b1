class ReconfigurationError(Exception):
    """
    Error base del motor de reconfiguración
    """


class InvalidScenarioError(ReconfigurationError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__('Escenario inválido: ' + '; '.join(self.problems))


class LabelNotEnabledError(ReconfigurationError):
    def __init__(self, label, state_digest: str):
        self.label = label
        self.state_digest = state_digest
        super().__init__(f"La acción {label} no está habilitada en el estado {state_digest}")


class ScriptIndexError(ReconfigurationError):
    def __init__(self, position: int, index: int, available: int):
        self.position = position
        self.index = index
        self.available = available
        super().__init__(
            f"Paso {position} del guion: índice {index} fuera de rango ({available} acciones habilitadas)"
        )
