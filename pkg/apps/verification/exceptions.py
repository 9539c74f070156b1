class VerificationError(Exception):
    """
    Error base del verificador
    """


class StateBudgetExceeded(VerificationError):
    """
    La exploración superó el límite de estados: es un error de recursos, nunca un veredicto
    """

    def __init__(self, max_states: int, reached: int):
        self.max_states = max_states
        self.reached = reached
        super().__init__(f"Se superó el límite de {max_states} estados (alcanzados {reached})")
