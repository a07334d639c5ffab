class GrassmannError(ValueError):
    """Базовий клас помилок обчислювального ядра."""


class InvalidParameters(GrassmannError):
    pass


class NotPrimary(GrassmannError):
    pass


class InvalidComparison(GrassmannError):
    pass


class IncompatibleFields(GrassmannError):
    pass


class MissingAssignment(GrassmannError):
    pass


class InvalidChart(GrassmannError):
    pass


class CenterMissesChart(GrassmannError):
    pass


class DiagnosticFailure(GrassmannError):
    pass


class UndecidedOracle(GrassmannError):
    pass


class TowerNonTermination(GrassmannError):
    pass


class ChartBudgetExceeded(GrassmannError):
    """
    Кількість карт перевищила бюджет. Несе частковий результат у полі partial_run,
    щоб CLI міг зберегти артефакти з позначкою partial.
    """

    def __init__(self, message: str, partial_run=None):
        super().__init__(message)
        self.partial_run = partial_run
