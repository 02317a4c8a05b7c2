class PegError(Exception):
    """Base class for every error raised by pegrw."""


class GrammarSyntaxError(PegError):
    def __init__(self, message: str, line: int, col: int, path: str | None = None):
        self.message, self.line, self.col, self.path = message, line, col, path
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{col}: {message}")


class GrammarCheckError(PegError):
    """A grammar failed a static check; ``report`` holds the findings."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(i) for i in report.issues))


class EngineError(PegError):
    """Evaluation could not produce a semantic outcome."""


class BudgetExceeded(EngineError):
    pass


class UnsupportedCut(EngineError):
    pass


class UnsupportedConstruct(EngineError):
    pass


class SolutionCapExceeded(EngineError):
    def __init__(self, message: str, partial):
        self.partial = partial
        super().__init__(message)


class EnumerationCapExceeded(PegError):
    def __init__(self, message: str, partial):
        self.partial = partial
        super().__init__(message)


class NoDeletableSymbols(PegError):
    pass
