"""Exception hierarchy for file loading and validation."""


class ValidationError(ValueError):
    """Input rejected by a validator. ``pointer`` is a JSON pointer (or "")."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        self.message = message
        super().__init__(f"{pointer}: {message}" if pointer else message)


class HgrdFormatError(ValidationError):
    pass


class ScenarioError(ValidationError):
    """Scenario rejected; ``report`` lists every problem found, first one raised."""

    report: list = []


class ScenarioParseError(ScenarioError):
    pass


class ScenarioSchemaError(ScenarioError):
    pass


class TimestepError(ScenarioError):
    pass


class HistoryLengthError(ScenarioError):
    pass


class FutureLengthError(ScenarioError):
    pass


class TooManyAgentsError(ScenarioError):
    pass


class DuplicateTrackError(ScenarioError):
    pass


class UnknownTargetError(ScenarioError):
    pass


class PolylineError(ScenarioError):
    pass


class AgentStateError(ScenarioError):
    pass


class PredictionFileError(ValidationError):
    pass
