"""Exception hierarchy shared across the toolkit.

Every error raised on purpose derives from :class:`SceneBenchError` so the CLI
can map it to exit status 1. Usage/ordering problems derive from
:class:`UsageError` and map to exit status 2.
"""


class SceneBenchError(Exception):
    """Base class for all toolkit errors."""


class UsageError(SceneBenchError):
    """Stage-order violation or missing workspace artifact."""


class InputError(SceneBenchError, ValueError):
    """Malformed or out-of-contract argument."""


class DegenerateInputError(InputError):
    pass


class PreconditionError(InputError):
    pass


class CapacityError(SceneBenchError):
    def __init__(self, subset: str, shortfall: int):
        super().__init__(f"subset {subset!r} is short of its quota by {shortfall}")
        self.subset = subset
        self.shortfall = shortfall


# service clients
class TransportError(SceneBenchError):
    pass


class ProtocolError(SceneBenchError):
    pass


class ShortResponseError(ProtocolError):
    pass


# scene adapter
class SceneParseError(SceneBenchError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class SceneFieldError(SceneBenchError):
    pass


class SceneStructureError(SceneBenchError):
    pass


class DegenerateSceneError(SceneBenchError):
    pass


class UnnavigableSceneError(SceneBenchError):
    pass


class DatasetInvariantError(SceneBenchError):
    """An emitted dataset breaks its own referential or schema contract."""


# question generation
class SpecValidationError(SceneBenchError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class VocabularyError(SpecValidationError):
    pass


class SpecReferenceError(SpecValidationError):
    pass


class AmbiguityError(SceneBenchError):
    pass


# evaluator
class DimensionMismatchError(InputError):
    pass


class LabelRangeError(InputError):
    pass


class EmptyEvaluationError(SceneBenchError):
    pass


class DegenerateBaselineError(InputError):
    pass


class CoverageError(SceneBenchError):
    pass
