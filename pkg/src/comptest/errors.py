"""Shared exception types for the toolchain."""

from __future__ import annotations


class ComptestError(Exception):
    """Base class for every error raised by this package."""


class SheetError(ComptestError):
    """A CSV sheet could not be parsed.

    Carries the sheet kind plus 1-based row and column coordinates so that
    authoring mistakes can be pointed at directly in the source table.
    """

    def __init__(self, message: str, *, sheet: str | None = None,
                 row: int | None = None, column: str | None = None):
        self.sheet = sheet
        self.row = row
        self.column = column
        where = []
        if sheet is not None:
            where.append(sheet)
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ValidationFailed(ComptestError):
    """Cross-reference validation found violations (compile refuses to run)."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"{len(report.violations)} sheet violation(s):\n{report}")


class ExprError(ComptestError):
    """An expression string could not be parsed; ``offset`` is 0-based."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"offset {offset}: {message}")


class EvalError(ComptestError):
    """An expression could not be evaluated (unbound variable, divide by zero)."""


class LowerError(ComptestError):
    """A status row cannot be turned into a method invocation."""

    def __init__(self, message: str, *, status: str | None = None,
                 row: int | None = None, column: str | None = None):
        self.status = status
        self.row = row
        self.column = column
        where = []
        if status is not None:
            where.append(f"status '{status}'")
        if row is not None:
            where.append(f"statuses row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ScriptError(ComptestError):
    """An XML test script is malformed or violates the script schema."""

    def __init__(self, message: str, *, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class StandError(ComptestError):
    """A stand description (resource table or connection matrix) is inconsistent."""


class AllocationError(ComptestError):
    """No conflict-free resource assignment exists for a step's requirements.

    ``candidates`` lists every resource considered for the first
    unsatisfiable requirement together with the reason it was rejected.
    """

    def __init__(self, *, pin: str, method: str, parameter: str | None,
                 candidates: list[tuple[str, str]]):
        self.pin = pin
        self.method = method
        self.parameter = parameter
        self.candidates = candidates
        detail = "; ".join(f"{rid}: {reason}" for rid, reason in candidates)
        param = f", parameter {parameter}" if parameter else ""
        super().__init__(
            f"no resource satisfies (pin {pin}, method {method}{param}); "
            f"rejected candidates: {detail if detail else 'none available'}")


class DutError(ComptestError):
    """The device-under-test model rejected an input or read request."""
