"""Domain types for the three definition sheets and their cross checks.

A component test is authored as three tables: a signal table naming the
DUT's inputs and outputs, a status table defining named stimulus/check
templates, and a test table assigning statuses to signals step by step.
This module holds the parsed value types, the cross-reference validator,
and the hold-expansion that turns a sparse test table into a dense one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterator, Union


class _OpenCircuit:
    """Singleton marker for the open-circuit value spelled ``INF`` in sheets.

    Deliberately not a float infinity: it takes part in no arithmetic and
    round-trips through CSV and XML bit-exactly.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self


INF = _OpenCircuit()

#: A sheet cell value: a number, a bit literal kept as text, or the INF marker.
Scalar = Union[Decimal, str, _OpenCircuit]


def method_class(method: str) -> str | None:
    """Return ``"put"`` for stimulus methods, ``"get"`` for check methods.

    Classification is by name prefix; anything else returns None and is
    treated as an unknown method (feasibility is decided by the stand).
    """
    if method.startswith("put"):
        return "put"
    if method.startswith("get"):
        return "get"
    return None


@dataclass
class SignalDef:
    """One row of the signal table: a logical DUT signal and its pins."""

    name: str
    direction: str  # "input" | "output"
    pins: tuple[str, ...]
    initial_status: str
    row: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.direction not in ("input", "output"):
            raise ValueError(f"signal {self.name}: bad direction {self.direction!r}")
        if not self.pins:
            raise ValueError(f"signal {self.name}: at least one pin required")


@dataclass
class SignalTable:
    signals: list[SignalDef]

    def __post_init__(self):
        names: set[str] = set()
        pins: set[str] = set()
        for sig in self.signals:
            if sig.name in names:
                raise ValueError(f"duplicate signal name {sig.name!r}")
            names.add(sig.name)
            for pin in sig.pins:
                if pin in pins:
                    raise ValueError(f"pin {pin!r} used by more than one signal")
                pins.add(pin)
        self._by_name = {sig.name: sig for sig in self.signals}

    def __iter__(self) -> Iterator[SignalDef]:
        return iter(self.signals)

    def __len__(self):
        return len(self.signals)

    def __contains__(self, name: str):
        return name in self._by_name

    def __getitem__(self, name: str) -> SignalDef:
        return self._by_name[name]

    def inputs(self) -> list[SignalDef]:
        return [s for s in self.signals if s.direction == "input"]

    def outputs(self) -> list[SignalDef]:
        return [s for s in self.signals if s.direction == "output"]


@dataclass
class StatusDef:
    """One row of the status table: a named, parameterized method template.

    ``nom`` holds the value a put-class method applies (a number, a bit
    literal such as ``0001B``, or INF for open circuit). ``min``/``max``
    bound a get-class measurement; with ``var_x`` set they are
    dimensionless multipliers of that variable. ``d1``..``d3`` are
    carried through to the invocation untouched.
    """

    status: str
    method: str
    attribut: str
    var_x: str | None = None
    nom: Scalar | None = None
    min: Decimal | None = None
    max: Decimal | None = None
    d1: Scalar | None = None
    d2: Scalar | None = None
    d3: Scalar | None = None
    unit: str | None = None
    row: int | None = field(default=None, compare=False)


@dataclass
class StatusTable:
    statuses: list[StatusDef]

    def __post_init__(self):
        seen: set[str] = set()
        for st in self.statuses:
            if st.status in seen:
                raise ValueError(f"duplicate status name {st.status!r}")
            seen.add(st.status)
        self._by_name = {st.status: st for st in self.statuses}

    def __iter__(self) -> Iterator[StatusDef]:
        return iter(self.statuses)

    def __len__(self):
        return len(self.statuses)

    def __contains__(self, name: str):
        return name in self._by_name

    def __getitem__(self, name: str) -> StatusDef:
        return self._by_name[name]


@dataclass
class TestStep:
    """One row of the test table.

    ``assignments`` maps signal name to status name and preserves sheet
    column order; a signal absent from the map holds its previous status
    (inputs) or is simply not checked this step (outputs).
    """

    index: int
    dt: Decimal
    assignments: dict[str, str]
    remark: str | None = None
    row: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"step index {self.index} is negative")
        if self.dt <= 0:
            raise ValueError(f"step {self.index}: dt must be > 0, got {self.dt}")


@dataclass
class TestSequence:
    name: str
    steps: list[TestStep]

    def __post_init__(self):
        if not self.steps:
            raise ValueError("a test sequence needs at least one step")
        for expected, step in enumerate(self.steps):
            if step.index != expected:
                raise ValueError(
                    f"non-consecutive step index {step.index} (expected {expected})")


@dataclass(frozen=True)
class Violation:
    sheet: str
    row: int | None
    column: str | None
    message: str

    def __str__(self):
        row = "?" if self.row is None else str(self.row)
        col = "?" if self.column is None else self.column
        return f"{self.sheet}:{row}:{col}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        return "\n".join(str(v) for v in self.violations)


def _class_violation(sheet: str, row: int | None, column: str | None,
                     status: StatusDef, signal: SignalDef) -> Violation | None:
    cls = method_class(status.method)
    if cls is None:
        return Violation(sheet, row, column,
                         f"status '{status.status}' uses method "
                         f"'{status.method}' of unknown class")
    wanted = "put" if signal.direction == "input" else "get"
    if cls != wanted:
        return Violation(sheet, row, column,
                         f"direction/method mismatch: {cls}-class status "
                         f"'{status.status}' ({status.method}) assigned to "
                         f"{signal.direction} signal '{signal.name}'")
    return None


def validate_sheets(signals: SignalTable, statuses: StatusTable,
                    test: TestSequence) -> ValidationReport:
    """Cross-check the three sheets against each other.

    The report is empty exactly when every referenced status exists, every
    assigned signal exists, initial statuses resolve, and each status's
    method class matches the direction of the signal it is applied to.
    Violations are data, not exceptions.
    """
    out: list[Violation] = []
    for sig in signals:
        if sig.initial_status not in statuses:
            out.append(Violation("signals", sig.row, "initial_status",
                                 f"unknown status '{sig.initial_status}'"))
            continue
        v = _class_violation("signals", sig.row, "initial_status",
                             statuses[sig.initial_status], sig)
        if v:
            out.append(v)
    for step in test.steps:
        for sig_name, status_name in step.assignments.items():
            if sig_name not in signals:
                out.append(Violation("test", step.row, sig_name,
                                     f"unknown signal '{sig_name}'"))
                continue
            if status_name not in statuses:
                out.append(Violation("test", step.row, sig_name,
                                     f"unknown status '{status_name}'"))
                continue
            v = _class_violation("test", step.row, sig_name,
                                 statuses[status_name], signals[sig_name])
            if v:
                out.append(v)
    return ValidationReport(out)


@dataclass
class DenseStep:
    """A fully expanded step: every input signal's effective status plus
    the checks explicitly requested this step."""

    index: int
    dt: Decimal
    inputs: dict[str, str]
    checks: dict[str, str]


@dataclass
class DenseSequence:
    name: str
    steps: list[DenseStep]

    def to_test_sequence(self) -> TestSequence:
        """Rewrite as a sparse sequence with every cell explicit."""
        steps = []
        for d in self.steps:
            assignments = dict(d.inputs)
            assignments.update(d.checks)
            steps.append(TestStep(d.index, d.dt, assignments))
        return TestSequence(self.name, steps)


def expand_holds(test: TestSequence, signals: SignalTable) -> DenseSequence:
    """Expand hold semantics into a dense table.

    For every step and every input signal the effective status is the most
    recent explicit assignment at or before that step, seeded by the
    signal's initial status. Output signals keep only explicit per-step
    checks; a blank cell means no check in that step.
    """
    current: dict[str, str] = {s.name: s.initial_status for s in signals.inputs()}
    dense: list[DenseStep] = []
    for step in test.steps:
        checks: dict[str, str] = {}
        for sig_name, status_name in step.assignments.items():
            if sig_name not in signals:
                raise ValueError(f"step {step.index}: unknown signal '{sig_name}' "
                                 f"(validate sheets first)")
            if signals[sig_name].direction == "input":
                current[sig_name] = status_name
            else:
                checks[sig_name] = status_name
        inputs = {s.name: current[s.name] for s in signals.inputs()}
        dense.append(DenseStep(step.index, step.dt, inputs, checks))
    return DenseSequence(test.name, dense)
