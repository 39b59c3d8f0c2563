"""Parse spreadsheet-exported CSV sheets into domain tables.

Sheets are authored in a spreadsheet tool and exported as UTF-8 CSV. The
default dialect is semicolon-separated fields with decimal commas (the
usual export on a German locale); a dot-decimal dialect parses to the very
same values. Every parse failure carries 1-based (row, column) coordinates,
counting the header as row 1.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from decimal import Decimal

from .errors import SheetError
from .sheets import (INF, Scalar, SignalDef, SignalTable, StatusDef,
                     StatusTable, TestSequence, TestStep)
from .stand import (ConnectionMatrix, Connector, ResourceDef, ResourceTable,
                    parse_connector)

PIN_SEPARATOR = "|"

_NUMBER = re.compile(r"[+-]?(\d+(\.\d+)?|\.\d+)([eE][+-]?\d+)?\Z")
_BIT_LITERAL = re.compile(r"[01]+B\Z")


@dataclass(frozen=True)
class CsvDialect:
    field_separator: str = ";"
    decimal_separator: str = ","

    def __post_init__(self):
        if len(self.field_separator) != 1 or len(self.decimal_separator) != 1:
            raise ValueError("separators must be single characters")
        if self.field_separator == self.decimal_separator:
            raise ValueError("field and decimal separators must differ")


DEFAULT_DIALECT = CsvDialect()


def _rows(text: str, dialect: CsvDialect) -> list[list[str]]:
    return list(csv.reader(io.StringIO(text), delimiter=dialect.field_separator))


def _norm(cell: str) -> str:
    return "".join(ch for ch in cell.casefold() if ch.isalnum())


def _parse_number(cell: str, dialect: CsvDialect, sheet: str, row: int,
                  column: str) -> Decimal:
    text = cell.strip()
    for ch in ".,":
        if ch != dialect.decimal_separator and ch in text:
            raise SheetError(f"malformed number {cell!r}", sheet=sheet,
                             row=row, column=column)
    text = text.replace(dialect.decimal_separator, ".")
    if not _NUMBER.match(text):
        raise SheetError(f"malformed number {cell!r}", sheet=sheet,
                         row=row, column=column)
    return Decimal(text)


def _parse_scalar(cell: str, dialect: CsvDialect, sheet: str, row: int,
                  column: str, *, bits: bool = False,
                  inf: bool = False) -> Scalar:
    text = cell.strip()
    if inf and text.casefold() == "inf":
        return INF
    if bits and _BIT_LITERAL.match(text):
        return text
    return _parse_number(cell, dialect, sheet, row, column)


def _ident(cell: str, sheet: str, row: int, column: str) -> str:
    text = cell.strip()
    if not text:
        raise SheetError("empty identifier", sheet=sheet, row=row, column=column)
    if any(ch.isspace() for ch in text):
        raise SheetError(f"identifier {text!r} contains whitespace",
                         sheet=sheet, row=row, column=column)
    return text


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _xml_name(cell: str, sheet: str, row: int, column: str) -> str:
    # Methods, attributes and scale variables end up as XML names or
    # expression identifiers, which are narrower than general idents.
    text = cell.strip()
    if not _NAME.match(text):
        raise SheetError(f"{text!r} is not a valid name "
                         f"(letters, digits, underscore; no leading digit)",
                         sheet=sheet, row=row, column=column)
    return text


def _method(cell: str, sheet: str, row: int, column: str) -> str:
    # "put r" and "put_r" both normalize to the element name put_r.
    text = "_".join(cell.strip().split())
    if not text:
        raise SheetError("empty method", sheet=sheet, row=row, column=column)
    return _xml_name(text, sheet, row, column)


def _header_map(header: list[str], required: dict[str, str],
                optional: dict[str, str], sheet: str) -> dict[str, int]:
    index: dict[str, int] = {}
    known = {**required, **optional}
    for col, cell in enumerate(header):
        key = _norm(cell)
        if key not in known:
            raise SheetError(f"unexpected column {cell.strip()!r}", sheet=sheet,
                             row=1, column=cell.strip())
        name = known[key]
        if name in index:
            raise SheetError(f"duplicate column {cell.strip()!r}", sheet=sheet,
                             row=1, column=cell.strip())
        index[name] = col
    for key, name in required.items():
        if name not in index:
            raise SheetError(f"missing column '{name}'", sheet=sheet, row=1,
                             column=name)
    return index


def _cell(row: list[str], col: int | None) -> str:
    if col is None or col >= len(row):
        return ""
    return row[col]


_STATUS_REQUIRED = {"status": "status", "method": "method",
                    "attribut": "attribut", "varx": "var_x", "nom": "nom",
                    "min": "min", "max": "max", "d1": "d1", "d2": "d2",
                    "d3": "d3"}
_STATUS_OPTIONAL = {"unit": "unit"}


def parse_status_sheet(text: str, dialect: CsvDialect = DEFAULT_DIALECT) -> StatusTable:
    rows = _rows(text, dialect)
    if not rows:
        raise SheetError("missing header row", sheet="statuses", row=1, column=None)
    cols = _header_map(rows[0], _STATUS_REQUIRED, _STATUS_OPTIONAL, "statuses")
    statuses: list[StatusDef] = []
    seen: set[str] = set()
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        name = _ident(_cell(row, cols["status"]), "statuses", line, "status")
        if name in seen:
            raise SheetError(f"duplicate status name {name!r}", sheet="statuses",
                             row=line, column="status")
        seen.add(name)

        def opt(column, **kinds):
            cell = _cell(row, cols.get(column))
            if not cell.strip():
                return None
            return _parse_scalar(cell, dialect, "statuses", line, column, **kinds)

        var_cell = _cell(row, cols["var_x"]).strip()
        unit_cell = _cell(row, cols.get("unit")).strip()
        statuses.append(StatusDef(
            status=name,
            method=_method(_cell(row, cols["method"]), "statuses", line, "method"),
            attribut=_xml_name(_cell(row, cols["attribut"]), "statuses", line,
                               "attribut"),
            var_x=_xml_name(var_cell, "statuses", line, "var_x") if var_cell
            else None,
            nom=opt("nom", bits=True, inf=True),
            min=opt("min"),
            max=opt("max"),
            d1=opt("d1", inf=True),
            d2=opt("d2", inf=True),
            d3=opt("d3", inf=True),
            unit=unit_cell or None,
            row=line,
        ))
    return StatusTable(statuses)


_SIGNAL_REQUIRED = {"name": "name", "direction": "direction", "pins": "pins",
                    "initialstatus": "initial_status"}


def parse_signal_sheet(text: str, dialect: CsvDialect = DEFAULT_DIALECT) -> SignalTable:
    rows = _rows(text, dialect)
    if not rows:
        raise SheetError("missing header row", sheet="signals", row=1, column=None)
    cols = _header_map(rows[0], _SIGNAL_REQUIRED, {}, "signals")
    signals: list[SignalDef] = []
    seen_names: set[str] = set()
    seen_pins: set[str] = set()
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        name = _ident(_cell(row, cols["name"]), "signals", line, "name")
        if name in seen_names:
            raise SheetError(f"duplicate signal name {name!r}", sheet="signals",
                             row=line, column="name")
        seen_names.add(name)
        direction = _cell(row, cols["direction"]).strip().casefold()
        if direction not in ("input", "output"):
            raise SheetError(f"direction must be input or output, got "
                             f"{_cell(row, cols['direction']).strip()!r}",
                             sheet="signals", row=line, column="direction")
        pins_cell = _cell(row, cols["pins"])
        pins = tuple(_ident(p, "signals", line, "pins")
                     for p in pins_cell.split(PIN_SEPARATOR))
        for pin in pins:
            if pin in seen_pins:
                raise SheetError(f"pin {pin!r} used by more than one signal",
                                 sheet="signals", row=line, column="pins")
        if len(set(pins)) != len(pins):
            raise SheetError("duplicate pin within one signal",
                             sheet="signals", row=line, column="pins")
        seen_pins.update(pins)
        signals.append(SignalDef(
            name=name,
            direction=direction,
            pins=pins,
            initial_status=_ident(_cell(row, cols["initial_status"]), "signals",
                                  line, "initial_status"),
            row=line,
        ))
    if not signals:
        raise SheetError("signal sheet has no rows", sheet="signals", row=None,
                         column=None)
    return SignalTable(signals)


_STEP_HEADERS = {"teststep", "step"}
_DT_HEADERS = {"δt", "dt", "deltat"}
_REMARK_HEADERS = {"remarks", "remark"}


def parse_test_sheet(text: str, dialect: CsvDialect = DEFAULT_DIALECT,
                     name: str = "test") -> TestSequence:
    rows = _rows(text, dialect)
    if not rows:
        raise SheetError("missing header row", sheet="test", row=1, column=None)
    header = rows[0]
    if len(header) < 2 or _norm(header[0]) not in _STEP_HEADERS:
        raise SheetError("first column must be the test step index",
                         sheet="test", row=1,
                         column=header[0].strip() if header else None)
    if _norm(header[1]) not in _DT_HEADERS:
        raise SheetError("second column must be the step duration Δt",
                         sheet="test", row=1, column=header[1].strip())
    dt_label = header[1].strip()
    signal_cols: list[tuple[int, str]] = []
    remark_col: int | None = None
    for col in range(2, len(header)):
        label = header[col].strip()
        if _norm(label) in _REMARK_HEADERS:
            if col != len(header) - 1:
                raise SheetError("remarks must be the last column", sheet="test",
                                 row=1, column=label)
            remark_col = col
            continue
        label = _ident(label, "test", 1, f"column {col + 1}")
        if label in (s for _, s in signal_cols):
            raise SheetError(f"duplicate signal column {label!r}", sheet="test",
                             row=1, column=label)
        signal_cols.append((col, label))

    steps: list[TestStep] = []
    expected = 0
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        index_cell = _cell(row, 0).strip()
        if not index_cell.isdigit():
            raise SheetError(f"malformed step index {index_cell!r}", sheet="test",
                             row=line, column="test step")
        index = int(index_cell)
        if index != expected:
            raise SheetError(f"non-consecutive step index {index} "
                             f"(expected {expected})", sheet="test", row=line,
                             column="test step")
        expected += 1
        dt = _parse_number(_cell(row, 1), dialect, "test", line, dt_label)
        if dt <= 0:
            raise SheetError(f"Δt must be > 0, got {dt}", sheet="test", row=line,
                             column=dt_label)
        assignments: dict[str, str] = {}
        for col, signal in signal_cols:
            cell = _cell(row, col).strip()
            if cell:
                assignments[signal] = _ident(cell, "test", line, signal)
        remark = _cell(row, remark_col).strip() if remark_col is not None else ""
        steps.append(TestStep(index, dt, assignments, remark or None, row=line))
    if not steps:
        raise SheetError("test sheet has no steps", sheet="test", row=None,
                         column=None)
    return TestSequence(name, steps)


_RESOURCE_REQUIRED = {"res": "id", "ress": "id", "resource": "id",
                      "method": "method", "attribut": "attribut",
                      "min": "min", "max": "max", "unit": "unit"}


def parse_resource_sheet(text: str, dialect: CsvDialect = DEFAULT_DIALECT) -> ResourceTable:
    rows = _rows(text, dialect)
    if not rows:
        raise SheetError("missing header row", sheet="resources", row=1, column=None)
    cols = _header_map(rows[0], {"method": "method", "attribut": "attribut",
                                 "min": "min", "max": "max", "unit": "unit"},
                       {"res": "id", "ress": "id", "resource": "id"},
                       "resources")
    if "id" not in cols:
        raise SheetError("missing column 'res'", sheet="resources", row=1,
                         column="res")
    resources: list[ResourceDef] = []
    seen: set[str] = set()
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        rid = _ident(_cell(row, cols["id"]), "resources", line, "res")
        if rid in seen:
            raise SheetError(f"duplicate resource id {rid!r}",
                             sheet="resources", row=line, column="res")
        seen.add(rid)
        low = _parse_number(_cell(row, cols["min"]), dialect, "resources", line,
                            "min")
        high = _parse_number(_cell(row, cols["max"]), dialect, "resources",
                             line, "max")
        if low > high:
            raise SheetError(f"min {low} > max {high}", sheet="resources",
                             row=line, column="min")
        resources.append(ResourceDef(
            id=rid,
            method=_method(_cell(row, cols["method"]), "resources", line,
                           "method"),
            attribut=_xml_name(_cell(row, cols["attribut"]), "resources", line,
                               "attribut"),
            min=low,
            max=high,
            unit=_cell(row, cols["unit"]).strip(),
            row=line,
        ))
    return ResourceTable(resources)


def parse_connection_sheet(text: str, dialect: CsvDialect = DEFAULT_DIALECT) -> ConnectionMatrix:
    rows = _rows(text, dialect)
    if not rows:
        raise SheetError("missing header row", sheet="connections", row=1,
                         column=None)
    header = rows[0]
    pins: list[str] = []
    for col in range(1, len(header)):
        pin = _ident(header[col], "connections", 1, f"column {col + 1}").lower()
        if pin in pins:
            raise SheetError(f"duplicate pin column {pin!r}", sheet="connections",
                             row=1, column=pin)
        pins.append(pin)
    matrix_rows: list[str] = []
    cells: dict[tuple[str, str], Connector] = {}
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        rid = _ident(_cell(row, 0), "connections", line, "res")
        if rid in matrix_rows:
            raise SheetError(f"duplicate resource row {rid!r}",
                             sheet="connections", row=line, column="res")
        matrix_rows.append(rid)
        for col, pin in enumerate(pins, start=1):
            cell = _cell(row, col).strip()
            if not cell:
                continue
            try:
                cells[(rid, pin)] = parse_connector(cell)
            except ValueError as exc:
                raise SheetError(str(exc), sheet="connections", row=line,
                                 column=pin) from None
    return ConnectionMatrix(pins, matrix_rows, cells)


# --- serializers (round-trip partners of the parsers) ---------------------

def render_number(value: Decimal, dialect: CsvDialect = DEFAULT_DIALECT) -> str:
    return str(value).replace(".", dialect.decimal_separator)


def _scalar_cell(value: Scalar | None, dialect: CsvDialect) -> str:
    if value is None:
        return ""
    if value is INF:
        return "INF"
    if isinstance(value, Decimal):
        return render_number(value, dialect)
    return value


def _write(rows: list[list[str]], dialect: CsvDialect) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=dialect.field_separator,
                        lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def serialize_status_sheet(table: StatusTable,
                           dialect: CsvDialect = DEFAULT_DIALECT) -> str:
    rows = [["status", "method", "attribut", "var (x)", "nom", "min", "max",
             "D 1", "D 2", "D 3", "unit"]]
    for st in table:
        rows.append([st.status, st.method, st.attribut, st.var_x or "",
                     _scalar_cell(st.nom, dialect),
                     _scalar_cell(st.min, dialect),
                     _scalar_cell(st.max, dialect),
                     _scalar_cell(st.d1, dialect),
                     _scalar_cell(st.d2, dialect),
                     _scalar_cell(st.d3, dialect),
                     st.unit or ""])
    return _write(rows, dialect)


def serialize_signal_sheet(table: SignalTable,
                           dialect: CsvDialect = DEFAULT_DIALECT) -> str:
    rows = [["name", "direction", "pins", "initial_status"]]
    for sig in table:
        rows.append([sig.name, sig.direction, PIN_SEPARATOR.join(sig.pins),
                     sig.initial_status])
    return _write(rows, dialect)


def serialize_test_sheet(test: TestSequence,
                         dialect: CsvDialect = DEFAULT_DIALECT) -> str:
    columns: list[str] = []
    for step in test.steps:
        for signal in step.assignments:
            if signal not in columns:
                columns.append(signal)
    rows = [["test step", "Δt", *columns, "remarks"]]
    for step in test.steps:
        cells = [str(step.index), render_number(step.dt, dialect)]
        cells += [step.assignments.get(sig, "") for sig in columns]
        cells.append(step.remark or "")
        rows.append(cells)
    return _write(rows, dialect)


def serialize_resource_sheet(table: ResourceTable,
                             dialect: CsvDialect = DEFAULT_DIALECT) -> str:
    rows = [["res", "method", "attribut", "min", "max", "unit"]]
    for res in table:
        rows.append([res.id, res.method, res.attribut,
                     render_number(res.min, dialect),
                     render_number(res.max, dialect), res.unit])
    return _write(rows, dialect)


def serialize_connection_sheet(matrix: ConnectionMatrix,
                               dialect: CsvDialect = DEFAULT_DIALECT) -> str:
    rows = [["res", *matrix.pins]]
    for rid in matrix.rows:
        cells = [rid]
        for pin in matrix.pins:
            conn = matrix.cells.get((rid, pin))
            cells.append(str(conn) if conn is not None else "")
        rows.append(cells)
    return _write(rows, dialect)
