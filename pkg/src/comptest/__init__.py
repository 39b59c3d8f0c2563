"""Stand-independent component-test toolchain.

Authoring happens in three CSV sheets (signals, statuses, test steps);
``compile`` lowers them into a portable XML test script; ``load_script``
plus ``execute`` interpret such a script on a virtual test stand with
resource allocation against a simulated device under test.
"""

__version__ = "0.1.0"

from .compiler import (MethodInvocation, TestScript, compile, emit_xml,
                       lower_status)
from .dut import (DUT_REGISTRY, DutModel, InteriorLightConfig,
                  InteriorLightDut, build_dut, reference_dut)
from .errors import (AllocationError, ComptestError, DutError, EvalError,
                     ExprError, LowerError, ScriptError, SheetError,
                     StandError, ValidationFailed)
from .expr import eval_expr, parse_expr, render_expr
from .ingest import (CsvDialect, parse_connection_sheet, parse_resource_sheet,
                     parse_signal_sheet, parse_status_sheet, parse_test_sheet,
                     serialize_connection_sheet, serialize_resource_sheet,
                     serialize_signal_sheet, serialize_status_sheet,
                     serialize_test_sheet)
from .runner import RunReport, execute, report_to_dict, report_to_json, report_to_text
from .script import TestPlan, load_script
from .sheets import (INF, DenseSequence, SignalDef, SignalTable, StatusDef,
                     StatusTable, TestSequence, TestStep, ValidationReport,
                     expand_holds, validate_sheets)
from .stand import (Allocation, Binding, ConnectionMatrix, Connector,
                    Requirement, ResourceDef, ResourceTable, StandModel,
                    allocate, parse_connector)

__all__ = [
    "__version__", "INF",
    "SignalDef", "SignalTable", "StatusDef", "StatusTable", "TestStep",
    "TestSequence", "DenseSequence", "ValidationReport", "validate_sheets",
    "expand_holds",
    "CsvDialect", "parse_signal_sheet", "parse_status_sheet",
    "parse_test_sheet", "parse_resource_sheet", "parse_connection_sheet",
    "serialize_signal_sheet", "serialize_status_sheet", "serialize_test_sheet",
    "serialize_resource_sheet", "serialize_connection_sheet",
    "parse_expr", "eval_expr", "render_expr",
    "MethodInvocation", "TestScript", "lower_status", "compile", "emit_xml",
    "TestPlan", "load_script",
    "Connector", "parse_connector", "ResourceDef", "ResourceTable",
    "ConnectionMatrix", "StandModel", "Requirement", "Binding", "Allocation",
    "allocate",
    "DutModel", "InteriorLightConfig", "InteriorLightDut", "reference_dut",
    "build_dut", "DUT_REGISTRY",
    "RunReport", "execute", "report_to_dict", "report_to_json",
    "report_to_text",
    "ComptestError", "SheetError", "ValidationFailed", "ExprError",
    "EvalError", "LowerError", "ScriptError", "StandError", "AllocationError",
    "DutError",
]
