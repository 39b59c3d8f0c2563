#!/usr/bin/env python3
"""Compile the shipped interior-light example and run it end to end."""

import argparse
import sys
from decimal import Decimal
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from comptest import (InteriorLightConfig, StandModel, compile, emit_xml,
                      execute, load_script, parse_connection_sheet,
                      parse_resource_sheet, parse_signal_sheet,
                      parse_status_sheet, parse_test_sheet, reference_dut,
                      report_to_text)

DATA = Path(__file__).resolve().parent.parent / "data" / "interior_light"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ubatt", default="12.0", help="supply voltage, volts")
    ap.add_argument("--timeout", default="300", help="lamp timeout, seconds")
    ap.add_argument("--emit", action="store_true",
                    help="print the compiled XML instead of running")
    args = ap.parse_args()

    signals = parse_signal_sheet((DATA / "signals.csv").read_text("utf-8"))
    statuses = parse_status_sheet((DATA / "statuses.csv").read_text("utf-8"))
    test = parse_test_sheet(
        (DATA / "test_interior_light.csv").read_text("utf-8"),
        name="interior_light")
    script = compile(signals, statuses, test, dut="interior_light_ecu")
    xml = emit_xml(script)
    if args.emit:
        sys.stdout.write(xml)
        return 0

    stand = StandModel(
        parse_resource_sheet((DATA / "resources.csv").read_text("utf-8")),
        parse_connection_sheet((DATA / "connections.csv").read_text("utf-8")))
    dut = reference_dut(InteriorLightConfig(ubatt=Decimal(args.ubatt),
                                            timeout_s=Decimal(args.timeout)))
    report = execute(load_script(xml), stand, {"ubatt": Decimal(args.ubatt)},
                     dut)
    sys.stdout.write(report_to_text(report))
    return 0 if report.overall else 1


if __name__ == "__main__":
    sys.exit(main())
