"""Discrete-time execution of a test plan on a virtual stand.

Each step allocates resources for the stimuli in force plus the step's
checks, applies whatever stimuli changed, advances the DUT by the dwell
and samples every check pin at the end of it. Check failures are recorded
and execution continues; allocation failures and unbound environment
variables abort the run. The clock is virtual and exact (decimal
arithmetic), so a 300 s test finishes in milliseconds unless wall-clock
pacing is requested.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Mapping

from .compiler import MethodInvocation, render_value
from .dut import DutModel
from .errors import AllocationError, DutError, EvalError
from .expr import Num, Var, BinOp, Paren, eval_expr
from .script import TestPlan
from .sheets import method_class
from .stand import BUS_METHODS, Binding, Requirement, StandModel, allocate


@dataclass
class StimulusRecord:
    signal: str
    pin: str
    method: str
    params: dict[str, str]
    delivery: str  # "resource" | "open_circuit" | "bus"
    resource: str | None
    connector: str | None
    held: bool
    changed: bool


@dataclass
class CheckRecord:
    signal: str
    pin: str
    method: str
    low: Decimal | None
    high: Decimal | None
    measured: Decimal
    passed: bool


@dataclass
class StepRecord:
    index: int  # -1 is the init/settle block
    dt: Decimal
    t_end: Decimal
    stimuli: list[StimulusRecord] = field(default_factory=list)
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass
class RunReport:
    name: str
    dut: str
    overall: bool
    aborted: bool
    abort_step: int | None
    abort_kind: str | None  # "allocation" | "environment"
    abort_message: str | None
    settle: StepRecord | None
    steps: list[StepRecord]
    steps_total: int

    @property
    def steps_passed(self) -> int:
        return sum(1 for s in self.steps if s.passed)

    @property
    def checks_total(self) -> int:
        return sum(len(s.checks) for s in self.steps)

    @property
    def checks_failed(self) -> int:
        return sum(1 for s in self.steps for c in s.checks if not c.passed)

    @property
    def step_time(self) -> Decimal:
        return sum((s.dt for s in self.steps), Decimal("0"))

    @property
    def total_time(self) -> Decimal:
        settle = self.settle.dt if self.settle else Decimal("0")
        return settle + self.step_time


def _evaluate(inv: MethodInvocation, env: Mapping[str, Decimal]) -> MethodInvocation:
    params = {}
    for name, value in inv.params.items():
        if isinstance(value, (Num, Var, BinOp, Paren)):
            params[name] = eval_expr(value, env)
        else:
            params[name] = value
    return MethodInvocation(inv.method, params)


def _bounds(inv: MethodInvocation) -> tuple[Decimal | None, Decimal | None]:
    low = high = None
    for name, value in inv.params.items():
        if name.endswith("_min") and isinstance(value, Decimal) and low is None:
            low = value
        elif name.endswith("_max") and isinstance(value, Decimal) and high is None:
            high = value
    return low, high


def _aux(inv: MethodInvocation) -> dict:
    first = next(iter(inv.params), None)
    return {k: v for k, v in inv.params.items() if k != first}


def _stimulus_records(bindings: list[Binding], changed: set[str],
                      check_pins: set[tuple[str, str]]) -> list[StimulusRecord]:
    records = []
    for b in bindings:
        req = b.requirement
        if (req.signal, req.pin) in check_pins:
            continue
        records.append(StimulusRecord(
            signal=req.signal or req.pin,
            pin=req.pin,
            method=req.invocation.method,
            params={k: render_value(v) for k, v in req.invocation.params.items()},
            delivery=b.delivery,
            resource=b.resource_id,
            connector=str(b.connector) if b.connector else None,
            held=b.held,
            changed=(req.signal or req.pin) in changed,
        ))
    return records


def execute(plan: TestPlan, stand: StandModel, env: Mapping[str, Decimal],
            dut: DutModel, *, pace: bool = False) -> RunReport:
    """Run ``plan`` against ``dut`` on ``stand`` under ``env``.

    The report is complete and deterministic: byte-identical for identical
    inputs. The run aborts on allocation errors and unbound environment
    variables; failed checks only mark their step as failed.
    """
    env = {k: Decimal(v) for k, v in env.items()}
    script = plan.script
    steps: list[StepRecord] = []
    settle_record: StepRecord | None = None
    clock = Decimal("0")
    held: dict[str, Binding] = {}
    prev_applied: dict[str, MethodInvocation] = {}

    def aborted(step_index, kind, message):
        return RunReport(script.name, script.dut, overall=False, aborted=True,
                         abort_step=step_index, abort_kind=kind,
                         abort_message=message, settle=settle_record,
                         steps=steps, steps_total=len(script.steps))

    def requirements_for(stimuli: dict[str, MethodInvocation],
                         one_shots: list, checks: list) -> list[Requirement]:
        reqs: list[Requirement] = []
        for signal, inv in stimuli.items():
            if inv.method in BUS_METHODS:
                reqs.append(Requirement(signal, inv, signal))
            else:
                for pin in plan.signals[signal].pins:
                    reqs.append(Requirement(pin, inv, signal))
        for st in one_shots:
            for pin in plan.signals[st.signal].pins:
                reqs.append(Requirement(pin, st.invocation, st.signal))
        for signal, inv in checks:
            for pin in plan.signals[signal].pins:
                reqs.append(Requirement(pin, inv, signal))
        return reqs

    def apply(signal: str, inv: MethodInvocation):
        value = inv.principal_value()
        aux = _aux(inv)
        if inv.method in BUS_METHODS:
            dut.set_input(signal, value, aux)
        else:
            for pin in plan.signals[signal].pins:
                dut.set_input(pin, value, aux)
        prev_applied[signal] = inv

    # Init: apply every initial stimulus, then let the DUT settle.
    try:
        init_eval = {sig: _evaluate(inv, env)
                     for sig, inv in plan.init_stimuli.items()}
    except EvalError as exc:
        return aborted(None, "environment", str(exc))
    try:
        alloc = allocate(requirements_for(init_eval, [], []), stand, held)
    except AllocationError as exc:
        return aborted(None, "allocation", str(exc))
    held = alloc.holds()
    try:
        for signal, inv in init_eval.items():
            apply(signal, inv)
    except DutError as exc:
        return aborted(None, "environment", str(exc))
    clock += script.init.dt
    dut.advance(script.init.dt)
    if pace:
        time.sleep(float(script.init.dt))
    settle_record = StepRecord(-1, script.init.dt, clock,
                               _stimulus_records(alloc.bindings,
                                                 set(init_eval), set()))

    for k, step in enumerate(script.steps):
        try:
            active_eval = {sig: _evaluate(inv, env)
                           for sig, inv in plan.active_stimuli[k].items()}
            checks_eval = [(st.signal, _evaluate(st.invocation, env))
                           for st in plan.checks[k]]
        except EvalError as exc:
            return aborted(k, "environment", str(exc))
        one_shots = [st for st in step.statements
                     if method_class(st.invocation.method) is None]
        check_pins = {(signal, pin) for signal, inv in checks_eval
                      for pin in plan.signals[signal].pins}
        try:
            alloc = allocate(
                requirements_for(active_eval, one_shots, checks_eval),
                stand, held)
        except AllocationError as exc:
            return aborted(k, "allocation", str(exc))
        held = alloc.holds()

        changed: set[str] = set()
        try:
            for st in step.statements:
                if method_class(st.invocation.method) != "put":
                    continue
                inv = active_eval[st.signal]
                if prev_applied.get(st.signal) != inv:
                    apply(st.signal, inv)
                    changed.add(st.signal)
        except DutError as exc:
            return aborted(k, "environment", str(exc))

        clock += step.dt
        dut.advance(step.dt)
        if pace:
            time.sleep(float(step.dt))

        checks: list[CheckRecord] = []
        try:
            for signal, inv in checks_eval:
                low, high = _bounds(inv)
                for pin in plan.signals[signal].pins:
                    measured = dut.read_pin(pin)
                    ok = ((low is None or low <= measured)
                          and (high is None or measured <= high))
                    checks.append(CheckRecord(signal, pin, inv.method, low,
                                              high, measured, ok))
        except DutError as exc:
            return aborted(k, "environment", str(exc))

        steps.append(StepRecord(step.index, step.dt, clock,
                                _stimulus_records(alloc.bindings, changed,
                                                  check_pins),
                                checks))

    overall = all(s.passed for s in steps)
    return RunReport(script.name, script.dut, overall=overall, aborted=False,
                     abort_step=None, abort_kind=None, abort_message=None,
                     settle=settle_record, steps=steps,
                     steps_total=len(script.steps))


# --- report rendering ------------------------------------------------------

def _dec(value: Decimal | None) -> str | None:
    return None if value is None else str(value)


def report_to_dict(report: RunReport) -> dict:
    """JSON-ready dict; numeric values are decimal strings so the report
    round-trips exactly."""

    def step_dict(s: StepRecord) -> dict:
        return {
            "n": s.index,
            "dt": str(s.dt),
            "t_end": str(s.t_end),
            "passed": s.passed,
            "stimuli": [{
                "signal": r.signal,
                "pin": r.pin,
                "method": r.method,
                "params": r.params,
                "delivery": r.delivery,
                "resource": r.resource,
                "connector": r.connector,
                "held": r.held,
                "changed": r.changed,
            } for r in s.stimuli],
            "checks": [{
                "signal": c.signal,
                "pin": c.pin,
                "method": c.method,
                "min": _dec(c.low),
                "max": _dec(c.high),
                "measured": str(c.measured),
                "passed": c.passed,
            } for c in s.checks],
        }

    return {
        "test": report.name,
        "dut": report.dut,
        "overall": "pass" if report.overall else "fail",
        "aborted": report.aborted,
        "abort": (None if not report.aborted else {
            "step": report.abort_step,
            "kind": report.abort_kind,
            "message": report.abort_message,
        }),
        "init": step_dict(report.settle) if report.settle else None,
        "steps": [step_dict(s) for s in report.steps],
        "totals": {
            "steps_total": report.steps_total,
            "steps_run": len(report.steps),
            "steps_passed": report.steps_passed,
            "checks_total": report.checks_total,
            "checks_failed": report.checks_failed,
            "step_time": str(report.step_time),
            "total_time": str(report.total_time),
        },
    }


def report_to_json(report: RunReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def report_to_text(report: RunReport) -> str:
    lines = [f"test '{report.name}' on dut '{report.dut}'"]
    if report.settle:
        lines.append(f"init: dwell {report.settle.dt} s, "
                     f"{len(report.settle.stimuli)} stimuli")
    for s in report.steps:
        bits = []
        for c in s.checks:
            lo = "-inf" if c.low is None else str(c.low)
            hi = "+inf" if c.high is None else str(c.high)
            verdict = "ok" if c.passed else "FAIL"
            bits.append(f"{c.signal}.{c.pin}={c.measured} in [{lo}, {hi}] "
                        f"{verdict}")
        detail = "; ".join(bits) if bits else "no checks"
        mark = "pass" if s.passed else "FAIL"
        lines.append(f"step {s.index}: dt={s.dt} t_end={s.t_end} {mark} "
                     f"({detail})")
    if report.aborted:
        where = "init" if report.abort_step is None else f"step {report.abort_step}"
        lines.append(f"aborted at {where} [{report.abort_kind}]: "
                     f"{report.abort_message}")
    verdict = "PASS" if report.overall else "FAIL"
    lines.append(f"RESULT: {verdict} (steps {report.steps_passed}/"
                 f"{report.steps_total}, checks "
                 f"{report.checks_total - report.checks_failed}/"
                 f"{report.checks_total}, virtual time {report.total_time} s)")
    return "\n".join(lines) + "\n"
