"""Interpreter-side loader: parse a test-script XML into an executable plan.

Loading is strict about the script schema (it is the portability contract)
but deliberately tolerant about method names: an unknown method loads fine
and only fails later if no stand resource supports it. Expressions are
parsed eagerly so a syntactically broken script is rejected without any
stand at all; evaluation waits until execution, when the stand environment
is known.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from xml.parsers import expat

from .compiler import (FORMAT_VERSION, InitBlock, MethodInvocation, ParamValue,
                       ScriptSignal, ScriptStep, Statement, TestScript)
from .errors import ExprError, ScriptError
from .expr import Num, parse_expr
from .sheets import INF, method_class

_NUMBER = re.compile(r"[+-]?(\d+(\.\d+)?|\.\d+)([eE][+-]?\d+)?\Z")
_BIT_LITERAL = re.compile(r"[01]+B\Z")


@dataclass
class _Node:
    tag: str
    attrs: dict[str, str]
    line: int
    children: list["_Node"] = field(default_factory=list)


def _parse_tree(text: str) -> _Node:
    parser = expat.ParserCreate()
    parser.ordered_attributes = True
    root: list[_Node] = []
    stack: list[_Node] = []

    def start(tag, attr_list):
        attrs = dict(zip(attr_list[0::2], attr_list[1::2]))
        node = _Node(tag, attrs, parser.CurrentLineNumber)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(tag):
        stack.pop()

    def chars(data):
        if data.strip():
            raise ScriptError(f"unexpected text content {data.strip()!r}",
                              line=parser.CurrentLineNumber)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        raise ScriptError(expat.errors.messages[exc.code],
                          line=exc.lineno) from None
    if not root:
        raise ScriptError("empty document")
    return root[0]


def _require_attrs(node: _Node, names: tuple[str, ...]):
    for name in names:
        if name not in node.attrs:
            raise ScriptError(f"<{node.tag}> is missing attribute '{name}'",
                              line=node.line)
    for name in node.attrs:
        if name not in names:
            raise ScriptError(f"<{node.tag}> has unexpected attribute '{name}'",
                              line=node.line)


def classify_value(text: str, line: int | None = None) -> ParamValue:
    """Map an attribute value to its parameter type.

    INF marker first, then bit literals, then plain numbers, then the
    expression grammar; anything else is a schema violation.
    """
    if text.casefold() == "inf":
        return INF
    if _BIT_LITERAL.match(text):
        return text
    if _NUMBER.match(text):
        return Decimal(text)
    try:
        node = parse_expr(text)
    except ExprError as exc:
        raise ScriptError(f"bad parameter value {text!r}: {exc}",
                          line=line) from None
    if isinstance(node, Num):
        return node.value
    return node


def _parse_dt(node: _Node) -> Decimal:
    raw = node.attrs.get("dt")
    if raw is None:
        raise ScriptError(f"<{node.tag}> is missing dt", line=node.line)
    if not _NUMBER.match(raw):
        raise ScriptError(f"malformed dt {raw!r}", line=node.line)
    dt = Decimal(raw)
    if dt <= 0:
        raise ScriptError(f"dt must be > 0, got {raw}", line=node.line)
    return dt


def _lowercase(name: str, what: str, line: int) -> str:
    if name != name.lower():
        raise ScriptError(f"{what} '{name}' must be lowercase in scripts",
                          line=line)
    return name


def _parse_statements(parent: _Node, manifest: dict[str, ScriptSignal],
                      where: str) -> list[Statement]:
    statements: list[Statement] = []
    for node in parent.children:
        if node.tag != "signal":
            raise ScriptError(f"unexpected element <{node.tag}> in {where}",
                              line=node.line)
        _require_attrs(node, ("name",))
        name = _lowercase(node.attrs["name"], "signal name", node.line)
        if name not in manifest:
            raise ScriptError(f"signal '{name}' is not in the manifest",
                              line=node.line)
        if not node.children:
            raise ScriptError(f"signal '{name}' has no method statement",
                              line=node.line)
        for method_node in node.children:
            if method_node.children:
                raise ScriptError(f"method <{method_node.tag}> must be empty",
                                  line=method_node.line)
            params = {key: classify_value(value, method_node.line)
                      for key, value in method_node.attrs.items()}
            inv = MethodInvocation(method_node.tag, params)
            cls = method_class(inv.method)
            direction = manifest[name].direction
            if cls == "put" and direction != "input":
                raise ScriptError(f"stimulus method '{inv.method}' on "
                                  f"{direction} signal '{name}'",
                                  line=method_node.line)
            if cls == "get" and direction != "output":
                raise ScriptError(f"check method '{inv.method}' on "
                                  f"{direction} signal '{name}'",
                                  line=method_node.line)
            statements.append(Statement(name, inv))
    return statements


@dataclass
class TestPlan:
    """A loaded script plus the carry-forward closure the interpreter needs.

    ``active_stimuli[k]`` maps signal name to the stimulus in force during
    step k (after applying step k's own statements); ``checks[k]`` lists the
    checks sampled at the end of step k's dwell.
    """

    script: TestScript
    signals: dict[str, ScriptSignal]
    init_stimuli: dict[str, MethodInvocation]
    active_stimuli: list[dict[str, MethodInvocation]]
    checks: list[list[Statement]]


def _closure(script: TestScript) -> tuple[dict[str, MethodInvocation],
                                          list[dict[str, MethodInvocation]],
                                          list[list[Statement]]]:
    init = {st.signal: st.invocation for st in script.init.statements}
    current = dict(init)
    active: list[dict[str, MethodInvocation]] = []
    checks: list[list[Statement]] = []
    for step in script.steps:
        step_checks: list[Statement] = []
        for st in step.statements:
            cls = method_class(st.invocation.method)
            if cls == "put":
                current[st.signal] = st.invocation
            elif cls == "get":
                step_checks.append(st)
            # Unknown classes are one-shot statements: they take part in
            # allocation for their step but are neither held nor sampled.
        active.append(dict(current))
        checks.append(step_checks)
    return init, active, checks


def load_script(text: str) -> TestPlan:
    """Parse and validate a test script; raises ScriptError with a line
    number on any schema violation."""
    root = _parse_tree(text)
    if root.tag != "test":
        raise ScriptError(f"root element must be <test>, got <{root.tag}>",
                          line=root.line)
    _require_attrs(root, ("name", "dut", "format"))
    if root.attrs["format"] != FORMAT_VERSION:
        raise ScriptError(f"unsupported format '{root.attrs['format']}' "
                          f"(this interpreter reads format {FORMAT_VERSION})",
                          line=root.line)

    children = list(root.children)
    if not children or children[0].tag != "signals":
        raise ScriptError("first element must be the <signals> manifest",
                          line=root.line)
    signals_node = children[0]
    _require_attrs(signals_node, ())
    manifest: dict[str, ScriptSignal] = {}
    order: list[ScriptSignal] = []
    for node in signals_node.children:
        if node.tag != "signal":
            raise ScriptError(f"unexpected element <{node.tag}> in manifest",
                              line=node.line)
        _require_attrs(node, ("name", "direction", "pins"))
        name = _lowercase(node.attrs["name"], "signal name", node.line)
        if name in manifest:
            raise ScriptError(f"duplicate manifest signal '{name}'",
                              line=node.line)
        direction = node.attrs["direction"]
        if direction not in ("input", "output"):
            raise ScriptError(f"bad direction {direction!r}", line=node.line)
        pins = tuple(_lowercase(p, "pin", node.line)
                     for p in node.attrs["pins"].split("|") if p)
        if not pins:
            raise ScriptError(f"signal '{name}' lists no pins", line=node.line)
        if node.children:
            raise ScriptError("manifest entries must be empty elements",
                              line=node.line)
        sig = ScriptSignal(name, direction, pins)
        manifest[name] = sig
        order.append(sig)

    if len(children) < 2 or children[1].tag != "init":
        raise ScriptError("expected <init> after the manifest", line=root.line)
    init_node = children[1]
    _require_attrs(init_node, ("dt",))
    init = InitBlock(_parse_dt(init_node),
                     _parse_statements(init_node, manifest, "<init>"))
    for st in init.statements:
        if method_class(st.invocation.method) == "get":
            raise ScriptError(f"check method '{st.invocation.method}' is not "
                              f"allowed in <init>", line=init_node.line)

    steps: list[ScriptStep] = []
    for pos, node in enumerate(children[2:]):
        if node.tag != "step":
            raise ScriptError(f"unexpected element <{node.tag}>", line=node.line)
        _require_attrs(node, ("n", "dt"))
        raw_n = node.attrs["n"]
        if not raw_n.isdigit():
            raise ScriptError(f"malformed step index {raw_n!r}", line=node.line)
        index = int(raw_n)
        if index != pos:
            raise ScriptError(f"non-dense step index {index} (expected {pos})",
                              line=node.line)
        steps.append(ScriptStep(index, _parse_dt(node),
                                _parse_statements(node, manifest,
                                                  f"step {index}")))

    try:
        script = TestScript(root.attrs["name"], root.attrs["dut"], order, init,
                            steps)
    except ValueError as exc:
        raise ScriptError(str(exc)) from None
    init_stimuli, active, checks = _closure(script)
    return TestPlan(script, manifest, init_stimuli, active, checks)
