"""Hypothesis strategies shared by the property tests."""

from __future__ import annotations

import string
from decimal import Decimal

from hypothesis import strategies as st

from comptest import (ConnectionMatrix, Connector, MethodInvocation,
                      ResourceDef, ResourceTable, SignalDef, SignalTable,
                      StatusDef, StatusTable, TestSequence, TestStep, INF)
from comptest.compiler import InitBlock, ScriptSignal, ScriptStep, Statement, TestScript
from comptest.expr import BinOp, Num, Paren, Var

idents = st.text(alphabet=string.ascii_letters + string.digits + "_",
                 min_size=1, max_size=8).filter(lambda s: s.strip() == s)
names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True)
lower_idents = st.from_regex(r"[a-z_][a-z0-9_]{0,7}", fullmatch=True)

decimals = st.decimals(allow_nan=False, allow_infinity=False,
                       min_value=Decimal("-1e12"), max_value=Decimal("1e12"),
                       places=6)
positive_decimals = st.decimals(min_value=Decimal("0.001"),
                                max_value=Decimal("100000"), places=3)
bit_literals = st.from_regex(r"[01]{1,8}B", fullmatch=True)
scalars = st.one_of(decimals, bit_literals, st.just(INF))
remarks = st.one_of(st.none(), st.text(
    alphabet=string.ascii_letters + string.digits + " ,.;", min_size=1,
    max_size=20).filter(lambda s: s.strip() == s and s != ""))


@st.composite
def status_tables(draw) -> StatusTable:
    names = draw(st.lists(idents, min_size=1, max_size=6, unique=True))
    rows = []
    for name in names:
        method = draw(st.sampled_from(["put_r", "put_can", "get_u", "put_v"]))
        rows.append(StatusDef(
            status=name,
            method=method,
            attribut=draw(st.sampled_from(["r", "u", "data", "v"])),
            var_x=draw(st.one_of(st.none(), idents)),
            nom=draw(st.one_of(st.none(), scalars)),
            min=draw(st.one_of(st.none(), decimals)),
            max=draw(st.one_of(st.none(), decimals)),
            d1=draw(st.one_of(st.none(), decimals, st.just(INF))),
            d2=draw(st.one_of(st.none(), decimals, st.just(INF))),
            d3=draw(st.one_of(st.none(), decimals, st.just(INF))),
            unit=draw(st.one_of(st.none(), st.sampled_from(["V", "Ω", "ms"]))),
        ))
    return StatusTable(rows)


@st.composite
def signal_tables(draw) -> SignalTable:
    names = draw(st.lists(idents, min_size=1, max_size=5, unique=True))
    pin_pool = draw(st.lists(idents, min_size=len(names) * 3,
                             max_size=len(names) * 3, unique=True))
    rows = []
    for i, name in enumerate(names):
        n_pins = draw(st.integers(min_value=1, max_value=3))
        pins = tuple(pin_pool[i * 3:i * 3 + n_pins])
        rows.append(SignalDef(
            name=name,
            direction=draw(st.sampled_from(["input", "output"])),
            pins=pins,
            initial_status=draw(idents),
        ))
    return SignalTable(rows)


@st.composite
def test_sequences(draw, signal_names: list[str] | None = None) -> TestSequence:
    if signal_names is None:
        signal_names = draw(st.lists(idents, min_size=1, max_size=5,
                                     unique=True))
    n_steps = draw(st.integers(min_value=1, max_value=6))
    steps = []
    for index in range(n_steps):
        assigned = draw(st.lists(st.sampled_from(signal_names), max_size=4,
                                 unique=True))
        assignments = {name: draw(idents) for name in assigned}
        steps.append(TestStep(index, draw(positive_decimals), assignments,
                              draw(remarks)))
    return TestSequence(draw(idents), steps)


@st.composite
def resource_tables(draw) -> ResourceTable:
    ids = draw(st.lists(idents, min_size=1, max_size=5, unique=True))
    spans = st.decimals(min_value=0, max_value=Decimal("1e6"),
                        allow_nan=False, allow_infinity=False, places=3)
    rows = []
    for rid in ids:
        low = draw(decimals)
        high = low + draw(spans)
        rows.append(ResourceDef(rid, draw(st.sampled_from(["put_r", "get_u"])),
                                draw(st.sampled_from(["r", "u"])), low, high,
                                draw(st.sampled_from(["", "V", "Ω"]))))
    return ResourceTable(rows)


@st.composite
def connection_matrices(draw) -> ConnectionMatrix:
    pins = draw(st.lists(lower_idents, min_size=1, max_size=6, unique=True))
    rows = draw(st.lists(idents, min_size=1, max_size=4, unique=True))
    cells = {}
    for rid in rows:
        for pin in pins:
            if draw(st.booleans()):
                cells[(rid, pin)] = Connector(
                    draw(st.sampled_from(["switch", "mux"])),
                    draw(st.integers(min_value=1, max_value=9)),
                    draw(st.integers(min_value=1, max_value=9)))
    return ConnectionMatrix(pins, rows, cells)


# --- expression trees in grammar shape (render/parse is lossless on them) --

expr_numbers = st.one_of(
    st.integers(min_value=0, max_value=10 ** 6).map(Decimal),
    st.tuples(st.integers(0, 999), st.integers(0, 99)).map(
        lambda t: Decimal(f"{t[0]}.{t[1]:02d}")),
    st.just(Decimal("1.00E+6")),
).map(Num)
expr_vars = st.sampled_from(
    ["ubatt", "vref", "a", "b", "c", "x0", "temp_c"]).map(Var)


@st.composite
def expressions(draw, depth: int = 2):
    """Random trees shaped like the grammar, so rendering re-parses exactly."""

    def factor(d):
        kind = draw(st.integers(0, 2 if d > 0 else 1))
        if kind == 0:
            return draw(expr_numbers)
        if kind == 1:
            return draw(expr_vars)
        return Paren(expr(d - 1))

    def term(d):
        node = factor(d)
        if draw(st.booleans()):
            node = BinOp(draw(st.sampled_from("*/")), node, factor(d))
        return node

    def expr(d):
        node = term(d)
        if draw(st.booleans()):
            node = BinOp(draw(st.sampled_from("+-")), node, term(d))
        return node

    return expr(depth)


# --- whole scripts ----------------------------------------------------------

def _param_safe(e):
    # a bare Num loads back as a plain number and a bare variable named
    # "inf" would load as the INF marker; exclude both
    if isinstance(e, Num):
        return False
    if isinstance(e, Var) and e.name == "inf":
        return False
    return True


param_values = st.one_of(
    decimals,
    bit_literals,
    st.just(INF),
    expressions().filter(_param_safe),
)


@st.composite
def invocations(draw, cls: str) -> MethodInvocation:
    prefix = {"put": "put_", "get": "get_"}[cls]
    method = prefix + draw(st.sampled_from(["r", "u", "can", "v", "i"]))
    names = draw(st.lists(lower_idents, min_size=1, max_size=3, unique=True))
    return MethodInvocation(method, {n: draw(param_values) for n in names})


@st.composite
def test_scripts(draw) -> TestScript:
    n_signals = draw(st.integers(min_value=1, max_value=4))
    names = draw(st.lists(lower_idents, min_size=n_signals, max_size=n_signals,
                          unique=True))
    pin_pool = draw(st.lists(lower_idents, min_size=n_signals * 2,
                             max_size=n_signals * 2, unique=True))
    manifest = []
    for i, name in enumerate(names):
        n_pins = draw(st.integers(min_value=1, max_value=2))
        manifest.append(ScriptSignal(
            name, draw(st.sampled_from(["input", "output"])),
            tuple(pin_pool[i * 2:i * 2 + n_pins])))
    inputs = [s for s in manifest if s.direction == "input"]
    outputs = [s for s in manifest if s.direction == "output"]
    init = InitBlock(draw(positive_decimals), [
        Statement(s.name, draw(invocations("put"))) for s in inputs])
    steps = []
    for index in range(draw(st.integers(min_value=1, max_value=4))):
        statements = []
        for sig in draw(st.lists(st.sampled_from(manifest), max_size=3,
                                 unique_by=lambda s: s.name)):
            cls = "put" if sig.direction == "input" else "get"
            statements.append(Statement(sig.name, draw(invocations(cls))))
        steps.append(ScriptStep(index, draw(positive_decimals), statements))
    return TestScript(draw(idents), draw(idents), manifest, init, steps)
