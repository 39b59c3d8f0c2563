"""The virtual test stand's resource model and the allocation search.

A stand consists of resources (instruments described by the one method
they support and the valid parameter range) and a connection matrix that
wires resources to DUT pins through switch (``SwN.M``) and multiplexer
(``MxN.M``) connectors. For each step the interpreter asks ``allocate``
for a conflict-free assignment of requirements to resources.

Exclusivity rules:
  * while a stimulus is held, its resource drives exactly one pin and its
    connector group (``Sw1``, ``Mx3``, ...) is engaged at one position;
  * check-class (get) bindings are sampled sequentially at the end of the
    dwell, so checks may time-share a resource and a connector group among
    themselves, but never with a held stimulus.

Two requirement shapes consume no resource at all: open-circuit stimuli
(principal parameter INF; the connector is simply disengaged) and
bus-delivered methods (``put_can``), which reach the DUT without an
electrical path through the matrix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterator, Mapping, Sequence

from .compiler import MethodInvocation
from .errors import AllocationError, StandError
from .sheets import method_class

#: Methods delivered over a bus instead of an electrical pin path.
BUS_METHODS = frozenset({"put_can"})

_CONNECTOR = re.compile(r"(Sw|Mx)(\d+)\.(\d+)\Z")
_KIND = {"Sw": "switch", "Mx": "mux"}
_PREFIX = {"switch": "Sw", "mux": "Mx"}


@dataclass(frozen=True)
class Connector:
    kind: str  # "switch" | "mux"
    group: int
    position: int

    def __str__(self):
        return f"{_PREFIX[self.kind]}{self.group}.{self.position}"

    @property
    def group_key(self) -> tuple[str, int]:
        return (self.kind, self.group)


def parse_connector(text: str) -> Connector:
    m = _CONNECTOR.match(text)
    if not m:
        raise ValueError(f"unknown connector syntax {text!r} "
                         f"(expected SwN.M or MxN.M)")
    return Connector(_KIND[m.group(1)], int(m.group(2)), int(m.group(3)))


@dataclass
class ResourceDef:
    """One resource: the method it supports and the valid parameter range."""

    id: str
    method: str
    attribut: str
    min: Decimal
    max: Decimal
    unit: str = ""
    row: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.min > self.max:
            raise ValueError(f"resource {self.id}: min {self.min} > max {self.max}")


@dataclass
class ResourceTable:
    resources: list[ResourceDef]

    def __post_init__(self):
        seen: set[str] = set()
        for res in self.resources:
            if res.id in seen:
                raise ValueError(f"duplicate resource id {res.id!r}")
            seen.add(res.id)
        self._by_id = {res.id: res for res in self.resources}

    def __iter__(self) -> Iterator[ResourceDef]:
        return iter(self.resources)

    def __len__(self):
        return len(self.resources)

    def __getitem__(self, rid: str) -> ResourceDef:
        return self._by_id[rid]

    def __contains__(self, rid: str):
        return rid in self._by_id


@dataclass
class ConnectionMatrix:
    """Resource-to-pin wiring. Pins are normalized to lowercase."""

    pins: list[str]
    rows: list[str]
    cells: dict[tuple[str, str], Connector]

    def connector_for(self, resource_id: str, pin: str) -> Connector | None:
        return self.cells.get((resource_id, pin))


@dataclass
class StandModel:
    resources: ResourceTable
    matrix: ConnectionMatrix

    def __post_init__(self):
        for rid in self.matrix.rows:
            if rid not in self.resources:
                raise StandError(f"connection matrix row '{rid}' is not in "
                                 f"the resource table")


@dataclass
class Requirement:
    """One thing a step needs: an invocation delivered to one pin."""

    pin: str
    invocation: MethodInvocation
    signal: str | None = None

    @property
    def role(self) -> str:
        # "get" bindings time-share; everything else is exclusive.
        return method_class(self.invocation.method) or "put"


@dataclass
class Binding:
    requirement: Requirement
    delivery: str  # "resource" | "open_circuit" | "bus"
    resource_id: str | None = None
    connector: Connector | None = None
    held: bool = False


@dataclass
class Allocation:
    bindings: list[Binding]

    def holds(self) -> dict[str, Binding]:
        """Stimulus bindings that persist into the next step."""
        return {b.requirement.pin: b for b in self.bindings
                if b.delivery == "resource" and b.requirement.role != "get"}


def _range_offence(res: ResourceDef, inv: MethodInvocation) -> tuple[str, Decimal] | None:
    for name, value in inv.params.items():
        if isinstance(value, Decimal) and not (res.min <= value <= res.max):
            return name, value
    return None


def _static_reject(res: ResourceDef, req: Requirement,
                   matrix: ConnectionMatrix) -> str | None:
    """Reason this resource can never serve this requirement, else None."""
    if res.method != req.invocation.method:
        return f"no method (supports {res.method})"
    if matrix.connector_for(res.id, req.pin) is None:
        return "no connection"
    offence = _range_offence(res, req.invocation)
    if offence is not None:
        name, value = offence
        return f"range: {name}={value} outside [{res.min}, {res.max}]"
    return None


class _Engagements:
    """Occupancy bookkeeping that supports get-class time-sharing."""

    def __init__(self):
        self.put_res: dict[str, str] = {}              # resource id -> pin
        self.get_res: dict[str, int] = {}              # resource id -> samples
        self.put_grp: dict[tuple[str, int], str] = {}  # group -> pin
        self.get_grp: dict[tuple[str, int], int] = {}

    def conflict(self, res_id: str, conn: Connector, role: str) -> str | None:
        if res_id in self.put_res:
            return f"conflict: resource holds a stimulus for pin {self.put_res[res_id]}"
        if role != "get" and self.get_res.get(res_id, 0):
            return "conflict: resource is sampling checks this step"
        grp = conn.group_key
        if grp in self.put_grp:
            return (f"conflict: connector group {_PREFIX[conn.kind]}{conn.group} "
                    f"is engaged for pin {self.put_grp[grp]}")
        if role != "get" and self.get_grp.get(grp, 0):
            return (f"conflict: connector group {_PREFIX[conn.kind]}{conn.group} "
                    f"is sampling checks this step")
        return None

    def engage(self, res_id: str, conn: Connector, role: str, pin: str):
        grp = conn.group_key
        if role == "get":
            self.get_res[res_id] = self.get_res.get(res_id, 0) + 1
            self.get_grp[grp] = self.get_grp.get(grp, 0) + 1
        else:
            self.put_res[res_id] = pin
            self.put_grp[grp] = pin

    def release(self, res_id: str, conn: Connector, role: str):
        grp = conn.group_key
        if role == "get":
            self.get_res[res_id] -= 1
            self.get_grp[grp] -= 1
        else:
            del self.put_res[res_id]
            del self.put_grp[grp]


def allocate(requirements: Sequence[Requirement], stand: StandModel,
             held: Mapping[str, Binding] | None = None) -> Allocation:
    """Find a conflict-free binding for every requirement.

    ``held`` carries the stimulus bindings of the previous step. A held
    stimulus whose value is unchanged keeps its binding (moving it would
    glitch a live signal); a changed stimulus prefers its old resource but
    may move. The search is deterministic: resources are tried in table
    row order, requirements in the given order.

    Raises AllocationError naming the deepest unsatisfiable requirement and
    every candidate resource with its rejection reason.
    """
    held = dict(held or {})
    reqs = list(requirements)
    out: list[Binding | None] = [None] * len(reqs)
    engaged = _Engagements()
    free: list[int] = []

    for i, req in enumerate(reqs):
        if req.invocation.method in BUS_METHODS:
            out[i] = Binding(req, "bus")
            continue
        if req.invocation.is_open_circuit():
            out[i] = Binding(req, "open_circuit")
            continue
        prev = held.get(req.pin)
        if (prev is not None and prev.resource_id in stand.resources
                and prev.requirement.invocation == req.invocation):
            # Unchanged held stimulus: the binding is pinned.
            clash = engaged.conflict(prev.resource_id, prev.connector, req.role)
            if clash is not None:
                raise AllocationError(pin=req.pin, method=req.invocation.method,
                                      parameter=None,
                                      candidates=[(prev.resource_id, clash)])
            engaged.engage(prev.resource_id, prev.connector, req.role, req.pin)
            out[i] = Binding(req, "resource", prev.resource_id, prev.connector,
                             held=True)
            continue
        free.append(i)

    def candidates(req: Requirement) -> list[ResourceDef]:
        ordered = list(stand.resources)
        prev = held.get(req.pin)
        if prev is not None and prev.resource_id in stand.resources:
            first = stand.resources[prev.resource_id]
            ordered = [first] + [r for r in ordered if r.id != first.id]
        return ordered

    deepest: list = [-1, None, None]  # depth, requirement, rejections

    def solve(k: int) -> bool:
        if k == len(free):
            return True
        i = free[k]
        req = reqs[i]
        rejections: list[tuple[str, str]] = []
        for res in candidates(req):
            reason = _static_reject(res, req, stand.matrix)
            if reason is not None:
                rejections.append((res.id, reason))
                continue
            conn = stand.matrix.connector_for(res.id, req.pin)
            clash = engaged.conflict(res.id, conn, req.role)
            if clash is not None:
                rejections.append((res.id, clash))
                continue
            engaged.engage(res.id, conn, req.role, req.pin)
            out[i] = Binding(req, "resource", res.id, conn)
            if solve(k + 1):
                return True
            engaged.release(res.id, conn, req.role)
            out[i] = None
            rejections.append((res.id, "conflict: leads to a dead end"))
        if k >= deepest[0]:
            deepest[0], deepest[1], deepest[2] = k, req, rejections
        return False

    if not solve(0):
        _, req, rejections = deepest
        parameter = None
        for _, reason in rejections:
            if reason.startswith("range:"):
                parameter = reason.split(":", 1)[1].strip().split("=", 1)[0]
                break
        raise AllocationError(pin=req.pin, method=req.invocation.method,
                              parameter=parameter, candidates=rejections)
    return Allocation([b for b in out if b is not None])
