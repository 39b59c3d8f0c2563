"""Device-under-test models and the built-in registry.

The executor talks to a DUT through three calls: ``set_input`` (a
resistance on a pin, or a bus payload on a logical input), ``advance``
(virtual time) and ``read_pin`` (output voltage). Models must be
deterministic: the same input sequence always reads back the same values.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Callable, Mapping, Protocol

from .errors import DutError
from .sheets import INF


class DutModel(Protocol):
    def set_input(self, name: str, value, aux: Mapping | None = None) -> None: ...

    def advance(self, dt: Decimal) -> None: ...

    def read_pin(self, pin: str) -> Decimal: ...


def _bit_value(value) -> bool:
    if isinstance(value, str) and value.endswith("B"):
        return int(value[:-1], 2) != 0
    if isinstance(value, Decimal):
        return value != 0
    raise DutError(f"expected a bit payload, got {value!r}")


@dataclass
class InteriorLightConfig:
    """Tuning knobs of the reference interior-illumination controller.

    ``retrigger_on_reopen`` restarts the lamp timer on every closed-to-open
    door transition; with False the first transition wins until all doors
    close again.
    """

    ubatt: Decimal
    timeout_s: Decimal = Decimal("300")
    r_door_threshold_ohm: Decimal = Decimal("100")
    retrigger_on_reopen: bool = True


class InteriorLightDut:
    """Reference model: night-gated interior lamp with a courtesy timeout.

    Door-switch inputs are resistances: below the threshold the contact is
    closed and the door counts as open; at or above the threshold, or with
    an open circuit, the door is closed. While NIGHT is set and at least
    one door is open, both lamp pins read the supply voltage until the
    timeout since the most recent door-opening has elapsed. The ignition
    input is recorded but plays no part in the lamp logic.
    """

    DOOR_PINS = ("ds_fl", "ds_fr", "ds_rl", "ds_rr")
    LAMP_PINS = ("int_ill_f", "int_ill_r")

    def __init__(self, config: InteriorLightConfig):
        self.config = config
        self.now = Decimal("0")
        self.doors = {pin: False for pin in self.DOOR_PINS}
        self.night = False
        self.ignition = None
        self._open_since: Decimal | None = None

    def set_input(self, name: str, value, aux: Mapping | None = None) -> None:
        name = name.lower()
        if name in self.doors:
            if value is INF:
                is_open = False
            elif isinstance(value, Decimal):
                is_open = value < self.config.r_door_threshold_ohm
            else:
                raise DutError(f"door input {name} expects a resistance, "
                               f"got {value!r}")
            was_open = self.doors[name]
            self.doors[name] = is_open
            if is_open and not was_open:
                if self.config.retrigger_on_reopen or self._open_since is None:
                    self._open_since = self.now
            if not any(self.doors.values()):
                self._open_since = None
        elif name == "night":
            self.night = _bit_value(value)
        elif name == "ign_st":
            self.ignition = value
        else:
            raise DutError(f"unknown input '{name}'")

    def advance(self, dt: Decimal) -> None:
        if dt < 0:
            raise DutError("time only advances")
        self.now += dt

    @property
    def lamp_on(self) -> bool:
        return (self.night
                and any(self.doors.values())
                and self._open_since is not None
                and self.now - self._open_since < self.config.timeout_s)

    def read_pin(self, pin: str) -> Decimal:
        pin = pin.lower()
        if pin not in self.LAMP_PINS:
            raise DutError(f"unknown output pin '{pin}'")
        return self.config.ubatt if self.lamp_on else Decimal("0")


def reference_dut(config: InteriorLightConfig) -> InteriorLightDut:
    return InteriorLightDut(config)


def _interior_from_env(env: Mapping[str, Decimal]) -> InteriorLightDut:
    if "ubatt" not in env:
        raise DutError("dut 'interior_illumination' requires the environment "
                       "variable 'ubatt'")
    return reference_dut(InteriorLightConfig(ubatt=Decimal(env["ubatt"])))


#: name -> factory(env). The CLI selects DUT models from here.
DUT_REGISTRY: dict[str, Callable[[Mapping[str, Decimal]], DutModel]] = {
    "interior_illumination": _interior_from_env,
}


def build_dut(name: str, env: Mapping[str, Decimal]) -> DutModel:
    if name not in DUT_REGISTRY:
        known = ", ".join(sorted(DUT_REGISTRY))
        raise DutError(f"unknown dut '{name}' (available: {known})")
    return DUT_REGISTRY[name](env)
