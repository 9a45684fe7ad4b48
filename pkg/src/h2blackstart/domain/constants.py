from __future__ import annotations

from enum import Enum


class ValueEnum(Enum):
    def __str__(self) -> str:
        return str(self.value)

    @classmethod
    def from_string(cls, value: str):
        for member in cls:
            if str(member.value).lower() == str(value).lower():
                return member
        raise NotImplementedError(f"Unknown {cls.__name__}: {value}")

    @classmethod
    def values(cls) -> list[str]:
        return [str(member.value) for member in cls]


class BusRole(ValueEnum):
    REFERENCE = "reference"
    PQ = "pq"
    PV = "pv"


class BranchKind(ValueEnum):
    LINE = "line"
    TRANSFORMER = "transformer"


class ControlMode(ValueEnum):
    VCL = "vcl"
    PCL = "pcl"
    PVCL = "pvcl"
    APCL = "apcl"
    EMERGENCY = "emergency"
    DC_REGULATION = "dc-regulation"


class DeviceKind(ValueEnum):
    PEMFC = "pemfc"
    LSC = "lsc"
    MSC = "msc"
    ELZ = "elz"


LEGAL_MODES: dict[DeviceKind, frozenset[ControlMode]] = {
    DeviceKind.PEMFC: frozenset({ControlMode.VCL, ControlMode.PVCL, ControlMode.PCL}),
    DeviceKind.LSC: frozenset({ControlMode.DC_REGULATION}),
    DeviceKind.MSC: frozenset({ControlMode.VCL, ControlMode.PCL, ControlMode.APCL}),
    DeviceKind.ELZ: frozenset(
        {ControlMode.PCL, ControlMode.VCL, ControlMode.EMERGENCY}
    ),
}


class Switch(ValueEnum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"


# owner device and the mode selected by each position; S4 selects the
# frequency source role rather than a control mode
SWITCH_OWNERS: dict[Switch, DeviceKind] = {
    Switch.S1: DeviceKind.PEMFC,
    Switch.S2: DeviceKind.ELZ,
    Switch.S3: DeviceKind.MSC,
    Switch.S4: DeviceKind.MSC,
}

SWITCH_MODES: dict[Switch, dict[int, ControlMode | None]] = {
    Switch.S1: {0: ControlMode.VCL, 1: ControlMode.PVCL},
    Switch.S2: {0: ControlMode.PCL, 1: ControlMode.VCL, 2: ControlMode.EMERGENCY},
    Switch.S3: {0: ControlMode.VCL, 1: ControlMode.PCL, 2: ControlMode.APCL},
    Switch.S4: {0: None, 1: None},
}


class Breaker(ValueEnum):
    B1 = "B1"  # PEMFC
    B2 = "B2"  # auxiliary supply
    B3 = "B3"  # LSC
    B4 = "B4"  # DFIG stator


class Strategy(ValueEnum):
    WHCC = "whcc"
    HSCC = "hscc"


class TriggerMode(ValueEnum):
    CONDITION = "condition"
    SCRIPTED = "scripted"


class ActionKind(ValueEnum):
    SET_SWITCH = "set-switch"
    SET_BREAKER = "set-breaker"
    START_DEVICE = "start"
    DISCONNECT_PEMFC = "disconnect-pemfc"


class ReportFormat(ValueEnum):
    TABLE = "table"
    JSON = "json"
