"""
Readout and transport: mobile-electron spin-filter readout and bus-qubit transfer
"""
from src.readout.bus import BusHop, BusSchedule, bus_transfer, schedule_to_json, swap_chain_fidelity
from src.readout.mobile import (
    DetectorCounts,
    FilterSpec,
    ReadoutRun,
    detection_probability,
    discrimination_power,
    flip_probability,
    readout_run,
    readout_to_csv,
)

__all__ = [
    'BusHop',
    'BusSchedule',
    'DetectorCounts',
    'FilterSpec',
    'ReadoutRun',
    'bus_transfer',
    'detection_probability',
    'discrimination_power',
    'flip_probability',
    'readout_run',
    'readout_to_csv',
    'schedule_to_json',
    'swap_chain_fidelity',
]
