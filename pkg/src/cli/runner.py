"""
Scenario Runner - Executes one scenario kind and writes its artifacts
Every artifact is deterministic for a given scenario and seed; logs go elsewhere
"""
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import yaml

from src.cli.scenario import SCENARIO_KINDS, ScenarioConfig, parse_scenario
from src.errors import EXIT_UNEXPECTED, ConfigError, GateError, InfeasiblePlanError, PeapodError, PhysicsInputError
from src.gates import (
    GateKind,
    GateSequence,
    GateSpec,
    PulseSegment,
    electron_cnot_pulse,
    ideal_gate,
    nuclear_two_qubit_gate,
    qubit_subspace,
    sequence_unitary,
    simulate_sequence,
    swap_decomposition,
    two_qubit_protocol,
    unconditional_nuclear_rotation,
)
from src.hamiltonian import build_chain, build_single, mobile_transition, secular_validity_ratio, thermal_populations
from src.physics import (
    RegisterConfig,
    coupling_matrix,
    derived_parameters,
    dipolar_coupling,
    electron_larmor,
    single_quantum_splitting,
)
from src.planner import (
    SearchConstraints,
    check_overlap,
    max_register_size,
    min_gradient_search,
    register_for_separation,
    spectral_layout,
)
from src.readout import (
    ReadoutRun,
    bus_transfer,
    discrimination_power,
    readout_run,
    readout_to_csv,
    schedule_to_json,
)
from src.settings import ARTIFACT_FORMATS, SimulationSettings, load_settings
from src.spectrum import (
    StickSpectrum,
    chain_electron_lines,
    cross_check_report,
    energy_table,
    single_molecule_lines,
    spectrum_to_csv,
    spectrum_to_svg,
    table_to_csv,
    transition_catalog,
)
from src.spin import BasisLayout, Operator, Role, StateVector, unitary_fidelity

logger = logging.getLogger(__name__)


class ScenarioRunner:
    """Runs one scenario into an output directory"""

    def __init__(self, scenario: ScenarioConfig, out_dir: Path, settings: Optional[SimulationSettings] = None,
                 formats: Optional[Sequence[str]] = None):
        self.scenario = scenario
        self.out_dir = Path(out_dir)
        self.settings = settings or load_settings()
        self.defaults = scenario.physics()
        self.formats = tuple(sorted(set(formats or self.settings.output.formats)))
        unknown = set(self.formats) - set(ARTIFACT_FORMATS)
        if unknown:
            raise ConfigError(f"Unknown artifact format(s) {sorted(unknown)}; expected {ARTIFACT_FORMATS}")
        self.artifacts: List[Path] = []

    @cached_property
    def register(self) -> RegisterConfig:
        return self.scenario.register.build(self.defaults)

    @property
    def float_format(self) -> str:
        return self.settings.output.float_format

    @property
    def spacing_m(self) -> float:
        return self.scenario.register.spacing_m or self.defaults.reference_geometry.spacing_m

    def _track(self, path: Path) -> Path:
        self.artifacts.append(Path(path))
        return path

    def _table(self, frame: pd.DataFrame, name: str) -> Optional[Path]:
        if 'csv' not in self.formats:
            return None
        return self._track(table_to_csv(frame, self.out_dir / name, self.float_format))

    def _json(self, payload: Dict[str, Any], name: str) -> Optional[Path]:
        if 'json' not in self.formats:
            return None
        return self._track(self._write_json(payload, name))

    def _write_json(self, payload: Dict[str, Any], name: str) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + '\n')
        return path

    def _spectrum(self, spectrum: StickSpectrum, stem: str, title: str,
                  reference_hz: Optional[float] = None, unit_hz: float = 1e9) -> None:
        if 'csv' in self.formats:
            self._track(spectrum_to_csv(spectrum, self.out_dir / f"{stem}.csv", self.float_format))
        if 'svg' in self.formats:
            self._track(spectrum_to_svg(spectrum, self.out_dir / f"{stem}.svg", title, reference_hz, unit_hz))

    # ===== ENTRY POINTS =====

    def run(self, kind: str) -> Dict[str, Any]:
        if kind not in SCENARIO_KINDS:
            raise ConfigError(f"Unknown scenario kind {kind!r}; expected one of {SCENARIO_KINDS}")
        if self.scenario.kind is not None and self.scenario.kind != kind:
            raise ConfigError(f"Scenario is a {self.scenario.kind!r} scenario, not {kind!r}")
        logger.info(f"🚀 Running {kind} scenario into {self.out_dir}")
        handler: Callable[[], Dict[str, Any]] = getattr(self, f"run_{kind}")
        results = handler()
        summary = self._summary(kind, results)
        # the run record is written whatever the artifact formats
        self._write_json(summary, 'summary.json')
        logger.info(f"✅ {kind} finished: {len(self.artifacts)} artifacts")
        return summary

    def dry_run(self, kind: str) -> Dict[str, Any]:
        """Validated inputs and derived parameters, nothing simulated or written"""
        config = self.register
        return {
            'kind': kind,
            'physics_version': self.defaults.version,
            'dimension': 8 ** config.n_sites,
            'derived': derived_parameters(config),
            'scenario': self.scenario.model_dump(mode='json'),
        }

    def _summary(self, kind: str, results: Dict[str, Any]) -> Dict[str, Any]:
        return {
            'kind': kind,
            'seed': self.scenario.seed,
            'physics_version': self.defaults.version,
            'config_hash': self.register.config_hash(),
            'results': results,
            'formats': list(self.formats),
            'artifacts': sorted(p.name for p in self.artifacts),
        }

    # ===== SPECTRUM =====

    def run_spectrum(self) -> Dict[str, Any]:
        section = self.scenario.spectrum
        config = self.register
        reference = None
        energies = None
        if section.mode == 'single':
            spectrum = single_molecule_lines(config.b0_tesla, config.species, config.constants)
            energies = energy_table(build_single(config.b0_tesla, config.species, config.constants))
            self._table(energies, 'energies.csv')
            self._table(cross_check_report(self.defaults), 'cross_check.csv')
        elif section.mode == 'chain':
            nuclear_m = None if section.both_branches else section.nuclear_m
            spectrum = chain_electron_lines(config, section.site, section.neighbor_model,
                                            section.neighbor_order, nuclear_m)
            if nuclear_m is not None:
                reference = spectrum.metadata['reference_hz'][nuclear_m]
            if section.merge:
                spectrum = spectrum.merged()
        elif section.mode == 'catalog':
            role = Role.ELECTRON if section.role == 'electron' else Role.NUCLEAR
            spectrum = transition_catalog(build_chain(config), (section.site, role))
            if section.merge:
                spectrum = spectrum.merged()
        else:
            frame = energy_table(build_chain(config))
            self._table(frame, 'energies.csv')
            return {'states': len(frame)}

        title = f"{config.species.name} {section.mode} spectrum"
        self._spectrum(spectrum, 'spectrum', title, reference, 1e6 if reference is not None else 1e9)
        results = {
            'lines': len(spectrum),
            'total_multiplicity': spectrum.total_multiplicity,
            'metadata': spectrum.metadata,
        }
        if energies is not None:
            results['states'] = len(energies)
        return results

    # ===== GATES =====

    def _gate_sequence(self) -> Tuple[GateSequence, Optional[Operator], Optional[List[int]]]:
        """Sequence plus an optional reference unitary and fidelity subspace"""
        section = self.scenario.gates
        config = self.register
        layout = BasisLayout.chain(config.n_sites, config.species.electron_spin, config.species.nuclear_spin)
        every = tuple(range(1, config.n_sites + 1))

        if section.protocol == 'swap':
            seq = swap_decomposition(section.order, section.site, section.passive,
                                     every if section.hard_nuclear_pulses else None)
            if section.passive:
                return seq, None, None
            reference = ideal_gate(GateSpec(GateKind.SWAP_SI, (section.site,)), layout)
            return seq, reference, qubit_subspace(layout)
        if section.protocol == 'two_qubit':
            partner = section.partner or section.site + 1
            seq = two_qubit_protocol(section.site, partner, section.core, section.order,
                                     section.hard_nuclear_pulses, config.n_sites)
            reference = nuclear_two_qubit_gate(section.core, section.site, partner, layout)
            return seq, reference, qubit_subspace(layout, electrons=[1.5])
        if section.protocol == 'nuclear_rotation':
            spec = GateSpec(GateKind.NUCLEAR_ROTATION, (section.site,), angle=section.angle, phase=section.phase)
            return GateSequence((spec,)), None, None
        return _load_sequence(section.sequence_file), None, None

    def run_gates(self) -> Dict[str, Any]:
        config = self.register
        seq, reference, subspace = self._gate_sequence()
        self._json(seq.to_dict(), 'sequence.json')
        results: Dict[str, Any] = {'steps': len(seq.steps), 'duration_s': seq.duration_s}

        if seq.is_ideal:
            layout = BasisLayout.chain(config.n_sites, config.species.electron_spin, config.species.nuclear_spin)
            unitary = sequence_unitary(seq, layout)
            self._table(_matrix_frame(unitary), 'unitary.csv')
            if reference is not None:
                results['fidelity'] = unitary_fidelity(reference, unitary, subspace)
                logger.info(f"Protocol fidelity against the reference gate: {results['fidelity']:.12f}")
            if self.scenario.gates.protocol == 'swap':
                results['order_agreement'] = self._swap_order_agreement(layout, unitary)
        return results

    def _swap_order_agreement(self, layout: BasisLayout, unitary: Operator) -> float:
        """Fidelity between the configured SWAP ordering and the opposite one"""
        section = self.scenario.gates
        other = 'ISI' if section.order == 'SIS' else 'SIS'
        every = tuple(range(1, self.register.n_sites + 1))
        seq = swap_decomposition(other, section.site, section.passive,
                                 every if section.hard_nuclear_pulses else None)
        agreement = unitary_fidelity(unitary, sequence_unitary(seq, layout), qubit_subspace(layout))
        logger.info(f"{section.order} vs {other} agreement on the qubit subspace: {agreement:.12f}")
        return agreement

    # ===== PULSE EVOLUTION =====

    def _rabi_values(self, coupling_hz: float) -> List[float]:
        section = self.scenario.evolve
        if section.rabi_hz:
            return [float(r) for r in section.rabi_hz]
        if section.rabi_over_coupling:
            if coupling_hz <= 0:
                raise PhysicsInputError("Rabi values relative to D need a non-zero coupling")
            return [float(r) * coupling_hz for r in section.rabi_over_coupling]
        return [self.settings.pulses.default_rabi_hz]

    def run_evolve(self) -> Dict[str, Any]:
        section = self.scenario.evolve
        config = self.register
        hamiltonian = build_chain(config)
        layout = hamiltonian.layout
        window = section.carrier_window_hz or self.settings.pulses.carrier_window_hz
        n = config.n_sites
        if not (1 <= section.control <= n and 1 <= section.target <= n):
            raise PhysicsInputError(f"Control/target sites outside 1..{n}")

        coupling_hz = 0.0
        if n > 1 and section.control != section.target:
            coupling_hz = float(coupling_matrix(config, angular=False)[section.control - 1, section.target - 1])
        secular_validity_ratio(hamiltonian)

        initial = None
        if section.initial is not None:
            initial = StateVector.basis(layout, section.initial)

        rows = []
        for rabi in self._rabi_values(coupling_hz):
            seq, reference, subspace = self._pulse_sequence(hamiltonian, rabi)
            if initial is not None:
                final = simulate_sequence(hamiltonian, seq, initial, frame=section.frame, carrier_window_hz=window)
                populations = pd.DataFrame({'label': layout.labels(), 'population': final.populations})
                self._table(populations[populations['population'] > 1e-12], f"populations_rabi={rabi:g}.csv")
                rows.append({'rabi_hz': rabi, 'duration_s': seq.duration_s})
                continue
            unitary = simulate_sequence(hamiltonian, seq, frame=section.frame, carrier_window_hz=window)
            row = {'rabi_hz': rabi, 'duration_s': seq.duration_s}
            if coupling_hz:
                row['rabi_over_coupling'] = rabi / coupling_hz
            if reference is not None:
                row['fidelity'] = unitary_fidelity(reference, unitary, subspace)
            rows.append(row)

        frame = pd.DataFrame(rows)
        self._table(frame, 'evolve.csv')
        return {'coupling_hz': coupling_hz, 'frame': section.frame, 'rows': frame.to_dict(orient='records')}

    def _pulse_sequence(self, hamiltonian, rabi_hz: float) -> Tuple[GateSequence, Optional[Operator], Optional[List[int]]]:
        section = self.scenario.evolve
        layout = hamiltonian.layout
        if section.pulse == 'electron_cnot':
            seq = electron_cnot_pulse(hamiltonian, section.control, section.target, rabi_hz, section.nuclear_m)
            reference = ideal_gate(GateSpec(GateKind.CNOT_EE, (section.control, section.target), pulse_phases=True),
                                   layout)
            target_nucleus = layout.m_values((section.target, Role.NUCLEAR))
            subspace = [i for i in qubit_subspace(layout) if math.isclose(target_nucleus[i], section.nuclear_m)]
            return seq, reference, subspace
        if section.pulse == 'nuclear_rotation':
            seq = unconditional_nuclear_rotation(hamiltonian, section.target, section.angle, section.phase, rabi_hz)
            reference = ideal_gate(GateSpec(GateKind.NUCLEAR_ROTATION, (section.target,),
                                            angle=section.angle, phase=section.phase), layout)
            return seq, reference, qubit_subspace(layout)
        return _load_sequence(section.sequence_file), None, None

    # ===== READOUT AND TRANSFER =====

    def run_readout(self) -> Dict[str, Any]:
        section = self.scenario.readout
        config = self.register
        distance = section.distance_m or self.defaults.reference_geometry.readout_distance_m
        d_prime = dipolar_coupling(distance, config.constants)
        electrons = section.electrons or self.settings.readout.electrons

        pulse = None
        if section.rabi_hz is not None:
            carrier = mobile_transition(electron_larmor(config.b0_tesla, config.constants), d_prime, 1.5)
            pulse = PulseSegment.for_angle(section.flip_angle, carrier, section.rabi_hz, 0, Role.MOBILE)

        results = []
        for offset in range(section.runs):
            run = ReadoutRun(site=section.site, electrons=electrons, flip_angle=section.flip_angle,
                             filter_a=section.filter_a, filter_b=section.filter_b,
                             seed=self.scenario.seed + offset)
            results.append(readout_run(section.caged_m, run, pulse, d_prime if pulse else None))

        if 'csv' in self.formats:
            self._track(readout_to_csv(results, self.out_dir / 'readout.csv'))
        summary = {'d_prime_hz': d_prime, 'runs': len(results),
                   'mean_p_hat': float(np.mean([r.p_hat for r in results]))}
        if pulse is not None:
            summary['discrimination_power'] = discrimination_power(run, d_prime, pulse)
        return summary

    def run_transfer(self) -> Dict[str, Any]:
        section = self.scenario.transfer
        t2 = section.mobile_t2_s or self.defaults.reference_geometry.mobile_t2_s
        schedule, fidelity = bus_transfer(section.source, section.target, self.register, t2,
                                          section.swap_duration_s, section.hop_speed_m_per_s,
                                          section.start_position_m, section.budget)
        if 'json' in self.formats:
            self._track(schedule_to_json(schedule, self.out_dir / 'transfer.json', fidelity))
        return {'fidelity': fidelity, 'total_duration_s': schedule.total_duration_s,
                'coherent_duration_s': schedule.coherent_duration_s}

    # ===== PLANNER =====

    def _constraints(self) -> SearchConstraints:
        section = self.scenario.plan
        defaults = self.settings.planner
        return SearchConstraints(
            guard_hz=section.guard_hz if section.guard_hz is not None else defaults.guard_hz,
            weak_coupling_threshold=section.weak_coupling_threshold or defaults.weak_coupling_threshold,
            ceiling_hz=section.ceiling_hz or defaults.ceiling_hz,
            grid_points=section.grid_points or defaults.grid_points,
            rel_tol=defaults.rel_tol,
        )

    def run_plan(self) -> Dict[str, Any]:
        section = self.scenario.plan
        config = self.register
        constraints = self._constraints()

        if section.mode == 'search':
            result = min_gradient_search(config.n_sites, config.species, self.spacing_m, constraints,
                                         config.b0_tesla, config.constants)
            self._track_report(result.report, result.layout)
            return result.to_dict()

        if section.mode == 'max_size':
            separation = section.separation_hz
            if separation is None:
                separation = abs(single_quantum_splitting(config, 1))
            size = max_register_size(config.species, self.spacing_m, separation, constraints,
                                     config.b0_tesla, config.constants, section.n_max)
            return {'separation_hz': separation, 'max_sites': size}

        if section.separation_hz is not None:
            config = register_for_separation(config.n_sites, config.species, self.spacing_m, section.separation_hz,
                                             config.b0_tesla, config.constants, config.coupling_range)
        layout = spectral_layout(config, constraints.guard_hz)
        report = check_overlap(layout, constraints.weak_coupling_threshold)
        self._track_report(report, layout)
        if not report.feasible:
            raise InfeasiblePlanError(f"{len(report.conflicts)} spectral conflict(s) in a {config.n_sites}-site layout",
                                      report=report, details=report.to_dict())
        return report.to_dict()

    def _track_report(self, report, layout) -> None:
        for path in report.write(self.out_dir, json_output='json' in self.formats):
            self._track(path)
        self._spectrum(layout.to_spectrum(), 'layout', 'Addressing layout')

    # ===== THERMAL =====

    def run_thermal(self) -> Dict[str, Any]:
        config = self.register
        temperature = self.scenario.thermal.temperature_k or self.defaults.reference_geometry.temperature_k
        state = thermal_populations(build_chain(config), temperature, config.constants)
        self._table(state.to_frame(), 'thermal.csv')
        ground = {f"S{site}": m for (site, _), m in state.ground_manifold().items()}
        return {'temperature_k': temperature, 'ground_manifold': ground,
                'ground_manifold_population': state.ground_manifold_population()}


# ===== HELPERS =====

def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return str(value)


def _load_sequence(path: Optional[Path]) -> GateSequence:
    if path is None:
        raise GateError("A 'file' sequence needs sequence_file")
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"Sequence file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"Sequence file {path} is not valid JSON: {e}") from e
    return GateSequence.from_dict(data)


def _matrix_frame(unitary: Operator, tol: float = 1e-12) -> pd.DataFrame:
    """Non-zero entries of a unitary as (row, column, re, im)"""
    labels = unitary.layout.labels()
    rows, cols = np.nonzero(np.abs(unitary.matrix) > tol)
    values = unitary.matrix[rows, cols]
    return pd.DataFrame({
        'row': [labels[r] for r in rows],
        'column': [labels[c] for c in cols],
        're': values.real,
        'im': values.imag,
    })


def parse_sweep(spec: str) -> Tuple[str, List[Any]]:
    """'dotted.key=v1,v2,...' -> (key, parsed values)"""
    if '=' not in spec:
        raise ConfigError(f"Sweep {spec!r} is not of the form key=v1,v2,...")
    key, text = spec.split('=', 1)
    values = [yaml.safe_load(v) for v in text.split(',') if v.strip()]
    if not key.strip() or not values:
        raise ConfigError(f"Sweep {spec!r} needs a key and at least one value")
    return key.strip(), values


def run_sweep(kind: str, raw: Dict[str, Any], overrides: Sequence[str], sweep: str, out_dir: Path,
              settings: Optional[SimulationSettings] = None, formats: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    One scenario per sweep value, each into <out>/<key>=<value>/, run on a thread pool.

    A failing point is recorded with its exit code and never stops the others.
    """
    settings = settings or load_settings()
    key, values = parse_sweep(sweep)

    def one(value) -> Dict[str, Any]:
        target = Path(out_dir) / f"{key}={value}"
        try:
            scenario = parse_scenario(raw, list(overrides) + [f"{key}={value}"])
            ScenarioRunner(scenario, target, settings, formats).run(kind)
            code = 0
        except PeapodError as e:
            logger.error(f"❌ Sweep point {key}={value} failed: {e}")
            code = e.exit_code
        except Exception as e:
            logger.error(f"💥 Sweep point {key}={value} crashed: {type(e).__name__}: {e}")
            code = EXIT_UNEXPECTED
        return {'key': key, 'value': value, 'exit_code': code, 'directory': target.name}

    with ThreadPoolExecutor(max_workers=settings.sweep.max_workers) as executor:
        rows = list(executor.map(one, values))
    index = pd.DataFrame(rows)
    table_to_csv(index, Path(out_dir) / 'sweep.csv', settings.output.float_format)
    return index
