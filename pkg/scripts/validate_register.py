#!/usr/bin/env python3
"""
Register Model Validation
Reproduces the reference figures and checks the register protocols end to end
"""
import math
import sys
from datetime import datetime
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.gates import nuclear_two_qubit_gate, qubit_subspace, sequence_unitary, two_qubit_protocol
from src.physics import RegisterConfig, load_physics_defaults
from src.planner import check_overlap, register_for_separation, spectral_layout
from src.readout import bus_transfer
from src.spectrum import (
    chain_electron_lines,
    closed_form_single_lines,
    cross_check_report,
    single_molecule_lines,
)
from src.spin import BasisLayout, unitary_fidelity

# Quoted figures this model is known not to reproduce; see DESIGN.md
KNOWN_DISCREPANCIES = {
    'nearest-neighbour coupling',
    'unconditional rotation line (lower)',
    'unconditional rotation line (upper)',
    'non-local shift / nearest-neighbour coupling',
}


class RegisterValidator:
    """Runs every model check and prints a PASS/FAIL summary"""

    def __init__(self, physics_config: str = None):
        self.defaults = load_physics_defaults(physics_config)
        self.geo = self.defaults.reference_geometry
        self.p31 = self.defaults.get_species('P31')
        self.n15 = self.defaults.get_species('N15')

    def run_complete_validation(self) -> bool:
        print("=" * 80)
        print("PEAPOD REGISTER MODEL VALIDATION")
        print("=" * 80)
        print(f"Physics config version: {self.defaults.version}")
        print(f"Validation time: {datetime.now()}")
        print("=" * 80)

        checks: List[Tuple[str, Callable[[], bool]]] = [
            ("Single-Molecule Spectrum", self.validate_single_molecule),
            ("Reference Figures", self.validate_reference_figures),
            ("Chain Electron Lines", self.validate_chain_lines),
            ("Two-Qubit Protocols", self.validate_protocols),
            ("Addressing Layouts", self.validate_layouts),
            ("Bus Transfer", self.validate_bus),
        ]
        validation_results = []
        for name, check in checks:
            try:
                passed = check()
            except Exception as e:
                print(f"❌ {name} raised: {e}")
                passed = False
            validation_results.append((name, passed))

        print("\n" + "=" * 80)
        print("VALIDATION SUMMARY")
        print("=" * 80)
        all_passed = True
        for test_name, passed in validation_results:
            status = "PASS" if passed else "FAIL"
            print(f"{test_name:.<60} {status}")
            all_passed = all_passed and passed
        print("=" * 80)
        overall_status = "ALL VALIDATIONS PASSED" if all_passed else "VALIDATION FAILURES DETECTED"
        print(f"OVERALL RESULT: {overall_status}")
        print("=" * 80)
        return all_passed

    def validate_single_molecule(self) -> bool:
        print("\n🔍 VALIDATING SINGLE-MOLECULE SPECTRUM")
        print("-" * 60)
        spectrum = single_molecule_lines(self.geo.b0_tesla, self.p31, self.defaults.constants)
        expected = closed_form_single_lines(self.geo.b0_tesla, self.p31, self.defaults.constants)
        ok = True
        for branch in ('ESR', 'NMR'):
            computed = np.sort(spectrum.branch(branch).frequencies)
            closed = np.asarray(expected[branch])
            match = computed.shape == closed.shape and np.allclose(computed, closed, rtol=1e-9)
            print(f"{'✅' if match else '❌'} {branch}: {[f'{f / 1e6:.3f}' for f in computed]} MHz")
            ok = ok and match
        return ok

    def validate_reference_figures(self) -> bool:
        print("\n🔍 VALIDATING REFERENCE FIGURES")
        print("-" * 60)
        report = cross_check_report(self.defaults)
        ok = True
        for row in report.itertuples(index=False):
            known = row.quantity in KNOWN_DISCREPANCIES
            mark = '✅' if row.reproduced else ('⚠️ ' if known else '❌')
            print(f"{mark} {row.quantity:.<50} {row.computed:.6g} vs {row.quoted:.6g} {row.unit}")
            if not row.reproduced and not known:
                ok = False
        return ok

    def validate_chain_lines(self) -> bool:
        print("\n🔍 VALIDATING CHAIN ELECTRON LINES")
        print("-" * 60)
        config = RegisterConfig.uniform(self.p31, n_sites=5, spacing_m=self.geo.spacing_m,
                                        gradient_tesla_per_m=self.geo.gradient_tesla_per_m,
                                        coupling_range='full', constants=self.defaults.constants)
        nearest = chain_electron_lines(config, 3).merged()
        second = chain_electron_lines(config, 3, neighbor_order=2).merged()
        degeneracies = [int(d) for d in nearest.degeneracies]
        ok = degeneracies == [1, 2, 3, 4, 3, 2, 1] and len(second) == 49
        print(f"{'✅' if ok else '❌'} order 1: {degeneracies}; order 2: {len(second)} distinct lines")
        return ok

    def validate_protocols(self) -> bool:
        print("\n🔍 VALIDATING TWO-QUBIT PROTOCOLS")
        print("-" * 60)
        layout = BasisLayout.chain(2)
        subspace = qubit_subspace(layout, electrons=[1.5])
        ok = True
        for core in ('CNOT', 'CPF'):
            unitary = sequence_unitary(two_qubit_protocol(1, 2, core), layout)
            fidelity = unitary_fidelity(nuclear_two_qubit_gate(core, 1, 2, layout), unitary, subspace)
            passed = math.isclose(fidelity, 1.0, abs_tol=1e-12)
            print(f"{'✅' if passed else '❌'} nuclear {core}: fidelity {fidelity:.12f}")
            ok = ok and passed
        return ok

    def validate_layouts(self) -> bool:
        print("\n🔍 VALIDATING ADDRESSING LAYOUTS")
        print("-" * 60)
        c = self.defaults.constants
        cases = [
            ('P31, 45 MHz, 3 sites', self.p31, 3, 45e6, True),
            ('P31, 45 MHz, 4 sites', self.p31, 4, 45e6, False),
            ('P31, 55 MHz, 5 sites', self.p31, 5, 55e6, True),
            ('N15, 55 MHz, 5 sites', self.n15, 5, 55e6, True),
        ]
        ok = True
        for name, species, n, separation, expected in cases:
            config = register_for_separation(n, species, self.geo.spacing_m, separation, constants=c)
            report = check_overlap(spectral_layout(config))
            passed = report.feasible == expected
            verdict = 'feasible' if report.feasible else f"{len(report.conflicts)} conflict(s)"
            print(f"{'✅' if passed else '❌'} {name}: {verdict}")
            ok = ok and passed
        return ok

    def validate_bus(self) -> bool:
        print("\n🔍 VALIDATING BUS TRANSFER")
        print("-" * 60)
        config = RegisterConfig.uniform(self.p31, n_sites=4, spacing_m=self.geo.spacing_m,
                                        constants=self.defaults.constants)
        _, fidelity = bus_transfer(1, 4, config, self.geo.mobile_t2_s, swap_duration_s=1e-6,
                                   hop_speed_m_per_s=1e5, budget=False)
        expected = math.exp(-3e-6 / self.geo.mobile_t2_s)
        passed = math.isclose(fidelity, expected, rel_tol=1e-9)
        print(f"{'✅' if passed else '❌'} 1 -> 4: fidelity {fidelity:.6f} (expected {expected:.6f})")
        return passed


if __name__ == "__main__":
    validator = RegisterValidator()
    success = validator.run_complete_validation()
    if success:
        print("\n🎉 All validations passed! The register model reproduces its reference figures.")
    else:
        print("\n❌ Validation failures detected. Please review the issues above.")
        sys.exit(1)
