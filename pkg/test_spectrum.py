import math

import numpy as np
import pytest
from scipy.special import zeta

from src.errors import PhysicsInputError
from src.hamiltonian import build_chain, build_single
from src.physics import RegisterConfig, dipolar_coupling
from src.spectrum import (
    StickSpectrum,
    TransitionLine,
    chain_electron_lines,
    closed_form_single_lines,
    cross_check_report,
    energy_table,
    nonlocal_shift,
    single_molecule_lines,
    spectrum_to_csv,
    spectrum_to_svg,
    transition_catalog,
    transition_frequencies,
)
from src.spin import Role

P31_NMR_AT_1T = [51.965e6, 86.435e6, 190.365e6, 224.835e6]


def test_single_molecule_nmr_lines(p31, constants):
    nmr = single_molecule_lines(1.0, p31, constants).branch('NMR')
    assert np.allclose(nmr.frequencies, P31_NMR_AT_1T, rtol=0, atol=1e3)
    assert list(nmr.degeneracies) == [1, 1, 1, 1]


def test_single_molecule_esr_doublet(p31, constants):
    esr = single_molecule_lines(1.0, p31, constants).branch('ESR')
    # the three single-quantum electron lines of each nuclear branch coincide
    assert len(esr) == 2
    assert list(esr.degeneracies) == [3, 3]
    assert esr.frequencies[1] - esr.frequencies[0] == pytest.approx(138.4e6, rel=1e-9)


@pytest.mark.parametrize("species", ['P31', 'N15'])
@pytest.mark.parametrize("b0_tesla", [0.35, 1.0, 3.0])
def test_catalog_agrees_with_closed_form(defaults, species, b0_tesla):
    spectrum = single_molecule_lines(b0_tesla, species, defaults.constants)
    expected = closed_form_single_lines(b0_tesla, species, defaults.constants)
    for branch in ('ESR', 'NMR'):
        assert np.allclose(np.sort(spectrum.branch(branch).frequencies), expected[branch], rtol=1e-9)


def test_signed_nuclear_line_of_top_electron_state(p31, constants):
    hamiltonian = build_single(1.0, p31, constants)
    signed, lower, upper = transition_frequencies(hamiltonian, (1, Role.NUCLEAR))
    electron_m = hamiltonian.layout.m_values((1, Role.ELECTRON))
    top = signed[electron_m[lower] == 1.5]
    assert top.shape == (1,)
    assert float(top[0]) == pytest.approx(-190.365e6, abs=1e3)
    assert np.all(electron_m[lower] == electron_m[upper])


def test_transition_catalog_labels(p31, constants):
    catalog = transition_catalog(build_single(1.0, p31, constants), 'I1')
    assert len(catalog) == 4
    line = catalog.lines[0]
    assert line.branch == 'NMR'
    assert 'I1=-1/2' in line.initial and 'I1=+1/2' in line.final
    assert line.neighbor_context is None


def test_energy_table(p31, constants):
    table = energy_table(build_single(1.0, p31, constants))
    assert len(table) == 8
    assert table['energy_hz'].is_monotonic_decreasing
    assert table.loc[0, 'm_S1'] == 1.5
    assert {'label', 'energy_hz', 'm_S1', 'm_I1'} <= set(table.columns)


# ===== CHAIN LINES =====

def test_interior_site_nearest_neighbour_pattern(five_site_full):
    spectrum = chain_electron_lines(five_site_full, 3).merged()
    assert list(spectrum.degeneracies) == [1, 2, 3, 4, 3, 2, 1]
    d = dipolar_coupling(five_site_full.min_spacing_m, five_site_full.constants)
    assert np.allclose(np.diff(spectrum.frequencies), d, rtol=1e-6)


def test_interior_site_second_order(five_site_full):
    spectrum = chain_electron_lines(five_site_full, 3, neighbor_order=2).merged()
    assert len(spectrum) == 49
    assert spectrum.total_multiplicity == 4 ** 4


def test_edge_site_sees_one_neighbour(five_site_full):
    spectrum = chain_electron_lines(five_site_full, 1).merged()
    assert list(spectrum.degeneracies) == [1, 1, 1, 1]
    assert spectrum.metadata['neighbors'] == [2]


def test_ideal_neighbours_keep_qubit_lines(five_site_full):
    spectrum = chain_electron_lines(five_site_full, 3, neighbor_model='ideal').merged()
    assert list(spectrum.degeneracies) == [1, 2, 1]
    assert all(line.active for line in spectrum)


def test_both_hyperfine_branches(five_site_full):
    both = chain_electron_lines(five_site_full, 3, nuclear_m=None)
    assert len(both) == 2 * 16
    assert set(both.metadata['reference_hz']) == {0.5, -0.5}


def test_polarized_model_adds_nonlocal_shift(five_site_full):
    nearest = chain_electron_lines(five_site_full, 3).merged()
    polarized = chain_electron_lines(five_site_full, 3, neighbor_model='polarized').merged()
    shift = nonlocal_shift(five_site_full, 3)
    assert np.allclose(polarized.frequencies - nearest.frequencies, shift, rtol=0, atol=1.0)


def test_chain_line_offsets_in_units_of_coupling(five_site_full):
    spectrum = chain_electron_lines(five_site_full, 3).merged()
    reference = spectrum.metadata['reference_hz'][0.5]
    offsets = spectrum.offsets(reference, spectrum.metadata['d_nn_hz'])
    assert np.allclose(offsets, [-3, -2, -1, 0, 1, 2, 3], atol=1e-6)


def test_chain_lines_input_checks(pair_config, five_site_full):
    with pytest.raises(PhysicsInputError):
        chain_electron_lines(five_site_full, 6)
    with pytest.raises(PhysicsInputError):
        chain_electron_lines(five_site_full, 3, neighbor_model='random')
    with pytest.raises(PhysicsInputError):
        chain_electron_lines(pair_config, 1, neighbor_order=2)
    single = RegisterConfig.uniform(pair_config.species, n_sites=1, constants=pair_config.constants)
    with pytest.raises(PhysicsInputError):
        chain_electron_lines(single, 1, neighbor_model='ideal')


def test_chain_lines_match_materialised_catalog(pair_config):
    # with nearest coupling only, the explicit catalog reproduces the enumerated lines
    catalog = transition_catalog(build_chain(pair_config), (1, Role.ELECTRON))
    up_lines = [line for line in catalog
                if line.initial.startswith('S1=+1/2,I1=+1/2') and line.initial.endswith('I2=+1/2')]
    enumerated = chain_electron_lines(pair_config, 1)
    assert np.allclose(sorted(line.frequency_hz for line in up_lines),
                       enumerated.frequencies, rtol=1e-10)


# ===== NON-LOCAL SHIFT =====

def test_nonlocal_shift_five_sites(five_site_full):
    d = dipolar_coupling(five_site_full.min_spacing_m, five_site_full.constants)
    assert nonlocal_shift(five_site_full, 3) / d == pytest.approx(0.375)
    assert nonlocal_shift(five_site_full, 1) / d == pytest.approx(1.5 * (1 / 8 + 1 / 27 + 1 / 64))


def test_nonlocal_shift_long_chain(p31, constants):
    config = RegisterConfig.uniform(p31, n_sites=401, spacing_m=2.91e-9, coupling_range='full', constants=constants)
    d = dipolar_coupling(2.91e-9, constants)
    assert nonlocal_shift(config, 201) / d == pytest.approx(3 * (float(zeta(3)) - 1), abs=1e-3)


def test_nonlocal_shift_needs_full_range(pair_config):
    with pytest.raises(PhysicsInputError):
        nonlocal_shift(pair_config, 1)


# ===== STICK SPECTRA AND EXPORT =====

def test_merge_sums_degeneracies():
    lines = (TransitionLine(100.0, 'ESR', 1), TransitionLine(100.4, 'ESR', 2, degeneracy=3),
             TransitionLine(250.0, 'ESR', 1), TransitionLine(100.2, 'NMR', 1))
    merged = StickSpectrum(lines).merged()
    esr = merged.branch('ESR')
    assert list(esr.degeneracies) == [4, 1]
    assert esr.lines[0].site == -1
    assert esr.lines[0].frequency_hz == pytest.approx(100.3)
    assert len(merged.branch('NMR')) == 1


def test_exports_are_deterministic(tmp_path, five_site_full):
    spectrum = chain_electron_lines(five_site_full, 3).merged()
    first = spectrum_to_csv(spectrum, tmp_path / 'a' / 'spectrum.csv')
    second = spectrum_to_csv(spectrum, tmp_path / 'b' / 'spectrum.csv')
    assert first.read_bytes() == second.read_bytes()
    header = first.read_text().splitlines()[0]
    assert header == 'frequency_hz,branch,site,degeneracy,active,initial,final,neighbor_context'

    reference = spectrum.metadata['reference_hz'][0.5]
    svg_a = spectrum_to_svg(spectrum, tmp_path / 'a' / 'spectrum.svg', 'site 3', reference)
    svg_b = spectrum_to_svg(spectrum, tmp_path / 'b' / 'spectrum.svg', 'site 3', reference)
    assert svg_a.read_bytes() == svg_b.read_bytes()
    assert b'<svg' in svg_a.read_bytes()


# ===== CROSS-CHECK =====

def test_cross_check_report(defaults):
    report = cross_check_report(defaults).set_index('quantity')
    for quantity in ('electron Larmor frequency at 1 T', 'P31 nuclear Larmor frequency at 1 T',
                     'qubit transition splitting', 'readout coupling', 'P31 nuclear gap between neighbours',
                     'N15 nuclear gap between neighbours', 'ground-manifold population'):
        assert report.loc[quantity, 'reproduced'], quantity
    assert report.loc['P31 nuclear gap between neighbours', 'computed'] == pytest.approx(20.06e3, rel=1e-3)
    assert report.loc['N15 nuclear gap between neighbours', 'computed'] == pytest.approx(5.02e3, rel=1e-3)
    assert report.loc['unconditional rotation line (lower)', 'computed'] == pytest.approx(190.365e6, rel=1e-5)
    assert not math.isnan(report.loc['non-local shift / nearest-neighbour coupling', 'relative_deviation'])


@pytest.mark.parametrize("drift, reproduced", [(0.005, True), (0.015, False)])
def test_cross_check_flags_drift_beyond_one_percent(defaults, drift, reproduced):
    computed = cross_check_report(defaults).set_index('quantity').loc['qubit transition splitting', 'computed']
    quoted = defaults.quoted.model_copy(update={'qubit_transition_splitting_hz': computed * (1 + drift)})
    report = cross_check_report(defaults.model_copy(update={'quoted': quoted})).set_index('quantity')
    assert bool(report.loc['qubit transition splitting', 'reproduced']) is reproduced
