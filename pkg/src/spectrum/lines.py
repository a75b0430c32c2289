"""
Spectrum Lines - Transition catalogs of single molecules and chains
Frequencies are reported in Hz
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.errors import PhysicsInputError
from src.hamiltonian import ChainHamiltonian, build_single
from src.physics import (
    ConstantsTable,
    RegisterConfig,
    coupling_matrix,
    dipolar_coupling,
    electron_larmor,
    load_physics_defaults,
    nuclear_larmor,
)
from src.spin import Role, format_m
from src.spin.tolerances import MERGE_TOL_HZ

logger = logging.getLogger(__name__)

NEIGHBOR_MODELS = ('enumerate', 'ideal', 'polarized')
_ELECTRON_M = (1.5, 0.5, -0.5, -1.5)
_IDEAL_M = (1.5, -1.5)


@dataclass(frozen=True)
class TransitionLine:
    """One stick of a spectrum"""
    frequency_hz: float
    branch: str
    site: int
    degeneracy: int = 1
    active: bool = True
    initial: str = ''
    final: str = ''
    neighbor_context: Optional[Tuple[float, ...]] = None
    signed_hz: Optional[float] = None


@dataclass(frozen=True, eq=False)
class StickSpectrum:
    """Sorted collection of lines plus run metadata"""
    lines: Tuple[TransitionLine, ...]
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        ordered = tuple(sorted(self.lines, key=lambda line: (line.frequency_hz, line.site)))
        object.__setattr__(self, 'lines', ordered)

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([line.frequency_hz for line in self.lines])

    @property
    def degeneracies(self) -> np.ndarray:
        return np.array([line.degeneracy for line in self.lines], dtype=int)

    @property
    def total_multiplicity(self) -> int:
        return int(self.degeneracies.sum())

    def branch(self, name: str) -> 'StickSpectrum':
        return StickSpectrum(tuple(line for line in self.lines if line.branch == name), dict(self.metadata))

    def merged(self, tol_hz: float = MERGE_TOL_HZ) -> 'StickSpectrum':
        """Combine lines of one branch closer than tol_hz, summing degeneracies"""
        merged: List[TransitionLine] = []
        for name in sorted({line.branch for line in self.lines}):
            cluster: List[TransitionLine] = []
            for line in (l for l in self.lines if l.branch == name):
                if cluster and line.frequency_hz - cluster[0].frequency_hz > tol_hz:
                    merged.append(_combine(cluster))
                    cluster = []
                cluster.append(line)
            if cluster:
                merged.append(_combine(cluster))
        return StickSpectrum(tuple(merged), dict(self.metadata))

    def offsets(self, reference_hz: float, unit_hz: float = 1.0) -> np.ndarray:
        """(f - reference) / unit for every line"""
        return (self.frequencies - reference_hz) / unit_hz

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            'frequency_hz': line.frequency_hz,
            'branch': line.branch,
            'site': line.site,
            'degeneracy': line.degeneracy,
            'active': line.active,
            'initial': line.initial,
            'final': line.final,
            'neighbor_context': '' if line.neighbor_context is None
            else ' '.join(format_m(m) for m in line.neighbor_context),
        } for line in self.lines], columns=['frequency_hz', 'branch', 'site', 'degeneracy', 'active',
                                            'initial', 'final', 'neighbor_context'])


def _combine(cluster: Sequence[TransitionLine]) -> TransitionLine:
    if len(cluster) == 1:
        return cluster[0]
    weights = np.array([line.degeneracy for line in cluster], dtype=float)
    frequency = float(np.average([line.frequency_hz for line in cluster], weights=weights))
    contexts = {line.neighbor_context for line in cluster}
    sites = {line.site for line in cluster}
    return TransitionLine(
        frequency_hz=frequency,
        branch=cluster[0].branch,
        site=cluster[0].site if len(sites) == 1 else -1,
        degeneracy=int(weights.sum()),
        active=any(line.active for line in cluster),
        initial=';'.join(dict.fromkeys(line.initial for line in cluster)),
        final=';'.join(dict.fromkeys(line.final for line in cluster)),
        neighbor_context=contexts.pop() if len(contexts) == 1 else None,
        signed_hz=None,
    )


# ===== CATALOGS FROM A MATERIALISED HAMILTONIAN =====

def transition_frequencies(hamiltonian: ChainHamiltonian, target) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Signed single-quantum frequencies (Hz) of one spin for every spectator configuration.

    Returns (signed_hz, lower_index, upper_index) where upper has m larger by one.
    """
    layout = hamiltonian.layout
    pos = layout.position(target)
    dims = layout.dims
    d = dims[pos]

    energies = np.moveaxis(np.asarray(hamiltonian.energies).reshape(dims), pos, -1).reshape(-1, d)
    indices = np.moveaxis(np.arange(layout.dim).reshape(dims), pos, -1).reshape(-1, d)

    # column k holds m = s - k
    signed = (energies[:, :-1] - energies[:, 1:]) / (2 * math.pi)
    return signed.ravel(), indices[:, 1:].ravel(), indices[:, :-1].ravel()


def transition_catalog(hamiltonian: ChainHamiltonian, target) -> StickSpectrum:
    """Every single-quantum transition of one spin, unmerged"""
    layout = hamiltonian.layout
    site, role = layout.resolve(target)
    branch = 'NMR' if role is Role.NUCLEAR else 'ESR'
    signed, lower, upper = transition_frequencies(hamiltonian, (site, role))

    neighbors = [s for s in (site - 1, site + 1) if 1 <= s <= hamiltonian.n_sites]
    neighbor_m = [layout.m_values((s, Role.ELECTRON)) for s in neighbors]

    lines = []
    for f, lo, hi in zip(signed, lower, upper):
        context = tuple(float(m[lo]) for m in neighbor_m)
        lines.append(TransitionLine(
            frequency_hz=float(abs(f)),
            branch=branch,
            site=site,
            active=all(abs(m) == 1.5 for m in context),
            initial=layout.label(int(lo)),
            final=layout.label(int(hi)),
            neighbor_context=context or None,
            signed_hz=float(f),
        ))
    return StickSpectrum(tuple(lines), {'site': site, 'role': role.value, 'n_sites': hamiltonian.n_sites})


def energy_table(hamiltonian: ChainHamiltonian) -> pd.DataFrame:
    """Eigenenergies with their product-state labels, highest first"""
    layout = hamiltonian.layout
    frame = pd.DataFrame({'label': layout.labels(), 'energy_hz': np.asarray(hamiltonian.energies) / (2 * math.pi)})
    for sub in layout.subsystems:
        frame[f"m_{sub.symbol}"] = layout.m_values(sub.key)
    return frame.sort_values('energy_hz', ascending=False, kind='mergesort').reset_index(drop=True)


def single_molecule_lines(b0_tesla: float, species, constants: Optional[ConstantsTable] = None) -> StickSpectrum:
    """ESR and NMR sticks of one molecule, merged"""
    hamiltonian = build_single(b0_tesla, species, constants)
    esr = transition_catalog(hamiltonian, (1, Role.ELECTRON))
    nmr = transition_catalog(hamiltonian, (1, Role.NUCLEAR))
    spectrum = StickSpectrum(esr.lines + nmr.lines, {
        'species': hamiltonian.config.species.name,
        'b0_tesla': b0_tesla,
        'electron_larmor_hz': float(hamiltonian.electron_larmor[0] / (2 * math.pi)),
        'nuclear_larmor_hz': float(abs(hamiltonian.nuclear_larmor[0]) / (2 * math.pi)),
        'hyperfine_hz': hamiltonian.config.species.hyperfine_hz,
    })
    return spectrum.merged()


def closed_form_single_lines(b0_tesla: float, species, constants: Optional[ConstantsTable] = None) -> Dict[str, List[float]]:
    """Independent line positions: ESR at W_S -+ A/2, NMR at |W_I - m_S A|"""
    if isinstance(species, str):
        species = load_physics_defaults().get_species(species)
    omega_s = electron_larmor(b0_tesla, constants)
    omega_i = nuclear_larmor(species, b0_tesla, signed=True)
    a = species.hyperfine_hz
    return {
        'ESR': sorted([omega_s - a / 2, omega_s + a / 2]),
        'NMR': sorted(abs(omega_i - m * a) for m in _ELECTRON_M),
    }


# ===== CHAIN ELECTRON LINES =====

def chain_electron_lines(config: RegisterConfig, site: int, neighbor_model: str = 'enumerate',
                         neighbor_order: int = 1, nuclear_m: Optional[float] = 0.5) -> StickSpectrum:
    """
    Electron lines of one site as its neighbours take every allowed configuration.

    enumerate: neighbours within neighbor_order take all four m values
    ideal: neighbours restricted to +-3/2 (qubit states only)
    polarized: nearest neighbours enumerated, all farther electrons parked at +3/2
    with the full coupling matrix in place

    Couplings beyond neighbor_order are dropped in enumerate/ideal mode. With
    nuclear_m=None both hyperfine branches are included.
    """
    n = config.n_sites
    if not 1 <= site <= n:
        raise PhysicsInputError(f"Site {site} outside 1..{n}")
    if neighbor_model not in NEIGHBOR_MODELS:
        raise PhysicsInputError(f"Unknown neighbor model {neighbor_model!r}; expected one of {NEIGHBOR_MODELS}")
    if neighbor_order < 1:
        raise PhysicsInputError(f"neighbor_order must be at least 1, got {neighbor_order}")
    if (neighbor_model == 'polarized' or neighbor_order > 1) and config.coupling_range != 'full':
        raise PhysicsInputError(f"{neighbor_model} mode at order {neighbor_order} needs coupling_range='full'")

    if neighbor_model == 'polarized':
        order, max_order = 1, None
    else:
        order, max_order = neighbor_order, neighbor_order
    neighbors = [s for s in range(site - order, site + order + 1) if s != site and 1 <= s <= n]
    if neighbor_model == 'ideal' and not neighbors:
        raise PhysicsInputError(f"Site {site} has no neighbours to restrict")

    hamiltonian = ChainHamiltonian(config, max_order=max_order)
    choices = _IDEAL_M if neighbor_model == 'ideal' else _ELECTRON_M
    if neighbors:
        contexts = np.array(list(itertools.product(choices, repeat=len(neighbors))), dtype=float)
    else:
        contexts = np.zeros((1, 0))
    branches = (0.5, -0.5) if nuclear_m is None else (float(nuclear_m),)
    d_nn = dipolar_coupling(config.min_spacing_m, config.constants) if config.min_spacing_m else 0.0

    lines = []
    references = {}
    for m_i in branches:
        electron = np.full((len(contexts), n), 1.5)
        electron[:, [s - 1 for s in neighbors]] = contexts
        nuclear = np.full((len(contexts), n), 0.5)
        nuclear[:, site - 1] = m_i

        upper, lower = electron.copy(), electron.copy()
        upper[:, site - 1] = 1.5
        lower[:, site - 1] = 0.5
        signed = (hamiltonian.energy_of(upper, nuclear) - hamiltonian.energy_of(lower, nuclear)) / (2 * math.pi)

        a = hamiltonian.NUCLEAR_AXIS
        references[m_i] = float((hamiltonian.electron_larmor[site - 1] + a * hamiltonian.hyperfine * m_i) / (2 * math.pi))
        for context, f in zip(contexts, signed):
            lines.append(TransitionLine(
                frequency_hz=float(abs(f)),
                branch='ESR',
                site=site,
                active=bool(np.all(np.abs(context) == 1.5)),
                initial=f"S{site}=+1/2,I{site}={format_m(m_i)}",
                final=f"S{site}=+3/2,I{site}={format_m(m_i)}",
                neighbor_context=tuple(float(m) for m in context) or None,
                signed_hz=float(f),
            ))

    logger.debug(f"Site {site}: {len(lines)} lines from {len(contexts)} neighbour contexts ({neighbor_model})")
    return StickSpectrum(tuple(lines), {
        'site': site,
        'neighbor_model': neighbor_model,
        'neighbor_order': neighbor_order,
        'neighbors': neighbors,
        'nuclear_m': nuclear_m,
        'reference_hz': references,
        'd_nn_hz': d_nn,
    })


def nonlocal_shift(config: RegisterConfig, site: int) -> float:
    """
    Line shift (Hz) from every electron two or more sites away sitting at +3/2.

    Sum over |i-k| >= 2 of (3/2) D_ik, read from the full coupling matrix.
    """
    if config.coupling_range != 'full':
        raise PhysicsInputError("The non-local shift needs coupling_range='full'")
    if not 1 <= site <= config.n_sites:
        raise PhysicsInputError(f"Site {site} outside 1..{config.n_sites}")
    row = coupling_matrix(config, angular=False)[site - 1]
    distance = np.abs(np.arange(config.n_sites) - (site - 1))
    return float(1.5 * row[distance >= 2].sum())

