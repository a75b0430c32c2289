"""
Spectrum Export - CSV tables and SVG stick plots
Outputs are byte-identical for identical inputs
"""
import logging
from pathlib import Path
from typing import Optional

import matplotlib
import pandas as pd
from matplotlib.figure import Figure

from src.spectrum.lines import StickSpectrum

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.6f'
SVG_HASH_SALT = 'peapod-register'


def spectrum_to_csv(spectrum: StickSpectrum, path: Path, float_format: str = FLOAT_FORMAT) -> Path:
    """One row per line, sorted by frequency then site"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    spectrum.to_frame().to_csv(path, index=False, float_format=float_format, lineterminator='\n')
    logger.info(f"Wrote {len(spectrum)} lines to {path}")
    return path


def table_to_csv(frame: pd.DataFrame, path: Path, float_format: str = FLOAT_FORMAT) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=float_format, lineterminator='\n')
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def spectrum_to_svg(spectrum: StickSpectrum, path: Path, title: str = '',
                    reference_hz: Optional[float] = None, unit_hz: float = 1e6) -> Path:
    """
    Stick plot with height proportional to degeneracy.

    Inactive lines (neighbours outside the qubit states) are drawn in gray.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    reference = reference_hz if reference_hz is not None else 0.0
    unit_label = {1.0: 'Hz', 1e3: 'kHz', 1e6: 'MHz', 1e9: 'GHz'}.get(unit_hz, f"x{unit_hz:g} Hz")

    fig = Figure(figsize=(8, 4))
    ax = fig.add_subplot(1, 1, 1)
    for line in spectrum.lines:
        x = (line.frequency_hz - reference) / unit_hz
        ax.vlines(x, 0, line.degeneracy, colors='black' if line.active else '0.6', linewidth=1.5)

    xlabel = f"frequency offset ({unit_label})" if reference_hz is not None else f"frequency ({unit_label})"
    ax.set_xlabel(xlabel)
    ax.set_ylabel('degeneracy')
    ax.set_ylim(bottom=0)
    if title:
        ax.set_title(title)

    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT}):
        fig.savefig(path, format='svg', metadata={'Date': None})
    logger.info(f"Wrote stick plot to {path}")
    return path
