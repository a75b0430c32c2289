#!/usr/bin/env python3
"""
Peapod Pipeline - Command-line entry point for register simulations

Examples:
    python pipelines/peapod_pipeline.py spectrum --config config/scenarios/single_p31.yaml --out output/single
    python pipelines/peapod_pipeline.py plan --config config/scenarios/layout_45mhz.yaml --set register.n_sites=4
    python pipelines/peapod_pipeline.py evolve --config config/scenarios/electron_cnot.yaml --sweep evolve.frame=interaction,larmor
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
