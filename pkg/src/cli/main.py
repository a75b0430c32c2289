"""
Command Line - Subcommand parsing, run logging and exit codes
"""
import argparse
import glob
import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from src.cli.runner import ScenarioRunner, parse_sweep, run_sweep
from src.cli.scenario import SCENARIO_KINDS, load_scenario, scenario_schema
from src.errors import EXIT_UNEXPECTED, PeapodError
from src.settings import SimulationSettings, load_settings, load_yaml

logger = logging.getLogger(__name__)

EXIT_OK = 0


class RunLogger:
    """Console plus timestamped file logging for one run, pruning old log files"""

    def __init__(self, name: str, out_dir: Path, settings: SimulationSettings, level: Optional[str] = None):
        config = settings.logging
        self.log_dir = Path(out_dir) / config.log_directory
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.name = name

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
        self.log_file = self.log_dir / f"{name}_{timestamp}.log"

        # module loggers all live under 'src'
        self.logger = logging.getLogger('src')
        self.logger.setLevel((level or config.level).upper())
        formatter = logging.Formatter(config.format)

        self.file_handler = logging.FileHandler(self.log_file)
        self.console_handler = logging.StreamHandler(sys.stderr)
        for handler in (self.file_handler, self.console_handler):
            handler.setFormatter(formatter)
            self.logger.addHandler(handler)

        self.keep_logs = config.keep_logs
        self._cleanup_old_logs()

    def _cleanup_old_logs(self):
        """Remove old log files, keeping only recent ones"""
        log_files = sorted(glob.glob(str(self.log_dir / f"{self.name}_*.log")))
        for old_log in log_files[:-self.keep_logs]:
            try:
                Path(old_log).unlink()
            except OSError as e:
                logger.debug(f"Could not remove {old_log}: {e}")

    def close(self):
        for handler in (self.file_handler, self.console_handler):
            self.logger.removeHandler(handler)
            handler.close()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='Scenario YAML/JSON file')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='Dotted override, e.g. register.b0_tesla=2.0 (repeatable)')
    common.add_argument('--out', type=Path, help='Output directory (default from simulation.yaml)')
    common.add_argument('--seed', type=int, help='Random seed (overrides the scenario)')
    common.add_argument('--dry-run', action='store_true', help='Validate and print derived parameters only')
    common.add_argument('--sweep', metavar='KEY=V1,V2', help='Run one scenario per value on a thread pool')
    common.add_argument('--format', dest='formats', action='append', choices=('csv', 'json', 'svg'),
                        help='Artifact format to write (repeatable; default from simulation.yaml)')
    common.add_argument('--summary', choices=('text', 'json'), default='text', help='Summary format on stdout')
    common.add_argument('--json-errors', action='store_true', help='Print error diagnostics as JSON on stderr')
    common.add_argument('--log-level', choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'), help='Override log level')
    common.add_argument('--settings', type=Path, help='Alternative simulation.yaml')

    parser = argparse.ArgumentParser(prog='peapod', description='Endohedral-fullerene peapod register simulator')
    subparsers = parser.add_subparsers(dest='command', required=True)
    helps = {
        'spectrum': 'Single-molecule or chain stick spectra',
        'gates': 'Ideal gate protocols and their unitaries',
        'evolve': 'Pulse-level evolution and gate fidelity',
        'readout': 'Mobile-electron spin-filter readout',
        'transfer': 'Bus-qubit transfer schedule and fidelity',
        'plan': 'Frequency-addressing feasibility and gradient search',
        'thermal': 'Thermal populations of the register',
    }
    for kind in SCENARIO_KINDS:
        subparsers.add_parser(kind, parents=[common], help=helps[kind])
    subparsers.add_parser('schema', help='Print the scenario JSON schema')
    return parser


def _print_summary(summary: dict, fmt: str) -> None:
    if fmt == 'json':
        print(json.dumps(summary, indent=2, sort_keys=True, default=str))
        return
    print("=" * 60)
    print(f"{summary.get('kind', 'run').upper()} SUMMARY")
    print("=" * 60)
    for key, value in sorted(summary.get('results', summary).items()):
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True, default=str)
            if len(value) > 80:
                value = value[:77] + '...'
        print(f"{key:.<40} {value}")


def _dry_run(args: argparse.Namespace, overrides: List[str], out_dir: Path, settings: SimulationSettings) -> dict:
    """Validated scenario and derived parameters; one entry per value when sweeping"""
    if not args.sweep:
        scenario = load_scenario(args.config, overrides)
        return ScenarioRunner(scenario, out_dir, settings, args.formats).dry_run(args.command)
    key, values = parse_sweep(args.sweep)
    points = {}
    for value in values:
        scenario = load_scenario(args.config, overrides + [f"{key}={value}"])
        points[f"{key}={value}"] = ScenarioRunner(scenario, out_dir, settings, args.formats).dry_run(args.command)
    return {'kind': args.command, 'sweep': key, 'points': points}


def _report_error(error: PeapodError, json_errors: bool) -> int:
    logger.error(f"❌ {type(error).__name__}: {error.message}")
    if json_errors:
        print(json.dumps(error.to_dict(), indent=2, sort_keys=True, default=str), file=sys.stderr)
    return error.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == 'schema':
        print(json.dumps(scenario_schema(), indent=2, sort_keys=True))
        return EXIT_OK

    run_logger = None
    try:
        settings = load_settings(str(args.settings) if args.settings else None)
        out_dir = args.out or Path(settings.output.directory)
        overrides = list(args.overrides)
        if args.seed is not None:
            overrides.append(f"seed={args.seed}")

        if args.dry_run:
            _print_summary(_dry_run(args, overrides, out_dir, settings), 'json')
            return EXIT_OK

        run_logger = RunLogger(f"peapod_{args.command}", out_dir, settings, args.log_level)

        if args.sweep:
            raw = load_yaml(args.config) if args.config else {}
            index = run_sweep(args.command, raw, overrides, args.sweep, out_dir, settings, args.formats)
            _print_summary({'kind': 'sweep', 'results': {'points': len(index),
                                                        'failed': int((index['exit_code'] != 0).sum())}},
                           args.summary)
            return int(index['exit_code'].max())

        scenario = load_scenario(args.config, overrides)
        summary = ScenarioRunner(scenario, out_dir, settings, args.formats).run(args.command)
        _print_summary(summary, args.summary)
        return EXIT_OK

    except PeapodError as e:
        return _report_error(e, args.json_errors)
    except KeyboardInterrupt:
        logger.error("Run interrupted by user")
        return EXIT_UNEXPECTED
    except Exception as e:
        logger.error(f"💥 Run failed: {e}")
        if args.json_errors:
            print(json.dumps({'type': type(e).__name__, 'message': str(e), 'exit_code': EXIT_UNEXPECTED,
                              'details': {}}, indent=2), file=sys.stderr)
        return EXIT_UNEXPECTED
    finally:
        if run_logger is not None:
            run_logger.close()
