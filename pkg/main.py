# File: main.py
# Command-line entry point for the Majorana phase-space scenarios

import os
import sys
import time
import signal
import argparse
import traceback

# Debug and quiet flags are sniffed early so import diagnostics can use them
debug_mode = '--debug' in sys.argv
quiet_mode = '--quiet' in sys.argv

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_LIBRARY_ERROR = 3

if debug_mode and not quiet_mode:
    print("=== STARTING UP - INITIAL DIAGNOSTICS ===")
    print(f"Python version: {sys.version}")
    print(f"Current working directory: {os.getcwd()}")

# Check NumPy / SciPy before anything else imports them
try:
    import numpy as np
    if debug_mode and not quiet_mode:
        print(f"NumPy {np.__version__} imported successfully")
    try:
        import scipy.linalg
        import scipy.special
        if debug_mode and not quiet_mode:
            print("SciPy imported successfully")
    except ImportError:
        print("\n❌ Error: SciPy is missing or incompatible with the installed NumPy!")
        print("Please reinstall the libraries with:")
        print("\npip install -r requirements.txt\n")
        sys.exit(EXIT_LIBRARY_ERROR)
except ImportError:
    print("\n❌ Error: Cannot import NumPy!")
    print("Please install the requirements with:")
    print("\npip install -r requirements.txt\n")
    sys.exit(EXIT_LIBRARY_ERROR)

if debug_mode and not quiet_mode:
    print("Importing modules...")
try:
    from src.utils import get_timestamp, logger, set_debug_mode, write_csv, write_json
    if debug_mode and not quiet_mode:
        print("✓ utils imported")
except ImportError as e:
    print(f"❌ Error importing utils: {e}")
    traceback.print_exc()
    sys.exit(EXIT_LIBRARY_ERROR)

try:
    from src.core.config import CONFIG_FIELDS, OUTPUT_DIR, SCENARIOS, load_config_file, merge_config
    from src.core.errors import ConfigError, PhaseSpaceError
    if debug_mode and not quiet_mode:
        print(f"✓ config loaded, output directory: {OUTPUT_DIR}")
except ImportError as e:
    print(f"❌ Error importing config: {e}")
    traceback.print_exc()
    sys.exit(EXIT_LIBRARY_ERROR)

try:
    from src.scenarios import run_scenario
    if debug_mode and not quiet_mode:
        print("✓ scenarios imported")
except ImportError as e:
    print(f"❌ Error importing scenarios: {e}")
    traceback.print_exc()
    sys.exit(EXIT_LIBRARY_ERROR)


def signal_handler(sig, frame):
    """Turn SIGTERM into KeyboardInterrupt so the run stops through the normal path"""
    if not quiet_mode:
        print("\nStopping run...")
    raise KeyboardInterrupt


# Flag names that differ from the config field they set
FLAG_ALIASES = {
    't_final': ['--t-final', '--t'],
    'n_traj': ['--n-traj', '--traj'],
}

FLAG_HELP = {
    'modes': 'Number of fermionic modes M',
    'k': 'Scaling exponent of the Q-function',
    'seed': 'Root random seed',
    'threads': 'Worker cap; results do not depend on it',
    'trials': 'Random phase points per identity check',
    'step': 'Finite-difference step of the operator derivative',
    'samples': 'Monte Carlo sample count',
    'nodes': 'Gauss-Legendre nodes for single-mode quadrature',
    'h': 'Single-particle matrix h (rows separated by ";")',
    'delta': 'Pairing matrix delta (antisymmetric)',
    'omega': 'Frequency matrix omega of the loss model / bosonic comparator',
    'gamma': 'Loss matrix gamma',
    'n0': 'Initial occupation per mode',
    'alpha0': 'Initial coherent amplitude, comma separated',
    't_final': 'End time',
    'dt': 'Integrator step',
    'n_traj': 'Trajectory count of the dissipative ensemble',
    'grid': 'Cells of the single-mode PDE grid (0 disables it)',
    'record_every': 'Record every n-th step',
    'sampler': 'Domain sampler: importance or rejection',
}

MODEL_FIELDS = ('h', 'delta', 'omega', 'gamma', 'n0', 'alpha0')
EVOLUTION_FIELDS = ('t_final', 'dt', 'n_traj', 'grid', 'record_every')


def parse_arguments(argv=None):
    """Process command line arguments"""
    parser = argparse.ArgumentParser(
        description='Majorana-fermion Gaussian phase-space scenarios',
        allow_abbrev=False
    )
    parser.add_argument('scenario', nargs='*', help=f"Scenario to run, optionally after 'run': {', '.join(SCENARIOS)}")

    # Run options
    run_group = parser.add_argument_group('Run options')
    run_group.add_argument('--config', help='Configuration file with key = value lines')
    run_group.add_argument('--output', default=OUTPUT_DIR, help='Directory for JSON and CSV output')

    # Display options
    display_group = parser.add_argument_group('Display options')
    display_group.add_argument('--debug', action='store_true', help='Echo log records to the console')
    display_group.add_argument('--quiet', action='store_true', help='Print nothing but errors')

    # Scenario parameters; unset flags keep the file or default value
    groups = {
        'model': parser.add_argument_group('Model parameters'),
        'evolution': parser.add_argument_group('Evolution parameters'),
        'numerics': parser.add_argument_group('Numerical parameters'),
    }
    for name, spec in CONFIG_FIELDS.items():
        if name == 'scenario':
            continue
        if name in MODEL_FIELDS:
            group = groups['model']
        elif name in EVOLUTION_FIELDS:
            group = groups['evolution']
        else:
            group = groups['numerics']
        flags = FLAG_ALIASES.get(name, ['--' + name.replace('_', '-')])
        kind = spec.type if isinstance(spec.type, type) else {'int': int, 'float': float}.get(spec.type, str)
        group.add_argument(*flags, dest=name, type=kind, default=None, help=FLAG_HELP.get(name))

    args = parser.parse_args(argv)
    words = [word for word in args.scenario if word != 'run']
    if len(words) > 1:
        parser.error(f"expected one scenario, got {words}")
    args.scenario = words[0] if words else None
    return args


def write_outputs(result, output_dir: str):
    """Write <scenario>.json and one <scenario>_<table>.csv per table"""
    paths = [write_json(os.path.join(output_dir, f"{result.scenario}.json"), result.payload())]
    for name, (header, rows) in sorted(result.tables.items()):
        paths.append(write_csv(os.path.join(output_dir, f"{result.scenario}_{name}.csv"), header, rows))
    return paths


def print_summary(result, elapsed: float):
    print("\n" + "=" * 60)
    print(f"SCENARIO {result.scenario}")
    print("=" * 60)
    for name, check in result.checks.items():
        mark = "✓" if check["passed"] else "✗"
        print(f"  {mark} {name}: {check['value']:.3e} (tolerance {check['tolerance']:.3e})")
    print(f"\n{'✓ all checks passed' if result.passed else '✗ some checks failed'} in {elapsed:.1f}s")


def main(argv=None):
    """Parse the configuration, run one scenario and write its artifacts"""
    global debug_mode, quiet_mode

    signal.signal(signal.SIGTERM, signal_handler)

    args = parse_arguments(argv)
    quiet_mode = args.quiet
    debug_mode = args.debug and not quiet_mode
    set_debug_mode(debug_mode)

    flag_values = {name: getattr(args, name) for name in CONFIG_FIELDS if name != 'scenario'}
    flag_values['scenario'] = args.scenario
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = merge_config(file_values, flag_values)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    started, start_time = get_timestamp()
    logger.info(f"Run {started}: scenario {cfg.scenario}, output {args.output}")
    try:
        result = run_scenario(cfg)
        paths = write_outputs(result, args.output)
    except ConfigError as e:
        logger.error(f"Configuration error in {cfg.scenario}: {e}")
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (PhaseSpaceError, ArithmeticError, ValueError, np.linalg.LinAlgError, OSError) as e:
        logger.error(f"Scenario {cfg.scenario} failed: {type(e).__name__}: {e}")
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        if debug_mode:
            traceback.print_exc()
        return EXIT_LIBRARY_ERROR
    except KeyboardInterrupt:
        logger.error(f"Scenario {cfg.scenario} interrupted")
        return EXIT_LIBRARY_ERROR

    if not quiet_mode:
        print_summary(result, time.time() - start_time)
        for path in paths:
            print(f"  wrote {path}")
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
