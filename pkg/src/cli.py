import argparse
import logging
from pathlib import Path
from typing import List, Optional

from src.benchmark import ExperimentConfig, ExperimentRunner, get_experiment_logger, load_system, parse_matrix
from src.lti import StateSpace, TransferFunctionSiso, tf_to_ss
from src.lti.errors import ConfigError, RobustOcoError

DEFAULT_RESULTS_ROOT_DIR = Path("results")


def parse_beta_list(text: str) -> List[float]:
    """Comma-separated β values, e.g. "0,0.25,1.5"."""
    try:
        betas = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise ConfigError(f"cannot parse beta list {text!r}: {e}", key="--betas") from e
    if not betas:
        raise ConfigError("empty beta list", key="--betas")
    return betas


def _system_from_args(args: argparse.Namespace) -> StateSpace:
    if args.num is not None or args.den is not None:
        if args.num is None or args.den is None:
            raise ConfigError("--num and --den must be given together")
        num = parse_matrix(args.num, "--num").reshape(-1)
        den = parse_matrix(args.den, "--den").reshape(-1)
        return tf_to_ss(TransferFunctionSiso(tuple(num), tuple(den)))
    if args.config is None:
        raise ConfigError("norm needs --config or --num/--den")
    return load_system(args.config, args.system)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Robust online convex optimization control experiments.")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Run one closed-loop experiment.")
    sim.add_argument("--config", type=Path, required=True, help="Path to the YAML experiment config.")
    sim.add_argument("--out", type=Path, default=None, help="Output directory (default results/<name>).")
    sim.add_argument("--plot", action="store_true", help="Also write cost.svg and w_hat.svg.")

    sweep = sub.add_parser("sweep-beta", help="Average cost of the constrained controller over a beta grid.")
    sweep.add_argument("--config", type=Path, required=True, help="Path to the YAML experiment config.")
    sweep.add_argument("--betas", type=str, default=None, help="Comma list; overrides sweep.betas in the config.")
    sweep.add_argument("--out", type=Path, default=None, help="Output directory (default results/<name>).")
    sweep.add_argument("--plot", action="store_true", help="Also write sweep.svg.")

    bound = sub.add_parser("stability-bound", help="Largest certified FIR bound beta*.")
    bound.add_argument("--config", type=Path, required=True, help="Path to the YAML experiment config.")
    bound.add_argument("--tol", type=float, default=None, help="Relative bisection tolerance.")
    bound.add_argument("--out", type=Path, default=None, help="Write bisection.csv to this directory.")

    norm = sub.add_parser("norm", help="Induced l_inf norm of a system.")
    norm.add_argument("--config", type=Path, default=None, help="YAML file holding the system section.")
    norm.add_argument("--system", choices=["plant", "uncertainty"], default="plant", help="Section to read.")
    norm.add_argument("--num", type=str, default=None, help='Numerator coefficients, e.g. "0.1".')
    norm.add_argument("--den", type=str, default=None, help='Denominator coefficients, e.g. "[1 -0.9]".')
    norm.add_argument("--tol", type=float, default=None, help="Absolute tolerance on the truncated tail.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns 0 iff the requested computation completed."""
    args = build_parser().parse_args(argv)
    logger = get_experiment_logger(log_level=logging.DEBUG if args.verbose else logging.INFO)
    runner = ExperimentRunner(logger=logger)

    try:
        if args.command == "norm":
            runner.run_norm(_system_from_args(args), tol=args.tol)
            return 0

        config = ExperimentConfig.from_file(args.config)
        out_dir = args.out
        if out_dir is None and args.command != "stability-bound":
            out_dir = DEFAULT_RESULTS_ROOT_DIR / config.name

        if args.command == "simulate":
            runner.run_simulation(config, out_dir, plot=args.plot)
        elif args.command == "sweep-beta":
            betas = parse_beta_list(args.betas) if args.betas else config.betas
            if not betas:
                raise ConfigError("no betas given (use --betas or sweep.betas)", path=args.config)
            runner.run_sweep(config, betas, out_dir, plot=args.plot)
        elif args.command == "stability-bound":
            runner.run_stability_bound(config, tol=args.tol, out_dir=out_dir)
        return 0

    except (ConfigError, FileNotFoundError) as e:
        logger.critical(f"Setup failed: {e}")
    except RobustOcoError as e:
        logger.critical(f"{type(e).__name__}: {e}")
    except KeyboardInterrupt:
        logger.info("\nKeyboard interrupt detected. Shutting down.")
    except Exception as e:
        logger.critical(f"A critical error occurred: {e}", exc_info=True)
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
