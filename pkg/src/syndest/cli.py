"""Command-line interface for syndest."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from . import __version__
from .analysis import (
    PmfMode,
    biased_crb_mse_bound,
    estimator_moments_bsc,
    estimator_moments_snr,
    estimator_mse_bsc,
    fisher_information,
    resolve_mode,
)
from .channels import QMapVariant, rho_from_gamma
from .codes import DegreeProfile, ParityCheckMatrix, degree_profile, load_alist
from .estimators import SnrClamp, f_d
from .exceptions import ConfigurationError, DivergenceError, SyndestError
from .montecarlo import (
    DEFAULT_TRIALS,
    AwgnChannel,
    BscChannel,
    RegularCodeParams,
    SampleStats,
    SimConfig,
    SyndromeSource,
    run_awgn_trials,
    run_bsc_trials,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2

DEFAULT_DV = 3

SIM_COLUMNS = ["sim_mean", "sim_std", "sim_mse", "trials", "seed"]

# [tool.syndest] keys used as defaults for the matching flags
CONFIG_KEYS = frozenset({"trials", "seed", "workers", "mode", "qmap", "gamma_min", "gamma_max"})


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with EXIT_INVALID."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"Error: {message}\n")


def load_config() -> Dict[str, Any]:
    """
    Simulation and sweep defaults from ``[tool.syndest]`` in ./pyproject.toml.

    Only CONFIG_KEYS are returned; command-line flags still override them. A missing,
    unreadable or malformed file gives an empty dict.
    """
    try:
        import tomllib
    except ImportError:
        try:
            import tomli as tomllib  # Python 3.10
        except ImportError:
            return {}

    path = Path("pyproject.toml")
    if not path.is_file():
        return {}
    try:
        table = tomllib.loads(path.read_text(encoding="utf-8")).get("tool", {}).get("syndest", {})
    except (OSError, UnicodeDecodeError, tomllib.TOMLDecodeError):
        logger.debug(f"Ignoring unreadable {path}", exc_info=True)
        return {}
    if not isinstance(table, dict):
        return {}

    unknown = sorted(set(table) - CONFIG_KEYS)
    if unknown:
        logger.warning(f"Ignoring unknown [tool.syndest] keys: {', '.join(unknown)}")
    return {key: value for key, value in table.items() if key in CONFIG_KEYS}


def _setting(args: argparse.Namespace, config: Dict[str, Any], name: str, default: Any) -> Any:
    """CLI value if given, else the [tool.syndest] value, else ``default``."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(name, default)


def _grid(start: float, stop: float, step: float, name: str) -> List[float]:
    if step <= 0:
        raise ConfigurationError(f"--{name}-range step must be > 0, got {step}")
    if stop < start:
        raise ConfigurationError(f"--{name}-range stop {stop} is below start {start}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    # rounding keeps 0.1 + 0.2 style noise out of the CSV
    return [round(start + k * step, 12) for k in range(count)]


def _sweep_values(values: Optional[Sequence[float]], span: Optional[Sequence[float]], name: str) -> List[float]:
    if values and span:
        raise ConfigurationError(f"Use either --{name} or --{name}-range, not both")
    if span:
        return _grid(*span, name=name)
    if values:
        return list(values)
    raise ConfigurationError(f"One of --{name} or --{name}-range is required")


def _int_list(
    single: Optional[int], many: Optional[Sequence[int]], logspace: Optional[Sequence[float]], name: str
) -> List[int]:
    if logspace:
        start, stop, num = logspace
        points = np.logspace(np.log10(start), np.log10(stop), int(num))
        return sorted({int(round(p)) for p in points})
    if many:
        return list(many)
    if single is not None:
        return [single]
    raise ConfigurationError(f"--{name} is required")


def _check_rhos(rhos: Sequence[float]) -> None:
    for rho in rhos:
        if not 0.0 <= rho <= 0.5:
            raise ConfigurationError(f"rho={rho} outside [0, 1/2]")


def _clamp(args: argparse.Namespace, config: Dict[str, Any]) -> SnrClamp:
    return SnrClamp(
        float(_setting(args, config, "gamma_min", -10.0)),
        float(_setting(args, config, "gamma_max", 10.0)),
    )


def _optional(value: Optional[float]) -> float:
    return float("nan") if value is None else value


def _load_code(args: argparse.Namespace) -> Optional[ParityCheckMatrix]:
    """Matrix from --alist, checked against --n/--m/--d when those are given."""
    if not getattr(args, "alist", None):
        return None
    h = load_alist(Path(args.alist).read_text(encoding="utf-8"))
    if args.n is not None and args.n != h.n:
        raise ConfigurationError(f"alist matrix has n={h.n} columns but --n {args.n} was given")
    if getattr(args, "m", None) is not None and args.m != h.m:
        raise ConfigurationError(f"alist matrix has m={h.m} rows but --m {args.m} was given")
    if args.d is not None and not (h.is_regular and degree_profile(h).degrees[0] == args.d):
        raise ConfigurationError(f"alist matrix is not check-regular with degree {args.d}")
    return h


def _regular_code(n: Optional[int], dv: int, d: int, m: int, seed: int) -> RegularCodeParams:
    """Code parameters for a d-regular code with m checks; n defaults to m*d/dv."""
    if n is None:
        if (m * d) % dv:
            raise ConfigurationError(f"m*d={m * d} is not divisible by dv={dv}; pass --n explicitly")
        n = m * d // dv
    params = RegularCodeParams(n=n, dv=dv, d=d, seed=seed)
    if params.m != m:
        raise ConfigurationError(f"n={n}, dv={dv}, d={d} give m={params.m} checks, not {m}")
    return params


def _simulation_code(
    n: Optional[int],
    code: Optional[ParityCheckMatrix],
    dv: int,
    d: int,
    m: int,
    seed: int,
    source: SyndromeSource,
) -> Union[ParityCheckMatrix, DegreeProfile]:
    """The --alist matrix if given; otherwise a built regular code, or only its profile for i.i.d. draws."""
    if code is not None:
        return code
    if source is SyndromeSource.IID:
        return DegreeProfile.regular(d, m)
    return _regular_code(n, dv, d, m, seed).build()


def _simulation_columns(stats: SampleStats) -> Dict[str, Any]:
    return dict(zip(SIM_COLUMNS, (stats.mean, stats.std, stats.mse, stats.trials, stats.seed)))


def _render(frame: pd.DataFrame, metadata: Dict[str, Any]) -> str:
    header = "".join(f"# {key}={value}\n" for key, value in metadata.items())
    return header + frame.to_csv(index=False, float_format="%.17g", na_rep="", lineterminator="\n")


def _emit(frame: pd.DataFrame, metadata: Dict[str, Any], output: Optional[str]) -> None:
    text = _render(frame, metadata)
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {len(frame)} row(s) to {output}")


def _execute(body: Callable[[], None]) -> int:
    """Run a command body and map failures to exit codes."""
    try:
        body()
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except (SyndestError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def _simulation_settings(args: argparse.Namespace, config: Dict[str, Any]) -> Tuple[int, int, int, SyndromeSource]:
    trials = int(_setting(args, config, "trials", DEFAULT_TRIALS))
    seed = int(_setting(args, config, "seed", 0))
    workers = int(_setting(args, config, "workers", 1))
    source = SyndromeSource(getattr(args, "syndrome_source", None) or "code")
    return trials, seed, workers, source


def cmd_sweep_rho(args: argparse.Namespace) -> int:
    """Analytical BSC estimator moments over a list of rho (optionally with simulation)."""
    config = load_config()

    def body() -> None:
        mode = PmfMode(_setting(args, config, "mode", "exact"))
        rhos = _sweep_values(args.rho, args.rho_range, "rho")
        _check_rhos(rhos)
        code = _load_code(args)
        if code is not None:
            if not code.is_regular:
                raise ConfigurationError("sweep-rho needs a check-regular code")
            d, m = degree_profile(code).entries[0]
        else:
            if args.d is None or args.m is None:
                raise ConfigurationError("--d and --m are required (or --alist)")
            d, m = args.d, args.m

        metadata: Dict[str, Any] = {
            "command": "sweep-rho", "version": __version__, "d": d, "m": m, "mode": mode.value,
            "normalization": "true_param",
        }
        sim_code = None
        if args.simulate:
            trials, seed, workers, source = _simulation_settings(args, config)
            dv = args.dv or DEFAULT_DV
            code_seed = args.code_seed if args.code_seed is not None else seed
            sim_code = _simulation_code(args.n, code, dv, d, m, code_seed, source)
            metadata.update(trials=trials, seed=seed, syndrome_source=source.value)
            if isinstance(sim_code, ParityCheckMatrix):
                metadata.update(n=sim_code.n, code_hash=sim_code.digest())

        rows = []
        for rho in rhos:
            report = estimator_moments_bsc(d, rho, m, mode)
            row: Dict[str, Any] = {
                "rho": rho,
                "mean": report.mean,
                "bias": report.bias,
                "mse": report.mse,
                "crb_bound": _optional(report.crb_mse_bound),
                "fisher": _optional(report.fisher),
                "norm_mean": report.mean / rho if rho > 0 else float("nan"),
                "norm_std": report.std / rho if rho > 0 else float("nan"),
                "mode_used": report.mode.value,
            }
            if sim_code is not None:
                stats = run_bsc_trials(SimConfig(
                    code=sim_code, channel=BscChannel(rho), trials=trials, seed=seed,
                    syndrome_source=source, workers=workers,
                ))
                row.update(_simulation_columns(stats))
            rows.append(row)
        _emit(pd.DataFrame(rows), metadata, args.output)

    return _execute(body)


def cmd_sweep_dm(args: argparse.Namespace) -> int:
    """BSC estimator MSE, biased CRB and inverse Fisher information over (m, d) pairs at fixed rho."""
    config = load_config()

    def body() -> None:
        mode = PmfMode(_setting(args, config, "mode", "exact"))
        if not args.rho or len(args.rho) != 1:
            raise ConfigurationError("sweep-dm needs exactly one --rho")
        rho = args.rho[0]
        _check_rhos([rho])
        d_list = _int_list(args.d, args.d_list, None, "d")
        m_list = _int_list(args.m, args.m_list, args.m_logspace, "m")

        rows = []
        for d in d_list:
            for m in m_list:
                try:
                    information = fisher_information(d, rho, m)
                    bound = biased_crb_mse_bound(d, rho, m, mode)
                except DivergenceError:
                    information, bound = float("nan"), float("nan")
                rows.append({
                    "m": m,
                    "d": d,
                    "mse": estimator_mse_bsc(d, rho, m, mode),
                    "crb_bound": bound,
                    "fisher_inverse": 1.0 / information if information else float("nan"),
                    "mode_used": resolve_mode(mode, m, f_d(rho, d)).value,
                })
        metadata = {"command": "sweep-dm", "version": __version__, "rho": rho, "mode": mode.value}
        _emit(pd.DataFrame(rows), metadata, args.output)

    return _execute(body)


def cmd_sweep_gamma(args: argparse.Namespace) -> int:
    """Analytical SNR estimator moments over gamma (and optionally d and m lists)."""
    config = load_config()

    def body() -> None:
        mode = PmfMode(_setting(args, config, "mode", "exact"))
        variant = QMapVariant(_setting(args, config, "qmap", "paper"))
        clamp = _clamp(args, config)
        gammas = _sweep_values(args.gamma, args.gamma_range, "gamma")
        code = _load_code(args)
        if code is not None:
            if not code.is_regular:
                raise ConfigurationError("sweep-gamma needs a check-regular code")
            d, m = degree_profile(code).entries[0]
            if args.m_logspace:
                raise ConfigurationError("--m-logspace cannot be combined with --alist")
            for name, given, actual in (("d", args.d_list, d), ("m", args.m_list, m)):
                if given and list(given) != [actual]:
                    raise ConfigurationError(f"alist matrix has {name}={actual} but --{name}-list {given} was given")
            d_list, m_list = [d], [m]
        else:
            d_list = _int_list(args.d, args.d_list, None, "d")
            m_list = _int_list(args.m, args.m_list, args.m_logspace, "m")

        metadata: Dict[str, Any] = {
            "command": "sweep-gamma", "version": __version__, "qmap": variant.value, "mode": mode.value,
            "gamma_min": clamp.gamma_min, "gamma_max": clamp.gamma_max,
        }
        if args.simulate:
            trials, seed, workers, source = _simulation_settings(args, config)
            dv = args.dv or DEFAULT_DV
            code_seed = args.code_seed if args.code_seed is not None else seed
            metadata.update(trials=trials, seed=seed, syndrome_source=source.value, dv=dv)
            if code is not None:
                metadata.update(n=code.n, code_hash=code.digest())

        rows = []
        for d in d_list:
            for m in m_list:
                sim_code = None
                if args.simulate:
                    sim_code = _simulation_code(args.n, code, dv, d, m, code_seed, source)
                for gamma in gammas:
                    report = estimator_moments_snr(d, gamma, m, variant, clamp, mode)
                    row: Dict[str, Any] = {
                        "gamma": gamma,
                        "d": d,
                        "m": m,
                        "mean": report.mean,
                        "bias": report.bias,
                        "mse": report.mse,
                        "std": report.std,
                        "mode_used": report.mode.value,
                    }
                    if sim_code is not None:
                        stats = run_awgn_trials(SimConfig(
                            code=sim_code, channel=AwgnChannel(gamma, variant, clamp), trials=trials, seed=seed,
                            syndrome_source=source, workers=workers,
                        ))
                        row.update(_simulation_columns(stats))
                    rows.append(row)
        _emit(pd.DataFrame(rows), metadata, args.output)

    return _execute(body)


def cmd_simulate(args: argparse.Namespace) -> int:
    """Monte-Carlo estimator statistics for one channel point."""
    config = load_config()

    def body() -> None:
        trials, seed, workers, source = _simulation_settings(args, config)
        if (args.rho is None) == (args.gamma is None):
            raise ConfigurationError("simulate needs exactly one of --rho or --gamma")

        code: Any = _load_code(args)
        if code is None:
            if args.n is None or args.d is None:
                raise ConfigurationError("--n and --d are required (or --alist)")
            dv = args.dv or DEFAULT_DV
            code_seed = args.code_seed if args.code_seed is not None else seed
            code = RegularCodeParams(n=args.n, dv=dv, d=args.d, seed=code_seed)
            if source is SyndromeSource.CODE:
                code = code.build()

        metadata: Dict[str, Any] = {
            "command": "simulate", "version": __version__, "seed": seed, "trials": trials,
            "syndrome_source": source.value,
        }
        if isinstance(code, ParityCheckMatrix):
            metadata.update(n=code.n, m=code.m, code_hash=code.digest())
        else:
            metadata.update(n=code.n, m=code.m, dv=code.dv, d=code.d, code_seed=code.seed)

        if args.rho is not None:
            rho = args.rho[0]
            channel_name, param = "bsc", rho
            stats = run_bsc_trials(SimConfig(
                code=code, channel=BscChannel(rho), trials=trials, seed=seed,
                syndrome_source=source, workers=workers,
            ))
        else:
            variant = QMapVariant(_setting(args, config, "qmap", "paper"))
            clamp = _clamp(args, config)
            gamma = args.gamma[0]
            channel_name, param = "biawgn", gamma
            metadata.update(variant=variant.value, gamma_min=clamp.gamma_min, gamma_max=clamp.gamma_max,
                            rho=float(rho_from_gamma(gamma, variant)))
            stats = run_awgn_trials(SimConfig(
                code=code, channel=AwgnChannel(gamma, variant, clamp), trials=trials, seed=seed,
                syndrome_source=source, workers=workers,
            ))

        frame = pd.DataFrame([{
            "channel": channel_name,
            "param": param,
            "trials": stats.trials,
            "seed": stats.seed,
            "mean": stats.mean,
            "std": stats.std,
            "mse": stats.mse,
            "min": stats.min,
            "max": stats.max,
            "standard_error": stats.standard_error,
        }])
        _emit(frame, metadata, args.output)

    return _execute(body)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--d', type=int, help='Check node degree')
    parser.add_argument('--m', type=int, help='Number of check nodes')
    parser.add_argument('--mode', choices=[m.value for m in PmfMode],
                        help='Weight-distribution evaluation (default: exact)')
    parser.add_argument('--output', '-o', help='Output CSV path (default: standard output)')


def _add_simulation(parser: argparse.ArgumentParser, flag: bool = True) -> None:
    if flag:
        parser.add_argument('--simulate', action='store_true', help='Add Monte-Carlo columns')
    parser.add_argument('--n', type=int, help='Code length (default: m*d/dv)')
    parser.add_argument('--dv', type=int, help=f'Variable node degree (default: {DEFAULT_DV})')
    parser.add_argument('--alist', type=str, help='Parity-check matrix in alist format')
    parser.add_argument('--trials', type=int, help=f'Monte-Carlo trials (default: {DEFAULT_TRIALS})')
    parser.add_argument('--seed', type=int, help='Simulation seed (default: 0)')
    parser.add_argument('--code-seed', type=int, help='Matrix construction seed (default: --seed)')
    parser.add_argument('--syndrome-source', choices=[s.value for s in SyndromeSource],
                        help='Syndrome weights from the code or i.i.d. Binomial draws (default: code)')
    parser.add_argument('--workers', type=int, help='Worker threads for trials (default: 1)')


def _add_snr(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--qmap', choices=[v.value for v in QMapVariant],
                        help='SNR to crossover map (default: paper)')
    parser.add_argument('--gamma-min', type=float, help='Lower SNR clamp in dB (default: -10)')
    parser.add_argument('--gamma-max', type=float, help='Upper SNR clamp in dB (default: 10)')


def main() -> int:
    """Main CLI entry point."""
    parser = _Parser(
        prog='syndest',
        description='Syndrome-based channel estimation: analysis sweeps and simulations'
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Enable debug logging')

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    # sweep-rho
    rho_parser = subparsers.add_parser('sweep-rho', help='BSC estimator moments as a function of rho')
    _add_common(rho_parser)
    rho_parser.add_argument('--rho', type=float, nargs='+', help='Crossover probabilities')
    rho_parser.add_argument('--rho-range', type=float, nargs=3, metavar=('START', 'STOP', 'STEP'),
                            help='Inclusive rho grid')
    _add_simulation(rho_parser)

    # sweep-dm
    dm_parser = subparsers.add_parser('sweep-dm', help='BSC estimator MSE over check count and degree')
    _add_common(dm_parser)
    dm_parser.add_argument('--rho', type=float, nargs=1, help='Crossover probability')
    dm_parser.add_argument('--d-list', type=int, nargs='+', help='Check degrees')
    dm_parser.add_argument('--m-list', type=int, nargs='+', help='Check counts')
    dm_parser.add_argument('--m-logspace', type=float, nargs=3, metavar=('START', 'STOP', 'NUM'),
                           help='Log-spaced check counts (rounded, de-duplicated)')

    # sweep-gamma
    gamma_parser = subparsers.add_parser('sweep-gamma', help='SNR estimator moments as a function of gamma')
    _add_common(gamma_parser)
    _add_snr(gamma_parser)
    gamma_parser.add_argument('--gamma', type=float, nargs='+', help='SNR values in dB')
    gamma_parser.add_argument('--gamma-range', type=float, nargs=3, metavar=('START', 'STOP', 'STEP'),
                              help='Inclusive SNR grid in dB')
    gamma_parser.add_argument('--d-list', type=int, nargs='+', help='Check degrees')
    gamma_parser.add_argument('--m-list', type=int, nargs='+', help='Check counts')
    gamma_parser.add_argument('--m-logspace', type=float, nargs=3, metavar=('START', 'STOP', 'NUM'),
                              help='Log-spaced check counts (rounded, de-duplicated)')
    _add_simulation(gamma_parser)

    # simulate
    sim_parser = subparsers.add_parser('simulate', help='Monte-Carlo statistics for one channel point')
    _add_common(sim_parser)
    _add_snr(sim_parser)
    sim_parser.add_argument('--rho', type=float, nargs=1, help='BSC crossover probability')
    sim_parser.add_argument('--gamma', type=float, nargs=1, help='BI-AWGN SNR in dB')
    _add_simulation(sim_parser, flag=False)

    args = parser.parse_args()

    logging.basicConfig(
        level=logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr
    )
    if args.verbose:
        logging.getLogger('syndest').setLevel(logging.DEBUG)

    if args.command == 'sweep-rho':
        return cmd_sweep_rho(args)
    elif args.command == 'sweep-dm':
        return cmd_sweep_dm(args)
    elif args.command == 'sweep-gamma':
        return cmd_sweep_gamma(args)
    elif args.command == 'simulate':
        return cmd_simulate(args)
    else:
        parser.print_help()
        return 0


if __name__ == '__main__':
    sys.exit(main())
