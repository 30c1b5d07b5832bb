import argparse
import cmath
import math
import sys
import uuid
from typing import Any
from typing import Optional
from typing import Sequence

import numpy as np
import pandas as pd

from . import __version__
from . import _disk
from . import _ledger
from . import flows
from . import nls
from . import oscillators
from . import qschrodinger
from ._typing import DomainError
from ._typing import NoConvergence
from ._typing import NoShock
from ._typing import QoscError
from ._typing import SeriesControl
from ._typing import SpectrumTable

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4

# image sums that only converge for a vortex
VORTEX_ONLY = ("kummer", "annulus", "double_wedge")
ANNULAR = ("annulus", "double_wedge")

Result = tuple[dict[str, Any], pd.DataFrame]


def _output_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="Output format; csv writes the main table only",
    )
    parent.add_argument(
        "--output",
        "-o",
        type=str,
        default="-",
        help="Output file, '-' for standard output",
    )
    return parent


def _add_spectrum(sub, parent) -> None:
    p = sub.add_parser(
        "spectrum", parents=[parent], help="Energy levels of an oscillator model"
    )
    p.add_argument(
        "--model",
        choices=("sym_q", "semirel", "golden", "annulus_bs", "annulus_f"),
        required=True,
    )
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--hbar-omega", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--r1", type=float, default=1.0)
    p.add_argument("--r2", type=float, default=3.0)
    p.add_argument("--variant", choices=("sum", "difference"), default="sum")
    p.add_argument("--action-scale", type=float, default=1.0)
    p.set_defaults(func=run_spectrum)


def _add_qpoly(sub, parent) -> None:
    p = sub.add_parser(
        "qpoly",
        parents=[parent],
        help="q-Kampe de Feriet polynomial solutions and their zeros",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--times", type=float, nargs="*", default=[])
    p.add_argument("--check-residual", action="store_true")
    p.add_argument("--roots-output", type=str, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=run_qpoly)


def _add_flow(sub, parent) -> None:
    p = sub.add_parser(
        "flow", parents=[parent], help="Sample an image-theorem flow on a grid"
    )
    p.add_argument(
        "--domain",
        choices=(
            "circle",
            "wedge",
            "kummer",
            "circular_wedge",
            "annulus",
            "double_wedge",
        ),
        required=True,
    )
    p.add_argument("--flow", choices=("vortex", "uniform"), default="vortex")
    p.add_argument("--z0-re", type=float, default=1.0)
    p.add_argument("--z0-im", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--U", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--r1", type=float, default=1.0)
    p.add_argument("--r2", type=float, default=2.0)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--x-min", type=float, default=-3.0)
    p.add_argument("--x-max", type=float, default=3.0)
    p.add_argument("--y-min", type=float, default=-3.0)
    p.add_argument("--y-max", type=float, default=3.0)
    p.add_argument("--nx", type=int, default=41)
    p.add_argument("--ny", type=int, default=41)
    p.add_argument("--mask-radius", type=float, default=1e-3)
    p.add_argument("--report", action="store_true")
    p.add_argument(
        "--report-output",
        type=str,
        default=None,
        help="Write the boundary residual report as JSON to this file",
    )
    p.set_defaults(func=run_flow)


def _add_vortex_sim(sub, parent) -> None:
    p = sub.add_parser(
        "vortex-sim", parents=[parent], help="Vortex in an annulus, RK4 in time"
    )
    p.add_argument("--z0-re", type=float, default=1.7)
    p.add_argument("--z0-im", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--r1", type=float, default=1.0)
    p.add_argument("--r2", type=float, default=3.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--report", action="store_true")
    p.add_argument(
        "--report-output",
        type=str,
        default=None,
        help="Write the conservation report as JSON to this file",
    )
    p.set_defaults(func=run_vortex_sim)


def _add_nls_check(sub, parent) -> None:
    p = sub.add_parser(
        "nls-check", parents=[parent], help="Residual checks of the NLS hierarchy"
    )
    p.add_argument(
        "--test",
        choices=("flows", "soliton", "zero_curvature", "qnls"),
        required=True,
    )
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=0.3)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--p", type=float, default=0.7)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.3)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--length", type=float, default=None)
    p.set_defaults(func=run_nls_check)


def _create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qosc",
        description="q- and f-oscillators: spectra, polynomials, flows, hierarchies",
    )
    parser.add_argument(
        "--version",
        action="store_true",
        help="Print version information and exit",
    )
    parser.add_argument(
        "--debug",
        "-d",
        action="store_true",
        help="Log at debug level",
    )
    parser.add_argument(
        "--config",
        type=str,
        default="pyproject.toml",
        help="Name or path to config file with a tool.qosc table",
    )
    parser.add_argument(
        "--ledger",
        type=str,
        default=None,
        help="sqlite file recording one row per run; overrides the config value",
    )
    parent = _output_parser()
    sub = parser.add_subparsers(dest="command")
    _add_spectrum(sub, parent)
    _add_qpoly(sub, parent)
    _add_flow(sub, parent)
    _add_vortex_sim(sub, parent)
    _add_nls_check(sub, parent)
    return parser


_GLOBAL_ARGS = {
    "version",
    "debug",
    "config",
    "ledger",
    "command",
    "func",
    "format",
    "output",
}


def _echo_params(args: argparse.Namespace) -> dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _GLOBAL_ARGS}


def _control(settings: dict[str, Any]) -> SeriesControl:
    return SeriesControl(float(settings["tol"]), int(settings["max-terms"]))


def _spectrum_result(table: SpectrumTable, params: dict[str, Any]) -> Result:
    payload = {"command": "spectrum", **table.to_dict()}
    payload["model_params"] = payload.pop("params")
    payload["params"] = params
    if table.exact is not None:
        payload["exact"] = [str(e) for e in table.exact]
    return payload, table.to_frame()


def run_spectrum(args: argparse.Namespace, settings: dict[str, Any]) -> Result:
    ctl = _control(settings)
    if args.model == "sym_q":
        table = oscillators.sym_q_spectrum(args.lam, args.n_max)
    elif args.model == "semirel":
        table = oscillators.semi_relativistic_spectrum(
            args.m, args.c, args.omega0, args.n_max, args.variant
        )
    elif args.model == "golden":
        table = oscillators.golden_spectrum(args.n_max, args.hbar_omega)
    else:
        spec = flows.AnnulusSpec(args.r1, args.r2, settings["truncation"])
        build = (
            flows.annulus_bohr_sommerfeld
            if args.model == "annulus_bs"
            else flows.annulus_f_spectrum
        )
        table = build(
            args.n_max, args.gamma, spec, ctl, action_scale=args.action_scale
        )
    return _spectrum_result(table, _echo_params(args))


def run_qpoly(args: argparse.Namespace, settings: dict[str, Any]) -> Result:
    disp = qschrodinger.DispersionOperator(args.lam, args.hbar, args.m)
    poly = qschrodinger.qkf_polynomial(args.n, disp)
    payload: dict[str, Any] = {
        "command": "qpoly",
        "params": _echo_params(args),
        "polynomial": poly.to_dict(),
    }
    if args.check_residual:
        residual = qschrodinger.schrodinger_residual(poly, disp)
        payload["residual"] = residual.max_abs() / max(1.0, poly.max_abs())
    if args.times:
        seed = settings["seed"] if args.seed is None else args.seed
        slices = qschrodinger.zeros_over_time(args.n, disp, args.times, seed)
        frame = qschrodinger.roots_frame(slices)
        payload["stalled_times"] = [s.t for s in slices if not s.converged]
        if args.roots_output:
            _disk.write_table(frame, args.roots_output)
        else:
            payload["roots"] = frame.to_dict(orient="records")
    return payload, poly.to_frame()


def _attach_report(
    payload: dict[str, Any], key: str, report: Any, report_output: Optional[str]
) -> None:
    """Send a report to its own JSON file when asked, else into the payload"""
    if report_output:
        _disk.write_json({"command": payload["command"], key: report}, report_output)
    else:
        payload[key] = report


def _flow_setup(args: argparse.Namespace, settings: dict[str, Any]):
    """Potential, fluid-domain predicate and boundary samples of a flow request"""
    z0 = complex(args.z0_re, args.z0_im)
    M = args.M if args.M is not None else settings["truncation"]
    n = args.n
    if n < 1:
        raise DomainError(f"Wedge order n must be a positive integer, got {n}")
    if args.flow == "vortex":
        base = flows.base_vortex(z0, args.gamma)
    else:
        base = flows.base_uniform(args.U)

    def in_wedge(z: complex) -> bool:
        return 0 < cmath.phase(z) < math.pi / n

    rays = {
        "ray_0": flows.ray_samples(0.0),
        "ray_pi_n": flows.ray_samples(math.pi / n),
    }

    def outside_r(z: complex) -> bool:
        return abs(z) > args.r

    if args.domain == "circle":
        return (
            flows.one_circle(base, args.r),
            outside_r,
            {"circle": flows.circle_samples(args.r)},
        )
    if args.domain == "wedge":
        return flows.wedge(base, n), in_wedge, rays
    if args.domain == "kummer":
        return flows.kummer_kaleidoscope(z0, args.gamma, n), in_wedge, rays
    if args.domain == "circular_wedge":
        arc = args.r * np.exp(1j * np.linspace(0, math.pi / n, 256))
        return (
            flows.circular_wedge(base, n, args.r),
            lambda z: in_wedge(z) and abs(z) > args.r,
            {**rays, "arc": arc},
        )
    spec = flows.AnnulusSpec(args.r1, args.r2, M)
    circles = {
        "inner": flows.circle_samples(spec.r1),
        "outer": flows.circle_samples(spec.r2),
    }

    def in_annulus(z: complex) -> bool:
        return spec.r1 < abs(z) < spec.r2

    if args.domain == "annulus":
        return flows.two_circle(base, spec), in_annulus, circles
    return (
        flows.annulus_vortex_potential(z0, args.gamma, spec, n),
        lambda z: in_annulus(z) and in_wedge(z),
        {
            "inner": spec.r1 * np.exp(1j * np.linspace(0, math.pi / n, 256)),
            "outer": spec.r2 * np.exp(1j * np.linspace(0, math.pi / n, 256)),
            "ray_0": flows.ray_samples(0.0, spec.r1, spec.r2),
            "ray_pi_n": flows.ray_samples(math.pi / n, spec.r1, spec.r2),
        },
    )


def run_flow(args: argparse.Namespace, settings: dict[str, Any]) -> Result:
    if args.domain in VORTEX_ONLY and args.flow != "vortex":
        raise DomainError(f"Domain {args.domain} is defined for a vortex only")
    potential, domain, boundaries = _flow_setup(args, settings)
    points = flows.grid_points(
        (args.x_min, args.x_max), (args.y_min, args.y_max), args.nx, args.ny
    )
    frame = flows.sample_field(potential, points, args.mask_radius, domain)
    payload: dict[str, Any] = {
        "command": "flow",
        "params": _echo_params(args),
        "potential": potential.name,
        "samples": frame.to_dict(orient="records"),
    }
    if args.report or args.report_output:
        truncation = args.M if args.M is not None else settings["truncation"]
        report = [
            {
                "boundary_id": name,
                "stddev_imF": flows.boundary_residual(potential, samples),
                "samples": len(samples),
                "truncation_M": truncation if args.domain in ANNULAR else None,
            }
            for name, samples in boundaries.items()
        ]
        _attach_report(payload, "boundary_residuals", report, args.report_output)
    return payload, frame


def run_vortex_sim(args: argparse.Namespace, settings: dict[str, Any]) -> Result:
    ctl = _control(settings)
    spec = flows.AnnulusSpec(args.r1, args.r2, settings["truncation"])
    state = flows.VortexState(complex(args.z0_re, args.z0_im), args.gamma)
    trajectory = flows.vortex_simulate(state, spec, args.dt, args.steps, ctl)
    frame = trajectory.to_frame()
    payload: dict[str, Any] = {
        "command": "vortex-sim",
        "params": _echo_params(args),
        "trajectory": frame.to_dict(orient="records"),
    }
    if args.report or args.report_output:
        omega = flows.annulus_omega(state.J, state.Gamma, spec, ctl)
        report = {
            "omega": omega,
            "radius_drift": trajectory.radius_drift,
            "period": trajectory.period,
            "expected_period": 2 * math.pi / abs(omega),
            "energy_drift": float(np.max(np.abs(trajectory.H - trajectory.H[0]))),
        }
        _attach_report(payload, "report", report, args.report_output)
    return payload, frame


def _nls_field(args: argparse.Namespace, settings: dict[str, Any]) -> nls.GridField:
    points = args.points or settings["grid-points"]
    length = args.length or settings["grid-length"]
    x = nls.default_grid(points, length)
    return nls.soliton(x, args.a, args.b, kappa=args.kappa)


def run_nls_check(args: argparse.Namespace, settings: dict[str, Any]) -> Result:
    field = _nls_field(args, settings).check_decay()
    rows = []
    if args.test == "flows":
        for N in [args.N] if args.N else range(1, 5):
            generated = nls.hierarchy_rhs(N, field, args.kappa)[0]
            written = nls.explicit_flow(N, field, args.kappa)
            residual = float(np.max(np.abs(generated - written)))
            rows.append({"N": N, "residual": residual})
    elif args.test == "soliton":
        exact = nls.soliton_time_derivative(field.x, args.a, args.b, kappa=args.kappa)
        generated = nls.hierarchy_rhs(2, field, args.kappa)[0]
        rows.append({"N": 2, "residual": float(np.max(np.abs(generated - exact)))})
    elif args.test == "zero_curvature":
        N = args.N or 2
        rows.append(
            {
                "N": N,
                "residual": nls.zero_curvature_residual(
                    field, args.p, args.kappa, N=N
                ),
            }
        )
        rows.append(
            {
                "N": N,
                "flow_order": N + 1,
                "residual": nls.zero_curvature_residual(
                    field, args.p, args.kappa, N=N, flow_order=N + 1
                ),
            }
        )
    else:
        plus = nls.qnls_rhs_order2(field, args.kappa, args.lam)
        minus = nls.qnls_rhs_order2(field, args.kappa, -args.lam)
        flat = nls.qnls_rhs_order2(field, args.kappa, 0.0)
        second = nls.hierarchy_rhs(2, field, args.kappa)
        rows.append(
            {
                "check": "parity",
                "residual": float(np.max(np.abs(plus[0] - minus[0]))),
            }
        )
        rows.append(
            {
                "check": "lambda_zero",
                "residual": float(np.max(np.abs(flat[0] - second[0] / 2))),
            }
        )
    frame = pd.DataFrame(rows)
    payload = {
        "command": "nls-check",
        "params": _echo_params(args),
        "test": args.test,
        "results": frame.to_dict(orient="records"),
    }
    return payload, frame


def _process_cl_args(args: argparse.Namespace) -> dict[str, Any]:
    config = _disk.load_config(args.config)
    settings = _disk.resolve_settings(config, {"ledger": args.ledger})
    return {"settings": settings, "debug": args.debug, "ledger": settings["ledger"]}


def _print_version() -> None:
    try:
        import setuptools_scm  # type: ignore

        vstring = setuptools_scm.get_version()
    except Exception:
        vstring = __version__
    print("qosc", vstring)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.version:
        _print_version()
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        kwargs = _process_cl_args(args)
    except RuntimeError as exc:
        print(f"qosc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    run_logger = _ledger.init_run_logger(kwargs["ledger"], kwargs["debug"])
    run_key = uuid.uuid4().hex[:12]
    params = ",".join(f"{k}={v}" for k, v in _echo_params(args).items())
    start_time = _ledger.log_start_run(run_logger, run_key, args.command, params)
    status = 0
    try:
        payload, frame = args.func(args, kwargs["settings"])
        if args.format == "csv":
            _disk.write_table(frame, args.output)
        else:
            _disk.write_json(payload, args.output)
    except DomainError as exc:
        run_logger.error(f"Domain error: {exc}")
        status = EXIT_DOMAIN
    except (NoConvergence, NoShock) as exc:
        run_logger.error(f"No convergence: {exc}")
        status = EXIT_CONVERGENCE
    except QoscError as exc:
        run_logger.error(str(exc))
        status = 1
    _ledger.log_finish_run(run_logger, run_key, status, args.output, start_time)
    return status


if __name__ == "__main__":
    sys.exit(main())
