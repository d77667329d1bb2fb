"""Command-line front end: scans, spectra, entropy sweeps, crossing, oracle, fit.

Every file output embeds the full parameter provenance and library version in
its header; numeric output carries 17 significant digits so runs are
reproducible byte for byte.  Exit codes: 0 success, 1 usage error, 2 solver
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from . import fit as _fit
from . import oracle as _oracle
from . import spectrum as _spectrum
from . import states as _states
from .exceptions import AniRabiError
from .gfunction import GEvaluator, poles
from .model import ModelParams

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _steps(value: str) -> int:
    try:
        n = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if n < 2:
        raise argparse.ArgumentTypeError("needs at least 2 steps")
    return n


def _parse_sweep(spec: str):
    parts = spec.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"sweep must be name:start:stop:steps, got {spec!r}"
        )
    name = parts[0]
    try:
        start, stop = float(parts[1]), float(parts[2])
        steps = int(parts[3])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if steps < 2:
        raise argparse.ArgumentTypeError("sweep needs at least 2 steps")
    return name, start, stop, steps


def _model_from(args) -> ModelParams:
    return ModelParams(
        omega=args.omega,
        delta=args.delta,
        g=args.g,
        lam=args.lam,
        epsilon=args.epsilon,
        theta=args.theta,
    )


def _meta(args, **extra) -> dict:
    meta = {
        "anirabi_version": __version__,
        "command": args.command,
        "omega": args.omega,
        "delta": args.delta,
        "epsilon": args.epsilon,
        "g": args.g,
        "lambda": args.lam,
        "theta": args.theta,
    }
    meta.update(extra)
    return meta


def _write_table(path, fmt, meta: dict, columns, rows):
    if fmt == "json":
        payload = {
            "meta": {k: meta[k] for k in sorted(meta)},
            "columns": list(columns),
            "rows": [[_fmt(v) for v in row] for row in rows],
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"# {k} = {_fmt(meta[k])}" for k in sorted(meta)]
        lines.append(",".join(columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--omega", type=float, default=1.0, help="boson frequency (default 1)")
    p.add_argument("--delta", type=float, default=0.0, help="half level splitting")
    p.add_argument("--epsilon", type=float, default=0.0, help="symmetry-breaking field")
    p.add_argument("--g", type=float, default=0.5, help="rotating coupling strength")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="counter-rotating anisotropy weight")
    p.add_argument("--theta", type=float, default=0.0, help="counter-rotating phase")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def cmd_gscan(args) -> int:
    params = _model_from(args)
    if not args.xmax > args.xmin:
        raise AniRabiError(f"empty x range [{args.xmin}, {args.xmax}]")
    ev = GEvaluator(params)
    registry = poles(params, n_max=max(4, int(math.ceil(abs(args.xmax) / params.omega)) + 2))
    xs = np.linspace(args.xmin, args.xmax, args.steps)
    sectors = ("eps",) if params.epsilon != 0.0 else ("plus", "minus")
    window = 1e-4 * params.omega
    all_poles = np.concatenate([registry.family_forward, registry.family_backward])
    rows = []
    for sector in sectors:
        for x in xs:
            near = bool(np.min(np.abs(all_poles - x)) < window)
            try:
                v = ev.eps_value(x) if sector == "eps" else ev.parity_value(x, sector)
                rows.append((x, v.real, v.imag, sector, int(near)))
            except AniRabiError:
                rows.append((x, float("nan"), float("nan"), sector, 1))
    meta = _meta(
        args,
        xmin=args.xmin,
        xmax=args.xmax,
        steps=args.steps,
        poles_forward=" ".join(_fmt(p) for p in registry.family_forward),
        poles_backward=" ".join(_fmt(p) for p in registry.family_backward),
    )
    _write_table(args.out, args.format, meta, ("x", "re_G", "im_G", "sector", "near_pole"), rows)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    name, start, stop, steps = args.sweep
    grid = np.linspace(start, stop, steps)
    base = _model_from(args)
    columns = ["{}".format(name), "level", "energy", "sector", "kind"]
    rows = []
    if args.method in ("gfunction", "both"):
        sweep = _spectrum.sweep_levels(base, grid, args.levels, sweep_parameter=name)
    else:
        sweep = _spectrum.sweep_levels(
            base, grid, args.levels, sweep_parameter=name, method="oracle"
        )
    if args.method == "both":
        osweep = _spectrum.sweep_levels(
            base, grid, args.levels, sweep_parameter=name, method="oracle"
        )
        columns += ["energy_oracle", "abs_diff"]
    for i, val in enumerate(sweep.grid):
        for j in range(args.levels):
            row = [
                val, j, sweep.levels[i, j], sweep.sectors[i][j], sweep.kinds[i][j],
            ]
            if args.method == "both":
                row += [
                    osweep.levels[i, j],
                    abs(sweep.levels[i, j] - osweep.levels[i, j]),
                ]
            rows.append(row)
    for g_star, n_pole, e_star in sweep.crossings:
        row = [g_star, -1, e_star, "none", "exceptional"]
        if args.method == "both":
            row += [e_star, 0.0]
        rows.append(row)
    meta = _meta(args, sweep=f"{name}:{_fmt(start)}:{_fmt(stop)}:{steps}",
                 levels=args.levels, method=args.method)
    _write_table(args.out, args.format, meta, columns, rows)
    return EXIT_OK


def cmd_entropy(args) -> int:
    name, start, stop, steps = args.sweep
    if name != "g":
        raise AniRabiError("entropy sweeps support the g parameter only")
    grid = np.linspace(start, stop, steps)
    base = _model_from(args)
    rows = []
    for g in grid:
        p = _spectrum._with_param(base, "g", float(g))
        if args.method == "oracle":
            energies, n_used = _oracle.converged_spectrum(p, 2, 1e-10)
            ham = _oracle.build_hamiltonian(p, n_used)
            w, v = _oracle.eigensolve(ham, 2)
            degenerate = int(abs(w[1] - w[0]) < 1e-9 * p.omega)
            st = _states.from_vector(v[:, 0])
            par = _states.parity_of(st)
            s_val = _states.entropy(_states.reduced_spin_density(st))
            e0 = w[0]
            s_even = s_odd = s_val
        else:
            roots = _spectrum.solve_spectrum(p, n_levels=2)
            ground = min(roots, key=lambda r: r.E)
            e0 = ground.E
            degenerate = int(ground.kind == "exceptional")
            if degenerate:
                s1, s2 = _states.juddian_states(p)
                even, odd = _states.parity_combinations(s1, s2)
                s_even = _states.entropy(_states.reduced_spin_density(even))
                s_odd = _states.entropy(_states.reduced_spin_density(odd))
                par = float("nan")
                s_val = float("nan")
            else:
                st = _states.eigenstate_series(p, ground)
                par = _states.parity_of(st)
                s_val = _states.entropy(_states.reduced_spin_density(st))
                s_even = s_odd = s_val
        rows.append((g, e0, par, s_val, degenerate, s_even, s_odd))
    meta = _meta(args, sweep=f"{name}:{_fmt(start)}:{_fmt(stop)}:{steps}", method=args.method)
    _write_table(
        args.out, args.format, meta,
        ("g", "energy", "parity", "entropy", "degenerate", "entropy_even", "entropy_odd"),
        rows,
    )
    return EXIT_OK


def cmd_crossing(args) -> int:
    g_c, e_c = _spectrum.first_crossing(args.delta, args.lam, args.omega)
    if args.format == "json" or args.out:
        payload = json.dumps({"E": _fmt(e_c), "g_c": _fmt(g_c)}, indent=2, sort_keys=True)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
    print(f"g_c = {_fmt(g_c)}")
    print(f"E = {_fmt(e_c)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    params = _model_from(args)
    if args.converged:
        energies, n_used = _oracle.converged_spectrum(params, args.levels, args.tol)
    else:
        n_used = args.nmax
        energies = _oracle.eigensolve(
            _oracle.build_hamiltonian(params, args.nmax), args.levels
        )[0]
    rows = [(i, e) for i, e in enumerate(energies)]
    meta = _meta(args, n_max=n_used, levels=args.levels,
                 converged=int(args.converged), tol=args.tol)
    _write_table(args.out, args.format, meta, ("level", "energy"), rows)
    return EXIT_OK


def cmd_fit(args) -> int:
    fqp = _fit.FluxQubitParams(
        delta_q=args.delta_q, ip=args.ip, omega_r=args.omega_r,
        g=args.g_qr, lam=args.lambda_true,
    )
    if args.synthesize:
        data = _fit.synthesize_dataset(
            fqp, noise_ghz=args.noise_mhz * 1e-3, seed=args.seed
        )
        _fit.save_dataset(
            data,
            args.synthesize,
            comment=(
                f"synthetic spectroscopy, anirabi {__version__}\n"
                f"delta_q={_fmt(args.delta_q)} GHz, Ip={_fmt(args.ip)} nA, "
                f"omega_r={_fmt(args.omega_r)} GHz, g={_fmt(args.g_qr)} GHz, "
                f"lambda={_fmt(args.lambda_true)}, "
                f"noise={_fmt(args.noise_mhz)} MHz, seed={args.seed}"
            ),
        )
        print(f"wrote {len(data)} rows to {args.synthesize}")
        return EXIT_OK
    if not args.data:
        raise AniRabiError("fit requires --data (or --synthesize to generate one)")
    data = _fit.load_dataset(args.data)
    result = _fit.fit_lambda(
        data, fqp, include_sz_shift=args.sz_shift,
        report_sz_shift_effect=args.report_sz_shift,
    )
    print(f"lambda_hat = {_fmt(result.lambda_hat)}")
    print(f"rss = {_fmt(result.rss)}")
    print(f"rows = {len(data)}")
    if args.report_sz_shift:
        print(f"sz_shift_effect_on_lambda = {_fmt(result.sz_shift_effect)}")
    if args.out:
        payload = {
            "lambda_hat": _fmt(result.lambda_hat),
            "rss": _fmt(result.rss),
            "rows": len(data),
            "sz_shift_applied": bool(args.sz_shift),
            "sz_shift_effect_on_lambda": _fmt(result.sz_shift_effect),
            "fixed_params": {
                "delta_q_GHz": _fmt(args.delta_q),
                "ip_nA": _fmt(args.ip),
                "omega_r_GHz": _fmt(args.omega_r),
                "g_GHz": _fmt(args.g_qr),
            },
            "rss_grid": {
                _fmt(l): _fmt(r)
                for l, r in zip(result.lam_grid, result.rss_grid)
            },
            "anirabi_version": __version__,
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if args.curves:
        cache = _fit._shared_cache(fqp, data.bias, data.k, args.sz_shift, 32)
        model = cache.model_freqs(result.lambda_hat)
        rows = [
            (data.bias[i], int(data.k[i]), data.freq[i], model[i])
            for i in range(len(data))
        ]
        meta = {
            "anirabi_version": __version__,
            "command": "fit",
            "lambda_hat": result.lambda_hat,
            "delta_q": args.delta_q, "ip": args.ip,
            "omega_r": args.omega_r, "g": args.g_qr,
        }
        _write_table(args.curves, "csv", meta,
                     ("bias_mPhi0", "k", "freq_data_GHz", "freq_model_GHz"), rows)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="anirabi", description=__doc__)
    parser.add_argument("--version", action="version", version=f"anirabi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gscan", parents=[], help="scan a G-function over x")
    _add_model_flags(p)
    p.add_argument("--xmin", type=float, default=-1.0)
    p.add_argument("--xmax", type=float, default=5.0)
    p.add_argument("--steps", type=_steps, default=2001)
    p.set_defaults(func=cmd_gscan)

    p = sub.add_parser("spectrum", help="energy levels along a parameter sweep")
    _add_model_flags(p)
    p.add_argument("--sweep", type=_parse_sweep, required=True,
                   help="sweep spec name:start:stop:steps, e.g. g:0:2:200")
    p.add_argument("--levels", type=int, default=8)
    p.add_argument("--method", choices=("gfunction", "oracle", "both"),
                   default="gfunction")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("entropy", help="ground-state entropy along a g sweep")
    _add_model_flags(p)
    p.add_argument("--sweep", type=_parse_sweep, required=True)
    p.add_argument("--method", choices=("gfunction", "oracle"), default="gfunction")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("crossing", help="first level-crossing closed form")
    _add_model_flags(p)
    p.set_defaults(func=cmd_crossing)

    p = sub.add_parser("oracle", help="truncated-Fock diagonalization spectrum")
    _add_model_flags(p)
    p.add_argument("--nmax", type=int, default=120)
    p.add_argument("--levels", type=int, default=8)
    p.add_argument("--converged", action="store_true",
                   help="double the cutoff until the spectrum is stable")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fit", help="fit the anisotropy to spectroscopy data")
    p.add_argument("--data", default=None, help="spectroscopy CSV path")
    p.add_argument("--out", default=None, help="JSON fit report path")
    p.add_argument("--curves", default=None, help="write data/model overlay CSV")
    p.add_argument("--synthesize", default=None, metavar="PATH",
                   help="write a synthetic dataset to PATH and exit")
    p.add_argument("--delta-q", type=float, default=4.21, help="qubit gap (GHz)")
    p.add_argument("--ip", type=float, default=500.0, help="persistent current (nA)")
    p.add_argument("--omega-r", type=float, default=8.13,
                   help="resonator frequency (GHz)")
    p.add_argument("--g-qr", type=float, default=0.74, help="bare coupling (GHz)")
    p.add_argument("--lambda-true", type=float, default=0.5,
                   help="anisotropy used when synthesizing")
    p.add_argument("--noise-mhz", type=float, default=10.0,
                   help="synthetic noise level (MHz)")
    p.add_argument("--seed", type=int, default=20140515)
    p.add_argument("--sz-shift", action="store_true",
                   help="apply the second-order sz-drive constant to the levels")
    p.add_argument("--report-sz-shift", action="store_true",
                   help="also fit with the shift toggled and report the change")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AniRabiError as exc:
        print(f"anirabi: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError) as exc:
        print(f"anirabi: error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
