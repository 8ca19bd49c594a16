"""``qdm`` command-line interface.

Exit codes: 0 success, 1 domain failure (for example a non-physical state or
out-of-range family parameters), 2 usage error or malformed input. Output is
deterministic JSON on stdout; trajectories go to CSV.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import composite, jarlskog, twoqubit
from .basis import get_basis
from .bloch import (
    PHYSICAL_EPS,
    BlochVector,
    char_coeffs_closed,
    from_density,
    is_physical,
    power_traces,
    to_density,
)
from .dynamics import THREE_LEVEL_BASIS, ThreeLevelModel, conserved_lengths, integrate
from .errors import OutOfRange, QdmError
from .linalg import eigvalsh, hermiticity_error
from .serialize import FormatError, dumps, load_json_file, matrix_from_json, matrix_to_json

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(payload, out: str | None = None) -> None:
    text = dumps(payload) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_state(args) -> tuple[np.ndarray, BlochVector | None]:
    """Density matrix from ``--matrix`` or ``--vec``; the Bloch vector too when given."""
    if bool(args.matrix) == bool(args.vec):
        raise UsageError("give exactly one of --matrix and --vec")
    if args.matrix:
        rho = matrix_from_json(load_json_file(args.matrix))
        if hermiticity_error(rho) > 1e-10:
            raise FormatError("matrix is not Hermitian")
        return rho, None
    doc = load_json_file(args.vec)
    if isinstance(doc, list):
        if args.n is None:
            raise UsageError("--n is required for a bare component list")
        doc = {"n": args.n, "basis": args.basis, "components": doc}
    v = BlochVector.from_json(doc)
    return to_density(v), v


def cmd_check(args) -> tuple[int, dict]:
    rho, _ = _load_state(args)
    ok, coeffs = is_physical(rho, eps=args.eps)
    payload = {
        "physical": ok,
        "coeffs": [float(x) for x in coeffs.a],
        "min_eig": float(eigvalsh(rho)[-1]),
    }
    return (EXIT_OK if ok else EXIT_DOMAIN), payload


def cmd_invariants(args) -> tuple[int, dict]:
    rho, v = _load_state(args)
    n = rho.shape[0]
    _, coeffs = is_physical(rho, eps=args.eps)
    payload = {
        "n": n,
        "traces": [float(x) for x in power_traces(rho, n)],
        "coeffs": [float(x) for x in coeffs.a],
    }
    if v is not None:
        payload["coeffs_closed"] = [float(x) for x in char_coeffs_closed(v, v.basis_set()).a]
    return EXIT_OK, payload


def _omega0(kind: str, scale: float):
    if kind == "const":
        return lambda t: scale
    if kind == "sin":
        return lambda t: scale * np.sin(t)
    raise UsageError(f"unknown --omega0 {kind!r}")


def cmd_simulate(args) -> tuple[int, dict]:
    model = ThreeLevelModel(args.a, args.b, args.delta, _omega0(args.omega0, args.omega0_scale))
    basis = get_basis(THREE_LEVEL_BASIS)
    if args.init:
        doc = load_json_file(args.init)
        if isinstance(doc, dict) and "entries" in doc:
            v0 = from_density(matrix_from_json(doc), basis)
        else:
            v0 = BlochVector.from_json(doc)
    else:
        rho0 = np.zeros((3, 3), dtype=complex)
        rho0[0, 0] = 1.0
        v0 = from_density(rho0, basis)
    traj = integrate(v0, model, args.t, args.dt)
    if args.out:
        with open(args.out, "w") as fh:
            traj.to_csv(fh)
    lengths = conserved_lengths(traj)
    drift = {name: float(np.ptp(lengths[:, k])) for k, name in enumerate(("Lambda3", "Lambda4", "Lambda1"))}
    for key in ("tr_rho2", "tr_rho3", "norm"):
        drift[key] = float(np.ptp(traj.diagnostics[key]))
    payload = {
        "samples": len(traj),
        "t_final": float(traj.times[-1]),
        "drift": drift,
        "min_char_coeff": float(np.min(traj.diagnostics["min_char_coeff"])),
        "csv": args.out,
    }
    return EXIT_OK, payload


def cmd_sample(args) -> tuple[int, dict]:
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    rng = np.random.default_rng(args.seed)
    states = []
    if args.composite:
        try:
            n, m = (int(x) for x in args.composite.split(","))
        except ValueError:
            raise UsageError("--composite expects n,m") from None
        for _ in range(args.count):
            p = composite.sample_composite(n, m, rng)
            states.append({
                "n": n,
                "m": m,
                "eigenvalues": [float(x) for x in p.eigenvalues],
                "matrix": matrix_to_json(composite.composite_density(p)),
            })
    else:
        if args.n is None:
            raise UsageError("--n or --composite is required")
        for _ in range(args.count):
            p = jarlskog.sample(args.n, rng)
            states.append({
                "n": args.n,
                "params": p.to_json(),
                "matrix": matrix_to_json(jarlskog.density_from_params(p)),
            })
    return EXIT_OK, {"seed": args.seed, "count": args.count, "states": states}


_FAMILY_ARGS = {
    "werner": ("x",),
    "werner-pt": ("p",),
    "projector": ("alpha",),
    "two-param": ("p", "alpha"),
    "five-param": ("p1", "p2", "p3", "p4", "alpha", "beta"),
    "bell-diag": ("p1", "p2", "p3", "p4"),
}


def _family_matrix(name: str, vals: dict) -> np.ndarray:
    if name == "werner":
        if not -1.0 / 3.0 <= vals["x"] <= 1.0:
            raise OutOfRange(f"x = {vals['x']} outside [-1/3, 1]")
        return twoqubit.werner(vals["x"])
    if name == "werner-pt":
        return composite.family_werner_pt(vals["p"])
    if name == "projector":
        return composite.family_projector(vals["alpha"])
    if name == "two-param":
        return composite.family_two_param(vals["p"], vals["alpha"])
    ps = (vals["p1"], vals["p2"], vals["p3"], vals["p4"])
    if name == "five-param":
        return composite.family_five_param(ps, vals["alpha"], vals["beta"])
    return composite.bell_diagonal(ps)


def cmd_family(args) -> tuple[int, dict]:
    names = _FAMILY_ARGS[args.family]
    vals = {}
    for key in names:
        val = getattr(args, key)
        if val is None:
            raise UsageError(f"family {args.family} needs --{key}")
        vals[key] = float(val)
    rho = _family_matrix(args.family, vals)
    payload = {"family": args.family, "params": vals, "matrix": matrix_to_json(rho)}
    if args.ppt:
        payload["separable"] = twoqubit.ppt_separable(rho, 2, 2) == twoqubit.SEPARABLE
        payload["min_pt_eig"] = twoqubit.min_pt_eigenvalue(rho, 2, 2)
    return EXIT_OK, payload


def cmd_basis(args) -> tuple[int, dict]:
    if args.ordering == "ggm" and args.n is None:
        raise UsageError("--n is required for the ggm ordering")
    return EXIT_OK, get_basis(args.ordering, args.n).to_json()


def cmd_jarlskog_build(args) -> tuple[int, dict]:
    p = jarlskog.JarlskogParams.from_json(load_json_file(args.params))
    rho = jarlskog.density_from_params(p)
    return EXIT_OK, {
        "matrix": matrix_to_json(rho),
        "unitary": matrix_to_json(jarlskog.su_from_params(p)),
        "eigenvalues": [float(x) for x in p.eigenvalues],
    }


def cmd_jarlskog_extract(args) -> tuple[int, dict]:
    u = matrix_from_json(load_json_file(args.matrix))
    ex = jarlskog.extract_params(u)
    return EXIT_OK, {
        "levels": [{"theta": lv.theta, "z": [[z.real, z.imag] for z in lv.z]} for lv in ex.levels],
        "phases": [float(x) for x in ex.phases],
        "canonical": ex.canonical,
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", type=float, default=PHYSICAL_EPS, help="positivity tolerance on a_j")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the result here instead of stdout")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--matrix", help="density matrix JSON file")
    state.add_argument("--vec", help="Bloch vector JSON file")
    state.add_argument("--n", type=int)
    state.add_argument("--basis", default="ggm")

    parser = argparse.ArgumentParser(prog="qdm", description="Density-matrix parametrization toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common, state], help="positivity test of a state")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("invariants", parents=[common, state], help="trace invariants and a_j")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("simulate", parents=[common], help="integrate the three-level model")
    p.add_argument("--model", choices=["three-level"], default="three-level")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--omega0", choices=["const", "sin"], default="const")
    p.add_argument("--omega0-scale", type=float, default=1.0)
    p.add_argument("--t", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--init", help="initial state (matrix or Bloch vector JSON)")
    p.set_defaults(func=cmd_simulate, out_is_csv=True)

    p = sub.add_parser("sample", parents=[common], help="random Jarlskog states")
    p.add_argument("--n", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--composite", help="n,m for block states")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("family", parents=[common], help="example two-qubit families")
    p.add_argument("family", choices=sorted(_FAMILY_ARGS))
    for key in ("x", "p", "alpha", "beta", "p1", "p2", "p3", "p4"):
        p.add_argument(f"--{key}", type=float)
    p.add_argument("--ppt", action="store_true", help="add the PPT separability verdict")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("basis", parents=[common], help="generators and structure constants")
    p.add_argument("--n", type=int)
    p.add_argument("--ordering", default="ggm")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("jarlskog", help="Jarlskog parametrization")
    jsub = p.add_subparsers(dest="action", required=True)
    q = jsub.add_parser("build", parents=[common], help="density matrix from parameters")
    q.add_argument("--params", required=True)
    q.set_defaults(func=cmd_jarlskog_build)
    q = jsub.add_parser("extract", parents=[common], help="parameters of a special unitary")
    q.add_argument("--matrix", required=True)
    q.set_defaults(func=cmd_jarlskog_extract)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload = args.func(args)
    except (UsageError, FormatError, OSError) as exc:
        sys.stderr.write(f"qdm: {exc}\n")
        return EXIT_USAGE
    except (QdmError, ArithmeticError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return EXIT_DOMAIN
    _emit(payload, None if getattr(args, "out_is_csv", False) else args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
