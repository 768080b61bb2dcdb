"""Batch command-line front end.

Subcommands map one-to-one onto module operations; parameters come from
flags or a JSON config file (flags override file values).  Complex inputs
use "re,im" syntax; four-vectors are comma-separated with the time component
first.  Results are written as JSON records or CSV tables (see records.py);
outputs are byte-stable for fixed inputs and seed.  Exit codes: 0 success,
2 configuration error, 3 numerical-accuracy or I/O error, 4 domain or
contract violation.  WORLDLINEQM_OUTDIR names the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import evolution, fock, interaction, kernel, onshell, regularization
from .errors import (
    AccuracyError,
    ContractViolation,
    DegeneratePathError,
    DomainError,
    LapsePositivityError,
    LeakageError,
    SectorOverflowError,
    UnsupportedSpecError,
)
from .geometry import FourVector, ParticleType
from .lattice import LatticeSpec
from .records import ResultRecord, RunConfig, emit

_DOMAIN_ERRORS = (ContractViolation, DomainError, UnsupportedSpecError,
                  DegeneratePathError, LapsePositivityError,
                  SectorOverflowError, LeakageError)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in str(text).split(","))


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in str(text).split(","))


def _output_path(args, default_name: str) -> Path:
    if args.output:
        return Path(args.output)
    base = Path(os.environ.get("WORLDLINEQM_OUTDIR", "."))
    return base / default_name


def _merge_config(args, subcommand: str) -> dict:
    """File values first, then flag overrides; unknown file keys rejected."""
    params = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ContractViolation("config file must hold a JSON object")
        params.update(raw)
    for key in RunConfig.ALLOWED[subcommand]:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    RunConfig(subcommand, params, args.output, args.format)
    return params


# ---------------------------------------------------------------------------
# subcommand implementations


def _run_kernel(params):
    dim = int(params.get("dim", 2))
    mode = params.get("mode", "euclidean")
    mass = float(params.get("mass", 1.0))
    tau = float(params.get("tau", 1.0))
    dx = FourVector(_floats(params.get("dx", ",".join(["0"] * dim))))
    method = params.get("method", "closed")
    kp = kernel.KernelParams(mass, tau, dim, mode)
    outputs, provenance = {}, {"module": "kernel"}
    seed = None
    if method == "closed":
        outputs["value"] = kernel.kernel_closed(dx, kp)
        provenance["operation"] = "kernel_closed"
    elif method == "discretized":
        n = int(params.get("segments", 8))
        origin = FourVector((0.0,) * dim)
        outputs["value"] = kernel.kernel_discretized(dx, origin, np.full(n, tau / n), kp)
        provenance["operation"] = "kernel_discretized"
        provenance["oracle_checks"] = ["closed-form kernel at equal T"]
        outputs["closed_form"] = kernel.kernel_closed(dx, kp)
    elif method == "mc":
        seed = int(params.get("seed", 0))
        res = kernel.kernel_mc(dx, FourVector((0.0,) * dim), kp,
                               int(params.get("segments", 8)),
                               int(params.get("samples", 10000)), seed)
        outputs["value"] = res.estimate
        outputs["stderr"] = res.stderr
        outputs["closed_form"] = kernel.kernel_closed(dx, kp)
        provenance["operation"] = "kernel_mc"
        provenance["oracle_checks"] = ["closed-form kernel at equal T"]
    else:
        raise ContractViolation(f"unknown kernel method {method!r}")
    return outputs, provenance, seed, None


def _run_propagator(params):
    kind = params.get("kind", "position")
    dim = int(params.get("dim", 2))
    mass = float(params.get("mass", 1.0))
    eps = float(params.get("epsilon", 1e-6))
    provenance = {"module": "kernel"}
    outputs = {}
    if kind == "momentum":
        p = FourVector(_floats(params["p"]))
        outputs["value"] = kernel.propagator_momentum(p, mass, eps)
        provenance["operation"] = "propagator_momentum"
    elif kind == "position":
        dx = FourVector(_floats(params["dx"]))
        mode = params.get("mode", "euclidean")
        if params.get("weight", "uniform") == "gaussian":
            weight = kernel.WeightFunction.gaussian(
                float(params.get("dlam", 10.0)), float(params.get("delta", 0.01)))
        else:
            weight = kernel.WeightFunction.uniform()
        outputs["value"] = kernel.propagator_position(
            dx, mass, eps, weight, dim, mode,
            damping=float(params.get("damping", 0.0)))
        provenance["operation"] = "propagator_position"
    elif kind == "onshell-part":
        dx = FourVector(_floats(params["dx"]))
        outputs["value"] = kernel.propagator_onshell_part(
            dx, mass, int(params.get("sign", 1)),
            float(params.get("damping", 1e-2)), dim)
        provenance["operation"] = "propagator_onshell_part"
    else:
        raise ContractViolation(f"unknown propagator kind {kind!r}")
    return outputs, provenance, None, None


def _run_evolve(params):
    shape = _ints(params.get("shape", "16,16"))
    extent = _floats(params.get("extent", "8,8"))
    spec = LatticeSpec(shape, extent)
    mass = float(params.get("mass", 1.0))
    dlam = float(params.get("dlam", 0.01))
    steps = int(params.get("steps", 100))
    center = _floats(params.get("center", ",".join(str(e / 2) for e in extent)))
    width = float(params.get("width", 1.0))
    momentum = _floats(params.get("momentum", ",".join(["0"] * len(shape))))
    psi = evolution.gaussian_packet(spec, center, width, momentum, mass)
    n0 = evolution.norm(psi)
    for _ in range(steps):
        psi = evolution.evolve(psi, dlam)
    n1 = evolution.norm(psi)
    outputs = {"norm_initial": n0, "norm_final": n1, "norm_drift": abs(n1 - n0),
               "lambda_final": psi.lam,
               "residual_probe": evolution.stueckelberg_residual(psi, 1e-3)}
    return outputs, {"module": "evolution", "operation": "evolve",
                     "oracle_checks": ["norm conservation"]}, None, None


def _run_onshell(params):
    p_spatial = _floats(params.get("p", "0"))
    mass = float(params.get("mass", 1.0))
    sign = int(params.get("sign", 1))
    eps = float(params.get("epsilon", 1e-2))
    t = float(params.get("t", 0.0))
    window = float(params.get("window", 1.0))
    halfrange = float(params.get("p0_halfrange", 60.0))
    points = int(params.get("p0_points", 120001))
    e = float(np.sqrt(sum(x * x for x in p_spatial) + mass * mass))
    grid = sign * e + np.linspace(-halfrange, halfrange, points)
    prof = onshell.momentum_state_profile(p_spatial, mass, sign, t, eps, grid)
    conc = onshell.concentration(prof, window)
    peak = prof.p0[int(np.argmax(np.abs(prof.amplitude)))]
    pole = onshell.onshell_propagator_momentum((sign * e,) + tuple(p_spatial),
                                               mass, sign, eps)
    outputs = {"energy": e, "profile_peak": float(peak), "concentration": conc,
               "lorentzian_oracle": (2 / np.pi) * float(np.arctan(window / eps)),
               "pole_value": pole}
    return outputs, {"module": "onshell",
                     "operation": "momentum_state_profile/concentration",
                     "oracle_checks": ["lorentzian concentration"]}, None, None


def _parse_state(data, tag_default):
    coeff = data.get("coefficient", [1.0, 0.0])
    entries = [fock.Entry(tuple(e["site"]), e["type"], e.get("tag", tag_default))
               for e in data["entries"]]
    return fock.symmetrize(entries, complex(coeff[0], coeff[1]))


def _run_fock(params):
    payload = json.loads(Path(params["states"]).read_text(encoding="utf-8"))
    shape = _ints(params.get("shape", "4,4"))
    extent = _floats(params.get("extent", "4,4"))
    spec = LatticeSpec(shape, extent)
    types = {name: ParticleType(name, spc["mass"], spc.get("conjugate", "plain"))
             for name, spc in payload["types"].items()}
    algebra = fock.FieldAlgebra(spec, types, epsilon=float(params.get("epsilon", 1e-2)))
    bra = _parse_state(payload["bra"], "integrated")
    ket = _parse_state(payload["ket"], "start")
    outputs = {"inner_product": fock.fock_inner(bra, ket, algebra),
               "bra_particles": bra.n_particles, "ket_particles": ket.n_particles}
    return outputs, {"module": "fock", "operation": "fock_inner"}, None, None


def _run_scatter(params):
    grid_spec = params["grid"]
    grid = onshell.MomentumGrid(int(grid_spec.get("spatial_dimension", 1)),
                                int(grid_spec["points"]), float(grid_spec["spacing"]))
    model = interaction.InteractionModel.ab_model(
        float(params["coupling"]), float(params.get("mass_a", 1.0)),
        float(params.get("mass_b", 1.0)))
    def legs(rows):
        return tuple(interaction.ScatterLeg(tuple(r["p"]), r.get("type", "A"),
                                            int(r.get("sign", 1))) for r in rows)
    spec = interaction.ScatterSpec(legs(params["incoming"]),
                                   legs(params["outgoing"]), grid)
    amp = interaction.scatter_tree_2to2(spec, model, float(params.get("epsilon", 1e-3)))
    return ({"amplitude": amp},
            {"module": "interaction", "operation": "scatter_tree_2to2"}, None, None)


def _run_selfenergy(params):
    dim = int(params.get("dim", 2))
    p = FourVector(_floats(params.get("p", ",".join(["0"] * dim))))
    m_a = float(params.get("ma", 1.0))
    m_b = float(params.get("mb", 1.0))
    cutoff = float(params.get("cutoff", np.inf))
    if params.get("regulated"):
        spec = regularization.RegulatorSpec(float(params.get("dlam", 10.0)),
                                            float(params.get("delta", 0.01)), m_a)
        res = regularization.self_energy_regulated(
            p, m_a, m_b, dim, spec, params.get("route", "lambda"),
            cutoff=None if np.isinf(cutoff) else cutoff)
        operation = "self_energy_regulated"
    else:
        res = interaction.self_energy_unregulated(p, m_a, m_b, dim, cutoff)
        operation = "self_energy_unregulated"
    outputs = {"value": res.value, "error": res.error, "route": res.route}
    return outputs, {"module": "interaction/regularization",
                     "operation": operation}, None, None


def _run_scan(params):
    dim = int(params.get("dim", 4))
    p = FourVector(_floats(params.get("p", ",".join(["0"] * dim))))
    deltas = list(_floats(params.get("deltas", "0.02,0.01,0.005,0.0025")))
    scan = regularization.divergence_scan(
        p, float(params.get("ma", 1.0)), float(params.get("mb", 1.0)), dim,
        deltas, correlation_length=float(params.get("dlam", 1e3)),
        cutoff=None if params.get("cutoff") is None else float(params["cutoff"]))
    outputs = {"slope": scan.slope, "slope_stderr": scan.slope_stderr,
               "intercept": scan.intercept, "r_squared": scan.r_squared}
    return (outputs, {"module": "regularization", "operation": "divergence_scan"},
            None, scan.table())


_RUNNERS = {
    "kernel": _run_kernel,
    "propagator": _run_propagator,
    "evolve": _run_evolve,
    "onshell": _run_onshell,
    "fock": _run_fock,
    "scatter": _run_scatter,
    "selfenergy": _run_selfenergy,
    "scan": _run_scan,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="worldlineqm",
        description="Worldline relativistic quantum mechanics batch runner.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--output", help="output file path")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--timing", action="store_true",
                       help="embed wall time in the record (breaks byte stability)")

    p = sub.add_parser("kernel", help="fixed-length kernel values")
    common(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--mode", choices=("euclidean", "minkowski"))
    p.add_argument("--mass", type=float)
    p.add_argument("--tau", type=float, help="intrinsic length T")
    p.add_argument("--dx", help="separation, time first: t,x[,y,z]")
    p.add_argument("--method", choices=("closed", "discretized", "mc"))
    p.add_argument("--segments", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("propagator", help="proper-time and momentum propagators")
    common(p)
    p.add_argument("--kind", choices=("position", "momentum", "onshell-part"))
    p.add_argument("--dim", type=int)
    p.add_argument("--mode", choices=("euclidean", "minkowski"))
    p.add_argument("--mass", type=float)
    p.add_argument("--dx")
    p.add_argument("--p")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--weight", choices=("uniform", "gaussian"))
    p.add_argument("--dlam", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--damping", type=float)
    p.add_argument("--sign", type=int, choices=(-1, 1))

    p = sub.add_parser("evolve", help="parameter evolution of a packet")
    common(p)
    p.add_argument("--shape")
    p.add_argument("--extent")
    p.add_argument("--mass", type=float)
    p.add_argument("--dlam", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--center")
    p.add_argument("--width", type=float)
    p.add_argument("--momentum")

    p = sub.add_parser("onshell", help="frequency profiles and concentration")
    common(p)
    p.add_argument("--p", help="spatial momentum components")
    p.add_argument("--mass", type=float)
    p.add_argument("--sign", type=int, choices=(-1, 1))
    p.add_argument("--epsilon", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--window", type=float)
    p.add_argument("--p0-halfrange", dest="p0_halfrange", type=float)
    p.add_argument("--p0-points", dest="p0_points", type=int)

    p = sub.add_parser("fock", help="multiparticle pairings from a state file")
    common(p)
    p.add_argument("--states", help="JSON file with types, bra, ket")
    p.add_argument("--shape")
    p.add_argument("--extent")
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("scatter", help="tree-level 2->2 amplitude")
    common(p)

    p = sub.add_parser("selfenergy", help="one-loop self-energy")
    common(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--p")
    p.add_argument("--ma", type=float)
    p.add_argument("--mb", type=float)
    p.add_argument("--cutoff", type=float)
    p.add_argument("--regulated", action="store_true", default=None)
    p.add_argument("--dlam", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--route", choices=("lambda", "mass-spectrum"))

    p = sub.add_parser("scan", help="threshold divergence scan (CSV table)")
    common(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--p")
    p.add_argument("--ma", type=float)
    p.add_argument("--mb", type=float)
    p.add_argument("--deltas", help="comma-separated decreasing thresholds")
    p.add_argument("--dlam", type=float)
    p.add_argument("--cutoff", type=float)
    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        params = _merge_config(args, args.subcommand)
    except (ContractViolation, json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    started = time.perf_counter()
    try:
        outputs, provenance, seed, table = _RUNNERS[args.subcommand](params)
    except _DOMAIN_ERRORS as exc:
        print(f"domain/contract error: {exc}", file=sys.stderr)
        return 4
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return 3
    elapsed = time.perf_counter() - started
    record = ResultRecord(args.subcommand, inputs=params, outputs=outputs,
                          provenance=provenance, table=table, seed=seed,
                          wall_time_s=elapsed)
    path = _output_path(args, f"{args.subcommand}.{args.format}")
    try:
        emit(record, path, args.format, include_timing=bool(args.timing))
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {path} ({elapsed:.3f}s)", file=sys.stderr)
    for name, value in outputs.items():
        print(f"{name}: {value}")
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
