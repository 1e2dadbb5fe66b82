"""Command-line front end.

Every command is a pure function of its flags: randomness flows through
--seed (default 0), output is JSON/CSV with sorted keys, and each result
file embeds the manifest that produced it, so `probrep rerun FILE`
regenerates it byte-for-byte.

Exit codes: 0 success, 1 input/validation error, 2 numerical or
certification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, born, correlations, sampling, serialize, sic
from .errors import NoConvergence, ProbrepError
from .operators import (
    born_probabilities,
    check_dim,
    make_prob_vector,
    projector_povm,
)
from .serialize import dumps

BORN_CHECK_TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on bad flags, per the exit-code contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _manifest(command: str, params: dict) -> dict:
    return {"command": command, "params": params, "artifact_version": __version__}


def _manifest_line(manifest: dict) -> str:
    return json.dumps(manifest, sort_keys=True, separators=(",", ":"))


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _builtin_state(name: str, expect_dim=None):
    if name == "phi+":
        ket = correlations.phi_plus()
    elif name == "singlet":
        ket = correlations.singlet()
    else:
        ket = serialize.ket_from_payload(_load_json(name))
    if expect_dim is not None and ket.dim != expect_dim:
        raise ValueError(f"state has dimension {ket.dim}, expected {expect_dim}")
    return ket


_BUILTIN_BASES = {
    "z": np.array([[1, 0], [0, 1]], dtype=complex),
    "x": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "y": np.array([[1, 1j], [1, -1j]], dtype=complex) / np.sqrt(2),
}


def _builtin_basis(name: str):
    if name in _BUILTIN_BASES:
        return projector_povm(_BUILTIN_BASES[name])
    return serialize.povm_from_payload(_load_json(name))


# ---------------------------------------------------------------------------
# command handlers (each takes the JSON-compatible params dict)
# ---------------------------------------------------------------------------


def run_sic_search(params: dict) -> int:
    dim = check_dim(params["dim"])
    manifest = _manifest("sic-search", params)
    candidate = sic.sic_search(dim, seed=params["seed"], restarts=params["restarts"])
    certified = candidate.max_sic_deviation < params["tol"]
    payload = {"manifest": manifest, "certified": certified}
    payload.update(serialize.fiducial_payload(candidate))
    _write(params["out"], dumps(payload))
    print(
        f"dim {dim}: frame potential {candidate.frame_potential:.12f}, "
        f"max SIC deviation {candidate.max_sic_deviation:.3e}, "
        f"certified={certified} -> {params['out']}"
    )
    return 0 if certified else 2


def _reference_for(kind: str, dim: int, seed: int):
    if kind == "sic":
        return born.sic_reference(dim)
    if kind == "random":
        return born.random_reference(dim, seed)
    return serialize.reference_from_payload(_load_json(kind))


def run_born_check(params: dict) -> int:
    dim = check_dim(params["dim"])
    trials = params["trials"]
    seed = params["seed"]
    if trials < 1:
        raise ValueError("need at least one trial")
    manifest = _manifest("born-check", params)
    ref = _reference_for(params["reference"], dim, seed)
    worst_general = 0.0
    worst_sic = 0.0
    for t in range(trials):
        rho, povm = born.random_ic_inputs(dim, seed + 1 + 3 * t)
        p = born.state_to_prob(ref, rho)
        r = born.povm_to_cond(ref, povm)
        q_ref = born.urgleichung_general(ref, p, r)
        q_true = born_probabilities(rho, povm)
        worst_general = max(
            worst_general, float(np.max(np.abs(q_ref.values - q_true.values)))
        )
        if ref.sic_certified:
            q_sic = born.urgleichung_sic(dim, p, r)
            worst_sic = max(
                worst_sic, float(np.max(np.abs(q_sic.values - q_ref.values)))
            )
    passed = worst_general < BORN_CHECK_TOL
    payload = {
        "manifest": manifest,
        "trials": trials,
        "reference": params["reference"],
        "reference_condition_number": float(ref.condition_number),
        "max_deviation": worst_general,
        "max_sic_vs_general": worst_sic if ref.sic_certified else None,
        "tolerance": BORN_CHECK_TOL,
        "passed": passed,
    }
    _write(params["report"], dumps(payload))
    print(
        f"born-check dim {dim}, {trials} trials, reference {params['reference']}: "
        f"max deviation {worst_general:.3e} (tolerance {BORN_CHECK_TOL}) -> "
        f"{params['report']}"
    )
    return 0 if passed else 2


def run_classical_gap(params: dict) -> int:
    manifest = _manifest("classical-gap", params)
    rho = serialize.density_from_payload(_load_json(params["state"]))
    povm = serialize.povm_from_payload(_load_json(params["povm"]))
    ref = _reference_for(params["reference"], rho.dim, seed=0)
    p = born.state_to_prob(ref, rho)
    r = born.povm_to_cond(ref, povm)
    q_quantum = born.urgleichung_general(ref, p, r)
    q_classical = born.classical_law(p, r)
    gap = float(np.max(np.abs(q_quantum.values - q_classical.values)))
    payload = {
        "manifest": manifest,
        "gap": gap,
        "q_quantum": [float(v) for v in q_quantum.values],
        "q_classical": [float(v) for v in q_classical.values],
    }
    _write(params["report"], dumps(payload))
    print(f"classicality gap {gap:.9f} -> {params['report']}")
    return 0


def _parse_angles(text: str):
    try:
        part_a, part_b = text.split(":")
        a = [float(v) * np.pi / 180.0 for v in part_a.split(",")]
        b = [float(v) * np.pi / 180.0 for v in part_b.split(",")]
    except ValueError as err:
        raise ValueError(
            f"--angles must look like 'A1,A2:B1,B2' in degrees, got {text!r}"
        ) from err
    return a, b


def run_bell(params: dict) -> int:
    manifest = _manifest("bell", params)
    line = _manifest_line(manifest)
    psi = _builtin_state(params["state"], expect_dim=4)
    angles_a, angles_b = _parse_angles(params["angles"])
    fam_a = correlations.angle_family(angles_a, plane=params["plane"])
    fam_b = correlations.angle_family(angles_b, plane=params["plane"])
    table = correlations.correlation_table(psi, fam_a, fam_b)
    _write(params["table_csv"], serialize.table_csv(table, manifest_line=line))

    payload = {
        "manifest": manifest,
        "state": params["state"],
        "no_signalling": correlations.no_signalling_check(table),
        "table": serialize.table_payload(table),
    }
    if params["chsh"]:
        payload["chsh"] = correlations.chsh_value(table)
    if params["simulate"]:
        dt = sampling.data_table_sim(
            table, params["simulate"], params["seed"], mode="blocked"
        )
        empirical = dt.empirical_table()
        payload["simulate"] = {
            "n_per_setting": params["simulate"],
            "seed": params["seed"],
            "data_table": serialize.data_table_payload(dt),
            "empirical_chsh": (
                correlations.chsh_value(empirical) if params["chsh"] else None
            ),
        }
        if params.get("counts_csv"):
            _write(params["counts_csv"], serialize.data_table_csv(dt, manifest_line=line))
    _write(params["report"], dumps(payload))
    msg = f"bell table -> {params['table_csv']}, summary -> {params['report']}"
    if params["chsh"]:
        msg += f", CHSH = {payload['chsh']:.9f}"
    print(msg)
    return 0


def run_steer(params: dict) -> int:
    manifest = _manifest("steer", params)
    psi = _builtin_state(params["state"])
    basis_1 = _builtin_basis(params["basis_a"])
    basis_2 = _builtin_basis(params["basis_b"])
    report = correlations.steering_ensembles(psi, basis_1, basis_2)
    payload = {"manifest": manifest}
    payload.update(serialize.steering_payload(report))
    marg_gap = float(
        np.max(np.abs(report.marginals[0].matrix - report.marginals[1].matrix))
    )
    payload["marginal_deviation"] = marg_gap
    _write(params["report"], dumps(payload))
    print(
        f"steering overlap {report.overlap:.6f}, "
        f"no_steering={report.no_steering} -> {params['report']}"
    )
    return 0


def run_simulate(params: dict) -> int:
    manifest = _manifest("simulate", params)
    values = serialize.prob_values_from_payload(_load_json(params["probs"]))
    q = make_prob_vector(values)
    counts = sampling.sample_outcomes(q, params["n"], params["seed"])
    payload = {
        "manifest": manifest,
        "counts": [int(c) for c in counts.counts],
        "n_trials": counts.n_trials,
        "seed": counts.seed,
    }
    _write(params["out"], dumps(payload))
    print(f"counts {list(map(int, counts.counts))} -> {params['out']}")
    return 0


def run_interval(params: dict) -> int:
    value = sampling.binomial_interval_prob(
        params["n"], params["p"], params["lo"], params["hi"]
    )
    payload = {
        "manifest": _manifest("interval", params),
        "probability": value,
    }
    if params.get("out"):
        _write(params["out"], dumps(payload))
    print(f"P({params['lo']} <= K <= {params['hi']}) = {value!r}")
    return 0


_HANDLERS = {
    "sic-search": run_sic_search,
    "born-check": run_born_check,
    "classical-gap": run_classical_gap,
    "bell": run_bell,
    "steer": run_steer,
    "simulate": run_simulate,
    "interval": run_interval,
}


def run_rerun(params: dict) -> int:
    data = _load_json(params["file"])
    manifest = data if "command" in data else data.get("manifest")
    if not isinstance(manifest, dict) or "command" not in manifest:
        raise ValueError(f"{params['file']} does not embed a manifest")
    command = manifest["command"]
    if command not in _HANDLERS:
        raise ValueError(f"unknown command {command!r} in manifest")
    return _HANDLERS[command](manifest["params"])


def build_parser() -> _Parser:
    parser = _Parser(prog="probrep", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sic-search", help="search for a SIC fiducial vector")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=sic.CERT_TOL)
    p.add_argument("--out", default="fiducial.json")

    p = sub.add_parser("born-check", help="probability-rule vs Born-rule sweep")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reference", default="sic", help="'sic', 'random', or a JSON file")
    p.add_argument("--report", default="born_check.json")

    p = sub.add_parser("classical-gap", help="quantum rule vs law of total probability")
    p.add_argument("--state", required=True, help="density-operator JSON file")
    p.add_argument("--povm", required=True, help="POVM JSON file")
    p.add_argument("--reference", default="sic", help="'sic' or a reference JSON file")
    p.add_argument("--report", default="classical_gap.json")

    p = sub.add_parser("bell", help="two-qubit correlation table and CHSH")
    p.add_argument("--state", default="singlet", help="phi+, singlet, or a ket JSON file")
    p.add_argument(
        "--angles",
        default="90,0:45,135",
        help="'A1,A2,..:B1,B2,..' measurement angles in degrees",
    )
    p.add_argument("--plane", choices=("xy", "zx"), default="xy")
    p.add_argument("--chsh", action="store_true", help="evaluate the CHSH combination")
    p.add_argument("--simulate", type=int, default=0, metavar="N",
                   help="also sample N trials per setting")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table-csv", dest="table_csv", default="bell_table.csv")
    p.add_argument("--counts-csv", dest="counts_csv", default=None,
                   help="with --simulate, also write the sampled counts as CSV")
    p.add_argument("--report", default="bell_summary.json")

    p = sub.add_parser("steer", help="conditioned ensembles of a bipartite state")
    p.add_argument("--state", default="phi+", help="phi+, singlet, or a ket JSON file")
    p.add_argument("--basis-a", dest="basis_a", default="z",
                   help="z, x, y, or a POVM JSON file")
    p.add_argument("--basis-b", dest="basis_b", default="x",
                   help="z, x, y, or a POVM JSON file")
    p.add_argument("--report", default="steering.json")

    p = sub.add_parser("simulate", help="sample outcome counts from a distribution")
    p.add_argument("--probs", required=True, help="JSON file with a 'values' list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="counts.json")

    p = sub.add_parser("interval", help="exact binomial interval probability")
    p.add_argument("n", type=int)
    p.add_argument("p", type=float)
    p.add_argument("lo", type=int)
    p.add_argument("hi", type=int)
    p.add_argument("--out", default=None)

    p = sub.add_parser("rerun", help="re-execute the manifest embedded in a result file")
    p.add_argument("file")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # bad flags (1) or --help/--version (0)
        return int(exc.code or 0)
    command = args.command
    params = {k: v for k, v in vars(args).items() if k != "command"}
    handler = run_rerun if command == "rerun" else _HANDLERS[command]
    try:
        return handler(params)
    except NoConvergence as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ProbrepError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as err:
        print(f"error: malformed JSON: {err}", file=sys.stderr)
        return 1
    except KeyError as err:
        print(f"error: missing field {err} in input file", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
