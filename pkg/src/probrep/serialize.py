"""Canonical JSON and CSV formats.

Complex numbers serialize as two-element arrays [re, im]; matrices are
row-major nested lists of those pairs. JSON is always written with sorted
keys and two-space indentation so identical data produces identical bytes.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .born import ReferenceMeasurement, make_reference
from .correlations import CorrelationTable, SteeringReport, make_table
from .operators import DensityOperator, Ket, Povm, make_ket, make_povm, validate_density
from .sampling import DataTable
from .sic import FiducialCandidate


def dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def complex_pairs(array: np.ndarray):
    """Nested [re, im] lists for a complex vector or matrix."""
    a = np.asarray(array, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [complex_pairs(row) for row in a]


def from_pairs(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim < 2 or a.shape[-1] != 2:
        raise ValueError("expected nested [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def ket_payload(ket: Ket) -> dict:
    return {"dim": ket.dim, "vector": complex_pairs(ket.amplitudes)}


def _check_dim_field(data: dict, found: int) -> None:
    stated = int(data["dim"])
    if stated != found:
        raise ValueError(f"field 'dim' says {stated} but the data has dimension {found}")


def ket_from_payload(data: dict) -> Ket:
    vec = from_pairs(data["vector"])
    _check_dim_field(data, vec.shape[0])
    return make_ket(vec)


def operator_payload(rho: DensityOperator) -> dict:
    return {"dim": rho.dim, "matrix": complex_pairs(rho.matrix)}


def density_from_payload(data: dict) -> DensityOperator:
    m = from_pairs(data["matrix"])
    _check_dim_field(data, m.shape[0])
    return validate_density(m)


def povm_payload(povm: Povm) -> dict:
    return {"dim": povm.dim, "elements": [complex_pairs(el) for el in povm.elements]}


def povm_from_payload(data: dict) -> Povm:
    els = np.array([from_pairs(el) for el in data["elements"]])
    _check_dim_field(data, els.shape[-1])
    return make_povm(els)


def reference_payload(ref: ReferenceMeasurement) -> dict:
    payload = povm_payload(ref.elements)
    payload["sic_certified"] = bool(ref.sic_certified)
    return payload


def reference_from_payload(data: dict) -> ReferenceMeasurement:
    povm = povm_from_payload(data)
    return make_reference(povm, sic_certified=bool(data.get("sic_certified", False)))


def fiducial_payload(candidate: FiducialCandidate) -> dict:
    return {
        "dim": candidate.dim,
        "vector": complex_pairs(candidate.vector.amplitudes),
        "frame_potential": float(candidate.frame_potential),
        "max_sic_deviation": float(candidate.max_sic_deviation),
        "seed": candidate.seed,
        "restarts_used": candidate.restarts_used,
    }


def fiducial_from_payload(data: dict) -> FiducialCandidate:
    ket = make_ket(from_pairs(data["vector"]))
    return FiducialCandidate(
        dim=int(data["dim"]),
        vector=ket,
        frame_potential=float(data["frame_potential"]),
        max_sic_deviation=float(data["max_sic_deviation"]),
        seed=data.get("seed"),
        restarts_used=data.get("restarts_used"),
    )


def prob_values_from_payload(data: dict) -> np.ndarray:
    return np.asarray(data["values"], dtype=float)


def table_payload(table: CorrelationTable) -> dict:
    return {
        "settings_a": [str(a) for a in table.settings_a],
        "settings_b": [str(b) for b in table.settings_b],
        "blocks": [
            {
                "a": str(a),
                "b": str(b),
                "p": [[float(v) for v in row] for row in table.block(a, b)],
            }
            for a in table.settings_a
            for b in table.settings_b
        ],
    }


def table_csv(table: CorrelationTable, manifest_line: Optional[str] = None) -> str:
    """CSV rendering with header a,b,x,y,p (one row per joint outcome)."""
    lines = []
    if manifest_line is not None:
        lines.append(f"# manifest={manifest_line}")
    lines.append("a,b,x,y,p")
    for a in table.settings_a:
        for b in table.settings_b:
            block = table.block(a, b)
            for x in range(block.shape[0]):
                for y in range(block.shape[1]):
                    lines.append(f"{a},{b},{x},{y},{float(block[x, y])!r}")
    return "\n".join(lines) + "\n"


def table_from_payload(data: dict) -> CorrelationTable:
    probs = {
        (blk["a"], blk["b"]): np.asarray(blk["p"], dtype=float)
        for blk in data["blocks"]
    }
    return make_table(tuple(data["settings_a"]), tuple(data["settings_b"]), probs)


def data_table_payload(dt: DataTable) -> dict:
    return {
        "settings_a": [str(a) for a in dt.settings_a],
        "settings_b": [str(b) for b in dt.settings_b],
        "sampling_mode": dt.sampling_mode,
        "seed": dt.seed,
        "blocks": [
            {
                "a": str(a),
                "b": str(b),
                "n_trials": int(dt.n_trials[(a, b)]),
                "counts": [[int(v) for v in row] for row in dt.counts[(a, b)]],
            }
            for a in dt.settings_a
            for b in dt.settings_b
        ],
    }


def data_table_csv(dt: DataTable, manifest_line: Optional[str] = None) -> str:
    lines = []
    if manifest_line is not None:
        lines.append(f"# manifest={manifest_line}")
    lines.append("a,b,x,y,count")
    for a in dt.settings_a:
        for b in dt.settings_b:
            block = dt.counts[(a, b)]
            for x in range(block.shape[0]):
                for y in range(block.shape[1]):
                    lines.append(f"{a},{b},{x},{y},{int(block[x, y])}")
    return "\n".join(lines) + "\n"


def steering_payload(report: SteeringReport) -> dict:
    def ensemble(members):
        return [
            {"probability": float(p), "state": complex_pairs(rho.matrix)}
            for p, rho in members
        ]

    cross = [
        [
            float(np.real(np.trace(r1.matrix @ r2.matrix)))
            for _, r2 in report.ensembles[1]
        ]
        for _, r1 in report.ensembles[0]
    ]
    return {
        "ensembles": [ensemble(e) for e in report.ensembles],
        "marginals": [complex_pairs(m.matrix) for m in report.marginals],
        "cross_fidelities": cross,
        "overlap": float(report.overlap),
        "no_steering": bool(report.no_steering),
    }
