"""Batch driver: run verification scenarios and emit machine-readable reports.

Each subcommand assembles a scenario from built-in defaults merged with an
optional JSON config, runs the library routines with an explicit seed, and
writes a schema-versioned JSON report atomically.  Every check is the pair
(value, tolerance) with pass defined uniformly as value <= tolerance.

Exit status: 0 when every check passes, 1 when some check fails (the report
is still written), 2 for configuration or validation errors.

Config schema (JSON object, all keys optional unless a scenario needs them):

    {"schema": 1, "scenario": "verify-wedge", "seed": 7, "tolerance": 1e-8,
     "out": "report.json", ...scenario keys...}

Report schema:

    {"schema": 1, "scenario": str, "seed": int, "inputs": {...},
     "checks": [{"name": str, "value": float, "tol": float, "pass": bool}],
     "extras": {...}, "wall_time_s": float, "version": str}

Body documents are {"family": str, "params": {...}} as accepted by
``body_from_dict`` (families: ball, ellipsoid, spheroid,
harmonic_perturbation, minkowski_sum, homothet, erosion).
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .body import body_from_dict
from .errors import PreconditionError
from .lemma_lab import (
    antipodal_falsification,
    enumerate_candidates,
    find_hypothesis_solutions,
    hypothesis_residual,
    match_candidates,
)
from .sampling import as_rng, haar_directions
from .tomography import projection_function, proportionality_test, ratio_consistency_check
from .weingarten import antipodal_search, wedge_identity_defect

__all__ = ["main", "ConfigError", "Check"]


class ConfigError(ValueError):
    """Invalid configuration or scenario inputs (exit status 2)."""


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tol)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": float(self.value),
            "tol": float(self.tol),
            "pass": self.passed,
        }


# ---------------------------------------------------------------------------
# defaults


_ELLIPSOID_4D = {
    "family": "ellipsoid",
    "params": {
        "shape": [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.69, 0.0, 0.0],
            [0.0, 0.0, 0.64, 0.0],
            [0.0, 0.0, 0.0, 1.21],
        ]
    },
}
_HOMOTHET_4D = {
    "family": "homothet",
    "params": {"base": _ELLIPSOID_4D, "scale": 0.7, "shift": [0.1, 0.0, -0.2, 0.0]},
}
_SPHEROID_5D = {
    "family": "spheroid",
    "params": {"axis": [0.0, 0.0, 0.0, 0.0, 1.0], "equatorial": 1.0, "polar": 1.4},
}
_BALL_5D = {"family": "ball", "params": {"dim": 5, "radius": 1.0}}
_BALL_3D = {"family": "ball", "params": {"dim": 3, "radius": 1.0}}

# scenario -> (defaults, keys the config may set, whether a seed is required)
_SCENARIO_TABLE: dict[str, tuple[dict, frozenset, bool]] = {
    "verify-wedge": (
        {
            "body": _HOMOTHET_4D,
            "base": _ELLIPSOID_4D,
            "grades": [1, 2, 3],
            "scale": 0.7,
            "betas": None,
            "samples": 100,
            "tolerance": 1e-8,
        },
        frozenset({"body", "base", "grades", "scale", "betas", "samples"}),
        True,
    ),
    "brightness": (
        {
            "body": _BALL_3D,
            "k": 2,
            "num_frames": 20,
            "nodes": None,
            "tolerance": 1e-6,
        },
        frozenset({"body", "k", "num_frames", "nodes"}),
        True,
    ),
    "proportionality": (
        {
            "body": _HOMOTHET_4D,
            "base": _ELLIPSOID_4D,
            "k": 2,
            "num_frames": 50,
            "nodes": 256,
            "tolerance": 1e-5,
        },
        frozenset({"body", "base", "k", "num_frames", "nodes"}),
        True,
    ),
    "umbilic-search": (
        {
            "body": _SPHEROID_5D,
            "base": _BALL_5D,
            "objective": "umbilic",
            "budget": 4000,
            "tolerance": 1e-6,
        },
        frozenset({"body", "base", "objective", "budget"}),
        True,
    ),
    "lemma-campaign": (
        {
            "mode": "antipodal",
            "m_len": 6,
            # grade default depends on the mode: 2 for the antipodal sweep,
            # 1 for the solver (the smallest instance with known roots).
            "k": None,
            "trials": 100000,
            "residual_tol": 1e-9,
            "min_spread": 1e-3,
            # solver mode
            "a": 1.0,
            "b": 2.0,
            "m": 3,
            "n": 4,
            "solutions": 25,
            "tolerance": 1e-6,
        },
        frozenset(
            {"mode", "m_len", "k", "trials", "residual_tol", "min_spread", "a", "b", "m", "n", "solutions"}
        ),
        True,
    ),
    "gallery": ({"tolerance": 0.0}, frozenset(), False),
    "ratio-e48": (
        {
            "body": _HOMOTHET_4D,
            "base": _ELLIPSOID_4D,
            "i": 1,
            "j": 2,
            "num_frames": 20,
            "nodes": 256,
            "tolerance": 1e-6,
        },
        frozenset({"body", "base", "i", "j", "num_frames", "nodes"}),
        True,
    ),
}


# ---------------------------------------------------------------------------
# config plumbing


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def _resolve_params(scenario: str, args: argparse.Namespace) -> tuple[dict, Optional[int], Optional[str]]:
    """Merge defaults <- config <- CLI flags; returns (params, seed, out)."""
    defaults, allowed, needs_seed = _SCENARIO_TABLE[scenario]
    params = copy.deepcopy(defaults)
    seed = None
    out = None
    if args.config is not None:
        doc = _load_config(args.config)
        if doc.get("schema", 1) != 1:
            raise ConfigError(f"unsupported config schema {doc.get('schema')!r}; expected 1")
        if "scenario" in doc and doc["scenario"] != scenario:
            raise ConfigError(
                f"config is for scenario {doc['scenario']!r} but subcommand is {scenario!r}"
            )
        for key, value in doc.items():
            if key in ("schema", "scenario"):
                continue
            if key == "seed":
                seed = value
            elif key == "out":
                out = value
            elif key == "tolerance":
                params["tolerance"] = value
            elif key in allowed:
                params[key] = value
            else:
                raise ConfigError(f"unknown config key {key!r} for scenario {scenario!r}")
    if args.seed is not None:
        seed = args.seed
    if args.out is not None:
        out = args.out
    if args.tolerance is not None:
        params["tolerance"] = args.tolerance
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
    if needs_seed and seed is None:
        raise ConfigError(
            f"scenario {scenario!r} is randomized and requires an explicit --seed "
            "(or a \"seed\" config key); implicit wall-clock entropy is refused"
        )
    params["threads"] = max(1, args.threads)
    if not isinstance(params.get("tolerance"), (int, float)):
        raise ConfigError("tolerance must be a number")
    return params, seed, out


def _body(params: dict, key: str):
    try:
        return body_from_dict(params[key])
    except ValueError as exc:
        raise ConfigError(f"invalid {key!r} body document: {exc}") from exc


# ---------------------------------------------------------------------------
# scenario runners: params, seed -> (checks, extras, inputs echo)


def _run_verify_wedge(params: dict, seed: int):
    body = _body(params, "body")
    base = _body(params, "base")
    grades = [int(k) for k in params["grades"]]
    if params["betas"] is not None:
        betas = [float(b) for b in params["betas"]]
        if len(betas) != len(grades):
            raise ConfigError("betas must align with grades")
    else:
        betas = [float(params["scale"]) ** k for k in grades]
    samples = int(params["samples"])
    tol = float(params["tolerance"])
    dirs = haar_directions(body.dim, samples, as_rng(seed))
    checks = []
    for k, beta in zip(grades, betas):
        worst = max(wedge_identity_defect(body, base, k, beta, u) for u in dirs)
        checks.append(Check(f"wedge_defect_k{k}", worst, tol))
    inputs = {
        "body": params["body"],
        "base": params["base"],
        "grades": grades,
        "betas": betas,
        "samples": samples,
        "tolerance": tol,
    }
    return checks, {}, inputs


def _run_brightness(params: dict, seed: int):
    body = _body(params, "body")
    k = int(params["k"])
    num_frames = int(params["num_frames"])
    nodes = params["nodes"] if params["nodes"] is None else int(params["nodes"])
    tol = float(params["tolerance"])
    samples = projection_function(body, k, num_frames, seed, nodes=nodes, threads=params["threads"])
    vols = np.asarray([v for _, v in samples])
    mid = float(np.median(vols))
    spread = float((vols.max() - vols.min()) / max(abs(mid), 1e-300))
    checks = [Check("brightness_spread_rel", spread, tol)]
    extras = {
        "volume_median": mid,
        "volume_min": float(vols.min()),
        "volume_max": float(vols.max()),
    }
    inputs = {
        "body": params["body"],
        "k": k,
        "num_frames": num_frames,
        "nodes": nodes,
        "tolerance": tol,
    }
    return checks, extras, inputs


def _run_proportionality(params: dict, seed: int):
    body = _body(params, "body")
    base = _body(params, "base")
    k = int(params["k"])
    num_frames = int(params["num_frames"])
    nodes = params["nodes"] if params["nodes"] is None else int(params["nodes"])
    tol = float(params["tolerance"])
    report = proportionality_test(
        body, base, k, num_frames, seed, nodes=nodes, threads=params["threads"]
    )
    checks = [Check("proportionality_max_rel_deviation", report.max_rel_deviation, tol)]
    extras = {"constant": report.constant, "excluded": report.excluded}
    inputs = {
        "body": params["body"],
        "base": params["base"],
        "k": k,
        "num_frames": num_frames,
        "nodes": nodes,
        "tolerance": tol,
    }
    return checks, extras, inputs


def _run_umbilic_search(params: dict, seed: int):
    body = _body(params, "body")
    base = _body(params, "base")
    objective = str(params["objective"])
    budget = int(params["budget"])
    tol = float(params["tolerance"])
    result = antipodal_search(body, base, seed=seed, budget=budget, objective=objective, tol=tol)
    value = result.r_defect if objective == "antipodal" else result.umbilic.defect
    checks = [Check("search_defect", value, tol)]
    extras = {
        "u0": [float(v) for v in result.umbilic.u0],
        "r0": result.umbilic.r0,
        "umbilic_defect": result.umbilic.defect,
        "r_defect": result.r_defect,
        "converged": result.converged,
        "evaluations": result.evaluations,
        "objective": objective,
    }
    inputs = {
        "body": params["body"],
        "base": params["base"],
        "objective": objective,
        "budget": budget,
        "tolerance": tol,
    }
    return checks, extras, inputs


def _run_lemma_campaign(params: dict, seed: int):
    mode = str(params["mode"])
    tol = float(params["tolerance"])
    if mode == "antipodal":
        mlen = int(params["m_len"])
        k = 2 if params["k"] is None else int(params["k"])
        trials = int(params["trials"])
        report = antipodal_falsification(
            mlen,
            k,
            trials,
            seed=seed,
            tol=float(params["residual_tol"]),
            min_spread=float(params["min_spread"]),
            keep_rows=True,
        )
        checks = [Check("violations_found", 1.0 if report.found_violation else 0.0, 0.0)]
        extras = {
            "best_residual": report.best_residual,
            "best_gamma": report.best_gamma,
            "best_x": [float(v) for v in report.best_x] if report.best_x is not None else None,
            "trials": trials,
        }
        inputs = {
            "mode": mode,
            "m_len": mlen,
            "k": k,
            "trials": trials,
            "residual_tol": float(params["residual_tol"]),
            "min_spread": float(params["min_spread"]),
            "tolerance": tol,
        }
        rows = [("trial", "residual", "spread", "violation")]
        eligible = report.rows[:, 1] >= report.min_spread
        hits = (report.rows[:, 0] < report.residual_tol) & eligible
        for idx in range(report.rows.shape[0]):
            rows.append(
                (idx, f"{report.rows[idx, 0]:.6e}", f"{report.rows[idx, 1]:.6e}", int(hits[idx]))
            )
        return checks, extras, inputs, rows
    if mode == "solver":
        a, b = float(params["a"]), float(params["b"])
        k = 1 if params["k"] is None else int(params["k"])
        m, n = int(params["m"]), int(params["n"])
        wanted = int(params["solutions"])
        cset = enumerate_candidates(a, b, k, m, n)
        cand = np.asarray([c.value for c in cset.candidates])
        found = find_hypothesis_solutions(a, b, k, m, n, wanted, seed=seed)
        worst = 0.0
        rows = [("solution", "residual", "worst_candidate_distance")]
        for idx, inst in enumerate(found):
            dist = match_candidates(inst.y, cset)
            worst = max(worst, dist)
            rows.append((idx, f"{hypothesis_residual(inst).max():.3e}", f"{dist:.3e}"))
        checks = [
            Check("candidate_match_worst", worst, tol),
            Check("solution_shortfall", float(wanted - len(found)), 0.0),
        ]
        extras = {
            "solutions_found": len(found),
            "candidate_values": [float(v) for v in cset.values()],
        }
        inputs = {
            "mode": mode,
            "a": a,
            "b": b,
            "k": k,
            "m": m,
            "n": n,
            "solutions": wanted,
            "tolerance": tol,
        }
        return checks, extras, inputs, rows
    raise ConfigError(f"unknown lemma-campaign mode {mode!r} (expected 'antipodal' or 'solver')")


_GALLERY = [
    (
        "ball",
        "Ball(dim, radius)",
        "h(x) = r|x|; every radius of curvature equals r; width = 2r.",
    ),
    (
        "ellipsoid",
        "Ellipsoid(shape A, SPD)",
        "h(x) = sqrt(x'Ax); width(u) = 2 sqrt(u'Au); curvature from the tangential Hessian.",
    ),
    (
        "spheroid",
        "Spheroid(axis, equatorial a, polar b)",
        "revolution body; polar radii of curvature a^2/b (umbilic), equatorial (a, ..., a, b^2/a).",
    ),
    (
        "harmonic_perturbation",
        "HarmonicPerturbation(base, axis, odd_coeffs, epsilon)",
        "h += eps |x| p(t) with odd p; widths are unchanged, so a ball base keeps constant width.",
    ),
    (
        "minkowski_sum",
        "MinkowskiSum(parts)",
        "support functions add; radii of curvature add at the same normal.",
    ),
    (
        "homothet",
        "Homothet(base, scale, shift)",
        "h = scale*h0 + <shift, x>; radii scale by the ratio, widths too.",
    ),
    (
        "erosion",
        "Erosion(base, radius)",
        "h = h0 - r|x| (inner parallel body); every radius of curvature drops by r.",
    ),
]


def _run_gallery(params: dict, seed):
    for name, ctor, facts in _GALLERY:
        print(f"{name:22s} {ctor}")
        print(f"{'':22s} {facts}")
    return [], {"families": [name for name, _, _ in _GALLERY]}, {}


def _run_ratio_e48(params: dict, seed: int):
    body = _body(params, "body")
    base = _body(params, "base")
    i, j = int(params["i"]), int(params["j"])
    num_frames = int(params["num_frames"])
    nodes = params["nodes"] if params["nodes"] is None else int(params["nodes"])
    tol = float(params["tolerance"])
    defect = ratio_consistency_check(body, base, i, j, num_frames, seed, nodes=nodes)
    checks = [Check("cross_grade_ratio_defect", defect, tol)]
    inputs = {
        "body": params["body"],
        "base": params["base"],
        "i": i,
        "j": j,
        "num_frames": num_frames,
        "nodes": nodes,
        "tolerance": tol,
    }
    return checks, {}, inputs


_SCENARIOS: dict[str, Callable] = {
    "verify-wedge": _run_verify_wedge,
    "brightness": _run_brightness,
    "proportionality": _run_proportionality,
    "umbilic-search": _run_umbilic_search,
    "lemma-campaign": _run_lemma_campaign,
    "gallery": _run_gallery,
    "ratio-e48": _run_ratio_e48,
}


# ---------------------------------------------------------------------------
# report assembly and output


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_csv(path: Path, rows: list[tuple]) -> None:
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerows(rows)
    _write_atomic(path, buffer.getvalue())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brightlab",
        description="verification scenarios for projection functions of smooth convex bodies",
    )
    sub = parser.add_subparsers(dest="command", metavar="scenario")
    help_lines = {
        "verify-wedge": "exterior-power identity defects for a body pair over random directions",
        "brightness": "constancy of the k-th projection function over random subspaces",
        "proportionality": "ratios V_k(K|U)/V_k(K0|U) over random subspaces",
        "umbilic-search": "antipodal search for a common relative umbilic direction",
        "lemma-campaign": "randomized campaigns for the subset-product relation lemmas",
        "gallery": "print the built-in body families and their closed-form properties",
        "ratio-e48": "cross-grade consistency of projection-volume ratio exponents",
    }
    for name in _SCENARIOS:
        p = sub.add_parser(name, help=help_lines[name])
        p.add_argument("--config", help="JSON config path (merged over scenario defaults)")
        p.add_argument("--seed", type=int, help="PRNG seed (required for randomized scenarios)")
        p.add_argument("--out", help="report path (default: <scenario>-report.json)")
        p.add_argument("--csv", action="store_true", help="also export CSV next to the report")
        p.add_argument("--tolerance", type=float, help="override the scenario check tolerance")
        p.add_argument("--threads", type=int, default=1, help="worker threads for projections")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2

    try:
        params, seed, out = _resolve_params(args.command, args)
        start = time.perf_counter()
        result = _SCENARIOS[args.command](params, seed)
        wall = time.perf_counter() - start
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, ValueError) as exc:
        print(f"error: invalid scenario inputs: {exc}", file=sys.stderr)
        return 2

    checks, extras, inputs = result[0], result[1], result[2]
    csv_rows = result[3] if len(result) > 3 else [("name", "value", "tol", "pass")] + [
        (c.name, f"{c.value:.12e}", f"{c.tol:.6e}", int(c.passed)) for c in checks
    ]

    report = {
        "schema": 1,
        "scenario": args.command,
        "seed": seed if seed is not None else 0,
        "inputs": inputs,
        "checks": [c.to_dict() for c in checks],
        "extras": extras,
        "wall_time_s": wall,
        "version": __version__,
    }
    out_path = Path(out) if out is not None else Path(f"{args.command}-report.json")
    _write_atomic(out_path, json.dumps(report, indent=2) + "\n")
    if args.csv:
        _write_csv(out_path.with_suffix(".csv"), csv_rows)

    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}  value={check.value:.6e}  tol={check.tol:.6e}")
    print(f"report: {out_path}")
    return 0 if all(c.passed for c in checks) else 1


if __name__ == "__main__":
    raise SystemExit(main())
