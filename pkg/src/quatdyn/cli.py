"""Command line: ``quatdyn classify|eqregion|verify --input FILE``.

Settings resolve as flags, then ``QUATDYN_*`` environment variables, then the
input file, then defaults.  Output is canonical JSON on stdout; the exit code
carries the outcome.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .dynamics import DEFAULT_POWER_CAP, DEFAULT_UNIT_TOL, classify
from .eqregion import COORDS, MODES, decompose, region_from_jordan
from .errors import DimensionMismatch, IllConditioned, NonSquare, ParseError, QuatDynError, Singular, Unstable
from .hmat import HMatrix
from .oracle import ProbeConfig, verify_region
from .spectral import DEFAULT_TOL, EigenClass, right_eigenvalues

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_SINGULAR = 3
EXIT_ILL_CONDITIONED = 4
EXIT_VERIFY_FAILED = 5
EXIT_UNSTABLE = 6

_ENV = {
    "tol": ("QUATDYN_TOL", float),
    "unit_tol": ("QUATDYN_UNIT_TOL", float),
    "max_power": ("QUATDYN_MAX_POWER", int),
    "seed": ("QUATDYN_SEED", int),
    "mode": ("QUATDYN_MODE", str),
    "coords": ("QUATDYN_COORDS", str),
}
_DEFAULTS = {
    "tol": DEFAULT_TOL,
    "unit_tol": DEFAULT_UNIT_TOL,
    "max_power": DEFAULT_POWER_CAP,
    "seed": 0,
    "mode": "general",
    "coords": "original",
}


def canonical_dumps(obj) -> str:
    """Deterministic serialization: sorted keys, compact separators, no NaN."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass(frozen=True)
class InputSpec:
    matrix: HMatrix
    mode: str | None = None
    tolerances: dict | None = None
    seed: int | None = None

    @classmethod
    def from_json(cls, obj) -> "InputSpec":
        if not isinstance(obj, dict):
            raise ParseError("input must be a JSON object")
        if "matrix" not in obj:
            # bare matrix schema
            return cls(HMatrix.from_json(obj))
        mode = obj.get("mode")
        if mode is not None and mode not in MODES:
            raise ParseError(f"mode must be one of {MODES}")
        tols = obj.get("tolerances") or {}
        if not isinstance(tols, dict):
            raise ParseError("tolerances must be an object")
        unknown = set(tols) - {"tol", "unit_tol", "max_power"}
        if unknown:
            raise ParseError(f"unknown tolerance keys: {sorted(unknown)}")
        seed = obj.get("seed")
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
            raise ParseError("seed must be an integer")
        return cls(HMatrix.from_json(obj["matrix"]), mode, tols, seed)


def _resolve(args: argparse.Namespace, request: InputSpec) -> dict:
    from_file = dict(request.tolerances or {})
    if request.mode is not None:
        from_file["mode"] = request.mode
    if request.seed is not None:
        from_file["seed"] = request.seed
    out = {}
    for key, default in _DEFAULTS.items():
        flag = getattr(args, key, None)
        env_name, conv = _ENV[key]
        if flag is not None:
            out[key] = flag
        elif os.environ.get(env_name):
            try:
                out[key] = conv(os.environ[env_name])
            except ValueError as exc:
                raise ParseError(f"bad value for {env_name}: {os.environ[env_name]!r}") from exc
        elif key in from_file:
            out[key] = from_file[key]
        else:
            out[key] = default
    if out["mode"] not in MODES:
        raise ParseError(f"mode must be one of {MODES}")
    if out["coords"] not in COORDS:
        raise ParseError(f"coords must be one of {COORDS}")
    return out


def _read_input(path: str) -> InputSpec:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    return InputSpec.from_json(obj)


def _eigenclasses(gamma: HMatrix, jd, settings: dict) -> list[dict]:
    if settings["mode"] == "assume-jordan":
        merged: dict[complex, int] = {}
        for b in jd.blocks:
            merged[b.rep] = merged.get(b.rep, 0) + b.size
        classes = [EigenClass(r, m) for r, m in merged.items()]
    else:
        classes = right_eigenvalues(gamma, settings["tol"])
    return [{"re": float(c.rep.real), "im": float(c.rep.imag) + 0.0, "multiplicity": c.multiplicity} for c in classes]


def cmd_classify(request: InputSpec, settings: dict) -> tuple[dict, int]:
    jd = decompose(request.matrix, settings["tol"], settings["mode"])
    t = classify(jd, settings["unit_tol"])
    out = {"type": t.value, "jordan": jd.to_json(), "eigenclasses": _eigenclasses(request.matrix, jd, settings)}
    return out, EXIT_OK


def cmd_eqregion(request: InputSpec, settings: dict) -> tuple[dict, int]:
    jd = decompose(request.matrix, settings["tol"], settings["mode"])
    report = region_from_jordan(jd, settings["unit_tol"])
    return report.to_json(settings["coords"]), EXIT_OK


def cmd_verify(request: InputSpec, settings: dict) -> tuple[dict, int]:
    jd = decompose(request.matrix, settings["tol"], settings["mode"])
    report = region_from_jordan(jd, settings["unit_tol"])
    cfg = ProbeConfig(max_power=settings["max_power"], seed=settings["seed"])
    summary = verify_region(request.matrix, report, cfg)
    out = summary.to_json()
    out["type"] = report.dyn_type.value
    return out, EXIT_OK if summary.passed else EXIT_VERIFY_FAILED


COMMANDS = {"classify": cmd_classify, "eqregion": cmd_eqregion, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatdyn", description="Dynamics of quaternionic projective transformations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", required=True, help="JSON file ('-' for stdin)")
        p.add_argument("--mode", choices=MODES, default=None)
        p.add_argument("--tol", type=float, default=None, help="clustering / rank tolerance")
        p.add_argument("--unit-tol", dest="unit_tol", type=float, default=None, help="tolerance for |lambda| == 1")
        p.add_argument("--max-power", dest="max_power", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--coords", choices=COORDS, default=None)
    return parser


def _error(kind: str, message: str, **extra) -> dict:
    return {"error": kind, "message": message, **extra}


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if not exc.code:
            return {"help": True}, EXIT_OK
        return _error("UsageError", "invalid command line"), EXIT_PARSE
    try:
        request = _read_input(args.input)
        settings = _resolve(args, request)
        return COMMANDS[args.command](request, settings)
    except (ParseError, NonSquare, DimensionMismatch) as exc:
        return _error(type(exc).__name__, str(exc)), EXIT_PARSE
    except Singular as exc:
        return _error("Singular", str(exc)), EXIT_SINGULAR
    except IllConditioned as exc:
        return _error("IllConditioned", str(exc), gap=exc.gap), EXIT_ILL_CONDITIONED
    except Unstable as exc:
        return _error("Unstable", str(exc), dims=list(exc.dims)), EXIT_UNSTABLE
    except QuatDynError as exc:
        return _error(type(exc).__name__, str(exc)), EXIT_ERROR


def main(argv: list[str] | None = None) -> int:
    out, code = run(argv)
    sys.stdout.write(canonical_dumps(out) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
