"""Command-line entry point: verify | presheaf | flow | classify.

Mathematical verdicts live inside the emitted JSON; the exit code only
reflects machine problems — 0 ok, 1 implementation-level equivalence
failure, 2 parse/schema error, 3 mathematical/numerical domain error,
4 resource cap exceeded.  All randomness flows from the single --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, distance
from .contexts import DEFAULT_ATOM_CAP, DEFAULT_NODE_CAP, poset_fragment
from .derivations import (DEFAULT_TIMES, check_dc_axioms, dc_from_product,
                          flow)
from .errors import (DomainError, InconsistencyError, NumericError,
                     ResourceLimitError, StructureMismatchError, ToolkitError)
from .morphisms import classify, default_fragment, theorem_suite
from .presheaf import build_presheaf
from .serialize import (algebra_from_json, context_from_json, element_from_json,
                        element_to_json, jsonable, map_from_descriptor,
                        presheaf_to_json)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_PARSE = 2
EXIT_NUMERIC = 3
EXIT_RESOURCE = 4


@dataclass(frozen=True)
class SessionConfig:
    """Run-wide knobs; embedded verbatim in every report."""

    tolerance: float = DEFAULT_TOL
    times: tuple[float, ...] = tuple(float(t) for t in DEFAULT_TIMES)
    atom_cap: int = DEFAULT_ATOM_CAP
    node_cap: int = DEFAULT_NODE_CAP
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.tolerance < 1e-3:
            raise DomainError("tolerance must lie in (0, 1e-3)")
        if self.atom_cap < 1 or self.node_cap < 1:
            raise DomainError("caps must be at least 1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def to_dict(self) -> dict:
        return {"tolerance": self.tolerance, "times": list(self.times),
                "atom_cap": self.atom_cap, "node_cap": self.node_cap,
                "seed": self.seed}


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _ParseError(f"{path}: {exc}") from exc


class _ParseError(Exception):
    pass


def _config_from_args(args) -> SessionConfig:
    times = tuple(float(x) for x in args.times.split(",")) if args.times else \
        tuple(float(t) for t in DEFAULT_TIMES)
    return SessionConfig(tolerance=args.tolerance, times=times,
                         atom_cap=args.atom_cap, node_cap=args.node_cap,
                         seed=args.seed)


def _emit(payload: dict, summary: list[str], args) -> None:
    text = json.dumps(jsonable(payload), indent=2, sort_keys=True)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        if not args.quiet:
            for line in summary:
                print(line)
    else:
        print(text)
        if not args.quiet:
            for line in summary:
                print(line, file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    config = _config_from_args(args)
    algebra = algebra_from_json(_load_json(args.algebra))
    f = map_from_descriptor(algebra, _load_json(args.map))
    fragment = default_fragment(algebra, config.rng(), atom_cap=config.atom_cap,
                                node_cap=config.node_cap, tol=config.tolerance)
    report = theorem_suite(f, fragment, config.times, tol=config.tolerance,
                           rng=config.rng(), atom_cap=config.atom_cap,
                           node_cap=config.node_cap)
    payload = {"command": "verify", "config": config.to_dict(),
               "report": report.to_dict()}
    summary = [f"verify {f.label}: classification={report.classification}",
               f"  verdicts: {report.verdicts()}",
               f"  failures: {len(report.failures)}  warnings: {len(report.warnings)}"]
    _emit(payload, summary, args)
    return EXIT_FAILURES if report.failures else EXIT_OK


def cmd_presheaf(args) -> int:
    config = _config_from_args(args)
    algebra = algebra_from_json(_load_json(args.algebra))
    seeds_data = _load_json(args.seeds)
    if not isinstance(seeds_data, dict) or "seeds" not in seeds_data:
        raise _ParseError(f'{args.seeds}: seeds JSON needs a "seeds" list')
    seeds = [context_from_json(algebra, s) for s in seeds_data["seeds"]]
    poset = poset_fragment(seeds, algebra=algebra, atom_cap=config.atom_cap,
                           node_cap=config.node_cap, tol=config.tolerance)
    frag = build_presheaf(poset, config.tolerance)
    payload = {"command": "presheaf", "config": config.to_dict(),
               "presheaf": presheaf_to_json(frag)}
    summary = [f"presheaf: {len(poset)} nodes, "
               f"spectrum sizes {list(frag.spectrum_sizes())}"]
    _emit(payload, summary, args)
    return EXIT_OK


def cmd_flow(args) -> int:
    config = _config_from_args(args)
    algebra = algebra_from_json(_load_json(args.algebra))
    generator = element_from_json(algebra, _load_json(args.generator))
    c = algebra.central_projection_from_mask(args.c_mask)
    psi = dc_from_product(algebra, c, tol=config.tolerance)
    fl = flow(generator, psi, tol=config.tolerance)
    if args.targets:
        targets = [element_from_json(algebra, t) for t in _load_json(args.targets)]
    else:
        targets = list(algebra.hermitian_basis())
    orbits = []
    for t in config.times:
        orbits.append({
            "t": t,
            "unitary": element_to_json(fl.unitary(t)),
            "images": [element_to_json(fl.apply(t, x)) for x in targets],
        })
    group_law = 0.0
    for s in config.times:
        for t in config.times:
            for x in targets:
                group_law = max(group_law, distance(
                    fl.apply(s, fl.apply(t, x)), fl.apply(s + t, x)))
    derivative = max(distance(fl.derivative_at_zero(x), psi(generator)(x))
                     for x in targets)
    axioms = check_dc_axioms(psi, tol=config.tolerance, rng=config.rng())
    payload = {
        "command": "flow", "config": config.to_dict(),
        "generator": element_to_json(generator), "c_mask": args.c_mask,
        "orbit": orbits,
        "residuals": {"group_law": group_law,
                      "derivative_vs_correspondence": derivative,
                      "dc_axioms": axioms.to_dict()},
    }
    summary = [f"flow: {len(config.times)} times × {len(targets)} targets, "
               f"group-law residual {group_law:.3e}"]
    _emit(payload, summary, args)
    return EXIT_OK


def cmd_classify(args) -> int:
    config = _config_from_args(args)
    algebra = algebra_from_json(_load_json(args.algebra))
    f = map_from_descriptor(algebra, _load_json(args.map))
    report = classify(f, tol=config.tolerance, rng=config.rng())
    report.config = config.to_dict()
    payload = {"command": "classify", "config": config.to_dict(),
               "report": report.to_dict()}
    summary = [f"classify {f.label}: {report.classification}, "
               f"c = {list(report.splitting_c_mask or ())}"]
    _emit(payload, summary, args)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOL)
    common.add_argument("--times", type=str, default=None,
                        help="comma-separated flow times")
    common.add_argument("--atom-cap", type=int, default=DEFAULT_ATOM_CAP)
    common.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json-out", type=str, default=None,
                        help="write the JSON report to this path")
    common.add_argument("--quiet", action="store_true",
                        help="suppress the human-readable summary")

    parser = argparse.ArgumentParser(
        prog="vnalg",
        description="Contexts, spectral presheaves, and orientations of "
                    "finite-dimensional von Neumann algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common],
                       help="run the full theorem suite on one map")
    p.add_argument("algebra", help="algebra JSON file")
    p.add_argument("map", help="map descriptor JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("presheaf", parents=[common],
                       help="build and dump a spectral presheaf fragment")
    p.add_argument("algebra")
    p.add_argument("seeds", help='JSON file {"seeds": [context, ...]}')
    p.set_defaults(func=cmd_presheaf)

    p = sub.add_parser("flow", parents=[common],
                       help="evaluate an inner flow and its residual table")
    p.add_argument("algebra")
    p.add_argument("--generator", required=True, help="Hermitian element JSON file")
    p.add_argument("--c-mask", type=int, default=None,
                   help="central projection bitmask (bit j = block j); "
                        "defaults to all blocks")
    p.add_argument("--targets", default=None,
                   help="JSON file with a list of elements (default: basis)")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("classify", parents=[common],
                       help="corner classification and splitting projection")
    p.add_argument("algebra")
    p.add_argument("map")
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "flow" and args.c_mask is None:
            algebra = algebra_from_json(_load_json(args.algebra))
            args.c_mask = (1 << algebra.num_blocks) - 1
        return args.func(args)
    except _ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, NumericError, InconsistencyError,
            StructureMismatchError, ToolkitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input ({exc})", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
