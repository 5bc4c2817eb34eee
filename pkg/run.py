#!/usr/bin/env python3
"""
p1lab -- Twisted gl₂ Isomonodromic Systems and the Painlevé 1 Hierarchy
========================================================================

Lax pairs, Hamiltonians and flows for a rank-2 connection with one ramified
pole at infinity, in Darboux, shifted and symmetric coordinates.

Usage:
  python run.py construct   --g 2 --point '{"q": [...], "p": [...]}'   Build L, Ľ, L̃ (Darboux route)
  python run.py construct   --g 2 --flow 1 --json                      ... plus A, Ǎ, Ã for τ₁
  python run.py hamiltonian --g 3 --flow 2 --symmetric                 Ham by every route
  python run.py evolve      --g 1 --flow 1 --to 0.5 --out p1.csv       RK4 along τ₁, CSV + JSON
  python run.py verify      all --g 2 --seed 7                         Full residual battery
  python run.py example     --name p1                                  Worked example (airy|p1|g2|g3)

Conventions:
  Complex numbers are [re, im] JSON pairs.  Default ħ = 1, default seed = 7.
  P1LAB_TOL=<file.json> overrides the report thresholds of `verify`.
"""

import sys
import argparse
import logging
from pathlib import Path

# ── Imports ───────────────────────────────────────────────────────────────

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

try:
    from p1lab.central_config import PROJECT_VERSION, PROJECT_NAME
except ImportError:
    PROJECT_VERSION = "0.1.0"
    PROJECT_NAME = "p1lab"

from p1lab.central_config import config
from p1lab.commands import dispatch

GROUPS = ["algebra", "symfun", "times", "coeffs", "lax", "ham", "flow", "all"]
EXAMPLES = ["airy", "p1", "g2", "g3"]


# ── CLI Parser ────────────────────────────────────────────────────────────


def _add_point_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g", type=int, required=True, help="Genus g = r_inf − 3")
    times = p.add_mutually_exclusive_group()
    times.add_argument(
        "--canonical",
        action="store_true",
        help="Canonical trivial times at τ = 0 unless --tau is given "
        "(without the flag τ is seeded)",
    )
    times.add_argument(
        "--times",
        type=str,
        default=None,
        help='General times as JSON: {"r_inf": r, "t": [...]} or the reduced form',
    )
    p.add_argument(
        "--tau", type=str, default=None, help="Isomonodromic times τ₁..τ_g as a JSON list"
    )
    p.add_argument(
        "--point",
        type=str,
        default=None,
        help='{"q": [...], "p": [...]} (Darboux) or {"Q": [...], "P": [...]} (symmetric)',
    )
    p.add_argument(
        "--seed",
        type=int,
        default=config.DEFAULT_SEED,
        help=f"Seed for default times/point (default: {config.DEFAULT_SEED})",
    )
    p.add_argument("--json", action="store_true", help="Machine-readable output")


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p1lab",
        description=f"{PROJECT_NAME} v{PROJECT_VERSION} — Painlevé 1 hierarchy workbench",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python run.py example --name airy                          g = 0: L = [[0,1],[λ,0]], y² = λ
  python run.py example --name p1                            g = 1: L̃, Ã, Ham = 2p² − 2q³ − 4τq
  python run.py example --name g2                            g = 2 canonical Lax pair + Hamiltonians
  python run.py construct --g 1 --tau '[0.3]' --point '{"q": [0.7], "p": [-0.4]}'
  python run.py construct --g 2 --times '{"r_inf": 5, "t": [...]}' --flow '[...]'
  python run.py hamiltonian --g 2 --flow 2 --point '{"Q": [0.5, -0.3], "P": [0.2, 0.1]}'
  python run.py evolve --g 1 --flow 1 --from '{"Q": [1], "P": [0]}' --to 0.2 --steps 200
  python run.py verify flow --g 3 --json
  python run.py verify all --g 2 --jobs 4

Flows:
  --flow k          isomonodromic time τ_k (needs canonical trivial times)
  --flow '[α...]'   general deformation vector α_{∞,1..2g+4}

Exit codes:
  0  success
  1  domain error (PoleCollision, DegenerateTimes, IllConditioned, NotCanonical,
     StepFailure, WrongGenus, ResidueMismatch, IndexOutOfRange) or a failed check
  2  usage error (unknown flag, malformed JSON, wrong shapes)
""",
    )
    parser.add_argument(
        "--version", action="version", version=f"{PROJECT_NAME} v{PROJECT_VERSION}"
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Debug logging on stderr"
    )

    sub = parser.add_subparsers(dest="command", help="Available commands")

    construct_p = sub.add_parser("construct", help="Build the Lax matrices at a point")
    _add_point_args(construct_p)
    construct_p.add_argument(
        "--flow",
        type=str,
        default=None,
        help="τ-flow index k or JSON deformation vector (adds A, Ǎ, Ã)",
    )

    ham_p = sub.add_parser("hamiltonian", help="Evaluate Ham^(α) by every route")
    _add_point_args(ham_p)
    ham_p.add_argument(
        "--flow", type=str, required=True, help="τ-flow index k or JSON deformation vector"
    )
    ham_p.add_argument(
        "--symmetric",
        action="store_true",
        help="Also evaluate in symmetric coordinates (Q, P)",
    )

    evolve_p = sub.add_parser("evolve", help="Integrate a τ_k flow (RK4)")
    evolve_p.add_argument("--g", type=int, required=True, help="Genus (≥ 1)")
    evolve_p.add_argument("--flow", type=int, default=1, help="Flow index k (default: 1)")
    evolve_p.add_argument(
        "--tau", type=str, default=None, help="Initial τ₁..τ_g as a JSON list"
    )
    evolve_p.add_argument(
        "--from",
        dest="start",
        type=str,
        default=None,
        help="Initial point (Darboux or symmetric JSON; default: seeded)",
    )
    evolve_p.add_argument(
        "--to", type=str, required=True, help="Final τ_k: 0.5 or [0.5, 0.1]"
    )
    evolve_p.add_argument(
        "--steps", type=int, default=100, help="Number of RK4 steps (default: 100)"
    )
    evolve_p.add_argument(
        "--out", type=str, default=None, help="CSV path; diagnostics go to <out>.json"
    )
    evolve_p.add_argument(
        "--seed", type=int, default=config.DEFAULT_SEED, help="Seed for default data"
    )
    evolve_p.add_argument("--json", action="store_true", help="Machine-readable output")

    verify_p = sub.add_parser("verify", help="Run the residual verification battery")
    verify_p.add_argument("group", choices=GROUPS, help="Check group or 'all'")
    verify_p.add_argument("--g", type=int, default=2, help="Genus (default: 2)")
    verify_p.add_argument(
        "--seed", type=int, default=config.DEFAULT_SEED, help="Random seed (default: 7)"
    )
    verify_p.add_argument(
        "--jobs", type=int, default=1, help="Worker threads for 'all' (default: 1)"
    )
    verify_p.add_argument("--json", action="store_true", help="Rows as JSON")

    example_p = sub.add_parser("example", help="Print a worked example as JSON")
    example_p.add_argument("--name", choices=EXAMPLES, required=True)
    example_p.add_argument("--tau", type=str, default=None, help="Override τ (JSON list)")
    example_p.add_argument(
        "--point", type=str, default=None, help="Override the point (JSON)"
    )

    return parser


# ── Main ──────────────────────────────────────────────────────────────────


def main() -> int:
    parser = create_parser()
    args = parser.parse_args()

    if args.verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )

    if not args.command:
        parser.print_help()
        return 0

    return dispatch(args)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n❌ Cancelled.")
        sys.exit(130)
