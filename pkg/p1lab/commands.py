"""
p1lab — Command Implementations
================================

All CLI command handlers live here, keeping run.py as a thin argparse
dispatcher.  Each public ``cmd_*`` function corresponds to a subcommand
(construct, hamiltonian, evolve, verify, example) and returns its exit code.

``dispatch`` routes a parsed namespace and owns the error policy:
domain errors print ``❌ <ClassName>: <message>`` to stderr and exit 1,
malformed arguments (bad JSON, wrong shapes) exit 2.

Complex numbers are written as ``[re, im]`` pairs everywhere.  Nothing
time-dependent or unseeded reaches stdout.
"""

from __future__ import annotations

import csv
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from p1lab.algebra import (
    Mat2,
    Poly,
    complex_from_json,
    complex_to_json,
    mat2_to_json,
    poly_to_json,
)
from p1lab.battery import (
    CheckResult,
    random_canonical,
    random_point,
    run_battery,
)
from p1lab.central_config import PROJECT_NAME, PROJECT_VERSION, config, load_tolerances
from p1lab.coeffs import H_symmetric, nu_reduced
from p1lab.errors import P1LabError, StepFailure
from p1lab.flow import (
    Trajectory,
    integrate,
    trajectory_curve_residual,
    verify_energy_balance,
    verify_painleve1,
)
from p1lab.ham import (
    general_hamiltonian,
    hamiltonian_mu_form,
    reduced_hamiltonian,
    reduced_symmetric_hamiltonian,
    symmetric_hamiltonian,
    to_symmetric,
)
from p1lab.lax import (
    DarbouxPoint,
    SymmetricPoint,
    build_Atilde_symmetric,
    build_L,
    build_Ltilde_symmetric,
    darboux_pipeline,
    flow_data,
    on_curve_residual,
    point_from_json,
    spectral_curve,
    trace_law,
)
from p1lab.times import (
    DeformationVector,
    IrregularTimes,
    ReducedTimes,
    irregular_from_reduced,
    reduced_to_json,
    times_from_json,
    times_to_json,
)

logger = logging.getLogger(__name__)

RULE = "═" * 70
THIN = "─" * 70


# ── Argument parsing helpers ────────────────────────────────────────────


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"--{what} is not valid JSON ({e.msg})") from e


def parse_complex(text: str, what: str) -> complex:
    """``0.3`` or ``[0.3, -0.1]``."""
    return complex_from_json(_load_json(text, what))


def parse_tau(text: str | None, g: int) -> tuple | None:
    if text is None:
        return None
    raw = _load_json(text, "tau")
    if not isinstance(raw, list) or len(raw) != g:
        raise ValueError(f"--tau must be a JSON list of {g} entries")
    return tuple(complex_from_json(x) for x in raw)


def parse_point(text: str | None, what: str = "point"):
    if text is None:
        return None
    return point_from_json(_load_json(text, what))


def parse_flow(text: str | None):
    """A τ-flow index ``k`` or a JSON list α_{∞,1..2r−2}."""
    if text is None:
        return None
    try:
        return int(text)
    except ValueError:
        pass
    raw = _load_json(text, "flow")
    if not isinstance(raw, list):
        raise ValueError("--flow must be an integer or a JSON list")
    return DeformationVector(tuple(complex_from_json(x) for x in raw))


def _times(
    g: int, tau: tuple | None, times_text: str | None, rng, canonical: bool = False
) -> ReducedTimes | IrregularTimes:
    """Canonical ReducedTimes unless --times is given.

    τ comes from --tau; without it --canonical pins τ = 0 and otherwise τ is
    drawn from the seed.
    """
    if times_text is not None:
        t = times_from_json(_load_json(times_text, "times"))
        if t.genus != g:
            raise ValueError(f"--times describe genus {t.genus}, not {g}")
        return t
    if tau is None:
        if canonical or not g:
            return ReducedTimes.canonical((0j,) * g)
        return random_canonical(rng, g)
    return ReducedTimes.canonical(tau)


def _point(g: int, point, rng) -> DarbouxPoint | SymmetricPoint:
    if point is None:
        return random_point(rng, g)
    if point.genus != g:
        raise ValueError(f"point has genus {point.genus}, expected {g}")
    return point


# ── Output helpers ──────────────────────────────────────────────────────


def to_jsonable(obj):
    """Recursively map complex → [re, im] and Poly/Mat2 → their JSON form."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(complex(obj))
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Poly):
        return poly_to_json(obj)
    if isinstance(obj, Mat2):
        return mat2_to_json(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(payload, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(to_jsonable(payload), indent=2, sort_keys=True))
    stream.write("\n")


def _fmt(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"({z.real:.6g}{z.imag:+.6g}j)"


def format_poly(p: Poly, var: str = "λ") -> str:
    terms = []
    for k in range(len(p.coeffs) - 1, -1, -1):
        c = complex(p.coeffs[k])
        if c == 0:
            continue
        mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
        terms.append(_fmt(c) + (f"·{mono}" if mono else ""))
    return " + ".join(terms) if terms else "0"


def _print_matrix(name: str, m: Mat2) -> None:
    print(f"\n  {name}")
    for label, e in zip(("11", "12", "21", "22"), m.entries):
        if isinstance(e, Poly):
            body = format_poly(e)
        else:
            body = format_poly(e.poly) + " + poles"
        print(f"    [{label}] {body}")


def _banner(title: str) -> None:
    print(RULE)
    print(f"  {title}")
    print(RULE)


def write_trajectory_csv(traj: Trajectory, path: Path) -> None:
    """tau_re, tau_im, then Re/Im of every Q_i and P_i per row."""
    g = traj.genus
    header = ["tau_re", "tau_im"]
    header += [f"Q{i}_{part}" for i in range(1, g + 1) for part in ("re", "im")]
    header += [f"P{i}_{part}" for i in range(1, g + 1) for part in ("re", "im")]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for tau, spt in zip(traj.grid, traj.states):
            row = complex_to_json(tau)
            for x in spt.Q + spt.P:
                row += complex_to_json(x)
            w.writerow(row)


# ── Report ──────────────────────────────────────────────────────────────


def emit_report(
    results: Sequence[CheckResult], as_json: bool = False, title: str = "", stream=None
) -> int:
    """Print one row per check; returns 1 when any row failed, else 0."""
    stream = stream or sys.stdout
    failed = sum(1 for r in results if not r.passed)
    if as_json:
        write_json([r.to_json() for r in results], stream)
        return 1 if failed else 0

    lines = [RULE, f"  {PROJECT_NAME} v{PROJECT_VERSION} — Verification Report"]
    if title:
        lines.append(f"  {title}")
    lines.append(RULE)
    if results:
        lines.append("")
        for r in results:
            icon = "✅" if r.passed else "❌"
            res = "error" if r.residual is None else f"{r.residual:.2e}"
            status = "PASS" if r.passed else "FAIL"
            lines.append(
                f"  {icon} {r.name:<22s} {res:>9s} ≤ {r.threshold:.0e}  {status}  {r.anchor}"
            )
            if r.detail and not r.passed:
                for d in r.detail.split("\n"):
                    lines.append(f"         {d}")
        total = len(results)
        passed = total - failed
        lines.append("")
        lines.append(THIN)
        lines.append(f"  Results: {passed}/{total} passed ({passed / total * 100:.0f}%)")
        if failed == 0:
            lines.append("  🎉 ALL CHECKS PASSED")
        else:
            lines.append(f"  ⚠️  {failed} check(s) failed — review above")
        lines.append(THIN)
    stream.write("\n".join(lines) + "\n")
    return 1 if failed else 0


# ── Commands ────────────────────────────────────────────────────────────


def cmd_construct(
    g: int,
    tau: str | None = None,
    point: str | None = None,
    times: str | None = None,
    canonical: bool = False,
    flow: str | None = None,
    seed: int = config.DEFAULT_SEED,
    as_json: bool = False,
) -> int:
    """Build L, Ľ, L̃ (and A, Ǎ, Ã for a flow) at one point."""
    rng = np.random.default_rng(seed)
    tm = _times(g, parse_tau(tau, g), times, rng, canonical)
    pt = _point(g, parse_point(point), rng)
    fl = parse_flow(flow)
    t = irregular_from_reduced(tm) if isinstance(tm, ReducedTimes) else tm

    payload: dict = {
        "genus": g,
        "times": times_to_json(t),
        "point": pt.to_json(),
    }
    if isinstance(tm, ReducedTimes):
        payload["reduced_times"] = reduced_to_json(tm)

    if isinstance(pt, DarbouxPoint):
        alpha = flow_data(fl, tm)[0] if fl is not None else None
        mats = darboux_pipeline(t, pt, alpha)
        P1, P2 = spectral_curve(t, pt)
        payload["route"] = "darboux"
        payload["curve"] = {"P1": P1, "P2": P2}
        payload["on_curve"] = max(
            (abs(x) for x in on_curve_residual(pt, mats["Ltilde"])), default=0.0
        )
    else:
        mats = {"Ltilde": build_Ltilde_symmetric(tm, pt)}
        if fl is not None:
            mats["Atilde"] = build_Atilde_symmetric(fl, tm, pt)
        payload["route"] = "symmetric"
    if fl is not None:
        payload["flow"] = fl if isinstance(fl, int) else list(fl.alpha)
        payload["trace"] = trace_law(flow_data(fl, tm)[0], tm, pt)
    payload["matrices"] = mats

    if as_json:
        write_json(payload)
        return 0

    _banner(f"Lax matrices — genus {g}, {payload['route']} route")
    print(f"  t  = [{', '.join(_fmt(x) for x in t.t)}]   ħ = {_fmt(t.hbar)}")
    for name in ("L", "Lcheck", "Ltilde", "A", "Acheck", "Atilde"):
        if name in mats:
            _print_matrix(name, mats[name])
    if "curve" in payload:
        print(f"\n  y² − P̃₁y + P̂₂ = 0 with P̃₁ = {format_poly(payload['curve']['P1'])}")
        print(f"                         P̂₂ = {format_poly(payload['curve']['P2'])}")
        print(f"  ✅ on-curve residual {payload['on_curve']:.2e}")
    if "trace" in payload:
        print(f"  Tr Ã = {format_poly(payload['trace'])}")
    return 0


def cmd_hamiltonian(
    g: int,
    flow: str,
    tau: str | None = None,
    point: str | None = None,
    times: str | None = None,
    canonical: bool = False,
    symmetric: bool = False,
    seed: int = config.DEFAULT_SEED,
    as_json: bool = False,
) -> int:
    """Evaluate Ham^{(α)} by every applicable route."""
    rng = np.random.default_rng(seed)
    tm = _times(g, parse_tau(tau, g), times, rng, canonical)
    pt = _point(g, parse_point(point), rng)
    fl = parse_flow(flow)
    alpha, t = flow_data(fl, tm)

    routes: dict = {}
    parts: dict = {}
    if isinstance(pt, DarbouxPoint):
        gen = general_hamiltonian(alpha, t, pt)
        routes["general"] = gen.value
        parts = gen.parts
        routes["mu_form"] = hamiltonian_mu_form(alpha, t, pt)
        if isinstance(fl, int):
            routes["reduced"] = reduced_hamiltonian(fl, tm, pt)
    if symmetric or isinstance(pt, SymmetricPoint):
        spt = pt if isinstance(pt, SymmetricPoint) else to_symmetric(pt)
        sym = symmetric_hamiltonian(fl, tm, spt)
        routes["symmetric"] = sym.value
        parts = parts or sym.parts
        if isinstance(fl, int):
            routes["reduced_symmetric"] = reduced_symmetric_hamiltonian(fl, tm, spt)

    values = list(routes.values())
    spread = max((abs(complex(v) - complex(values[0])) for v in values), default=0.0)
    payload = {
        "genus": g,
        "flow": fl if isinstance(fl, int) else list(fl.alpha),
        "point": pt.to_json(),
        "value": values[0],
        "parts": parts,
        "routes": routes,
        "spread": spread,
    }
    if as_json:
        write_json(payload)
        return 0

    label = f"τ_{fl}" if isinstance(fl, int) else "general α"
    _banner(f"Hamiltonian — genus {g}, flow {label}")
    for name, v in routes.items():
        print(f"  {name:<18s} {_fmt(v)}")
    if parts:
        print("\n  Breakdown:")
        for name, v in parts.items():
            print(f"    {name:<16s} {_fmt(v)}")
    icon = "✅" if spread <= config.threshold("ham_two_forms") * max(1.0, abs(values[0])) else "⚠️ "
    print(f"\n  {icon} route spread {spread:.2e}")
    return 0


def cmd_evolve(
    g: int,
    flow: int,
    to: str,
    steps: int = 100,
    tau: str | None = None,
    start: str | None = None,
    out: str | None = None,
    seed: int = config.DEFAULT_SEED,
    as_json: bool = False,
) -> int:
    """Integrate the τ_k flow in symmetric coordinates; optional CSV + JSON sidecar."""
    if g < 1:
        raise ValueError("evolve needs genus ≥ 1")
    rng = np.random.default_rng(seed)
    tau0 = parse_tau(tau, g)
    rt = ReducedTimes.canonical(tau0) if tau0 is not None else random_canonical(rng, g)
    pt = _point(g, parse_point(start, "from"), rng)
    spt = pt if isinstance(pt, SymmetricPoint) else to_symmetric(pt)
    tau_end = parse_complex(to, "to")

    try:
        traj = integrate(flow, rt, spt, tau_end, steps)
    except StepFailure as e:
        if e.tau is not None:
            print(f"⚠️  last good τ_{flow} = {_fmt(e.tau)}", file=sys.stderr)
        raise

    diagnostics = {
        "curve": trajectory_curve_residual(traj, rt),
    }
    if len(traj.grid) >= 5:
        diagnostics["energy_balance"] = verify_energy_balance(traj, rt)
    if g == 1 and len(traj.grid) >= 3:
        diagnostics["painleve_numeric"] = verify_painleve1(traj, rt.hbar, "numeric")
    payload = {
        "genus": g,
        "flow": flow,
        "start": spt.to_json(),
        "final": traj.final.to_json(),
        "tau": [traj.grid[0], traj.grid[-1]],
        "meta": {k: v for k, v in traj.meta.items() if k != "richardson"},
        "diagnostics": diagnostics,
    }
    if out:
        path = Path(out)
        write_trajectory_csv(traj, path)
        sidecar = Path(f"{out}.json")
        with sidecar.open("w") as fh:
            write_json({**payload, "richardson": traj.meta["richardson"]}, fh)
        logger.debug("wrote %s and %s", path, sidecar)
        payload["csv"] = str(path)

    if as_json:
        write_json(payload)
        return 0

    _banner(f"τ_{flow} flow — genus {g}, {steps} RK4 steps")
    print(f"  τ_{flow}: {_fmt(traj.grid[0])} → {_fmt(traj.grid[-1])}")
    print(f"  Q = [{', '.join(_fmt(x) for x in traj.final.Q)}]")
    print(f"  P = [{', '.join(_fmt(x) for x in traj.final.P)}]")
    print(f"\n  📊 Richardson error estimate : {traj.meta['error_estimate']:.2e}")
    print(f"  📊 on-curve residual         : {diagnostics['curve']['residual']:.2e}"
          f" ({diagnostics['curve']['skipped']} collision(s) skipped)")
    if "energy_balance" in diagnostics:
        print(f"  📊 energy balance            : {diagnostics['energy_balance']:.2e}")
    if "painleve_numeric" in diagnostics:
        print(f"  📊 Painlevé 1 residual       : {diagnostics['painleve_numeric']:.2e}")
    if out:
        print(f"\n  📁 CSV → {out}  (diagnostics → {out}.json)")
    return 0


def cmd_verify(
    group: str,
    g: int = 2,
    seed: int = config.DEFAULT_SEED,
    jobs: int = 1,
    as_json: bool = False,
) -> int:
    """Run a verification group (or ``all``) and print the report table."""
    try:
        tol = load_tolerances()
    except (KeyError, OSError) as e:
        raise ValueError(f"tolerance override rejected: {e}") from e
    results = run_battery(group, g, seed=seed, jobs=jobs, tol=tol)
    return emit_report(
        results, as_json=as_json, title=f"group {group} | g = {g} | seed = {seed}"
    )


# ── Worked examples ─────────────────────────────────────────────────────


def _dist(a, b) -> float:
    return abs(complex(a) - complex(b))


def _example_airy() -> dict:
    t = IrregularTimes.canonical(())
    pt = DarbouxPoint((), ())
    L = build_L(t, pt).to_poly("L")
    P1, P2 = spectral_curve(t, pt)
    return {
        "name": "airy",
        "genus": 0,
        "times": times_to_json(t),
        "L": L,
        "curve": {"P1": P1, "P2": P2, "equation": "y^2 = lambda"},
        "checks": {
            "companion": L.distance(Mat2(0.0, 1.0, Poly((0j, 1.0)), 0.0)),
            "curve": P1.distance(Poly(())) + P2.distance(Poly((0j, -1.0))),
        },
    }


def _example_p1(rt: ReducedTimes, spt: SymmetricPoint) -> dict:
    tau, q, p = rt.tau[0], spt.Q[0], spt.P[0]
    Lt = build_Ltilde_symmetric(rt, spt)
    At = build_Atilde_symmetric(1, rt, spt)
    ham = symmetric_hamiltonian(1, rt, spt)

    def value(qq, pp, tt):
        return symmetric_hamiltonian(
            1, ReducedTimes.canonical((tt,), rt.hbar), SymmetricPoint((qq,), (pp,))
        ).value

    a = value(0.0, 1.0, 0.0)
    b = value(1.0, 0.0, 0.0)
    c = value(1.0, 0.0, 1.0) - b
    fit = a * p * p + b * q**3 + c * tau * q
    exact = verify_painleve1(Trajectory(1, (tau,), (spt,)), rt.hbar, "exact")
    return {
        "name": "p1",
        "genus": 1,
        "tau": tau,
        "point": spt.to_json(),
        "Ltilde": Lt,
        "Atilde": At,
        "ham": ham.value,
        "ham_coefficients": {"p^2": a, "q^3": b, "tau*q": c},
        "checks": {
            "Ltilde": Lt.distance(
                Mat2(p, Poly((-q, 1.0)), Poly((q * q + 2 * tau, q, 1.0)), -p)
            ),
            "Atilde": At.distance(Mat2(0.0, 2.0, Poly((4 * q, 2.0)), 0.0)),
            "ham_coefficients": max(_dist(a, 2), _dist(b, -2), _dist(c, -4)),
            "ham_fit": _dist(fit, ham.value),
            "painleve": exact,
        },
    }


def _ham_tau2_g2(rt: ReducedTimes, spt: SymmetricPoint, q1_power: int):
    Q1, Q2 = spt.Q
    P1, P2 = spt.P
    t1, t2 = rt.tau
    body = (
        -P2 * P2 * Q1
        - 2 * P1 * P2
        - Q1**4
        + 3 * Q1**q1_power * Q2
        - Q2 * Q2
        + 2 * (Q2 - Q1 * Q1) * t1
        - 2 * Q1 * t2
    )
    return 2 * body


def _example_g2(rt: ReducedTimes, spt: SymmetricPoint) -> dict:
    Q1, Q2 = spt.Q
    P1, P2 = spt.P
    t1, t2 = rt.tau
    hbar = rt.hbar
    Lt = build_Ltilde_symmetric(rt, spt)
    At = {k: build_Atilde_symmetric(k, rt, spt) for k in (1, 2)}
    ham = {k: symmetric_hamiltonian(k, rt, spt).value for k in (1, 2)}
    nu = {k: [nu_reduced(k, i, rt) for i in (1, 2)] for k in (1, 2)}

    ham1 = (2 / 3) * (
        P2 * P2 * (Q1 * Q1 - Q2)
        + P1 * P1
        + 2 * P1 * P2 * Q1
        + hbar * P2
        + Q1 * Q2 * (Q1 * Q1 - 2 * Q2 + 2 * t1)
        + 2 * t2 * Q2
    )
    readings = {
        "3Q1^2Q2": _dist(_ham_tau2_g2(rt, spt, 2), ham[2]),
        "3Q1^3Q2": _dist(_ham_tau2_g2(rt, spt, 3), ham[2]),
    }
    L21 = Poly(
        (
            -P2 * P2 + Q1 * (Q1 * Q1 - 2 * Q2) + 2 * Q1 * t1 + 2 * t2,
            Q1 * Q1 - Q2 + 2 * t1,
            Q1,
            1.0,
        )
    )
    return {
        "name": "g2",
        "genus": 2,
        "tau": list(rt.tau),
        "point": spt.to_json(),
        "Ltilde": Lt,
        "Atilde": {f"tau{k}": m for k, m in At.items()},
        "ham": {f"tau{k}": v for k, v in ham.items()},
        "nu": {f"tau{k}": v for k, v in nu.items()},
        "ham_tau2_reading": min(readings, key=readings.get),
        "checks": {
            "Ltilde11": Lt.a11.distance(Poly((P1 + Q1 * P2, -P2))),
            "Ltilde12": Lt.a12.distance(Poly((Q2, -Q1, 1.0))),
            "Ltilde21": Lt.a21.distance(L21),
            "Atilde_tau2": At[2].distance(Mat2(0.0, 2.0, Poly((4 * Q1, 2.0)), 0.0)),
            "nu": max(
                _dist(nu[1][0], 2 / 3), _dist(nu[1][1], 0), _dist(nu[2][0], 0),
                _dist(nu[2][1], 2),
            ),
            "ham_tau1": _dist(ham1, ham[1]),
            "ham_tau2": min(readings.values()),
            "ham_tau2_readings": readings,
        },
    }


def _example_g3(rt: ReducedTimes, spt: SymmetricPoint) -> dict:
    Q1, Q2, Q3 = spt.Q
    P1, P2, P3 = spt.P
    t1, t2, t3 = rt.tau
    t = irregular_from_reduced(rt)
    H = H_symmetric(t, spt.Q, spt.P, rt.hbar).H
    Lt = build_Ltilde_symmetric(rt, spt)
    At = {k: build_Atilde_symmetric(k, rt, spt) for k in (1, 2, 3)}
    ham = {k: symmetric_hamiltonian(k, rt, spt).value for k in (1, 2, 3)}
    expected = {
        1: 0.4 * H[0] - 0.4 * t1 * H[2],
        2: (2 / 3) * H[1],
        3: 2 * H[2],
    }
    L11 = Poly((P1 + Q2 * P3 + Q1 * P2, -(P2 + Q1 * P3), P3))
    L21 = Poly(
        (
            2 * P2 * P3
            + Q1 * P3 * P3
            + Q1**4
            - 3 * Q2 * Q1 * Q1
            + 2 * Q3 * Q1
            + Q2 * Q2
            + t1 * t1
            + 2 * (Q1 * Q1 - Q2) * t1
            + 2 * Q1 * t2
            + 2 * t3,
            -P3 * P3 + Q1**3 + Q3 - 2 * Q1 * Q2 + 2 * Q1 * t1 + 2 * t2,
            Q1 * Q1 - Q2 + 2 * t1,
            Q1,
            1.0,
        )
    )
    return {
        "name": "g3",
        "genus": 3,
        "tau": list(rt.tau),
        "point": spt.to_json(),
        "Ltilde": Lt,
        "Atilde": {f"tau{k}": m for k, m in At.items()},
        "ham": {f"tau{k}": v for k, v in ham.items()},
        "isospectral": list(H),
        "checks": {
            "Ltilde11": Lt.a11.distance(L11),
            "Ltilde12": Lt.a12.distance(Poly((-Q3, Q2, -Q1, 1.0))),
            "Ltilde21": Lt.a21.distance(L21),
            "Atilde_tau3": At[3].distance(Mat2(0.0, 2.0, Poly((4 * Q1, 2.0)), 0.0)),
            **{f"ham_tau{k}": _dist(expected[k], ham[k]) for k in (1, 2, 3)},
        },
    }


_EXAMPLE_DEFAULTS = {
    "p1": ((0.3,), SymmetricPoint((0.7,), (-0.4,))),
    "g2": ((0.2, -0.1), SymmetricPoint((0.5, -0.3), (0.25, 0.6))),
    "g3": ((0.1, 0.2, -0.15), SymmetricPoint((0.4, -0.2, 0.1), (0.3, -0.5, 0.2))),
}


def cmd_example(name: str, tau: str | None = None, point: str | None = None) -> int:
    """Worked canonical examples as JSON: airy (g=0), p1 (g=1), g2, g3."""
    if name == "airy":
        write_json(_example_airy())
        return 0
    if name not in _EXAMPLE_DEFAULTS:
        raise ValueError(f"unknown example '{name}'")
    tau0, spt = _EXAMPLE_DEFAULTS[name]
    g = len(tau0)
    rt = ReducedTimes.canonical(parse_tau(tau, g) or tau0)
    given = parse_point(point)
    if given is not None:
        if given.genus != g:
            raise ValueError(f"example {name} needs a genus-{g} point")
        spt = given if isinstance(given, SymmetricPoint) else to_symmetric(given)
    build = {"p1": _example_p1, "g2": _example_g2, "g3": _example_g3}[name]
    write_json(build(rt, spt))
    return 0


# ── Dispatch ────────────────────────────────────────────────────────────


def _route(args) -> int:
    if args.command == "construct":
        return cmd_construct(
            g=args.g,
            tau=args.tau,
            point=args.point,
            times=args.times,
            canonical=args.canonical,
            flow=args.flow,
            seed=args.seed,
            as_json=args.json,
        )
    if args.command == "hamiltonian":
        return cmd_hamiltonian(
            g=args.g,
            flow=args.flow,
            tau=args.tau,
            point=args.point,
            times=args.times,
            canonical=args.canonical,
            symmetric=args.symmetric,
            seed=args.seed,
            as_json=args.json,
        )
    if args.command == "evolve":
        return cmd_evolve(
            g=args.g,
            flow=args.flow,
            to=args.to,
            steps=args.steps,
            tau=args.tau,
            start=args.start,
            out=args.out,
            seed=args.seed,
            as_json=args.json,
        )
    if args.command == "verify":
        return cmd_verify(
            group=args.group, g=args.g, seed=args.seed, jobs=args.jobs, as_json=args.json
        )
    if args.command == "example":
        return cmd_example(name=args.name, tau=args.tau, point=args.point)
    raise ValueError(f"unknown command '{args.command}'")


def dispatch(args) -> int:
    """Run the parsed command; 0 success, 1 domain error, 2 usage error."""
    try:
        return _route(args)
    except P1LabError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"❌ usage: {e}", file=sys.stderr)
        return 2
