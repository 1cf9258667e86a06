"""Command-line front end: subcommand dispatch and machine-readable reports.

Every subcommand emits a JSON report with the schema

    {"version", "subcommand", "inputs", "checks", "pass"}

where ``checks`` is a list of ``{"name", "anchor", "value", "tolerance",
"pass"}`` records; the anchor names the physics claim a check verifies.
Reports are deterministic for a fixed configuration (sorted keys, no
timestamps, round-trip float formatting) and artifacts are written
atomically.  Exit codes: 0 all checks pass, 1 check failure, 2 usage
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__, dynamics, spectra, variational
from .phasespace import (MAP_NAMES, build_hamiltonian, build_map,
                         transform_equals, verify_symplectic)
from .spectra import SpectrumParams


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    anchor: str
    value: object
    tolerance: object
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "value": self.value,
                "tolerance": self.tolerance, "pass": self.passed}


@dataclass
class Report:
    subcommand: str
    inputs: dict
    checks: list = field(default_factory=list)

    def add(self, name: str, anchor: str, value, tolerance, passed: bool):
        self.checks.append(Check(name, anchor, value, tolerance, bool(passed)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


@dataclass
class RunConfig:
    """Resolved subcommand configuration; round-trips through JSON."""

    subcommand: str
    options: dict

    def canonical_json(self) -> str:
        return json.dumps({"subcommand": self.subcommand,
                           "options": self.options}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        return cls(subcommand=data["subcommand"], options=dict(data["options"]))


def write_text_atomic(text: str, path: str):
    """Write via a sibling temp file and rename, so readers never see
    partial artifacts."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".puosc-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(report: Report, args) -> int:
    payload = report.to_json() + "\n"
    if getattr(args, "out", None):
        write_text_atomic(payload, args.out)
    sys.stdout.write(payload)
    return 0 if report.passed else 1


def _num(text, mode: str):
    """Parse a frequency/parameter in the requested arithmetic mode."""
    return Fraction(str(text)) if mode == "rational" else float(text)


def _floats(csv_text: str):
    return [float(tok) for tok in str(csv_text).split(",") if tok != ""]


# ---------------------------------------------------------------------------
# verify subcommands
# ---------------------------------------------------------------------------

def _cmd_verify_eigen(args) -> Report:
    tol = args.tol
    exact = args.mode == "rational"
    params = SpectrumParams(_num(args.omega1, args.mode),
                            _num(args.omega2, args.mode))
    rep = Report("verify eigen", {
        "omega1": float(params.omega1), "omega2": float(params.omega2),
        "nmax": args.nmax, "mode": args.mode, "tol": tol})
    results = spectra.eigen_suite("ghost", params, args.nmax, exact=exact)
    worst = max(r.residual for r in results)
    rep.add("ghost-eigenfunction-residuals", "ghost-spectrum-eigenfunctions",
            worst, tol, worst <= tol)
    return rep


def _cmd_verify_positive(args) -> Report:
    tol = args.tol
    exact = args.mode == "rational"
    params = SpectrumParams(_num(args.omega1, args.mode),
                            _num(args.omega2, args.mode))
    rep = Report("verify positive", {
        "omega1": float(params.omega1), "omega2": float(params.omega2),
        "nmax": args.nmax, "eq_nmax": args.eq_nmax,
        "omega_eq": float(_num(args.omega_eq, args.mode)),
        "mode": args.mode, "tol": tol})
    results = spectra.eigen_suite("positive", params, args.nmax, exact=exact)
    worst = max(r.residual for r in results)
    rep.add("positive-family-residuals", "positive-realization-polynomials",
            worst, tol, worst <= tol)

    # equal-frequency limit in the (x, y) operator form
    from .polyalg import MultiPoly, hermite, scalar_tools
    om = _num(args.omega_eq, args.mode)
    num, sqrt_, _ = scalar_tools(exact)
    z = MultiPoly.linear({"x": sqrt_(om), "y": sqrt_(om) * num(om)},
                         spectra.XY, exact)
    o_xy = spectra.build_operator("O_xy", omega1=om, omega2=om, exact=exact)
    worst_eq = 0.0
    for n in range(args.eq_nmax + 1):
        hn = hermite(n, z)
        dev = (o_xy.apply(hn) - hn * (om * (n + 1))).max_norm()
        worst_eq = max(worst_eq, dev)
    rep.add("equal-frequency-xy-eigenvalues", "equal-frequency-limit",
            worst_eq, tol, worst_eq <= tol)

    # informational: the single-variable operator form scales as 2N+1,
    # not N+1; recorded, never asserted against the spectrum
    o_eq = spectra.build_operator("O_eq", omega=om, exact=exact)
    zvar = MultiPoly.var("z", ("z",), exact)
    factors = []
    for n in range(1, args.eq_nmax + 1):
        hn = hermite(n, zvar)
        dev = (o_eq.apply(hn) - hn * (om * (2 * n + 1))).max_norm()
        factors.append(dev)
    rep.add("z-form-eigenvalue-2n-plus-1 (informational)",
            "equal-frequency-limit", max(factors), None, True)
    return rep


def _cmd_verify_identities(args) -> Report:
    rep = Report("verify identities", {"nmax": args.nmax,
                                       "expmax": args.expmax,
                                       "mode": "rational"})
    ok_sum = all(spectra.hermite_sum_identity(n, m)
                 for n in range(args.nmax + 1)
                 for m in range(args.nmax + 1 - n))
    rep.add("hermite-product-expansion", "hermite-sum-identity",
            bool(ok_sum), "exact", ok_sum)
    ok_exp = all(spectra.exp_hermite_identity(n)
                 for n in range(args.expmax + 1))
    rep.add("gaussian-smoothing-of-powers", "exp-derivative-hermite-identity",
            bool(ok_exp), "exact", ok_exp)
    return rep


def _cmd_verify_commutator(args) -> Report:
    exact = args.mode == "rational"
    omegas = [_num(tok, args.mode) for tok in str(args.omegas).split(",")]
    rep = Report("verify commutator", {"omegas": [float(o) for o in omegas],
                                       "mode": args.mode, "tol": args.tol})
    for om in omegas:
        dev = spectra.commutator_check(om, exact=exact)
        rep.add(f"charge-commutes-at-omega-{float(om):g}",
                "angular-momentum-conservation", dev, args.tol,
                dev <= args.tol)
    return rep


def _parse_pairs(text: str, mode: str):
    pairs = []
    for tok in str(text).split(","):
        if not tok:
            continue
        a, b = tok.split(":")
        pairs.append((_num(a, mode), _num(b, mode)))
    return pairs


def _random_rational_pairs(count: int, seed: int):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        om1 = Fraction(rng.randint(2, 40), rng.randint(1, 8))
        om2 = Fraction(rng.randint(1, 30), rng.randint(1, 8))
        if om1 > om2 > 0:
            out.append((om1, om2))
    return out


def _cmd_verify_maps(args) -> Report:
    exact = args.mode == "rational"
    pairs = _parse_pairs(args.pairs, args.mode) if args.pairs else []
    if args.random_pairs:
        if not exact:
            raise ValueError("random pairs are drawn as rationals; "
                             "use --mode rational")
        pairs += _random_rational_pairs(args.random_pairs, args.seed)
    if not pairs:
        raise ValueError("no frequency pairs given")
    tol = args.tol
    if not exact and tol == 0.0:
        tol = 1e-12       # float arithmetic cannot promise exact zeros
    rep = Report("verify maps", {
        "pairs": [[float(a), float(b)] for a, b in pairs],
        "mode": args.mode, "tol": tol,
        "random_pairs": args.random_pairs, "seed": args.seed})
    worst_sym = 0.0
    for om1, om2 in pairs:
        for name in MAP_NAMES:
            m = (build_map(name, om1, exact=exact) if name == "rotation"
                 else build_map(name, om1, om2, exact=exact))
            worst_sym = max(worst_sym, verify_symplectic(m).max_deviation)
    rep.add("all-maps-symplectic", "canonical-map-symplecticity",
            worst_sym, tol, worst_sym <= tol)

    worst = {"diag": 0.0, "rotation": 0.0, "complexified": 0.0}
    for om1, om2 in pairs:
        pu = build_hamiltonian("pu", omega1=om1, omega2=om2, exact=exact)
        ghost = build_hamiltonian("pu_diag_ghost", omega1=om1, omega2=om2,
                                  exact=exact)
        worst["diag"] = max(worst["diag"], transform_equals(
            pu, build_map("diag", om1, om2, exact=exact), ghost))
        htild = build_hamiltonian("htild", omega=om1, exact=exact)
        hprime = build_hamiltonian("hprime", omega=om1, exact=exact)
        worst["rotation"] = max(worst["rotation"], transform_equals(
            htild, build_map("rotation", om1, exact=exact), hprime))
        dpos = build_hamiltonian("diag_positive", omega1=om1, omega2=om2,
                                 exact=exact)
        rot = build_hamiltonian("rot", omega1=om1, omega2=om2, exact=exact)
        worst["complexified"] = max(worst["complexified"], transform_equals(
            dpos, build_map("complexified", om1, om2, exact=exact), rot))
    rep.add("ghost-form-diagonalization", "hamiltonian-diagonalization",
            worst["diag"], tol, worst["diag"] <= tol)
    rep.add("rotation-frame-equivalence", "rotation-frame-equivalence",
            worst["rotation"], tol, worst["rotation"] <= tol)
    rep.add("complex-map-diagonalization", "complex-diagonalization",
            worst["complexified"], tol, worst["complexified"] <= tol)
    return rep


def _cmd_verify_descendants(args) -> Report:
    exact = args.mode == "rational"
    om = _num(args.omega, args.mode)
    rep = Report("verify descendants", {"omega": float(om), "tol": args.tol,
                                        "mode": args.mode})
    worst = 0.0
    for order in (0, 1, 2):
        fn = spectra.descendant(order, om, exact=exact)
        worst = max(worst, spectra.descendant_time_residual(fn, om, exact=exact))
    rep.add("jordan-level-descendants", "nonstationary-descendants",
            worst, args.tol, worst <= args.tol)
    worst_free = 0.0
    for order in spectra.FREE_DESCENDANT_ORDERS:
        fn = spectra.free_descendant(order, exact=exact)
        worst_free = max(worst_free,
                         spectra.free_descendant_time_residual(fn, exact=exact))
    rep.add("free-particle-descendants", "free-particle-descendants",
            worst_free, args.tol, worst_free <= args.tol)
    return rep


# ---------------------------------------------------------------------------
# spectral scans
# ---------------------------------------------------------------------------

def _cmd_continuum_residual(args) -> Report:
    orders = [int(t) for t in str(args.orders).split(",")]
    rep = Report("continuum residual", {
        "l": args.l, "k": args.k, "omega": args.omega, "orders": orders,
        "ratio_tol": args.ratio_tol})
    residuals = {}
    for m in orders:
        r = spectra.continuum_eigenfunction(args.l, args.k, args.omega, m)
        residuals[m] = r.residual
        rep.add(f"residual-at-truncation-{m}", "continuum-series-truncation",
                r.residual, None, True)
    lo, hi = min(orders), max(orders)
    ratio = residuals[hi] / residuals[lo] if residuals[lo] > 0 else 0.0
    rep.add("tail-dominated-decrease", "continuum-series-truncation",
            ratio, args.ratio_tol, ratio <= args.ratio_tol)
    return rep


def _cmd_spectrum_density(args) -> Report:
    res = spectra.density_scan(args.omega1, args.omega2, args.target, args.nmax)
    rep = Report("spectrum density", {
        "omega1": args.omega1, "omega2": args.omega2,
        "target": args.target, "nmax": args.nmax})
    rep.add("minimum-gap", "dense-point-spectrum", res.min_gap, None, True)
    rep.add("minimizer", "dense-point-spectrum", [res.n, res.m], None, True)
    if args.expect is not None:
        ok = abs(res.min_gap - args.expect) <= args.expect_tol
        rep.add("gap-matches-expected", "dense-point-spectrum",
                res.min_gap, args.expect_tol, ok)
    return rep


def _cmd_jordan_demo(args) -> Report:
    a = complex(args.a)
    b = complex(args.b)
    t = args.t
    rep = Report("jordan demo", {"a": str(args.a), "b": str(args.b), "t": t,
                                 "tol": args.tol})
    val = spectra.jordan_norm_sq(a, b, t, "euclidean")
    closed = abs(a - 1j * b * t) ** 2 + abs(b) ** 2
    dev = abs(val - closed)
    rep.add("euclidean-norm-growth", "jordan-block-norm-growth",
            dev, args.tol, dev <= args.tol)
    devs = [abs(spectra.jordan_norm_sq(a, b, tt, "degenerate") - abs(b) ** 2)
            for tt in np.linspace(0.0, max(t, 1.0), 11)]
    rep.add("degenerate-metric-constancy", "degenerate-metric-unitarity",
            max(devs), args.tol, max(devs) <= args.tol)
    return rep


def _cmd_gram_limit(args) -> Report:
    deltas = _floats(args.deltas)
    values = spectra.gram_minimum_singular_values(args.level, deltas,
                                                  args.base_omega)
    rep = Report("gram limit", {"level": args.level, "deltas": deltas,
                                "base_omega": args.base_omega})
    rep.add("singular-values", "exceptional-point-coalescence",
            values, None, True)
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    rep.add("strictly-decreasing-toward-coalescence",
            "exceptional-point-coalescence", bool(decreasing), None,
            args.level == 0 or decreasing)
    return rep


# ---------------------------------------------------------------------------
# classical subcommands
# ---------------------------------------------------------------------------

def _system_from_args(args) -> dynamics.SystemSpec:
    params = {}
    if args.system in ("pu", "pu_quartic", "diag_ghost_plus_V1",
                       "diag_ghost_plus_V2"):
        if args.omega1 is None or args.omega2 is None:
            raise ValueError(f"{args.system} needs --omega1 and --omega2")
        params["omega1"] = args.omega1
        params["omega2"] = args.omega2
    else:
        if args.omega is None:
            raise ValueError(f"{args.system} needs --omega")
        params["omega"] = args.omega
    if args.system == "pu_quartic":
        params.update(alpha=args.alpha, beta=args.beta, gamma=args.gamma)
    if args.system in ("diag_ghost_plus_V1", "diag_ghost_plus_V2", "robert",
                       "robert_gamma"):
        params["lam"] = args.lam
    if args.system == "robert_gamma":
        params["gamma"] = args.gamma
    return dynamics.make_system(args.system, **params)


def _cmd_classical_run(args) -> Report:
    spec = _system_from_args(args)
    ic = _floats(args.ic)
    traj, verdict = dynamics.integrate(spec, ic, args.t_end,
                                       rtol=args.rtol, atol=args.atol)
    rep = Report("classical run", {
        "system": args.system, "params": {k: float(v)
                                          for k, v in spec.params.items()},
        "ic": ic, "t_end": args.t_end, "rtol": args.rtol, "atol": args.atol,
        "tol_energy": args.tol_energy})
    rep.add("outcome", "classical-trajectory", verdict.outcome, None, True)
    if verdict.collapsed:
        rep.add("escape-time-estimate", "finite-time-escape",
                verdict.escape_time, None, verdict.escape_time is not None)
    else:
        drift = traj.energy_drift()
        bound = args.tol_energy * (1 + abs(float(traj.energies[0])))
        rep.add("energy-drift", "energy-conservation", drift, bound,
                drift <= bound)
    if args.csv:
        dynamics_text = "\n".join(dynamics.trajectory_csv_lines(traj)) + "\n"
        write_text_atomic(dynamics_text, args.csv)
    return rep


def _cmd_classical_scan(args) -> Report:
    spec = _system_from_args(args)
    grid = np.linspace(-args.extent, args.extent, args.cells)
    res = dynamics.stability_scan(spec, grid, grid, args.t_probe,
                                  rtol=args.rtol, atol=args.atol)
    rep = Report("classical scan", {
        "system": args.system, "params": {k: float(v)
                                          for k, v in spec.params.items()},
        "extent": args.extent, "cells": args.cells, "t_probe": args.t_probe,
        "rtol": args.rtol})
    i0 = int(np.argmin(np.abs(res.q_values)))
    j0 = int(np.argmin(np.abs(res.x_values)))
    rep.add("origin-cell-bounded", "stability-island",
            bool(res.bounded[i0, j0]), None, bool(res.bounded[i0, j0]))
    rep.add("bounded-fraction", "stability-island",
            float(res.bounded.mean()), None, True)
    rep.add("island-cells", "stability-island",
            int(res.island.sum()), None, True)
    rep.add("collapsed-cells", "finite-time-escape",
            int((~res.bounded).sum()), None, True)
    if args.out_grid:
        payload = json.dumps({
            "q_values": [float(v) for v in res.q_values],
            "x_values": [float(v) for v in res.x_values],
            "bounded": res.bounded.astype(int).tolist(),
            "island": res.island.astype(int).tolist(),
        }, sort_keys=True, indent=2) + "\n"
        write_text_atomic(payload, args.out_grid)
    return rep


def _cmd_classical_envelope(args) -> Report:
    spec = _system_from_args(args)
    ic = _floats(args.ic)
    traj, verdict = dynamics.integrate(spec, ic, args.t_end,
                                       rtol=args.rtol, atol=args.atol)
    rep = Report("classical envelope", {
        "system": args.system, "params": {k: float(v)
                                          for k, v in spec.params.items()},
        "ic": ic, "t_end": args.t_end, "window": args.window,
        "rtol": args.rtol, "min_correlation": args.min_correlation})
    rep.add("outcome", "classical-trajectory", verdict.outcome, None,
            not verdict.collapsed)
    if verdict.collapsed:
        return rep
    fit = dynamics.envelope_growth(traj, args.window)
    rep.add("envelope-slope", "linear-amplitude-growth", fit.slope, None,
            fit.slope > 0)
    rep.add("envelope-correlation", "linear-amplitude-growth",
            fit.correlation, args.min_correlation,
            fit.correlation > args.min_correlation)
    return rep


# ---------------------------------------------------------------------------
# variational subcommands
# ---------------------------------------------------------------------------

def _cmd_variational_check(args) -> Report:
    rep = Report("variational check", {
        "alpha": args.alpha, "beta": args.beta, "gamma": args.gamma,
        "omega": args.omega, "sets": args.sets, "seed": args.seed,
        "tol": args.tol})
    rng = np.random.default_rng(args.seed)
    worst_e = 0.0
    worst_g = 0.0
    for _ in range(args.sets):
        a, c = rng.uniform(0.3, 4.0, 2)
        b = rng.uniform(-2.0, 2.0)
        p = variational.AnsatzParams(a, b, c, alpha=args.alpha,
                                     beta=args.beta, gamma=args.gamma,
                                     omega=args.omega)
        e1 = variational.energy_closed_form(p)
        e2 = variational.energy_quadrature(p)
        worst_e = max(worst_e, abs(e1 - e2) / max(1.0, abs(e1)))
        grad = variational.gradient(p)
        fd = _fd_gradient(p)
        for gi, fi in zip(grad, fd):
            worst_g = max(worst_g, abs(gi - fi) / max(1.0, abs(gi)))
    rep.add("closed-form-vs-quadrature", "variational-energy-formula",
            worst_e, args.tol, worst_e <= args.tol)
    rep.add("gradient-vs-finite-differences", "variational-gradient",
            worst_g, args.tol, worst_g <= args.tol)
    return rep


def _fd_gradient(p, h=1e-5):
    base = {"A": p.A, "B": p.B, "C": p.C, "alpha": p.alpha, "beta": p.beta,
            "gamma": p.gamma, "omega": p.omega}
    out = []
    for name in ("A", "B", "C"):
        up = dict(base)
        dn = dict(base)
        up[name] += h
        dn[name] -= h
        e_up = variational.energy_closed_form(variational.AnsatzParams(**up))
        e_dn = variational.energy_closed_form(variational.AnsatzParams(**dn))
        out.append((e_up - e_dn) / (2 * h))
    return out


def _cmd_variational_descend(args) -> Report:
    rep = Report("variational descend", {
        "alpha": args.alpha, "beta": args.beta, "gamma": args.gamma,
        "omega": args.omega, "threshold": args.threshold})
    cert = variational.unbounded_search(args.alpha, args.beta, args.gamma,
                                        args.omega, args.threshold)
    rep.add("terminal-energy", "energy-unbounded-below",
            cert.terminal_energy, args.threshold,
            cert.terminal_energy <= args.threshold)
    rep.add("strictly-decreasing-path", "energy-unbounded-below",
            bool(cert.monotone()), None, cert.monotone())
    rep.add("path-length", "energy-unbounded-below",
            len(cert.path), None, True)
    if args.cert:
        payload = json.dumps(cert.to_dict(), sort_keys=True, indent=2) + "\n"
        write_text_atomic(payload, args.cert)
    return rep


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="puosc",
        description="Verification toolkit for the Pais-Uhlenbeck oscillator")
    parser.add_argument("--config", default=None,
                        help="JSON file of option defaults; flags override")
    top = parser.add_subparsers(dest="group", required=True)

    def add(sub, name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=fn)
        p.add_argument("--out", default=None, help="report JSON path")
        return p

    verify = top.add_parser("verify").add_subparsers(dest="what",
                                                     required=True)
    p = add(verify, "eigen", _cmd_verify_eigen)
    p.add_argument("--omega1", default="3")
    p.add_argument("--omega2", default="1")
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--mode", choices=("float", "rational"), default="float")
    p.add_argument("--tol", type=float, default=1e-9)

    p = add(verify, "positive", _cmd_verify_positive)
    p.add_argument("--omega1", default="2")
    p.add_argument("--omega2", default="1")
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--eq-nmax", type=int, default=12)
    p.add_argument("--omega-eq", default="1")
    p.add_argument("--mode", choices=("float", "rational"), default="float")
    p.add_argument("--tol", type=float, default=1e-12)

    p = add(verify, "identities", _cmd_verify_identities)
    p.add_argument("--nmax", type=int, default=14,
                   help="verify the product expansion for all n+m <= nmax")
    p.add_argument("--expmax", type=int, default=20)
    p.add_argument("--mode", choices=("rational",), default="rational")

    p = add(verify, "commutator", _cmd_verify_commutator)
    p.add_argument("--omegas", default="1,2")
    p.add_argument("--mode", choices=("float", "rational"), default="rational")
    p.add_argument("--tol", type=float, default=1e-12)

    p = add(verify, "maps", _cmd_verify_maps)
    p.add_argument("--pairs", default="3:1,2:1",
                   help="comma-separated omega1:omega2 pairs")
    p.add_argument("--random-pairs", type=int, default=0)
    p.add_argument("--seed", type=int, default=20259)
    p.add_argument("--mode", choices=("float", "rational"), default="rational")
    p.add_argument("--tol", type=float, default=0.0)

    p = add(verify, "descendants", _cmd_verify_descendants)
    p.add_argument("--omega", default="1")
    p.add_argument("--mode", choices=("float", "rational"), default="float")
    p.add_argument("--tol", type=float, default=1e-12)

    continuum = top.add_parser("continuum").add_subparsers(dest="what",
                                                           required=True)
    p = add(continuum, "residual", _cmd_continuum_residual)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--orders", default="5,10,20")
    p.add_argument("--ratio-tol", type=float, default=1e-6)

    spectrum = top.add_parser("spectrum").add_subparsers(dest="what",
                                                         required=True)
    p = add(spectrum, "density", _cmd_spectrum_density)
    p.add_argument("--omega1", type=float, default=math.sqrt(2))
    p.add_argument("--omega2", type=float, default=1.0)
    p.add_argument("--target", type=float, default=0.0)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--expect", type=float, default=None)
    p.add_argument("--expect-tol", type=float, default=1e-4)

    jordan = top.add_parser("jordan").add_subparsers(dest="what", required=True)
    p = add(jordan, "demo", _cmd_jordan_demo)
    p.add_argument("--a", default="0")
    p.add_argument("--b", default="1")
    p.add_argument("--t", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-14)

    gram = top.add_parser("gram").add_subparsers(dest="what", required=True)
    p = add(gram, "limit", _cmd_gram_limit)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--deltas", default="0.5,0.1,0.02")
    p.add_argument("--base-omega", type=float, default=1.0)

    classical = top.add_parser("classical").add_subparsers(dest="what",
                                                           required=True)

    def classical_common(p):
        p.add_argument("--system", required=True,
                       choices=dynamics.CLASSICAL_SYSTEMS)
        p.add_argument("--omega1", type=float, default=None)
        p.add_argument("--omega2", type=float, default=None)
        p.add_argument("--omega", type=float, default=None)
        p.add_argument("--alpha", type=float, default=0.0)
        p.add_argument("--beta", type=float, default=0.0)
        p.add_argument("--gamma", type=float, default=0.0)
        p.add_argument("--lam", type=float, default=0.0)
        p.add_argument("--rtol", type=float, default=1e-10)
        p.add_argument("--atol", type=float, default=1e-12)

    p = add(classical, "run", _cmd_classical_run)
    classical_common(p)
    p.add_argument("--ic", required=True, help="comma-separated 4 components")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--tol-energy", type=float, default=1e-6)
    p.add_argument("--csv", default=None, help="trajectory CSV path")

    p = add(classical, "scan", _cmd_classical_scan)
    classical_common(p)
    p.add_argument("--extent", type=float, default=3.0)
    p.add_argument("--cells", type=int, default=9)
    p.add_argument("--t-probe", type=float, default=60.0)
    p.add_argument("--out-grid", default=None)
    p.set_defaults(rtol=1e-7, atol=1e-9)

    p = add(classical, "envelope", _cmd_classical_envelope)
    classical_common(p)
    p.add_argument("--ic", required=True)
    p.add_argument("--t-end", type=float, default=500.0)
    p.add_argument("--window", type=float, default=25.0)
    p.add_argument("--min-correlation", type=float, default=0.9)

    var = top.add_parser("variational").add_subparsers(dest="what",
                                                       required=True)
    p = add(var, "check", _cmd_variational_check)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--sets", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-6)

    p = add(var, "descend", _cmd_variational_descend)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=-1e6)
    p.add_argument("--cert", default=None, help="certificate JSON path")

    return parser


def run_config_from_args(args) -> RunConfig:
    options = {k: v for k, v in sorted(vars(args).items())
               if k not in ("handler", "group", "what", "config")
               and v is not None}
    sub = args.group + (" " + args.what if getattr(args, "what", None) else "")
    return RunConfig(subcommand=sub, options=options)


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)

    # first pass only to locate --config; its values become defaults
    if "--config" in argv:
        idx = argv.index("--config")
        try:
            with open(argv[idx + 1], "r", encoding="utf-8") as fh:
                defaults = json.load(fh)
        except OSError as err:
            print(f"error: cannot read config: {err}", file=sys.stderr)
            return 3
        except (IndexError, json.JSONDecodeError) as err:
            print(f"error: bad config: {err}", file=sys.stderr)
            return 2
        _apply_defaults(parser, defaults)

    args = parser.parse_args(argv)
    try:
        report = args.handler(args)
    except (ValueError, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: I/O failure: {err}", file=sys.stderr)
        return 3
    try:
        return _emit(report, args)
    except OSError as err:
        print(f"error: I/O failure: {err}", file=sys.stderr)
        return 3


def _apply_defaults(parser: argparse.ArgumentParser, defaults: dict):
    """Push config-file values into every (sub)parser that knows the key."""
    stack = [parser]
    while stack:
        p = stack.pop()
        known = {a.dest for a in p._actions}
        p.set_defaults(**{k: v for k, v in defaults.items() if k in known})
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())


if __name__ == "__main__":
    sys.exit(main())
