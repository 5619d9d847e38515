"""Scenario runner: declarative JSON configs to time-series CSV.

A scenario names an initial state, one bath per mode, a time grid and the
quantities to tabulate; ``--oracle`` adds independently computed reference
columns and absolute deviations.  Output is deterministic: the same config
always yields byte-identical CSV.

Exit codes: 0 success, 1 configuration error, 2 numerical/oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import acceptance
from . import channels as ch
from . import nongaussian as ng
from . import numerics as nm
from . import phase_space as ps
from . import two_mode as tm

__all__ = ["Scenario", "ResultTable", "load_scenario", "run_scenario",
           "emit", "main"]

_KINDS = ("single-gaussian", "cat", "fock", "psi01", "two-mode", "fidelity")
_QUANTITIES = ("purity", "entropy", "tau", "xi", "logneg", "mutual-info",
               "fidelity")
_ALLOWED = {
    "single-gaussian": {"purity", "entropy", "tau", "xi"},
    "cat": {"purity", "xi"},
    "fock": {"purity", "xi"},
    "psi01": {"purity"},
    "two-mode": {"purity", "entropy", "tau", "logneg", "mutual-info",
                 "fidelity"},
    "fidelity": {"fidelity", "logneg"},
}


class ConfigError(ValueError):
    """Invalid scenario configuration."""


@dataclass(frozen=True)
class Scenario:
    kind: str
    initial: dict
    baths: tuple[ch.BathParams, ...]
    times: np.ndarray
    quantities: tuple[str, ...]
    oracle: bool = False

    @property
    def channel(self) -> ch.ChannelSpec:
        return ch.ChannelSpec(self.baths)


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list[float]] = field(default_factory=list)

    def max_deviation(self) -> float | None:
        diff_idx = [i for i, c in enumerate(self.columns)
                    if c.endswith("_absdiff")]
        if not diff_idx:
            return None
        return max((row[i] for row in self.rows for i in diff_idx),
                   default=0.0)


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario: {exc}") from exc
    return parse_scenario(raw)


def parse_scenario(raw: dict) -> Scenario:
    _require(isinstance(raw, dict), "scenario must be a JSON object")
    kind = raw.get("kind")
    _require(kind in _KINDS, f"kind must be one of {_KINDS}")
    initial = raw.get("initial")
    _require(isinstance(initial, dict), "initial parameters are required")

    baths_raw = raw.get("baths")
    _require(isinstance(baths_raw, list) and baths_raw,
             "at least one bath is required")
    n_expected = 2 if kind in ("two-mode", "fidelity") else 1
    _require(len(baths_raw) == n_expected,
             f"kind {kind!r} requires exactly {n_expected} bath(s)")
    baths = []
    for item in baths_raw:
        _require(isinstance(item, dict) and "gamma" in item and "mu_inf" in item,
                 "each bath needs explicit gamma and mu_inf")
        try:
            baths.append(ch.BathParams(
                gamma=float(item["gamma"]), mu_inf=float(item["mu_inf"]),
                r_inf=float(item.get("r_inf", 0.0)),
                phi_inf=float(item.get("phi_inf", 0.0))))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid bath parameters: {exc}") from exc

    grid = raw.get("grid")
    _require(isinstance(grid, dict), "a time grid is required")
    try:
        start, stop = float(grid["start"]), float(grid["stop"])
        points = int(grid["points"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid time grid: {exc}") from exc
    _require(points >= 1 and stop >= start >= 0.0,
             "grid needs points >= 1 and 0 <= start <= stop")
    spacing = grid.get("spacing", "linear")
    if spacing == "linear":
        times = np.linspace(start, stop, points)
    elif spacing == "log":
        _require(start > 0.0, "log spacing requires start > 0")
        times = np.geomspace(start, stop, points)
    else:
        raise ConfigError("grid spacing must be 'linear' or 'log'")

    quantities = raw.get("quantities")
    _require(isinstance(quantities, list) and
             all(q in _QUANTITIES for q in quantities),
             f"quantities must be a list drawn from {_QUANTITIES}")
    bad = [q for q in quantities if q not in _ALLOWED[kind]]
    _require(not bad, f"quantities {bad} not defined for kind {kind!r}")
    if kind == "single-gaussian" and "xi" in quantities:
        print("warning: xi of a Gaussian state is identically 0",
              file=sys.stderr)

    return Scenario(kind=kind, initial=dict(initial), baths=tuple(baths),
                    times=times, quantities=tuple(quantities),
                    oracle=bool(raw.get("oracle", False)))


# ---------------------------------------------------------------------------
# per-kind evaluators: map (scenario, t) -> {quantity: value}, and the same
# for the oracle pass
# ---------------------------------------------------------------------------

def _initial_single(s: Scenario) -> ps.SingleModeParams:
    try:
        return ps.SingleModeParams(mu=float(s.initial["mu"]),
                                   r=float(s.initial.get("r", 0.0)),
                                   phi=float(s.initial.get("phi", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid single-mode parameters: {exc}") from exc


def _initial_cat(s: Scenario) -> ng.CatState:
    try:
        return ng.CatState(x0=np.asarray(s.initial["x0"], dtype=float),
                           r0=float(s.initial.get("r0", 0.0)),
                           theta=float(s.initial.get("theta", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid cat parameters: {exc}") from exc


def _initial_two_mode(s: Scenario) -> tm.StandardForm:
    try:
        if "a" in s.initial:
            return tm.StandardForm(a=float(s.initial["a"]),
                                   b=float(s.initial["b"]),
                                   c1=float(s.initial["c1"]),
                                   c2=float(s.initial["c2"]))
        return tm.SqueezedThermalParams(
            mu=float(s.initial["mu"]), r=float(s.initial["r"])).standard_form
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid two-mode parameters: {exc}") from exc


def _eval_single(s: Scenario, t: float, oracle: bool) -> dict[str, float]:
    init = _initial_single(s)
    bath = s.baths[0]
    out = {}
    if oracle:
        cm = ch.evolve_moments(
            ps.GaussianState(np.zeros(2), ps.cm_from_params(init)),
            s.channel, t).cm
        for q in s.quantities:
            if q == "purity":
                out[q] = ps.purity_gaussian(cm)
            elif q == "entropy":
                out[q] = ps.von_neumann_entropy(cm)
            elif q == "tau":
                out[q] = ps.nonclassical_depth_gaussian(cm)
            elif q == "xi":
                out[q] = 0.0
        return out
    for q in s.quantities:
        if q == "purity":
            out[q] = float(ch.single_mode_purity_t(init, bath, t))
        elif q == "entropy":
            evolved = ch.evolved_params(init, bath, t)
            nu = 1.0 / (2.0 * evolved.mu)
            out[q] = float(ps.entropy_function(nu))
        elif q == "tau":
            out[q] = float(ch.single_mode_tau_t(init, bath, t))
        elif q == "xi":
            out[q] = 0.0
    return out


def _eval_cat(s: Scenario, t: float, oracle: bool) -> dict[str, float]:
    cat = _initial_cat(s)
    bath = s.baths[0]
    out = {}
    for q in s.quantities:
        if q == "purity":
            if oracle:
                out[q] = ng.wigner_purity(ng.cat_wigner_t(cat, bath, t),
                                          tol=1e-9)
            else:
                out[q] = ng.cat_purity_t(cat, bath, t)
        elif q == "xi":
            out[q] = ng.negative_part(ng.cat_wigner_t(cat, bath, t),
                                      tol=1e-8).xi
    return out


def _eval_fock(s: Scenario, t: float, oracle: bool) -> dict[str, float]:
    try:
        n = int(s.initial["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid Fock parameters: {exc}") from exc
    bath = s.baths[0]
    out = {}
    for q in s.quantities:
        if q == "purity":
            if oracle:
                nm_b = ch.nm_from_bath(bath)
                dim = max(nm.default_truncation(nm_b.N + abs(nm_b.M), n),
                          2 * n + 24)
                out[q] = nm.lindblad_evolve(nm.fock_state(n, dim),
                                            bath, t).purity()
            else:
                out[q] = ng.fock_purity_t(n, bath, t)
        elif q == "xi":
            if not bath.is_thermal:
                raise ConfigError("xi for Fock states requires a thermal bath")
            w = ng.fock_wigner_t(n, bath.mu_inf, t, bath.gamma)
            if oracle:
                # independent path: full 2-D quadrature instead of the
                # radial reduction
                w = ng.WignerField(eval=w.eval, domain=w.domain)
                out[q] = ng.negative_part(w, tol=1e-8).xi
            else:
                out[q] = ng.negative_part(w).xi
    return out


def _eval_psi01(s: Scenario, t: float, oracle: bool) -> dict[str, float]:
    try:
        vt = float(s.initial["vartheta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid psi01 parameters: {exc}") from exc
    bath = s.baths[0]
    if oracle:
        nm_b = ch.nm_from_bath(bath)
        dim = max(nm.default_truncation(nm_b.N + abs(nm_b.M), 1), 32)
        return {"purity": nm.lindblad_evolve(nm.psi01_state(vt, dim),
                                             bath, t).purity()}
    return {"purity": ng.psi01_purity_t(vt, bath, t)}


def _eval_two_mode(s: Scenario, t: float, oracle: bool) -> dict[str, float]:
    sf = _initial_two_mode(s)
    cm = ch.evolve_moments(
        ps.GaussianState(np.zeros(4), tm.standard_form_to_cm(sf)),
        s.channel, t).cm
    out = {}
    for q in s.quantities:
        if q == "purity":
            if oracle:
                out[q] = ps.purity_gaussian(cm)
            else:
                inv = tm.evolved_invariants(sf, s.channel, t)
                out[q] = 1.0 / (4.0 * math.sqrt(inv.det_sigma))
        elif q == "entropy":
            out[q] = ps.von_neumann_entropy(cm)
        elif q == "tau":
            out[q] = ps.nonclassical_depth_gaussian(cm)
        elif q == "logneg":
            if oracle:
                # independent path: symplectic spectrum of the
                # mirror-reflected covariance matrix
                mirror = np.diag([1.0, 1.0, 1.0, -1.0])
                nu = float(np.min(ps.symplectic_eigenvalues(
                    mirror @ cm @ mirror)))
                out[q] = max(0.0, -math.log(2.0 * nu))
            else:
                out[q] = tm.log_negativity(cm)
        elif q == "mutual-info":
            out[q] = tm.mutual_information(cm)
        elif q == "fidelity":
            out[q] = tm.teleportation_fidelity(cm)
    return out


def _eval_fidelity(s: Scenario, t: float, oracle: bool) -> dict[str, float]:
    try:
        params = tm.SqueezedThermalParams(mu=float(s.initial.get("mu", 1.0)),
                                          r=float(s.initial["r"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid fidelity parameters: {exc}") from exc
    cm = ch.evolve_moments(
        ps.GaussianState(np.zeros(4),
                         tm.standard_form_to_cm(params.standard_form)),
        s.channel, t).cm
    out = {}
    for q in s.quantities:
        if q == "fidelity":
            if oracle:
                out[q] = tm.teleportation_fidelity(cm)
            else:
                out[q] = float(tm.fidelity_t(params, s.channel, t))
        elif q == "logneg":
            out[q] = tm.log_negativity(cm)
    return out


_EVALUATORS = {
    "single-gaussian": _eval_single,
    "cat": _eval_cat,
    "fock": _eval_fock,
    "psi01": _eval_psi01,
    "two-mode": _eval_two_mode,
    "fidelity": _eval_fidelity,
}


def _thread_count() -> int:
    raw = os.environ.get("CVDEC_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigError(f"CVDEC_THREADS must be an integer: {raw!r}") from exc
        if n < 1:
            raise ConfigError("CVDEC_THREADS must be at least 1")
        return n
    return min(4, os.cpu_count() or 1)


def run_scenario(s: Scenario) -> ResultTable:
    """Evaluate the scenario over its time grid (time points concurrently)."""
    evaluate = _EVALUATORS[s.kind]
    columns = ["t"]
    for q in s.quantities:
        columns.append(q)
        if s.oracle:
            columns.extend([f"{q}_oracle", f"{q}_absdiff"])

    def one(t: float) -> list[float]:
        values = evaluate(s, t, oracle=False)
        row = [t]
        oracle_values = evaluate(s, t, oracle=True) if s.oracle else {}
        for q in s.quantities:
            row.append(values[q])
            if s.oracle:
                row.append(oracle_values[q])
                row.append(abs(values[q] - oracle_values[q]))
        return row

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        rows = list(pool.map(one, [float(t) for t in s.times]))
    table = ResultTable(columns=columns, rows=rows)
    for row in table.rows:
        if not all(math.isfinite(v) for v in row):
            raise ArithmeticError("non-finite entry in result table")
    return table


def emit(table: ResultTable, path: str):
    """Write the table as UTF-8 CSV with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([f"{v:.17g}" for v in row])


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.config)
        if args.oracle and not scenario.oracle:
            scenario = dataclasses.replace(scenario, oracle=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        table = run_scenario(scenario)
        emit(table, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (nm.TruncationError, nm.QuadratureError, ArithmeticError,
            OSError) as exc:
        print(f"numerical/IO failure: {exc}", file=sys.stderr)
        return 2
    worst = table.max_deviation()
    if worst is not None:
        print(f"max oracle deviation: {worst:.3e}")
        if args.tolerance is not None and worst > args.tolerance:
            print(f"deviation exceeds tolerance {args.tolerance:g}",
                  file=sys.stderr)
            return 2
    print(f"wrote {len(table.rows)} rows to {args.out}")
    return 0


def _cmd_selftest(_args) -> int:
    return 0 if acceptance.run_all(report=print) else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cvdec",
        description="Decoherence of continuous-variable states in Gaussian "
                    "baths: scenario runner and self tests.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="evaluate a scenario config to CSV")
    run_p.add_argument("config", help="path to a JSON scenario")
    run_p.add_argument("--out", required=True, help="output CSV path")
    run_p.add_argument("--oracle", action="store_true",
                       help="add independent oracle columns")
    run_p.add_argument("--tolerance", type=float, default=None,
                       help="fail (exit 2) if any oracle deviation exceeds this")
    run_p.set_defaults(func=_cmd_run)

    self_p = sub.add_parser("selftest", help="run the acceptance suite")
    self_p.set_defaults(func=_cmd_selftest)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
