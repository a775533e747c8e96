"""Command line batch driver.

Modes: solve (one steady state), eigen (state plus spectrum), trace (one
branch), diagram (a list of branches with switch dependencies), verify
(structural property checks). Configuration is a single JSON file; every
run echoes the fully resolved configuration into manifest.json so a run
can be reproduced from its manifest alone. Numeric text output uses 17
significant digits and a fixed column order, so re-running a config with
the same seed reproduces every CSV byte for byte. Files are written to a
temporary name and renamed into place.

Exit codes: 0 success, 1 numerical failure (partial outputs are kept next
to a FAILED marker file), 2 invalid configuration or arguments.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, glop
from ._core import BACKEND
from .checks import run_all
from .continuation import (Branch, BifurcationPoint, ContinuationSettings,
                           switch_guesses, trace_from_state, trace_from_switch)
from .eigen import stability
from .fields import constant_field, perturbed_constant, vortex_ansatz
from .gauge import link_field
from .grid import Grid, make_grid, norm
from .newton import NewtonSettings, newton_solve
from .postproc import free_energy, vortex_census
from .symmetry import isotropy

MODES = ("solve", "trace", "diagram", "eigen", "verify")


class ConfigError(Exception):
    pass


class RunError(Exception):
    pass


# ---------------------------------------------------------------- config

_STEP_DEFAULTS = {"ds0": 0.04, "ds_min": 1e-5, "ds_max": 0.15, "max_points": 800}
_TOL_DEFAULTS = {"newton": 1e-10, "linear": 1e-10, "stability": 1e-6,
                 "eigen": 1e-8, "bisect_mu": 1e-3, "refine_mu": None,
                 "isotropy": 1e-6, "cluster_gap": 1e-4}
_EIGEN_DEFAULTS = {"m": 8}
_GUESS_TYPES = ("constant", "vortex", "perturbed", "file", "switch")
_FAMILIES = ("simple", "<s>", "<sr>")


def _section(raw: dict, key: str, defaults: dict) -> dict:
    val = raw.get(key, {})
    if not isinstance(val, dict):
        raise ConfigError(f"'{key}' must be an object")
    unknown = sorted(set(val) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown keys in '{key}': {unknown}")
    out = dict(defaults)
    out.update(val)
    return out


def _check_guess(spec, where: str, allow_switch: bool) -> dict:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"{where}: guess must be an object with a 'type'")
    kind = spec["type"]
    if kind not in _GUESS_TYPES or (kind == "switch" and not allow_switch):
        raise ConfigError(f"{where}: unsupported guess type '{kind}'")
    allowed = {
        "constant": {"type", "value"},
        "vortex": {"type", "winding", "core"},
        "perturbed": {"type", "amplitude"},
        "file": {"type", "path"},
        "switch": {"type", "parent", "from_run", "bifurcation", "family",
                   "sign", "amplitude"},
    }[kind]
    unknown = sorted(set(spec) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown guess keys {unknown}")
    out = dict(spec)
    if kind == "constant":
        out.setdefault("value", 1.0)
    elif kind == "vortex":
        out.setdefault("winding", 1)
        out.setdefault("core", 1.0)
    elif kind == "perturbed":
        out.setdefault("amplitude", 0.01)
    elif kind == "file":
        if "path" not in out:
            raise ConfigError(f"{where}: file guess needs a 'path'")
    else:
        has_parent = "parent" in out
        has_run = "from_run" in out
        if has_parent == has_run:
            raise ConfigError(f"{where}: switch guess needs exactly one of "
                              "'parent' (same run) or 'from_run' (directory)")
        out.setdefault("bifurcation", 0)
        out.setdefault("sign", 1)
        out.setdefault("amplitude", 0.05)
        if out.get("family") not in _FAMILIES:
            raise ConfigError(f"{where}: switch family must be one of {_FAMILIES}")
        if out["sign"] not in (1, -1):
            raise ConfigError(f"{where}: switch sign must be +1 or -1")
    return out


def _check_branch_entry(entry, idx: int, labels: list[str]) -> dict:
    where = f"branches[{idx}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{where}: must be an object")
    allowed = {"label", "guess", "mu_start", "direction", "max_points"}
    unknown = sorted(set(entry) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    label = entry.get("label")
    if not label or not isinstance(label, str):
        raise ConfigError(f"{where}: needs a string 'label'")
    if label in labels:
        raise ConfigError(f"{where}: duplicate label '{label}'")
    guess = _check_guess(entry.get("guess"), where, allow_switch=True)
    if guess["type"] == "switch" and "parent" in guess:
        if guess["parent"] not in labels:
            raise ConfigError(f"{where}: switch parent '{guess['parent']}' is "
                              "not an earlier branch label")
    direction = entry.get("direction", 1)
    if direction not in (1, -1, "both"):
        raise ConfigError(f"{where}: direction must be 1, -1 or \"both\"")
    if guess["type"] == "switch" and direction == "both":
        raise ConfigError(f"{where}: switch guesses fix their own direction")
    out = {"label": label, "guess": guess, "direction": direction,
           "mu_start": entry.get("mu_start"),
           "max_points": entry.get("max_points")}
    labels.append(label)
    return out


def resolve_config(raw: dict, mode: str) -> dict:
    """Validate a raw config dict and fill in every default."""
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object")
    top = {"mode", "d", "N", "mu", "step", "tol", "eigen", "guess", "branch",
           "branches", "patterns_at", "seed", "out"}
    unknown = sorted(set(raw) - top)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {unknown}")
    if "mode" in raw and raw["mode"] != mode:
        raise ConfigError(f"config mode '{raw['mode']}' does not match "
                          f"requested mode '{mode}'")

    d = float(raw.get("d", 3.0))
    if not np.isfinite(d) or d <= 0:
        raise ConfigError("d must be a positive number")
    n = raw.get("N")
    if n is None:
        if abs(d - 3.0) < 1e-9:
            n = 64
        elif abs(d - 5.5) < 1e-9:
            n = 110
        else:
            raise ConfigError("N is required for domain sizes without a default")
    if not isinstance(n, int) or n < 8 or n % 2:
        raise ConfigError("N must be an even integer >= 8")

    mu = _section(raw, "mu", {"lo": 0.0, "hi": 2.0, "start": None})
    if mu["start"] is None:
        mu["start"] = mu["lo"]
    if not (mu["lo"] <= mu["start"] <= mu["hi"]):
        raise ConfigError("mu.start must lie inside [mu.lo, mu.hi]")
    step = _section(raw, "step", _STEP_DEFAULTS)
    tol = _section(raw, "tol", _TOL_DEFAULTS)
    eig = _section(raw, "eigen", _EIGEN_DEFAULTS)
    pats = raw.get("patterns_at", [])
    if not isinstance(pats, list) or not all(
            isinstance(v, (int, float)) for v in pats):
        raise ConfigError("patterns_at must be a list of mu values")

    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("'out' must be a string path")
    cfg = {"mode": mode, "d": d, "N": n, "mu": mu, "step": step, "tol": tol,
           "eigen": eig, "patterns_at": [float(v) for v in pats],
           "seed": int(raw.get("seed", 0)), "out": out}

    if mode in ("solve", "eigen"):
        cfg["guess"] = _check_guess(raw.get("guess", {"type": "constant"}),
                                    "guess", allow_switch=False)
    elif mode == "trace":
        if "branch" not in raw:
            raise ConfigError("trace mode needs a 'branch' entry")
        # an empty label list forces same-run 'parent' references to fail,
        # so a standalone trace can only switch via 'from_run'
        cfg["branch"] = _check_branch_entry(raw["branch"], 0, [])
    elif mode == "diagram":
        entries = raw.get("branches")
        if not isinstance(entries, list) or not entries:
            raise ConfigError("diagram mode needs a non-empty 'branches' list")
        labels: list[str] = []
        cfg["branches"] = [_check_branch_entry(e, i, labels)
                           for i, e in enumerate(entries)]
    return cfg


# ---------------------------------------------------------------- writers

def _atomic_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True,
                      default=_json_default) + "\n"


def _sanitize(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.+-]", "_", name)


def branch_csv_text(branch: Branch) -> str:
    lines = ["arclength,mu,energy,eta,norm_psi,n_unstable,"
             "isotropy_label,total_vorticity"]
    for p in branch.points:
        lines.append("%.17g,%.17g,%.17g,%.17g,%.17g,%d,%s,%d" % (
            p.arclength, p.mu, p.energy, p.eta, p.norm_psi,
            p.n_unstable, p.isotropy_label, p.vorticity))
    return "\n".join(lines) + "\n"


def bifurcation_csv_text(bifs: list[BifurcationPoint]) -> str:
    lines = ["ident,branch,kind,mu,multiplicity,"
             "n_unstable_lo_mu,n_unstable_hi_mu,bracket_lo,bracket_hi"]
    for b in bifs:
        lines.append("%s,%s,%s,%.17g,%d,%d,%d,%.17g,%.17g" % (
            b.ident, b.branch_label, b.kind, b.mu, b.multiplicity,
            b.n_unstable_lo_mu, b.n_unstable_hi_mu, b.bracket[0], b.bracket[1]))
    return "\n".join(lines) + "\n"


def _pgm_text(img: np.ndarray) -> str:
    h, w = img.shape
    lines = ["P2", f"{w} {h}", "255"]
    for row in img:
        vals = [str(int(v)) for v in row]
        for k in range(0, len(vals), 17):
            lines.append(" ".join(vals[k:k + 17]))
    return "\n".join(lines) + "\n"


def psi_csv_text(psi: np.ndarray) -> str:
    lines = ["i,j,re,im"]
    ni, nj = psi.shape
    for i in range(ni):
        for j in range(nj):
            z = psi[i, j]
            lines.append("%d,%d,%.17g,%.17g" % (i, j, z.real, z.imag))
    return "\n".join(lines) + "\n"


def read_psi_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 4:
        raise ValueError(f"{path}: expected 4 columns i,j,re,im")
    ii = data[:, 0].astype(int)
    jj = data[:, 1].astype(int)
    psi = np.zeros((ii.max() + 1, jj.max() + 1), dtype=complex)
    psi[ii, jj] = data[:, 2] + 1j * data[:, 3]
    return psi


def write_pattern(outdir: Path, tag: str, psi: np.ndarray,
                  artifacts: list[str]) -> None:
    """|psi|^2 and arg(psi) graymaps (rows from y_max down) plus raw CSV."""
    img = lambda f: f.T[::-1, :]
    abs2 = np.clip(np.rint(255.0 * np.abs(psi) ** 2), 0, 255)
    arg = np.clip(np.rint((np.angle(psi) + np.pi) / (2.0 * np.pi) * 255.0), 0, 255)
    base = f"pattern_{_sanitize(tag)}"
    for suffix, text in ((".abs2.pgm", _pgm_text(img(abs2))),
                         (".arg.pgm", _pgm_text(img(arg))),
                         (".psi.csv", psi_csv_text(psi))):
        _atomic_text(outdir / (base + suffix), text)
        artifacts.append(base + suffix)


def _save_bif_state(outdir: Path, bif: BifurcationPoint,
                    artifacts: list[str]) -> None:
    if bif.psi is None:
        return
    crit = (np.stack(bif.critical_fields) if bif.critical_fields
            else np.zeros((0,) + bif.psi.shape, dtype=complex))
    name = f"state_bif_{_sanitize(bif.ident)}.npz"
    tmp = outdir / (name + ".tmp")
    with open(tmp, "wb") as fh:
        np.savez(fh, psi=bif.psi, eta=bif.eta, mu=bif.mu, critical=crit,
                 kind=bif.kind, multiplicity=bif.multiplicity,
                 n_lo=bif.n_unstable_lo_mu, n_hi=bif.n_unstable_hi_mu,
                 branch=bif.branch_label, ident=bif.ident)
    os.replace(tmp, outdir / name)
    artifacts.append(name)


def load_bif_state(path) -> BifurcationPoint:
    with np.load(path) as z:
        return BifurcationPoint(
            branch_label=str(z["branch"]), kind=str(z["kind"]),
            mu=float(z["mu"]), multiplicity=int(z["multiplicity"]),
            n_unstable_lo_mu=int(z["n_lo"]), n_unstable_hi_mu=int(z["n_hi"]),
            psi=z["psi"], eta=float(z["eta"]),
            critical_fields=list(z["critical"]),
            bracket=(float(z["mu"]), float(z["mu"])), ident=str(z["ident"]))


# ---------------------------------------------------------------- helpers

def _settings(cfg: dict) -> ContinuationSettings:
    tol, step = cfg["tol"], cfg["step"]
    newton = NewtonSettings(tol=tol["newton"], linear_tol=tol["linear"])
    return ContinuationSettings(
        ds0=step["ds0"], ds_min=step["ds_min"], ds_max=step["ds_max"],
        max_points=step["max_points"], mu_lo=cfg["mu"]["lo"],
        mu_hi=cfg["mu"]["hi"], newton=newton, eigen_m=cfg["eigen"]["m"],
        eig_tol=tol["eigen"], tol_stab=tol["stability"],
        cluster_gap=tol["cluster_gap"], bisect_tol_mu=tol["bisect_mu"],
        refine_tol_mu=tol["refine_mu"], isotropy_tol=tol["isotropy"])


def _initial_field(grid: Grid, spec: dict, seed: int) -> np.ndarray:
    kind = spec["type"]
    if kind == "constant":
        return spec["value"] * constant_field(grid)
    if kind == "vortex":
        return vortex_ansatz(grid, spec["winding"], core=spec["core"])
    if kind == "perturbed":
        return perturbed_constant(grid, spec["amplitude"], seed)
    psi = read_psi_csv(spec["path"])
    if psi.shape != grid.shape:
        raise RunError(f"file guess shape {psi.shape} does not match grid "
                       f"{grid.shape}")
    return psi


def _point_summary(grid: Grid, psi: np.ndarray, sol, cfg: dict) -> dict:
    label, _ = isotropy(grid, psi, cfg["tol"]["isotropy"])
    try:
        _, total = vortex_census(grid, psi)
    except ValueError:
        total = 0
    return {"mu": sol.mu, "eta": sol.eta, "energy": free_energy(grid, psi),
            "norm_psi": norm(grid, psi), "residual_norm": sol.residual_norm,
            "iterations": sol.iterations, "isotropy_label": label,
            "total_vorticity": total, "converged": bool(sol.converged),
            "flag": sol.flag}


def _workers() -> int:
    raw = os.environ.get("GLV_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _merge_bidirectional(down: Branch, up: Branch, label: str) -> Branch:
    """Join two traces that share a seed point into one ordered branch.

    Points run from the end of the downward trace to the end of the upward
    one with a monotone arclength; the stored termination is the upward
    end's, the downward end's is kept on extra attributes for the manifest.
    """
    rev = down.points[::-1]
    s_max = rev[0].arclength
    out = Branch(label=label)
    for p in rev:
        out.points.append(replace(p, arclength=s_max - p.arclength))
    for p in up.points[1:]:
        out.points.append(replace(p, arclength=s_max + p.arclength))
    out.bifurcations = down.bifurcations + up.bifurcations
    out.termination = up.termination
    out.termination_mu = up.termination_mu
    out.termination_down = down.termination
    out.termination_down_mu = down.termination_mu
    return out


# ---------------------------------------------------------------- runners

def _trace_entry(grid: Grid, cfg: dict, entry: dict,
                 done: dict[str, Branch]) -> Branch:
    st = _settings(cfg)
    if entry["max_points"]:
        st = replace(st, max_points=entry["max_points"])
    guess = entry["guess"]
    label = entry["label"]

    if guess["type"] == "switch":
        if "from_run" in guess:
            ident = guess["bifurcation"]
            if not isinstance(ident, str):
                raise RunError("from_run switch needs a string bifurcation id")
            path = Path(guess["from_run"]) / f"state_bif_{_sanitize(ident)}.npz"
            if not path.exists():
                raise RunError(f"no stored bifurcation state at {path}")
            bif = load_bif_state(path)
        else:
            parent = done[guess["parent"]]
            key = guess["bifurcation"]
            if isinstance(key, int):
                if key >= len(parent.bifurcations):
                    raise RunError(f"branch {guess['parent']} has only "
                                   f"{len(parent.bifurcations)} bifurcations")
                bif = parent.bifurcations[key]
            else:
                hits = [b for b in parent.bifurcations if b.ident == key]
                if not hits:
                    raise RunError(f"no bifurcation '{key}' on branch "
                                   f"{guess['parent']}")
                bif = hits[0]
        try:
            sw = switch_guesses(grid, bif, guess["family"], guess["sign"],
                                amplitude=guess["amplitude"])
        except ValueError as err:
            raise RunError(f"branch {label}: {err}") from err
        branch = trace_from_switch(grid, sw, st, label)
    else:
        psi = _initial_field(grid, guess, cfg["seed"])
        mu0 = entry["mu_start"]
        if mu0 is None:
            mu0 = cfg["mu"]["start"]
        if entry["direction"] == "both":
            down = trace_from_state(grid, psi, mu0, st, label, -1)
            if down.termination.startswith("seed_"):
                raise RunError(f"branch {label}: seed solve failed "
                               f"({down.termination})")
            up = trace_from_state(grid, psi, mu0, st, label, +1)
            branch = _merge_bidirectional(down, up, label)
        else:
            branch = trace_from_state(grid, psi, mu0, st, label,
                                      entry["direction"])
    if branch.termination.startswith("seed_"):
        raise RunError(f"branch {label}: seed solve failed "
                       f"({branch.termination})")
    for k, bif in enumerate(branch.bifurcations):
        bif.ident = f"{label}.{k}"
    return branch


def _emit_branch(outdir: Path, cfg: dict, grid: Grid, branch: Branch,
                 artifacts: list[str]) -> None:
    name = f"branch_{_sanitize(branch.label)}.csv"
    _atomic_text(outdir / name, branch_csv_text(branch))
    artifacts.append(name)
    for bif in branch.bifurcations:
        _save_bif_state(outdir, bif, artifacts)
    if branch.points:
        write_pattern(outdir, f"{branch.label}_last", branch.points[-1].psi,
                      artifacts)
        for mu_want in cfg["patterns_at"]:
            nearest = min(branch.points, key=lambda p: abs(p.mu - mu_want))
            write_pattern(outdir, f"{branch.label}_mu{mu_want:g}", nearest.psi,
                          artifacts)


def _describe(branch: Branch) -> str:
    mu_t = ("" if branch.termination_mu is None
            else f" (mu={branch.termination_mu:.6g})")
    return (f"[{branch.label}] {len(branch.points)} points, "
            f"{len(branch.bifurcations)} bifurcation(s), "
            f"termination {branch.termination}{mu_t}")


def _run_trace_like(cfg: dict, outdir: Path, artifacts: list[str]) -> dict:
    grid = make_grid(cfg["d"], cfg["N"])
    entries = cfg["branches"] if cfg["mode"] == "diagram" else [cfg["branch"]]
    done: dict[str, Branch] = {}
    order: list[Branch] = []
    timings = []
    pending = list(entries)
    workers = _workers()
    failures: list[str] = []

    while pending:
        ready = [e for e in pending
                 if e["guess"]["type"] != "switch"
                 or "from_run" in e["guess"]
                 or e["guess"].get("parent") in done]
        if not ready:
            raise RunError("unresolvable switch dependencies among branches")
        pending = [e for e in pending if e not in ready]

        def work(entry):
            t0 = time.perf_counter()
            br = _trace_entry(grid, cfg, entry, done)
            return entry, br, time.perf_counter() - t0

        results = []
        if workers > 1 and len(ready) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futs = [pool.submit(work, e) for e in ready]
                for fut in futs:
                    try:
                        results.append(fut.result())
                    except RunError as err:
                        failures.append(str(err))
        else:
            for e in ready:
                try:
                    results.append(work(e))
                except RunError as err:
                    failures.append(str(err))

        for entry, branch, seconds in results:
            done[branch.label] = branch
            order.append(branch)
            entry_t = {"label": branch.label, "seconds": seconds,
                       "points": len(branch.points),
                       "termination": branch.termination,
                       "termination_mu": branch.termination_mu}
            if hasattr(branch, "termination_down"):
                entry_t["termination_down"] = branch.termination_down
                entry_t["termination_down_mu"] = branch.termination_down_mu
            timings.append(entry_t)
            _emit_branch(outdir, cfg, grid, branch, artifacts)
            print(_describe(branch))
            for bif in branch.bifurcations:
                print(f"  [{bif.ident}] {bif.kind} mu={bif.mu:.9g} "
                      f"multiplicity={bif.multiplicity} "
                      f"counts {bif.n_unstable_lo_mu}->{bif.n_unstable_hi_mu}")
        if failures:
            break

    all_bifs = [b for br in order for b in br.bifurcations]
    _atomic_text(outdir / "bifurcations.csv", bifurcation_csv_text(all_bifs))
    artifacts.append("bifurcations.csv")
    if failures:
        raise RunError("; ".join(failures))
    return {"branches": timings}


def _run_solve(cfg: dict, outdir: Path, artifacts: list[str],
               want_spectrum: bool) -> dict:
    grid = make_grid(cfg["d"], cfg["N"])
    mu0 = cfg["mu"]["start"]
    links = link_field(grid, mu0)
    psi0 = _initial_field(grid, cfg["guess"], cfg["seed"])
    newton = NewtonSettings(tol=cfg["tol"]["newton"],
                            linear_tol=cfg["tol"]["linear"])
    precond = glop.kinetic_preconditioner(grid, newton.precond_shift)
    t0 = time.perf_counter()
    sol = newton_solve(grid, links, psi0, newton, precond=precond)
    info = _point_summary(grid, sol.psi, sol, cfg)
    if not sol.converged:
        write_pattern(outdir, "failed", sol.psi, artifacts)
        _atomic_text(outdir / "solution.json", _json_text(info))
        artifacts.append("solution.json")
        raise RunError(f"newton did not converge (flag {sol.flag}, "
                       f"residual {sol.residual_norm:.3e})")

    if want_spectrum:
        stab = stability(grid, links, sol.psi, m=cfg["eigen"]["m"],
                         tol_stab=cfg["tol"]["stability"],
                         cluster_gap=cfg["tol"]["cluster_gap"],
                         eig_tol=cfg["tol"]["eigen"], precond=precond)
        lines = ["k,eigenvalue,phase_mode"]
        for k, lam in enumerate(stab.eigenvalues):
            lines.append("%d,%.17g,%d" % (k, lam, int(k == stab.phase_index)))
        _atomic_text(outdir / "spectrum.csv", "\n".join(lines) + "\n")
        artifacts.append("spectrum.csv")
        info["n_unstable"] = stab.n_unstable
        info["critical_eigenvalue"] = stab.critical_eigenvalue
        info["critical_multiplicity"] = stab.critical_multiplicity
        for k in stab.critical_indices:
            write_pattern(outdir, f"crit{k}", stab.eigenfields[k], artifacts)

    info["seconds"] = time.perf_counter() - t0
    _atomic_text(outdir / "solution.json", _json_text(info))
    artifacts.append("solution.json")
    write_pattern(outdir, "solution", sol.psi, artifacts)
    print(f"converged mu={sol.mu:.6g} energy={info['energy']:.9g} "
          f"eta={sol.eta:.3e} iterations={sol.iterations}"
          + (f" n_unstable={info['n_unstable']}" if want_spectrum else ""))
    return {"solve": info}


def _run_verify(cfg: dict) -> tuple[dict, bool]:
    results = run_all(cfg["seed"])
    for r in results:
        print(("PASS" if r.passed else "FAIL") + f" {r.name} - {r.detail}")
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    meta = {"checks": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                       for r in results]}
    return meta, ok


# ---------------------------------------------------------------- main

def _write_manifest(outdir: Path, cfg: dict, meta: dict, artifacts: list[str],
                    status: str, failure: str | None, t0: float) -> None:
    manifest = {
        "config": cfg,
        "versions": {"glvortex": __version__, "backend": BACKEND,
                     "python": sys.version.split()[0],
                     "numpy": np.__version__,
                     "scipy": __import__("scipy").__version__},
        "timings": dict(meta, total_seconds=time.perf_counter() - t0),
        "artifacts": sorted(set(artifacts)),
        "status": status,
        "failure": failure,
    }
    _atomic_text(outdir / "manifest.json", _json_text(manifest))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="glv",
        description="Steady vortex states and bifurcation branches of the "
                    "strongly type-II superconductor model on a square")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    args = parser.parse_args(argv)

    try:
        if args.config is None:
            if args.mode != "verify":
                raise ConfigError(f"--config is required for mode '{args.mode}'")
            raw = {}
        else:
            try:
                raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
            except OSError as err:
                raise ConfigError(f"cannot read config: {err}") from err
            except json.JSONDecodeError as err:
                raise ConfigError(f"config is not valid JSON: {err}") from err
        cfg = resolve_config(raw, args.mode)
        if args.out is not None:
            cfg["out"] = args.out
        if args.seed is not None:
            cfg["seed"] = args.seed
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    if args.mode == "verify" and cfg["out"] is None:
        _, ok = _run_verify(cfg)
        return 0 if ok else 1
    if cfg["out"] is None:
        cfg["out"] = "glv_out"
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    artifacts: list[str] = []
    try:
        if args.mode == "verify":
            meta, ok = _run_verify(cfg)
            if not ok:
                raise RunError("one or more property checks failed")
        elif args.mode in ("solve", "eigen"):
            meta = _run_solve(cfg, outdir, artifacts, args.mode == "eigen")
        else:
            meta = _run_trace_like(cfg, outdir, artifacts)
    except RunError as err:
        _atomic_text(outdir / "FAILED", str(err) + "\n")
        artifacts.append("FAILED")
        _write_manifest(outdir, cfg, {}, artifacts, "failed", str(err), t0)
        print(f"run failed: {err}", file=sys.stderr)
        return 1

    _write_manifest(outdir, cfg, meta, artifacts, "ok", None, t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
