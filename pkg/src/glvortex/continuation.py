"""Pseudo-arclength branch tracing, bifurcation localization and switching.

A branch is a curve of steady states parametrized by arclength in the
combined (psi, mu) metric. The corrector solves the phase-regularized system
together with the arclength constraint
    <t_psi, psi - psi_k> + t_mu (mu - mu_k) = ds,
one Krylov solve per Newton step on the doubly bordered realified operator.
Tangents are secants of consecutive phase-aligned points; the mu slot has
unit weight.

Stability is recorded at every stored point. A change in the unstable count
between neighbors brackets an eigenvalue crossing, which bisection (plus an
optional false-position refinement on the crossing eigenvalue) localizes in
mu; a sign flip of the mu increment marks a turning point. A turning where
the arc continues onto a dihedral translate of its own pre-turn tail is a
symmetry junction (a side branch rejoining its parent there), and the trace
stops with termination "merged" instead of walking the translated copy
forever. Branch switching
at a localized crossing perturbs along the critical eigenspace, restricted
to a mirror-fixed subspace when the crossing is doubly degenerate, and the
first corrector step pins the new amplitude instead of mu, so the corrector
cannot fall back onto the parent branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import glop, symmetry
from .eigen import StabilityInfo, stability
from .gauge import link_field
from .grid import Grid, from_real, inner, inner_real, norm, to_real
from .linalg import LinearOperator, solve_general
from .newton import NewtonSettings, Solution, _pick_reference, newton_solve
from .postproc import free_energy, vortex_census


@dataclass
class ContinuationSettings:
    ds0: float = 0.04
    ds_min: float = 1e-5
    ds_max: float = 0.15
    grow: float = 1.3
    mu_lo: float = 0.0
    mu_hi: float = 2.0
    max_points: int = 800
    newton: NewtonSettings = field(default_factory=NewtonSettings)
    compute_stability: bool = True
    eigen_m: int = 8
    eig_tol: float = 1e-8
    tol_stab: float = 1e-6
    cluster_gap: float = 1e-4
    bisect_tol_mu: float = 1e-3
    refine_tol_mu: float | None = None
    isotropy_tol: float = 1e-6
    switch_amplitude: float = 0.05
    trivial_norm: float = 1e-4
    # step length is also capped by this fraction of |psi|, so a branch
    # approaching the zero state is followed into the collapse threshold
    # instead of being jumped across onto its phase-flipped double cover
    ds_amp_cap: float = 0.5
    # steps watched after a turning point for re-entry onto a dihedral
    # translate of the pre-turn arc (a symmetry junction, e.g. a side branch
    # rejoining its parent); 0 disables the check
    junction_window: int = 8
    # junction match threshold, as a fraction of the local step spacing
    junction_match: float = 0.6


@dataclass
class BranchPoint:
    psi: np.ndarray
    eta: float
    mu: float
    arclength: float
    energy: float
    norm_psi: float
    n_unstable: int
    isotropy_label: str
    vorticity: int
    stability: StabilityInfo | None


@dataclass
class BifurcationPoint:
    branch_label: str
    kind: str                     # crossing | turning
    mu: float
    multiplicity: int
    n_unstable_lo_mu: int         # unstable count on the low-mu side
    n_unstable_hi_mu: int
    psi: np.ndarray | None
    eta: float
    critical_fields: list
    bracket: tuple[float, float]
    ident: str = ""


@dataclass
class Branch:
    """Traced solution family.

    termination is one of: "window" (left the mu window), "trivial"
    (amplitude collapsed onto the zero state; termination_mu extrapolated),
    "merged" (arc rejoined a dihedral translate of itself at a turning
    point, i.e. reconnected with a parent branch; termination_mu is the
    junction), "stuck", "max_points", or "seed_<flag>" when the seed solve
    already failed.
    """
    label: str
    points: list[BranchPoint] = field(default_factory=list)
    bifurcations: list[BifurcationPoint] = field(default_factory=list)
    termination: str = ""
    termination_mu: float | None = None


@dataclass
class SwitchGuess:
    psi_star: np.ndarray
    eta_star: float
    mu_star: float
    direction: np.ndarray        # unit critical field (weighted norm)
    ds: float


def align_phase(grid: Grid, psi: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Rotate the global phase of psi to best match ref."""
    z = inner(grid, psi, ref)
    if abs(z) == 0.0:
        return psi
    return np.exp(1j * np.angle(z)) * psi


def secant_tangent(grid: Grid, prev: BranchPoint, cur: BranchPoint
                   ) -> tuple[np.ndarray, float]:
    dpsi = cur.psi - prev.psi
    dmu = cur.mu - prev.mu
    nrm = np.sqrt(norm(grid, dpsi) ** 2 + dmu * dmu)
    if nrm == 0.0:
        raise ValueError("coincident branch points")
    return dpsi / nrm, dmu / nrm


def _corrector(grid: Grid, st: ContinuationSettings, psi, eta, mu,
               t_psi, t_mu, ds, anchor_psi, anchor_mu, precond,
               psi0: np.ndarray | None):
    """Newton on (field residual, phase condition, arclength constraint)."""
    ns = st.newton
    ref = np.ones(grid.shape, complex) if psi0 is None else psi0
    policy = ns.reference_policy
    psi = np.ascontiguousarray(psi, dtype=complex)
    mu = float(mu)
    eta = float(eta)
    history = []
    weights = np.concatenate([grid.wr, [1.0, 1.0]])

    for it in range(ns.max_iter + 1):
        links = link_field(grid, mu)
        ref, policy = _pick_reference(grid, psi, ref, policy, ns.switch_threshold)
        r_field, r_phase = glop.residual_extended(grid, links, ref, psi, eta)
        r_arc = inner_real(grid, t_psi, psi - anchor_psi) + t_mu * (mu - anchor_mu) - ds
        rnorm = float(np.sqrt(norm(grid, r_field) ** 2 + r_phase**2 + r_arc**2))
        history.append(rnorm)
        if rnorm <= ns.tol:
            return psi, eta, mu, "converged", it, rnorm
        if norm(grid, psi) < st.trivial_norm:
            return psi, eta, mu, "trivial", it, rnorm
        if rnorm > ns.divergence_factor * max(history[0], ns.tol) or it == ns.max_iter:
            flag = "diverged" if it < ns.max_iter else "max_iter"
            return psi, eta, mu, flag, it, rnorm

        dmu_field = glop.dresidual_dmu(grid, links, psi)
        psi_c = psi
        eta_c = eta

        def mv(v: np.ndarray) -> np.ndarray:
            phi = from_real(grid, v[:-2])
            nu, dm = v[-2], v[-1]
            f, ph = glop.apply_jacobian_extended(grid, links, ref, psi_c, eta_c, phi, nu)
            f = f + dm * dmu_field
            arc = inner_real(grid, t_psi, phi) + t_mu * dm
            return np.concatenate([to_real(f), [ph, arc]])

        op = LinearOperator(dim=grid.nreal + 2, matvec=mv, weights=weights,
                            symmetric=False)
        rhs = -np.concatenate([to_real(r_field), [r_phase, r_arc]])
        delta, rep = solve_general(op, rhs, tol=ns.linear_tol, maxit=ns.linear_maxit,
                                   precond=precond)
        dpsi = from_real(grid, delta[:-2])
        step = 1.0
        accepted = False
        for _ in range(ns.max_halvings + 1):
            c_psi = psi + step * dpsi
            c_eta = eta + step * delta[-2]
            c_mu = mu + step * delta[-1]
            c_links = link_field(grid, c_mu)
            c_f, c_ph = glop.residual_extended(grid, c_links, ref, c_psi, c_eta)
            c_arc = (inner_real(grid, t_psi, c_psi - anchor_psi)
                     + t_mu * (c_mu - anchor_mu) - ds)
            c_norm = float(np.sqrt(norm(grid, c_f) ** 2 + c_ph**2 + c_arc**2))
            if c_norm < rnorm:
                psi, eta, mu = c_psi, c_eta, c_mu
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return psi, eta, mu, "stalled", it + 1, rnorm
    return psi, eta, mu, "max_iter", ns.max_iter, history[-1]


def make_point(grid: Grid, st: ContinuationSettings, psi, eta, mu, arclength,
               stab: StabilityInfo | None) -> BranchPoint:
    label, _ = symmetry.isotropy(grid, psi, st.isotropy_tol)
    try:
        _, total = vortex_census(grid, psi)
    except ValueError:
        total = 0
    return BranchPoint(psi=psi, eta=eta, mu=mu, arclength=arclength,
                       energy=free_energy(grid, psi), norm_psi=norm(grid, psi),
                       n_unstable=stab.n_unstable if stab else -1,
                       isotropy_label=label, vorticity=total, stability=stab)


def _stab(grid, st: ContinuationSettings, psi, mu, block, precond):
    if not st.compute_stability:
        return None
    return stability(grid, link_field(grid, mu), psi, m=st.eigen_m,
                     tol_stab=st.tol_stab, cluster_gap=st.cluster_gap,
                     eig_tol=st.eig_tol, x0=block, precond=precond)


def trace_from_state(grid: Grid, psi, mu: float, st: ContinuationSettings,
                     label: str, direction: int = +1,
                     progress: Callable[[str], None] | None = None) -> Branch:
    """Converge a seed at fixed mu, then trace in the given mu direction."""
    precond = glop.kinetic_preconditioner(grid, st.newton.precond_shift or 1.0)
    sol = newton_solve(grid, link_field(grid, mu), psi, st.newton, precond=precond)
    branch = Branch(label=label)
    if not sol.converged:
        branch.termination = f"seed_{sol.flag}"
        return branch
    stab = _stab(grid, st, sol.psi, mu, None, precond)
    p0 = make_point(grid, st, sol.psi, sol.eta, mu, 0.0, stab)
    branch.points.append(p0)
    zero = np.zeros(grid.shape, complex)
    return _trace_loop(grid, st, branch, (zero, float(direction)), st.ds0,
                       precond, progress)


def trace_from_switch(grid: Grid, guess: SwitchGuess, st: ContinuationSettings,
                      label: str,
                      progress: Callable[[str], None] | None = None) -> Branch:
    """Trace the branch emerging along a critical direction at a crossing."""
    precond = glop.kinetic_preconditioner(grid, st.newton.precond_shift or 1.0)
    branch = Branch(label=label)
    stab = _stab(grid, st, guess.psi_star, guess.mu_star, None, precond)
    p0 = make_point(grid, st, guess.psi_star, guess.eta_star, guess.mu_star, 0.0, stab)
    branch.points.append(p0)
    return _trace_loop(grid, st, branch, (guess.direction, 0.0), guess.ds,
                       precond, progress, skip_first_detect=True)


def _trace_loop(grid: Grid, st: ContinuationSettings, branch: Branch,
                tangent, ds, precond, progress, skip_first_detect=False) -> Branch:
    t_psi, t_mu = tangent
    last = branch.points[-1]
    block = last.stability.block if last.stability else None
    steps_done = 0
    watch = None

    while True:
        if len(branch.points) >= st.max_points:
            branch.termination = "max_points"
            return branch
        ds_eff = min(ds, max(st.ds_amp_cap * last.norm_psi, st.ds_min))
        pred_psi = last.psi + ds_eff * t_psi
        pred_mu = last.mu + ds_eff * t_mu
        psi, eta, mu, flag, iters, rnorm = _corrector(
            grid, st, pred_psi, last.eta, pred_mu, t_psi, t_mu, ds_eff,
            last.psi, last.mu, precond, None)

        if flag == "trivial":
            branch.termination = "trivial"
            branch.termination_mu = _trivial_mu(branch, mu)
            return branch
        if flag != "converged":
            if ds <= st.ds_min:
                branch.termination = "stuck"
                return branch
            ds = max(ds * 0.5, st.ds_min)
            continue

        psi = align_phase(grid, psi, last.psi)
        if norm(grid, psi) < st.trivial_norm:
            branch.termination = "trivial"
            branch.termination_mu = _trivial_mu(branch, mu)
            return branch

        out_lo = mu < st.mu_lo - 1e-12
        out_hi = mu > st.mu_hi + 1e-12
        if out_lo or out_hi:
            bound = st.mu_lo if out_lo else st.mu_hi
            sol = newton_solve(grid, link_field(grid, bound), psi, st.newton,
                               precond=precond)
            if sol.converged:
                spsi = align_phase(grid, sol.psi, last.psi)
                stab = _stab(grid, st, spsi, bound, block, precond)
                s_len = last.arclength + np.sqrt(
                    norm(grid, spsi - last.psi) ** 2 + (bound - last.mu) ** 2)
                pt = make_point(grid, st, spsi, sol.eta, bound, s_len, stab)
                branch.points.append(pt)
                _detect_events(grid, st, branch, precond,
                               skip=skip_first_detect and steps_done == 0)
            branch.termination = "window"
            return branch

        stab = _stab(grid, st, psi, mu, block, precond)
        if stab is not None:
            block = stab.block
        s_len = last.arclength + np.sqrt(
            norm(grid, psi - last.psi) ** 2 + (mu - last.mu) ** 2)
        pt = make_point(grid, st, psi, eta, mu, s_len, stab)
        branch.points.append(pt)
        n_bif = len(branch.bifurcations)
        _detect_events(grid, st, branch, precond,
                       skip=skip_first_detect and steps_done == 0)
        turned = (len(branch.bifurcations) > n_bif
                  and branch.bifurcations[-1].kind == "turning")
        if turned and st.junction_window > 0:
            # arm the junction watch: pre-turn tail, excluding the point
            # just accepted (the first one past the extremum)
            anchors = [p.psi for p in branch.points[-9:-1]]
            watch = {"anchors": anchors,
                     "spacing": _chain_spacing(grid, anchors),
                     "cut": len(branch.points) - 1,
                     "n_bif": len(branch.bifurcations),
                     "mu_star": branch.bifurcations[-1].mu,
                     "left": st.junction_window}
        elif watch is not None:
            own = symmetry.orbit_distance(grid, pt.psi, last.psi)
            theta = st.junction_match * max(watch["spacing"], own)
            if _junction_match(grid, pt.psi, watch["anchors"], theta):
                branch.points = branch.points[:watch["cut"]]
                branch.bifurcations = branch.bifurcations[:watch["n_bif"]]
                branch.termination = "merged"
                branch.termination_mu = watch["mu_star"]
                return branch
            watch["left"] -= 1
            if watch["left"] <= 0:
                watch = None
        if progress:
            progress(f"[{branch.label}] mu={mu:.6f} |psi|={pt.norm_psi:.4f} "
                     f"unstable={pt.n_unstable} iso={pt.isotropy_label} ds={ds:.3g}")

        t_psi, t_mu = secant_tangent(grid, last, pt)
        last = pt
        steps_done += 1
        if iters <= 4:
            ds = min(ds * st.grow, st.ds_max)
        elif iters >= 8:
            ds = max(ds * 0.5, st.ds_min)


def _chain_spacing(grid: Grid, anchors: list) -> float:
    """Median phase-modded distance between consecutive anchor fields."""
    if len(anchors) < 2:
        return 0.0
    gaps = [symmetry.orbit_distance(grid, anchors[i + 1], anchors[i])
            for i in range(len(anchors) - 1)]
    return float(np.median(gaps))


def _junction_match(grid: Grid, psi_new: np.ndarray, anchors: list,
                    theta: float) -> str | None:
    """Dihedral element mapping a pre-turn anchor onto psi_new, if any.

    A match through an element that is a symmetry of psi_new itself is a
    plain retrace of the same arc (corrector fell back), not a crossing
    onto a translated copy, and is rejected.
    """
    best_d, best_g = None, None
    for psi_a in anchors:
        for g in symmetry.ELEMENTS:
            d = symmetry.orbit_distance(grid, psi_new, symmetry.act(g, psi_a))
            if d <= theta and (best_d is None or d < best_d):
                best_d, best_g = d, g
    if best_g is None:
        return None
    self_def = symmetry.aligned_distance(grid, psi_new, best_g) * norm(grid, psi_new)
    if self_def <= 3.0 * theta:
        return None
    return best_g


def _trivial_mu(branch: Branch, mu_last: float) -> float:
    """Extrapolate the connection point on the zero branch, mu vs |psi|^2."""
    pts = branch.points[-4:]
    if len(pts) < 2:
        return mu_last
    n2 = np.array([p.norm_psi**2 for p in pts])
    mus = np.array([p.mu for p in pts])
    if np.ptp(n2) == 0:
        return mu_last
    coef = np.polyfit(n2, mus, 1)
    return float(coef[1])


def _detect_events(grid: Grid, st: ContinuationSettings, branch: Branch,
                   precond, skip: bool = False) -> None:
    pts = branch.points
    if len(pts) < 2 or skip:
        return
    a, b = pts[-2], pts[-1]
    if (a.stability is not None and b.stability is not None
            and a.n_unstable != b.n_unstable):
        branch.bifurcations.extend(
            localize_crossings(grid, st, a, b, branch.label, precond))
        return
    if len(pts) >= 3:
        c = pts[-3]
        d1, d2 = a.mu - c.mu, b.mu - a.mu
        if d1 * d2 < 0 and max(abs(d1), abs(d2)) > 1e-10:
            mu_ext = _parabola_extremum(
                (c.arclength, c.mu), (a.arclength, a.mu), (b.arclength, b.mu))
            branch.bifurcations.append(BifurcationPoint(
                branch_label=branch.label, kind="turning", mu=mu_ext,
                multiplicity=a.stability.critical_multiplicity if a.stability else 0,
                n_unstable_lo_mu=a.n_unstable, n_unstable_hi_mu=a.n_unstable,
                psi=a.psi, eta=a.eta, critical_fields=[],
                bracket=(min(c.mu, a.mu, b.mu), max(c.mu, a.mu, b.mu))))


def _parabola_extremum(p1, p2, p3) -> float:
    s = np.array([p1[0], p2[0], p3[0]])
    m = np.array([p1[1], p2[1], p3[1]])
    coef = np.polyfit(s, m, 2)
    if coef[0] == 0:
        return float(p2[1])
    s_ext = -coef[1] / (2 * coef[0])
    return float(np.polyval(coef, s_ext))


def _solve_at(grid: Grid, st: ContinuationSettings, psi_guess, mu, precond,
              block) -> tuple[Solution, StabilityInfo | None]:
    sol = newton_solve(grid, link_field(grid, mu), psi_guess, st.newton,
                       precond=precond)
    stab = None
    if sol.converged:
        stab = _stab(grid, st, sol.psi, mu, block, precond)
    return sol, stab


@dataclass
class _Side:
    """One side of a crossing bracket during localization."""

    psi: np.ndarray
    mu: float
    eta: float
    stability: StabilityInfo | None
    n_unstable: int


def localize_crossings(grid: Grid, st: ContinuationSettings, lo_pt: BranchPoint,
                       hi_pt: BranchPoint, label: str, precond,
                       max_splits: int = 3) -> list[BifurcationPoint]:
    """All stability crossings between two consecutive branch points.

    Bisection on the unstable count; a probe landing on an intermediate
    shelf (count strictly between the bracket counts) splits the bracket and
    localizes each part, so cascades of nearby crossings come out as
    individual events instead of one blurred record. Assumes mu varies
    monotonically across the segment (crossings collapsing onto folds are
    recorded from the endpoints without refinement). Results are mu-sorted.
    """
    lo, hi = (lo_pt, hi_pt) if lo_pt.mu <= hi_pt.mu else (hi_pt, lo_pt)
    s_lo = _Side(lo.psi, lo.mu, lo.eta, lo.stability, lo.n_unstable)
    s_hi = _Side(align_phase(grid, hi.psi, lo.psi), hi.mu, hi.eta,
                 hi.stability, hi.n_unstable)
    return _bisect_split(grid, st, s_lo, s_hi, label, precond, max_splits)


def _bisect_split(grid: Grid, st: ContinuationSettings, lo: _Side, hi: _Side,
                  label: str, precond, budget: int) -> list[BifurcationPoint]:
    block = lo.stability.block if lo.stability else None
    while hi.mu - lo.mu > st.bisect_tol_mu:
        mid_mu = 0.5 * (lo.mu + hi.mu)
        guess = 0.5 * (lo.psi + align_phase(grid, hi.psi, lo.psi))
        sol, stab = _solve_at(grid, st, guess, mid_mu, precond, block)
        if not sol.converged or stab is None:
            break
        block = stab.block
        mid = _Side(sol.psi, mid_mu, sol.eta, stab, stab.n_unstable)
        if mid.n_unstable == lo.n_unstable:
            lo = mid
        elif mid.n_unstable == hi.n_unstable:
            hi = mid
        elif budget > 0:
            return (_bisect_split(grid, st, lo, mid, label, precond, budget - 1)
                    + _bisect_split(grid, st, mid, hi, label, precond, budget - 1))
        else:
            hi = mid  # split budget exhausted: fold the shelf into one record
    return [_finish_crossing(grid, st, lo, hi, label, precond, block)]


def _finish_crossing(grid: Grid, st: ContinuationSettings, lo: _Side, hi: _Side,
                     label: str, precond, block) -> BifurcationPoint:
    """Refine one isolated crossing bracket and assemble its record."""
    n_lo, n_hi = lo.n_unstable, hi.n_unstable
    lo_psi, lo_mu, lo_stab = lo.psi, lo.mu, lo.stability
    hi_psi, hi_mu, hi_stab = hi.psi, hi.mu, hi.stability
    eta = lo.eta

    if abs(hi_mu - lo_mu) < max(st.bisect_tol_mu, 1e-12):
        mid = 0.5 * (lo_mu + hi_mu)
        ref = hi_stab or lo_stab
        return BifurcationPoint(
            branch_label=label, kind="crossing", mu=mid,
            multiplicity=ref.critical_multiplicity if ref else 0,
            n_unstable_lo_mu=n_lo, n_unstable_hi_mu=n_hi, psi=lo_psi, eta=eta,
            critical_fields=_crit_fields(ref), bracket=(lo_mu, hi_mu))

    # false-position refinement on the crossing eigenvalue
    if st.refine_tol_mu is not None and lo_stab is not None and hi_stab is not None:
        k = max(n_lo, n_hi) - 1
        lam_lo = _kth_nonphase(lo_stab, k)
        lam_hi = _kth_nonphase(hi_stab, k)
        while hi_mu - lo_mu > st.refine_tol_mu and lam_lo != lam_hi:
            mid_mu = lo_mu + (hi_mu - lo_mu) * lam_lo / (lam_lo - lam_hi)
            mid_mu = min(max(mid_mu, lo_mu + 0.05 * (hi_mu - lo_mu)),
                         hi_mu - 0.05 * (hi_mu - lo_mu))
            guess = 0.5 * (lo_psi + align_phase(grid, hi_psi, lo_psi))
            sol, stab = _solve_at(grid, st, guess, mid_mu, precond, block)
            if not sol.converged or stab is None:
                break
            block = stab.block
            lam = _kth_nonphase(stab, k)
            if stab.n_unstable == n_lo:
                lo_psi, lo_mu, lo_stab, lam_lo = sol.psi, mid_mu, stab, lam
            else:
                hi_psi, hi_mu, hi_stab, lam_hi = sol.psi, mid_mu, stab, lam

    # state and critical data at the localized point
    lam_lo_k = _kth_nonphase(lo_stab, max(n_lo, n_hi) - 1) if lo_stab else np.nan
    lam_hi_k = _kth_nonphase(hi_stab, max(n_lo, n_hi) - 1) if hi_stab else np.nan
    if np.isfinite(lam_lo_k) and np.isfinite(lam_hi_k) and lam_lo_k != lam_hi_k:
        mu_star = lo_mu + (hi_mu - lo_mu) * lam_lo_k / (lam_lo_k - lam_hi_k)
    else:
        mu_star = 0.5 * (lo_mu + hi_mu)
    side = lo_stab if abs(mu_star - lo_mu) <= abs(mu_star - hi_mu) else hi_stab
    side_psi = lo_psi if side is lo_stab else hi_psi
    sol, stab = _solve_at(grid, st, side_psi, mu_star, precond, block)
    if sol.converged and stab is not None:
        psi_star, eta_star, ref = sol.psi, sol.eta, stab
    else:
        psi_star, eta_star, ref = side_psi, eta, side
    return BifurcationPoint(
        branch_label=label, kind="crossing", mu=float(mu_star),
        multiplicity=ref.critical_multiplicity if ref else 0,
        n_unstable_lo_mu=n_lo, n_unstable_hi_mu=n_hi,
        psi=psi_star, eta=eta_star, critical_fields=_crit_fields(ref),
        bracket=(lo_mu, hi_mu))


def _kth_nonphase(stab: StabilityInfo, k: int) -> float:
    lam = [stab.eigenvalues[i] for i in range(len(stab.eigenvalues))
           if i != stab.phase_index]
    k = min(max(k, 0), len(lam) - 1)
    return float(sorted(lam)[k])


def _crit_fields(stab: StabilityInfo | None) -> list:
    if stab is None:
        return []
    return [stab.eigenfields[i] for i in stab.critical_indices]


def switch_guesses(grid: Grid, bif: BifurcationPoint, family: str, sign: int,
                   amplitude: float = 0.05) -> SwitchGuess:
    """Initial data for the branch emerging at a localized crossing.

    family "simple" perturbs along the single critical field; "<s>" / "<sr>"
    pick the mirror-fixed line of a doubly degenerate critical space.
    """
    if bif.psi is None or not bif.critical_fields:
        raise ValueError("bifurcation point carries no critical data")
    fields = [np.asarray(f) for f in bif.critical_fields]
    if family == "simple" or len(fields) == 1:
        phi = fields[0]
    else:
        gen = {"<s>": "s", "<sr>": "sr"}[family]
        basis = _orthonormalize(grid, fields)
        k = len(basis)
        gmat = np.empty((k, k))
        acted = [symmetry.act(gen, b) for b in basis]
        for i in range(k):
            for j in range(k):
                gmat[i, j] = inner_real(grid, basis[i], acted[j])
        lam, vec = np.linalg.eigh(0.5 * (gmat + gmat.T))
        coeff = vec[:, int(np.argmax(lam))]   # eigenvalue closest to +1
        phi = sum(c * b for c, b in zip(coeff, basis))
        phi = symmetry.project_fixed_space(grid, phi, ("e", gen))
    nphi = norm(grid, phi)
    if nphi < 1e-12:
        raise ValueError("critical field projects to zero in the requested family")
    phi = phi / nphi
    eps = amplitude * max(norm(grid, bif.psi), 1.0)
    return SwitchGuess(psi_star=bif.psi, eta_star=bif.eta, mu_star=bif.mu,
                       direction=float(sign) * phi, ds=eps)


def _orthonormalize(grid: Grid, fields: list) -> list:
    out = []
    for f in fields:
        g = np.array(f, dtype=complex)
        for b in out:
            g = g - inner_real(grid, b, g) * b
        n = norm(grid, g)
        if n > 1e-10:
            out.append(g / n)
    return out
