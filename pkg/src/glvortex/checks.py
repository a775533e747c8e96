"""Self-contained property checks behind the command line verify mode.

Each check exercises one structural identity of the discretization on a
small grid and reports a pass/fail flag plus the measured defect, so a
broken build is caught before any expensive tracing is attempted. The
checks are deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import glop
from .fields import constant_field
from .gauge import gauge_transform, link_field
from .grid import make_grid, norm
from .linalg import bordered_nullity, dense_materialize
from .newton import NewtonSettings, newton_solve
from .symmetry import ELEMENTS, act


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_self_adjointness(seed: int = 0, tol: float = 1e-12) -> CheckResult:
    """Linearized operator is symmetric in the quadrature inner product."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (8, 16):
        grid = make_grid(3.0, n)
        links = link_field(grid, 0.7)
        psi = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
        op = glop.jacobian_operator(grid, links, psi)
        x = rng.standard_normal(op.dim)
        y = rng.standard_normal(op.dim)
        ax, ay = op.matvec(x), op.matvec(y)
        w = op.weights
        lhs = float(np.dot(x, w * ay))
        rhs = float(np.dot(ax, w * y))
        scale = float(np.linalg.norm(w * ax) * np.linalg.norm(y)) or 1.0
        worst = max(worst, abs(lhs - rhs) / scale)
    return CheckResult("self-adjointness", worst <= tol,
                       f"max relative defect {worst:.2e} (tol {tol:.0e})")


def check_gauge_covariance(seed: int = 0, tol: float = 1e-12) -> CheckResult:
    """A smooth phase change of psi is absorbed by transformed links."""
    rng = np.random.default_rng(seed + 1)
    grid = make_grid(3.0, 12)
    links = link_field(grid, 0.9)
    psi = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    chi = np.cos(np.pi * grid.x[:, None] / grid.d) * np.sin(grid.x[None, :])
    g = np.exp(1j * chi)
    moved = gauge_transform(grid, links, chi)
    lhs = glop.residual(grid, moved, g * psi)
    rhs = g * glop.residual(grid, links, psi)
    defect = norm(grid, lhs - rhs) / max(norm(grid, rhs), 1.0)
    return CheckResult("gauge covariance", defect <= tol,
                       f"relative defect {defect:.2e} (tol {tol:.0e})")


def check_equivariance(seed: int = 0, tol: float = 1e-12) -> CheckResult:
    """Dihedral actions commute with the operator; reflections flip eta."""
    rng = np.random.default_rng(seed + 2)
    grid = make_grid(3.0, 12)
    links = link_field(grid, 0.8)
    psi = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    psi0 = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    eta = 0.37
    field0, scalar0 = glop.residual_extended(grid, links, psi0, psi, eta)
    worst = 0.0
    for g in ELEMENTS:
        flip = -1.0 if g.startswith("s") else 1.0
        field_g, scalar_g = glop.residual_extended(
            grid, links, act(g, psi0), act(g, psi), flip * eta)
        d_field = norm(grid, field_g - act(g, field0))
        d_scalar = abs(scalar_g - flip * scalar0)
        scale = max(norm(grid, field0), 1.0)
        worst = max(worst, d_field / scale, d_scalar / scale)
    return CheckResult("equivariance", worst <= tol,
                       f"max relative defect {worst:.2e} over {len(ELEMENTS)} elements")


def check_nullspace_regularization(seed: int = 0) -> CheckResult:
    """Phase mode makes the plain operator singular; the border removes it."""
    grid = make_grid(3.0, 10)
    links = link_field(grid, 0.5)
    sol = newton_solve(grid, links, constant_field(grid), NewtonSettings())
    if not sol.converged:
        return CheckResult("nullspace regularization", False,
                           f"reference solve failed ({sol.flag})")
    plain = dense_materialize(glop.jacobian_operator(grid, links, sol.psi))
    s_plain = np.linalg.svd(plain, compute_uv=False)
    ext = dense_materialize(glop.extended_operator(grid, links, sol.psi, sol.psi, sol.eta))
    s_ext = np.linalg.svd(ext, compute_uv=False)
    cond_plain = s_plain[0] / s_plain[-1]
    cond_ext = s_ext[0] / s_ext[-1]
    ok = cond_plain >= 1e10 and cond_ext <= 1e-4 * cond_plain
    return CheckResult("nullspace regularization", bool(ok),
                       f"condition {cond_plain:.2e} plain vs {cond_ext:.2e} bordered")


def check_bordering_lemma(seed: int = 0, trials: int = 200) -> CheckResult:
    """One border removes one null direction exactly when it completes rank."""
    rng = np.random.default_rng(seed + 3)
    n = 12
    fails = 0
    for t in range(trials):
        k = 1 + t % 3
        left = np.linalg.qr(rng.standard_normal((n, n)))[0][:, :k]
        right = np.linalg.qr(rng.standard_normal((n, n)))[0][:, :k]
        sing = rng.standard_normal((n, n))
        sing -= left @ (left.T @ sing)
        sing -= (sing @ right) @ right.T
        complete = t % 2 == 0
        if complete:
            b = left @ rng.standard_normal(k) + sing @ rng.standard_normal(n)
            f = right @ rng.standard_normal(k) + sing.T @ rng.standard_normal(n)
        else:
            b = sing @ rng.standard_normal(n)
            f = sing.T @ rng.standard_normal(n)
        rep = bordered_nullity(sing, b, f, rng.standard_normal())
        expect = k - 1 if complete else k
        ok = (rep.nullity == k
              and rep.border_outside_range == complete
              and rep.functional_sees_kernel == complete
              and rep.nullity_bordered == expect)
        if not ok:
            fails += 1
    return CheckResult("bordering lemma", fails == 0,
                       f"{trials - fails}/{trials} random instances classified correctly")


def run_all(seed: int = 0) -> list[CheckResult]:
    return [
        check_self_adjointness(seed),
        check_gauge_covariance(seed),
        check_equivariance(seed),
        check_nullspace_regularization(seed),
        check_bordering_lemma(seed),
    ]
