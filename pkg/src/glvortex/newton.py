"""Newton iteration for the phase-regularized steady-state system.

The unknowns are the field psi and the scalar eta; the phase constraint
Im<psi0, psi> = 0 closes the square bordered system. Each step performs one
preconditioned Krylov solve on the realified bordered Jacobian. At regular
solutions the border removes the phase-symmetry zero eigenvalue, so the
iteration has the usual quadratic tail.

Reference policies for psi0: "fixed" keeps psi0 = 1, which is valid while
<1, psi> stays away from zero; "update" re-centers psi0 on the current
iterate every step (needed e.g. for center-vortex states, where <1, psi>
vanishes identically by rotation covariance); "auto" starts fixed and
switches permanently once the overlap drops below the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import glop
from .gauge import LinkField
from .grid import Grid, from_real, inner, norm, to_real
from .linalg import solve_general


@dataclass
class NewtonSettings:
    tol: float = 1e-10               # weighted extended-residual norm
    max_iter: int = 30
    divergence_factor: float = 1e4
    max_halvings: int = 5
    linear_tol: float = 1e-10
    linear_maxit: int = 4000
    reference_policy: str = "auto"   # fixed | update | auto
    switch_threshold: float = 1e-6
    trivial_norm: float = 1e-4
    precond_shift: float = 1.0


@dataclass
class Solution:
    psi: np.ndarray
    eta: float
    mu: float
    residual_norm: float
    iterations: int
    flag: str                        # converged | trivial | diverged | stalled | max_iter
    history: list = field(default_factory=list)
    policy: str = "fixed"
    linear_iterations: int = 0

    @property
    def converged(self) -> bool:
        return self.flag == "converged"


def update_reference(psi: np.ndarray) -> np.ndarray:
    """Re-center the phase constraint on the given state."""
    return np.array(psi, dtype=complex, copy=True)


def _pick_reference(grid: Grid, psi: np.ndarray, psi0: np.ndarray, policy: str,
                    threshold: float) -> tuple[np.ndarray, str]:
    if policy == "update":
        return update_reference(psi), "update"
    overlap = abs(inner(grid, psi0, psi))
    scale = norm(grid, psi0) * norm(grid, psi)
    if policy == "auto" and overlap < threshold * scale:
        return update_reference(psi), "update"
    return psi0, policy


def newton_solve(grid: Grid, links: LinkField, guess: np.ndarray,
                 settings: NewtonSettings | None = None,
                 psi0: np.ndarray | None = None, eta0: float = 0.0,
                 precond=None) -> Solution:
    """Solve the extended system at fixed field strength from the given guess."""
    st = settings or NewtonSettings()
    psi = np.ascontiguousarray(guess, dtype=complex)
    eta = float(eta0)
    ref = np.ones(grid.shape, dtype=complex) if psi0 is None else np.asarray(psi0, complex)
    policy = st.reference_policy
    if precond is None and st.precond_shift is not None:
        precond = glop.kinetic_preconditioner(grid, st.precond_shift)

    history: list[float] = []
    lin_total = 0
    mu = links.mu

    for it in range(st.max_iter + 1):
        ref, policy = _pick_reference(grid, psi, ref, policy, st.switch_threshold)
        r_field, r_scal = glop.residual_extended(grid, links, ref, psi, eta)
        rnorm = glop.extended_norm(grid, r_field, r_scal)
        history.append(rnorm)
        if rnorm <= st.tol:
            return Solution(psi, eta, mu, rnorm, it, "converged", history, policy, lin_total)
        if norm(grid, psi) < st.trivial_norm:
            return Solution(psi, eta, mu, rnorm, it, "trivial", history, policy, lin_total)
        if rnorm > st.divergence_factor * max(history[0], st.tol):
            return Solution(psi, eta, mu, rnorm, it, "diverged", history, policy, lin_total)
        if it == st.max_iter:
            break

        op = glop.extended_operator(grid, links, ref, psi, eta)
        rhs = -np.concatenate([to_real(r_field), [r_scal]])
        delta, rep = solve_general(op, rhs, tol=st.linear_tol, maxit=st.linear_maxit,
                                   precond=precond)
        lin_total += rep.iterations
        dpsi = from_real(grid, delta[:-1])
        deta = delta[-1]

        step = 1.0
        accepted = False
        for _ in range(st.max_halvings + 1):
            cand_psi = psi + step * dpsi
            cand_eta = eta + step * deta
            c_field, c_scal = glop.residual_extended(grid, links, ref, cand_psi, cand_eta)
            if glop.extended_norm(grid, c_field, c_scal) < rnorm:
                psi, eta = cand_psi, cand_eta
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return Solution(psi, eta, mu, rnorm, it + 1, "stalled", history, policy, lin_total)

    return Solution(psi, eta, mu, history[-1], st.max_iter, "max_iter", history,
                    policy, lin_total)


def with_policy(st: NewtonSettings, policy: str) -> NewtonSettings:
    return replace(st, reference_policy=policy)
