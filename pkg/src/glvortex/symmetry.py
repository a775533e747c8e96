"""Square symmetries of the problem and isotropy bookkeeping.

The symmetry group of the discrete system is the product of the global phase
circle and the dihedral group of the square. The dihedral part is generated
by the quarter rotation r, (r psi)[i, j] = psi[j, -i], and the conjugate
reflection s, (s psi)[i, j] = conj(psi[-i, j]) (antiunitary). Elements are
written in the canonical form s^a r^k and named e, r, r2, r3, s, sr, sr2,
sr3, where sr means "rotate, then reflect".

Branch labels use the conjugacy class of the isotropy subgroup: the two
axis-mirror subgroups share the label <s>, the two diagonal-mirror subgroups
share <sr>.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, inner, norm

ELEMENTS = ("e", "r", "r2", "r3", "s", "sr", "sr2", "sr3")

_DECODE = {name: (a, k) for name, (a, k) in zip(
    ELEMENTS, [(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1), (1, 2), (1, 3)])}
_ENCODE = {v: k for k, v in _DECODE.items()}


def compose(g1: str, g2: str) -> str:
    """Group product g1 g2, acting as act(g1, act(g2, .))."""
    a1, k1 = _DECODE[g1]
    a2, k2 = _DECODE[g2]
    # r^k s = s r^(-k) moves all reflections to the front
    if a2:
        return _ENCODE[((a1 + a2) % 2, (k2 - k1) % 4)]
    return _ENCODE[(a1, (k1 + k2) % 4)]


def inverse(g: str) -> str:
    a, k = _DECODE[g]
    return g if a else _ENCODE[(0, (-k) % 4)]


def act(g: str, psi: np.ndarray) -> np.ndarray:
    """Apply a dihedral element to a node field."""
    a, k = _DECODE[g]
    out = psi
    for _ in range(k):
        out = out[:, ::-1].T          # out[i, j] = psi[j, -i]
    if a:
        out = np.conj(out[::-1, :])   # out[i, j] = conj(psi[-i, j])
    return np.ascontiguousarray(out)


# subgroups keyed by canonical label; conjugate subgroups share a label
SUBGROUPS: dict[str, tuple[frozenset, ...]] = {
    "D4": (frozenset(ELEMENTS),),
    "<r>": (frozenset({"e", "r", "r2", "r3"}),),
    "<r2,s>": (frozenset({"e", "r2", "s", "sr2"}),),
    "<r2,sr>": (frozenset({"e", "r2", "sr", "sr3"}),),
    "<r2>": (frozenset({"e", "r2"}),),
    "<s>": (frozenset({"e", "s"}), frozenset({"e", "sr2"})),
    "<sr>": (frozenset({"e", "sr"}), frozenset({"e", "sr3"})),
    "trivial": (frozenset({"e"}),),
}

_LABEL_ORDER = ("D4", "<r>", "<r2,s>", "<r2,sr>", "<r2>", "<s>", "<sr>", "trivial")


def aligned_distance(grid: Grid, psi: np.ndarray, g: str) -> float:
    """Distance of act(g, psi) to the phase orbit of psi, relative to |psi|."""
    npsi = norm(grid, psi)
    if npsi == 0.0:
        return 0.0
    overlap = abs(inner(grid, psi, act(g, psi)))
    return float(np.sqrt(max(2.0 * (npsi**2 - overlap), 0.0)) / npsi)


def orbit_distance(grid: Grid, a: np.ndarray, b: np.ndarray) -> float:
    """Distance between two fields modulo a global phase factor.

    min over chi of |a - e^(i chi) b| in the quadrature norm.
    """
    na2 = norm(grid, a) ** 2
    nb2 = norm(grid, b) ** 2
    overlap = abs(inner(grid, a, b))
    return float(np.sqrt(max(na2 + nb2 - 2.0 * overlap, 0.0)))


def isotropy(grid: Grid, psi: np.ndarray, tol: float = 1e-6) -> tuple[str, dict[str, float]]:
    """Label of the largest dihedral subgroup fixing psi modulo phase."""
    dist = {g: aligned_distance(grid, psi, g) for g in ELEMENTS}
    for label in _LABEL_ORDER:
        for variant in SUBGROUPS[label]:
            if all(dist[g] <= tol for g in variant):
                return label, dist
    return "trivial", dist


def optimal_phase(grid: Grid, psi: np.ndarray, g: str) -> float:
    """chi minimizing |act(g, psi) - e^(i chi) psi|."""
    z = inner(grid, psi, act(g, psi))
    return float(np.angle(z)) if abs(z) > 0 else 0.0


def project_fixed_space(grid: Grid, psi: np.ndarray, elements) -> np.ndarray:
    """Phase-aligned average of the orbit of psi under the given elements.

    For fields close to a subgroup-symmetric state this is the projection
    onto its fixed space (idempotent there); phases far from alignable
    fields are ill-posed and no attempt is made to repair that.
    """
    acc = np.zeros_like(np.asarray(psi, dtype=complex))
    for g in elements:
        acc += np.exp(-1j * optimal_phase(grid, psi, g)) * act(g, psi)
    return acc / len(elements)


def subgroup_elements(label: str, variant: int = 0) -> frozenset:
    return SUBGROUPS[label][variant]


def equivariance_residual(grid: Grid, links, psi: np.ndarray, g: str) -> float:
    """|residual(act(g, psi)) - act(g, residual(psi))| in the weighted norm."""
    from .glop import residual

    gap = residual(grid, links, act(g, psi)) - act(g, residual(grid, links, psi))
    return norm(grid, gap)
