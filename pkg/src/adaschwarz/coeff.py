"""Piecewise-constant coefficient fields and the max-type interface weights.

The coefficient is one positive constant per tet, set from a background
value overlaid with axis-aligned box inclusions (later boxes win).  The
three derived weights are maxima of the per-tet values over a node star,
over the two tets sharing an interface triangle, and over the tets
containing a fine edge.
"""

from dataclasses import dataclass, field

import numpy as np

from .mesh import TetMesh, face_lookup, face_table, node_to_tets, tets_containing_edge

__all__ = [
    "InclusionSpec",
    "CoefficientField",
    "assign",
    "node_weight",
    "node_weights",
    "face_triangle_weight",
    "edge_segment_weight",
]


@dataclass(frozen=True)
class InclusionSpec:
    """Axis-aligned box [xlo,xhi]x[ylo,yhi]x[zlo,zhi] carrying one value."""

    bounds: tuple  # (xlo, xhi, ylo, yhi, zlo, zhi)
    value: float
    kind: str = "box"

    def __post_init__(self):
        b = self.bounds
        if len(b) != 6 or b[0] >= b[1] or b[2] >= b[3] or b[4] >= b[5]:
            raise ValueError(f"empty or malformed box bounds {b}")
        if self.value <= 0:
            raise ValueError("inclusion value must be positive")
        if self.kind != "box":
            raise ValueError(f"unknown inclusion kind {self.kind!r}")


@dataclass
class CoefficientField:
    alpha: np.ndarray  # (T,) per-tet values
    background: float
    inclusions: list = field(default_factory=list)


def assign(mesh: TetMesh, background: float, inclusions=()) -> CoefficientField:
    """Per-tet coefficient: value of the last inclusion box containing the
    tet barycenter, else the background."""
    if background <= 0:
        raise ValueError("background coefficient must be positive")
    inclusions = list(inclusions)
    bary = mesh.nodes[mesh.tets].mean(axis=1)
    alpha = np.full(mesh.n_tets, float(background))
    for inc in inclusions:
        xlo, xhi, ylo, yhi, zlo, zhi = inc.bounds
        mask = (
            (bary[:, 0] >= xlo) & (bary[:, 0] <= xhi)
            & (bary[:, 1] >= ylo) & (bary[:, 1] <= yhi)
            & (bary[:, 2] >= zlo) & (bary[:, 2] <= zhi)
        )
        alpha[mask] = inc.value
    return CoefficientField(alpha, float(background), inclusions)


def node_weights(field: CoefficientField, mesh: TetMesh) -> np.ndarray:
    """Vectorized max of alpha over the tet star of every node."""
    out = np.zeros(mesh.n_nodes)
    np.maximum.at(out, mesh.tets.ravel(), np.repeat(field.alpha, 4))
    return out


def node_weight(field: CoefficientField, mesh: TetMesh, node: int) -> float:
    """Max of alpha over tets having ``node`` as a vertex."""
    if not 0 <= node < mesh.n_nodes:
        raise IndexError(f"node {node} out of range")
    indptr, tet_ids = node_to_tets(mesh)
    star = tet_ids[indptr[node]:indptr[node + 1]]
    return float(field.alpha[star].max())


def face_triangle_weight(field: CoefficientField, mesh: TetMesh, triangle) -> float:
    """Max of the two coefficients on either side of an interface triangle.

    ``triangle`` is a 3-tuple of node indices; it must be an interior fine
    face (two owning tets)."""
    _, owners = face_table(mesh)
    pos = face_lookup(mesh, triangle)
    if pos < 0:
        raise ValueError(f"{tuple(triangle)} is not a fine face of the mesh")
    own = owners[pos]
    if own[1] < 0:
        raise ValueError(f"{tuple(triangle)} is a boundary face, not an interface triangle")
    return float(max(field.alpha[own[0]], field.alpha[own[1]]))


def edge_segment_weight(field: CoefficientField, mesh: TetMesh, edge) -> float:
    """Max of alpha over all tets whose closure contains the fine edge."""
    a, b = int(edge[0]), int(edge[1])
    tets = tets_containing_edge(mesh, a, b)
    if len(tets) == 0:
        raise ValueError(f"({a}, {b}) is not a fine edge of the mesh")
    return float(field.alpha[tets].max())
