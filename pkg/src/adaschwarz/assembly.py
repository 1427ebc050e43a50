"""Global P1 stiffness matrix, load vector, and Dirichlet elimination.

The stiffness form is sum_t alpha_t (grad u, grad v)_t; for constant f the
load is integrated exactly, f_i = f * (volume of the node star) / 4.
Homogeneous Dirichlet conditions are applied by restriction to interior
nodes, which keeps the reduced matrix symmetric positive definite.
"""

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp

from .coeff import CoefficientField
from .mesh import TetMesh, all_element_geometry

__all__ = [
    "AssembledSystem",
    "assemble_stiffness",
    "assemble_load",
    "eliminate_dirichlet",
    "write_matrix_market",
]


@dataclass
class AssembledSystem:
    """Reduced SPD system on interior nodes.

    ``interior_nodes`` lists the mesh nodes owning a DOF; ``dof_of_node``
    maps every mesh node to its DOF index or -1 on the boundary.
    """

    A: sp.csr_matrix
    rhs: np.ndarray
    interior_nodes: np.ndarray
    dof_of_node: np.ndarray

    @property
    def n_dofs(self) -> int:
        return self.A.shape[0]

    def embed(self, u_int: np.ndarray) -> np.ndarray:
        """Interior-DOF vector -> full nodal vector (zero on the boundary)."""
        full = np.zeros(len(self.dof_of_node))
        full[self.interior_nodes] = u_int
        return full

    def restrict(self, u_full: np.ndarray) -> np.ndarray:
        return u_full[self.interior_nodes]


def assemble_stiffness(mesh: TetMesh, field: CoefficientField) -> sp.csr_matrix:
    """Full (pre-Dirichlet) stiffness matrix A_ij = sum_t a_t grad_i.grad_j |t|."""
    if field.alpha.shape[0] != mesh.n_tets:
        raise ValueError("coefficient field does not match the mesh")
    vols, grads = all_element_geometry(mesh)
    scale = field.alpha * vols  # (T,)
    ke = np.einsum("t,tid,tjd->tij", scale, grads, grads)  # (T, 4, 4)
    rows = np.repeat(mesh.tets, 4, axis=1).ravel()
    cols = np.tile(mesh.tets, (1, 4)).ravel()
    a = sp.coo_matrix(
        (ke.ravel(), (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes)
    ).tocsr()
    a.sum_duplicates()
    # duplicate summation order may leave 1-ulp asymmetry; (A + A^T)/2 is
    # exactly symmetric since addition commutes and halving is exact
    return ((a + a.T) * 0.5).tocsr()


def assemble_load(mesh: TetMesh, f_constant: float) -> np.ndarray:
    """Exact nodal load for constant f: f_i = f * sum(|t|, t in star(i)) / 4."""
    vols, _ = all_element_geometry(mesh)
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.tets.ravel(), np.repeat(vols / 4.0, 4))
    return f_constant * out


def eliminate_dirichlet(a_full: sp.spmatrix, rhs_full: np.ndarray,
                        boundary_nodes: np.ndarray) -> AssembledSystem:
    """Restrict the full system to interior nodes (homogeneous BC)."""
    n = a_full.shape[0]
    mask = np.ones(n, dtype=bool)
    mask[boundary_nodes] = False
    interior = np.flatnonzero(mask)
    if interior.size == 0:
        raise ValueError(
            "no interior degrees of freedom: the mesh needs n_per_axis >= 2 "
            "for a nonempty homogeneous-Dirichlet problem"
        )
    dof_of_node = np.full(n, -1, dtype=np.int64)
    dof_of_node[interior] = np.arange(interior.size)
    a_int = a_full.tocsr()[interior][:, interior]
    return AssembledSystem(a_int, rhs_full[interior], interior, dof_of_node)


def write_matrix_market(system: AssembledSystem, directory, prefix="system") -> None:
    """Dump A (coordinate format, symmetric) and the rhs next to it."""
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    scipy.io.mmwrite(directory / f"{prefix}_A.mtx", system.A.tocoo(), symmetry="symmetric")
    scipy.io.mmwrite(directory / f"{prefix}_rhs.mtx", system.rhs.reshape(-1, 1))
