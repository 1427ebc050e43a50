"""Structured tetrahedral meshes of the unit cube.

Every cube of an n x n x n grid is split into six tetrahedra sharing the
cube's main diagonal (Kuhn split).  Applying the same split in every cube
yields a conforming mesh: adjacent cubes induce the same diagonal on the
shared square face.
"""

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

__all__ = [
    "TetMesh",
    "build_cube_mesh",
    "element_geometry",
    "all_element_geometry",
    "fine_face_and_edge_adjacency",
    "face_table",
    "node_to_tets",
    "tets_containing_edge",
    "write_mesh_text",
]

# Axis permutations in lexicographic order; each defines one Kuhn tetrahedron
# of the unit cube, walking from (0,0,0) to (1,1,1) one axis at a time.
_KUHN_PERMS = tuple(permutations((0, 1, 2)))


@dataclass
class TetMesh:
    """P1 tetrahedral triangulation of [0,1]^3 on an n x n x n grid.

    Node i + (n+1)*j + (n+1)^2*k sits at (i*h, j*h, k*h).  Tets are stored
    as (T, 4) node indices with positive orientation.
    """

    n_per_axis: int
    h: float
    nodes: np.ndarray
    tets: np.ndarray
    boundary_nodes: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_tets(self) -> int:
        return self.tets.shape[0]

    def node_index(self, i, j, k):
        s = self.n_per_axis + 1
        return i + s * j + s * s * k


def build_cube_mesh(n_per_axis: int) -> TetMesh:
    """Build the Kuhn-split mesh with ``n_per_axis`` subdivisions per axis."""
    if n_per_axis < 1:
        raise ValueError("n_per_axis must be >= 1")
    n = int(n_per_axis)
    s = n + 1
    h = 1.0 / n

    axis = np.arange(s) * h
    # lexicographic node ordering: index = i + s*j + s^2*k
    kk, jj, ii = np.meshgrid(axis, axis, axis, indexing="ij")
    nodes = np.column_stack([ii.ravel(), jj.ravel(), kk.ravel()])

    # index offsets of the 8 cube corners relative to the cube origin node
    def corner_offset(c):
        return c[0] + s * c[1] + s * s * c[2]

    tet_offsets = []
    for perm in _KUHN_PERMS:
        corner = np.zeros(3, dtype=np.int64)
        walk = [corner.copy()]
        for ax in perm:
            corner[ax] += 1
            walk.append(corner.copy())
        offs = [corner_offset(c) for c in walk]
        # odd permutations produce negatively oriented tets; swap last two
        sign = np.linalg.det(np.asarray(walk[1:], dtype=float) - walk[0])
        if sign < 0:
            offs[2], offs[3] = offs[3], offs[2]
        tet_offsets.append(offs)
    tet_offsets = np.asarray(tet_offsets, dtype=np.int64)  # (6, 4)

    rng = np.arange(n, dtype=np.int64)
    ck, cj, ci = np.meshgrid(rng, rng, rng, indexing="ij")
    origins = (ci + s * cj + s * s * ck).ravel()  # cube origin node index
    tets = (origins[:, None, None] + tet_offsets[None, :, :]).reshape(-1, 4)

    on_bnd = (nodes == 0.0) | (nodes == 1.0)
    boundary_nodes = np.flatnonzero(on_bnd.any(axis=1))

    return TetMesh(n, h, nodes, tets.astype(np.int64), boundary_nodes)


def element_geometry(mesh: TetMesh, tet_index: int):
    """Volume and the four constant P1 basis gradients of one tet."""
    if not 0 <= tet_index < mesh.n_tets:
        raise IndexError(f"tet index {tet_index} out of range")
    x = mesh.nodes[mesh.tets[tet_index]]
    jac = (x[1:] - x[0]).T  # columns are edge vectors
    vol = abs(np.linalg.det(jac)) / 6.0
    ginv = np.linalg.inv(jac)  # rows are gradients of barycentric coords 1..3
    grads = np.empty((4, 3))
    grads[1:] = ginv
    grads[0] = -ginv.sum(axis=0)
    return vol, grads


def all_element_geometry(mesh: TetMesh):
    """Vectorized volumes (T,) and gradients (T, 4, 3) for every tet."""
    x = mesh.nodes[mesh.tets]  # (T, 4, 3)
    jac = np.transpose(x[:, 1:, :] - x[:, :1, :], (0, 2, 1))  # (T, 3, 3)
    vols = np.abs(np.linalg.det(jac)) / 6.0
    ginv = np.linalg.inv(jac)
    grads = np.empty((mesh.n_tets, 4, 3))
    grads[:, 1:, :] = ginv
    grads[:, 0, :] = -ginv.sum(axis=1)
    return vols, grads


def _encode_sorted(rows: np.ndarray, base: int) -> np.ndarray:
    rows = np.sort(rows, axis=1)
    key = rows[:, 0].astype(np.int64)
    for c in range(1, rows.shape[1]):
        key = key * base + rows[:, c]
    return key


def face_table(mesh: TetMesh):
    """Unique triangular faces and their owning tets.

    Returns ``(faces, owners)`` where ``faces`` is (F, 3) with sorted node
    triples and ``owners`` is (F, 2) tet indices, -1 marking a missing
    second owner (boundary face).  Cached on the mesh.
    """
    cached = mesh._cache.get("face_table")
    if cached is not None:
        return cached

    combos = np.array([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    tris = mesh.tets[:, combos].reshape(-1, 3)  # (4T, 3)
    keys = _encode_sorted(tris, mesh.n_nodes)
    order = np.argsort(keys, kind="stable")
    keys_sorted = keys[order]
    new = np.empty(keys_sorted.shape[0], dtype=bool)
    new[0] = True
    new[1:] = keys_sorted[1:] != keys_sorted[:-1]
    group = np.cumsum(new) - 1
    n_faces = group[-1] + 1

    first = np.flatnonzero(new)
    faces = np.sort(tris[order[first]], axis=1)
    owners = np.full((n_faces, 2), -1, dtype=np.int64)
    owners[:, 0] = order[first] // 4
    second_pos = np.flatnonzero(~new)
    owners[group[second_pos], 1] = order[second_pos] // 4

    mesh._cache["face_table"] = (faces, owners)
    mesh._cache["face_keys"] = keys_sorted[new]
    return faces, owners


def face_lookup(mesh: TetMesh, triangle) -> int:
    """Row of ``face_table`` holding the given node triple, or -1."""
    faces, _ = face_table(mesh)
    keys = mesh._cache["face_keys"]
    tri = np.sort(np.asarray(triangle, dtype=np.int64))
    key = (tri[0] * mesh.n_nodes + tri[1]) * mesh.n_nodes + tri[2]
    pos = int(np.searchsorted(keys, key))
    if pos >= len(keys) or keys[pos] != key:
        return -1
    return pos


def node_to_tets(mesh: TetMesh):
    """CSR map node -> incident tets: ``(indptr, tet_ids)``.  Cached."""
    cached = mesh._cache.get("node_to_tets")
    if cached is not None:
        return cached
    flat = mesh.tets.ravel()
    order = np.argsort(flat, kind="stable")
    tet_ids = order // 4
    counts = np.bincount(flat, minlength=mesh.n_nodes)
    indptr = np.concatenate([[0], np.cumsum(counts)])
    mesh._cache["node_to_tets"] = (indptr, tet_ids)
    return indptr, tet_ids


def tets_containing_edge(mesh: TetMesh, a: int, b: int) -> np.ndarray:
    """Tets having both nodes ``a`` and ``b`` as vertices."""
    indptr, tet_ids = node_to_tets(mesh)
    ta = tet_ids[indptr[a]:indptr[a + 1]]
    tb = tet_ids[indptr[b]:indptr[b + 1]]
    return np.intersect1d(ta, tb)


def fine_face_and_edge_adjacency(mesh: TetMesh):
    """Dict adjacency maps for fine faces and fine edges.

    Faces map a sorted node triple to its <= 2 owning tets; edges map a
    sorted node pair to all owning tets.  Intended for small meshes and
    verification; production paths use the array-based tables.
    """
    faces, owners = face_table(mesh)
    face_map = {}
    for f, own in zip(faces, owners):
        face_map[tuple(int(v) for v in f)] = tuple(int(t) for t in own if t >= 0)

    combos = np.array([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    pairs = np.sort(mesh.tets[:, combos].reshape(-1, 2), axis=1)
    keys = pairs[:, 0].astype(np.int64) * mesh.n_nodes + pairs[:, 1]
    order = np.argsort(keys, kind="stable")
    edge_map = {}
    prev_key = None
    for pos in order:
        key = keys[pos]
        pair = (int(pairs[pos, 0]), int(pairs[pos, 1]))
        tet = int(pos // 6)
        if key != prev_key:
            edge_map[pair] = [tet]
            prev_key = key
        elif edge_map[pair][-1] != tet:
            edge_map[pair].append(tet)
    return face_map, {k: tuple(v) for k, v in edge_map.items()}


def write_mesh_text(mesh: TetMesh, path) -> None:
    """Plain-text export: counts header, then one node or tet per line."""
    with open(path, "w") as fh:
        fh.write(f"{mesh.n_nodes} {mesh.n_tets}\n")
        for x, y, z in mesh.nodes:
            fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        for t in mesh.tets:
            fh.write(f"{t[0]} {t[1]} {t[2]} {t[3]}\n")
