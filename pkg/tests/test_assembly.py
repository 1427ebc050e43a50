import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp

from adaschwarz import assembly, coeff, mesh as msh

import oracles


def _setup(n, seed=None, background=1.0):
    m = msh.build_cube_mesh(n)
    f = coeff.assign(m, background)
    if seed is not None:
        rng = np.random.default_rng(seed)
        f.alpha = rng.uniform(0.5, 8.0, m.n_tets)
    return m, f


def test_row_sums_vanish():
    m, f = _setup(3, seed=5)
    a = assembly.assemble_stiffness(m, f)
    rs = np.asarray(a.sum(axis=1)).ravel()
    assert np.max(np.abs(rs)) < 1e-10


def test_structural_symmetry_and_scaling():
    m, f = _setup(2, seed=1)
    a = assembly.assemble_stiffness(m, f)
    assert (a != a.T).nnz == 0
    # power-of-two scaling is bit-exact end to end
    f2 = coeff.CoefficientField(2.0 * f.alpha, f.background, f.inclusions)
    d2 = assembly.assemble_stiffness(m, f2) - 2.0 * a
    assert d2.nnz == 0 or np.max(np.abs(d2.data)) == 0.0
    # generic scaling is linear to rounding
    f10 = coeff.CoefficientField(10.0 * f.alpha, f.background, f.inclusions)
    d10 = (assembly.assemble_stiffness(m, f10) - 10.0 * a).tocoo()
    assert d10.nnz == 0 or np.max(np.abs(d10.data)) < 1e-13 * np.max(np.abs(a.data))


def test_entries_match_direct_integration_oracle_n2():
    m, f = _setup(2)
    a = assembly.assemble_stiffness(m, f).tocoo()
    # check every stored entry against the independent per-element oracle
    for i, j, v in zip(a.row, a.col, a.data):
        want = oracles.stiffness_entry(m.nodes, m.tets, f.alpha, i, j, m.n_nodes)
        assert abs(v - want) < 1e-12


def test_energy_matches_quadratic_form_oracle_n3():
    m, f = _setup(3, seed=9)
    a = assembly.assemble_stiffness(m, f)
    # u = product of 1D hat functions centered mid-cube, interpolated at nodes
    hat = lambda t: np.maximum(0.0, 1.0 - 2.0 * np.abs(t - 0.5))
    u = hat(m.nodes[:, 0]) * hat(m.nodes[:, 1]) * hat(m.nodes[:, 2])
    energy = float(u @ (a @ u))
    want = oracles.stiffness_energy(m.nodes, m.tets, f.alpha, u)
    assert abs(energy - want) < 1e-10 * max(1.0, want)


def test_load_total_mass():
    m, _ = _setup(2)
    rhs = assembly.assemble_load(m, 100.0)
    assert abs(rhs.sum() - 100.0) < 1e-10
    assert np.all(assembly.assemble_load(m, 0.0) == 0.0)


def test_load_matches_quadrature_oracle_n2():
    m, _ = _setup(2)
    rhs = assembly.assemble_load(m, 100.0)
    want = oracles.load_quadrature(m.nodes, m.tets, 100.0)
    assert np.max(np.abs(rhs - want)) < 1e-10


def test_dirichlet_interior_counts():
    m2, f2 = _setup(2)
    a2 = assembly.assemble_stiffness(m2, f2)
    sys2 = assembly.eliminate_dirichlet(a2, assembly.assemble_load(m2, 1.0), m2.boundary_nodes)
    assert sys2.n_dofs == 1
    m4, f4 = _setup(4)
    a4 = assembly.assemble_stiffness(m4, f4)
    sys4 = assembly.eliminate_dirichlet(a4, assembly.assemble_load(m4, 1.0), m4.boundary_nodes)
    assert sys4.n_dofs == 27


def test_dirichlet_rejects_empty_interior():
    m, f = _setup(1)
    a = assembly.assemble_stiffness(m, f)
    with pytest.raises(ValueError, match="interior"):
        assembly.eliminate_dirichlet(a, assembly.assemble_load(m, 1.0), m.boundary_nodes)


def test_reduced_matrix_spd_n3():
    m, f = _setup(3, seed=2)
    a = assembly.assemble_stiffness(m, f)
    sys3 = assembly.eliminate_dirichlet(a, assembly.assemble_load(m, 1.0), m.boundary_nodes)
    w = np.linalg.eigvalsh(sys3.A.toarray())
    assert w.min() > 0
    rng = np.random.default_rng(0)
    for _ in range(100):
        v = rng.standard_normal(sys3.n_dofs)
        assert v @ (sys3.A @ v) > 0


def test_embed_restrict_roundtrip():
    m, f = _setup(2)
    a = assembly.assemble_stiffness(m, f)
    sysm = assembly.eliminate_dirichlet(a, assembly.assemble_load(m, 1.0), m.boundary_nodes)
    u = np.array([3.5])
    full = sysm.embed(u)
    assert full[m.boundary_nodes].sum() == 0.0
    assert np.array_equal(sysm.restrict(full), u)


def test_matrix_market_roundtrip(tmp_path):
    m, f = _setup(2, seed=4)
    a = assembly.assemble_stiffness(m, f)
    sysm = assembly.eliminate_dirichlet(a, assembly.assemble_load(m, 100.0), m.boundary_nodes)
    assembly.write_matrix_market(sysm, tmp_path)
    a_back = scipy.io.mmread(tmp_path / "system_A.mtx").tocsr()
    rhs_back = np.asarray(scipy.io.mmread(tmp_path / "system_rhs.mtx")).ravel()
    assert np.max(np.abs((a_back - sysm.A).toarray())) < 1e-15
    assert np.allclose(rhs_back, sysm.rhs)
    header = (tmp_path / "system_A.mtx").read_text().splitlines()[0]
    assert "coordinate" in header and "symmetric" in header
