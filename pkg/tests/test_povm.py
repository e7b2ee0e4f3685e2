import numpy as np
import pytest

from phwitness.povm import (
    GELL_MANN,
    SIMPLEX_VECTORS,
    TETRAHEDRON,
    Povm,
    PovmError,
    dual_frame,
    expand,
    gram_matrix,
    partial_transpose_map,
    qubit_tetrahedron,
    qutrit_simplex,
    rotate,
    simplex_vertices,
    transpose_expansion,
)
from phwitness.unitaries import haar_unitary

S3 = 1 / np.sqrt(3)


def random_hermitian(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def lstsq_coefficients(op, povm):
    """Oracle: solve sum_i c_i F_i = op as a plain least-squares problem."""
    a = povm.elements.reshape(len(povm), -1).T
    c, *_ = np.linalg.lstsq(a, np.asarray(op).ravel(), rcond=None)
    return c


def test_tetrahedron_vectors():
    np.testing.assert_allclose(TETRAHEDRON[0], [S3, S3, S3])
    np.testing.assert_allclose(TETRAHEDRON[2], [-S3, S3, -S3])
    np.testing.assert_allclose(TETRAHEDRON.sum(axis=0), 0, atol=1e-15)
    np.testing.assert_allclose(np.linalg.norm(TETRAHEDRON, axis=1), 1, atol=1e-12)


def test_tetrahedron_effects():
    f = qubit_tetrahedron().check()
    np.testing.assert_allclose([np.trace(e).real for e in f.elements], 0.5)
    np.testing.assert_allclose(f.elements.sum(axis=0), np.eye(2), atol=1e-15)
    f1 = 0.25 * np.array([[1 + S3, (1 - 1j) * S3], [(1 + 1j) * S3, 1 - S3]])
    np.testing.assert_allclose(f[0], f1, atol=1e-15)


def test_tetrahedron_pairwise_traces():
    expected = np.where(np.eye(4, dtype=bool), 0.25, 1 / 12)
    np.testing.assert_allclose(gram_matrix(qubit_tetrahedron()), expected, atol=1e-14)


def test_simplex_vectors():
    v = SIMPLEX_VECTORS
    assert v.shape == (9, 8)
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1, atol=1e-12)
    np.testing.assert_allclose(v.sum(axis=0), 0, atol=1e-12)
    dots = v @ v.T
    np.testing.assert_allclose(dots[~np.eye(9, dtype=bool)], -1 / 8, atol=1e-12)
    np.testing.assert_allclose(simplex_vertices(), v, atol=1e-15)


def test_gell_mann_normalization():
    np.testing.assert_allclose(np.einsum("aij,bji->ab", GELL_MANN, GELL_MANN), 2 * np.eye(8), atol=1e-15)
    np.testing.assert_allclose(np.einsum("aii->a", GELL_MANN), 0, atol=1e-15)


def test_qutrit_simplex_effects():
    f = qutrit_simplex().check()
    assert len(f) == 9
    np.testing.assert_allclose([np.trace(e).real for e in f.elements], 1 / 3, atol=1e-15)
    np.testing.assert_allclose(f.elements.sum(axis=0), np.eye(3), atol=1e-14)
    assert min(np.linalg.eigvalsh(e).min() for e in f.elements) >= -1e-12


def test_qutrit_frame_symmetry():
    g = gram_matrix(qutrit_simplex())
    off = g[~np.eye(9, dtype=bool)]
    assert np.ptp(off) <= 1e-12
    assert np.ptp(np.diag(g)) <= 1e-12


def test_rotate_identity_and_inverse():
    p = qubit_tetrahedron()
    np.testing.assert_allclose(rotate(p, np.eye(2)).elements, p.elements)
    u = haar_unitary(3, np.random.default_rng(0))
    q = qutrit_simplex()
    back = rotate(rotate(q, u), u.conj().T)
    np.testing.assert_allclose(back.elements, q.elements, atol=1e-12)
    for e, r in zip(q.elements, rotate(q, u).elements):
        np.testing.assert_allclose(np.linalg.eigvalsh(e), np.linalg.eigvalsh(r), atol=1e-12)


@pytest.mark.parametrize("make, d", [(qubit_tetrahedron, 2), (qutrit_simplex, 3)])
def test_rotation_preserves_povm(make, d):
    rng = np.random.default_rng(d)
    p = make()
    for _ in range(100):
        rotate(p, haar_unitary(d, rng)).check()


def test_rotate_rejects_bad_matrices():
    with pytest.raises(PovmError):
        rotate(qubit_tetrahedron(), np.diag([1.0, 2.0]))
    with pytest.raises(PovmError):
        rotate(qubit_tetrahedron(), np.eye(3))


def test_povm_check_rejects():
    with pytest.raises(PovmError):
        Povm(np.eye(2)[None] * 0.5).check()
    with pytest.raises(PovmError):
        Povm(np.array([np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])])).check()


def test_dual_frame_reconstruction():
    q = qutrit_simplex()
    duals = dual_frame(q)
    np.testing.assert_allclose(np.einsum("i,iab->ab", expand(np.eye(3), q, duals), q.elements), np.eye(3), atol=1e-10)
    for lam in GELL_MANN:
        c = expand(lam, q, duals)
        np.testing.assert_allclose(c, lstsq_coefficients(lam, q), atol=1e-10)
        np.testing.assert_allclose(np.einsum("i,iab->ab", c, q.elements), lam, atol=1e-10)
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(100):
        o = random_hermitian(3, rng)
        rec = np.einsum("i,iab->ab", expand(o, q, duals), q.elements)
        worst = max(worst, np.max(np.abs(rec - o)))
    assert worst <= 1e-9


def test_dual_frame_qubit_and_errors():
    t = qubit_tetrahedron()
    o = random_hermitian(2, np.random.default_rng(1))
    np.testing.assert_allclose(np.einsum("i,iab->ab", expand(o, t), t.elements), o, atol=1e-12)
    with pytest.raises(PovmError):
        dual_frame(Povm(np.array([np.eye(3) / 3] * 9)))
    with pytest.raises(PovmError):
        dual_frame(Povm(np.array([np.eye(2) / 2] * 2)))


def test_tetrahedron_transpose_relations():
    t = qubit_tetrahedron()
    rel = partial_transpose_map(t)
    assert rel == [(0.5, 2), (0.5, 3), (0.5, 0), (0.5, 1)]
    for i, (s, j) in enumerate(rel):
        np.testing.assert_allclose(t[i].T + t[j], s * np.eye(2), atol=1e-14)
    # applying the permutation twice returns every index to itself
    perm = [j for _, j in rel]
    assert [perm[perm[i]] for i in range(4)] == [0, 1, 2, 3]


def test_qutrit_has_no_closed_transpose_map():
    with pytest.raises(PovmError):
        partial_transpose_map(qutrit_simplex())


def test_qutrit_transpose_expansion():
    q = qutrit_simplex()
    t = transpose_expansion(q)
    for i, f in enumerate(q.elements):
        np.testing.assert_allclose(np.einsum("j,jab->ab", t[i], q.elements), f.T, atol=1e-12)
