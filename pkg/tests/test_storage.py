import numpy as np
import pytest

from krylov.storage import (DiagCompressed, RowCompressed,
                            Triplets, build, read_matrix_market, to_dense,
                            to_triplets, write_matrix_market)
from krylov.problems import poisson_test


def random_triplets(n, density, rng):
    mask = rng.random((n, n)) < density
    dense = np.where(mask, rng.standard_normal((n, n)), 0.0)
    r, c = np.nonzero(dense)
    return Triplets(n, r, c, dense[r, c]), dense


def test_row_identity():
    a = build(Triplets(3, [0, 1, 2], [0, 1, 2], [1.0, 1.0, 1.0]), "row")
    assert a.k == 1
    x = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(a.matvec(x), x)


def test_row_poisson_matches_dense():
    inst = poisson_test(3)
    t = to_triplets(inst.a)
    a_row = build(t, "row")
    dense = to_dense(inst.a)
    x = np.ones(9)
    np.testing.assert_allclose(a_row.matvec(x), dense @ x, rtol=1e-14, atol=1e-14)


def test_row_random_matches_dense(rng):
    t, dense = random_triplets(8, 0.3, rng)
    a = build(t, "row")
    x = rng.standard_normal(8)
    y = dense @ x
    np.testing.assert_allclose(a.matvec(x), y, rtol=1e-14, atol=1e-14 * np.abs(y).max())


def test_col_identity_and_zero_column():
    a = build(Triplets(3, [0, 1, 2], [0, 1, 2], [1.0, 1.0, 1.0]), "col")
    x = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(a.matvec(x), x)
    # a column with no entries contributes nothing
    t = Triplets(3, [0, 1], [0, 0], [2.0, 3.0])
    a = build(t, "col")
    np.testing.assert_allclose(a.matvec(np.array([1.0, 5.0, 7.0])), [2.0, 3.0, 0.0])


def test_col_matches_row_on_poisson():
    inst = poisson_test(3)
    t = to_triplets(inst.a)
    x = np.linspace(-1, 1, 9)
    y_row = build(t, "row").matvec(x)
    y_col = build(t, "col").matvec(x)
    np.testing.assert_allclose(y_col, y_row, rtol=1e-15, atol=1e-15)


def test_diag_single_diagonal():
    d = np.array([2.0, 3.0, 4.0])
    a = DiagCompressed(3, 1, d.reshape(3, 1), np.array([0]))
    x = np.array([1.0, 1.0, 2.0])
    np.testing.assert_allclose(a.matvec(x), d * x)


def test_diag_tridiagonal_row_sums():
    # T_4 = tridiag(-1, 2, -1): row sums are (1, 0, 0, 1)
    t = Triplets(4,
                 [0, 0, 1, 1, 1, 2, 2, 2, 3, 3],
                 [0, 1, 0, 1, 2, 1, 2, 3, 2, 3],
                 [2.0, -1.0, -1.0, 2.0, -1.0, -1.0, 2.0, -1.0, -1.0, 2.0])
    a = build(t, "diag")
    np.testing.assert_allclose(a.matvec(np.ones(4)), [1.0, 0.0, 0.0, 1.0])


def test_diag_poisson_matches_dense(rng):
    inst = poisson_test(5)
    dense = to_dense(inst.a)
    x = rng.standard_normal(25)
    y = dense @ x
    np.testing.assert_allclose(inst.a.matvec(x), y,
                               rtol=1e-14, atol=1e-14 * np.abs(dense).max())


def test_build_empty_triplets_degenerate_rows():
    a = build(Triplets(3, [], [], []), "row")
    assert a.k == 1
    assert np.all(a.vals == 0.0)
    np.testing.assert_array_equal(a.cols[:, 0], [0, 1, 2])


def test_build_sums_duplicates():
    a = build(Triplets(2, [0, 0], [0, 0], [1.0, 2.0]), "row")
    assert a.vals[0, 0] == 3.0
    assert a.to_triplets().vals.tolist() == [3.0]


def test_build_poisson_diag_structure():
    inst = poisson_test(3)
    assert inst.a.k == 5
    np.testing.assert_array_equal(inst.a.offsets, [-3, -1, 0, 1, 3])


def test_padding_repeats_last_used_index():
    t = Triplets(4, [0, 0, 2], [1, 3, 2], [5.0, -2.0, 7.0])
    a = build(t, "row")
    np.testing.assert_array_equal(a.cols[0], [1, 3])
    np.testing.assert_array_equal(a.cols[1], [1, 1])  # empty row: own index
    np.testing.assert_array_equal(a.cols[2], [2, 2])


def test_padded_slots_are_inert(rng):
    # padded value slots are exactly zero, so rewriting the padded column
    # indices to arbitrary valid positions cannot change the product
    t, dense = random_triplets(10, 0.15, rng)
    a = build(t, "row")
    x = rng.standard_normal(10)
    y_ref = a.matvec(x)
    used = np.array([[v != 0.0 for v in row] for row in a.vals])
    cols = a.cols.copy()
    cols[~used] = rng.integers(0, 10, size=int((~used).sum()))
    hacked = RowCompressed(a.n, a.k, a.vals, cols)
    np.testing.assert_array_equal(hacked.matvec(x), y_ref)


@pytest.mark.parametrize("fmt", ["row", "col", "diag"])
def test_cross_format_equivalence(fmt, rng):
    for _ in range(50):
        n = int(rng.integers(1, 33))
        t, dense = random_triplets(n, float(rng.uniform(0.05, 0.5)), rng)
        x = rng.standard_normal(n)
        y_ref = dense @ x
        scale = max(np.abs(dense).max() * np.abs(x).max(), 1e-30)
        y = build(t, fmt).matvec(x)
        assert np.abs(y - y_ref).max() <= 1e-13 * scale


@pytest.mark.parametrize("fmt", ["row", "col", "diag"])
def test_build_extract_round_trip(fmt, rng):
    t, dense = random_triplets(12, 0.25, rng)
    a = build(t, fmt)
    rebuilt = build(a.to_triplets(), fmt)
    for _ in range(50):
        x = rng.standard_normal(12)
        np.testing.assert_array_equal(a.matvec(x), rebuilt.matvec(x))


def test_rmatvec_matches_dense_transpose(rng):
    t, dense = random_triplets(9, 0.3, rng)
    x = rng.standard_normal(9)
    for fmt in ("row", "col", "diag"):
        a = build(t, fmt)
        np.testing.assert_allclose(a.rmatvec(x), dense.T @ x, rtol=1e-13, atol=1e-13)


def test_matrix_market_single_entry():
    t = read_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 5.0\n")
    assert t.n == 1
    assert (t.rows.tolist(), t.cols.tolist(), t.vals.tolist()) == ([0], [0], [5.0])


def test_matrix_market_symmetric_expansion():
    text = ("%%MatrixMarket matrix coordinate real symmetric\n"
            "2 2 3\n1 1 2.0\n2 2 3.0\n2 1 -1.0\n")
    t = read_matrix_market(text)
    np.testing.assert_allclose(to_dense(t), [[2.0, -1.0], [-1.0, 3.0]])


def test_matrix_market_round_trip(rng):
    t, _ = random_triplets(20, 0.2, rng)
    t = t.coalesced()
    t2 = read_matrix_market(write_matrix_market(t)).coalesced()
    np.testing.assert_array_equal(t.rows, t2.rows)
    np.testing.assert_array_equal(t.cols, t2.cols)
    np.testing.assert_array_equal(t.vals, t2.vals)


@pytest.mark.parametrize("text", [
    "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 5.0\n",
    "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 5.0\n",
    "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n",
    "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1.0\n",
])
def test_matrix_market_rejects_malformed(text):
    with pytest.raises(ValueError):
        read_matrix_market(text)


def test_triplets_validation():
    with pytest.raises(ValueError):
        Triplets(2, [0], [2], [1.0])
    with pytest.raises(ValueError):
        Triplets(2, [0], [0], [np.inf])
