"""Padded sparse storage formats and their matvec kernels.

Three formats are provided, each storing a fixed number ``k`` of slots per
row, column, or diagonal (unused value slots are zero):

* ``RowCompressed``  -- n x k value grid plus an n x k column-index grid;
* ``ColCompressed``  -- k x n value grid plus a k x n row-index grid;
* ``DiagCompressed`` -- n x k value grid plus k signed diagonal offsets
  (offset = column - row, 0 for the main diagonal).

These are dense k-wide panels with a uniform k, not general CSR/CSC with
pointer arrays; matrices with one unusually full row pay for it in padding.
Index grids are padded by repeating the last used index of the row/column
(or the row/column's own index when it is empty) so that padded slots read
adjacent memory.  All indices are 0-based in memory; MatrixMarket files are
1-based on disk.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class Triplets:
    """Coordinate-form matrix: entry lists (rows, cols, vals) on an n x n grid.

    Duplicate coordinates are allowed; they are summed when a storage format
    is built (see :func:`build`).
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int64).ravel()
        self.cols = np.asarray(self.cols, dtype=np.int64).ravel()
        self.vals = np.asarray(self.vals, dtype=float).ravel()
        if not (self.rows.size == self.cols.size == self.vals.size):
            raise ValueError("rows, cols, vals must have equal length")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.rows.size and (
            self.rows.min() < 0 or self.rows.max() >= self.n
            or self.cols.min() < 0 or self.cols.max() >= self.n
        ):
            raise ValueError("triplet index out of range")
        if self.vals.size and not np.all(np.isfinite(self.vals)):
            raise ValueError("non-finite triplet value")

    def coalesced(self):
        """Duplicate-summed copy, sorted by (row, col)."""
        if self.rows.size == 0:
            return Triplets(self.n, [], [], [])
        key = self.rows * self.n + self.cols
        uniq, inverse = np.unique(key, return_inverse=True)
        vals = np.bincount(inverse, weights=self.vals, minlength=uniq.size)
        return Triplets(self.n, uniq // self.n, uniq % self.n, vals)

    def to_dense(self):
        a = np.zeros((self.n, self.n))
        np.add.at(a, (self.rows, self.cols), self.vals)
        return a

    @property
    def nnz(self):
        return int(np.count_nonzero(self.coalesced().vals))


@dataclass
class RowCompressed:
    """Row-compressed padded storage (k = max nonzeros per row)."""

    n: int
    k: int
    vals: np.ndarray  # (n, k) floats, unused slots 0
    cols: np.ndarray  # (n, k) column indices, padded by repetition

    def matvec(self, x):
        x = _check_dim(x, self.n)
        return (self.vals * x[self.cols]).sum(axis=1)

    def rmatvec(self, x):
        x = _check_dim(x, self.n)
        y = np.zeros(self.n)
        np.add.at(y, self.cols, self.vals * x[:, None])
        return y

    def to_triplets(self):
        mask = self.vals != 0.0
        r = np.broadcast_to(np.arange(self.n)[:, None], self.vals.shape)
        return Triplets(self.n, r[mask], self.cols[mask], self.vals[mask])

    def to_dense(self):
        return self.to_triplets().to_dense()


@dataclass
class ColCompressed:
    """Column-compressed padded storage (k = max nonzeros per column)."""

    n: int
    k: int
    vals: np.ndarray  # (k, n) floats, unused slots 0
    rows: np.ndarray  # (k, n) row indices, padded by repetition

    def matvec(self, x):
        x = _check_dim(x, self.n)
        y = np.zeros(self.n)
        np.add.at(y, self.rows, self.vals * x[None, :])
        return y

    def rmatvec(self, x):
        x = _check_dim(x, self.n)
        return (self.vals * x[self.rows]).sum(axis=0)

    def to_triplets(self):
        mask = self.vals != 0.0
        c = np.broadcast_to(np.arange(self.n)[None, :], self.vals.shape)
        return Triplets(self.n, self.rows[mask], c[mask], self.vals[mask])

    def to_dense(self):
        return self.to_triplets().to_dense()


@dataclass
class DiagCompressed:
    """Diagonal-compressed padded storage (k = number of stored diagonals).

    ``offsets[r]`` holds the signed index (column - row) of the diagonal
    stored in ``vals[:, r]``; ``vals[i, r]`` is the entry on row ``i`` of
    that diagonal and must be 0 where ``i + offsets[r]`` leaves the grid.
    Offsets are kept sorted ascending.
    """

    n: int
    k: int
    vals: np.ndarray     # (n, k)
    offsets: np.ndarray  # (k,) signed, pairwise distinct

    def matvec(self, x):
        x = _check_dim(x, self.n)
        y = np.zeros(self.n)
        n = self.n
        for r, nu in enumerate(self.offsets):
            nu = int(nu)
            start = max(0, -nu)
            end = min(n, n - nu)
            y[start:end] += self.vals[start:end, r] * x[start + nu:end + nu]
        return y

    def rmatvec(self, x):
        x = _check_dim(x, self.n)
        y = np.zeros(self.n)
        n = self.n
        for r, nu in enumerate(self.offsets):
            nu = int(nu)
            start = max(0, -nu)
            end = min(n, n - nu)
            y[start + nu:end + nu] += self.vals[start:end, r] * x[start:end]
        return y

    def to_triplets(self):
        rows, cols, vals = [], [], []
        n = self.n
        for r, nu in enumerate(self.offsets):
            nu = int(nu)
            start = max(0, -nu)
            end = min(n, n - nu)
            seg = self.vals[start:end, r]
            mask = seg != 0.0
            idx = np.arange(start, end)[mask]
            rows.append(idx)
            cols.append(idx + nu)
            vals.append(seg[mask])
        if not rows:
            return Triplets(n, [], [], [])
        return Triplets(n, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))

    def to_dense(self):
        return self.to_triplets().to_dense()


def _check_dim(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"vector has shape {x.shape}, expected ({n},)")
    return x


def matvec_row(a: RowCompressed, x):
    return a.matvec(x)


def matvec_col(a: ColCompressed, x):
    return a.matvec(x)


def matvec_diag(a: DiagCompressed, x):
    return a.matvec(x)


def build(triplets: Triplets, target: str):
    """Assemble a storage format from triplets (duplicates summed).

    ``target`` is one of "row", "col", "diag", "dense".
    """
    t = triplets.coalesced()
    n = t.n
    if target == "dense":
        return t.to_dense()
    if target == "row":
        k = max(1, int(np.max(np.bincount(t.rows, minlength=n))) if t.rows.size else 1)
        vals = np.zeros((n, k))
        cols = np.tile(np.arange(n)[:, None], (1, k))  # empty row: repeat own index
        slot = np.zeros(n, dtype=np.int64)
        for i, j, v in zip(t.rows, t.cols, t.vals):  # coalesced order = by (row, col)
            s = slot[i]
            vals[i, s] = v
            cols[i, s] = j
            slot[i] += 1
        for i in range(n):  # padding repeats the last used column index
            if 0 < slot[i] < k:
                cols[i, slot[i]:] = cols[i, slot[i] - 1]
        return RowCompressed(n, k, vals, cols)
    if target == "col":
        k = max(1, int(np.max(np.bincount(t.cols, minlength=n))) if t.cols.size else 1)
        vals = np.zeros((k, n))
        rows = np.tile(np.arange(n)[None, :], (k, 1))
        order = np.lexsort((t.rows, t.cols))
        slot = np.zeros(n, dtype=np.int64)
        for e in order:
            i, j, v = t.rows[e], t.cols[e], t.vals[e]
            s = slot[j]
            vals[s, j] = v
            rows[s, j] = i
            slot[j] += 1
        for j in range(n):
            if 0 < slot[j] < k:
                rows[slot[j]:, j] = rows[slot[j] - 1, j]
        return ColCompressed(n, k, vals, rows)
    if target == "diag":
        if t.rows.size == 0:
            return DiagCompressed(n, 1, np.zeros((n, 1)), np.array([0]))
        offs = np.unique(t.cols - t.rows)
        k = offs.size
        vals = np.zeros((n, k))
        pos = {int(nu): r for r, nu in enumerate(offs)}
        for i, j, v in zip(t.rows, t.cols, t.vals):
            vals[i, pos[int(j - i)]] = v
        return DiagCompressed(n, k, vals, offs)
    raise ValueError(f"unknown storage target {target!r}")


def to_triplets(a):
    """Triplets view of any supported matrix representation."""
    if isinstance(a, Triplets):
        return a
    if isinstance(a, (RowCompressed, ColCompressed, DiagCompressed)):
        return a.to_triplets()
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    r, c = np.nonzero(a)
    return Triplets(a.shape[0], r, c, a[r, c])


def to_dense(a):
    if isinstance(a, np.ndarray):
        return a
    return to_triplets(a).to_dense()


def operator_size(a, b=None):
    """Dimension of a matrix-like or callable operator (falls back to len(b))."""
    if isinstance(a, (Triplets, RowCompressed, ColCompressed, DiagCompressed)):
        return a.n
    if isinstance(a, np.ndarray):
        return a.shape[0]
    if hasattr(a, "n"):
        return a.n
    if b is not None:
        return len(b)
    raise ValueError("cannot infer operator size")


def as_matvec(a):
    """Callable ``x -> A x`` for an ndarray, storage object, or callable."""
    if callable(a) and not isinstance(a, np.ndarray) and not hasattr(a, "matvec"):
        return a
    if hasattr(a, "matvec"):
        return a.matvec
    arr = np.asarray(a, dtype=float)
    return lambda x: arr @ x


def as_rmatvec(a):
    """Callable ``x -> A' x``; raises for a bare callable with no transpose."""
    if hasattr(a, "rmatvec"):
        return a.rmatvec
    if isinstance(a, np.ndarray) or not callable(a):
        arr = np.asarray(a, dtype=float)
        return lambda x: arr.T @ x
    raise ValueError("operator does not expose a transpose action")


_MM_GENERAL = "%%MatrixMarket matrix coordinate real general"
_MM_SYMMETRIC = "%%MatrixMarket matrix coordinate real symmetric"


def read_matrix_market(text: str) -> Triplets:
    """Parse MatrixMarket coordinate real (general or symmetric) text.

    Symmetric files store the lower triangle; the strictly-lower entries are
    mirrored on read.  Indices are 1-based on disk, 0-based in the result.
    """
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty MatrixMarket input")
    header = lines[0].rstrip()
    if header == _MM_GENERAL:
        symmetric = False
    elif header == _MM_SYMMETRIC:
        symmetric = True
    else:
        raise ValueError(f"unsupported MatrixMarket header: {header!r}")
    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ValueError("missing size line")
    size = body[0].split()
    if len(size) != 3:
        raise ValueError(f"malformed size line: {body[0]!r}")
    try:
        nrows, ncols, nnz = (int(tok) for tok in size)
    except ValueError as exc:
        raise ValueError(f"malformed size line: {body[0]!r}") from exc
    if nrows != ncols:
        raise ValueError("only square matrices are supported")
    if len(body) - 1 != nnz:
        raise ValueError(f"expected {nnz} entries, found {len(body) - 1}")
    rows, cols, vals = [], [], []
    for ln in body[1:]:
        tok = ln.split()
        if len(tok) != 3:
            raise ValueError(f"malformed entry line: {ln!r}")
        try:
            i, j, v = int(tok[0]), int(tok[1]), float(tok[2])
        except ValueError as exc:
            raise ValueError(f"malformed entry line: {ln!r}") from exc
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise ValueError(f"index out of range in line {ln!r}")
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(v)
        if symmetric and i != j:
            rows.append(j - 1)
            cols.append(i - 1)
            vals.append(v)
    return Triplets(nrows, rows, cols, vals)


def write_matrix_market(triplets: Triplets) -> str:
    """Serialize triplets as MatrixMarket coordinate real general text.

    Entries are coalesced, sorted by (row, column), written 1-based with 17
    significant digits.
    """
    t = triplets.coalesced()
    out = [_MM_GENERAL, f"{t.n} {t.n} {t.rows.size}"]
    for i, j, v in zip(t.rows, t.cols, t.vals):
        out.append(f"{i + 1} {j + 1} {v:.17g}")
    return "\n".join(out) + "\n"
