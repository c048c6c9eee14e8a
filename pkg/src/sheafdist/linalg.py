"""Dense exact linear algebra over a ground field.

Shapes are explicit so 0xN and Nx0 matrices behave; everything is Gaussian
elimination with exact field arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Matrix:
    field: object
    nrows: int
    ncols: int
    rows: tuple  # tuple of row tuples

    # --- constructors ---------------------------------------------------
    @staticmethod
    def from_rows(field, rows, ncols=None):
        rows = tuple(tuple(r) for r in rows)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise ValueError("ragged rows")
        elif ncols is None:
            raise ValueError("need ncols for a 0-row matrix")
        return Matrix(field, len(rows), ncols, rows)

    @staticmethod
    def zeros(field, nrows, ncols):
        z = field.zero()
        return Matrix(field, nrows, ncols, tuple((z,) * ncols for _ in range(nrows)))

    @staticmethod
    def identity(field, n):
        z, o = field.zero(), field.one()
        return Matrix(field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @staticmethod
    def col_vector(field, entries):
        return Matrix.from_rows(field, [(e,) for e in entries], ncols=1)

    # --- basics ----------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def is_zero(self) -> bool:
        f = self.field
        return all(f.is_zero(e) for r in self.rows for e in r)

    def eq(self, other) -> bool:
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        f = self.field
        return all(
            f.eq(self.rows[i][j], other.rows[i][j])
            for i in range(self.nrows)
            for j in range(self.ncols)
        )

    def transpose(self):
        return Matrix(self.field, self.ncols, self.nrows,
                      tuple(tuple(self.rows[i][j] for i in range(self.nrows)) for j in range(self.ncols)))

    def add(self, other):
        f = self.field
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        return Matrix(f, self.nrows, self.ncols,
                      tuple(tuple(f.add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)))

    def sub(self, other):
        f = self.field
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        return Matrix(f, self.nrows, self.ncols,
                      tuple(tuple(f.sub(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)))

    def scale(self, c):
        f = self.field
        return Matrix(f, self.nrows, self.ncols,
                      tuple(tuple(f.mul(c, a) for a in r) for r in self.rows))

    def mul(self, other):
        """self @ other."""
        f = self.field
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        ot = other.transpose().rows
        out = []
        for r in self.rows:
            row = []
            for c in ot:
                acc = f.zero()
                for a, b in zip(r, c):
                    if not f.is_zero(a) and not f.is_zero(b):
                        acc = f.add(acc, f.mul(a, b))
                row.append(acc)
            out.append(tuple(row))
        return Matrix(f, self.nrows, other.ncols, tuple(out))

    def hstack(self, other):
        assert self.nrows == other.nrows
        return Matrix(self.field, self.nrows, self.ncols + other.ncols,
                      tuple(ra + rb for ra, rb in zip(self.rows, other.rows)))

    # --- elimination -----------------------------------------------------
    def rref(self):
        """Reduced row echelon form; returns (rref_matrix, pivot_columns)."""
        f = self.field
        rows = [list(r) for r in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            pr = None
            for i in range(r, self.nrows):
                if not f.is_zero(rows[i][c]):
                    pr = i
                    break
            if pr is None:
                continue
            rows[r], rows[pr] = rows[pr], rows[r]
            inv = f.inv(rows[r][c])
            rows[r] = [f.mul(inv, e) for e in rows[r]]
            for i in range(self.nrows):
                if i != r and not f.is_zero(rows[i][c]):
                    factor = rows[i][c]
                    rows[i] = [f.sub(a, f.mul(factor, b)) for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return Matrix(f, self.nrows, self.ncols, tuple(tuple(rr) for rr in rows)), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self):
        """Basis of the right kernel, as a list of column vectors."""
        f = self.field
        R, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = [f.zero()] * self.ncols
            v[fc] = f.one()
            for r, pc in enumerate(pivots):
                v[pc] = f.neg(R.rows[r][fc])
            basis.append(Matrix.col_vector(f, v))
        return basis

    def solve(self, b):
        """One solution x of self @ x = b (b a column matrix), or None."""
        f = self.field
        assert b.nrows == self.nrows and b.ncols == 1
        aug = self.hstack(b)
        R, pivots = aug.rref()
        if self.ncols in pivots:
            return None
        x = [f.zero()] * self.ncols
        for r, pc in enumerate(pivots):
            x[pc] = R.rows[r][self.ncols]
        return Matrix.col_vector(f, x)
