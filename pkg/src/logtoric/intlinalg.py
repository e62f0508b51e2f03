"""Exact integer linear algebra: Hermite/Smith normal forms and
finitely presented abelian groups.

Everything here works over arbitrary-precision Python ints.  No floats,
ever: the geometry downstream is exact and HNF pivots overflow fixed
width integers on very ordinary inputs.

Matrices are immutable tuples of tuples of ints, row major.  A matrix
``m`` is read as the map ``Z^cols -> Z^rows`` sending ``x`` to ``m @ x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    @staticmethod
    def from_rows(rows_list) -> "IntMatrix":
        rows_list = [tuple(int(x) for x in r) for r in rows_list]
        nrows = len(rows_list)
        ncols = len(rows_list[0]) if rows_list else 0
        if any(len(r) != ncols for r in rows_list):
            raise ValueError("ragged rows")
        return IntMatrix(nrows, ncols, tuple(rows_list))

    @staticmethod
    def zero(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.entries else ())

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ot = list(zip(*other.entries)) if other.entries else [()] * other.cols
        out = tuple(
            tuple(sum(a * b for a, b in zip(r, c)) for c in ot)
            for r in self.entries
        )
        return IntMatrix(self.rows, other.cols, out)

    def apply(self, vec) -> tuple:
        """m @ vec for a length-``cols`` integer vector."""
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.entries)

    def is_diagonal(self) -> bool:
        return all(
            self.entries[i][j] == 0
            for i in range(self.rows)
            for j in range(self.cols)
            if i != j
        )

    def diagonal(self) -> tuple:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))


def primitive(vec):
    """Divide an integer vector by the gcd of its entries.

    The zero vector has no primitive representative.
    """
    vec = tuple(int(x) for x in vec)
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("nonzero required")
    return tuple(x // g for x in vec)


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _negate_row(m, i):
    m[i] = [-x for x in m[i]]


def _add_row(m, dst, src, c):
    if c:
        row_s = m[src]
        m[dst] = [a + c * b for a, b in zip(m[dst], row_s)]


def hermite_normal_form(m: IntMatrix):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H = U @ m``, ``U`` unimodular, ``H`` in
    row echelon form with positive pivots and entries above each pivot
    reduced to ``0 <= entry < pivot``.
    """
    h = [list(r) for r in m.entries]
    u = [[1 if i == j else 0 for j in range(m.rows)] for i in range(m.rows)]
    pivot_row = 0
    for col in range(m.cols):
        # gcd out the column below the pivot row
        nz = [i for i in range(pivot_row, m.rows) if h[i][col] != 0]
        if not nz:
            continue
        # move a nonzero entry of least magnitude up, then eliminate
        while True:
            nz = [i for i in range(pivot_row, m.rows) if h[i][col] != 0]
            if len(nz) == 1:
                if nz[0] != pivot_row:
                    _swap_rows(h, pivot_row, nz[0])
                    _swap_rows(u, pivot_row, nz[0])
                break
            i_min = min(nz, key=lambda i: abs(h[i][col]))
            if i_min != pivot_row:
                _swap_rows(h, pivot_row, i_min)
                _swap_rows(u, pivot_row, i_min)
            p = h[pivot_row][col]
            done = True
            for i in range(pivot_row + 1, m.rows):
                if h[i][col] != 0:
                    q = h[i][col] // p
                    _add_row(h, i, pivot_row, -q)
                    _add_row(u, i, pivot_row, -q)
                    if h[i][col] != 0:
                        done = False
            if done:
                break
        if h[pivot_row][col] < 0:
            _negate_row(h, pivot_row)
            _negate_row(u, pivot_row)
        p = h[pivot_row][col]
        for i in range(pivot_row):
            q = h[i][col] // p  # floor division: leaves 0 <= remainder < p
            _add_row(h, i, pivot_row, -q)
            _add_row(u, i, pivot_row, -q)
        pivot_row += 1
        if pivot_row == m.rows:
            break
    H = IntMatrix.from_rows(h) if h else IntMatrix.zero(0, m.cols)
    U = IntMatrix.from_rows(u) if u else IntMatrix.zero(0, 0)
    return H, U


def _add_col(mat, dst, src, c):
    if c:
        for row in mat:
            row[dst] += c * row[src]


def _swap_cols(mat, i, j):
    for row in mat:
        row[i], row[j] = row[j], row[i]


def _diagonalize(d, u, v, nr, nc, start):
    """Diagonalize the trailing block of d from position ``start`` by
    unimodular row ops (mirrored in u) and column ops (mirrored in v)."""
    t = start
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = d[i][j]
                if x != 0 and (best is None or abs(x) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            _swap_rows(d, t, bi)
            _swap_rows(u, t, bi)
        if bj != t:
            _swap_cols(d, t, bj)
            _swap_cols(v, t, bj)
        # clear row and column t; a nonzero remainder becomes the new,
        # strictly smaller pivot, so this loop terminates
        while True:
            p = d[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if d[i][t] != 0:
                    q = d[i][t] // p
                    _add_row(d, i, t, -q)
                    _add_row(u, i, t, -q)
                    if d[i][t] != 0:
                        _swap_rows(d, t, i)
                        _swap_rows(u, t, i)
                        dirty = True
                        p = d[t][t]
            for j in range(t + 1, nc):
                if d[t][j] != 0:
                    q = d[t][j] // p
                    _add_col(d, j, t, -q)
                    _add_col(v, j, t, -q)
                    if d[t][j] != 0:
                        _swap_cols(d, t, j)
                        _swap_cols(v, t, j)
                        dirty = True
                        p = d[t][t]
            if not dirty:
                break
        if d[t][t] < 0:
            _negate_row(d, t)
            _negate_row(u, t)
        t += 1


def smith_normal_form(m: IntMatrix):
    """Smith normal form ``D = U @ m @ V`` with the divisibility chain.

    ``U`` and ``V`` are unimodular; ``D`` is diagonal with nonnegative
    entries ``d_1 | d_2 | ...``.
    """
    d = [list(r) for r in m.entries]
    nr, nc = m.rows, m.cols
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    _diagonalize(d, u, v, nr, nc, 0)

    # enforce the divisibility chain d_i | d_{i+1}: fold the offender
    # into column i and rediagonalize from i.  Each pass replaces d_i by
    # gcd(d_i, d_{i+1}), so the loop terminates.
    k = min(nr, nc)
    while True:
        violation = None
        for i in range(k - 1):
            a, b = d[i][i], d[i + 1][i + 1]
            if a != 0 and b % a != 0:
                violation = i
                break
        if violation is None:
            break
        _add_col(d, violation, violation + 1, 1)
        _add_col(v, violation, violation + 1, 1)
        _diagonalize(d, u, v, nr, nc, violation)

    D = IntMatrix.from_rows(d) if d else IntMatrix.zero(0, nc)
    U = IntMatrix.from_rows(u) if u else IntMatrix.zero(0, 0)
    V = IntMatrix.from_rows(v) if v else IntMatrix.zero(0, 0)
    return D, U, V


def det(m: IntMatrix) -> int:
    """Determinant of a square integer matrix, exactly."""
    if m.rows != m.cols:
        raise ValueError("square matrix required")
    a = [list(r) for r in m.entries]
    n = m.rows
    sign = 1
    result = 1
    for t in range(n):
        nz = [i for i in range(t, n) if a[i][t] != 0]
        if not nz:
            return 0
        while True:
            nz = [i for i in range(t, n) if a[i][t] != 0]
            if len(nz) == 1:
                if nz[0] != t:
                    _swap_rows(a, t, nz[0])
                    sign = -sign
                break
            i_min = min(nz, key=lambda i: abs(a[i][t]))
            if i_min != t:
                _swap_rows(a, t, i_min)
                sign = -sign
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    _add_row(a, i, t, -q)
        result *= a[t][t]
    return sign * result


def rank(m: IntMatrix) -> int:
    h, _ = hermite_normal_form(m)
    return sum(1 for r in h.entries if any(x != 0 for x in r))


def kernel_basis(m: IntMatrix):
    """Rows spanning the integer kernel ``{x : m @ x = 0}``.

    The returned lattice is saturated (it is the full kernel of the map,
    not an index-d sublattice).
    """
    h, u = hermite_normal_form(m.transpose())
    zero_rows = [i for i in range(h.rows) if all(x == 0 for x in h.entries[i])]
    return [u.row(i) for i in zero_rows]


def solve_integer(m: IntMatrix, target):
    """One integer solution ``x`` of ``m @ x = target``, or None.

    Works by column reduction: HNF of the transpose tracks the column
    operations, and back-substitution on the echelon rows decides
    divisibility.
    """
    h, u = hermite_normal_form(m.transpose())
    # rows of h are the reduced columns of m: m @ x = target has a solution
    # iff target is an integer combination of h's rows; then pull back by u.
    target = list(target)
    if len(target) != m.rows:
        raise ValueError("shape mismatch")
    coeffs = [0] * h.rows
    residue = list(target)
    for i in range(h.rows):
        row = h.entries[i]
        lead = next((j for j, x in enumerate(row) if x != 0), None)
        if lead is None:
            continue
        if residue[lead] % row[lead] != 0:
            return None
        c = residue[lead] // row[lead]
        coeffs[i] = c
        for j in range(m.rows):
            residue[j] -= c * row[j]
    if any(x != 0 for x in residue):
        return None
    # x = u^T @ coeffs
    x = [0] * m.cols
    for i, c in enumerate(coeffs):
        if c:
            for j in range(m.cols):
                x[j] += c * u.entries[i][j]
    return tuple(x)


def lattice_member(basis_rows, vec) -> bool:
    """Is ``vec`` in the integer row span of ``basis_rows``?"""
    if not basis_rows:
        return all(x == 0 for x in vec)
    m = IntMatrix.from_rows(basis_rows).transpose()
    return solve_integer(m, vec) is not None


_SNF_DIAG_CACHE: dict = {}


@dataclass(frozen=True)
class FPAbelianGroup:
    """Finitely presented abelian group `Z^ngens / row span of relations`.

    The Smith normal form of the relation matrix is computed once; rank
    and torsion read off its diagonal.
    """

    ngens: int
    relations: IntMatrix  # each row is one relation among the generators

    def __post_init__(self):
        if self.relations.cols != self.ngens and self.relations.rows != 0:
            raise ValueError("relation width must equal generator count")

    @property
    def _snf_diagonal(self):
        if self.relations not in _SNF_DIAG_CACHE:
            d, _, _ = smith_normal_form(self.relations)
            _SNF_DIAG_CACHE[self.relations] = d.diagonal()
        return _SNF_DIAG_CACHE[self.relations]

    @property
    def rank(self) -> int:
        diag = self._snf_diagonal
        nonzero = sum(1 for x in diag if x != 0)
        return self.ngens - nonzero

    @property
    def torsion(self):
        """Invariant factors > 1, in divisibility order."""
        return tuple(x for x in self._snf_diagonal if x > 1)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def invariants(self):
        return (self.rank, self.torsion)

    def __repr__(self):
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def cokernel(m: IntMatrix) -> FPAbelianGroup:
    """Z^rows / image(m), for m read as a map Z^cols -> Z^rows."""
    return FPAbelianGroup(m.rows, m.transpose())
