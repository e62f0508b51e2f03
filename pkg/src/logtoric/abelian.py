"""Quotients of Z^n by many sparse relations.

The colimit groups glue hundreds of Chow presentations with one
transition relation per generator and edge; almost every relation has a
±1 pivot, so the presentation collapses by substitution to a small
dense core where Smith normal form is cheap.  The eliminations are kept
so arbitrary vectors can be pushed down to core coordinates exactly.
"""

from __future__ import annotations


from .intlinalg import (
    FPAbelianGroup,
    IntMatrix,
    hermite_normal_form,
    solve_integer,
)


class Presentation:
    """Z^ngens modulo sparse relation rows (dicts column -> value)."""

    def __init__(self, ngens: int, rows):
        self.ngens = ngens
        self._eliminations = []  # (col, {col2: coeff}) meaning e_col = sum coeff*e_col2
        self._simplify([dict(r) for r in rows])

    def _simplify(self, rows):
        rows = [r for r in (self._clean(r) for r in rows) if r]
        col_rows = {}
        for ri, r in enumerate(rows):
            for c in r:
                col_rows.setdefault(c, set()).add(ri)
        alive = set(range(len(rows)))
        eliminated_cols = set()
        while True:
            pick = None
            for ri in sorted(alive):
                r = rows[ri]
                for c in sorted(r):
                    if abs(r[c]) == 1:
                        pick = (ri, c)
                        break
                if pick:
                    break
            if pick is None:
                break
            ri, c = pick
            r = rows[ri]
            sign = r[c]
            # e_c = -sign * (rest of the row)
            expr = {c2: -sign * v for c2, v in r.items() if c2 != c}
            self._eliminations.append((c, expr))
            eliminated_cols.add(c)
            alive.discard(ri)
            for other in list(col_rows.get(c, ())):
                if other == ri or other not in alive:
                    continue
                row_o = rows[other]
                k = row_o.pop(c, 0)
                if k:
                    for c2, v in expr.items():
                        row_o[c2] = row_o.get(c2, 0) + k * v
                        if row_o[c2] == 0:
                            del row_o[c2]
                        else:
                            col_rows.setdefault(c2, set()).add(other)
                if not row_o:
                    alive.discard(other)
            col_rows.pop(c, None)

        self.core_cols = sorted(
            set(range(self.ngens)) - eliminated_cols
        )
        self._col_pos = {c: i for i, c in enumerate(self.core_cols)}
        core_rows = []
        for ri in sorted(alive):
            r = rows[ri]
            if r:
                core_rows.append(
                    tuple(r.get(c, 0) for c in self.core_cols)
                )
        self.core_rows = core_rows
        if core_rows:
            h, _ = hermite_normal_form(IntMatrix.from_rows(core_rows))
            self._reduction = [r for r in h.entries if any(r)]
        else:
            self._reduction = []

    @staticmethod
    def _clean(r):
        return {c: v for c, v in r.items() if v}

    # -- vectors ---------------------------------------------------------

    def to_core(self, vec):
        """Push a sparse or dense vector down to core coordinates."""
        if isinstance(vec, dict):
            work = dict(vec)
        else:
            work = {i: v for i, v in enumerate(vec) if v}
        for c, expr in self._eliminations:
            k = work.pop(c, 0)
            if k:
                for c2, v in expr.items():
                    work[c2] = work.get(c2, 0) + k * v
                    if work[c2] == 0:
                        del work[c2]
        out = [0] * len(self.core_cols)
        for c, v in work.items():
            out[self._col_pos[c]] = v
        return tuple(out)

    def normal_form(self, vec):
        coords = list(self.to_core(vec))
        for row in self._reduction:
            lead = next(j for j, x in enumerate(row) if x != 0)
            if coords[lead]:
                k = coords[lead] // row[lead]
                if k:
                    for j in range(lead, len(coords)):
                        coords[j] -= k * row[j]
        return tuple(coords)

    def is_zero(self, vec) -> bool:
        return not any(self.normal_form(vec))

    def group(self) -> FPAbelianGroup:
        rel = (
            IntMatrix.from_rows(self.core_rows)
            if self.core_rows
            else IntMatrix.zero(0, len(self.core_cols))
        )
        return FPAbelianGroup(len(self.core_cols), rel)

    def relation_lattice_rows(self):
        """Basis rows of the relation lattice in core coordinates."""
        return list(self._reduction)

    def solve_combination(self, vectors, target):
        """Integer coefficients x with sum x_i vectors_i = target in this
        quotient, or None.  Vectors and target may be sparse dicts."""
        cols = [list(self.to_core(v)) for v in vectors]
        for row in self._reduction:
            cols.append(list(row))
        t = self.to_core(target)
        if not cols:
            return None if any(t) else ()
        m = IntMatrix.from_rows(cols).transpose()
        sol = solve_integer(m, t)
        if sol is None:
            return None
        return tuple(sol[: len(vectors)])


def kernel_mod_lattice(matrix_rows, lattice_rows, ncols):
    """Basis of ``{v in Z^ncols : M v lies in the lattice}``.

    ``matrix_rows`` are the rows of M; the lattice is spanned by
    ``lattice_rows`` (in the target).  Used for chain groups (kernels
    into quotient groups).
    """
    from .intlinalg import kernel_basis

    nrows = len(matrix_rows)
    if nrows == 0:
        return [
            tuple(1 if j == i else 0 for j in range(ncols)) for i in range(ncols)
        ]
    aug = []
    for i in range(nrows):
        row = list(matrix_rows[i]) + [-l[i] for l in lattice_rows]
        aug.append(row)
    ker = kernel_basis(IntMatrix.from_rows(aug))
    # project away the lattice coefficients, keep unique v-parts spanning
    vparts = [k[:ncols] for k in ker]
    if not vparts:
        return []
    h, _ = hermite_normal_form(IntMatrix.from_rows(vparts))
    return [tuple(r) for r in h.entries if any(r)]
