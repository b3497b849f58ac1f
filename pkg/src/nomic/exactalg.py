"""Exact scalar and matrix arithmetic over prime fields and the rationals.

Elements are plain Python values owned by a :class:`Field`: canonical ``int``
residues in ``[0, p)`` for a prime field, :class:`fractions.Fraction` for the
rationals.  Matrices are immutable row tuples.  Subspaces are stored by the
reduced row echelon form of a spanning set, so equal subspaces compare equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

Element = Union[int, Fraction]
Vector = tuple


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class FieldError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Field:
    """Either the prime field Z_p (``p`` set) or the rationals (``p is None``)."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise FieldError(f"Z_{self.p} is not a field: {self.p} is not prime")

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(int(p))

    @classmethod
    def rationals(cls) -> "Field":
        return cls(None)

    @classmethod
    def from_name(cls, name: str) -> "Field":
        """Parse ``"Z3"``, ``"z3"``, ``"3"`` or ``"Q"``."""
        s = str(name).strip().upper()
        if s in ("Q", "QQ", "RATIONALS"):
            return cls.rationals()
        if s.startswith("Z"):
            s = s[1:].lstrip("_")
        try:
            return cls.prime(int(s))
        except ValueError:
            raise FieldError(f"unknown field {name!r}") from None

    @property
    def name(self) -> str:
        return "Q" if self.p is None else f"Z{self.p}"

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def order(self) -> Optional[int]:
        return self.p

    @property
    def zero(self) -> Element:
        return 0 if self.p is not None else Fraction(0)

    @property
    def one(self) -> Element:
        return 1 if self.p is not None else Fraction(1)

    def __call__(self, x) -> Element:
        """Canonical element for an int, Fraction or numeric string."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.p is None:
            return x if type(x) is Fraction else Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"{x} has no image in {self.name}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, a: Element) -> Element:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self.name}")
        if self.p is None:
            return 1 / a
        return pow(a, -1, self.p)

    def neg(self, a: Element) -> Element:
        return self(-a)

    def elements(self) -> list:
        if self.p is None:
            raise FieldError("Q cannot be enumerated")
        return list(range(self.p))

    def vectors(self, dim: int) -> Iterator[Vector]:
        """All vectors of F^dim, in lexicographic order."""
        return itertools.product(self.elements(), repeat=dim)

    def vector(self, xs: Iterable) -> Vector:
        return tuple(self(x) for x in xs)

    def to_literal(self, a: Element):
        """JSON literal: int for Z_p, ``"num/den"`` string for Q."""
        if self.p is not None:
            return int(a)
        return str(Fraction(a))

    def from_literal(self, lit) -> Element:
        if isinstance(lit, bool) or not isinstance(lit, (int, str)):
            raise FieldError(f"bad scalar literal {lit!r}")
        return self(lit)

    def __repr__(self):
        return f"Field({self.name})"


def _require_same_field(*fields: Field) -> Field:
    first = fields[0]
    for f in fields[1:]:
        if f != first:
            raise FieldError(f"field mismatch: {first.name} vs {f.name}")
    return first


# -- vectors ---------------------------------------------------------------


def dot(field: Field, x: Sequence, y: Sequence) -> Element:
    if len(x) != len(y):
        raise DimensionError(f"length mismatch {len(x)} vs {len(y)}")
    return field(sum(a * b for a, b in zip(x, y)))


def vadd(field: Field, x: Sequence, y: Sequence) -> Vector:
    if len(x) != len(y):
        raise DimensionError(f"length mismatch {len(x)} vs {len(y)}")
    return tuple(field(a + b) for a, b in zip(x, y))


def vsub(field: Field, x: Sequence, y: Sequence) -> Vector:
    if len(x) != len(y):
        raise DimensionError(f"length mismatch {len(x)} vs {len(y)}")
    return tuple(field(a - b) for a, b in zip(x, y))


def vscale(field: Field, c, x: Sequence) -> Vector:
    return tuple(field(c * a) for a in x)


def unit(field: Field, dim: int, i: int) -> Vector:
    return tuple(field.one if j == i else field.zero for j in range(dim))


# -- matrices --------------------------------------------------------------


@dataclass(frozen=True)
class Matrix:
    field: Field
    rows: tuple
    ncols: int

    @classmethod
    def of(cls, field: Field, rows: Iterable[Iterable], ncols: Optional[int] = None) -> "Matrix":
        rows = tuple(tuple(field(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise DimensionError("column count needed for a matrix with no rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise DimensionError(f"ragged matrix: row of length {len(r)}, expected {ncols}")
        return cls(field, rows, ncols)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, tuple((field.zero,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, tuple(unit(field, n, i) for i in range(n)), n)

    @classmethod
    def from_columns(cls, field: Field, cols: Sequence[Sequence], nrows: Optional[int] = None) -> "Matrix":
        if not cols:
            if nrows is None:
                raise DimensionError("row count needed for a matrix with no columns")
            return cls(field, tuple(() for _ in range(nrows)), 0)
        h = len(cols[0])
        return cls(field, tuple(tuple(field(c[i]) for c in cols) for i in range(h)), len(cols))

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Assemble from a grid of blocks; block shapes must line up."""
        field = blocks[0][0].field
        rows = []
        for brow in blocks:
            h = brow[0].nrows
            for b in brow:
                if b.nrows != h:
                    raise DimensionError("block heights differ within a block row")
            for i in range(h):
                rows.append(tuple(x for b in brow for x in b.rows[i]))
        ncols = sum(b.ncols for b in blocks[0])
        return cls(field, tuple(rows), ncols)

    @classmethod
    def block_diag(cls, *ms: "Matrix") -> "Matrix":
        field = _require_same_field(*(m.field for m in ms))
        total = sum(m.ncols for m in ms)
        rows = []
        off = 0
        for m in ms:
            for r in m.rows:
                rows.append((field.zero,) * off + r + (field.zero,) * (total - off - m.ncols))
            off += m.ncols
        return cls(field, tuple(rows), total)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    @property
    def T(self) -> "Matrix":
        if not self.rows:
            return Matrix(self.field, tuple(() for _ in range(self.ncols)), 0)
        return Matrix(self.field, tuple(zip(*self.rows)), self.nrows)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __matmul__(self, other):
        F = self.field
        if isinstance(other, Matrix):
            _require_same_field(F, other.field)
            if self.ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.T.rows
            return Matrix(
                F,
                tuple(tuple(F(sum(a * b for a, b in zip(r, c))) for c in cols) for r in self.rows),
                other.ncols,
            )
        if len(other) != self.ncols:
            raise DimensionError(f"cannot apply {self.shape} matrix to length-{len(other)} vector")
        return tuple(F(sum(a * b for a, b in zip(r, other))) for r in self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        F = self.field
        return Matrix(F, tuple(tuple(F(a + b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        F = self.field
        return Matrix(F, tuple(tuple(F(a - b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ncols)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        F = self.field
        return Matrix(F, tuple(tuple(F(c * a) for a in r) for r in self.rows), self.ncols)

    def _check_same_shape(self, other: "Matrix"):
        _require_same_field(self.field, other.field)
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def take(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.field, tuple(tuple(self.rows[i][j] for j in cols) for i in rows), len(cols))

    def hstack(self, other: "Matrix") -> "Matrix":
        return Matrix.block([[self, other]])

    def vstack(self, other: "Matrix") -> "Matrix":
        _require_same_field(self.field, other.field)
        if self.ncols != other.ncols:
            raise DimensionError(f"cannot stack {self.shape} over {other.shape}")
        return Matrix(self.field, self.rows + other.rows, self.ncols)

    @property
    def rank(self) -> int:
        return rref(self)[1]

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise DimensionError("only square matrices have inverses")
        n = self.nrows
        r, rank, _ = rref(self.hstack(Matrix.identity(self.field, n)))
        if rank < n or any(r.rows[i][i] != 1 for i in range(n)):
            raise ZeroDivisionError("matrix is singular")
        return r.take(range(n), range(n, 2 * n))

    def to_literal(self) -> list:
        return [[self.field.to_literal(x) for x in r] for r in self.rows]

    @classmethod
    def from_literal(cls, field: Field, lit, ncols: Optional[int] = None) -> "Matrix":
        if not isinstance(lit, list) or not all(isinstance(r, list) for r in lit):
            raise DimensionError("matrix literal must be a list of rows")
        return cls.of(field, ([field.from_literal(x) for x in r] for r in lit), ncols)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix[{self.field.name}]({self.nrows}x{self.ncols}: {body})"


def rref(m: Matrix) -> tuple:
    """Reduced row echelon form. Returns ``(rref, rank, pivots)``; zero rows are kept at the bottom."""
    F = m.field
    rows = [list(r) for r in m.rows]
    pivots = []
    lead = 0
    nr = len(rows)
    for c in range(m.ncols):
        if lead == nr:
            break
        piv = next((i for i in range(lead, nr) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[lead], rows[piv] = rows[piv], rows[lead]
        inv = F.inv(rows[lead][c])
        rows[lead] = [F(x * inv) for x in rows[lead]]
        prow = rows[lead]
        for i in range(nr):
            if i != lead and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [F(x - f * y) for x, y in zip(rows[i], prow)]
        pivots.append(c)
        lead += 1
    return Matrix(F, tuple(tuple(r) for r in rows), m.ncols), lead, tuple(pivots)


def kernel(m: Matrix) -> "Subspace":
    """Null space ``{x : m x = 0}``."""
    F = m.field
    r, rank, pivots = rref(m)
    free = [j for j in range(m.ncols) if j not in pivots]
    basis = []
    for j in free:
        v = [F.zero] * m.ncols
        v[j] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = F(-r.rows[i][j])
        basis.append(v)
    return Subspace.span(F, m.ncols, basis)


def image(m: Matrix) -> "Subspace":
    """Column space of ``m``."""
    return Subspace.span(m.field, m.nrows, m.T.rows)


def solve(m: Matrix, b: Sequence) -> Optional[Vector]:
    """Some ``x`` with ``m x = b`` (free coordinates zero), or ``None``."""
    if len(b) != m.nrows:
        raise DimensionError(f"right-hand side has length {len(b)}, matrix has {m.nrows} rows")
    F = m.field
    aug = Matrix(F, tuple(r + (F(bi),) for r, bi in zip(m.rows, b)), m.ncols + 1)
    r, rank, pivots = rref(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [F.zero] * m.ncols
    for i, pc in enumerate(pivots):
        x[pc] = r.rows[i][m.ncols]
    return tuple(x)


# -- subspaces -------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of F^ambient, stored as its canonical RREF basis."""

    field: Field
    ambient: int
    basis: Matrix
    pivots: tuple

    @classmethod
    def span(cls, field: Field, ambient: int, vectors: Iterable[Sequence]) -> "Subspace":
        vecs = [tuple(field(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise DimensionError(f"vector of length {len(v)} in ambient dimension {ambient}")
        r, rank, pivots = rref(Matrix(field, tuple(vecs), ambient))
        return cls(field, ambient, Matrix(field, r.rows[:rank], ambient), pivots)

    @classmethod
    def zero(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, Matrix(field, (), ambient), ())

    @classmethod
    def full(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, Matrix.identity(field, ambient), tuple(range(ambient)))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def vectors(self) -> tuple:
        return self.basis.rows

    def __contains__(self, x) -> bool:
        return contains(self, x)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersection(self, other)

    def __le__(self, other: "Subspace") -> bool:
        return all(v in other for v in self.vectors)

    def coordinates(self, x: Sequence) -> Vector:
        """Coefficients of ``x`` in the RREF basis; ``x`` must lie in the subspace."""
        if x not in self:
            raise ValueError("vector is not in the subspace")
        return tuple(x[p] for p in self.pivots)

    def combine(self, coeffs: Sequence) -> Vector:
        F = self.field
        out = [0] * self.ambient
        for c, v in zip(coeffs, self.vectors):
            for j, vj in enumerate(v):
                out[j] += c * vj
        return tuple(F(x) for x in out)

    def elements(self) -> Iterator[Vector]:
        for coeffs in self.field.vectors(self.dim):
            yield self.combine(coeffs)

    def perp(self) -> "Subspace":
        return orthogonal_complement(self)

    def __repr__(self):
        vs = ", ".join("(" + ",".join(str(x) for x in v) + ")" for v in self.vectors)
        return f"Subspace[{self.field.name}^{self.ambient}]{{{vs}}}"


def _same_ambient(u: Subspace, w: Subspace):
    _require_same_field(u.field, w.field)
    if u.ambient != w.ambient:
        raise DimensionError(f"ambient dimensions differ: {u.ambient} vs {w.ambient}")


def subspace_sum(u: Subspace, w: Subspace) -> Subspace:
    _same_ambient(u, w)
    return Subspace.span(u.field, u.ambient, u.vectors + w.vectors)


def orthogonal_complement(u: Subspace) -> Subspace:
    """Complement with respect to the canonical inner product (the dot product)."""
    if u.dim == 0:
        return Subspace.full(u.field, u.ambient)
    return kernel(u.basis)


def intersection(u: Subspace, w: Subspace) -> Subspace:
    _same_ambient(u, w)
    constraints = orthogonal_complement(u).vectors + orthogonal_complement(w).vectors
    if not constraints:
        return Subspace.full(u.field, u.ambient)
    return kernel(Matrix(u.field, constraints, u.ambient))


def contains(u: Subspace, x: Sequence) -> bool:
    if len(x) != u.ambient:
        raise DimensionError(f"vector of length {len(x)} in ambient dimension {u.ambient}")
    F = u.field
    x = [F(a) for a in x]
    for i, p in enumerate(u.pivots):
        c = x[p]
        if c:
            row = u.basis.rows[i]
            x = [F(a - c * b) for a, b in zip(x, row)]
    return all(a == 0 for a in x)


def coset_canonical_rep(u: Subspace, a: Sequence) -> Vector:
    """The unique point of ``a + u`` whose coordinates at ``u``'s pivots are zero."""
    F = u.field
    x = [F(v) for v in a]
    if len(x) != u.ambient:
        raise DimensionError(f"vector of length {len(x)} in ambient dimension {u.ambient}")
    for i, p in enumerate(u.pivots):
        c = x[p]
        if c:
            x = [F(s - c * b) for s, b in zip(x, u.basis.rows[i])]
    return tuple(x)


@dataclass(frozen=True)
class AffineSubspace:
    """The coset ``offset + direction`` with ``offset`` canonical."""

    direction: Subspace
    offset: Vector

    @classmethod
    def of(cls, direction: Subspace, point: Sequence) -> "AffineSubspace":
        return cls(direction, coset_canonical_rep(direction, point))

    @property
    def dim(self) -> int:
        return self.direction.dim

    def __contains__(self, x) -> bool:
        F = self.direction.field
        return contains(self.direction, vsub(F, x, self.offset))

    def elements(self) -> Iterator[Vector]:
        F = self.direction.field
        for d in self.direction.elements():
            yield vadd(F, d, self.offset)


def enumerate_subspaces(field: Field, ambient: int, dim: Optional[int] = None) -> Iterator[Subspace]:
    """Every subspace of F^ambient (optionally of one dimension), each exactly once.

    Walks all RREF matrices: choose pivot columns, then fill the free entries
    to the right of each pivot that are not themselves pivot columns.
    """
    dims = range(ambient + 1) if dim is None else [dim]
    elems = field.elements()
    for k in dims:
        for pivots in itertools.combinations(range(ambient), k):
            slots = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, ambient) if j not in pivots]
            for fill in itertools.product(elems, repeat=len(slots)):
                rows = [[0] * ambient for _ in range(k)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, j), x in zip(slots, fill):
                    rows[i][j] = x
                yield Subspace(field, ambient, Matrix(field, tuple(tuple(r) for r in rows), ambient), pivots)
