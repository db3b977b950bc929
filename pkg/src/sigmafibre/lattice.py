"""Exact rational and integer linear algebra.

Vectors are tuples, matrices are tuples of row tuples. Rational entries are
:class:`fractions.Fraction`, integer entries are plain ``int``. Nothing in
this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

Vector = tuple
Matrix = tuple


class DimensionError(ValueError):
    """Operands live in spaces of different dimension."""


def _frac_vec(v: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in v)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else 0


def primitive(v: Sequence) -> tuple[int, ...]:
    """Clear denominators and divide out the content; the sign is kept."""
    fr = _frac_vec(v)
    den = reduce(lcm, (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(gcd, ints, 0)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m: Sequence[Sequence], cols: int | None = None) -> Matrix:
    if not m:
        return tuple(() for _ in range(cols or 0))
    return tuple(zip(*m))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def matvec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in a)


def det(m: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    n = len(m)
    a = [list(_frac_vec(row)) for row in m]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        piv = a[c][c]
        result *= piv
        for r in range(c + 1, n):
            f = a[r][c] / piv
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return sign * result


def inverse(m: Sequence[Sequence]) -> Matrix:
    """Exact inverse; integer-valued entries come back as ``int``."""
    n = len(m)
    a = [list(_frac_vec(row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return tuple(tuple(_demote(x) for x in row[n:]) for row in a)


def _demote(x: Fraction):
    return int(x) if x.denominator == 1 else x


def is_unimodular(m: Sequence[Sequence]) -> bool:
    return (all(isinstance(x, int) or Fraction(x).denominator == 1
                for row in m for x in row)
            and abs(det(m)) == 1)


# ---------------------------------------------------------------------------
# Row echelon forms and subspaces


@dataclass(frozen=True)
class Subspace:
    """A rational linear subspace of Q^n kept in reduced row echelon form.

    Because the basis is canonical, ``==`` is equality of subspaces.
    """

    ambient: int
    basis: tuple[tuple[Fraction, ...], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient: int) -> "Subspace":
        return rref(vectors, ambient)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(_frac_vec(row) for row in identity(n)))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    def __contains__(self, v: Sequence) -> bool:
        if len(v) != self.ambient:
            raise DimensionError(f"vector of length {len(v)} in ambient {self.ambient}")
        w = list(_frac_vec(v))
        for row in self.basis:
            p = _pivot(row)
            f = w[p]
            if f:
                w = [x - f * y for x, y in zip(w, row)]
        return not any(w)

    def contains_subspace(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(row in self for row in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        return rref(self.basis + other.basis, self.ambient)

    def integer_basis(self) -> tuple[tuple[int, ...], ...]:
        """Basis rows scaled to primitive integer vectors (not a lattice basis)."""
        return tuple(primitive(row) for row in self.basis)

    def __repr__(self) -> str:
        rows = ", ".join(str(list(r)) for r in self.integer_basis())
        return f"Subspace({self.ambient}, [{rows}])"


def _pivot(row: Sequence) -> int:
    return next(i for i, x in enumerate(row) if x != 0)


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient != b.ambient:
        raise DimensionError(f"ambient mismatch: {a.ambient} vs {b.ambient}")


def rref(rows: Iterable[Sequence], ambient: int | None = None) -> Subspace:
    """Row space of ``rows`` in canonical reduced row echelon form."""
    a = [list(_frac_vec(r)) for r in rows]
    if ambient is None:
        if not a:
            raise ValueError("ambient dimension needed for an empty row list")
        ambient = len(a[0])
    for r in a:
        if len(r) != ambient:
            raise DimensionError(f"row of length {len(r)} in ambient {ambient}")
    lead = 0
    for c in range(ambient):
        p = next((r for r in range(lead, len(a)) if a[r][c] != 0), None)
        if p is None:
            continue
        a[lead], a[p] = a[p], a[lead]
        piv = a[lead][c]
        a[lead] = [x / piv for x in a[lead]]
        for r in range(len(a)):
            if r != lead and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[lead])]
        lead += 1
    return Subspace(ambient, tuple(tuple(r) for r in a[:lead]))


def rank(rows: Sequence[Sequence], ambient: int | None = None) -> int:
    return rref(rows, ambient).dim


def rational_kernel(gens: Iterable[Sequence], n: int) -> Subspace:
    """All x in Q^n orthogonal to every generator."""
    r = rref(gens, n)
    pivots = [_pivot(row) for row in r.basis]
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(r.basis, pivots):
            v[p] = -row[f]
        out.append(v)
    return rref(out, n)


def orthogonal_complement(v: Subspace) -> Subspace:
    return rational_kernel(v.basis, v.ambient)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    comp = orthogonal_complement(a) + orthogonal_complement(b)
    return orthogonal_complement(comp)


def solve(a: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """Some x with a·x = b, or None when the system is inconsistent."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(_frac_vec(a[i])) + [Fraction(b[i])] for i in range(rows)]
    pivots = []
    lead = 0
    for c in range(cols):
        p = next((r for r in range(lead, rows) if aug[r][c] != 0), None)
        if p is None:
            continue
        aug[lead], aug[p] = aug[p], aug[lead]
        piv = aug[lead][c]
        aug[lead] = [x / piv for x in aug[lead]]
        for r in range(rows):
            if r != lead and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[lead])]
        pivots.append(c)
        lead += 1
    if any(aug[r][cols] for r in range(lead, rows)):
        return None
    x = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        x[c] = aug[r][cols]
    return tuple(x)


# ---------------------------------------------------------------------------
# Integer normal forms


@dataclass(frozen=True)
class SnfResult:
    """``left · a · right == diag(d)`` with unimodular ``left`` and ``right``."""

    d: tuple[int, ...]
    left: Matrix
    right: Matrix


def snf(a: Sequence[Sequence[int]], cols: int | None = None) -> SnfResult:
    """Smith normal form with both transforms.

    ``cols`` is only needed when ``a`` has no rows.
    """
    m = len(a)
    n = len(a[0]) if m else (cols or 0)
    s = [list(map(int, row)) for row in a]
    left = [list(r) for r in identity(m)]
    right = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):
        s[dst] = [x + f * y for x, y in zip(s[dst], s[src])]
        left[dst] = [x + f * y for x, y in zip(left[dst], left[src])]

    def add_col(src, dst, f):
        for row in s:
            row[dst] += f * row[src]
        for row in right:
            row[dst] += f * row[src]

    d = []
    for t in range(min(m, n)):
        while True:
            entries = [(abs(s[i][j]), i, j) for i in range(t, m)
                       for j in range(t, n) if s[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            clean = True
            for i in range(t + 1, m):
                if s[i][t]:
                    add_row(t, i, -(s[i][t] // s[t][t]))
                    clean = clean and s[i][t] == 0
            for j in range(t + 1, n):
                if s[t][j]:
                    add_col(t, j, -(s[t][j] // s[t][t]))
                    clean = clean and s[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n)
                        if s[i][j] % s[t][t]), None)
            if bad is None:
                break
            add_row(bad, t, 1)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            left[t] = [-x for x in left[t]]
        d.append(s[t][t])
    return SnfResult(tuple(d), tuple(map(tuple, left)), tuple(map(tuple, right)))


def hnf(rows: Sequence[Sequence[int]], ambient: int) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form ``H = U · rows`` with zero rows dropped.

    Pivots are positive and entries above a pivot lie in ``[0, pivot)``.
    Returns ``(H, U)`` where ``U`` is square unimodular; the first
    ``len(H)`` rows of ``U`` produce ``H``.
    """
    a = [list(map(int, r)) for r in rows]
    k = len(a)
    u = [list(r) for r in identity(k)]
    lead = 0
    for c in range(ambient):
        while True:
            nz = [(abs(a[r][c]), r) for r in range(lead, k) if a[r][c]]
            if not nz:
                break
            _, p = min(nz)
            a[lead], a[p] = a[p], a[lead]
            u[lead], u[p] = u[p], u[lead]
            done = True
            for r in range(lead + 1, k):
                if a[r][c]:
                    q = a[r][c] // a[lead][c]
                    a[r] = [x - q * y for x, y in zip(a[r], a[lead])]
                    u[r] = [x - q * y for x, y in zip(u[r], u[lead])]
                    done = done and a[r][c] == 0
            if done:
                break
        if lead < k and a[lead][c]:
            if a[lead][c] < 0:
                a[lead] = [-x for x in a[lead]]
                u[lead] = [-x for x in u[lead]]
            for r in range(lead):
                q = a[r][c] // a[lead][c]
                if q:
                    a[r] = [x - q * y for x, y in zip(a[r], a[lead])]
                    u[r] = [x - q * y for x, y in zip(u[r], u[lead])]
            lead += 1
    return tuple(map(tuple, a[:lead])), tuple(map(tuple, u))


def lattice_split(gens: Sequence[Sequence[int]], n: int):
    """Split Z^n along the saturation of the lattice spanned by ``gens``.

    Returns ``(basis, annihilator, dual)``:

    * ``basis``: an HNF basis of ``span(gens) ∩ Z^n``;
    * ``annihilator``: an HNF basis of ``{y ∈ Z^n : y·g = 0}``;
    * ``dual``: integer rows ``X`` with ``X · basisᵀ = I``, reduced modulo
      the annihilator rows.

    Stacking ``dual`` over ``annihilator`` gives a unimodular matrix.
    """
    gens = [tuple(map(int, g)) for g in gens]
    res = snf(gens, cols=n)
    r = sum(1 for x in res.d if x)
    rinv = inverse(res.right)
    sat0 = rinv[:r]
    x0 = transpose(res.right)[:r]
    y0 = transpose(res.right)[r:]
    basis, p = hnf(sat0, n) if r else ((), ())
    annihilator, _ = hnf(y0, n) if n - r else ((), ())
    # X0 · sat0ᵀ = I; with basis = P · sat0 we need X = P⁻ᵀ · X0.
    if r:
        pinv_t = transpose(inverse(p))
        dual = [list(row) for row in matmul(pinv_t, x0)]
    else:
        dual = []
    for row in dual:
        for h in annihilator:
            c = _pivot(h)
            q = row[c] // h[c]
            if q:
                for j in range(n):
                    row[j] -= q * h[j]
    dual = tuple(tuple(int(x) for x in row) for row in dual)
    return tuple(basis), tuple(annihilator), dual


def saturate(gens: Sequence[Sequence[int]], n: int) -> Matrix:
    """Lattice basis (HNF) of ``span_Q(gens) ∩ Z^n``."""
    return lattice_split(gens, n)[0]


def complete_to_unimodular(v: Subspace) -> Matrix:
    """Unimodular ``A`` with ``A · v = span(e_1, ..., e_dim v)``.

    The first ``dim v`` rows of ``A`` read off coordinates along a primitive
    basis of ``v ∩ Z^n``; the remaining rows annihilate ``v``.
    """
    n = v.ambient
    if v.dim == 0:
        return identity(n)
    _, annihilator, dual = lattice_split(v.integer_basis(), n)
    return tuple(dual) + tuple(annihilator)


# ---------------------------------------------------------------------------
# Avoiding finite unions of subspaces


def vandermonde(n: int, t: int) -> tuple[int, ...]:
    return tuple(t ** i for i in range(n))


def vector_avoiding(pieces: Sequence[Subspace], n: int | None = None) -> tuple[int, ...]:
    """First moment-curve point ``(1, t, t², ...)`` lying in no piece.

    ``n`` distinct curve points are linearly independent, so a proper
    subspace holds at most ``n - 1`` of them and the scan stops after at most
    ``(n - 1)·len(pieces) + 1`` steps.
    """
    if n is None:
        if not pieces:
            raise ValueError("ambient dimension needed for an empty piece list")
        n = pieces[0].ambient
    for p in pieces:
        if p.ambient != n:
            raise DimensionError(f"piece in ambient {p.ambient}, expected {n}")
        if p.dim >= n:
            raise ValueError("cannot avoid the whole space")
    for t in range((n - 1) * len(pieces) + 1):
        v = vandermonde(n, t)
        if not any(v in p for p in pieces):
            return v
    raise AssertionError("moment-curve bound violated")  # pragma: no cover


def subspace_avoiding(pieces: Sequence[Subspace], rays: Sequence[Sequence],
                      n: int) -> Subspace:
    """A subspace of the largest possible dimension meeting every piece in 0
    and containing none of ``rays``.

    The dimension is ``n - max(dim piece, 1 if rays else 0)``. Built greedily:
    each new vector avoids ``piece + span so far`` for every piece.
    """
    lines = [Subspace.span([r], n) for r in rays]
    for p in pieces:
        if p.ambient != n:
            raise DimensionError(f"piece in ambient {p.ambient}, expected {n}")
    obstacles = [p for p in pieces if p.dim] + lines
    top = max((p.dim for p in obstacles), default=0)
    target = n - top
    current = Subspace.zero(n)
    while current.dim < target:
        # each obstacle sum contains ``current``; with none, avoid it directly
        v = vector_avoiding([p + current for p in obstacles] or [current], n)
        current = current + Subspace.span([v], n)
    return current
