"""Closed subsets of character spheres, represented exactly.

A :class:`SphereSet` is a finite union of pieces:

* great subspheres, given by a :class:`~sigmafibre.lattice.Subspace`;
* single points, given by a :class:`Ray`;
* closed arcs of angle less than pi (ambient rank 2 only), given by an
  :class:`Arc`.

Points of the sphere are rays ``R_{>0}·v``. All predicates reduce to integer
determinants; there is no trigonometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import TYPE_CHECKING, Iterable, Sequence, Union

from .lattice import (
    DimensionError,
    Subspace,
    det,
    intersect,
    inverse,
    matvec,
    primitive,
    rref,
    solve,
    vector_avoiding,
)

if TYPE_CHECKING:
    from .fibre import QuotientDatum


@dataclass(frozen=True, order=True)
class Ray:
    """The sphere point ``[v]``; ``direction`` is primitive and nonzero."""

    direction: tuple[int, ...]

    @classmethod
    def of(cls, v: Iterable) -> "Ray":
        return cls(primitive(tuple(v)))

    def __post_init__(self):
        if not any(self.direction):
            raise ValueError("a ray needs a nonzero direction")

    def __neg__(self) -> "Ray":
        return Ray(tuple(-x for x in self.direction))

    @property
    def rank(self) -> int:
        return len(self.direction)

    def __repr__(self) -> str:
        return f"Ray{self.direction}"


def cross(u: Sequence, v: Sequence):
    return u[0] * v[1] - u[1] * v[0]


def _half(v: Sequence) -> int:
    return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1


def angle_cmp(u: Sequence, v: Sequence) -> int:
    """Compare counterclockwise angles measured from the positive x-axis."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    c = cross(u, v)
    return -1 if c > 0 else (1 if c < 0 else 0)


angle_key = cmp_to_key(angle_cmp)


def rot90(v: Sequence) -> tuple[int, ...]:
    return (-v[1], v[0])


def interior(a: Sequence, b: Sequence) -> tuple[int, ...]:
    """A primitive direction strictly inside the open ccw sector from a to b.

    When a and b are the same direction the sector is the full circle minus
    that point.
    """
    c = cross(a, b)
    if c > 0:
        return primitive((a[0] + b[0], a[1] + b[1]))  # mediant
    if c == 0 and a[0] * b[0] + a[1] * b[1] > 0:
        return primitive((-a[0], -a[1]))
    return primitive(rot90(a))


@dataclass(frozen=True, order=True)
class Arc:
    """Closed arc traversed counterclockwise from ``start`` to ``end``."""

    start: Ray
    end: Ray

    def __post_init__(self):
        if self.start.rank != 2 or self.end.rank != 2:
            raise DimensionError("arcs live in ambient rank 2")
        if cross(self.start.direction, self.end.direction) <= 0:
            raise ValueError("an arc must subtend an angle in (0, pi)")

    def __contains__(self, r: Ray) -> bool:
        s, e, v = self.start.direction, self.end.direction, r.direction
        return cross(s, v) >= 0 and cross(v, e) >= 0

    def __neg__(self) -> "Arc":
        return Arc(-self.start, -self.end)

    @property
    def rank(self) -> int:
        return 2


Piece = Union[Subspace, Ray, Arc]


def arcs_from_interval(start: Sequence, end: Sequence) -> list[Arc]:
    """Cut the closed ccw interval ``start → end`` into arcs below pi.

    Long intervals are cut at successive quarter turns from ``start``.
    """
    s = primitive(start)
    e = primitive(end)
    if s == e:
        raise ValueError("interval endpoints coincide")
    out = []
    while cross(s, e) <= 0:
        q = rot90(s)
        out.append(Arc(Ray(s), Ray(q)))
        s = q
    out.append(Arc(Ray(s), Ray(e)))
    return out


def piece_rank(p: Piece) -> int:
    return p.ambient if isinstance(p, Subspace) else p.rank


def contains_ray(p: Piece, r: Ray) -> bool:
    if isinstance(p, Subspace):
        return r.direction in p
    if isinstance(p, Ray):
        return p == r
    return r in p


def _line_rays(p: Subspace) -> tuple[Ray, Ray]:
    r = Ray.of(p.basis[0])
    return r, -r


def disjoint_pieces(p: Piece, q: Piece) -> bool:
    """True iff the two pieces have no sphere point in common."""
    if piece_rank(p) != piece_rank(q):
        raise DimensionError(f"pieces in ranks {piece_rank(p)} and {piece_rank(q)}")
    if isinstance(p, Ray):
        return not contains_ray(q, p)
    if isinstance(q, Ray):
        return not contains_ray(p, q)
    if isinstance(p, Subspace) and isinstance(q, Subspace):
        return intersect(p, q).dim == 0
    if isinstance(q, Subspace):
        p, q = q, p
    if isinstance(p, Subspace):  # against an arc, so rank 2
        if p.dim == 0:
            return True
        if p.dim >= 2:
            return False
        return not any(r in q for r in _line_rays(p))
    # two arcs: closed intervals meet iff one holds an endpoint of the other
    return not (p.start in q or p.end in q or q.start in p or q.end in p)


def _map_piece(p: Piece, a) -> list[Piece]:
    if isinstance(p, Subspace):
        return [rref([matvec(a, row) for row in p.basis], p.ambient)]
    if isinstance(p, Ray):
        return [Ray.of(matvec(a, p.direction))]
    s = Ray.of(matvec(a, p.start.direction))
    e = Ray.of(matvec(a, p.end.direction))
    return [Arc(s, e) if det(a) > 0 else Arc(e, s)]


@dataclass(frozen=True)
class SphereSet:
    """A closed subset of the unit sphere in R^rank, in normal form.

    Build instances with :meth:`build`; the constructor does not normalize.
    """

    rank: int
    subspaces: tuple[Subspace, ...] = ()
    rays: tuple[Ray, ...] = ()
    arcs: tuple[Arc, ...] = ()

    # -- construction -----------------------------------------------------

    @classmethod
    def build(cls, rank: int, subspaces: Iterable[Subspace] = (),
              rays: Iterable[Ray] = (), arcs: Iterable[Arc] = ()) -> "SphereSet":
        subspaces, rays, arcs = list(subspaces), list(rays), list(arcs)
        for p in [*subspaces, *rays, *arcs]:
            if piece_rank(p) != rank:
                raise DimensionError(f"piece of rank {piece_rank(p)} in a rank {rank} set")
        if arcs and rank != 2:
            raise DimensionError("arcs need ambient rank 2")
        if rank == 0:
            return cls(0)
        subs = sorted({s for s in subspaces if s.dim}, key=lambda s: (-s.dim, s.basis))
        if subs and subs[0].dim == rank:
            return cls.whole(rank)
        kept: list[Subspace] = []
        for s in subs:
            if not any(k.contains_subspace(s) for k in kept):
                kept.append(s)
        if arcs:
            merged = _merge_arcs(arcs)
            if merged is None:
                return cls.whole(rank)
            arcs = merged
        kept = [s for s in kept
                if not (s.dim == 1 and all(any(r in a for a in arcs) for r in _line_rays(s)))]
        kept.sort(key=lambda s: (s.dim, s.basis))
        rays = sorted({r for r in rays
                       if not any(r.direction in s for s in kept)
                       and not any(r in a for a in arcs)})
        return cls(rank, tuple(kept), tuple(rays), tuple(arcs))

    @classmethod
    def empty(cls, rank: int) -> "SphereSet":
        return cls(rank)

    @classmethod
    def whole(cls, rank: int) -> "SphereSet":
        if rank == 0:
            return cls(0)
        return cls(rank, (Subspace.full(rank),))

    # -- queries ----------------------------------------------------------

    @property
    def pieces(self) -> tuple[Piece, ...]:
        return (*self.subspaces, *self.rays, *self.arcs)

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def is_whole(self) -> bool:
        return any(s.dim == self.rank for s in self.subspaces)

    def __contains__(self, r: Ray) -> bool:
        if r.rank != self.rank:
            raise DimensionError(f"ray of rank {r.rank} in a rank {self.rank} set")
        return any(contains_ray(p, r) for p in self.pieces)

    def covers(self, p: Piece) -> bool:
        """Whether piece ``p`` lies inside this set."""
        if isinstance(p, Ray):
            return p in self
        if self.rank == 2:
            bounds = _boundaries([*self.pieces, p])
            return all(r in self for r in _cell_samples(bounds) if contains_ray(p, r))
        # No arcs above rank 2. A subsphere of dimension >= 1 is not a finite
        # union of proper subspheres plus points, so it needs one container.
        if p.dim == 0:
            return True
        if any(s.contains_subspace(p) for s in self.subspaces):
            return True
        if p.dim == 1:
            return all(r in self for r in _line_rays(p))
        return False

    def issubset(self, other: "SphereSet") -> bool:
        if self.rank != other.rank:
            raise DimensionError("rank mismatch")
        return all(other.covers(p) for p in self.pieces)

    def equivalent(self, other: "SphereSet") -> bool:
        """Equality as point sets, independent of how pieces are split."""
        return self.issubset(other) and other.issubset(self)

    def is_disjoint(self, other: "SphereSet") -> bool:
        return first_meeting(self, other) is None

    # -- operations -------------------------------------------------------

    def union(self, other: "SphereSet") -> "SphereSet":
        if self.rank != other.rank:
            raise DimensionError("rank mismatch")
        return SphereSet.build(self.rank, self.subspaces + other.subspaces,
                               self.rays + other.rays, self.arcs + other.arcs)

    def with_ray(self, r: Ray) -> "SphereSet":
        return SphereSet.build(self.rank, self.subspaces, self.rays + (r,), self.arcs)

    def __repr__(self) -> str:
        bits = [f"rank={self.rank}"]
        if self.subspaces:
            bits.append(f"subspaces={[s.integer_basis() for s in self.subspaces]}")
        if self.rays:
            bits.append(f"rays={[r.direction for r in self.rays]}")
        if self.arcs:
            bits.append(f"arcs={[(a.start.direction, a.end.direction) for a in self.arcs]}")
        return f"SphereSet({', '.join(bits)})"


def _boundaries(pieces: Iterable[Piece]) -> list[tuple[int, ...]]:
    out = set()
    for p in pieces:
        if isinstance(p, Ray):
            out.add(p.direction)
        elif isinstance(p, Arc):
            out.update((p.start.direction, p.end.direction))
        elif p.dim == 1:
            out.update(r.direction for r in _line_rays(p))
    return sorted(out, key=angle_key)


def _cell_samples(bounds: list[tuple[int, ...]]) -> list[Ray]:
    """One ray per cell of the circle cut at ``bounds`` (points and gaps)."""
    if not bounds:
        return [Ray((1, 0))]
    out = []
    for i, b in enumerate(bounds):
        out.append(Ray(b))
        out.append(Ray(interior(b, bounds[(i + 1) % len(bounds)])))
    return out


def _merge_arcs(arcs: Sequence[Arc]) -> list[Arc] | None:
    """Maximal closed intervals of the union, cut below pi; None if whole."""
    bounds = _boundaries(arcs)
    k = len(bounds)
    gap_cov = [any(Ray(interior(bounds[i], bounds[(i + 1) % k])) in a for a in arcs)
               for i in range(k)]
    if all(gap_cov):
        return None
    first = gap_cov.index(False)
    out: list[Arc] = []
    i = (first + 1) % k
    run_start = None
    for _ in range(k):
        if gap_cov[i]:
            if run_start is None:
                run_start = i
        elif run_start is not None:
            out.extend(arcs_from_interval(bounds[run_start], bounds[i]))
            run_start = None
        i = (i + 1) % k
    # the run cannot wrap past ``first`` because that gap is uncovered
    return sorted(out)


def negate(s: SphereSet) -> SphereSet:
    """Antipodal image."""
    return SphereSet.build(s.rank, s.subspaces, [-r for r in s.rays], [-a for a in s.arcs])


def map_set(s: SphereSet, a: Sequence[Sequence]) -> SphereSet:
    """Image of ``s`` under the invertible linear map ``v ↦ a·v``."""
    n = s.rank
    if len(a) != n or any(len(row) != n for row in a):
        raise DimensionError(f"matrix is not {n}x{n}")
    if n and det(a) == 0:
        raise ValueError("singular matrix")
    pieces = [q for p in s.pieces for q in _map_piece(p, a)]
    return SphereSet.build(
        n,
        [p for p in pieces if isinstance(p, Subspace)],
        [p for p in pieces if isinstance(p, Ray)],
        [p for p in pieces if isinstance(p, Arc)],
    )


def first_meeting(s: SphereSet, t: SphereSet) -> tuple[Piece, Piece] | None:
    """A pair of pieces sharing a point, or None when the sets are disjoint."""
    if s.rank != t.rank:
        raise DimensionError("rank mismatch")
    for p in s.pieces:
        for q in t.pieces:
            if not disjoint_pieces(p, q):
                return p, q
    return None


def _coords(param, x) -> tuple[Fraction, ...]:
    y = solve(param, x)
    assert y is not None
    return y


def restrict(s: SphereSet, q: "QuotientDatum") -> SphereSet:
    """``s ∩ S(G, N)`` written in the quotient character coordinates of ``q``.

    ``q.param`` is the injective map from quotient coordinates into the
    ambient character space; each piece is replaced by its preimage.
    """
    if s.rank != q.ambient_rank:
        raise DimensionError(f"set of rank {s.rank} vs datum of rank {q.ambient_rank}")
    c = q.corank
    if c == 0:
        return SphereSet(0)
    iota = q.param
    w = Subspace.span([[row[j] for row in iota] for j in range(c)], s.rank)
    subs = []
    for p in s.subspaces:
        meet = intersect(p, w)
        subs.append(rref([_coords(iota, x) for x in meet.basis], c))
    rays = [Ray.of(_coords(iota, r.direction)) for r in s.rays if r.direction in w]
    arcs = []
    for a in s.arcs:
        if c == 2:
            back = map_set(SphereSet(2, arcs=(a,)), inverse(iota))
            arcs.extend(back.arcs)
        else:
            for r in _line_rays(w):
                if r in a:
                    rays.append(Ray.of(_coords(iota, r.direction)))
    return SphereSet.build(c, subs, rays, arcs)


def _outside(s: SphereSet, r: Ray, symmetric: bool) -> bool:
    return r not in s and not (symmetric and -r in s)


def find_ray_outside(s: SphereSet, symmetric: bool = False) -> Ray | None:
    """A rational ray outside ``s`` (with its antipode outside too when
    ``symmetric``), or None if there is none."""
    n = s.rank
    if n == 0 or s.is_whole:
        return None
    if n == 1:
        for r in (Ray((1,)), Ray((-1,))):
            if _outside(s, r, symmetric):
                return r
        return None
    if n == 2:
        for v in ((1, 0), (0, 1), (1, 1), (1, -1)):
            for r in (Ray(v), -Ray(v)):
                if _outside(s, r, symmetric):
                    return r
        bounds = _boundaries(s.pieces)
        if symmetric:
            bounds = sorted(set(bounds) | {tuple(-x for x in b) for b in bounds}, key=angle_key)
        for r in _cell_samples(bounds):
            if _outside(s, r, symmetric):
                return r
        return None
    lines = [Subspace.span([r.direction], n) for r in s.rays]
    return Ray(vector_avoiding(list(s.subspaces) + lines, n))


def find_one_sided_ray(s: SphereSet) -> Ray | None:
    """A ray ``r`` in ``s`` whose antipode is not in ``s``."""
    for r in s.rays:
        if -r not in s:
            return r
    if s.rank == 1:
        return None
    if s.rank == 2 and s.arcs:
        bounds = _boundaries(s.pieces)
        bounds = sorted(set(bounds) | {tuple(-x for x in b) for b in bounds}, key=angle_key)
        for r in _cell_samples(bounds):
            if r in s and -r not in s:
                return r
    return None


# ---------------------------------------------------------------------------
# JSON


def to_json(s: SphereSet) -> dict:
    return {
        "rank": s.rank,
        "subspaces": [[list(v) for v in p.integer_basis()] for p in s.subspaces],
        "rays": [list(r.direction) for r in s.rays],
        "arcs": [[list(a.start.direction), list(a.end.direction)] for a in s.arcs],
    }


class SphereSetError(ValueError):
    """A malformed sphere-set document; ``path`` locates the offending value."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _int_vec(x, n: int, path: str) -> tuple[int, ...]:
    if not isinstance(x, list) or len(x) != n:
        raise SphereSetError(path, f"expected a list of {n} integers")
    for i, e in enumerate(x):
        if isinstance(e, bool) or not isinstance(e, int):
            raise SphereSetError(f"{path}[{i}]", "entries must be integers")
    if not any(x):
        raise SphereSetError(path, "zero vector")
    return tuple(x)


def from_json(doc, path: str = "$") -> SphereSet:
    if not isinstance(doc, dict):
        raise SphereSetError(path, "expected an object")
    n = doc.get("rank")
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise SphereSetError(f"{path}.rank", "expected a non-negative integer")
    for key in ("subspaces", "rays", "arcs"):
        if not isinstance(doc.get(key, []), list):
            raise SphereSetError(f"{path}.{key}", "expected a list")
    subs = []
    for i, basis in enumerate(doc.get("subspaces", [])):
        p = f"{path}.subspaces[{i}]"
        if not isinstance(basis, list) or not basis:
            raise SphereSetError(p, "expected a nonempty list of vectors")
        vecs = [_int_vec(v, n, f"{p}[{j}]") for j, v in enumerate(basis)]
        subs.append(rref(vecs, n))
    rays = [Ray.of(_int_vec(v, n, f"{path}.rays[{i}]"))
            for i, v in enumerate(doc.get("rays", []))]
    arcs = []
    if doc.get("arcs") and n != 2:
        raise SphereSetError(f"{path}.arcs", f"arcs need rank 2, got rank {n}")
    for i, pair in enumerate(doc.get("arcs", [])):
        p = f"{path}.arcs[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise SphereSetError(p, "expected [start, end]")
        s = _int_vec(pair[0], 2, f"{p}[0]")
        e = _int_vec(pair[1], 2, f"{p}[1]")
        if primitive(s) == primitive(e):
            raise SphereSetError(p, "arc endpoints coincide")
        arcs.extend(arcs_from_interval(s, e))
    return SphereSet.build(n, subs, rays, arcs)
