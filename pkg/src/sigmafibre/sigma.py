"""Complements of the BNS invariant as sphere sets.

Two front ends compute the complement directly: the prefix-walk test for
two-generator one-relator groups and the separator formula for right-angled
Artin groups. Explicit complements can also be loaded from JSON.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .grouplang import OneRelatorPresentation, SimplicialGraph, minimal_separators, prefix_walk
from .lattice import Subspace, primitive, rational_kernel
from .sphere import (
    Arc,
    Ray,
    SphereSet,
    SphereSetError,
    angle_key,
    from_json,
    interior,
    to_json,
)

DEGENERATE_MODES = ("warn", "exclude", "include")


@dataclass(frozen=True)
class SigmaResult:
    """A complement together with the rays it refuses to classify.

    ``relations`` lists lattice vectors on which every character vanishes
    (the relator's exponent sum when it is nonzero); the character sphere is
    the subsphere orthogonal to them.
    """

    complement: SphereSet
    warnings: tuple[Ray, ...] = ()
    relations: tuple[tuple[int, ...], ...] = ()

    @property
    def rank(self) -> int:
        return self.complement.rank

    def with_mode(self, mode: str) -> "SigmaResult":
        """Resolve warned rays: keep them as warnings, drop them, or add them."""
        if mode not in DEGENERATE_MODES:
            raise ValueError(f"unknown degenerate mode {mode!r}")
        if mode == "warn" or not self.warnings:
            return self
        comp = self.complement
        if mode == "include":
            for r in self.warnings:
                comp = comp.with_ray(r)
        return SigmaResult(comp, (), self.relations)

    def conservative(self) -> SphereSet:
        """The complement with every warned ray assumed to belong to it."""
        return self.with_mode("include").complement


def walk_fails(points, chi, use_max: bool = False) -> bool:
    """Whether the extreme value of ``chi`` over the walk is hit more than once."""
    values = [chi[0] * p[0] + chi[1] * p[1] for p in points]
    best = max(values) if use_max else min(values)
    return values.count(best) > 1


def _degenerate(r: Ray) -> bool:
    return 0 in r.direction


def brown_sigma_complement(p: OneRelatorPresentation) -> SigmaResult:
    """Complement for ``<a, b | r>`` from the prefix walk of ``r``.

    A ray with both coordinates nonzero lies in the invariant iff the minimum
    of the character over the cyclic walk is attained exactly once. The
    difference lines of the walk points cut the circle into sectors on which
    the argmin set is constant; failing sectors contribute closed arcs. Rays
    on a coordinate axis are never decided by the walk: unless closedness
    already forces one into the complement, it is reported as a warning.
    """
    points, total = prefix_walk(p)
    if any(total):
        chi0 = primitive((-total[1], total[0]))
        candidates = [Ray(chi0), -Ray(chi0)]
        rays = [r for r in candidates if not _degenerate(r) and walk_fails(points, r.direction)]
        warned = [r for r in candidates if _degenerate(r)]
        comp = SphereSet.build(2, rays=rays)
        return SigmaResult(comp, tuple(sorted(warned)), (total,))

    bounds = {(1, 0), (0, 1), (-1, 0), (0, -1)}
    distinct = sorted(set(points))
    for i, a in enumerate(distinct):
        for b in distinct[i + 1:]:
            d = (a[0] - b[0], a[1] - b[1])
            n = primitive((-d[1], d[0]))
            bounds.add(n)
            bounds.add((-n[0], -n[1]))
    bounds = sorted(bounds, key=angle_key)
    k = len(bounds)
    arcs, rays = [], []
    for i, b in enumerate(bounds):
        nxt = bounds[(i + 1) % k]
        if walk_fails(points, interior(b, nxt)):
            arcs.append(Arc(Ray(b), Ray(nxt)))
        r = Ray(b)
        if not _degenerate(r) and walk_fails(points, b):
            rays.append(r)
    comp = SphereSet.build(2, rays=rays, arcs=arcs)
    warned = tuple(sorted(Ray(b) for b in bounds if _degenerate(Ray(b)) and Ray(b) not in comp))
    return SigmaResult(comp, warned)


def raag_sigma_complement(g: SimplicialGraph) -> SigmaResult:
    """One coordinate subsphere ``{x_v = 0 for v in S}`` per minimal separator."""
    n = len(g.vertices)
    idx = {v: i for i, v in enumerate(g.vertices)}
    pieces = []
    for sep in minimal_separators(g):
        gens = [tuple(int(j == idx[v]) for j in range(n)) for v in sep]
        pieces.append(rational_kernel(gens, n))
    if n == 0:
        return SigmaResult(SphereSet(0))
    return SigmaResult(SphereSet.build(n, pieces))


def sigma_to_json(s: SigmaResult) -> dict:
    return {
        "complement": to_json(s.complement),
        "warnings": [list(r.direction) for r in s.warnings],
        "relations": [list(v) for v in s.relations],
    }


def load_sigma(doc, path: str = "$") -> SigmaResult:
    """Read either a bare sphere-set document or a ``{"complement": ...}``
    result document."""
    if not isinstance(doc, dict):
        raise SphereSetError(path, "expected an object")
    if "complement" not in doc:
        return SigmaResult(from_json(doc, path))
    comp = from_json(doc["complement"], f"{path}.complement")
    n = comp.rank

    def vecs(key) -> Iterable[tuple[int, ...]]:
        items = doc.get(key, [])
        if not isinstance(items, list):
            raise SphereSetError(f"{path}.{key}", "expected a list")
        for i, v in enumerate(items):
            if (not isinstance(v, list) or len(v) != n
                    or not all(isinstance(x, int) and not isinstance(x, bool) for x in v)):
                raise SphereSetError(f"{path}.{key}[{i}]", f"expected {n} integers")
            yield tuple(v)

    try:
        warnings = tuple(sorted(Ray.of(v) for v in vecs("warnings")))
    except ValueError as exc:
        if isinstance(exc, SphereSetError):
            raise
        raise SphereSetError(f"{path}.warnings", "zero vector") from exc
    relations = tuple(vecs("relations"))
    return SigmaResult(comp, warnings, relations)


def sigma_sphere(s: SigmaResult) -> Subspace:
    """The character space of the group inside the ambient coordinates."""
    return rational_kernel(s.relations, s.rank)

