"""Seeded generators for random complements, quotient data and twists."""

from __future__ import annotations

import random

from sigmafibre.fibre import QuotientDatum
from sigmafibre.lattice import Subspace, identity, orthogonal_complement
from sigmafibre.sigma import SigmaResult
from sigmafibre.sphere import Arc, Ray, SphereSet, disjoint_pieces
from sigmafibre.grouplang import SimplicialGraph


def random_unimodular(rng: random.Random, c: int, steps: int = 6):
    m = [list(r) for r in identity(c)]
    for _ in range(steps):
        i, j = rng.sample(range(c), 2)
        f = rng.choice((-2, -1, 1, 2))
        for k in range(c):
            m[i][k] += f * m[j][k]
    if rng.random() < 0.5:
        m[0] = [-x for x in m[0]]
    if rng.random() < 0.5:
        m[0], m[1] = m[1], m[0]
    return tuple(map(tuple, m))


def random_vec(rng, n, bound=3):
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(n))
        if any(v):
            return v


def random_complement(rng: random.Random, n: int) -> SphereSet:
    rays = [Ray.of(random_vec(rng, n)) for _ in range(rng.randint(0, 2))]
    subs, arcs = [], []
    if n == 2:
        for _ in range(rng.randint(0, 2)):
            a, b = random_vec(rng, 2), random_vec(rng, 2)
            if a[0] * b[1] - a[1] * b[0] > 0:
                arcs.append(Arc(Ray.of(a), Ray.of(b)))
    else:
        for _ in range(rng.randint(0, 2)):
            dim = rng.randint(1, n - 1)
            subs.append(Subspace.span([random_vec(rng, n) for _ in range(dim)], n))
    return SphereSet.build(n, subs, rays, arcs)


def random_factor(rng: random.Random, c: int):
    """A complement in ambient rank c or c + 1 with a datum of co-rank c."""
    n = c + rng.randint(0, 1)
    s = SigmaResult(random_complement(rng, n))
    gens = [random_vec(rng, n)] if n > c else []
    return s, QuotientDatum.of(n, gens)


def genasym_instance(rng: random.Random, c: int):
    """Complements avoiding chosen character subspaces W (dim m) and U
    (dim k) with k + m = c, plus the generators of K1 and K2."""
    m = rng.randint(1, c - 1) if c > 1 else 1
    k = c - m
    w = Subspace.span([random_vec(rng, c) for _ in range(m)], c)
    u = Subspace.span([random_vec(rng, c) for _ in range(k)], c)
    if w.dim != m or u.dim != k:
        return None

    def avoiding(space):
        while True:
            s = random_complement(rng, c)
            if all(disjoint_pieces(space, p) for p in s.pieces) and not s.is_empty:
                return SigmaResult(s)

    c1, c2 = avoiding(w), avoiding(u)
    k1 = list(orthogonal_complement(w).integer_basis())
    k2 = list(orthogonal_complement(u).integer_basis())
    return c1, k1, c2, k2


def random_graph(rng: random.Random, n: int, density: float) -> SimplicialGraph:
    names = [f"v{i}" for i in range(n)]
    edges = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)
             if rng.random() < density]
    return SimplicialGraph.make(names, edges)


def random_matrix(rng: random.Random, max_rows: int = 4, max_cols: int = 4, bound: int = 6):
    rows, cols = rng.randint(1, max_rows), rng.randint(1, max_cols)
    return [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]
