"""Finite presentability of normal fibre products and the search for twists.

Conventions: characters are column vectors, ``<chi, g>`` is the dot product,
and a twist ``mu`` on quotient lattices with matrix ``b`` acts on quotient
characters by ``mu_star = bᵀ``. Everything is computed modulo torsion.

Decision functions take :class:`~sigmafibre.sigma.SigmaResult` inputs. A
warned ray is decisive when adding that single ray to its complement changes
the answer; then the verdict is ``UNKNOWN``. Constructions (``cook_mu``,
``max_fg_corank``, ``plan_max_corank``) treat every warned ray as part of the
complement so their certificates hold either way.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, NamedTuple, Sequence

from .grouplang import SimplicialGraph, minimal_separators
from .lattice import (
    Matrix,
    Subspace,
    complete_to_unimodular,
    identity,
    inverse,
    is_unimodular,
    lattice_split,
    matmul,
    matvec,
    rational_kernel,
    saturate,
    snf,
    subspace_avoiding,
    transpose,
)
from .sigma import SigmaResult, raag_sigma_complement
from .sphere import (
    Arc,
    Piece,
    Ray,
    SphereSet,
    disjoint_pieces,
    find_one_sided_ray,
    find_ray_outside,
    first_meeting,
    map_set,
    negate,
    restrict,
    to_json,
)


class Answer(str, Enum):
    FP = "FP"
    NOT_FP = "NOT_FP"
    EXISTS = "EXISTS"
    NOT_EXISTS = "NOT_EXISTS"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Verdict:
    answer: Answer
    certificate: dict | None = None
    warnings: tuple[Ray, ...] = ()

    def to_json(self) -> dict:
        return {
            "answer": self.answer.value,
            "certificate": self.certificate,
            "warnings": [list(r.direction) for r in self.warnings],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Verdict":
        return cls(Answer(doc["answer"]), doc.get("certificate"),
                   tuple(Ray(tuple(v)) for v in doc.get("warnings", [])))


class HypothesisError(ValueError):
    """Inputs violate the hypotheses a construction depends on."""


# ---------------------------------------------------------------------------
# Quotient data and twists


@dataclass(frozen=True)
class QuotientDatum:
    """A normal subgroup ``N >= G'`` seen through its image in ``Z^n``.

    ``projection`` (c×n) maps ``Z^n`` onto ``Z^c = G/√N`` modulo torsion and
    kills exactly the saturation of ``n_gens``; ``param`` is its transpose,
    whose columns span the characters vanishing on ``N``; ``section`` (n×c)
    is a right inverse of ``projection``.
    """

    ambient_rank: int
    n_gens: tuple[tuple[int, ...], ...]
    corank: int
    projection: Matrix
    param: Matrix
    section: Matrix
    torsion: tuple[int, ...] = ()

    @classmethod
    def of(cls, n: int, n_gens: Sequence[Sequence[int]] = ()) -> "QuotientDatum":
        gens = tuple(tuple(int(x) for x in g) for g in n_gens)
        for g in gens:
            if len(g) != n:
                raise ValueError(f"generator {list(g)} is not in Z^{n}")
        _, proj, dual = lattice_split(gens, n)
        c = len(proj)
        full = inverse(tuple(dual) + tuple(proj)) if n else ()
        section = tuple(tuple(row[n - c:]) for row in full)
        torsion = tuple(d for d in snf(gens, cols=n).d if d > 1)
        return cls(n, gens, c, tuple(proj), transpose(proj, cols=n) if c else tuple(() for _ in range(n)),
                   section, torsion)

    def lift(self, y: Sequence) -> tuple[int, ...]:
        """A lattice vector of ``Z^n`` projecting to ``y``."""
        return tuple(int(x) for x in matvec(self.section, y))

    def character(self, r: Ray) -> Ray:
        """The ambient character of a quotient-coordinate ray."""
        return Ray.of(matvec(self.param, r.direction))


def full_quotient(c: SigmaResult) -> QuotientDatum:
    """The datum for ``N = G'``: only the group's own relations are killed."""
    return QuotientDatum.of(c.rank, c.relations)


def _check_relations(c: SigmaResult, q: QuotientDatum) -> None:
    if c.rank != q.ambient_rank:
        raise ValueError(f"complement has rank {c.rank} but the datum rank {q.ambient_rank}")
    for rel in c.relations:
        if any(matvec(q.projection, rel)):
            raise ValueError(
                f"n_gens must contain the relation {list(rel)} (it lies in G')")


@dataclass(frozen=True)
class TwistMatrix:
    """Matrix ``b`` of the twist on quotient lattices (column convention)."""

    b: Matrix

    def __post_init__(self):
        if any(len(row) != len(self.b) for row in self.b):
            raise ValueError("twist matrix must be square")
        if not is_unimodular(self.b):
            raise ValueError("twist matrix must be an integer matrix with determinant ±1")
        object.__setattr__(self, "b", tuple(tuple(int(x) for x in row) for row in self.b))

    @property
    def size(self) -> int:
        return len(self.b)

    @property
    def mu_star(self) -> Matrix:
        return transpose(self.b)

    @classmethod
    def from_mu_star(cls, m: Sequence[Sequence[int]]) -> "TwistMatrix":
        return cls(transpose(m) if m else ())

    @classmethod
    def identity(cls, c: int) -> "TwistMatrix":
        return cls(identity(c))

    def inverse(self) -> "TwistMatrix":
        return TwistMatrix(inverse(self.b) if self.b else ())


# ---------------------------------------------------------------------------
# JSON helpers for certificates


def piece_json(p: Piece) -> dict:
    if isinstance(p, Ray):
        return {"ray": list(p.direction)}
    if isinstance(p, Arc):
        return {"arc": [list(p.start.direction), list(p.end.direction)]}
    return {"subspace": [list(v) for v in p.integer_basis()]}


def _neg_piece(p: Piece) -> Piece:
    return p if isinstance(p, Subspace) else -p


def _warned_decide(sigmas: Sequence[SigmaResult],
                   decide: Callable[[list[SphereSet]], Verdict]) -> Verdict:
    """Run ``decide`` on the complements, then once per warned ray with that
    ray added (to every argument that is the same group)."""
    base = decide([s.complement for s in sigmas])
    groups = []
    for s in sigmas:
        if s not in groups:
            groups.append(s)
    decisive = []
    for g in groups:
        for w in g.warnings:
            trial = [s.complement.with_ray(w) if s == g else s.complement for s in sigmas]
            if decide(trial).answer != base.answer:
                decisive.append(w)
    warnings = tuple(sorted({w for s in sigmas for w in s.warnings}))
    if decisive:
        cert = {"baseline": base.answer.value,
                "decisive_warnings": [list(w.direction) for w in sorted(set(decisive))]}
        return Verdict(Answer.UNKNOWN, cert, warnings)
    return replace(base, warnings=warnings)


# ---------------------------------------------------------------------------
# Finite presentability


def fp_check(c1: SigmaResult, q1: QuotientDatum, c2: SigmaResult, q2: QuotientDatum,
             mu: TwistMatrix) -> Verdict:
    """Is the fibre product twisted by ``mu`` finitely presented?

    Yes iff ``mu_star`` carries the restricted complement of factor 2 off
    the antipodal image of the restricted complement of factor 1.
    """
    _check_relations(c1, q1)
    _check_relations(c2, q2)
    if not (q1.corank == q2.corank == mu.size):
        raise ValueError(f"co-rank mismatch: {q1.corank}, {q2.corank}, twist of size {mu.size}")

    def decide(sets):
        image = map_set(restrict(sets[1], q2), mu.mu_star)
        forbidden = negate(restrict(sets[0], q1))
        hit = first_meeting(image, forbidden)
        if hit:
            return Verdict(Answer.NOT_FP, {"image_piece": piece_json(hit[0]),
                                           "forbidden_piece": piece_json(hit[1])})
        return Verdict(Answer.FP, {"image": to_json(image), "forbidden": to_json(forbidden)})

    return _warned_decide([c1, c2], decide)


def untwisted_check(c: SigmaResult, q: QuotientDatum) -> Verdict:
    """Untwisted case: the restricted complement must miss its own antipode."""
    _check_relations(c, q)

    def decide(sets):
        r = restrict(sets[0], q)
        for p in r.pieces:
            for other in r.pieces:
                if not disjoint_pieces(p, _neg_piece(other)):
                    return Verdict(Answer.NOT_FP, {"piece": piece_json(p),
                                                   "antipodal_piece": piece_json(other)})
        return Verdict(Answer.FP, {"restricted": to_json(r)})

    return _warned_decide([c], decide)


def minus_id_check(c: SigmaResult, q: QuotientDatum) -> Verdict:
    """Twist by ``-1``: finitely presented iff ``N`` is finitely generated."""
    _check_relations(c, q)

    def decide(sets):
        r = restrict(sets[0], q)
        return Verdict(Answer.FP if r.is_empty else Answer.NOT_FP, {"restricted": to_json(r)})

    return _warned_decide([c], decide)


# ---------------------------------------------------------------------------
# Existence


class CorankCertificate(NamedTuple):
    k: int
    subspace: Subspace


def max_fg_corank(c: SigmaResult, q: QuotientDatum) -> CorankCertificate:
    """Largest dimension of a rational subspace of quotient characters whose
    sphere avoids the complement, with one such subspace.

    Warned rays count as part of the complement.
    """
    _check_relations(c, q)
    r = restrict(c.conservative(), q)
    n = r.rank
    if r.is_empty:
        return CorankCertificate(n, Subspace.full(n))
    if r.is_whole:
        return CorankCertificate(0, Subspace.zero(n))
    if r.arcs:
        ray = find_ray_outside(r, symmetric=True)
        if ray is None:
            return CorankCertificate(0, Subspace.zero(n))
        return CorankCertificate(1, Subspace.span([ray.direction], n))
    v = subspace_avoiding(r.subspaces, [x.direction for x in r.rays], n)
    return CorankCertificate(v.dim, v)


def _prefer_safe(verdict: Verdict, sigmas: Sequence[SigmaResult],
                 decide: Callable[[list[SphereSet]], Verdict]) -> Verdict:
    """Swap in witnesses computed with warned rays counted as complement,
    so a positive certificate never rests on an undecided ray."""
    if verdict.answer != Answer.EXISTS or not any(s.warnings for s in sigmas):
        return verdict
    safe = decide([s.conservative() for s in sigmas])
    if safe.answer == Answer.EXISTS:
        return replace(verdict, certificate=safe.certificate)
    return verdict


def _ray_json(q: QuotientDatum, r: Ray) -> dict:
    return {"quotient": list(r.direction), "character": list(q.character(r).direction)}


def corank1_existence(c1: SigmaResult, c2: SigmaResult) -> Verdict:
    """Is there a finitely presented normal fibre product of co-rank 1?"""
    f1, f2 = full_quotient(c1), full_quotient(c2)

    def decide(sets):
        r1, r2 = restrict(sets[0], f1), restrict(sets[1], f2)
        if r1.rank == 0 or r2.rank == 0:
            return Verdict(Answer.NOT_EXISTS, {"reason": "a factor has finite abelianization"})
        for case, r, f in (("i", r1, f1), ("ii", r2, f2)):
            ray = find_ray_outside(r, symmetric=True)
            if ray is not None:
                return Verdict(Answer.EXISTS, {"case": case, "ray": _ray_json(f, ray)})
        o1, o2 = find_one_sided_ray(r1), find_one_sided_ray(r2)
        if o1 is not None and o2 is not None:
            # mu_star must carry ray2 onto ray1, never onto its antipode
            return Verdict(Answer.EXISTS, {"case": "iii", "ray1": _ray_json(f1, o1),
                                           "ray2": _ray_json(f2, o2),
                                           "mu_star_sends": "ray2 -> ray1"})
        return Verdict(Answer.NOT_EXISTS, None)

    return _prefer_safe(_warned_decide([c1, c2], decide), [c1, c2], decide)


def corank2_existence(c: SigmaResult, q: QuotientDatum) -> Verdict:
    """Co-rank 2, one group: is there a discrete character ``chi`` with both
    ``[chi]`` and ``[-chi]`` in the invariant and vanishing on ``N``?"""
    _check_relations(c, q)
    if q.corank != 2:
        raise ValueError(f"co-rank must be 2, got {q.corank}")

    def decide(sets):
        r = restrict(sets[0], q)
        ray = find_ray_outside(r.union(negate(r)), symmetric=True)
        if ray is None:
            return Verdict(Answer.NOT_EXISTS, {"restricted": to_json(r)})
        return Verdict(Answer.EXISTS, {"ray": _ray_json(q, ray)})

    return _prefer_safe(_warned_decide([c], decide), [c], decide)


def greatsph_existence(c: SigmaResult) -> Verdict:
    """For complements that are unions of great subspheres: a twisted
    ``G'``-fibre product is finitely presented for some twist iff every
    piece has ``2·dim <= n``."""
    q = full_quotient(c)
    r = restrict(c.complement, q)
    if r.rays or r.arcs:
        raise ValueError("complement must consist of great subspheres only")
    n = r.rank
    warned = tuple(w for w in c.warnings if w.direction in Subspace.full(c.rank)
                   and restrict(SphereSet.build(c.rank, rays=[w]), q).rays)
    if warned:
        return Verdict(Answer.UNKNOWN,
                       {"reason": "warned rays break the great-subsphere form",
                        "decisive_warnings": [list(w.direction) for w in warned]},
                       c.warnings)
    for p in r.subspaces:
        if 2 * p.dim > n:
            return Verdict(Answer.NOT_EXISTS, {"piece": piece_json(p), "dim": p.dim, "rank": n},
                           c.warnings)
    v = subspace_avoiding(r.subspaces, [], n)
    assert 2 * v.dim >= n
    return Verdict(Answer.EXISTS, {"subspace": [list(x) for x in v.integer_basis()],
                                   "dim": v.dim, "rank": n}, c.warnings)


def artin_check(g: SimplicialGraph) -> tuple[Verdict, Verdict]:
    """(untwisted, twisted) verdicts for the ``G'``-fibre products of the
    right-angled Artin group on ``g``."""
    n = len(g.vertices)
    seps = minimal_separators(g)
    untwisted = Verdict(Answer.FP if g.is_complete() else Answer.NOT_FP,
                        {"complete": g.is_complete()})
    bad = next((s for s in seps if n > 2 * len(s)), None)
    if bad is not None:
        twisted = Verdict(Answer.NOT_EXISTS, {"separator": list(bad), "vertices": n})
    else:
        twisted = Verdict(Answer.EXISTS, {"separators": [list(s) for s in seps], "vertices": n})

    sigma = raag_sigma_complement(g)
    geo_untwisted = untwisted_check(sigma, full_quotient(sigma))
    geo_twisted = greatsph_existence(sigma)
    if geo_untwisted.answer != untwisted.answer or geo_twisted.answer != twisted.answer:
        raise RuntimeError("graph and sphere computations disagree")
    if twisted.answer == Answer.EXISTS:
        twisted = replace(twisted, certificate={**twisted.certificate,
                                                "subspace": geo_twisted.certificate["subspace"]})
    return untwisted, twisted


# ---------------------------------------------------------------------------
# Constructing twists


def _shear(k: int, m: int, alpha: int) -> Matrix:
    n = k + m
    rows = [list(r) for r in identity(n)]
    for i in range(k):
        rows[i][m + i] = alpha
    return tuple(map(tuple, rows))


MAX_DOUBLINGS = 64


def _cook_core(r_first: SphereSet, r_second: SphereSet, w: Subspace, u: Subspace) -> Matrix:
    """``phi`` with ``phi(r_second)`` disjoint from ``-r_first``, given ``w``
    avoiding ``r_first``, ``u`` avoiding ``r_second`` and ``dim u <= dim w``."""
    k, m = u.dim, w.dim
    a1 = complete_to_unimodular(w)
    a2 = complete_to_unimodular(u)
    a1_inv = inverse(a1)
    forbidden = negate(r_first)
    alpha = 1
    for _ in range(MAX_DOUBLINGS + 1):
        phi = matmul(matmul(a1_inv, _shear(k, m, alpha)), a2)
        if map_set(r_second, phi).is_disjoint(forbidden):
            return phi
        alpha *= 2
    raise RuntimeError(f"no passing shear after {MAX_DOUBLINGS} doublings")


def _character_space(q: QuotientDatum, k_gens: Sequence[Sequence[int]]) -> Subspace:
    for g in k_gens:
        if len(g) != q.ambient_rank:
            raise ValueError(f"generator {list(g)} is not in Z^{q.ambient_rank}")
    return rational_kernel([matvec(q.projection, g) for g in k_gens], q.corank)


def cook_mu(c1: SigmaResult, q1: QuotientDatum, k1_gens: Sequence[Sequence[int]],
            c2: SigmaResult, q2: QuotientDatum, k2_gens: Sequence[Sequence[int]]) -> TwistMatrix:
    """Build a twist making the fibre product finitely presented.

    ``K_i`` (generated by ``N_i`` and ``k_i_gens``) must be finitely
    generated, which on the sphere means the characters vanishing on ``K_i``
    avoid the complement; their quotient co-ranks must add up to the co-rank
    of ``N_i``. The twist is a lattice shear conjugated into position, with
    the shear factor doubled until the image verifiably clears.
    """
    _check_relations(c1, q1)
    _check_relations(c2, q2)
    c = q1.corank
    if q2.corank != c:
        raise ValueError(f"co-rank mismatch: {c} vs {q2.corank}")
    w = _character_space(q1, k1_gens)
    u = _character_space(q2, k2_gens)
    if w.dim + u.dim != c:
        raise ValueError(f"co-ranks of K1 and K2 are {w.dim} and {u.dim}; they must sum to {c}")
    r1 = restrict(c1.conservative(), q1)
    r2 = restrict(c2.conservative(), q2)
    for label, space, r in (("K1", w, r1), ("K2", u, r2)):
        for p in r.pieces:
            if not disjoint_pieces(space, p):
                raise HypothesisError(f"{label} is not finitely generated: its character "
                                      f"sphere meets the complement piece {piece_json(p)}")
    if r1.is_empty or r2.is_empty:
        phi = identity(c)
    elif u.dim <= w.dim:
        phi = _cook_core(r1, r2, w, u)
    else:
        phi = inverse(_cook_core(r2, r1, u, w))
    mu = TwistMatrix.from_mu_star(phi)
    if not map_set(r2, mu.mu_star).is_disjoint(negate(r1)):
        raise RuntimeError("constructed twist failed verification")
    return mu


@dataclass(frozen=True)
class Plan:
    corank: int
    m: int
    k: int
    factor1: dict = field(default_factory=dict)
    factor2: dict = field(default_factory=dict)
    mu: TwistMatrix | None = None
    verdict: Verdict | None = None

    def to_json(self) -> dict:
        return {
            "corank": self.corank,
            "m": self.m,
            "k": self.k,
            "factor1": self.factor1,
            "factor2": self.factor2,
            "mu": [list(r) for r in self.mu.b] if self.mu else None,
            "mu_star": [list(r) for r in self.mu.mu_star] if self.mu else None,
            "verdict": self.verdict.to_json() if self.verdict else None,
        }


def _extend(v: Subspace, dim: int) -> Subspace:
    n = v.ambient
    out = v
    for j in range(n):
        if out.dim >= dim:
            break
        e = tuple(int(i == j) for i in range(n))
        if e not in out:
            out = out + Subspace.span([e], n)
    return out


def _factor_plan(c: SigmaResult, f: QuotientDatum, v: Subspace, dim: int, corank: int):
    n = f.corank
    part = Subspace.span(v.basis[:dim], n)
    s = _extend(part, corank)
    rel = [list(x) for x in saturate(c.relations, c.rank)] if c.relations else []
    n_gens = rel + [list(f.lift(y)) for y in lattice_split(s.integer_basis(), n)[1]]
    k_gens = rel + [list(f.lift(y)) for y in lattice_split(part.integer_basis(), n)[1]]
    return n_gens, k_gens


def plan_max_corank(c1: SigmaResult, c2: SigmaResult) -> tuple[int, Plan]:
    """Largest co-rank reachable through finitely generated overgroups, with
    subgroups and a twist realizing it."""
    f1, f2 = full_quotient(c1), full_quotient(c2)
    m, v1 = max_fg_corank(c1, f1)
    k, v2 = max_fg_corank(c2, f2)
    n = min(m + k, f1.corank, f2.corank)
    m_used = min(m, n)
    k_used = n - m_used
    n1, k1 = _factor_plan(c1, f1, v1, m_used, n)
    n2, k2 = _factor_plan(c2, f2, v2, k_used, n)
    q1 = QuotientDatum.of(c1.rank, n1)
    q2 = QuotientDatum.of(c2.rank, n2)
    assert q1.corank == q2.corank == n
    mu = cook_mu(c1, q1, k1, c2, q2, k2)
    verdict = fp_check(c1, q1, c2, q2, mu)
    plan = Plan(n, m, k, {"n_gens": n1, "k_gens": k1}, {"n_gens": n2, "k_gens": k2}, mu, verdict)
    return n, plan
