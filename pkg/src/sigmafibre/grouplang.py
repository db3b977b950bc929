"""Group inputs: two-generator one-relator presentations and simplicial graphs."""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

Letter = tuple[int, int]  # (generator index, exponent ±1)
Word = tuple[Letter, ...]


class PresentationError(ValueError):
    """Malformed presentation text. ``position`` is a 0-based column or None."""

    def __init__(self, message: str, position: int | None = None):
        where = f" at column {position + 1}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.position = position


class GraphError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def free_reduce(word: Iterable[Letter]) -> Word:
    out: list[Letter] = []
    for g, e in word:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def cyclic_reduce(word: Iterable[Letter]) -> Word:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == (w[-1][0], -w[-1][1]):
        w = w[1:-1]
    return tuple(w)


def invert(word: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


@dataclass(frozen=True)
class OneRelatorPresentation:
    generators: tuple[str, str]
    relator: Word

    def __post_init__(self):
        if len(self.generators) != 2:
            raise PresentationError(
                f"expected exactly 2 generators, got {len(self.generators)}")
        if not self.relator:
            raise PresentationError("relator is trivial after reduction")

    def spell(self) -> str:
        out = []
        for g, e in self.relator:
            name = self.generators[g]
            out.append(name if e == 1 else f"{name}^-1")
        return " ".join(out)


_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_EXP = re.compile(r"\^\s*(\(\s*)?([+-]?\s*\d+)\s*(\))?")


def _parse_word(text: str, names: Sequence[str], offset: int) -> list[Letter]:
    # longest-match tokenization lets "aba" and "a b a" mean the same thing
    by_length = sorted(names, key=len, reverse=True)
    letters: list[Letter] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "1" and not letters and text[i + 1:].strip() == "":
            i += 1
            continue
        name = next((n for n in by_length if text.startswith(n, i)), None)
        if name is None:
            raise PresentationError(f"unexpected {ch!r}", offset + i)
        i += len(name)
        k = 1
        m = _EXP.match(text, i)
        if m:
            if bool(m.group(1)) != bool(m.group(3)):
                raise PresentationError("unbalanced parenthesis in exponent", offset + i)
            k = int(m.group(2).replace(" ", ""))
            if k == 0:
                raise PresentationError("exponent must be nonzero", offset + i)
            i = m.end()
        elif i < len(text) and text[i] == "^":
            raise PresentationError("malformed exponent", offset + i)
        g = names.index(name)
        letters.extend([(g, 1 if k > 0 else -1)] * abs(k))
    return letters


def parse_presentation(text: str) -> OneRelatorPresentation:
    """Parse ``"a, b | word"`` or ``"a, b | u = v"`` (read as ``u v⁻¹``)."""
    if text.count("|") != 1:
        raise PresentationError("expected exactly one '|' separating generators and relator",
                                text.find("|", text.find("|") + 1) if "|" in text else None)
    bar = text.index("|")
    head, body = text[:bar], text[bar + 1:]
    start = head.find("<")
    if start >= 0:
        head = head[start + 1:]
    names = []
    pos = start + 1 if start >= 0 else 0
    for part in head.split(","):
        name = part.strip()
        at = pos + len(part) - len(part.lstrip())
        if not _NAME.fullmatch(name):
            raise PresentationError(f"bad generator name {name!r}", at)
        if name in names:
            raise PresentationError(f"duplicate generator {name!r}", at)
        names.append(name)
        pos += len(part) + 1
    if len(names) != 2:
        raise PresentationError(f"expected exactly 2 generators, got {len(names)}")
    body = body.rstrip()
    if body.endswith(">"):
        body = body[:-1]
    offset = bar + 1
    if body.count("=") > 1:
        raise PresentationError("at most one '=' allowed", offset + body.rindex("="))
    if "=" in body:
        eq = body.index("=")
        u = _parse_word(body[:eq], names, offset)
        v = _parse_word(body[eq + 1:], names, offset + eq + 1)
        word = u + list(invert(tuple(v)))
    else:
        word = _parse_word(body, names, offset)
    return OneRelatorPresentation((names[0], names[1]), cyclic_reduce(word))


def prefix_walk(p: OneRelatorPresentation) -> tuple[list[tuple[int, int]], tuple[int, int]]:
    """Exponent-sum vectors of the proper prefixes ``P_0 .. P_{l-1}`` and of
    the whole relator."""
    x = [0, 0]
    points = []
    for g, e in p.relator:
        points.append((x[0], x[1]))
        x[g] += e
    return points, (x[0], x[1])


def presentation_from_json(doc, path: str = "$") -> OneRelatorPresentation:
    if not isinstance(doc, dict):
        raise PresentationError(f"{path}: expected an object")
    gens = doc.get("generators")
    rel = doc.get("relator")
    if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
        raise PresentationError(f"{path}.generators: expected a list of names")
    if not isinstance(rel, str):
        raise PresentationError(f"{path}.relator: expected a string")
    return parse_presentation(f"{', '.join(gens)} | {rel}")


# ---------------------------------------------------------------------------
# Graphs


@dataclass(frozen=True)
class SimplicialGraph:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    @classmethod
    def make(cls, vertices: Iterable[str], edges: Iterable[Sequence[str]]) -> "SimplicialGraph":
        vs = tuple(vertices)
        if len(set(vs)) != len(vs):
            raise GraphError("$.vertices", "duplicate vertex")
        es = set()
        for i, e in enumerate(edges):
            a, b = e
            if a not in vs or b not in vs:
                raise GraphError(f"$.edges[{i}]", f"unknown vertex in {list(e)}")
            if a == b:
                raise GraphError(f"$.edges[{i}]", "loops are not allowed")
            key = frozenset((a, b))
            if key in es:
                raise GraphError(f"$.edges[{i}]", "duplicate edge")
            es.add(key)
        return cls(vs, frozenset(es))

    def masks(self) -> list[int]:
        """Neighbourhood bitmask of each vertex, in vertex order."""
        idx = {v: i for i, v in enumerate(self.vertices)}
        out = [0] * len(self.vertices)
        for e in self.edges:
            a, b = (idx[v] for v in e)
            out[a] |= 1 << b
            out[b] |= 1 << a
        return out

    def is_complete(self) -> bool:
        n = len(self.vertices)
        return len(self.edges) == n * (n - 1) // 2

    def complement(self) -> "SimplicialGraph":
        es = [(a, b) for a, b in combinations(self.vertices, 2)
              if frozenset((a, b)) not in self.edges]
        return SimplicialGraph.make(self.vertices, es)


def graph_from_json(doc, path: str = "$") -> SimplicialGraph:
    if not isinstance(doc, dict):
        raise GraphError(path, "expected an object")
    vs = doc.get("vertices")
    es = doc.get("edges", [])
    if not isinstance(vs, list) or not all(isinstance(v, str) for v in vs):
        raise GraphError(f"{path}.vertices", "expected a list of names")
    if not isinstance(es, list):
        raise GraphError(f"{path}.edges", "expected a list of pairs")
    for i, e in enumerate(es):
        if not isinstance(e, list) or len(e) != 2 or not all(isinstance(v, str) for v in e):
            raise GraphError(f"{path}.edges[{i}]", "expected a pair of vertex names")
    return SimplicialGraph.make(vs, es)


def components(masks: Sequence[int], alive: int) -> list[int]:
    """Connected components of the subgraph induced on the bitmask ``alive``."""
    comps = []
    rest = alive
    while rest:
        frontier = rest & -rest
        comp = 0
        while frontier:
            comp |= frontier
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= masks[low.bit_length() - 1]
                f ^= low
            frontier = nxt & rest & ~comp
        comps.append(comp)
        rest &= ~comp
    return comps


def minimal_separators(g: SimplicialGraph) -> list[tuple[str, ...]]:
    """All inclusion-minimal vertex sets whose removal disconnects ``g``.

    A graph on at most one vertex counts as connected. ``S`` is minimal iff
    ``g - S`` is disconnected and every vertex of ``S`` has a neighbour in
    every component of ``g - S`` (putting any one back reconnects).
    """
    n = len(g.vertices)
    masks = g.masks()
    full = (1 << n) - 1
    found = []
    for size in range(0, max(n - 1, 0)):
        for combo in combinations(range(n), size):
            s = sum(1 << i for i in combo)
            comps = components(masks, full & ~s)
            if len(comps) < 2:
                continue
            if all(masks[v] & c for v in combo for c in comps):
                found.append(combo)
    found.sort(key=lambda c: (len(c), c))
    return [tuple(g.vertices[i] for i in c) for c in found]


def is_direct_product(g: SimplicialGraph) -> bool:
    """Whether the graph is a nontrivial join, i.e. its complement is
    disconnected."""
    if len(g.vertices) < 2:
        return False
    comp = g.complement()
    return len(components(comp.masks(), (1 << len(g.vertices)) - 1)) > 1
