"""Exact arithmetic in the finitary wreath product of a finite group with S_infinity.

An element is stored as ``g = s * gamma`` with ``s`` a finitary permutation of
the positive integers and ``gamma`` a finitely supported tuple over the base
group.  Moving a permutation past a tuple re-indexes it,
``gamma * t = t * (gamma_{t(k)})_k``, so

    (s gamma)(t delta) = (s o t) * (gamma_{t(k)} delta_k)_k .

Equivalently ``g`` acts on ``Gamma x N`` by ``(x, k) -> (gamma_k x, s(k))``;
the tests use that action as an independent oracle.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .finite_group import ConjClasses, GroupTable, conjugacy_classes


class WreathError(ValueError):
    pass


class ParseError(WreathError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@functools.lru_cache(maxsize=64)
def _classes(G: GroupTable) -> ConjClasses:
    return conjugacy_classes(G)


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Permutation:
    """Finitary bijection of {1, 2, ...}; ``mapping`` lists only moved points, sorted."""

    mapping: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        srcs = [a for a, _ in self.mapping]
        dsts = sorted(b for _, b in self.mapping)
        if sorted(srcs) != dsts or len(set(srcs)) != len(srcs):
            raise WreathError(f"not a bijection on its support: {self.mapping}")
        if any(a == b for a, b in self.mapping):
            raise WreathError("fixed points must not be stored")
        if any(a < 1 for a in srcs):
            raise WreathError("positions must be positive integers")

    @classmethod
    def from_dict(cls, images: Mapping[int, int]) -> "Permutation":
        return cls(tuple(sorted((int(a), int(b)) for a, b in images.items() if a != b)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]]) -> "Permutation":
        """Product of cycles, rightmost applied first."""
        out = cls()
        for cyc in reversed([list(c) for c in cycles]):
            if len(set(cyc)) != len(cyc):
                raise WreathError(f"repeated point in cycle {cyc}")
            images = {a: cyc[(j + 1) % len(cyc)] for j, a in enumerate(cyc)}
            out = cls.from_dict(images).compose(out)
        return out

    @classmethod
    def transposition(cls, k: int, l: int) -> "Permutation":
        return cls() if k == l else cls.from_dict({k: l, l: k})

    @functools.cached_property
    def _map(self) -> dict[int, int]:
        return dict(self.mapping)

    def __call__(self, i: int) -> int:
        return self._map.get(i, i)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self._map)

    @property
    def max_point(self) -> int:
        return max(self._map, default=0)

    def is_identity(self) -> bool:
        return not self.mapping

    def compose(self, other: "Permutation") -> "Permutation":
        """``(self o other)(i) = self(other(i))``."""
        pts = set(self._map) | set(other._map)
        return Permutation.from_dict({i: self(other(i)) for i in pts})

    def inverse(self) -> "Permutation":
        return Permutation(tuple(sorted((b, a) for a, b in self.mapping)))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its minimum, sorted by minimum."""
        seen, out = set(), []
        for a, _ in self.mapping:
            if a in seen:
                continue
            cyc, x = [a], self(a)
            seen.add(a)
            while x != a:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            out.append(tuple(cyc))
        return out

    def sign(self) -> int:
        return -1 if sum(len(c) - 1 for c in self.cycles()) % 2 else 1

    def __str__(self):
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles()) or "id"


# ---------------------------------------------------------------------------
# tuples and elements


@dataclass(frozen=True)
class GammaTuple:
    """Finitely supported tuple over Gamma; ``entries`` holds (position, index) pairs, sorted.

    Identity entries are never stored, so equality is structural.
    """

    entries: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, G: GroupTable, values: Mapping[int, int]) -> "GammaTuple":
        for k in values:
            if int(k) < 1:
                raise WreathError(f"position {k} is not a positive integer")
        return cls(tuple(sorted((int(k), int(v)) for k, v in values.items() if v != G.identity)))

    @functools.cached_property
    def _map(self) -> dict[int, int]:
        return dict(self.entries)

    def get(self, k: int, G: GroupTable) -> int:
        return self._map.get(k, G.identity)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self._map)

    def is_identity(self) -> bool:
        return not self.entries

    def times(self, other: "GammaTuple", G: GroupTable) -> "GammaTuple":
        """Pointwise product (the group law restricted to pure tuples)."""
        pts = set(self._map) | set(other._map)
        return GammaTuple.from_dict(G, {k: G.mul(self.get(k, G), other.get(k, G)) for k in pts})

    def inverse(self, G: GroupTable) -> "GammaTuple":
        return GammaTuple.from_dict(G, {k: int(G.inv[v]) for k, v in self.entries})


@dataclass(frozen=True)
class WreathElement:
    perm: Permutation
    tuple: GammaTuple
    group: GroupTable

    @classmethod
    def make(cls, G: GroupTable, perm=None, entries=None) -> "WreathElement":
        if perm is None:
            perm = Permutation()
        elif not isinstance(perm, Permutation):
            perm = Permutation.from_cycles(perm)
        tup = entries if isinstance(entries, GammaTuple) else GammaTuple.from_dict(G, entries or {})
        return cls(perm, tup, G)

    @classmethod
    def identity(cls, G: GroupTable) -> "WreathElement":
        return cls(Permutation(), GammaTuple(), G)

    def entry(self, k: int) -> int:
        return self.tuple.get(k, self.group)

    @property
    def support(self) -> frozenset[int]:
        return self.perm.support | self.tuple.support

    @property
    def max_point(self) -> int:
        return max(self.support, default=0)

    def is_identity(self) -> bool:
        return self.perm.is_identity() and self.tuple.is_identity()

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        return multiply(self, other)

    def __str__(self):
        return format_element(self)


def _check_group(g: WreathElement, h: WreathElement) -> GroupTable:
    if g.group is not h.group and g.group != h.group:
        raise WreathError(f"base groups differ: {g.group.name} vs {h.group.name}")
    return g.group


def multiply(g: WreathElement, h: WreathElement) -> WreathElement:
    G = _check_group(g, h)
    t = h.perm
    tinv = t.inverse()
    pts = {tinv(k) for k in g.tuple.support} | h.tuple.support
    entries = {k: G.mul(g.entry(t(k)), h.entry(k)) for k in pts}
    return WreathElement(g.perm.compose(t), GammaTuple.from_dict(G, entries), G)


def inverse(g: WreathElement) -> WreathElement:
    G = g.group
    s = g.perm
    sinv = s.inverse()
    # (s gamma)^{-1} = gamma^{-1} s^{-1} = s^{-1} (gamma^{-1}_{s^{-1}(k)})_k
    entries = {s(k): int(G.inv[v]) for k, v in g.tuple.entries}
    return WreathElement(sinv, GammaTuple.from_dict(G, entries), G)


def conjugate(h: WreathElement, g: WreathElement) -> WreathElement:
    """``h g h^{-1}``."""
    return multiply(multiply(h, g), inverse(h))


def pure_tuple(G: GroupTable, tup: GammaTuple) -> WreathElement:
    return WreathElement(Permutation(), tup, G)


def pure_perm(G: GroupTable, s: Permutation) -> WreathElement:
    return WreathElement(s, GammaTuple(), G)


# ---------------------------------------------------------------------------
# orbits and the conjugacy invariant


def orbits(g: WreathElement) -> list[tuple[int, ...]]:
    """Nontrivial orbits in cycle order from their minimum: cycles of the
    permutation plus fixed points that carry a non-identity entry."""
    out = g.perm.cycles()
    moved = g.perm.support
    out += [(k,) for k in sorted(g.tuple.support) if k not in moved]
    out.sort(key=lambda c: c[0])
    return out


def cycle_decompose(g: WreathElement) -> list[tuple[Permutation, GammaTuple]]:
    G = g.group
    out = []
    for orb in orbits(g):
        perm = Permutation.from_cycles([orb]) if len(orb) > 1 else Permutation()
        tup = GammaTuple.from_dict(G, {k: g.entry(k) for k in orb})
        out.append((perm, tup))
    return out


def _as_orbit(g: WreathElement, p) -> list[int]:
    pts = sorted(set(int(x) for x in p))
    if not pts:
        raise WreathError("empty orbit")
    k = pts[0]
    orb, x = [k], g.perm(k)
    while x != k:
        orb.append(x)
        x = g.perm(x)
    if sorted(orb) != pts:
        raise WreathError(f"{pts} is not an orbit of {g.perm}")
    return orb


def cycle_product(g: WreathElement, p, base: int | None = None) -> int:
    """Ordered product of the entries around the orbit ``p``.

    Returns ``gamma_k * gamma_{s^-1(k)} * ... * gamma_{s^-(L-1)(k)}`` with ``k``
    the base point (default ``min(p)``).  Its conjugacy class does not depend
    on ``k`` and is preserved under conjugation in the wreath product.
    """
    orb = _as_orbit(g, p)
    k = orb[0] if base is None else int(base)
    if k not in orb:
        raise WreathError(f"base point {k} not in orbit {orb}")
    G = g.group
    sinv = g.perm.inverse()
    out, x = G.identity, k
    for _ in range(len(orb)):
        out = G.mul(out, g.entry(x))
        x = sinv(x)
    return out


@dataclass(frozen=True)
class ConjInvariant:
    """Sorted multiset of (orbit length, class id); pairs (1, class of e) omitted."""

    pairs: tuple[tuple[int, int], ...]

    def __str__(self):
        return "{" + ", ".join(f"({a},{b})" for a, b in self.pairs) + "}"


def invariant(g: WreathElement) -> ConjInvariant:
    G = g.group
    cls = _classes(G)
    e_class = cls.class_of[G.identity]
    pairs = []
    for orb in orbits(g):
        c = cls.class_of[cycle_product(g, orb)]
        if len(orb) == 1 and c == e_class:
            continue
        pairs.append((len(orb), c))
    return ConjInvariant(tuple(sorted(pairs)))


def are_conjugate(g: WreathElement, h: WreathElement) -> bool:
    _check_group(g, h)
    return invariant(g) == invariant(h)


def normal_form(g: WreathElement) -> tuple[GammaTuple, WreathElement]:
    """Conjugate by a pure tuple so that each orbit carries a single entry.

    With ``i = min(p)`` the conjugator is ``e`` at ``i`` and
    ``gamma_i^-1 gamma_{s i}^-1 ... gamma_{s^{j-1} i}^-1`` at ``s^j(i)``; the
    conjugate has identity entries on ``p`` except at ``s^{L-1}(i)``, which
    carries ``gamma_{s^{L-1} i} ... gamma_{s i} gamma_i``.
    """
    G = g.group
    conj = {}
    for orb in orbits(g):
        acc = G.identity
        for x in orb:
            conj[x] = acc
            acc = G.mul(acc, int(G.inv[g.entry(x)]))
    c = GammaTuple.from_dict(G, conj)
    return c, conjugate(pure_tuple(G, c), g)


def same_cycle_conjugator(sb: WreathElement, sc: WreathElement) -> GammaTuple | None:
    """Pure tuple ``t`` with ``t * sb * t^-1 = sc`` for two elements on one cycle, or None."""
    G = _check_group(sb, sc)
    if sb.perm != sc.perm:
        raise WreathError("elements must share the same permutation")
    cyc = sb.perm.cycles()
    if len(cyc) > 1 or (not cyc and len(sb.support | sc.support) > 1):
        raise WreathError("permutation part must be a single cycle")
    orb = set(cyc[0]) if cyc else set(sb.support | sc.support)
    if not (sb.tuple.support <= orb and sc.tuple.support <= orb):
        raise WreathError("tuples must be supported inside the cycle")
    if not orb:
        return GammaTuple()
    cb, nb = normal_form(sb)
    cc, nc = normal_form(sc)
    last = _as_orbit(sb, orb)[-1]
    b, c = nb.entry(last), nc.entry(last)
    for h in range(G.order):
        if G.mul(G.mul(h, b), int(G.inv[h])) == c:
            const = GammaTuple.from_dict(G, {k: h for k in orb})
            return cc.inverse(G).times(const, G).times(cb, G)
    return None


# ---------------------------------------------------------------------------
# separators and window predicates


def omega(n: int, m: int) -> Permutation:
    """Swap of the blocks (n, n+m] and (n+m, n+2m]."""
    if n < 0 or m < 1:
        raise WreathError("omega needs n >= 0 and m >= 1")
    images = {}
    for i in range(n + 1, n + 2 * m + 1):
        images[i] = i + m if i <= n + m else i - m
    return Permutation.from_dict(images)


def omega2(n: int, l: int, m: int) -> Permutation:
    """Moves the block (n, n+l] up by m and the block (n+l, n+l+m] down by l."""
    if n < 0 or l < 0 or m < 0:
        raise WreathError("omega2 needs non-negative arguments")
    images = {}
    for i in range(n + 1, n + l + m + 1):
        images[i] = i + m if i <= n + l else i - l
    return Permutation.from_dict(images)


def orbit_count(s: Permutation, m: int) -> int:
    if s.max_point > m:
        raise WreathError(f"support of {s} exceeds 1..{m}")
    return m - sum(len(c) - 1 for c in s.cycles())


def in_Gn_infty(g: WreathElement, n: int) -> bool:
    return all(k > n for k in g.support)


# ---------------------------------------------------------------------------
# text form

_TOKEN = re.compile(r"\s*(?:(?P<lp>\()|(?P<rp>\))|(?P<lb>\[)|(?P<rb>\])|(?P<colon>:)|(?P<comma>,)"
                    r"|(?P<int>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*))")


def _tokens(text: str):
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        yield kind, m.group(kind), start
        pos = m.end()
    yield "end", "", len(text)


def parse_element(text: str, G: GroupTable) -> WreathElement:
    """Parse ``"e"``, ``"(1 2)(3 4)[2:g]"`` or a bare label block ``"[1:g]"``.

    Overlapping cycles are read as a product, rightmost applied first.
    """
    toks = list(_tokens(text))
    i = 0

    def peek():
        return toks[i]

    def take(kind):
        nonlocal i
        tk = toks[i]
        if tk[0] != kind:
            raise ParseError(f"expected {kind}, found {tk[1] or 'end of input'!r}", tk[2])
        i += 1
        return tk

    def position(tk):
        v = int(tk[1])
        if v < 1:
            raise ParseError(f"position {v} must be a positive integer", tk[2])
        return v

    if peek()[0] == "name" and peek()[1] == "e" and toks[1][0] in ("end", "lb"):
        take("name")
    cycles = []
    while peek()[0] == "lp":
        take("lp")
        cyc = [position(take("int"))]
        while peek()[0] == "int":
            tk = take("int")
            v = position(tk)
            if v in cyc:
                raise ParseError(f"point {v} repeated in cycle", tk[2])
            cyc.append(v)
        if len(cyc) < 2:
            raise ParseError("a cycle needs at least two points", peek()[2])
        take("rp")
        cycles.append(cyc)
    entries: dict[int, int] = {}
    if peek()[0] == "lb":
        take("lb")
        while True:
            ptk = take("int")
            k = position(ptk)
            take("colon")
            ntk = toks[i]
            if ntk[0] not in ("name", "int"):
                raise ParseError("expected an element label", ntk[2])
            i += 1
            try:
                val = G.index_of(ntk[1])
            except KeyError as exc:
                raise ParseError(str(exc.args[0]), ntk[2]) from None
            if k in entries:
                raise ParseError(f"position {k} labelled twice", ptk[2])
            entries[k] = val
            if peek()[0] == "comma":
                take("comma")
                continue
            take("rb")
            break
    if peek()[0] != "end":
        raise ParseError(f"unexpected {peek()[1]!r}", peek()[2])
    if i == 0:
        raise ParseError("empty element", 0)
    return WreathElement.make(G, Permutation.from_cycles(cycles), entries)


def format_element(g: WreathElement) -> str:
    if g.is_identity():
        return "e"
    names = g.group.element_names
    labels = ",".join(f"{k}:{names[v]}" for k, v in g.tuple.entries)
    cyc = "".join("(" + " ".join(map(str, c)) + ")" for c in g.perm.cycles())
    return cyc + (f"[{labels}]" if labels else "")


# ---------------------------------------------------------------------------
# sampling


def random_element(G: GroupTable, rng: np.random.Generator, support: int,
                   p_entry: float = 0.5) -> WreathElement:
    """Uniform permutation of 1..support; each position gets a uniform
    non-identity entry with probability ``p_entry``."""
    perm = rng.permutation(support) + 1
    s = Permutation.from_dict({i + 1: int(perm[i]) for i in range(support)})
    entries = {}
    if G.order > 1:
        for k in range(1, support + 1):
            if rng.random() < p_entry:
                x = int(rng.integers(G.order - 1))
                entries[k] = x + (x >= G.identity)
    return WreathElement.make(G, s, entries)


def random_tuple_element(G: GroupTable, rng: np.random.Generator, positions: Iterable[int]) -> WreathElement:
    return WreathElement.make(G, None, {k: int(rng.integers(G.order)) for k in positions})
