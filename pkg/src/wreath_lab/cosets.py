"""Double cosets of K_n(infinity) in G x G as marked diagrams.

A pair ``(g1, g2) = (s1 gamma', s2 gamma'')`` is drawn on two rows of vertices
labelled by non-zero integers: lower ``i`` joins upper ``s2(i)`` marked
``(0, gamma''_i)`` and lower ``-i`` joins upper ``-s1(i)`` marked
``(0, gamma'_i)``.  The diagram at level ``n`` adds return edges outside the
window ``|i| <= n`` and contracts every component to a single marked edge or
circle.

Internally all edges are kept in *flow* orientation: positive edges go up,
negative edges go down (with inverted marking), return edges go
``lower -i -> lower i`` and ``upper i -> upper -i``.  In flow orientation
every vertex has in- and out-degree at most one, so components are read off
by following successors.  Half-integers are stored doubled (``h2``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .finite_group import GroupTable
from .wreath import (
    GammaTuple,
    Permutation,
    WreathElement,
    _classes,
    inverse,
    multiply,
    omega,
    pure_perm,
    pure_tuple,
    random_element,
)

Pair = tuple[WreathElement, WreathElement]
Vertex = tuple[str, int]          # ("u" | "o", signed index)


class CosetError(ValueError):
    pass


def vertex_name(v: Vertex) -> str:
    row, i = v
    return f"{row}{'+' if i > 0 else '-'}{abs(i)}"


# ---------------------------------------------------------------------------
# pairs


def pair_multiply(a: Pair, b: Pair) -> Pair:
    return multiply(a[0], b[0]), multiply(a[1], b[1])


def pair_inverse(a: Pair) -> Pair:
    return inverse(a[0]), inverse(a[1])


def diagonal(k: WreathElement) -> Pair:
    return k, k


def embed(g: WreathElement, side: int = 2) -> Pair:
    """``g`` placed in the first or second factor, identity in the other."""
    e = WreathElement.identity(g.group)
    return (g, e) if side == 1 else (e, g)


def pair_support(a: Pair) -> int:
    return max(a[0].max_point, a[1].max_point)


def random_window_element(G: GroupTable, rng: np.random.Generator, n: int, width: int) -> WreathElement:
    """Random element of G_n(infinity) supported on n+1 .. n+width."""
    g = random_element(G, rng, width)
    shift = {i + n: g.perm(i) + n for i in range(1, width + 1)}
    return WreathElement(Permutation.from_dict(shift),
                         GammaTuple.from_dict(G, {k + n: v for k, v in g.tuple.entries}), G)


# ---------------------------------------------------------------------------
# marked pair graphs


@dataclass(frozen=True)
class MarkedPairGraph:
    """For each lower vertex ``i`` in +-1..+-N: (upper target, (h2, gamma))."""

    N: int
    edges: tuple[tuple[int, int, int, int], ...]    # (lower, upper, h2, gamma), sorted by lower
    group: GroupTable = field(compare=False, repr=False)

    def edge(self, lower: int) -> tuple[int, int, int]:
        for lo, up, h2, x in self.edges:
            if lo == lower:
                return up, h2, x
        raise KeyError(lower)


def graph_of(pair: Pair, N: int) -> MarkedPairGraph:
    g1, g2 = pair
    if N < pair_support(pair):
        raise CosetError(f"N={N} is smaller than the support {pair_support(pair)}")
    edges = []
    for i in range(1, N + 1):
        edges.append((i, g2.perm(i), 0, g2.entry(i)))
        edges.append((-i, -g1.perm(i), 0, g1.entry(i)))
    return MarkedPairGraph(N, tuple(sorted(edges)), g1.group)


def compose_graphs(top: MarkedPairGraph, bottom: MarkedPairGraph) -> MarkedPairGraph:
    """Glue the upper row of ``bottom`` to the lower row of ``top``."""
    if top.N != bottom.N:
        raise CosetError("graphs have different ranges")
    G = top.group
    tmap = {lo: (up, h2, x) for lo, up, h2, x in top.edges}
    out = []
    for lo, mid, h2b, xb in bottom.edges:
        up, h2t, xt = tmap[mid]
        out.append((lo, up, h2b + h2t, G.mul(xt, xb)))
    return MarkedPairGraph(top.N, tuple(sorted(out)), G)


# ---------------------------------------------------------------------------
# admissible diagrams


@dataclass(frozen=True)
class Edge:
    src: Vertex
    dst: Vertex
    h2: int        # twice the half-integer part
    gamma: int

    @property
    def weight(self):
        return self.h2 / 2

    def sort_key(self):
        return (self.src[0], self.src[1], self.dst[0], self.dst[1], self.h2, self.gamma)


_ALLOWED = {("o", -1, "u", -1), ("u", 1, "u", -1), ("u", 1, "o", 1), ("o", -1, "o", 1),
            ("u", -1, "o", -1)}   # last: in-window negative edges keep their drawn direction


@dataclass(frozen=True)
class AdmissibleDiagram:
    n: int
    edges: tuple[Edge, ...]
    circles: tuple[tuple[int, int], ...]          # (weight, class id), sorted
    group: GroupTable = field(compare=False, repr=False)
    representative: Pair | None = field(default=None, compare=False, repr=False)

    def edge_from(self, v: Vertex) -> Edge | None:
        for e in self.edges:
            if e.src == v:
                return e
        return None

    def edge_between(self, a: Vertex, b: Vertex) -> Edge | None:
        for e in self.edges:
            if {e.src, e.dst} == {a, b}:
                return e
        return None

    def check(self) -> list[str]:
        """Violations of the structural rules (empty when admissible)."""
        problems = []
        seen: dict[Vertex, int] = {}
        for e in self.edges:
            for v in (e.src, e.dst):
                seen[v] = seen.get(v, 0) + 1
            key = (e.src[0], 1 if e.src[1] > 0 else -1, e.dst[0], 1 if e.dst[1] > 0 else -1)
            if key not in _ALLOWED:
                problems.append(f"edge {vertex_name(e.src)}->{vertex_name(e.dst)} has a forbidden direction")
            if key == ("u", -1, "o", -1) and e.h2 != 0:
                problems.append(f"upward negative edge {vertex_name(e.src)} carries a half-integer")
            if e.src == e.dst:
                problems.append(f"loop at {vertex_name(e.src)}")
        expected = {(r, s * i) for r in "uo" for s in (1, -1) for i in range(1, self.n + 1)}
        if set(seen) != expected or any(c != 1 for c in seen.values()):
            problems.append("vertices are not covered exactly once")
        e_class = _classes(self.group).class_of[self.group.identity]
        if (1, e_class) in self.circles:
            problems.append("trivial circle stored")
        return problems


def _flow_step_table(edges: Iterable[tuple[Vertex, Vertex, int, int]]):
    succ = {}
    has_pred = set()
    for a, b, h2, x in edges:
        if a in succ:
            raise CosetError(f"vertex {vertex_name(a)} has two outgoing flow edges")
        if b in has_pred:
            raise CosetError(f"vertex {vertex_name(b)} has two incoming flow edges")
        succ[a] = (b, h2, x)
        has_pred.add(b)
    return succ, has_pred


def _contract(G: GroupTable, flow_edges, terminals: set[Vertex], n: int):
    """Follow flow paths between terminal vertices; return (edges, circles)."""
    succ, has_pred = _flow_step_table(flow_edges)
    visited = set()
    out_edges = []
    for start in sorted(v for v in succ if v not in has_pred):
        if start not in terminals:
            raise CosetError(f"path starts at inner vertex {vertex_name(start)}")
        v, h2, acc = start, 0, G.identity
        while v in succ:
            visited.add(v)
            w, dh, x = succ[v]
            h2 += dh
            acc = G.mul(x, acc)
            v = w
        visited.add(v)
        if v not in terminals:
            raise CosetError(f"path ends at inner vertex {vertex_name(v)}")
        if h2 == 0 and start[1] < 0 and v[1] < 0:
            # an untouched negative edge: report it in its drawn upward direction
            out_edges.append(Edge(v, start, 0, int(G.inv[acc])))
        else:
            out_edges.append(Edge(start, v, h2, acc))
    cls = _classes(G)
    e_class = cls.class_of[G.identity]
    circles = []
    for v0 in sorted(succ):
        if v0 in visited:
            continue
        cyc = [v0]
        v = succ[v0][0]
        while v != v0:
            cyc.append(v)
            v = succ[v][0]
        # base the traversal at a positive upward edge when there is one
        base = next((u for u in cyc if u[0] == "u" and u[1] > 0 and succ[u][0][0] == "o"), v0)
        h2, acc, v = 0, G.identity, base
        while True:
            visited.add(v)
            w, dh, x = succ[v]
            h2 += dh
            acc = G.mul(x, acc)
            v = w
            if v == base:
                break
        if h2 % 2:
            raise CosetError("circle with non-integer weight")
        circ = (h2 // 2, cls.class_of[acc])
        if circ != (1, e_class):
            circles.append(circ)
    return tuple(sorted(out_edges, key=Edge.sort_key)), circles


def theta(pair: Pair, n: int, N: int | None = None) -> AdmissibleDiagram:
    """Admissible diagram of the double coset of ``pair`` at level ``n``."""
    if n < 0:
        raise CosetError("level n must be non-negative")
    g1, g2 = pair
    G = g1.group
    N = max(n, pair_support(pair)) + 2 if N is None else N
    if N < max(n, pair_support(pair)):
        raise CosetError("ambient size too small")
    flow = []
    for i in range(1, N + 1):
        flow.append((("u", i), ("o", g2.perm(i)), 0, g2.entry(i)))
        flow.append((("o", -g1.perm(i)), ("u", -i), 0, int(G.inv[g1.entry(i)])))
        if i > n:
            flow.append((("u", -i), ("u", i), 1, G.identity))
            flow.append((("o", i), ("o", -i), 1, G.identity))
    terminals = {(r, s * i) for r in "uo" for s in (1, -1) for i in range(1, n + 1)}
    edges, circles = _contract(G, flow, terminals, n)
    return AdmissibleDiagram(n, edges, tuple(sorted(circles)), G, pair)


def _to_flow(e: Edge, G: GroupTable):
    if e.src[0] == "u" and e.src[1] < 0 and e.dst[0] == "o":
        return e.dst, e.src, e.h2, int(G.inv[e.gamma])
    return e.src, e.dst, e.h2, e.gamma


def mult_diagram(top: AdmissibleDiagram, bottom: AdmissibleDiagram) -> AdmissibleDiagram:
    """Paste ``top`` above ``bottom``: the upper row of ``bottom`` meets the lower row of ``top``."""
    if top.n != bottom.n:
        raise CosetError(f"levels differ: {top.n} vs {bottom.n}")
    G = top.group
    n = top.n
    rename_top = lambda v: ("m", v[1]) if v[0] == "u" else v
    rename_bot = lambda v: ("m", v[1]) if v[0] == "o" else v
    flow = []
    for e in top.edges:
        a, b, h2, x = _to_flow(e, G)
        flow.append((rename_top(a), rename_top(b), h2, x))
    for e in bottom.edges:
        a, b, h2, x = _to_flow(e, G)
        flow.append((rename_bot(a), rename_bot(b), h2, x))
    terminals = {(r, s * i) for r in "uo" for s in (1, -1) for i in range(1, n + 1)}
    edges, circles = _contract(G, flow, terminals, n)
    circles = sorted(list(top.circles) + list(bottom.circles) + circles)
    rep = None
    if top.representative is not None and bottom.representative is not None:
        rep = _separated_product(top.representative, bottom.representative, n)
    return AdmissibleDiagram(n, edges, tuple(circles), G, rep)


def _separated_product(a: Pair, b: Pair, n: int, m: int | None = None) -> Pair:
    m = max(pair_support(a), pair_support(b), 1) if m is None else m
    G = a[0].group
    w = pure_perm(G, omega(n, m))
    return pair_multiply(pair_multiply(a, (w, w)), b)


def _rep(d) -> Pair:
    if isinstance(d, AdmissibleDiagram):
        if d.representative is None:
            raise CosetError("diagram carries no representative")
        return d.representative
    return d


def mult_repr(d1, d2, n: int | None = None, m: int | None = None) -> AdmissibleDiagram:
    """theta_n(g (omega, omega) h) for representatives g, h of the two cosets."""
    if n is None:
        if not isinstance(d1, AdmissibleDiagram):
            raise CosetError("level n is required for bare pairs")
        n = d1.n
    return theta(_separated_product(_rep(d1), _rep(d2), n, m), n)


def involution(d, n: int | None = None) -> AdmissibleDiagram:
    if n is None:
        if not isinstance(d, AdmissibleDiagram):
            raise CosetError("level n is required for bare pairs")
        n = d.n
    return theta(pair_inverse(_rep(d)), n)


def identity_diagram(G: GroupTable, n: int) -> AdmissibleDiagram:
    e = WreathElement.identity(G)
    return theta((e, e), n)


# ---------------------------------------------------------------------------
# reference elements drawn in the figures

FIG1_S1 = Permutation.from_cycles([(1, 3, 4, 2, 5)])
FIG1_S2 = Permutation.from_cycles([(1, 4, 3, 2, 5)])
FIG2_T = Permutation.from_cycles([(1, 5, 2, 4, 3)])


def random_markings(G: GroupTable, rng: np.random.Generator, size: int = 5) -> dict[int, int]:
    return {i: int(rng.integers(G.order)) for i in range(1, size + 1)}


def fig1_pair(G: GroupTable, first: dict[int, int], second: dict[int, int]) -> Pair:
    """(s1 gamma', s2 gamma'') with s1 = 1->3->4->2->5->1, s2 = 1->4->3->2->5->1."""
    return WreathElement.make(G, FIG1_S1, first), WreathElement.make(G, FIG1_S2, second)


def fig2_pair(G: GroupTable, first: dict[int, int], second: dict[int, int]) -> Pair:
    """(t delta', t delta'') with t = 1->5->2->4->3->1 in both factors."""
    return WreathElement.make(G, FIG2_T, first), WreathElement.make(G, FIG2_T, second)


def fig8_transposition(G: GroupTable, n: int, i: int) -> Pair:
    """The transposition (i, n+1) in the second factor (the drawn embedding)."""
    if not 1 <= i <= n:
        raise CosetError(f"need 1 <= i <= n, got i={i}, n={n}")
    return embed(pure_perm(G, Permutation.transposition(i, n + 1)), side=2)


def fig8_gamma(G: GroupTable, entries: dict[int, int]) -> Pair:
    """A tuple inside the window, placed diagonally."""
    return diagonal(pure_tuple(G, GammaTuple.from_dict(G, entries)))


# ---------------------------------------------------------------------------
# rendering


def format_marking(G: GroupTable, h2: int, gamma: int) -> str:
    w = str(h2 // 2) if h2 % 2 == 0 else f"{h2}/2"
    return f"({w}, {G.element_names[gamma]})"


def to_dot(d: AdmissibleDiagram, name: str = "diagram") -> str:
    G = d.group
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=circle, fontsize=10];"]
    for row, rank in (("o", "max"), ("u", "min")):
        ids = [vertex_name((row, s * i)) for s in (-1, 1) for i in (range(d.n, 0, -1) if s < 0 else range(1, d.n + 1))]
        lines.append(f"  {{ rank={rank}; " + " ".join(f'"{v}";' for v in ids) + " }")
    for e in d.edges:
        lines.append(f'  "{vertex_name(e.src)}" -> "{vertex_name(e.dst)}" [label="{format_marking(G, e.h2, e.gamma)}"];')
    cls = _classes(G)
    for j, (w, c) in enumerate(d.circles):
        rep = G.element_names[cls.representatives[c]]
        lines.append(f'  "circle{j}" [shape=doublecircle, label="({w}, [{rep}])"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def describe(d: AdmissibleDiagram) -> str:
    G = d.group
    cls = _classes(G)
    parts = [f"{vertex_name(e.src)}->{vertex_name(e.dst)} {format_marking(G, e.h2, e.gamma)}" for e in d.edges]
    parts += [f"circle ({w}, [{G.element_names[cls.representatives[c]]}])" for w, c in d.circles]
    return "; ".join(parts)
