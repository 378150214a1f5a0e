"""Finite truncation of the infinite tensor-product realization.

Each site carries a vector in (left states) x (right states or none):

* a pair symbol ``(b, k, i) x (b, k, j)`` for block ``b`` in {"a", "b"}
  (alpha or beta weight ``k``, rep indices ``i``, ``j``);
* a residual symbol ``("r", copy, t) x None`` where ``t`` indexes a basis of
  the GNS space of tr0 and ``copy`` remembers the site it was created on.

The reference site vector is

    eta = sum_k sqrt(alpha_k) sum_i (a,k,i)x(a,k,i)
        + sum_k sqrt(beta_k)  sum_i (b,k,i)x(b,k,i)
        + sqrt(delta) * xi0 (in the site's own residual copy).

A tuple acts on left parts through the attached representations (the GNS
left action on residual symbols).  A permutation ``s`` moves the left part of
site ``j`` to site ``s(j)``, keeps right parts in place, and multiplies by the
sign of the reordering it induces on the sites whose left part is a beta
symbol.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .thoma import ThomaParams
from .wreath import (
    GammaTuple,
    Permutation,
    WreathElement,
    cycle_product,
    inverse,
    multiply,
    orbits,
    pure_perm,
    pure_tuple,
)

TERM_BUDGET = 10**7
MAX_CONTRACTION_SITES = 20


class RealizationError(ValueError):
    pass


class SiteSymbol(NamedTuple):
    left: tuple
    right: tuple | None

    @property
    def is_residual(self) -> bool:
        return self.left[0] == "r"


def pair_symbol(block: str, k: int, i: int, j: int | None = None) -> SiteSymbol:
    return SiteSymbol((block, k, i), (block, k, i if j is None else j))


def residual_symbol(copy: int, t: int) -> SiteSymbol:
    return SiteSymbol(("r", copy, t), None)


# ---------------------------------------------------------------------------
# per-parameter data


class Realization:
    """Matrices shared by every state built from one parameter set."""

    def __init__(self, params: ThomaParams):
        self.params = params
        G = params.group
        self.group = G
        self.blocks = [("a", k, w, r.images) for k, (w, r) in enumerate(params.alpha)]
        self.blocks += [("b", k, w, r.images) for k, (w, r) in enumerate(params.beta)]
        self.delta = params.delta
        self.h0_images, self.xi0 = self._residual_space()
        # contraction terms: one per diagonal pair symbol, then the residual
        self.terms = [(kind, k, i) for kind, k, _, imgs in self.blocks for i in range(imgs.shape[1])]
        self.term_weight = np.array([w for _, _, w, imgs in self.blocks for _ in range(imgs.shape[1])]
                                    + [self.delta])
        self.is_beta = np.array([t[0] == "b" for t in self.terms] + [False])
        self.n_terms = len(self.terms) + 1
        self.tr0 = np.einsum("t,xts,s->x", self.xi0.conj(), self.h0_images, self.xi0)
        self._overlaps: dict = {}
        self.me_cache: dict = {}

    def _residual_space(self):
        tr0 = self.params.tr0
        G = self.group
        if tr0.kind == "trivial":
            return np.ones((G.order, 1, 1), dtype=complex), np.ones(1, dtype=complex)
        if tr0.kind == "regular":
            imgs = np.zeros((G.order, G.order, G.order), dtype=complex)
            for x in range(G.order):
                imgs[x, G.mult[x], np.arange(G.order)] = 1.0
            xi = np.zeros(G.order, dtype=complex)
            xi[G.identity] = 1.0
            return imgs, xi
        # direct sum of matrix spaces M_d with left multiplication
        dims = [r.dim for _, r in tr0.mix]
        D = sum(d * d for d in dims)
        imgs = np.zeros((G.order, D, D), dtype=complex)
        xi = np.zeros(D, dtype=complex)
        off = 0
        for (c, rep), d in zip(tr0.mix, dims):
            for x in range(G.order):
                imgs[x, off:off + d * d, off:off + d * d] = np.kron(rep.images[x], np.eye(d))
            xi[off:off + d * d] = np.sqrt(c / d) * np.eye(d).reshape(-1)
            off += d * d
        return imgs, xi

    def block_images(self, kind: str, k: int) -> np.ndarray:
        for b, kk, _, imgs in self.blocks:
            if b == kind and kk == k:
                return imgs
        raise RealizationError(f"no block {kind}{k}")

    def block_weight(self, kind: str, k: int) -> float:
        for b, kk, w, _ in self.blocks:
            if b == kind and kk == k:
                return w
        raise RealizationError(f"no block {kind}{k}")

    def site_eta(self, copy: int) -> dict[SiteSymbol, complex]:
        out = {}
        for kind, k, w, imgs in self.blocks:
            for i in range(imgs.shape[1]):
                out[pair_symbol(kind, k, i)] = np.sqrt(w)
        if self.delta > 0:
            for t, c in enumerate(self.xi0):
                if c != 0:
                    out[residual_symbol(copy, t)] = np.sqrt(self.delta) * c
        return out

    def overlap(self, x: int, same_site: bool) -> np.ndarray:
        """A[u, v] = <eta-term u at the source site moved by x, eta-term v at the target>."""
        key = (x, same_site)
        A = self._overlaps.get(key)
        if A is not None:
            return A
        T = self.n_terms
        A = np.zeros((T, T), dtype=complex)
        off = 0
        for _, _, w, imgs in self.blocks:
            d = imgs.shape[1]
            # u = (block, i2) carries coefficient sqrt(w); v = (block, i) likewise
            A[off:off + d, off:off + d] = w * imgs[x].T
            off += d
        if same_site:
            A[-1, -1] = self.delta * self.tr0[x]
        A.setflags(write=False)
        self._overlaps[key] = A
        return A


@functools.lru_cache(maxsize=32)
def realization(params: ThomaParams) -> Realization:
    return Realization(params)


# ---------------------------------------------------------------------------
# matrix elements by exact contraction


def _compress(g: WreathElement) -> tuple:
    """Order-preserving relabelling of the support onto 1..r, as a hashable key."""
    pts = sorted(g.support)
    pos = {p: j for j, p in enumerate(pts)}
    perm = tuple(pos[g.perm(p)] for p in pts)
    ent = tuple(g.entry(p) for p in pts)
    return perm, ent


def _contract(real: Realization, perm: tuple, ent: tuple) -> complex:
    r = len(perm)
    if r == 0:
        return 1.0 + 0j
    if r > MAX_CONTRACTION_SITES:
        raise RealizationError(f"support of {r} sites exceeds the contraction budget")
    inv = [0] * r
    for j, t in enumerate(perm):
        inv[t] = j
    A = [real.overlap(ent[inv[k]], inv[k] == k) for k in range(r)]
    inversions = [(j, jj) for j in range(r) for jj in range(j + 1, r) if perm[j] > perm[jj]]
    cycles, seen = [], set()
    for j in range(r):
        if j in seen:
            continue
        cyc, x = [], j
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = perm[x]
        cycles.append(cyc)
    P_beta = np.diag(real.is_beta.astype(complex))
    P_other = np.diag((~real.is_beta).astype(complex))
    total = 0j
    for mask in range(1 << r):
        beta_sites = [(mask >> j) & 1 for j in range(r)]
        sign = 1
        for j, jj in inversions:
            if beta_sites[j] and beta_sites[jj]:
                sign = -sign
        val = 1.0 + 0j
        for cyc in cycles:
            P = [P_beta if beta_sites[j] else P_other for j in cyc]
            M = P[0]
            L = len(cyc)
            for idx in range(1, L + 1):
                j = cyc[idx % L]
                M = M @ A[j] @ P[idx % L]
            val *= np.trace(M)
            if val == 0:
                break
        total += sign * val
    return total


def matrix_element(params: ThomaParams, g: WreathElement, m: int | None = None) -> complex:
    """<pi(g) eta, eta> on the first ``m`` sites (default: the support of ``g``)."""
    if m is not None and m < g.max_point:
        raise RealizationError(f"truncation m={m} is smaller than the support of g ({g.max_point})")
    real = realization(params)
    if g.group != real.group:
        raise RealizationError("element and parameters use different base groups")
    key = _compress(g)
    val = real.me_cache.get(key)
    if val is None:
        val = _contract(real, *key)
        real.me_cache[key] = val
    return val


# ---------------------------------------------------------------------------
# explicit sparse states


@dataclass(frozen=True)
class ProductState:
    """Sparse vector on sites 1..m; beyond ``m`` every site holds eta."""

    real: Realization
    m: int
    amps: dict = field(default_factory=dict)

    def inner(self, other: "ProductState") -> complex:
        if other.m != self.m:
            raise RealizationError("states live on different truncations")
        small, big = (self.amps, other.amps) if len(self.amps) < len(other.amps) else (other.amps, self.amps)
        tot = 0j
        for key, a in small.items():
            b = big.get(key)
            if b is not None:
                tot += a * np.conj(b) if small is self.amps else b * np.conj(a)
        return tot

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amps.values())))

    def scaled(self, c: complex) -> "ProductState":
        return ProductState(self.real, self.m, {k: c * a for k, a in self.amps.items()})

    def plus(self, other: "ProductState") -> "ProductState":
        out = dict(self.amps)
        for k, a in other.amps.items():
            out[k] = out.get(k, 0) + a
        return ProductState(self.real, self.m, {k: a for k, a in out.items() if abs(a) > 1e-15})


def build_eta(params: ThomaParams, m: int) -> ProductState:
    if m < 1:
        raise RealizationError("need at least one site")
    real = realization(params)
    sites = [list(real.site_eta(j).items()) for j in range(1, m + 1)]
    size = int(np.prod([len(s) for s in sites], dtype=float))
    if size > TERM_BUDGET:
        raise RealizationError(f"expansion of {size} terms exceeds the budget of {TERM_BUDGET}")
    amps = {}
    for combo in itertools.product(*sites):
        key = tuple(sym for sym, _ in combo)
        amps[key] = complex(np.prod([c for _, c in combo]))
    return ProductState(real, m, amps)


def _act_left(real: Realization, left: tuple, x: int):
    kind, k, i = left
    imgs = real.h0_images if kind == "r" else real.block_images(kind, k)
    col = imgs[x][:, i]
    return [((kind, k, i2), c) for i2, c in enumerate(col) if c != 0]


def _sort_sign(seq: Sequence[int]) -> int:
    sign = 1
    for a, b in itertools.combinations(seq, 2):
        if a > b:
            sign = -sign
    return sign


def apply_element(state: ProductState, g: WreathElement) -> ProductState:
    if g.max_point > state.m:
        raise RealizationError(f"support of g ({g.max_point}) exceeds the {state.m} stored sites")
    real = state.real
    amps = state.amps
    # tuple part, one site at a time
    for j, x in g.tuple.entries:
        new = {}
        for key, a in amps.items():
            sym = key[j - 1]
            for left, c in _act_left(real, sym.left, x):
                k2 = key[:j - 1] + (SiteSymbol(left, sym.right),) + key[j:]
                new[k2] = new.get(k2, 0) + a * c
        amps = new
    # permutation part
    s = g.perm
    if not s.is_identity():
        new = {}
        for key, a in amps.items():
            lefts = [None] * state.m
            for j, sym in enumerate(key, start=1):
                lefts[s(j) - 1] = sym.left
            sign = _sort_sign([s(j) for j, sym in enumerate(key, start=1) if sym.left[0] == "b"])
            k2 = tuple(SiteSymbol(lefts[i], key[i].right) for i in range(state.m))
            new[k2] = new.get(k2, 0) + sign * a
        amps = new
    return ProductState(real, state.m, {k: a for k, a in amps.items() if a != 0})


def sign_context(state_key: Sequence[SiteSymbol], s: Permutation) -> tuple[list[int], list[int], int]:
    """Beta-left positions before and after ``s`` and the sign of the induced reordering."""
    before = [j for j, sym in enumerate(state_key, start=1) if sym.left[0] == "b"]
    after = [s(j) for j in before]
    return before, after, _sort_sign(after)


def explicit_matrix_element(params: ThomaParams, g: WreathElement, m: int | None = None) -> complex:
    m = m or max(g.max_point, 1)
    eta = build_eta(params, m)
    return apply_element(eta, g).inner(eta)


# ---------------------------------------------------------------------------
# lazily evaluated vectors  sum_x c_x pi(x) eta


@dataclass(frozen=True)
class CyclicState:
    params: ThomaParams
    terms: tuple[tuple[WreathElement, complex], ...]

    @classmethod
    def eta(cls, params: ThomaParams) -> "CyclicState":
        return cls(params, ((WreathElement.identity(params.group), 1.0 + 0j),))

    def apply(self, g: WreathElement) -> "CyclicState":
        return CyclicState(self.params, tuple((multiply(g, x), c) for x, c in self.terms)).collect()

    def collect(self) -> "CyclicState":
        acc: dict = {}
        for x, c in self.terms:
            acc[x] = acc.get(x, 0) + c
        return CyclicState(self.params, tuple((x, c) for x, c in acc.items() if c != 0))

    def inner(self, other: "CyclicState") -> complex:
        tot = 0j
        for x, c in self.terms:
            for y, d in other.terms:
                tot += c * np.conj(d) * matrix_element(self.params, multiply(inverse(y), x))
        return tot

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))


def okounkov_apply(params: ThomaParams, k: int, n: int, state):
    """(1/n) sum_{l=1}^{n} pi((k, l)) state, the l = k term being the identity."""
    if not 1 <= k <= n:
        raise RealizationError(f"need 1 <= k <= n, got k={k}, n={n}")
    if isinstance(state, ProductState):
        if n > state.m:
            raise RealizationError(f"n={n} exceeds the {state.m} stored sites")
        G = params.group
        out = None
        for l in range(1, n + 1):
            term = apply_element(state, pure_perm(G, Permutation.transposition(k, l)))
            out = term if out is None else out.plus(term)
        return out.scaled(1.0 / n)
    G = params.group
    terms = []
    for l in range(1, n + 1):
        t = pure_perm(G, Permutation.transposition(k, l))
        terms += [(multiply(t, x), c / n) for x, c in state.terms]
    return CyclicState(params, tuple(terms)).collect()


# ---------------------------------------------------------------------------
# averages over transposition words


@dataclass(frozen=True)
class Swap:
    """Placeholder for the transposition (site, l) with l a summation variable."""

    site: int
    var: int


def _falling(a: int, b: int) -> int:
    out = 1
    for j in range(b):
        out *= a - j
    return out


def averaged_value(params: ThomaParams, word: Sequence, n: int) -> complex:
    """n^-q sum over l_1..l_q in 1..n of <pi(w_1 w_2 ...) eta, eta>.

    ``word`` mixes WreathElements and :class:`Swap` items; there are q distinct
    variables.  Assignments are grouped by their coincidence pattern with the
    fixed window 1..M and with each other; fresh sites beyond M are
    interchangeable because matrix elements are class functions (checked in
    the test suite against the brute-force sum).
    """
    G = params.group
    fixed = [w for w in word if isinstance(w, WreathElement)]
    swaps = [w for w in word if isinstance(w, Swap)]
    q = len({w.var for w in swaps})
    M = max([w.max_point for w in fixed] + [w.site for w in swaps] + [0])
    if n < M:
        raise RealizationError(f"n={n} is below the fixed window 1..{M}")
    total = 0j

    def walk(v: int, assign: list[int], fresh: int):
        nonlocal total
        if v == q:
            weight = _falling(n - M, fresh)
            if weight == 0:
                return
            g = WreathElement.identity(G)
            for w in word:
                if isinstance(w, Swap):
                    w = pure_perm(G, Permutation.transposition(w.site, assign[w.var]))
                g = multiply(g, w)
            total += weight * matrix_element(params, g)
            return
        for site in range(1, M + fresh + 2):
            if site > M + fresh:
                walk(v + 1, assign + [site], fresh + 1)
            else:
                walk(v + 1, assign + [site], fresh)

    walk(0, [], 0)
    return total / n ** q


def averaged_value_bruteforce(params: ThomaParams, word: Sequence, n: int) -> complex:
    G = params.group
    q = len({w.var for w in word if isinstance(w, Swap)})
    total = 0j
    for assign in itertools.product(range(1, n + 1), repeat=q):
        g = WreathElement.identity(G)
        for w in word:
            if isinstance(w, Swap):
                w = pure_perm(G, Permutation.transposition(w.site, assign[w.var]))
            g = multiply(g, w)
        total += matrix_element(params, g)
    return total / n ** q


def predicted_moment(params: ThomaParams, q: int) -> float:
    """Limit of <O_k^q eta, eta>: sum alpha^{q+1} dim + (-1)^q sum beta^{q+1} dim."""
    if q == 0:
        return 1.0
    return params.power_sum(q + 1)


@dataclass(frozen=True)
class MomentResult:
    q: int
    n: int
    measured: float
    predicted: float

    @property
    def gap(self) -> float:
        return abs(self.measured - self.predicted)


def moment_check(params: ThomaParams, k: int, q: int, n: int) -> MomentResult:
    if not 1 <= q <= 4:
        raise RealizationError("moments are supported for 1 <= q <= 4")
    word = [Swap(k, v) for v in range(q)]
    val = averaged_value(params, word, n)
    return MomentResult(q, n, float(val.real), predicted_moment(params, q))


def spectral_moment_identity(params: ThomaParams, q: int) -> float:
    """|sum_i w_i x_i^q - predicted| over the spectral weights (an algebraic check)."""
    return abs(sum(w * x ** q for x, w in params.spectral_weights()) - predicted_moment(params, q))


@dataclass(frozen=True)
class FactorizationResult:
    n: int
    lhs: complex
    rhs: complex
    scale: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def factorization_check(params: ThomaParams, g: WreathElement, r: dict[int, int], n: int) -> FactorizationResult:
    """Compare <pi(g) prod_j O_j^{r_j} eta, eta> with the product over orbits
    of <pi(gamma^{(i)}) O_i^{|p|-1+sum r} eta, eta>, i = min(p)."""
    G = params.group
    word: list = [g]
    var = 0
    for j in sorted(r):
        for _ in range(r[j]):
            word.append(Swap(j, var))
            var += 1
    lhs = averaged_value(params, word, n)
    orbs = orbits(g)
    covered = set().union(*map(set, orbs)) if orbs else set()
    orbs += [(j,) for j in sorted(r) if j not in covered]
    rhs = 1.0 + 0j
    for orb in orbs:
        i = min(orb)
        x = cycle_product(g, orb) if len(orb) > 1 or orb[0] in g.support else G.identity
        q = len(orb) - 1 + sum(r.get(j, 0) for j in orb)
        fword = [pure_tuple(G, GammaTuple.from_dict(G, {i: x}))] + [Swap(i, v) for v in range(q)]
        rhs *= averaged_value(params, fword, n)
    return FactorizationResult(n, lhs, rhs, 1.0 / n)


@dataclass(frozen=True)
class SpectralResult:
    n: int
    eigenvalues: tuple[float, ...]
    kept: int
    pruned: int


def spectral_scan(params: ThomaParams, k: int, n: int, probe_dim: int = 3,
                  probe_entries: Sequence[int] | None = None, gram_tol: float = 1e-8) -> SpectralResult:
    """Rayleigh-Ritz values of O_k on span{O_k^j pi(x at k) eta : x in probe_entries, j < probe_dim}.

    The default probe is the single Krylov chain on eta.  O_k is self-adjoint,
    so every Gram and compression entry is one average of a transposition
    word.  Directions whose Gram eigenvalue falls below ``gram_tol`` (relative)
    are pruned and counted.
    """
    G = params.group
    xs = [G.identity] if probe_entries is None else [G.index_of(x) for x in probe_entries]
    probes = [(x, j) for x in xs for j in range(probe_dim)]
    tup = {x: pure_tuple(G, GammaTuple.from_dict(G, {k: x})) for x in range(G.order)}
    P = len(probes)
    Gram = np.zeros((P, P), dtype=complex)
    H = np.zeros((P, P), dtype=complex)
    memo = {}

    def mom(x, y, q):
        # <O^q pi(x) eta, pi(y) eta>
        key = (x, y, q)
        if key not in memo:
            word = [tup[int(G.inv[y])]] + [Swap(k, v) for v in range(q)] + [tup[x]]
            memo[key] = averaged_value(params, word, n)
        return memo[key]

    for a, (x, i) in enumerate(probes):
        for b, (y, j) in enumerate(probes):
            Gram[b, a] = mom(x, y, i + j)
            H[b, a] = mom(x, y, i + j + 1)
    Gram = (Gram + Gram.conj().T) / 2
    H = (H + H.conj().T) / 2
    w, V = np.linalg.eigh(Gram)
    keep = w > gram_tol * max(w.max(), 1.0)
    W = V[:, keep] / np.sqrt(w[keep])
    Hr = W.conj().T @ H @ W
    ev = np.linalg.eigvalsh((Hr + Hr.conj().T) / 2)
    return SpectralResult(n, tuple(float(e) for e in ev), int(keep.sum()), int((~keep).sum()))


def commutator_decay(params: ThomaParams, k: int, gamma: GammaTuple, n: int) -> float:
    """|| (O_k pi(gamma) - pi(gamma) O_k) eta || for gamma supported at site k."""
    G = params.group
    if not gamma.support <= {k}:
        raise RealizationError("gamma must be supported at site k")
    g = pure_tuple(G, gamma)
    gi = inverse(g)
    s0, s1 = Swap(k, 0), Swap(k, 1)
    aa = averaged_value(params, [gi, s1, s0, g], n)
    bb = averaged_value(params, [s1, s0], n)
    ab = averaged_value(params, [s1, gi, s0, g], n)
    ba = averaged_value(params, [gi, s1, g, s0], n)
    return float(np.sqrt(max((aa + bb - ab - ba).real, 0.0)))


def okounkov_commutator(params: ThomaParams, k: int, l: int, n: int) -> float:
    """|| (O_k O_l - O_l O_k) eta ||."""
    x = [Swap(k, 0), Swap(l, 1)]
    y = [Swap(l, 1), Swap(k, 0)]
    inv = lambda w: list(reversed(w))
    # <(X - Y) eta, (X - Y) eta> with X = O_k O_l, Y = O_l O_k; transpositions are involutions
    xx = averaged_value(params, _rename(inv(x), 2) + x, n)
    yy = averaged_value(params, _rename(inv(y), 2) + y, n)
    xy = averaged_value(params, _rename(inv(y), 2) + x, n)
    yx = averaged_value(params, _rename(inv(x), 2) + y, n)
    return float(np.sqrt(max((xx + yy - xy - yx).real, 0.0)))


def _rename(word, shift):
    return [Swap(w.site, w.var + shift) if isinstance(w, Swap) else w for w in word]

