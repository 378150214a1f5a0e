"""Indecomposable characters of the wreath product from Thoma-type parameters.

Convention: the traces attached to the alpha and beta weights are unnormalized
matrix traces (Tr(e) = dim), while the residual trace ``tr0`` is normalized
(tr0(e) = 1).  With that split the constraint
``sum alpha_k dim + sum beta_k dim + delta = 1`` is exactly phi(e) = 1.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .finite_group import (
    GroupTable,
    GroupValidationError,
    MatrixRep,
    character_of,
    check_irreducible,
    dual_as_rep,
    dual_group,
    load_group,
)
from .wreath import (
    WreathElement,
    cycle_decompose,
    cycle_product,
    multiply,
    inverse,
    orbit_count,
    orbits,
    pure_perm,
    Permutation,
)

WEIGHT_TOL = 1e-12
MAX_ALT_M = 8


class ParamsError(ValueError):
    pass


@dataclass(frozen=True)
class Tr0:
    """Residual normalized trace: ``"regular"`` (delta at e), ``"trivial"`` or a convex mix."""

    kind: str = "regular"
    mix: tuple[tuple[float, MatrixRep], ...] = ()

    def values(self, G: GroupTable) -> np.ndarray:
        if self.kind == "regular":
            out = np.zeros(G.order, dtype=complex)
            out[G.identity] = 1.0
            return out
        if self.kind == "trivial":
            return np.ones(G.order, dtype=complex)
        out = np.zeros(G.order, dtype=complex)
        for c, rep in self.mix:
            out += c * character_of(rep) / rep.dim
        return out

    def describe(self):
        if self.kind != "mix":
            return self.kind
        return {"mix": [{"irrep": r.name, "coef": c} for c, r in self.mix]}


@dataclass(frozen=True, eq=False)
class ThomaParams:
    group: GroupTable
    alpha: tuple[tuple[float, MatrixRep], ...] = ()
    beta: tuple[tuple[float, MatrixRep], ...] = ()
    tr0: Tr0 = field(default_factory=Tr0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple((float(w), r) for w, r in self.alpha))
        object.__setattr__(self, "beta", tuple((float(w), r) for w, r in self.beta))
        for label, seq in (("alpha", self.alpha), ("beta", self.beta)):
            ws = [w for w, _ in seq]
            if any(not 0.0 < w <= 1.0 for w in ws):
                raise ParamsError(f"{label} weights must lie in (0, 1]: {ws}")
            if any(b > a + WEIGHT_TOL for a, b in zip(ws, ws[1:])):
                raise ParamsError(f"{label} weights must be non-increasing: {ws}")
        total = sum(w * r.dim for w, r in self.alpha + self.beta)
        if total > 1.0 + WEIGHT_TOL:
            raise ParamsError(f"sum of weight*dim is {total:.15g} > 1")
        reps = [r for _, r in self.alpha + self.beta]
        if self.tr0.kind == "mix":
            coefs = [c for c, _ in self.tr0.mix]
            if any(c < 0 for c in coefs) or abs(sum(coefs) - 1.0) > WEIGHT_TOL:
                raise ParamsError(f"tr0 mix coefficients must be a probability vector: {coefs}")
            reps += [r for _, r in self.tr0.mix]
        elif self.tr0.kind not in ("regular", "trivial"):
            raise ParamsError(f"unknown tr0 kind {self.tr0.kind!r}")
        try:
            check_irreducible(self.group, reps)
        except GroupValidationError as exc:
            raise ParamsError(str(exc)) from None

    @property
    def delta(self) -> float:
        return max(0.0, 1.0 - sum(w * r.dim for w, r in self.alpha + self.beta))

    def spectral_weights(self) -> list[tuple[float, float]]:
        """(point, mass) pairs: alpha_k at alpha_k*dim, -beta_k at beta_k*dim, 0 at delta."""
        out = [(w, w * r.dim) for w, r in self.alpha]
        out += [(-w, w * r.dim) for w, r in self.beta]
        out.append((0.0, self.delta))
        return out

    def power_sum(self, l: int) -> float:
        """Single-cycle value with trivial entries: sum alpha'^l + (-1)^(l-1) sum beta'^l."""
        a = sum(r.dim * w ** l for w, r in self.alpha)
        b = sum(r.dim * w ** l for w, r in self.beta)
        return a + (-1) ** (l - 1) * b

    @property
    def _tables(self):
        cache = self.__dict__.get("_cache")
        if cache is None:
            cache = (
                np.array([character_of(r) for _, r in self.alpha]).reshape(len(self.alpha), self.group.order),
                np.array([character_of(r) for _, r in self.beta]).reshape(len(self.beta), self.group.order),
                self.tr0.values(self.group),
            )
            self.__dict__["_cache"] = cache
        return cache

    def orbit_factor(self, length: int, x: int) -> complex:
        """Bracket of the character formula for one orbit of given length and cycle product x."""
        chi_a, chi_b, t0 = self._tables
        aw = np.array([w for w, _ in self.alpha])
        bw = np.array([w for w, _ in self.beta])
        val = complex(np.sum(aw ** length * chi_a[:, x])) if len(aw) else 0j
        if len(bw):
            val += (-1) ** (length - 1) * complex(np.sum(bw ** length * chi_b[:, x]))
        if length == 1:
            val += self.delta * t0[x]
        return val


def _check_same_group(params, g: WreathElement):
    if params.group is not g.group and params.group != g.group:
        raise ParamsError(f"element over {g.group.name}, parameters over {params.group.name}")


def evaluate(params: ThomaParams, g: WreathElement) -> complex:
    _check_same_group(params, g)
    val = 1.0 + 0j
    for orb in orbits(g):
        val *= params.orbit_factor(len(orb), cycle_product(g, orb))
    return val


def thoma_classical(params: ThomaParams, cycle_type: Sequence[int]) -> float:
    val = 1.0
    for l in cycle_type:
        if l > 1:
            val *= params.power_sum(int(l))
    return val


def gram_matrix(params: ThomaParams, elements: Sequence[WreathElement]) -> np.ndarray:
    if len(elements) > 64:
        raise ParamsError("gram matrices are limited to 64 elements")
    invs = [inverse(x) for x in elements]
    n = len(elements)
    M = np.empty((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            M[j, k] = evaluate(params, multiply(elements[j], invs[k]))
    return M


def gram_psd(params: ThomaParams, elements: Sequence[WreathElement]) -> float:
    M = gram_matrix(params, elements)
    return float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])


def centrality_residual(params: ThomaParams, g: WreathElement, h: WreathElement) -> float:
    return abs(evaluate(params, multiply(g, h)) - evaluate(params, multiply(h, g)))


def check_multiplicativity(params: ThomaParams, g: WreathElement) -> float:
    prod = 1.0 + 0j
    for perm, tup in cycle_decompose(g):
        prod *= evaluate(params, WreathElement(perm, tup, g.group))
    return abs(evaluate(params, g) - prod)


# ---------------------------------------------------------------------------
# abelian base groups


@dataclass(frozen=True, eq=False)
class AbelianParams:
    """Measure ``mu`` on the dual group plus weights attached to dual characters (by index)."""

    group: GroupTable
    mu: tuple[float, ...]
    alpha: tuple[tuple[float, int], ...] = ()
    beta: tuple[tuple[float, int], ...] = ()

    def __post_init__(self):
        if not self.group.is_abelian():
            raise ParamsError(f"{self.group.name} is not abelian")
        mu = np.asarray(self.mu, dtype=float)
        if mu.shape != (self.group.order,) or np.any(mu < 0) or abs(mu.sum() - 1) > WEIGHT_TOL:
            raise ParamsError("mu must be a probability vector over the dual group")
        if sum(w for w, _ in self.alpha + self.beta) > 1 + WEIGHT_TOL:
            raise ParamsError("sum of alpha and beta exceeds 1")

    @property
    def duals(self) -> list[np.ndarray]:
        cached = self.__dict__.get("_duals")
        if cached is None:
            cached = dual_group(self.group)
            self.__dict__["_duals"] = cached
        return cached

    def to_thoma(self) -> ThomaParams:
        d = self.duals
        mk = lambda seq, tag: tuple((w, dual_as_rep(d[i], f"{tag}{i}")) for w, i in seq)
        mix = tuple((float(c), dual_as_rep(d[i], f"mu{i}")) for i, c in enumerate(self.mu) if c > 0)
        return ThomaParams(self.group, mk(self.alpha, "dual"), mk(self.beta, "dual"), Tr0("mix", mix))


def evaluate_abelian(params: AbelianParams, g: WreathElement) -> complex:
    _check_same_group(params, g)
    G = g.group
    d = params.duals
    rest = 1.0 - sum(w for w, _ in params.alpha + params.beta)
    val = 1.0 + 0j
    for orb in orbits(g):
        x = G.product(g.entry(k) for k in orb)
        L = len(orb)
        term = sum(w ** L * d[i][x] for w, i in params.alpha)
        term += sum((-1) ** (L - 1) * w ** L * d[i][x] for w, i in params.beta)
        if L == 1:
            term += rest * sum(c * d[i][x] for i, c in enumerate(params.mu))
        val *= term
    return val


# ---------------------------------------------------------------------------
# symmetric-group sums over orbits


def _orbit_counts(m: int):
    """Yields (sign, number of orbits on 1..m) for every permutation of S_m."""
    for p in itertools.permutations(range(m)):
        seen = [False] * m
        cycles = 0
        for i in range(m):
            if not seen[i]:
                cycles += 1
                j = i
                while not seen[j]:
                    seen[j] = True
                    j = p[j]
        yield (-1) ** ((m - cycles) % 2), cycles


def orbit_polynomial(m: int, signed: bool = True) -> list[int]:
    """Integer coefficients c_j of sum_s sgn(s)^signed t^{|orbits(s)|}, index = power."""
    if not 1 <= m <= MAX_ALT_M:
        raise ParamsError(f"m must lie in 1..{MAX_ALT_M}")
    coeffs = [0] * (m + 1)
    for sgn, c in _orbit_counts(m):
        coeffs[c] += sgn if signed else 1
    return coeffs


def factorial_polynomial(m: int, rising: bool = False) -> list[int]:
    """Coefficients of t(t-1)...(t-m+1), or t(t+1)...(t+m-1) when rising."""
    coeffs = [1]
    for j in range(m):
        shift = j if rising else -j
        new = [0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k + 1] += c
            new[k] += shift * c
        coeffs = new
    return coeffs


def check_alternating_identity(m: int, signed: bool = True) -> bool:
    """Exact integer check of the orbit-count sums against falling (rising) factorials."""
    return orbit_polynomial(m, signed) == factorial_polynomial(m, rising=not signed)


def alternating_sum(nu, m: int, signed: bool = True):
    """sum over S_m of sgn(s) nu^{|orbits(s)|} (sign dropped when ``signed`` is False).

    Exact for ``int`` or ``Fraction`` input.
    """
    if not 1 <= m <= MAX_ALT_M:
        raise ParamsError(f"m must lie in 1..{MAX_ALT_M}")
    exact = isinstance(nu, (int, Fraction))
    total = Fraction(0) if exact else 0.0
    for sgn, c in _orbit_counts(m):
        total += (sgn if signed else 1) * nu ** c
    return total


def power_character(nu, s: Permutation, m: int):
    """nu^{|orbits(s) on 1..m|} / nu^m."""
    return nu ** (orbit_count(s, m) - m)


# ---------------------------------------------------------------------------
# parameter files


def _resolve_irrep(G: GroupTable, name: str) -> MatrixRep:
    try:
        return G.irrep(name)
    except KeyError:
        pass
    if G.is_abelian() and name.startswith("dual"):
        idx = int(name[4:])
        return dual_as_rep(dual_group(G)[idx], name)
    raise ParamsError(f"irrep {name!r} not found in group {G.name}")


def params_from_json(doc: dict, base: Path | None = None) -> ThomaParams:
    if "group" not in doc:
        raise ParamsError("params file missing field 'group'")
    src = doc["group"]
    if base is not None and isinstance(src, str) and src.endswith(".json"):
        cand = base / src
        src = cand if cand.exists() else src
    G = load_group(src)

    def seq(key):
        out = []
        for j, entry in enumerate(doc.get(key, [])):
            if "weight" not in entry or "irrep" not in entry:
                raise ParamsError(f"field '{key}[{j}]' needs 'weight' and 'irrep'")
            out.append((float(entry["weight"]), _resolve_irrep(G, entry["irrep"])))
        return tuple(out)

    raw = doc.get("tr0", "regular")
    if isinstance(raw, str):
        tr0 = Tr0(raw)
    elif isinstance(raw, dict) and "mix" in raw:
        tr0 = Tr0("mix", tuple((float(e["coef"]), _resolve_irrep(G, e["irrep"])) for e in raw["mix"]))
    else:
        raise ParamsError("field 'tr0' must be 'regular', 'trivial' or {'mix': [...]}")
    return ThomaParams(G, seq("alpha"), seq("beta"), tr0)


def params_to_json(params: ThomaParams, group_ref: str | None = None) -> dict:
    return {
        "group": group_ref or params.group.name,
        "alpha": [{"weight": w, "irrep": r.name} for w, r in params.alpha],
        "beta": [{"weight": w, "irrep": r.name} for w, r in params.beta],
        "tr0": params.tr0.describe(),
    }


def load_params(path) -> ThomaParams:
    path = Path(path)
    return params_from_json(json.loads(path.read_text()), path.parent)


def pure_cycle_element(G: GroupTable, cycle_type: Sequence[int]) -> WreathElement:
    """Permutation with the given cycle lengths on consecutive points, trivial entries."""
    cycles, start = [], 1
    for l in cycle_type:
        if l > 1:
            cycles.append(list(range(start, start + l)))
        start += l
    return pure_perm(G, Permutation.from_cycles(cycles))
