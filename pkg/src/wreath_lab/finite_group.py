"""Finite base groups given by multiplication tables.

A group is stored as integer index arithmetic (``mult[x][y]`` is the index of
``x*y``); representations are stacks of complex matrices, one per element.
"""

from __future__ import annotations

import cmath
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

MAX_CYCLIC_ORDER = 64
REP_TOL = 1e-10


class GroupValidationError(ValueError):
    """Raised when a multiplication table or representation is malformed."""


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """A matrix representation: ``images[x]`` is the ``dim x dim`` image of element ``x``."""

    name: str
    images: np.ndarray

    def __post_init__(self):
        images = np.asarray(self.images, dtype=complex)
        if images.ndim != 3 or images.shape[1] != images.shape[2]:
            raise GroupValidationError(f"rep {self.name!r}: images must have shape (N, d, d)")
        images.setflags(write=False)
        object.__setattr__(self, "images", images)

    @property
    def dim(self) -> int:
        return self.images.shape[1]

    def __repr__(self):
        return f"MatrixRep({self.name!r}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class GroupTable:
    name: str
    mult: np.ndarray
    identity: int
    inv: np.ndarray
    element_names: tuple[str, ...]
    irreps: tuple[MatrixRep, ...] = ()
    aliases: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.mult)

    def __eq__(self, other):
        if not isinstance(other, GroupTable):
            return NotImplemented
        return self is other or (
            self.order == other.order and np.array_equal(self.mult, other.mult)
        )

    def __hash__(self):
        return hash((self.order, self.mult.tobytes()))

    def __repr__(self):
        return f"GroupTable({self.name!r}, order={self.order})"

    def mul(self, x: int, y: int) -> int:
        return int(self.mult[x, y])

    def product(self, xs) -> int:
        out = self.identity
        for x in xs:
            out = int(self.mult[out, x])
        return out

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = int(self.mult[y, x])
            k += 1
        return k

    def index_of(self, label) -> int:
        """Resolve an element label (name, alias or integer index) to an index."""
        if isinstance(label, (int, np.integer)):
            idx = int(label)
        elif label in self.element_names:
            idx = self.element_names.index(label)
        elif label in self.aliases:
            idx = self.aliases[label]
        elif isinstance(label, str) and label.isdigit():
            idx = int(label)
        else:
            raise KeyError(f"unknown element {label!r} in group {self.name}")
        if not 0 <= idx < self.order:
            raise KeyError(f"element index {idx} out of range for group {self.name}")
        return idx

    def irrep(self, name: str) -> MatrixRep:
        for rep in self.irreps:
            if rep.name == name:
                return rep
        raise KeyError(f"group {self.name} has no irrep named {name!r}")


@dataclass(frozen=True)
class ConjClasses:
    class_of: tuple[int, ...]
    representatives: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.representatives)

    def sizes(self) -> list[int]:
        return [self.class_of.count(c) for c in range(self.count)]


@dataclass(frozen=True)
class RepReport:
    name: str
    homomorphism_residual: float
    unitarity_residual: float
    norm_sq: float

    @property
    def is_representation(self) -> bool:
        return self.homomorphism_residual <= REP_TOL and self.unitarity_residual <= REP_TOL

    @property
    def irreducible(self) -> bool:
        return self.is_representation and abs(self.norm_sq - 1.0) <= REP_TOL

    @property
    def ok(self) -> bool:
        return self.irreducible


# ---------------------------------------------------------------------------
# construction and validation


def _validate_table(mult: np.ndarray) -> tuple[int, np.ndarray]:
    n = len(mult)
    if mult.shape != (n, n):
        raise GroupValidationError(f"multiplication table must be square, got {mult.shape}")
    full = set(range(n))
    for i in range(n):
        if set(mult[i].tolist()) != full:
            raise GroupValidationError(f"row {i} is not a permutation of 0..{n - 1}")
        if set(mult[:, i].tolist()) != full:
            raise GroupValidationError(f"column {i} is not a permutation of 0..{n - 1}")
    # associativity: (xy)z == x(yz), vectorized per x
    for x in range(n):
        lhs = mult[mult[x]]          # lhs[y, z] = (x y) z
        rhs = mult[x][mult]          # rhs[y, z] = x (y z)
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            y, z = bad[0]
            raise GroupValidationError(f"table is not associative at triple ({x}, {y}, {z})")
    ids = [e for e in range(n) if np.array_equal(mult[e], np.arange(n))
           and np.array_equal(mult[:, e], np.arange(n))]
    if not ids:
        raise GroupValidationError("table has no identity element")
    e = ids[0]
    inv = np.array([int(np.flatnonzero(mult[x] == e)[0]) for x in range(n)])
    return e, inv


def from_table(mult, name: str = "custom", element_names=None, irreps=(), aliases=None) -> GroupTable:
    mult = np.asarray(mult, dtype=np.int64)
    identity, inv = _validate_table(mult)
    mult.setflags(write=False)
    inv.setflags(write=False)
    if element_names is None:
        element_names = tuple("e" if x == identity else str(x) for x in range(len(mult)))
    group = GroupTable(name, mult, identity, inv, tuple(element_names), (), dict(aliases or {}))
    for rep in irreps:
        if rep.images.shape[0] != group.order:
            raise GroupValidationError(f"rep {rep.name!r} has {rep.images.shape[0]} images, group order {group.order}")
    object.__setattr__(group, "irreps", tuple(irreps))
    return group


def _cyclic(n: int) -> GroupTable:
    if not 1 <= n <= MAX_CYCLIC_ORDER:
        raise GroupValidationError(f"built-in cyclic groups need 1 <= n <= {MAX_CYCLIC_ORDER}")
    mult = np.add.outer(np.arange(n), np.arange(n)) % n
    names = ["e"] + ["g" if k == 1 else f"g{k}" for k in range(1, n)]
    aliases = {"g1": 1} if n > 1 else {}
    irreps = []
    for j in range(n):
        vals = np.array([cmath.exp(2j * cmath.pi * j * x / n) for x in range(n)])
        vals = np.where(np.abs(vals.imag) < 1e-15, vals.real, vals)
        irreps.append(MatrixRep(f"chi{j}", vals.reshape(n, 1, 1)))
    # convenient names
    irreps.append(MatrixRep("trivial", np.ones((n, 1, 1))))
    if n == 2:
        irreps.append(MatrixRep("sign", np.array([1.0, -1.0]).reshape(2, 1, 1)))
    return from_table(mult, f"cyclic {n}", names, irreps, aliases)


def _s3_elements() -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(3)))


def _s3_name(p: tuple[int, ...]) -> str:
    moved = [i for i in range(3) if p[i] != i]
    if not moved:
        return "e"
    if len(moved) == 2:
        return "t" + "".join(map(str, moved))
    return "c0" + str(p[0]) + str(p[p[0]])


def _symmetric3() -> GroupTable:
    elems = _s3_elements()
    index = {p: k for k, p in enumerate(elems)}
    mult = [[index[tuple(a[b[i]] for i in range(3))] for b in elems] for a in elems]
    # standard rep: permutation matrices restricted to the complement of (1,1,1)
    basis = np.array([[1, -1, 0], [1, 1, -2]], dtype=float).T
    basis /= np.linalg.norm(basis, axis=0)
    perm_mats = []
    for p in elems:
        P = np.zeros((3, 3))
        for i in range(3):
            P[p[i], i] = 1.0
        perm_mats.append(basis.T @ P @ basis)
    sign = [np.linalg.det(np.eye(3)[list(p)]) for p in elems]
    irreps = [
        MatrixRep("trivial", np.ones((6, 1, 1))),
        MatrixRep("sign", np.array(sign).reshape(6, 1, 1)),
        MatrixRep("standard", np.array(perm_mats)),
    ]
    return from_table(mult, "symmetric 3", [_s3_name(p) for p in elems], irreps)


def _symmetric(k: int) -> GroupTable:
    """S_k for k = 4, 5 with elements named by one-line notation; only the
    one-dimensional irreps are attached."""
    elems = list(itertools.permutations(range(k)))
    index = {p: j for j, p in enumerate(elems)}
    mult = [[index[tuple(a[b[i]] for i in range(k))] for b in elems] for a in elems]
    sign = [round(np.linalg.det(np.eye(k)[list(p)])) for p in elems]
    names = ["e" if p == tuple(range(k)) else "p" + "".join(map(str, p)) for p in elems]
    irreps = [MatrixRep("trivial", np.ones((len(elems), 1, 1))),
              MatrixRep("sign", np.array(sign, dtype=float).reshape(-1, 1, 1))]
    return from_table(mult, f"symmetric {k}", names, irreps)


def _klein4() -> GroupTable:
    mult = np.bitwise_xor.outer(np.arange(4), np.arange(4))
    irreps = []
    for j in range(4):
        vals = [(-1) ** bin(j & x).count("1") for x in range(4)]
        irreps.append(MatrixRep(f"chi{j}", np.array(vals, dtype=float).reshape(4, 1, 1)))
    irreps.append(MatrixRep("trivial", np.ones((4, 1, 1))))
    return from_table(mult, "klein4", ["e", "a", "b", "ab"], irreps)


_ALIASES = {"z": "cyclic", "c": "cyclic", "cyclic": "cyclic", "s": "symmetric", "symmetric": "symmetric"}


def build_group(spec) -> GroupTable:
    """Build a validated group from a descriptor.

    ``spec`` is a built-in name (``"cyclic 3"``, ``"Z3"``, ``"symmetric 3"``,
    ``"S3"``, ``"S4"``, ``"klein4"``), an explicit multiplication table, or a mapping in
    the group-file layout.
    """
    if isinstance(spec, GroupTable):
        return spec
    if isinstance(spec, dict):
        return group_from_json(spec)
    if not isinstance(spec, str):
        return from_table(spec)
    key = spec.strip().lower().replace("_", " ")
    if key in ("klein4", "klein 4", "v4", "z2xz2"):
        return _klein4()
    word = key.rstrip("0123456789").strip()
    digits = key[len(word):].strip()
    kind = _ALIASES.get(word)
    if kind is None or not digits.isdigit():
        raise GroupValidationError(f"unknown group descriptor {spec!r}")
    n = int(digits)
    if kind == "cyclic":
        return _cyclic(n)
    if n == 3:
        return _symmetric3()
    if n in (4, 5):
        return _symmetric(n)
    raise GroupValidationError("built-in symmetric groups are S3, S4, S5; pass others as explicit tables")


# ---------------------------------------------------------------------------
# classes, characters, duals


def conjugacy_classes(G: GroupTable) -> ConjClasses:
    class_of = [-1] * G.order
    reps = []
    for x in range(G.order):
        if class_of[x] >= 0:
            continue
        cid = len(reps)
        reps.append(x)
        for g in range(G.order):
            y = G.mult[G.mult[g, x], G.inv[g]]
            class_of[int(y)] = cid
    return ConjClasses(tuple(class_of), tuple(reps))


def character_of(rep: MatrixRep) -> np.ndarray:
    """Unnormalized character: ``chi[x] = trace(images[x])``."""
    return np.trace(rep.images, axis1=1, axis2=2)


def inner_product(G: GroupTable, chi1: np.ndarray, chi2: np.ndarray) -> complex:
    return complex(np.vdot(chi2, chi1) / G.order)


def validate_rep(G: GroupTable, rep: MatrixRep) -> RepReport:
    """Residuals of the homomorphism and unitarity laws plus ``<chi, chi>``.

    Never raises on a bad representation; the caller decides.
    """
    imgs = rep.images
    if imgs.shape[0] != G.order:
        return RepReport(rep.name, float("inf"), float("inf"), float("nan"))
    prod = np.einsum("xij,yjk->xyik", imgs, imgs)
    hom = float(np.max(np.abs(prod - imgs[G.mult]))) if G.order else 0.0
    eye = np.eye(rep.dim)
    uni = float(np.max(np.abs(imgs @ np.conj(np.transpose(imgs, (0, 2, 1))) - eye)))
    chi = character_of(rep)
    return RepReport(rep.name, hom, uni, inner_product(G, chi, chi).real)


def direct_sum(name: str, *reps: MatrixRep) -> MatrixRep:
    n = reps[0].images.shape[0]
    d = sum(r.dim for r in reps)
    out = np.zeros((n, d, d), dtype=complex)
    off = 0
    for r in reps:
        out[:, off:off + r.dim, off:off + r.dim] = r.images
        off += r.dim
    return MatrixRep(name, out)


def regular_rep(G: GroupTable) -> MatrixRep:
    """Left regular representation on l2(G)."""
    imgs = np.zeros((G.order, G.order, G.order))
    for g in range(G.order):
        imgs[g, G.mult[g], np.arange(G.order)] = 1.0
    return MatrixRep("regular", imgs)


def dual_group(G: GroupTable) -> list[np.ndarray]:
    """All multiplicative characters of an abelian group.

    Built by adjoining one cyclic generator at a time: a character of the
    subgroup H extends to H<g> in k ways, where k is the least power with
    g^k in H.
    """
    if not G.is_abelian():
        raise GroupValidationError(f"{G.name} is not abelian; dual group undefined")
    members = {G.identity: 0}           # element -> position in `elems`
    elems = [G.identity]
    chars = [[1.0 + 0j]]
    for g in range(G.order):
        if g in members:
            continue
        k, y = 1, g
        while y not in members:
            y = G.mul(y, g)
            k += 1
        # now g^k = y lies in H; enumerate cosets h g^j for j < k
        new_elems = []
        for j in range(k):
            gj = G.product([g] * j)
            for h in elems:
                new_elems.append(G.mul(h, gj))
        new_chars = []
        for chi in chars:
            target = chi[members[y]]
            base = cmath.exp(1j * cmath.phase(target) / k)
            for r in range(k):
                root = base * cmath.exp(2j * cmath.pi * r / k)
                vals = [chi[i] * root ** j for j in range(k) for i in range(len(elems))]
                new_chars.append(vals)
        elems = new_elems
        members = {x: i for i, x in enumerate(elems)}
        chars = new_chars
    out = []
    for chi in chars:
        vals = np.empty(G.order, dtype=complex)
        for x, pos in members.items():
            vals[x] = chi[pos]
        out.append(vals)
    out.sort(key=lambda v: tuple(np.round(np.angle(v) % (2 * np.pi), 9)))
    return out


def dual_as_rep(values: np.ndarray, name: str) -> MatrixRep:
    return MatrixRep(name, np.asarray(values, dtype=complex).reshape(-1, 1, 1))


# ---------------------------------------------------------------------------
# group file format


def _decode_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


def group_from_json(doc: dict) -> GroupTable:
    for key in ("mult",):
        if key not in doc:
            raise GroupValidationError(f"group file missing field {key!r}")
    mult = np.asarray(doc["mult"], dtype=np.int64)
    if "order" in doc and int(doc["order"]) != len(mult):
        raise GroupValidationError(f"field 'order' is {doc['order']} but table has {len(mult)} rows")
    irreps = []
    for entry in doc.get("irreps", []):
        mats = np.array([_decode_matrix(m) for m in entry["matrices"]])
        if "dim" in entry and mats.shape[1] != int(entry["dim"]):
            raise GroupValidationError(f"irrep {entry['name']!r}: dim field disagrees with matrices")
        irreps.append(MatrixRep(entry["name"], mats))
    return from_table(mult, doc.get("name", "custom"), doc.get("element_names"), irreps)


def group_to_json(G: GroupTable) -> dict:
    return {
        "name": G.name,
        "order": G.order,
        "mult": G.mult.tolist(),
        "element_names": list(G.element_names),
        "irreps": [
            {
                "name": r.name,
                "dim": r.dim,
                "matrices": [[[[z.real, z.imag] for z in row] for row in m] for m in r.images],
            }
            for r in G.irreps
        ],
    }


def load_group(source) -> GroupTable:
    """Group from a built-in name or a path to a JSON group file."""
    if isinstance(source, GroupTable):
        return source
    path = Path(str(source))
    if path.suffix == ".json" or path.exists():
        return group_from_json(json.loads(path.read_text()))
    return build_group(str(source))


def check_irreducible(G: GroupTable, reps: Sequence[MatrixRep]) -> None:
    for rep in reps:
        report = validate_rep(G, rep)
        if not report.irreducible:
            raise GroupValidationError(
                f"rep {rep.name!r} is not an irreducible unitary representation "
                f"(hom {report.homomorphism_residual:.2e}, unit {report.unitarity_residual:.2e}, "
                f"<chi,chi> {report.norm_sq:.6f})"
            )
