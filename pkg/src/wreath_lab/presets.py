"""Named parameter sets used by the tests, demos and CLI."""

from __future__ import annotations

from .finite_group import build_group
from .thoma import ThomaParams, Tr0


def _params(group: str, alpha, beta, tr0) -> ThomaParams:
    G = build_group(group)
    if isinstance(tr0, list):
        tr0 = Tr0("mix", tuple((c, G.irrep(name)) for c, name in tr0))
    else:
        tr0 = Tr0(tr0)
    return ThomaParams(
        G,
        tuple((w, G.irrep(name)) for w, name in alpha),
        tuple((w, G.irrep(name)) for w, name in beta),
        tr0,
    )


_TABLE = {
    "z2-standard": ("cyclic 2", [(0.5, "sign")], [(0.25, "trivial")], "regular"),
    "z2-b": ("cyclic 2", [(0.3, "trivial"), (0.2, "sign")], [(0.15, "sign"), (0.1, "trivial")], "trivial"),
    "z3-a": ("cyclic 3", [(0.4, "chi1")], [(0.3, "chi2")], "regular"),
    "z3-b": ("cyclic 3", [(0.25, "chi0"), (0.25, "chi2")], [(0.2, "chi1")], [(0.5, "chi0"), (0.5, "chi1")]),
    "s3-a": ("symmetric 3", [(0.3, "standard")], [(0.2, "sign")], "regular"),
    "s3-b": ("symmetric 3", [(0.25, "trivial")], [(0.2, "standard"), (0.1, "sign")],
             [(0.5, "standard"), (0.5, "trivial")]),
}

PRESET_NAMES = tuple(_TABLE)


def preset(name: str) -> ThomaParams:
    if name not in _TABLE:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return _params(*_TABLE[name])


def standard_z2() -> ThomaParams:
    """alpha = (0.5, sign), beta = (0.25, trivial), regular residual trace."""
    return preset("z2-standard")
