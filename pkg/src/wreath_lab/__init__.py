"""Characters of the infinite wreath product Gamma wr S_infinity for a finite group Gamma."""

from .finite_group import GroupTable, build_group, load_group
from .fock import matrix_element
from .presets import preset
from .thoma import ThomaParams, Tr0, evaluate, gram_psd, thoma_classical
from .wreath import WreathElement, are_conjugate, format_element, parse_element

__all__ = [
    "GroupTable",
    "ThomaParams",
    "Tr0",
    "WreathElement",
    "are_conjugate",
    "build_group",
    "evaluate",
    "format_element",
    "gram_psd",
    "load_group",
    "matrix_element",
    "parse_element",
    "preset",
    "thoma_classical",
]
__version__ = "0.1.0"
