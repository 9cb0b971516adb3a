"""Dualizability analysis toolkit for finite automatic algebras."""

from .algebras import AutomaticAlgebra, apply_word, catalog, product, random_algebra
from .classify import Verdict, classify, gen_chain, normalize_algebra, verify_certificate

__all__ = [
    "AutomaticAlgebra", "Verdict", "apply_word", "catalog", "classify",
    "gen_chain", "normalize_algebra", "product", "random_algebra", "verify_certificate",
]
