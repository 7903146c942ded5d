"""Verification toolkit for the discriminator of a^3 + a modulo squares."""

from .casekit import (
    CaseTag,
    CollisionCertificate,
    FactoredModulus,
    classify,
    collide,
    factorize,
    k_of,
    validate_range,
    verify_certificate,
)
from .verify import check_theorem, d_of, lemma1_check, lemma2_scan, range_scan, residue_injective

__version__ = "0.1.0"
