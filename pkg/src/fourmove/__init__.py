"""Finiteness tests for the fourth-power quotients of alternating knot groups."""
from importlib.resources import files

from .fpgroup import (
    Presentation,
    abelianization_invariants,
    build_Gk,
    build_Gnk,
    conjugator_words,
    free_reduce,
    relator_canonical_form,
)
from .knotcodes import GaussCode, GaussCodeError, knot_presentation, parse_gauss_code, wirtinger_relators
from .knuthbendix import KbLimits, ShortlexOrder, complete, count_irreducible, is_consequence
from .pipeline import StageConfig, classify, probe_gn, run_census
from .toddcoxeter import TcLimits, enumerate_cosets, order
from .verify import SmallGroupTable, cross_check_order, hom_count


def census_path():
    """Path of the bundled census of 46 unresolved Gauss codes."""
    return files(__package__) / "data" / "unresolved_census.txt"
