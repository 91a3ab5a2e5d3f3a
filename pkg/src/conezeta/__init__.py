"""Narrow partial zeta values of totally real fields as rational combinations of
conical zeta values, with exact coefficients and certified numerical checks."""
from importlib import resources

from .cones import Cone, EmbeddedVector, Membership, contains, is_smooth, transform_cone
from .errors import BudgetExceeded, ConeZetaError, InputError
from .field import FieldElement, NumberField, embed, load_field, make_field, norm, sign_at, trace
from .formula import CoefficientTable, ZetaCombination, assemble, expand_coefficients, symmetrize
from .intervals import Interval
from .lattice import (
    EmbeddedLattice,
    build_lattice,
    dual_norm_polynomial,
    load_lattice,
    norm_polynomial,
    regular_representation,
)
from .oracle import dedekind_zeta, splitting_type
from .shintani import DecompositionCertificate, Fan, decompose_quadratic, load_fan, verify_cover
from .summation import BACKEND, Enclosure, evaluate_combination, evaluate_conical_zeta

__version__ = "0.1.0"


def data_path(name: str) -> str:
    """Path of a bundled example file (sqrt5.json, cubic.json, cubic_fan.json, rationals.json)."""
    return str(resources.files(__package__) / "data" / name)
