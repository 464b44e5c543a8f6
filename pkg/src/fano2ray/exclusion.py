"""Numerical exclusion tests and non-solidity witnesses, in exact rationals.

Two intersection-number tests rule out smooth points and curves as centers
of non-canonical singularities on the five solid-candidate families, and a
projection to the first two coordinates exhibits every other family as
birational to a fibration over the line.  No floating point is used
anywhere; all report values are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .catalog import FamilyRecord, Weights, anticanonical_cube, load_catalog

#: Families whose projection fibre is a complete intersection rather than a
#: hypersurface (the degree-a0*a1 pencil member is needed to cut the fibre).
COMPLETE_INTERSECTION_FAMILIES = frozenset({122, 127, 129, 130})

SMOOTH_POINT_THRESHOLD = Fraction(4)
CURVE_THRESHOLD = Fraction(1)

_BASE_LOCUS_NOTE = (
    "assumes the members through the point cut a zero-dimensional base locus "
    "(recorded assumption, not verified)"
)


class InvariantBreach(RuntimeError):
    """An internally guaranteed inequality failed; indicates corrupt data."""


@dataclass(frozen=True)
class ExclusionReport:
    """Outcome of one numerical test, certified iff value <= threshold."""

    kind: str  # "smooth_point" | "curve"
    family: int
    test_value: Fraction
    threshold: Fraction
    certified: bool
    h_degree: int | None = None
    notes: tuple[str, ...] = ()


def default_h_degree(record: FamilyRecord) -> int:
    """Cutting degree used by the smooth-point test when none is given."""
    if record.id == 110:
        return 15
    a = record.weights
    return a[1] * a[2] * a[3]


def smooth_point_test(record: FamilyRecord, h_degree: int | None = None) -> ExclusionReport:
    """Intersection bound ``h * index^2 * degree / prod(weights)`` against 4.

    The test value scales linearly in ``h_degree``, so certification at some
    ``h`` implies certification at every smaller valid ``h``.
    """
    h = default_h_degree(record) if h_degree is None else int(h_degree)
    if h < 1:
        raise ValueError("cutting degree must be positive")
    value = Fraction(h * record.index**2 * record.degree, prod(record.weights))
    certified = value <= SMOOTH_POINT_THRESHOLD
    notes = (_BASE_LOCUS_NOTE,)
    if not certified:
        notes += (f"test value {value} exceeds 4: no exclusion at h={h}",)
    return ExclusionReport(
        kind="smooth_point",
        family=record.id,
        test_value=value,
        threshold=SMOOTH_POINT_THRESHOLD,
        certified=certified,
        h_degree=h,
        notes=notes,
    )


def curve_test(record: FamilyRecord) -> ExclusionReport:
    """Anticanonical cube against 1 (curves in the smooth locus)."""
    value = anticanonical_cube(record)
    return ExclusionReport(
        kind="curve",
        family=record.id,
        test_value=value,
        threshold=CURVE_THRESHOLD,
        certified=value <= CURVE_THRESHOLD,
    )


@dataclass(frozen=True)
class FibrationWitness:
    """Exact data exhibiting a birational map to a fibration over the line.

    The projection to the first two coordinates has fibres of negative
    canonical degree: a degree-``d`` hypersurface in the truncated ambient
    space, or (for the four listed families) the complete intersection of
    the member with one degree-``a0*a1`` pencil member selected by an opaque
    parameter.
    """

    family: int
    target: tuple[int, int]
    index_check: bool
    kind: str  # "hypersurface" | "complete_intersection"
    ambient: Weights
    degrees: tuple[int, ...]
    fibre_canonical_degree: int
    pencil: str | None = None


def fibration_witness(record: FamilyRecord) -> FibrationWitness | None:
    """The projection witness, or ``None`` when ``a0*a1 >= index``."""
    a = record.weights
    if a[0] * a[1] >= record.index:
        return None
    if record.id in COMPLETE_INTERSECTION_FAMILIES:
        witness = FibrationWitness(
            family=record.id,
            target=(a[0], a[1]),
            index_check=True,
            kind="complete_intersection",
            ambient=a,
            degrees=(record.degree, a[0] * a[1]),
            fibre_canonical_degree=record.degree + a[0] * a[1] - sum(a),
            pencil=f"x1^{a[0]} = lambda * x0^{a[1]}",
        )
    else:
        witness = FibrationWitness(
            family=record.id,
            target=(a[0], a[1]),
            index_check=True,
            kind="hypersurface",
            ambient=a[1:],
            degrees=(record.degree,),
            fibre_canonical_degree=record.degree - sum(a[1:]),
        )
    if witness.fibre_canonical_degree >= 0:
        raise InvariantBreach(
            f"family {record.id}: index check passed but the fibre canonical "
            f"degree is {witness.fibre_canonical_degree}"
        )
    return witness


@dataclass(frozen=True)
class SoliditySummary:
    witnessed: tuple[int, ...]
    witness_less: tuple[int, ...]


def solidity_summary() -> SoliditySummary:
    """Partition the catalog by existence of a fibration witness."""
    witnessed = []
    witness_less = []
    for record in load_catalog():
        if fibration_witness(record) is None:
            witness_less.append(record.id)
        else:
            witnessed.append(record.id)
    return SoliditySummary(witnessed=tuple(witnessed), witness_less=tuple(witness_less))
