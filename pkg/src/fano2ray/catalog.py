"""Catalog of the 35 quasi-smooth Fano threefold hypersurface families of index >= 2.

A family is a general hypersurface ``X_d`` in a weighted projective space
``P(a0,...,a4)`` whose Fano index ``sum(a_i) - d`` is at least two.  The
catalog stores the weights, the degree, the rationality of a general member
and the reference expectation data (distinguished points, end models of the
elementary links, exclusion games, recorded weight matrices) used by
:mod:`fano2ray.linkengine` to replay the full classification.

General members carry no coefficients anywhere in this package: every
downstream computation is combinatorial on monomial supports, with all
coefficients understood to be general and nonzero.

The embedded data lives in plain UTF-8 files under ``fano2ray/data/`` (see
the header comments of each file for its schema).  The directory can be
overridden with the ``FANO2RAY_DATA`` environment variable.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd, prod
from pathlib import Path

Weights = tuple[int, ...]
Monomial = tuple[int, ...]

#: Ambient coordinate names, by index.
VARIABLES = ("x0", "x1", "x2", "x3", "x4")

#: Families with no fibration witness; conjecturally the solid ones.
SOLID_CANDIDATES = frozenset({100, 101, 102, 103, 110})


class CatalogError(ValueError):
    """Embedded family data violates a structural invariant."""


# ---------------------------------------------------------------------------
# weighted-homogeneous combinatorics


def fano_index(weights: Weights, degree: int) -> int:
    """Fano index ``sum(weights) - degree`` of a degree-``degree`` hypersurface.

    A non-positive return value signals a non-Fano input; catalog loading
    rejects such records.
    """
    weights = tuple(weights)
    if len(weights) != 5:
        raise ValueError(f"expected 5 ambient weights, got {len(weights)}")
    if degree < 1:
        raise ValueError("degree must be positive")
    return sum(weights) - degree


@lru_cache(maxsize=None)
def _support(weights: Weights, degree: int) -> frozenset[Monomial]:
    if degree < 0:
        return frozenset()
    if not weights:
        return frozenset({()}) if degree == 0 else frozenset()
    head, tail = weights[0], weights[1:]
    out: set[Monomial] = set()
    for e in range(degree // head + 1):
        for rest in _support(tail, degree - e * head):
            out.add((e,) + rest)
    return frozenset(out)


def monomial_support(weights: Weights, degree: int) -> frozenset[Monomial]:
    """All exponent vectors ``e`` with ``sum(e_i * weights_i) == degree``.

    The empty set is a valid result (no monomials of that weighted degree).
    """
    weights = tuple(int(w) for w in weights)
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    return _support(weights, int(degree))


def weighted_degree(weights: Weights, monomial: Monomial) -> int:
    return sum(e * w for e, w in zip(monomial, weights, strict=True))


def well_form_weights(weights: Weights) -> Weights:
    """Well-formed weight vector of the same weighted projective space.

    Divides out the overall common factor, then repeatedly divides every
    common factor shared by all but one entry; the result is sorted
    nondecreasing.
    """
    ws = [int(w) for w in weights]
    if len(ws) < 2 or any(w <= 0 for w in ws):
        raise ValueError("need at least two positive weights")
    g = gcd(*ws)
    ws = [w // g for w in ws]
    changed = True
    while changed:
        changed = False
        for i in range(len(ws)):
            q = gcd(*(w for j, w in enumerate(ws) if j != i))
            if q > 1:
                ws = [w if j == i else w // q for j, w in enumerate(ws)]
                changed = True
    return tuple(sorted(ws))


# ---------------------------------------------------------------------------
# expectation data (reference tables, kept verbatim with known misprints)


@dataclass(frozen=True)
class LinkExpectation:
    """Recorded end model of the elementary link from one distinguished point."""

    family: int
    point: str
    kawamata_type: tuple[int, int, int]
    label: str
    target_weights: Weights
    target_degrees: tuple[int, ...]
    construction: str  # "hypersurface" | "unprojection"


@dataclass(frozen=True)
class ExclusionExpectation:
    """Recorded exclusion game at one non-distinguished quotient singularity."""

    family: int
    site: str
    tangent: str
    count: int
    local_type: tuple[int, int, int]
    keys: tuple[str, ...]
    blowup: str
    corrected_blowup: str
    verdict: str  # "bad_link" | "no_link"


@dataclass(frozen=True)
class MatrixExpectation:
    """Recorded rank-2 weight matrix of a displayed model."""

    family: int
    point: str
    stage: str
    labels: tuple[str, ...]
    rows: tuple[tuple[int, ...], tuple[int, ...]]

    def columns(self) -> tuple[tuple[str, tuple[int, int]], ...]:
        r1, r2 = self.rows
        return tuple((lab, (a, b)) for lab, a, b in zip(self.labels, r1, r2))


@dataclass(frozen=True)
class FamilyExpectations:
    links: tuple[LinkExpectation, ...] = ()
    exclusions: tuple[ExclusionExpectation, ...] = ()
    matrices: tuple[MatrixExpectation, ...] = ()

    @property
    def distinguished_point(self) -> str | None:
        return self.links[0].point if self.links else None


@dataclass(frozen=True)
class FamilyRecord:
    """One catalog entry: ``X_degree`` in ``P(weights)`` plus expectation data."""

    id: int
    weights: Weights
    degree: int
    rational: bool
    expected: FamilyExpectations

    @property
    def index(self) -> int:
        return fano_index(self.weights, self.degree)

    def support(self) -> frozenset[Monomial]:
        return monomial_support(self.weights, self.degree)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        ws = ",".join(map(str, self.weights))
        return f"FamilyRecord({self.id}: X_{self.degree} in P({ws}))"


def anticanonical_cube(record: FamilyRecord) -> Fraction:
    """Anticanonical self-intersection ``index^3 * degree / prod(weights)``."""
    return Fraction(record.index**3 * record.degree, prod(record.weights))


# ---------------------------------------------------------------------------
# parsing of the embedded data files

_MONO_RE = re.compile(r"^x([0-4])(?:\^(\d+))?$")


def parse_ambient_monomial(text: str) -> Monomial:
    """Parse ``"x2^7*x0"`` into the exponent vector ``(1, 0, 7, 0, 0)``."""
    exps = [0] * 5
    for factor in text.split("*"):
        m = _MONO_RE.match(factor.strip())
        if m is None:
            raise CatalogError(f"bad monomial factor {factor!r} in {text!r}")
        exps[int(m.group(1))] += int(m.group(2) or 1)
    return tuple(exps)


def ambient_monomial_str(monomial: Monomial) -> str:
    parts = []
    for i, e in enumerate(monomial):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts) if parts else "1"


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(","))


def _data_dir() -> Path | object:
    override = os.environ.get("FANO2RAY_DATA")
    if override:
        return Path(override)
    return resources.files("fano2ray") / "data"


def _data_lines(name: str) -> list[str]:
    text = (_data_dir() / name).read_text(encoding="utf-8")
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def _load_links() -> dict[int, list[LinkExpectation]]:
    table: dict[int, list[LinkExpectation]] = {}
    for line in _data_lines("link_targets.txt"):
        fam, point, ktype, label, tweights, tdegrees, construction = line.split()
        exp = LinkExpectation(
            family=int(fam),
            point=point,
            kawamata_type=_ints(ktype),  # type: ignore[arg-type]
            label=label,
            target_weights=_ints(tweights),
            target_degrees=_ints(tdegrees),
            construction=construction,
        )
        table.setdefault(exp.family, []).append(exp)
    return table


def _load_exclusions() -> dict[int, list[ExclusionExpectation]]:
    table: dict[int, list[ExclusionExpectation]] = {}
    for line in _data_lines("exclusions.txt"):
        fam, site, tangent, count, ltype, keys, blowup, corrected, verdict = line.split()
        exp = ExclusionExpectation(
            family=int(fam),
            site=site,
            tangent=tangent,
            count=int(count),
            local_type=_ints(ltype),  # type: ignore[arg-type]
            keys=tuple(keys.split("|")),
            blowup=blowup,
            corrected_blowup=blowup if corrected == "=" else corrected,
            verdict=verdict,
        )
        table.setdefault(exp.family, []).append(exp)
    return table


def _load_matrices() -> dict[int, list[MatrixExpectation]]:
    table: dict[int, list[MatrixExpectation]] = {}
    for line in _data_lines("reference_matrices.txt"):
        fam, point, stage, labels, row1, row2 = line.split()
        exp = MatrixExpectation(
            family=int(fam),
            point=point,
            stage=stage,
            labels=tuple(labels.split(",")),
            rows=(_ints(row1), _ints(row2)),
        )
        table.setdefault(exp.family, []).append(exp)
    return table


def _validate(records: tuple[FamilyRecord, ...]) -> None:
    if len(records) != 35:
        raise CatalogError(f"expected 35 families, found {len(records)}")
    if [r.id for r in records] != list(range(96, 131)):
        raise CatalogError("family ids must be the contiguous range 96..130")
    for r in records:
        if list(r.weights) != sorted(r.weights):
            raise CatalogError(f"family {r.id}: weights not nondecreasing")
        if well_form_weights(r.weights) != r.weights:
            raise CatalogError(f"family {r.id}: ambient weights not well-formed")
        if r.index < 1:
            raise CatalogError(f"family {r.id}: non-positive Fano index")
        if not r.support():
            raise CatalogError(f"family {r.id}: empty monomial support")


@lru_cache(maxsize=None)
def _load_catalog(data_key: str) -> tuple[FamilyRecord, ...]:
    del data_key  # cache key only; the directory is re-resolved below
    links = _load_links()
    exclusions = _load_exclusions()
    matrices = _load_matrices()
    records = []
    for line in _data_lines("families.txt"):
        fam, weights, degree, rational = line.split()
        fam_id = int(fam)
        expected = FamilyExpectations(
            links=tuple(links.get(fam_id, ())),
            exclusions=tuple(exclusions.get(fam_id, ())),
            matrices=tuple(matrices.get(fam_id, ())),
        )
        records.append(
            FamilyRecord(
                id=fam_id,
                weights=_ints(weights),
                degree=int(degree),
                rational={"yes": True, "no": False}[rational],
                expected=expected,
            )
        )
    records = tuple(sorted(records, key=lambda r: r.id))
    _validate(records)
    return records


def load_catalog() -> tuple[FamilyRecord, ...]:
    """All 35 records, validated against the structural invariants."""
    return _load_catalog(os.environ.get("FANO2RAY_DATA", ""))


def family(family_id: int) -> FamilyRecord:
    """Look up one family by its id in 96..130."""
    records = load_catalog()
    if not 96 <= family_id <= 130:
        raise KeyError(f"no family {family_id}; ids run 96..130")
    return records[family_id - 96]
