# Copyright (c) 2025 CoReason, Inc.
#
# This software is proprietary and dual-licensed.
# Licensed under the Prosperity Public License 3.0 (the "License").
# A copy of the license is available at https://prosperitylicense.com/versions/3.0.0
# For details, see the LICENSE file.
# Commercial use beyond a 30-day trial requires a separate license.
#
# Source Code: https://github.com/CoReason-AI/coreason_cluster

"""
Quasi-homomorphisms and their classification.

A monomial map is stored as the exponent matrix of its images: column j
lists the exponents of the image of source variable x_j in the variables of
the target seed. This module builds such maps from lattice data, verifies
them symbolically, composes them and sorts endomorphisms into cluster, weak
and quasi automorphisms.
"""

from collections import deque
from typing import Dict, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import DimensionMismatch, ParseError
from .lattice import determinant, is_unimodular, lat_equal, multiply, solve_block_matrix, span_contains
from .matrix import mutate_matrix, negate
from .models import (
    CheckEntry,
    ClassificationReport,
    ExtMatrix,
    IntMatrix,
    MapClass,
    MapClassKind,
    MonomialMap,
    QuasiHomReport,
    UnimodularityReport,
)
from .seed import LabeledSeed, apply_images, initial_seed, mutate_seed_path, relabel_seed, y_variables
from .symbolic import RatExpr, format_expr, parse_expr, proportional, substitute_rational
from .utils.logger import logger

_DEFAULT_PAIR_CAP = 5000


def monomial_images(matrix: Sequence[Sequence[int]], target_variables: Sequence[RatExpr]) -> List[RatExpr]:
    """Images x_j -> prod_i v_i^{m_ij} with v the variables of the target seed."""
    if len(matrix) != len(target_variables):
        raise DimensionMismatch(f"map has {len(matrix)} target rows, target seed has {len(target_variables)} variables")
    m_bar = target_variables[0].m
    images = []
    for j in range(len(matrix[0])):
        value = RatExpr.constant(1, m_bar)
        for i, v in enumerate(target_variables):
            if matrix[i][j]:
                value = value * v ** matrix[i][j]
        images.append(value)
    return images


def image_seed(mapping: MonomialMap, target: LabeledSeed) -> LabeledSeed:
    """Psi(Sigma): the source matrix with the images of the source variables."""
    images = monomial_images(mapping.matrix, target.variables)
    n = mapping.source.n
    return LabeledSeed.model_construct(
        matrix=mapping.source,
        cluster=tuple(images[:n]),
        frozen_values=tuple(images[n:]),
        path=mapping.source_path,
    )


def quasi_hom_between(
    s: LabeledSeed, t: LabeledSeed, frozen_block: Optional[Sequence[Sequence[int]]] = None
) -> Optional[MonomialMap]:
    """A quasi-homomorphism sending s to a seed proportional to t, if one exists.

    Exists iff the principal parts agree and Lat(t) is contained in Lat(s).
    A prescribed ``frozen_block`` fixes the exponents of the frozen images;
    the result is then None when no map with that block exists.
    """
    if s.n != t.n or s.matrix.principal != t.matrix.principal:
        return None
    if not all(span_contains(s.matrix, row) for row in t.matrix.frozen_rows):
        return None
    mapping = solve_block_matrix(s.matrix, t.matrix, frozen_block)
    if mapping is None:
        return None
    return mapping.model_copy(update={"source_path": s.path, "target_path": t.path})


def verify_quasi_hom(mapping: MonomialMap, s: LabeledSeed, t: LabeledSeed) -> QuasiHomReport:
    """Checks Psi(s) against t symbolically.

    Each x_i image must be proportional to t's x_i, each yhat image must equal
    t's yhat exactly and the principal parts must agree. Failures are report
    entries, never exceptions.
    """
    report = QuasiHomReport()
    if len(mapping.matrix[0]) != s.m or len(mapping.matrix) != t.m:
        report.checks.append(CheckEntry(name="dimensions", passed=False, detail="map does not fit the seeds"))
        return report
    image = image_seed(mapping.model_copy(update={"source": s.matrix}), t)
    n = s.n
    for i in range(n):
        witness = proportional(image.cluster[i], t.cluster[i], n)
        report.checks.append(
            CheckEntry(
                name=f"x{i + 1}",
                passed=witness is not None,
                detail=f"{image.cluster[i]} vs {t.cluster[i]}",
                witness=None if witness is None else witness.exponents,
            )
        )
    image_yhat = y_variables(image).yhat
    target_yhat = y_variables(t).yhat
    for i in range(n):
        report.checks.append(
            CheckEntry(
                name=f"yhat{i + 1}",
                passed=image_yhat[i] == target_yhat[i],
                detail=f"{image_yhat[i]} vs {target_yhat[i]}",
            )
        )
    report.checks.append(CheckEntry(name="principal", passed=s.matrix.principal == t.matrix.principal))
    return report


def compose(f: MonomialMap, g: MonomialMap) -> MonomialMap:
    """f o g: apply g, then f.

    Raises:
        DimensionMismatch: If g's target does not feed f's source.
    """
    if len(f.matrix[0]) != len(g.matrix):
        raise DimensionMismatch("maps are not composable")
    return MonomialMap(
        matrix=multiply(f.matrix, g.matrix),
        source=g.source,
        target=f.target,
        source_path=g.source_path,
        target_path=f.target_path,
    )


def identity_map(b: ExtMatrix) -> MonomialMap:
    m = b.m
    matrix = tuple(tuple(1 if i == j else 0 for j in range(m)) for i in range(m))
    return MonomialMap(matrix=matrix, source=b, target=b)


def proportional_to_identity(f: MonomialMap) -> bool:
    """True when f sends the root seed of its source to a seed proportional to it."""
    if f.source.entries != f.target.entries:
        return False
    root = initial_seed(f.source)
    image = image_seed(f, root)
    witnesses = [proportional(a, b, root.n) for a, b in zip(image.cluster, root.cluster, strict=True)]
    if any(w is None for w in witnesses):
        return False
    return y_variables(image).yhat == y_variables(root).yhat


def unimodularity(f: MonomialMap) -> UnimodularityReport:
    det = determinant(f.m2)
    return UnimodularityReport(determinant=det, unimodular=abs(det) == 1)


def quasi_inverse(f: MonomialMap) -> Optional[MonomialMap]:
    """A map back from f's target, found by solving in the reverse direction."""
    if not lat_equal(f.source, f.target):
        return None
    inverse = solve_block_matrix(f.target, f.source)
    if inverse is None:
        return None  # pragma: no cover
    return inverse.model_copy(update={"source_path": f.target_path, "target_path": f.source_path})


# --------------------------------------------------------------------------- classification


def _sign(source: ExtMatrix, target: ExtMatrix) -> Optional[int]:
    if target.principal == source.principal:
        return 1
    if target.principal == negate(source).principal:
        return -1
    return None


def _is_permutation(block: IntMatrix) -> bool:
    if not block:
        return True
    size = len(block)
    if any(len(r) != size for r in block):
        return False
    return all(sorted(r) == [0] * (size - 1) + [1] for r in block) and all(
        sum(block[i][j] for i in range(size)) == 1 for j in range(size)
    )


def _frozen_relation(source: ExtMatrix, target: ExtMatrix, m2: IntMatrix, sign: int) -> bool:
    if not m2:
        return True
    product = multiply(m2, source.frozen_rows) if source.frozen_rows else ()
    return all(
        tuple(sign * v for v in row) == tuple(t) for row, t in zip(product, target.frozen_rows, strict=True)
    )


def _weak_relation_holds(
    mapping: MonomialMap, sign: int, sample_paths: Optional[Sequence[Sequence[int]]], cap: int
) -> Tuple[bool, int, bool]:
    """Checks target_t = sign * M2 * source_t on frozen rows along simultaneous mutations.

    Returns (holds, pairs checked, exhaustive).
    """
    m2 = mapping.m2
    n = mapping.n
    if sample_paths is not None:
        checked = 0
        for path in sample_paths:
            source, target = mapping.source, mapping.target
            for k in path:
                source, target = mutate_matrix(source, k), mutate_matrix(target, k)
                checked += 1
                if not _frozen_relation(source, target, m2, sign):
                    logger.debug(f"frozen relation fails after path {tuple(path)}")
                    return False, checked, False
        return True, checked, False

    start = (mapping.source.entries, mapping.target.entries)
    seen: Set[Tuple[IntMatrix, IntMatrix]] = {start}
    queue = deque([(mapping.source, mapping.target)])
    while queue:
        source, target = queue.popleft()
        if not _frozen_relation(source, target, m2, sign):
            return False, len(seen), False
        for k in range(1, n + 1):
            pair = (mutate_matrix(source, k), mutate_matrix(target, k))
            key = (pair[0].entries, pair[1].entries)
            if key in seen:
                continue
            if len(seen) >= cap:
                logger.warning(f"weak automorphism check stopped at {cap} seed pairs")
                return True, len(seen), False
            seen.add(key)
            queue.append(pair)
    return True, len(seen), True


def classify(
    mapping: MonomialMap,
    sample_paths: Optional[Sequence[Sequence[int]]] = None,
    cap: int = _DEFAULT_PAIR_CAP,
) -> ClassificationReport:
    """Sorts an endomorphism candidate into the strongest class it satisfies.

    The target matrix must already be relabeled onto the source. The sign s
    is +1 when the principal parts agree and -1 when they are opposite; the
    map must satisfy target = s * M * source. Without ``sample_paths`` every
    pair of simultaneously mutated matrices is checked until the pair graph
    closes or ``cap`` pairs were seen.
    The weak class needs M1 = 0 and a unimodular M2. A run stopped by the
    cap reports ``exhaustive=False`` and says so in ``note``.
    """
    source, target = mapping.source, mapping.target
    sign = _sign(source, target)
    n = mapping.n
    top_ok = all(
        tuple(row) == tuple(1 if i == j else 0 for j in range(source.m)) for i, row in enumerate(mapping.matrix[:n])
    )
    consistent = (
        sign is not None
        and top_ok
        and tuple(tuple(sign * v for v in row) for row in multiply(mapping.matrix, source.entries)) == target.entries
    )
    if not consistent or sign is None:
        return ClassificationReport(
            map_class=MapClass(kind=MapClassKind.NOT_QUASI),
            cluster_criteria=False,
            weak_criteria=False,
            quasi_criteria=False,
            sampled_seeds=0,
            exhaustive=False,
            note="map does not carry the source matrix onto the target",
        )

    m1_zero = all(v == 0 for row in mapping.m1 for v in row)
    m2 = mapping.m2
    invertible = not m2 or (all(len(row) == len(m2) for row in m2) and is_unimodular(m2))
    quasi = lat_equal(source, target)
    cluster = m1_zero and _is_permutation(mapping.m2)
    weak, sampled, exhaustive = (False, 0, False)
    if m1_zero and invertible:
        weak, sampled, exhaustive = _weak_relation_holds(mapping, sign, sample_paths, cap)

    if cluster:
        kind = MapClassKind.CLUSTER_AUTOMORPHISM
    elif weak:
        kind = MapClassKind.WEAK_CLUSTER_AUTOMORPHISM
    elif quasi:
        kind = MapClassKind.QUASI_AUTOMORPHISM_ONLY
    else:
        kind = MapClassKind.NOT_QUASI
    direct = sign == 1 if kind in (MapClassKind.CLUSTER_AUTOMORPHISM, MapClassKind.WEAK_CLUSTER_AUTOMORPHISM) else None
    note = ""
    if weak and not exhaustive:
        if sample_paths is None:
            note = f"weak relation holds on the first {sampled} seed pairs; search stopped at the cap of {cap}"
        else:
            note = "weak relation verified on a finite sample only"
    logger.info(f"classified map as {kind.value} after {sampled} seed pairs")
    return ClassificationReport(
        map_class=MapClass(kind=kind, direct=direct),
        cluster_criteria=cluster,
        weak_criteria=weak,
        quasi_criteria=quasi,
        sampled_seeds=sampled,
        exhaustive=exhaustive,
        note=note,
    )


# --------------------------------------------------------------------------- seed maps


class SeedMap(BaseModel):
    """A field homomorphism given by the images of all ambient variables."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    images: Tuple[RatExpr, ...] = Field(..., description="Image of x_1..x_m")

    @classmethod
    def identity(cls, m: int) -> "SeedMap":
        return cls(images=tuple(RatExpr.variable(i, m) for i in range(1, m + 1)))

    def compose(self, other: "SeedMap") -> "SeedMap":
        """self o other."""
        return SeedMap(images=tuple(substitute_rational(self.images, e) for e in other.images))

    def power(self, k: int) -> "SeedMap":
        if k < 0:
            raise ValueError("negative powers need an inverse map")
        result = SeedMap.identity(len(self.images))
        for _ in range(k):
            result = self.compose(result)
        return result

    def apply(self, s: LabeledSeed) -> LabeledSeed:
        return apply_images(self.images, s)


def seed_map(root: LabeledSeed, path: Sequence[int], relabel: Optional[Sequence[int]] = None,
             matrix: Optional[Sequence[Sequence[int]]] = None) -> SeedMap:
    """The map sending the root's variables to (monomials in) the variables of a reached seed.

    The target seed is the root mutated along ``path`` and relabeled by
    ``relabel``; without ``matrix`` each variable goes to the variable of the
    same index.
    """
    target = mutate_seed_path(root, path)
    if relabel is not None:
        target = relabel_seed(target, relabel)
    if matrix is None:
        return SeedMap(images=target.variables)
    return SeedMap(images=tuple(monomial_images(matrix, target.variables)))


def seed_maps_equal(f: SeedMap, g: SeedMap, root: LabeledSeed) -> bool:
    """Equal up to proportionality: cluster images agree in ratio and yhat images agree."""
    a, b = f.apply(root), g.apply(root)
    if any(proportional(x, y, root.n) is None for x, y in zip(a.cluster, b.cluster, strict=True)):
        return False
    return y_variables(a).yhat == y_variables(b).yhat


# --------------------------------------------------------------------------- text format


def map_from_images(images: Sequence[RatExpr]) -> IntMatrix:
    """Exponent matrix of monomial images; column j holds the image of x_j.

    Raises:
        ValueError: If an image is not a Laurent monomial with coefficient 1.
    """
    columns = []
    for j, image in enumerate(images, start=1):
        terms = image.laurent_terms()
        if terms is None or len(terms) != 1 or next(iter(terms.values())) != 1:
            raise ValueError(f"image of x{j} is not a unit Laurent monomial: {image}")
        columns.append(next(iter(terms)))
    rows = len(columns[0])
    return tuple(tuple(col[i] for col in columns) for i in range(rows))


def format_map(matrix: Sequence[Sequence[int]]) -> str:
    lines = []
    for j in range(len(matrix[0])):
        monomial = RatExpr.monomial(tuple(matrix[i][j] for i in range(len(matrix))))
        lines.append(f"x{j + 1} -> {format_expr(monomial)}")
    return "\n".join(lines) + "\n"


def parse_map(text: str, target_m: Optional[int] = None, source: Optional[str] = None) -> IntMatrix:
    """Reads ``x<j> -> <monomial>`` lines into an exponent matrix.

    Raises:
        ParseError: On malformed lines, missing or repeated variables, or
            images that are not unit monomials.
    """
    entries: Dict[int, Tuple[int, str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "->" not in stripped:
            raise ParseError("expected 'x<j> -> <monomial>'", number, 1, source)
        left, right = stripped.split("->", 1)
        left = left.strip()
        if not left.startswith("x") or not left[1:].isdigit():
            raise ParseError(f"bad variable '{left}'", number, 1, source)
        j = int(left[1:])
        if j in entries:
            raise ParseError(f"x{j} mapped twice", number, 1, source)
        entries[j] = (number, right)
    if not entries:
        raise ParseError("empty map file", 1, 1, source)
    m = len(entries)
    if sorted(entries) != list(range(1, m + 1)):
        raise ParseError(f"variables must be x1..x{m}", max(n for n, _ in entries.values()), 1, source)
    m_bar = target_m or m
    columns: List[Tuple[int, ...]] = []
    for j in range(1, m + 1):
        number, right = entries[j]
        image = parse_expr(right, m_bar, line=number, source=source)
        terms = image.laurent_terms()
        if terms is None or len(terms) != 1 or next(iter(terms.values())) != 1:
            raise ParseError(f"image of x{j} is not a unit monomial", number, 1, source)
        columns.append(next(iter(terms)))
    return tuple(tuple(col[i] for col in columns) for i in range(m_bar))
