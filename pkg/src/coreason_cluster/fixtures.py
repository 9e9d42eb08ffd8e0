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
Built-in fixtures.

Matrices and maps ship as data files under ``coreason_cluster/data``; the
registry ``fixtures.json`` names them and records the expected outcomes.
Each worked example has a runner that recomputes it and reports every check.
"""

from functools import lru_cache
from importlib import resources
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from .exceptions import UnsupportedType
from .formulas import standard_matrix
from .groups import SeedGenerator, qaut0_group, relation_check
from .lattice import lat_equal, span_contains
from .matrix import find_skew_symmetrizer, matrices_isomorphic, mutate_matrix_path, parse_matrix, relabel_matrix
from .models import ExampleReport, ExtMatrix, IntMatrix, MapClassKind, MonomialMap, TypeSpec
from .morphism import (
    classify,
    compose,
    parse_map,
    proportional_to_identity,
    quasi_hom_between,
    seed_map,
    unimodularity,
    verify_quasi_hom,
)
from .seed import LabeledSeed, initial_seed, mutate_seed, mutate_seed_path, relabel_seed
from .symbolic import RatExpr, format_expr, parse_expr, substitute_rational
from .utils.logger import logger


class GeneratorSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: List[int] = Field(default_factory=list)
    relabel: Optional[List[int]] = None


class FixtureSpec(BaseModel):
    """One registry entry of ``fixtures.json``."""

    model_config = ConfigDict(frozen=True)

    description: str = ""
    matrix: str = Field(..., description="Matrix file name under the data directory")
    target_path: List[int] = Field(default_factory=list)
    target_relabel: Optional[List[int]] = None
    expected_target: Optional[List[List[int]]] = None
    maps: Dict[str, str] = Field(default_factory=dict, description="Map name -> map file name")
    generators: Dict[str, GeneratorSpec] = Field(default_factory=dict)
    relations: List[Tuple[List[str], List[str]]] = Field(default_factory=list)
    cluster_variables: Dict[str, str] = Field(default_factory=dict)
    qaut0_order: Optional[int] = None
    aut_triv_order: Optional[int] = None
    symmetrizer: Optional[List[int]] = None


def read_data(name: str) -> str:
    return (resources.files("coreason_cluster") / "data" / name).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def registry() -> Dict[str, FixtureSpec]:
    return TypeAdapter(Dict[str, FixtureSpec]).validate_json(read_data("fixtures.json"))


def fixture_names() -> List[str]:
    return sorted(registry())


def load_matrix(name: str) -> ExtMatrix:
    """A registered fixture matrix, or the standard matrix of a type name such as ``A3``.

    Raises:
        UnsupportedType: If ``name`` is neither a fixture nor a type.
    """
    spec = registry().get(name)
    if spec is not None:
        return parse_matrix(read_data(spec.matrix), source=spec.matrix)
    return standard_matrix(TypeSpec.parse(name))


def load_map(fixture: str, key: str, target_m: Optional[int] = None) -> IntMatrix:
    spec = registry()[fixture]
    filename = spec.maps[key]
    return parse_map(read_data(filename), target_m=target_m, source=filename)


def fixture_target(name: str, root: LabeledSeed) -> LabeledSeed:
    """The seed reached from ``root`` along the fixture's target path and relabeling."""
    spec = registry()[name]
    target = mutate_seed_path(root, spec.target_path)
    if spec.target_relabel is not None:
        target = relabel_seed(target, spec.target_relabel)
    return target


def _expected_target(report: ExampleReport, spec: FixtureSpec, reached: ExtMatrix) -> None:
    if spec.expected_target is None:
        return
    expected = tuple(tuple(row) for row in spec.expected_target)
    report.add("target matrix", reached.entries == expected, f"{list(map(list, reached.entries))}")


# --------------------------------------------------------------------------- runners


def _run_nongroup(name: str, spec: FixtureSpec) -> ExampleReport:
    report = ExampleReport(name=name, description=spec.description)
    root = initial_seed(load_matrix(name))
    target = fixture_target(name, root)
    _expected_target(report, spec, target.matrix)

    psi = MonomialMap(
        matrix=load_map(name, "psi"),
        source=root.matrix,
        target=target.matrix,
        target_path=target.path,
    )
    phi = MonomialMap(
        matrix=load_map(name, "phi"),
        source=target.matrix,
        target=root.matrix,
        source_path=target.path,
    )
    report.add("psi is a quasi-homomorphism", verify_quasi_hom(psi, root, target).passed)
    report.add("phi is a quasi-homomorphism", verify_quasi_hom(phi, target, root).passed)
    report.add("phi o psi is proportional to the identity", proportional_to_identity(compose(phi, psi)))
    det = unimodularity(psi)
    report.add("psi has a non-unimodular frozen block", not det.unimodular, f"det M2 = {det.determinant}")
    solved = quasi_hom_between(root, target)
    report.add(
        "solved map is a quasi-homomorphism",
        solved is not None and verify_quasi_hom(solved, root, target).passed,
    )
    frozen_block = [row[root.n :] for row in psi.matrix[root.n :]]
    prescribed = quasi_hom_between(root, target, frozen_block)
    report.add(
        "solver reproduces psi from its frozen block",
        prescribed is not None and prescribed.matrix == psi.matrix,
        f"M2 = {frozen_block}",
    )
    return report


def _cluster_variables(spec: FixtureSpec, m: int) -> Dict[str, RatExpr]:
    return {key: parse_expr(text, m, source="fixtures.json") for key, text in spec.cluster_variables.items()}


def _run_weakaut(name: str, spec: FixtureSpec) -> ExampleReport:
    report = ExampleReport(name=name, description=spec.description)
    root = initial_seed(load_matrix(name))
    m = root.m
    printed = _cluster_variables(spec, m)
    computed = {
        "x1'": mutate_seed(root, 1).cluster[0],
        "x1''": mutate_seed_path(root, (1, 2)).cluster[1],
        "x2'": mutate_seed(root, 2).cluster[1],
    }
    for key, value in printed.items():
        report.add(f"cluster variable {key}", computed[key] == value, format_expr(computed[key]))

    matrices = {key: load_map(name, key, target_m=m) for key in spec.maps}
    generators = {
        key: SeedGenerator(
            path=tuple(g.path),
            relabel=None if g.relabel is None else tuple(g.relabel),
            matrix=matrices.get(key),
        )
        for key, g in spec.generators.items()
    }
    cycle = [root.cluster[0], root.cluster[1], computed["x1'"], computed["x1''"], computed["x2'"]]
    tau = seed_map(root, generators["tau"].path, generators["tau"].relabel, generators["tau"].matrix)
    sigma = seed_map(root, generators["sigma"].path, generators["sigma"].relabel, generators["sigma"].matrix)
    report.add(
        "tau cycles the five cluster variables",
        all(substitute_rational(tau.images, cycle[i]) == cycle[(i + 1) % 5] for i in range(5)),
    )
    swaps = [(0, 1), (1, 0), (2, 4), (4, 2)]
    report.add(
        "sigma swaps x1, x2 and x1', x2'",
        all(substitute_rational(sigma.images, cycle[i]) == cycle[j] for i, j in swaps),
    )

    relations = relation_check(root, generators, [(lhs, rhs) for lhs, rhs in spec.relations])
    for outcome in relations.relations:
        label = f"{' '.join(outcome.lhs)} = {' '.join(outcome.rhs) or 'id'}"
        report.add(label, outcome.holds)

    for key, g in generators.items():
        target = mutate_matrix_path(root.matrix, g.path)
        if g.relabel is not None:
            target = relabel_matrix(target, g.relabel)
        mapping = MonomialMap(
            matrix=matrices[key], source=root.matrix, target=target, target_path=g.path, relabel=g.relabel
        )
        result = classify(mapping)
        report.add(
            f"{key} is a weak cluster automorphism only",
            result.map_class.kind is MapClassKind.WEAK_CLUSTER_AUTOMORPHISM,
            result.map_class.kind.value,
        )
    return report


def _run_cex1(name: str, spec: FixtureSpec) -> ExampleReport:
    report = ExampleReport(name=name, description=spec.description)
    root = initial_seed(load_matrix(name))
    target = fixture_target(name, root)
    _expected_target(report, spec, target.matrix)
    report.add("row lattices agree", lat_equal(root.matrix, target.matrix))
    solved = quasi_hom_between(root, target)
    report.add(
        "a quasi-automorphism reaches the target",
        solved is not None and verify_quasi_hom(solved, root, target).passed,
    )
    report.add("no direct isomorphism", matrices_isomorphic(root.matrix, target.matrix, direct=True) is None)
    f = MonomialMap(matrix=load_map(name, "f"), source=root.matrix, target=target.matrix, target_path=target.path)
    report.add("f is a quasi-homomorphism", verify_quasi_hom(f, root, target).passed)
    kind = classify(f).map_class.kind
    report.add("f is a quasi-automorphism only", kind is MapClassKind.QUASI_AUTOMORPHISM_ONLY, kind.value)
    return report


def _run_cex2(name: str, spec: FixtureSpec) -> ExampleReport:
    report = ExampleReport(name=name, description=spec.description)
    root = initial_seed(load_matrix(name))
    target = fixture_target(name, root)
    _expected_target(report, spec, target.matrix)
    offending = target.matrix.frozen_rows[0]
    report.add("frozen row lies outside the row lattice", not span_contains(root.matrix, offending), f"{offending}")
    report.add("no quasi-homomorphism reaches the target", quasi_hom_between(root, target) is None)
    principal = ExtMatrix.trusted(root.matrix.principal)
    report.add(
        "principal parts are isomorphic",
        matrices_isomorphic(principal, ExtMatrix.trusted(target.matrix.principal)) is not None,
    )
    groups = qaut0_group(root)
    report.add("QAut_0 order", groups.qaut0.order == spec.qaut0_order, f"{groups.qaut0.order}")
    report.add("Aut+ order", groups.aut_triv.order == spec.aut_triv_order, f"{groups.aut_triv.order}")
    return report


def _run_symmetrizable(name: str, spec: FixtureSpec) -> ExampleReport:
    report = ExampleReport(name=name, description=spec.description)
    d = find_skew_symmetrizer(load_matrix(name).principal).d
    report.add("skew-symmetrizer", list(d) == spec.symmetrizer, f"{d}")
    return report


_RUNNERS: Dict[str, Callable[[str, FixtureSpec], ExampleReport]] = {
    "nongroup": _run_nongroup,
    "weakaut-a2": _run_weakaut,
    "cex1": _run_cex1,
    "cex2": _run_cex2,
    "symmetrizable": _run_symmetrizable,
}


def run_example(name: str) -> ExampleReport:
    """Recomputes a built-in example and reports every check.

    Raises:
        UnsupportedType: If ``name`` is not a registered example.
    """
    if name not in _RUNNERS:
        raise UnsupportedType(f"unknown example '{name}'; choose from {', '.join(sorted(_RUNNERS))}")
    report = _RUNNERS[name](name, registry()[name])
    logger.info(f"example {name}: {sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed")
    return report
