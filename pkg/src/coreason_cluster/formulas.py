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
Closed-form frozen-row transformations.

For a standard bipartite exchange matrix with one frozen row beta, the row
beta' after tau (or tau^-1) is a fixed expression in beta and the rows alpha_i
of the principal part. Each family below evaluates its expression; the
oracle gets the same row by literal mutation, and ``verify_formula``
compares both on random rows.

Conventions:
    * tau mutates all sinks, then all sources; tau_inv the reverse.
    * For type B the first stored entry r_1 stands for b_1 / 2, so the
      predictor reads b_1 = 2 r_1.
    * Aff_A uses the cyclic orientation and the moves r1, r2 instead of tau.
"""

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .config import EngineConfig
from .exceptions import UnsupportedMove, UnsupportedParity, UnsupportedType
from .explorer import tau_path
from .lattice import lat_equal
from .matrix import mutate_matrix_path, relabel_matrix
from .models import ExtMatrix, Family, FormulaFailure, FormulaReport, IntRow, Move, TypeSpec
from .utils.logger import logger

Beta = Sequence[int]
Coefficients = Dict[int, int]

VERIFIED = "verified"
ORACLE_ONLY = "oracle_only"


def _pos(x: int) -> int:
    return x if x > 0 else 0


# --------------------------------------------------------------------------- standard matrices


class _Builder:
    def __init__(self, n: int):
        self.rows = [[0] * n for _ in range(n)]

    def arrow(self, i: int, j: int, forward: int = 1, backward: int = 1) -> "_Builder":
        """Arrow i -> j: b_ij += forward, b_ji -= backward (1-based)."""
        self.rows[i - 1][j - 1] += forward
        self.rows[j - 1][i - 1] -= backward
        return self

    def build(self) -> ExtMatrix:
        return ExtMatrix.from_rows(self.rows)


def _alternating(n: int, first: Tuple[int, int] = (1, 1)) -> _Builder:
    """Path 1 - 2 - ... - n with odd vertices as sources; the first edge may carry a valuation."""
    builder = _Builder(n)
    for i in range(1, n):
        weight = first if i == 1 else (1, 1)
        if i % 2 == 1:
            builder.arrow(i, i + 1, *weight)
        else:
            builder.arrow(i + 1, i, weight[1], weight[0])
    return builder


def _star(builder: _Builder) -> _Builder:
    return builder.arrow(1, 2).arrow(1, 3).arrow(1, 4)


def _affine_d(n: int) -> _Builder:
    builder = _Builder(n)
    if n == 5:
        return _star(builder).arrow(1, 5)
    _star(builder)
    for v in range(5, n - 1, 2):
        builder.arrow(v, v - 1)
        if v + 1 <= n - 2:
            builder.arrow(v, v + 1)
    if (n - 2) % 2 == 1:
        builder.arrow(n - 2, n - 1).arrow(n - 2, n)
    else:
        builder.arrow(n - 1, n - 2).arrow(n, n - 2)
    return builder


def _affine_a(p: int, q: int) -> _Builder:
    builder = _Builder(p + q)
    for i in range(1, p + 1):
        builder.arrow(i, i + 1)
    bottom = [1] + list(range(p + q, p + 1, -1)) + [p + 1]
    for a, b in zip(bottom, bottom[1:], strict=False):
        builder.arrow(a, b)
    return builder


def standard_matrix(t: TypeSpec) -> ExtMatrix:
    """The principal part used for every closed form of a family.

    Raises:
        UnsupportedType: For families without a fixed orientation.
    """
    family, n = t.family, t.n
    if family is Family.A:
        return _alternating(n).build()
    if family is Family.B:
        return _alternating(n, (2, 1)).build()
    if family is Family.C:
        return _alternating(n, (1, 2)).build()
    if family is Family.D:
        builder = _star(_Builder(n))
        for i in range(4, n):
            if i % 2 == 0:
                builder.arrow(i + 1, i)
            else:
                builder.arrow(i, i + 1)
        return builder.build()
    if family is Family.E6:
        return _star(_Builder(6)).arrow(5, 2).arrow(6, 4).build()
    if family is Family.E7:
        return _star(_Builder(7)).arrow(5, 2).arrow(6, 4).arrow(6, 7).build()
    if family is Family.E8:
        return _star(_Builder(8)).arrow(5, 2).arrow(6, 4).arrow(6, 7).arrow(8, 7).build()
    if family is Family.F4:
        return _Builder(4).arrow(1, 2).arrow(3, 2, 2, 1).arrow(3, 4).build()
    if family is Family.G2:
        return _Builder(2).arrow(1, 2, 1, 3).build()
    if family is Family.RANK2:
        return _Builder(2).arrow(1, 2, t.s or 1, t.t or 1).build()
    if family is Family.AFF_A:
        return _affine_a(t.p or 1, t.q or 1).build()
    if family is Family.AFF_D:
        return _affine_d(n).build()
    if family is Family.AFF_E6:
        return _star(_Builder(7)).arrow(5, 2).arrow(6, 3).arrow(7, 4).build()
    if family is Family.AFF_E7:
        return _star(_Builder(8)).arrow(5, 2).arrow(5, 6).arrow(7, 4).arrow(7, 8).build()
    if family is Family.AFF_E8:
        return _star(_Builder(9)).arrow(5, 2).arrow(6, 4).arrow(6, 7).arrow(8, 7).arrow(8, 9).build()
    raise UnsupportedType(f"no standard matrix for {t}")  # pragma: no cover


# --------------------------------------------------------------------------- predictors


def _combine(beta: Beta, alphas: Sequence[Sequence[int]], coefficients: Coefficients) -> IntRow:
    """-beta - sum_i c_i alpha_i."""
    result = [-v for v in beta]
    for i, c in coefficients.items():
        if c:
            result = [r - c * a for r, a in zip(result, alphas[i - 1], strict=True)]
    return tuple(result)


def _accessor(beta: Beta) -> Callable[[int], int]:
    n = len(beta)
    return lambda i: beta[i - 1] if 1 <= i <= n else 0


def _type_a(beta: Beta, first: Optional[int] = None) -> Coefficients:
    """Odd vertices are sources; ``first`` overrides the source coefficient of vertex 1."""
    b = _accessor(beta)
    n = len(beta)
    coefficients: Coefficients = {}
    for i in range(1, n + 1):
        if i % 2 == 1:
            coefficients[i] = _pos(b(i))
        else:
            coefficients[i] = _pos(b(i) + _pos(b(i - 1)) + _pos(b(i + 1)))
    if first is not None:
        coefficients[1] = first
    return coefficients


def _type_b(beta: Beta) -> Coefficients:
    """Type A coefficients on the doubled row.

    The frozen row stores r_1 = b_1 / 2 in its first entry, so b_1 is always
    even; the entry is doubled back before the type A rule runs, and the
    source coefficient of vertex 1 is [b_1]_+ / 2.
    """
    doubled = [2 * beta[0]] + list(beta[1:])
    return _type_a(doubled, first=_pos(doubled[0]) // 2)


def _type_d_odd(beta: Beta) -> Coefficients:
    b = _accessor(beta)
    n = len(beta)
    if n % 2 == 0:
        raise UnsupportedParity("the D closed form covers odd rank only")
    coefficients = {
        1: _pos(b(1)),
        2: _pos(b(2) + _pos(b(1))),
        3: _pos(b(3) + _pos(b(1))),
        4: _pos(b(4) + _pos(b(1)) + _pos(b(5))),
    }
    for k in range(2, (n - 1) // 2 + 1):
        coefficients[2 * k + 1] = _pos(b(2 * k + 1))
        if k >= 3:
            coefficients[2 * k] = _pos(b(2 * k) + _pos(b(2 * k - 1)) + _pos(b(2 * k + 1)))
    return coefficients


def _type_e7(beta: Beta) -> Coefficients:
    b = _accessor(beta)
    return {
        1: _pos(b(1)),
        2: _pos(b(2) + _pos(b(1)) + _pos(b(5))),
        3: _pos(b(3) + _pos(b(1))),
        4: _pos(b(4) + _pos(b(1)) + _pos(b(6))),
        5: _pos(b(5)),
        6: _pos(b(6)),
        7: _pos(b(7) + _pos(b(6))),
    }


def _rank2_tau(beta: Beta, t: int) -> Coefficients:
    b = _accessor(beta)
    return {1: _pos(-b(1) + t * _pos(-b(2))), 2: _pos(-b(2))}


def _rank2_tau_inv(beta: Beta, s: int) -> Coefficients:
    b = _accessor(beta)
    return {1: _pos(b(1)), 2: _pos(b(2) + s * _pos(b(1)))}


def _neg(b: Callable[[int], int], *indices: int) -> int:
    """[-b_i + sum_j [-b_j]_+]_+ for the first index i and the rest as j."""
    head, *tail = indices
    return _pos(-b(head) + sum(_pos(-b(j)) for j in tail))


def _affine_d_tau(beta: Beta) -> Coefficients:
    b = _accessor(beta)
    n = len(beta)
    if n == 5:
        coefficients = {1: _neg(b, 1, 2, 3, 4, 5)}
        coefficients.update({i: _pos(-b(i)) for i in range(2, 6)})
        return coefficients
    coefficients = {1: _neg(b, 1, 2, 3, 4), 3: _pos(-b(3))}
    if n % 2 == 1:
        for k in range(2, (n - 5) // 2 + 1):
            coefficients[2 * k + 1] = _neg(b, 2 * k + 1, 2 * k, 2 * k + 2)
        for k in range(1, (n - 1) // 2 + 1):
            coefficients[2 * k] = _pos(-b(2 * k))
        coefficients[n - 2] = _neg(b, n - 2, n - 3, n - 1, n)
        coefficients[n] = _pos(-b(n))
    else:
        for k in range(2, (n - 4) // 2 + 1):
            coefficients[2 * k + 1] = _neg(b, 2 * k + 1, 2 * k, 2 * k + 2)
        for k in range(1, (n - 2) // 2 + 1):
            coefficients[2 * k] = _pos(-b(2 * k))
        coefficients[n - 1] = _neg(b, n - 1, n - 2)
        coefficients[n] = _neg(b, n, n - 2)
    return coefficients


def _affine_e6_tau(beta: Beta) -> Coefficients:
    b = _accessor(beta)
    return {
        1: _neg(b, 1, 2, 3, 4),
        2: _pos(-b(2)),
        3: _pos(-b(3)),
        4: _pos(-b(4)),
        5: _neg(b, 5, 2),
        6: _neg(b, 6, 3),
        7: _neg(b, 7, 4),
    }


def _affine_e7_tau(beta: Beta) -> Coefficients:
    b = _accessor(beta)
    return {
        1: _neg(b, 1, 2, 3, 4),
        2: _pos(-b(2)),
        3: _pos(-b(3)),
        4: _pos(-b(4)),
        5: _neg(b, 5, 2, 6),
        6: _pos(-b(6)),
        7: _neg(b, 7, 4, 8),
        8: _pos(-b(8)),
    }


def _affine_e8_tau(beta: Beta) -> Coefficients:
    b = _accessor(beta)
    return {
        1: _neg(b, 1, 2, 3, 4),
        2: _pos(-b(2)),
        3: _pos(-b(3)),
        4: _pos(-b(4)),
        5: _neg(b, 5, 2),
        6: _neg(b, 6, 4, 7),
        7: _pos(-b(7)),
        8: _neg(b, 8, 7, 9),
        9: _pos(-b(9)),
    }


def _braces(beta: Beta, p: int, q: int) -> Dict[int, int]:
    """{b_{p+i}} for 1 <= i <= q, built downwards from i = q."""
    b = _accessor(beta)
    values = {q: b(p + q) + _pos(b(1))}
    for i in range(q - 1, 0, -1):
        values[i] = b(p + i) + _pos(values[i + 1])
    return values


def affine_a_r1(beta: Beta, p: int, q: int) -> IntRow:
    """beta' after r1 for p even and q odd, coordinate by coordinate.

    Raises:
        UnsupportedParity: For any other parity of (p, q).
    """
    if p % 2 != 0 or q % 2 != 1:
        raise UnsupportedParity(f"the Aff_A closed form covers p even and q odd, got ({p},{q})")
    b = _accessor(beta)
    c = _braces(beta, p, q)
    result = [0] * (p + q)
    result[0] = b(2) + _pos(b(1))
    for i in range(2, p):
        result[i - 1] = b(i + 1)
    result[p - 1] = c[1]
    for i in range(2, q):
        result[p + i - 1] = -c[i + 1] + _pos(c[i])
    if q == 1:
        # the chain of mutations below vertex 1 is empty
        result[p] = -b(1)
    else:
        result[p] = -c[2]
        result[p + q - 1] = -b(1) + _pos(c[q])
    return tuple(result)


def affine_a_coefficients(beta: Beta, prime: Beta, p: int, q: int) -> Coefficients:
    """The listed linear coefficients a_k with beta' = -beta + sum a_k alpha_k."""
    b, bp = _accessor(beta), _accessor(prime)

    def s(i: int) -> int:
        return b(i) + bp(i)

    even_top = sum(s(2 * i) for i in range(1, p // 2 + 1))
    last = s(p + q)
    a: Coefficients = {1: last}
    for k in range(1, p // 2 + 1):
        a[2 * k] = (
            -sum(s(2 * i - 1) for i in range(1, k + 1))
            + even_top
            - sum(s(p + 2 * i) for i in range(1, (q - 1) // 2 + 1))
            - last
        )
        a[2 * k + 1] = -sum(s(2 * i) for i in range(1, k + 1)) + last
    for k in range(1, (q - 1) // 2 + 1):
        a[p + 2 * k] = (
            sum(s(p + 2 * i - 1) for i in range(1, k + 1))
            - even_top
            + sum(s(p + 2 * i) for i in range(1, (q - 1) // 2 + 1))
            + last
        )
        a[p + 2 * k + 1] = sum(s(p + 2 * i) for i in range(1, k + 1)) - even_top + last
    return a


_PRINTED: Dict[Family, Tuple[Move, Callable[[Beta], Coefficients]]] = {
    Family.A: (Move.TAU_INV, _type_a),
    Family.B: (Move.TAU_INV, _type_b),
    Family.C: (Move.TAU_INV, _type_a),
    Family.D: (Move.TAU_INV, _type_d_odd),
    Family.E7: (Move.TAU_INV, _type_e7),
    Family.AFF_D: (Move.TAU, _affine_d_tau),
    Family.AFF_E6: (Move.TAU, _affine_e6_tau),
    Family.AFF_E7: (Move.TAU, _affine_e7_tau),
    Family.AFF_E8: (Move.TAU, _affine_e8_tau),
}


def check_move(t: TypeSpec, move: Move) -> None:
    cyclic = t.family is Family.AFF_A
    if cyclic != (move in (Move.R1, Move.R2)):
        raise UnsupportedMove(f"move {move.value} does not apply to {t}")


def beta_prime_predicted(t: TypeSpec, beta: Beta, move: Move) -> IntRow:
    """Evaluates the closed form for ``move`` on the frozen row ``beta``.

    Raises:
        UnsupportedMove: If the family has no closed form for this move.
        UnsupportedParity: If the closed form only covers other parameters.
    """
    check_move(t, move)
    if len(beta) != t.n:
        raise ValueError(f"frozen row must have {t.n} entries")
    if t.family is Family.AFF_A:
        if move is Move.R2:
            raise UnsupportedMove("no closed form for r2")
        return affine_a_r1(beta, t.p or 0, t.q or 0)
    alphas = standard_matrix(t).principal
    if t.family in (Family.RANK2, Family.G2):
        s, tt = (1, 3) if t.family is Family.G2 else (t.s or 1, t.t or 1)
        coefficients = _rank2_tau(beta, tt) if move is Move.TAU else _rank2_tau_inv(beta, s)
        return _combine(beta, alphas, coefficients)
    if t.family not in _PRINTED:
        raise UnsupportedMove(f"{t} has no closed form; its lattice equals Z^n")
    printed, predictor = _PRINTED[t.family]
    if move is not printed:
        raise UnsupportedMove(f"the closed form for {t.family.value} is stated for {printed.value}")
    return _combine(beta, alphas, predictor(beta))


# --------------------------------------------------------------------------- oracle


def move_recipe(t: TypeSpec, move: Move) -> Tuple[List[int], Optional[Tuple[int, ...]]]:
    """Mutation directions and relabeling realizing ``move`` on the standard matrix."""
    check_move(t, move)
    n = t.n
    if move is Move.R1:
        p, q = t.p or 0, t.q or 0
        path = [1] + list(range(p + q, p + 1, -1))
        return path, tuple(list(range(2, n + 1)) + [1])
    if move is Move.R2:
        p = t.p or 0
        return list(range(1, p + 1)), tuple([n] + list(range(1, n)))
    return tau_path(standard_matrix(t), 1 if move is Move.TAU else -1), None


def transformed_matrix(t: TypeSpec, frozen: Sequence[Sequence[int]], move: Move) -> ExtMatrix:
    b = standard_matrix(t).with_frozen(tuple(tuple(r) for r in frozen))
    path, relabel = move_recipe(t, move)
    result = mutate_matrix_path(b, path)
    return result if relabel is None else relabel_matrix(result, relabel)


def beta_prime_oracle(t: TypeSpec, beta: Beta, move: Move) -> IntRow:
    """beta' by literal mutation of the standard matrix extended by ``beta``."""
    return transformed_matrix(t, [beta], move).frozen_rows[0]


# --------------------------------------------------------------------------- verification


class TrialResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    beta: IntRow
    predicted: Optional[IntRow]
    oracle: IntRow
    lattice_preserved: bool
    combination_matches: Optional[bool] = None

    @property
    def agrees(self) -> bool:
        return self.predicted is None or self.predicted == self.oracle


class CaseEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    move: Move
    status: str
    note: str = ""


def case_table() -> List[CaseEntry]:
    """Direction and status of every family's closed form."""
    entries = [CaseEntry(family=f, move=m, status=VERIFIED) for f, (m, _) in _PRINTED.items()]
    entries[3] = entries[3].model_copy(update={"note": "odd rank only"})
    entries.extend(
        [
            CaseEntry(family=Family.RANK2, move=Move.TAU, status=VERIFIED, note="tau_inv also predicted"),
            CaseEntry(family=Family.G2, move=Move.TAU, status=VERIFIED, note="Rank2 with (s,t) = (1,3)"),
            CaseEntry(family=Family.AFF_A, move=Move.R1, status=VERIFIED, note="p even and q odd"),
            CaseEntry(family=Family.AFF_A, move=Move.R2, status=ORACLE_ONLY),
            CaseEntry(family=Family.E6, move=Move.TAU_INV, status=ORACLE_ONLY, note="Lat = Z^6"),
            CaseEntry(family=Family.E8, move=Move.TAU_INV, status=ORACLE_ONLY, note="Lat = Z^8"),
            CaseEntry(family=Family.F4, move=Move.TAU_INV, status=ORACLE_ONLY, note="Lat = Z^4"),
        ]
    )
    return entries


def default_move(t: TypeSpec) -> Move:
    if t.family is Family.AFF_A:
        return Move.R1
    if t.family in _PRINTED:
        return _PRINTED[t.family][0]
    if t.family in (Family.RANK2, Family.G2):
        return Move.TAU
    return Move.TAU_INV


def draw_beta(t: TypeSpec, rng_seed: int, index: int, config: Optional[EngineConfig] = None) -> IntRow:
    """The frozen row of trial ``index``; each trial owns a spawned generator stream."""
    config = config or EngineConfig()
    child = np.random.SeedSequence(entropy=rng_seed, spawn_key=(index,))
    rng = np.random.default_rng(child)
    row = [int(v) for v in rng.integers(config.beta_min, config.beta_max + 1, size=t.n)]
    if t.family is Family.B:
        # r_1 = b_1 / 2 with b_1 even in [beta_min, beta_max]
        row[0] = int(rng.integers(-((-config.beta_min) // 2), config.beta_max // 2 + 1))
    return tuple(row)


def run_trial(t: TypeSpec, move: Move, beta: Beta, index: int = 0) -> TrialResult:
    standard = standard_matrix(t)
    b = standard.with_frozen((tuple(beta),))
    after = transformed_matrix(t, [beta], move)
    oracle = after.frozen_rows[0]
    try:
        predicted: Optional[IntRow] = beta_prime_predicted(t, beta, move)
    except (UnsupportedMove, UnsupportedParity):
        predicted = None
    combination: Optional[bool] = None
    if t.family is Family.AFF_A and move is Move.R1 and predicted is not None:
        a = affine_a_coefficients(beta, oracle, t.p or 0, t.q or 0)
        combination = _combine(beta, standard.principal, {k: -c for k, c in a.items()}) == oracle
    return TrialResult(
        index=index,
        beta=tuple(beta),
        predicted=predicted,
        oracle=oracle,
        lattice_preserved=lat_equal(b, after),
        combination_matches=combination,
    )


def summarize(t: TypeSpec, move: Move, results: Sequence[TrialResult]) -> FormulaReport:
    ordered = sorted(results, key=lambda r: r.index)
    status = VERIFIED if ordered and ordered[0].predicted is not None else ORACLE_ONLY
    failure = next((r for r in ordered if not r.agrees), None)
    lattice_preserved = all(r.lattice_preserved for r in ordered)
    mismatches = None
    if any(r.combination_matches is not None for r in ordered):
        mismatches = sum(1 for r in ordered if r.combination_matches is False)
    report = FormulaReport(
        type=str(t),
        move=move.value,
        trials=len(ordered),
        passed=failure is None and lattice_preserved,
        status=status,
        lattice_preserved=lattice_preserved,
        first_failure=None
        if failure is None
        else FormulaFailure(beta=failure.beta, predicted=failure.predicted, oracle=failure.oracle),
        combination_mismatches=mismatches,
    )
    logger.info(f"{t} {move.value}: {report.trials} trials, pass={report.passed}, status={status}")
    return report


def verify_formula(
    t: TypeSpec,
    trials: int = 100,
    rng_seed: int = 0,
    move: Optional[Move] = None,
    config: Optional[EngineConfig] = None,
) -> FormulaReport:
    """Compares predictor and oracle on ``trials`` random frozen rows, sequentially."""
    move = move or default_move(t)
    check_move(t, move)
    results = [run_trial(t, move, draw_beta(t, rng_seed, i, config), i) for i in range(trials)]
    return summarize(t, move, results)
