"""Ensemble-average outcome-pattern enumerators, exact over the rationals.

A_{a,j} is the expected number of (defective set, outcome) pairs with a
defectives and j decoding errors (false alarms for COMP, misdetections for
DD), averaged over the uniform socket-matching ensemble. Each entry is
recovered by coefficient extraction from truncated powers of small
generating polynomials: one polynomial encodes how test sockets split
across edge classes, one encodes how item sockets do, and a multinomial
counts the socket pairings consistent with both. Everything is exact; the
only floats anywhere are in the CSV decimal column.

Row sums obey sum_j A_{a,j} = C(n, a): every defective set realizes exactly
one error count per matching. This identity is the cheap self-check used
by the CLI and the acceptance tests.

Regular designs get dedicated fast paths (the general route reproduces
them exactly; tests pin that down). Tables for the same spec are cached,
so probability evaluations over a delta grid pay for enumeration once.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Mapping, Union

from .combinatorics import binomial, multinomial, to_decimal
from .detection import Algorithm
from .ensemble import EnsembleSpec, regular_spec, spec_hash, validate
from .polynomial import SparsePoly, poly_add, poly_mul, poly_pow, poly_product_of_powers

__all__ = [
    "EnumeratorTable",
    "comp_regular",
    "comp_irregular",
    "dd_regular",
    "dd_irregular",
    "build_table",
    "fa_probability",
    "md_probability",
    "write_table_csv",
    "table_domain",
]


@dataclass(frozen=True, eq=False)
class EnumeratorTable:
    """Complete map (a, j) -> A_{a,j} for one spec and decoder.

    For COMP, j counts false alarms (0 <= j <= n - a); for DD, j counts
    misdetections (0 <= j <= a).
    """

    algorithm: Algorithm
    spec: EnsembleSpec
    values: Mapping[tuple[int, int], Fraction]
    source: str = field(default="enumerator")

    def row_sums(self) -> dict[int, Fraction]:
        sums: dict[int, Fraction] = {}
        for (a, _), value in self.values.items():
            sums[a] = sums.get(a, Fraction(0)) + value
        return sums

    def check_row_sums(self) -> bool:
        return all(self.row_sums()[a] == binomial(self.spec.n, a) for a in range(self.spec.n + 1))


def table_domain(n: int, algorithm: Algorithm) -> Iterator[tuple[int, int]]:
    """All (defective count, error count) keys a complete table must carry."""
    for a in range(n + 1):
        errs = (n - a) if algorithm is Algorithm.COMP else a
        for j in range(errs + 1):
            yield (a, j)


def _check_cell(n: int, i: int, j: int) -> None:
    if i < 0 or j < 0 or i + j > n:
        raise ValueError(f"cell out of range: i={i}, j={j}, n={n}")


def _as_exact(delta) -> Fraction:
    if isinstance(delta, float):
        raise TypeError(
            "delta must be exact (int, str, or Fraction); floats silently misstate "
            "values like 0.05 in binary"
        )
    value = Fraction(delta)
    if not 0 <= value <= 1:
        raise ValueError(f"delta must lie in [0, 1], got {value}")
    return value


# ---------------------------------------------------------------------------
# Regular designs: every item in l tests, every test pooling r items.
# ---------------------------------------------------------------------------


def _comp_polys(l: int, r: int, caps_g, caps_f):
    # Test-side classes at a positive test: implicit slack = edges to
    # defectives, x = edges to false-alarm items, y = edges to dismissed items.
    full = SparsePoly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1}, caps_g)
    no_defective = SparsePoly(2, {(1, 0): 1, (0, 1): 1}, caps_g)
    g = poly_add(poly_pow(full, r), -poly_pow(no_defective, r))
    # Item-side: a dismissed item splits its l sockets between negative tests
    # (slack) and positive tests (s), needing at least one negative.
    with_neg = SparsePoly(1, {(0,): 1, (1,): 1}, caps_f)
    all_pos = SparsePoly(1, {(1,): 1}, caps_f)
    f = poly_add(poly_pow(with_neg, l), -poly_pow(all_pos, l))
    return g, f


def _comp_cell_terms(n, l, r, m, edges, i, j, b, g_pow_b, f_pow) -> Fraction:
    y = b * r - l * (i + j)
    if y < 0 or (m - b) < 0:
        return Fraction(0)
    gc = g_pow_b.coefficient((l * j, y))
    if not gc:
        return Fraction(0)
    fc = f_pow.coefficient((y,))
    if not fc:
        return Fraction(0)
    den = multinomial(edges, (l * i, l * j, y, (m - b) * r))
    return Fraction(binomial(m, b) * gc * fc, den)


def comp_regular(n: int, l: int, r: int, i: int, j: int) -> Fraction:
    """A_{i,j} for COMP on the (n, l, r)-regular ensemble: i defectives, j false alarms."""
    spec = regular_spec(n, l, r)
    _check_cell(n, i, j)
    m, edges = spec.m, spec.edge_count
    caps_g = (l * j, edges - l * (i + j)) if edges >= l * (i + j) else (0, 0)
    if edges < l * (i + j):
        return Fraction(0)
    g, f = _comp_polys(l, r, caps_g, (edges - l * (i + j),))
    f_pow = poly_pow(f, n - i - j)
    total = Fraction(0)
    g_pow = SparsePoly.constant(2, 1, caps_g)
    for b in range(m + 1):
        if b:
            g_pow = poly_mul(g_pow, g)
        total += _comp_cell_terms(n, l, r, m, edges, i, j, b, g_pow, f_pow)
    return multinomial(n, (i, j, n - i - j)) * total


def _comp_regular_table(n: int, l: int, r: int) -> dict[tuple[int, int], Fraction]:
    spec = regular_spec(n, l, r)
    m, edges = spec.m, spec.edge_count
    caps_g = (n * l, edges)
    g, f = _comp_polys(l, r, caps_g, (edges,))
    f_pows = [SparsePoly.constant(1, 1, (edges,))]
    for _ in range(n):
        f_pows.append(poly_mul(f_pows[-1], f))
    values = {key: Fraction(0) for key in table_domain(n, Algorithm.COMP)}
    g_pow = SparsePoly.constant(2, 1, caps_g)
    for b in range(m + 1):
        if b:
            g_pow = poly_mul(g_pow, g)
        for i in range(n + 1):
            for j in range(n - i + 1):
                term = _comp_cell_terms(n, l, r, m, edges, i, j, b, g_pow, f_pows[n - i - j])
                if term:
                    values[(i, j)] += multinomial(n, (i, j, n - i - j)) * term
    return values


def _dd_polys(l: int, r: int, caps_g, caps_f1, caps_f2):
    # Test-side classes at a positive, non-certifying test: implicit slack =
    # edges to missed defectives, x1 = edges to dismissed items, x2 = edges
    # to fully-covered non-defectives, x3 = edges to certified defectives.
    full = SparsePoly(
        3, {(0, 0, 0): 1, (1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1}, caps_g
    )
    no_def = SparsePoly(3, {(1, 0, 0): 1, (0, 1, 0): 1}, caps_g)
    g = poly_add(poly_pow(full, r), -poly_pow(no_def, r))
    if r >= 1:
        sole_missed = SparsePoly.monomial(3, (r - 1, 0, 0), r, caps_g)
        sole_cert = SparsePoly(3, {(r - 1, 0, 1): r}, caps_g)
        g = poly_add(g, -sole_missed)
        g = poly_add(g, -sole_cert)
    # Certified defectives split sockets between certifying tests (slack)
    # and other positive tests (s1), needing at least one certifying.
    with_cert = SparsePoly(1, {(0,): 1, (1,): 1}, caps_f1)
    no_cert = SparsePoly(1, {(1,): 1}, caps_f1)
    f1 = poly_add(poly_pow(with_cert, l), -poly_pow(no_cert, l))
    # Dismissed items: negative tests (slack), non-certifying positives (s2),
    # certifying positives (s3); at least one negative.
    with_neg = SparsePoly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1}, caps_f2)
    all_pos = SparsePoly(2, {(1, 0): 1, (0, 1): 1}, caps_f2)
    f2 = poly_add(poly_pow(with_neg, l), -poly_pow(all_pos, l))
    return g, f1, f2


def _dd_cell_term(n, l, r, m, edges, i, j, k, b1, b2, g_pow_b2, f1c, f2_pow, r_pow_b1) -> Fraction:
    e2 = b2 * r + b1 - (i + j + k) * l
    if e2 < 0:
        return Fraction(0)
    x3e = i * l - b1
    gc = g_pow_b2.coefficient((e2, k * l, x3e))
    if not gc:
        return Fraction(0)
    f2c = f2_pow.coefficient((e2, b1 * (r - 1)))
    if not f2c:
        return Fraction(0)
    den = multinomial(
        edges, ((m - b1 - b2) * r, j * l, e2, b1 * (r - 1), k * l, x3e, b1)
    )
    num = (
        multinomial(n, (i, j, k, n - i - j - k))
        * multinomial(m, (b1, b2, m - b1 - b2))
        * r_pow_b1
        * f1c
        * f2c
        * gc
    )
    return Fraction(num, den)


def dd_regular(n: int, l: int, r: int, i: int, j: int) -> Fraction:
    """A_{i+j,j} for DD on the (n, l, r)-regular ensemble: i certified, j missed."""
    spec = regular_spec(n, l, r)
    _check_cell(n, i, j)
    m, edges = spec.m, spec.edge_count
    caps_g = (edges, (n - i - j) * l, i * max(l - 1, 0))
    g, f1, f2 = _dd_polys(l, r, caps_g, (i * max(l - 1, 0),), (edges, edges))
    f1_pow = poly_pow(f1, i)
    f2_pows = [SparsePoly.constant(2, 1, (edges, edges))]
    for _ in range(n):
        f2_pows.append(poly_mul(f2_pows[-1], f2))
    r_pows = [r**p for p in range(m + 1)]
    total = Fraction(0)
    g_pow = SparsePoly.constant(3, 1, caps_g)
    for b2 in range(m + 1):
        if b2:
            g_pow = poly_mul(g_pow, g)
        for k in range(n - i - j + 1):
            for b1 in range(i, min(i * l, m - b2) + 1):
                f1c = f1_pow.coefficient((i * l - b1,))
                if not f1c:
                    continue
                total += _dd_cell_term(
                    n, l, r, m, edges, i, j, k, b1, b2, g_pow, f1c, f2_pows[n - i - j - k], r_pows[b1]
                )
    return total


def _dd_regular_table(n: int, l: int, r: int) -> dict[tuple[int, int], Fraction]:
    spec = regular_spec(n, l, r)
    m, edges = spec.m, spec.edge_count
    caps_g = (edges, n * l, n * max(l - 1, 0))
    g, f1, f2 = _dd_polys(l, r, caps_g, (n * max(l - 1, 0),), (edges, edges))
    f1_pows = [SparsePoly.constant(1, 1, (n * max(l - 1, 0),))]
    f2_pows = [SparsePoly.constant(2, 1, (edges, edges))]
    for _ in range(n):
        f1_pows.append(poly_mul(f1_pows[-1], f1))
        f2_pows.append(poly_mul(f2_pows[-1], f2))
    r_pows = [r**p for p in range(m + 1)]
    values = {key: Fraction(0) for key in table_domain(n, Algorithm.DD)}
    g_pow = SparsePoly.constant(3, 1, caps_g)
    for b2 in range(m + 1):
        if b2:
            g_pow = poly_mul(g_pow, g)
        for i in range(n + 1):
            for j in range(n - i + 1):
                for b1 in range(i, min(i * l, m - b2) + 1):
                    f1c = f1_pows[i].coefficient((i * l - b1,))
                    if not f1c:
                        continue
                    for k in range(n - i - j + 1):
                        term = _dd_cell_term(
                            n, l, r, m, edges, i, j, k, b1, b2,
                            g_pow, f1c, f2_pows[n - i - j - k], r_pows[b1],
                        )
                        if term:
                            values[(i + j, j)] += term
    return values


# ---------------------------------------------------------------------------
# General (possibly irregular) designs: one generating-function factor per
# node degree, raised to the node count of that degree.
# ---------------------------------------------------------------------------


def _right_counts_checked(spec: EnsembleSpec) -> dict[int, int]:
    validate(spec)
    return spec.right_counts()


@lru_cache(maxsize=32)
def _comp_general_parts(spec: EnsembleSpec):
    """(edges, rows, item_gf) where rows = ((exponents, coefficient, pair count), ...).

    Test-side variables: x1 edges to defectives, x2 to false alarms, x3 to
    dismissed items. Item-side adds markers t1 (defective) and t2 (false
    alarm) onto matching socket variables s1..s3.
    """
    right_counts = _right_counts_checked(spec)
    edges = spec.edge_count
    caps_g = (edges, edges, edges)
    g_factors = []
    for d, count in sorted(right_counts.items()):
        any_edge = SparsePoly.sum_of_variables(3, [0, 1, 2], caps_g)
        no_def = SparsePoly.sum_of_variables(3, [1, 2], caps_g)
        bracket = poly_add(
            poly_add(SparsePoly.constant(3, 1, caps_g), poly_pow(any_edge, d)),
            -poly_pow(no_def, d),
        )
        g_factors.append((bracket, count))
    g = poly_product_of_powers(g_factors, caps_g)
    n = spec.n
    caps_f = (n, n, edges, edges, edges)
    f_factors = []
    for d, count in sorted(spec.left_counts().items()):
        defective = SparsePoly.monomial(5, (1, 0, d, 0, 0), 1, caps_f)
        false_alarm = SparsePoly.monomial(5, (0, 1, 0, d, 0), 1, caps_f)
        with_neg = SparsePoly(5, {(0, 0, 0, 0, 0): 1, (0, 0, 0, 0, 1): 1}, caps_f)
        all_pos = SparsePoly.monomial(5, (0, 0, 0, 0, 1), 1, caps_f)
        dismissed = poly_add(poly_pow(with_neg, d), -poly_pow(all_pos, d))
        bracket = poly_add(poly_add(defective, false_alarm), dismissed)
        f_factors.append((bracket, count))
    f = poly_product_of_powers(f_factors, caps_f)
    rows = tuple(
        (exps, gc, multinomial(edges, exps + (edges - sum(exps),)))
        for exps, gc in sorted(g.items())
    )
    return edges, rows, f


def comp_irregular(spec: EnsembleSpec, i: int, j: int) -> Fraction:
    """A_{i,j} for COMP on an arbitrary-degree ensemble."""
    _check_cell(spec.n, i, j)
    _, rows, f = _comp_general_parts(spec)
    f_terms = f.terms
    total = Fraction(0)
    for exps, gc, pairings in rows:
        fc = f_terms.get((i, j) + exps)
        if fc:
            total += Fraction(gc * fc, pairings)
    return total


def _comp_irregular_table(spec: EnsembleSpec) -> dict[tuple[int, int], Fraction]:
    values = {key: Fraction(0) for key in table_domain(spec.n, Algorithm.COMP)}
    for i in range(spec.n + 1):
        for j in range(spec.n - i + 1):
            values[(i, j)] = comp_irregular(spec, i, j)
    return values


@lru_cache(maxsize=32)
def _dd_general_parts(spec: EnsembleSpec):
    """Test- and item-side generating functions for DD, six edge classes.

    x1/s1 missed-defective edges, x2/s2 dismissed items at ordinary positive
    tests, x3/s3 dismissed items at certifying tests, x4/s4 fully-covered
    non-defectives, x5/s5 certified defectives at ordinary positive tests,
    x6/s6 certified defectives at their certifying tests.
    """
    right_counts = _right_counts_checked(spec)
    edges = spec.edge_count
    caps_g = (edges,) * 6
    g_factors = []
    for d, count in sorted(right_counts.items()):
        pd_adjacent = SparsePoly.sum_of_variables(6, [0, 1, 3, 4], caps_g)
        no_def = SparsePoly.sum_of_variables(6, [1, 3], caps_g)
        bracket = poly_add(SparsePoly.constant(6, 1, caps_g), poly_pow(pd_adjacent, d))
        bracket = poly_add(bracket, -poly_pow(no_def, d))
        sole_missed = {(1, d - 1, 0, 0, 0, 0): d}
        sole_cert = {(0, d - 1, 0, 0, 1, 0): d}
        certifying = {(0, 0, d - 1, 0, 0, 1): d}
        bracket = poly_add(bracket, SparsePoly(6, {k: -v for k, v in sole_missed.items()}, caps_g))
        bracket = poly_add(bracket, SparsePoly(6, {k: -v for k, v in sole_cert.items()}, caps_g))
        bracket = poly_add(bracket, SparsePoly(6, certifying, caps_g))
        g_factors.append((bracket, count))
    g = poly_product_of_powers(g_factors, caps_g)
    n = spec.n
    caps_f = (n, n) + (edges,) * 6
    f_factors = []
    for d, count in sorted(spec.left_counts().items()):
        s5_plus_s6 = SparsePoly.sum_of_variables(8, [6, 7], caps_f)
        s5_only = SparsePoly.monomial(8, (0, 0, 0, 0, 0, 0, 1, 0), 1, caps_f)
        t1 = SparsePoly.monomial(8, (1, 0, 0, 0, 0, 0, 0, 0), 1, caps_f)
        certified = poly_mul(t1, poly_add(poly_pow(s5_plus_s6, d), -poly_pow(s5_only, d)), caps_f)
        missed = SparsePoly.monomial(8, (0, 1, d, 0, 0, 0, 0, 0), 1, caps_f)
        covered = SparsePoly.monomial(8, (0, 0, 0, 0, 0, d, 0, 0), 1, caps_f)
        with_neg = SparsePoly(
            8, {(0,) * 8: 1, (0, 0, 0, 1, 0, 0, 0, 0): 1, (0, 0, 0, 0, 1, 0, 0, 0): 1}, caps_f
        )
        all_pos = SparsePoly(
            8, {(0, 0, 0, 1, 0, 0, 0, 0): 1, (0, 0, 0, 0, 1, 0, 0, 0): 1}, caps_f
        )
        dismissed = poly_add(poly_pow(with_neg, d), -poly_pow(all_pos, d))
        bracket = poly_add(poly_add(certified, missed), poly_add(covered, dismissed))
        f_factors.append((bracket, count))
    f = poly_product_of_powers(f_factors, caps_f)
    rows = tuple(
        (exps, gc, multinomial(edges, exps + (edges - sum(exps),)))
        for exps, gc in sorted(g.items())
    )
    return edges, rows, f


def dd_irregular(spec: EnsembleSpec, i: int, j: int) -> Fraction:
    """A_{i+j,j} for DD on an arbitrary-degree ensemble: i certified, j missed."""
    _check_cell(spec.n, i, j)
    _, rows, f = _dd_general_parts(spec)
    f_terms = f.terms
    total = Fraction(0)
    for exps, gc, pairings in rows:
        fc = f_terms.get((i, j) + exps)
        if fc:
            total += Fraction(gc * fc, pairings)
    return total


# ---------------------------------------------------------------------------
# Tables and error probabilities.
# ---------------------------------------------------------------------------


def _regular_degrees(spec: EnsembleSpec) -> tuple[int, int]:
    return spec.left.entries[0][0], spec.right.entries[0][0]


@lru_cache(maxsize=16)
def build_table(spec: EnsembleSpec, algorithm: Algorithm) -> EnumeratorTable:
    """Complete enumerator table for one ensemble, via the regular fast path when it applies."""
    validate(spec)
    if spec.is_regular:
        l, r = _regular_degrees(spec)
        if algorithm is Algorithm.COMP:
            values = _comp_regular_table(spec.n, l, r)
        else:
            values = _dd_regular_table(spec.n, l, r)
    else:
        if algorithm is Algorithm.COMP:
            values = _comp_irregular_table(spec)
        else:
            values = {key: Fraction(0) for key in table_domain(spec.n, Algorithm.DD)}
            for a in range(spec.n + 1):
                for j in range(a + 1):
                    values[(a, j)] = dd_irregular(spec, a - j, j)
    return EnumeratorTable(algorithm=algorithm, spec=spec, values=values)


def _require_complete(table: EnumeratorTable) -> None:
    missing = [key for key in table_domain(table.spec.n, table.algorithm) if key not in table.values]
    if missing:
        raise ValueError(f"incomplete table: missing {len(missing)} cells, first {missing[0]}")


def fa_probability(table: EnumeratorTable, delta) -> Fraction:
    """Expected per-item false-alarm rate E[fa / (n - defectives)] under i.i.d. Bernoulli(delta)."""
    if table.algorithm is not Algorithm.COMP:
        raise ValueError("false-alarm probability is defined on COMP tables")
    _require_complete(table)
    d = _as_exact(delta)
    n = table.spec.n
    total = Fraction(0)
    for i in range(1, n + 1):
        if i == n:
            continue  # no non-defectives to falsely accuse
        inner = Fraction(0)
        for j in range(1, n - i + 1):
            inner += Fraction(j, n - i) * table.values[(i, j)]
        if inner:
            total += inner * d**i * (1 - d) ** (n - i)
    return total


def md_probability(table: EnumeratorTable, delta) -> Fraction:
    """Expected per-item misdetection rate E[md / defectives] under i.i.d. Bernoulli(delta)."""
    if table.algorithm is not Algorithm.DD:
        raise ValueError("misdetection probability is defined on DD tables")
    _require_complete(table)
    d = _as_exact(delta)
    n = table.spec.n
    total = Fraction(0)
    for a in range(1, n + 1):
        inner = Fraction(0)
        for j in range(1, a + 1):
            inner += Fraction(j, a) * table.values[(a, j)]
        if inner:
            total += inner * d**a * (1 - d) ** (n - a)
    return total


def write_table_csv(table: EnumeratorTable, out: Union[str, Path, io.TextIOBase], precision: int = 12) -> None:
    """CSV rows (a, j, numerator, denominator, decimal) with a spec-hash comment line."""
    _require_complete(table)

    def _write(fh) -> None:
        fh.write(
            f"# spec_hash={spec_hash(table.spec)} algorithm={table.algorithm.value} "
            f"source={table.source}\n"
        )
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["a", "j", "numerator", "denominator", "decimal"])
        for (a, j) in sorted(table.values):
            value = table.values[(a, j)]
            writer.writerow([a, j, value.numerator, value.denominator, to_decimal(value, precision)])

    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
    else:
        _write(out)
