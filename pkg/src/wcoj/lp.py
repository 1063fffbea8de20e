"""Tiny linear programs for fractional edge covers.

Two routes, used for different purposes:

* ``minimize_cover`` — a self-contained two-phase dense simplex (floats,
  Bland's rule) minimizing sum(cost_e * x_e) subject to the cover
  constraints. Used with cost_e = log|R_e| for output-size bounds.
* ``exact_cover_number`` — exact-rational optimum of sum(x_e) by enumerating
  basic solutions with Fraction arithmetic. Used for widths, so planner
  comparisons like 3/2 vs 2 are exact. Memoized; the programs here never
  exceed ~8 variables.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .errors import InfeasibleCoverError

_EPS = 1e-9


def _check_coverable(edge_attrs: list[frozenset], restrict: frozenset) -> None:
    for v in restrict:
        if not any(v in attrs for attrs in edge_attrs):
            raise InfeasibleCoverError(f"attribute {v!r} is covered by no edge")


def minimize_cover(
    edge_attrs: list[frozenset],
    costs: list[float],
    restrict: frozenset,
) -> tuple[float, list[float]]:
    """min sum(costs[e] * x_e) s.t. every v in restrict has incident weight >= 1.

    Returns (objective value, weights). Raises InfeasibleCoverError when some
    restricted attribute is in no edge.
    """
    _check_coverable(edge_attrs, restrict)
    n = len(edge_attrs)
    rows = sorted(restrict)
    m = len(rows)
    if m == 0:
        return 0.0, [0.0] * n

    # Standard form: A x - s + a = 1 with s, a >= 0; phase 1 minimizes sum(a).
    # Tableau columns: x (n) | s (m) | a (m) | rhs.
    width = n + 2 * m + 1
    tab = [[0.0] * width for _ in range(m)]
    for i, v in enumerate(rows):
        for j, attrs in enumerate(edge_attrs):
            if v in attrs:
                tab[i][j] = 1.0
        tab[i][n + i] = -1.0
        tab[i][n + m + i] = 1.0
        tab[i][-1] = 1.0
    basis = [n + m + i for i in range(m)]

    def pivot(r: int, c: int) -> None:
        prow = tab[r]
        p = prow[c]
        for j in range(width):
            prow[j] /= p
        for i in range(m):
            if i == r:
                continue
            f = tab[i][c]
            if f != 0.0:
                row = tab[i]
                for j in range(width):
                    row[j] -= f * prow[j]
        basis[r] = c

    def solve(cost: list[float], allowed: int) -> None:
        # Bland's rule on reduced costs recomputed per iteration: tiny LPs,
        # clarity over speed.
        while True:
            entering = -1
            for j in range(allowed):
                if j in basis:
                    continue
                red = cost[j] - sum(cost[basis[i]] * tab[i][j] for i in range(m))
                if red < -_EPS:
                    entering = j
                    break
            if entering < 0:
                return
            leaving, best = -1, None
            for i in range(m):
                if tab[i][entering] > _EPS:
                    ratio = tab[i][-1] / tab[i][entering]
                    if best is None or ratio < best - _EPS or (
                        abs(ratio - best) <= _EPS and basis[i] < basis[leaving]
                    ):
                        leaving, best = i, ratio
            if leaving < 0:
                raise InfeasibleCoverError("cover LP unbounded; malformed input")
            pivot(leaving, entering)

    phase1 = [0.0] * (n + m) + [1.0] * m
    solve(phase1, n + 2 * m)
    residual = sum(phase1[basis[i]] * tab[i][-1] for i in range(m))
    if residual > 1e-6:
        raise InfeasibleCoverError("cover LP infeasible")
    # Pivot any artificial still (degenerately) in the basis out of it.
    for i in range(m):
        if basis[i] >= n + m:
            for j in range(n + m):
                if abs(tab[i][j]) > _EPS:
                    pivot(i, j)
                    break

    phase2 = list(costs) + [0.0] * (2 * m)
    solve(phase2, n + m)
    x = [0.0] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tab[i][-1]
    return sum(costs[j] * x[j] for j in range(n)), x


def _solve_exact(rows: list[tuple[tuple[int, ...], int]]) -> list[Fraction] | None:
    """Solve a square rational system; None if singular."""
    n = len(rows)
    a = [[Fraction(c) for c in coeffs] + [Fraction(rhs)] for coeffs, rhs in rows]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


_exact_cache: dict[tuple, Fraction] = {}


def exact_cover_number(edge_attrs: list[frozenset], restrict: frozenset) -> Fraction:
    """Exact fractional edge cover number of ``restrict`` using the edges.

    This is the equal-cardinality width convention (the triangle gives 3/2).
    """
    _check_coverable(edge_attrs, restrict)
    if not restrict:
        return Fraction(0)
    key = (tuple(sorted(tuple(sorted(a & restrict)) for a in edge_attrs)), tuple(sorted(restrict)))
    hit = _exact_cache.get(key)
    if hit is not None:
        return hit

    n = len(edge_attrs)
    constraints: list[tuple[tuple[int, ...], int]] = []
    for v in sorted(restrict):
        constraints.append((tuple(1 if v in a else 0 for a in edge_attrs), 1))
    for j in range(n):
        constraints.append((tuple(1 if i == j else 0 for i in range(n)), 0))

    best: Fraction | None = None
    for combo in combinations(range(len(constraints)), n):
        x = _solve_exact([constraints[i] for i in combo])
        if x is None:
            continue
        if any(v < 0 for v in x):
            continue
        feasible = all(
            sum(c * v for c, v in zip(coeffs, x)) >= rhs for coeffs, rhs in constraints
        )
        if not feasible:
            continue
        total = sum(x)
        if best is None or total < best:
            best = total
    if best is None:  # cannot happen once coverability holds
        raise InfeasibleCoverError("no feasible cover vertex found")
    _exact_cache[key] = best
    return best
