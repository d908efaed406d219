#!/usr/bin/env python3
"""Regenerate crates/core/fixtures/*.json from slow, independent evaluators.

Every triangle here is computed by brute force, a closed form, or a plain
recursive definition, never by the Riordan or production-matrix machinery
that the Rust crate implements.
"""

import itertools
import json
import math
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

ROWS = 9
OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def product_rows(factor):
    """Row n = coefficients of prod_{i=1..n} factor(i), a linear polynomial."""
    rows = []
    for n in range(ROWS):
        p = [1]
        for i in range(1, n + 1):
            p = poly_mul(p, factor(i))
        rows.append(p)
    return rows


def stirling2(n, k):
    if k == 0:
        return 1 if n == 0 else 0
    total = sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1))
    return total // math.factorial(k)


def pascal():
    return [[math.comb(n, k) for k in range(n + 1)] for n in range(ROWS)]


def stirling1_shifted():
    # c(n+1, k+1): coefficients of (x+1)(x+2)...(x+n)
    return product_rows(lambda i: [i, 1])


def stirling1_b():
    return product_rows(lambda i: [2 * i - 1, 1])


def stirling2_shifted():
    return [[stirling2(n + 1, k + 1) for k in range(n + 1)] for n in range(ROWS)]


def lah_shifted():
    def lah(n, k):
        return math.comb(n - 1, k - 1) * math.factorial(n) // math.factorial(k)

    return [[lah(n + 1, k + 1) for k in range(n + 1)] for n in range(ROWS)]


def idempotent():
    return [[math.comb(n, k) * k ** (n - k) for k in range(n + 1)] for n in range(ROWS)]


def whitney(m, r):
    def w(n, k):
        return sum(
            math.comb(n, i) * r ** (n - i) * m ** (i - k) * stirling2(i, k)
            for i in range(k, n + 1)
        )

    return [[w(n, k) for k in range(n + 1)] for n in range(ROWS)]


def delannoy():
    def d(a, b):
        return sum(math.comb(a, j) * math.comb(b, j) * 2**j for j in range(min(a, b) + 1))

    return [[d(n - k, k) for k in range(n + 1)] for n in range(ROWS)]


def cycle_count(perm):
    seen, cycles = set(), 0
    for s in range(len(perm)):
        if s not in seen:
            cycles += 1
            while s not in seen:
                seen.add(s)
                s = perm[s]
    return cycles


def derangement_a():
    # derangements of [n] counted by number of cycles
    rows = []
    for n in range(ROWS):
        row = [0] * (n + 1)
        for perm in itertools.permutations(range(n)):
            if all(perm[i] != i for i in range(n)):
                row[cycle_count(perm)] += 1
        rows.append(row)
    return rows


def derangement_b():
    @lru_cache(maxsize=None)
    def t(n, k):
        if n < 0 or k < 0 or k > n:
            return 0
        if n == 0:
            return 1
        return t(n - 1, k - 1) + 2 * (n - 1) * t(n - 1, k) + 2 * (n - 1) * t(n - 2, k - 1)

    return [[t(n, k) for k in range(n + 1)] for n in range(ROWS)]


def eulerian():
    # descents of permutations of [n+1], via the alternating-sum closed form
    def a(n, k):
        return sum((-1) ** j * math.comb(n + 2, j) * (k + 1 - j) ** (n + 1) for j in range(k + 2))

    return [[a(n, k) for k in range(n + 1)] for n in range(ROWS)]


def bell(x):
    """Partial Bell polynomials B_{n,k}(x_1, x_2, ...) by the first-block recurrence."""

    @lru_cache(maxsize=None)
    def b(n, k):
        if n == 0 and k == 0:
            return Fraction(1)
        if n == 0 or k == 0:
            return Fraction(0)
        return sum(math.comb(n - 1, i - 1) * x(i) * b(n - i, k - 1) for i in range(1, n - k + 2))

    return [[b(n, k) for k in range(n + 1)] for n in range(ROWS)]


FIXTURES = {
    "pascal": ((0, 0), "binomial coefficients C(n,k)", pascal),
    "stirling1": ((1, 1), "signless Stirling numbers of the first kind c(n+1,k+1)", stirling1_shifted),
    "stirling1_B": ((0, 0), "type B Stirling numbers of the first kind", stirling1_b),
    "stirling2": ((1, 1), "Stirling numbers of the second kind S(n+1,k+1)", stirling2_shifted),
    "stirling2_reversed": (
        (1, 1),
        "row reversal of S(n+1,k+1)",
        lambda: [row[::-1] for row in stirling2_shifted()],
    ),
    "lah": ((1, 1), "signless Lah numbers L(n+1,k+1)", lah_shifted),
    "idempotent": ((0, 0), "idempotent numbers C(n,k) k^(n-k)", idempotent),
    "whitney(1,1)": ((0, 0), "r-Whitney numbers of the second kind, m=1, r=1", lambda: whitney(1, 1)),
    "whitney(2,1)": ((0, 0), "r-Whitney numbers of the second kind, m=2, r=1", lambda: whitney(2, 1)),
    "whitney(2,2)": ((0, 0), "r-Whitney numbers of the second kind, m=2, r=2", lambda: whitney(2, 2)),
    "delannoy": ((0, 0), "Delannoy numbers D(n-k,k)", delannoy),
    "derangement_A": ((0, 0), "derangements of [n] by number of cycles", derangement_a),
    "derangement_B": ((0, 0), "type B derangement triangle", derangement_b),
    "eulerian": ((0, 0), "Eulerian numbers: permutations of [n+1] by descents", eulerian),
    "bell_iteration(ones)": ((0, 0), "B_{n,k}(1,1,1,...) = S(n,k)", lambda: bell(lambda i: 1)),
    "bell_iteration(naturals)": ((0, 0), "B_{n,k}(1,2,3,...)", lambda: bell(lambda i: i)),
    "bell_iteration(factorials)": ((0, 0), "B_{n,k}(1!,2!,3!,...)", lambda: bell(math.factorial)),
}


def file_name(name):
    return name.replace("(", "_").replace(")", "").replace(",", "_") + ".json"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (shift, notes, build) in FIXTURES.items():
        rows = [[str(Fraction(v)) for v in row] for row in build()]
        doc = {"name": name, "index_shift": list(shift), "notes": notes, "rows": rows}
        (OUT / file_name(name)).write_text(json.dumps(doc, indent=1) + "\n")
        print(f"{file_name(name)}: {len(rows)} rows")


if __name__ == "__main__":
    main()
