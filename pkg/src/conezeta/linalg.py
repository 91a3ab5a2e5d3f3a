"""Small exact linear algebra over the rationals (lists of lists of Fractions)."""
from fractions import Fraction

from .errors import SingularBasis


def as_fraction_matrix(rows):
    return [[Fraction(v) for v in row] for row in rows]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def det(a):
    """Determinant by fraction-exact Gaussian elimination."""
    m = as_fraction_matrix(a)
    n = len(m)
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        piv = m[c][c]
        result *= piv
        for r in range(c + 1, n):
            f = m[r][c] / piv
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return result


def solve(a, b):
    """Solve ``a x = b`` for square nonsingular ``a``; ``b`` may be a vector or a matrix."""
    vector = not isinstance(b[0], (list, tuple))
    rhs = [[Fraction(v)] for v in b] if vector else as_fraction_matrix(b)
    m = as_fraction_matrix(a)
    n = len(m)
    k = len(rhs[0])
    aug = [m[i] + rhs[i] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if p is None:
            raise SingularBasis("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [v / piv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    out = [row[n:] for row in aug]
    return [row[0] for row in out] if vector else out


def inverse(a):
    return solve(a, identity(len(a)))


def minors(a, r):
    """All r x r minors of the n x m matrix ``a`` (rows chosen, all r-subsets of columns)."""
    from itertools import combinations

    n, m = len(a), len(a[0])
    out = []
    for rows in combinations(range(n), r):
        for cols in combinations(range(m), r):
            out.append(det([[a[i][j] for j in cols] for i in rows]))
    return out


def is_integral(a):
    return all(Fraction(v).denominator == 1 for row in a for v in row)


def fraction_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
