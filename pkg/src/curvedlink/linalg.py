"""Exact linear algebra over the rationals.

Matrices are lists of lists of Fractions.  Everything here is used in
degreewise solves where exactness is the whole point, so there is no float
path anywhere.
"""

from fractions import Fraction


def mat(rows):
    return [[Fraction(x) for x in row] for row in rows]


def zeros(n, m):
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n):
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def rref(a):
    """Row-reduce a copy of `a`; returns (reduced, pivot column list)."""
    a = [row[:] for row in a]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        pr = next((i for i in range(r, nr) if a[i][c]), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def rank(a):
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a):
    """Basis of {x : a x = 0} as a list of column vectors."""
    if not a:
        return []
    nc = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * nc
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(a, b):
    """One solution x of a x = b, or None.  b may be a vector or a matrix of
    right-hand sides (then x is a matrix)."""
    vec = b and not isinstance(b[0], list)
    bb = [[x] for x in b] if vec else b
    nr = len(a)
    nc = len(a[0]) if nr else 0
    nb = len(bb[0]) if bb else 0
    aug = [a[i][:] + bb[i][:] for i in range(nr)]
    red, pivots = rref(aug)
    # a pivot landing in the rhs block means an inconsistent system
    if any(p >= nc for p in pivots):
        return None
    pivots = [p for p in pivots if p < nc]
    x = [[Fraction(0)] * nb for _ in range(nc)]
    for r, pc in enumerate(pivots):
        for j in range(nb):
            x[pc][j] = red[r][nc + j]
    return [row[0] for row in x] if vec else x


def inv(a):
    n = len(a)
    if rank(a) != n:
        raise ValueError("matrix not invertible")
    return solve(a, identity(n))


def matmul(a, b):
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    out = zeros(n, m)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] += x * bt[j]
    return out


def column_space_basis(a):
    """Indices of a maximal independent subset of columns."""
    if not a or not a[0]:
        return []
    _, pivots = rref(a)
    return pivots


class Solver:
    """Factor a matrix once, solve many right-hand sides exactly."""

    def __init__(self, a):
        self.nr = len(a)
        self.nc = len(a[0]) if self.nr else 0
        aug = [a[i][:] + row for i, row in enumerate(identity(self.nr))]
        self.red, self.pivots = rref(aug)
        self.pivots = [p for p in self.pivots if p < self.nc]

    def solve(self, b):
        """Solution of a x = b or None."""
        # transformed rhs: T b where red = [R | T]
        tb = []
        for r in range(self.nr):
            acc = Fraction(0)
            for j in range(self.nr):
                t = self.red[r][self.nc + j]
                if t and b[j]:
                    acc += t * b[j]
            tb.append(acc)
        x = [Fraction(0)] * self.nc
        for r, pc in enumerate(self.pivots):
            x[pc] = tb[r]
        for r in range(len(self.pivots), self.nr):
            if tb[r]:
                return None
        return x
