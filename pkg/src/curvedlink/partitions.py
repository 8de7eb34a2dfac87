"""Partition combinatorics and Schur-basis multiplication.

Everything downstream represents a block of symmetric functions in its Schur
basis, so the whole algebra layer reduces to three cached primitives on
partitions: the Pieri rule (multiply by a complete symmetric function), the
Jacobi-Trudi expansion of a Schur function into complete (or elementary)
symmetric functions, and the products/coproducts derived from them.

Partitions are tuples of weakly decreasing positive ints; () is the empty
partition.  Boxes are (rows, cols) bounds with cols=None meaning unbounded;
a partition outside its box is zero in the corresponding ring (row bound:
Sym_k has at most k rows; column bound: the Grassmannian quotient ring
H*(Gr(k, m)) keeps only partitions with parts <= m - k).
"""

from functools import cache
from itertools import permutations


def as_partition(parts):
    lam = tuple(p for p in parts if p != 0)
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)) or any(p < 0 for p in lam):
        raise ValueError(f"not a partition: {parts}")
    return lam


def size(lam):
    return sum(lam)


@cache
def conjugate(lam):
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p > j) for j in range(lam[0]))


def fits(lam, rows, cols):
    if len(lam) > rows:
        return False
    return cols is None or not lam or lam[0] <= cols


@cache
def partitions_in_box(n, rows, cols):
    """All partitions of n with at most `rows` parts, each part <= cols."""
    if n == 0:
        return ((),)
    if rows == 0 or (cols is not None and cols == 0):
        return ()
    out = []
    maxpart = n if cols is None else min(n, cols)

    def rec(remaining, maxp, nrows, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if nrows == 0:
            return
        for p in range(min(maxp, remaining), 0, -1):
            acc.append(p)
            rec(remaining - p, p, nrows - 1, acc)
            acc.pop()

    rec(n, maxpart, rows, [])
    return tuple(out)


@cache
def count_partitions_in_box(n, rows, cols):
    # dimension of the degree-2n piece of Sym_rows (quotiented at cols)
    return len(partitions_in_box(n, rows, cols))


@cache
def pieri_h(lam, r, rows, cols):
    """Schur expansion of s_lam * h_r: all mu >= lam with mu/lam a horizontal
    strip of size r, truncated to the box."""
    if r == 0:
        return (lam,) if fits(lam, rows, cols) else ()
    out = []
    lam_ext = lam + (0,) * (rows - len(lam)) if rows > len(lam) else lam[:rows]

    def rec(i, remaining, acc):
        if i == len(lam_ext):
            if remaining == 0:
                out.append(as_partition(acc))
            return
        upper = lam_ext[i - 1] if i > 0 else (remaining + lam_ext[i] if cols is None else cols)
        lo = lam_ext[i]
        hi = min(upper, lam_ext[i] + remaining)
        for v in range(hi, lo - 1, -1):
            acc.append(v)
            rec(i + 1, remaining - (v - lam_ext[i]), acc)
            acc.pop()

    rec(0, r, [])
    return tuple(out)


@cache
def jacobi_trudi_h(lam):
    """Signed expansion of s_lam as a polynomial in h's: dict mapping a sorted
    tuple of h-indices to a sign count.  det(h_{lam_i - i + j})."""
    ell = len(lam)
    if ell == 0:
        return {(): 1}
    out = {}
    for sigma in permutations(range(ell)):
        idx = []
        sign = perm_sign(sigma)
        ok = True
        for i in range(ell):
            v = lam[i] - (i + 1) + (sigma[i] + 1)
            if v < 0:
                ok = False
                break
            if v > 0:
                idx.append(v)
        if not ok:
            continue
        key = tuple(sorted(idx, reverse=True))
        out[key] = out.get(key, 0) + sign
    return {k: v for k, v in out.items() if v != 0}


def perm_sign(sigma):
    sign = 1
    seen = [False] * len(sigma)
    for i in range(len(sigma)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


@cache
def hmonomial_to_schur(hs, rows, cols):
    """Expand a product of h's into the Schur basis (within the box)."""
    acc = {(): 1}
    for r in hs:
        nxt = {}
        for lam, c in acc.items():
            for mu in pieri_h(lam, r, rows, cols):
                nxt[mu] = nxt.get(mu, 0) + c
        acc = nxt
    return acc


@cache
def schur_mult(lam, mu, rows, cols):
    """Littlewood-Richardson product s_lam * s_mu in the boxed Schur basis."""
    if not lam:
        return {mu: 1} if fits(mu, rows, cols) else {}
    if not mu:
        return {lam: 1} if fits(lam, rows, cols) else {}
    if size(mu) > size(lam):
        lam, mu = mu, lam
    out = {}
    for hs, sgn in jacobi_trudi_h(mu).items():
        acc = {lam: sgn}
        for r in hs:
            nxt = {}
            for nu, c in acc.items():
                for kappa in pieri_h(nu, r, rows, cols):
                    nxt[kappa] = nxt.get(kappa, 0) + c
            acc = nxt
        for nu, c in acc.items():
            out[nu] = out.get(nu, 0) + c
    return {k: v for k, v in out.items() if v != 0}


@cache
def littlewood_richardson(lam, mu, nu):
    """Coefficient of s_nu in s_lam s_mu (unboxed)."""
    rows = len(lam) + len(mu)
    return schur_mult(lam, mu, rows, None).get(nu, 0)


@cache
def subpartitions(lam):
    """All mu contained in lam."""
    if not lam:
        return ((),)
    out = set()

    def rec(i, maxp, acc):
        out.add(as_partition(acc))
        if i == len(lam):
            return
        for p in range(1, min(lam[i], maxp) + 1):
            acc.append(p)
            rec(i + 1, p, acc)
            acc.pop()

    rec(0, lam[0], [])
    return tuple(sorted(out))


@cache
def schur_coproduct(lam, rows1, cols1, rows2, cols2):
    """Expansion of s_lam over a split alphabet x|y: dict mapping (mu, nu) to
    the Littlewood-Richardson coefficient c^lam_{mu,nu}, boxed per side."""
    out = {}
    n = size(lam)
    for mu in subpartitions(lam):
        if not fits(mu, rows1, cols1):
            continue
        for nu in partitions_in_box(n - size(mu), rows2, cols2):
            c = littlewood_richardson(mu, nu, lam)
            if c:
                out[(mu, nu)] = c
    return out


@cache
def schur_to_eps(lam):
    """Signed expansion of s_lam into elementary symmetric functions: dict
    mapping a sorted tuple of eps-indices to an integer.  Dual Jacobi-Trudi
    det(e_{lam'_i - i + j})."""
    return jacobi_trudi_h(conjugate(lam))


@cache
def eps_to_schur(r, rows, cols):
    """e_r in the boxed Schur basis: the single column (1^r), or zero."""
    lam = (1,) * r
    return {lam: 1} if fits(lam, rows, cols) else {}


# Brute-force oracle used by the tests: expand a Schur polynomial as an honest
# polynomial via semistandard tableaux.
@cache
def schur_xpoly(lam, nvars):
    if len(lam) > nvars:
        return {}
    out = {}
    for t in _ssyt(lam, nvars):
        expo = [0] * nvars
        for row in t:
            for v in row:
                expo[v] += 1
        key = tuple(expo)
        out[key] = out.get(key, 0) + 1
    return out


def _ssyt(lam, nvars):
    if not lam:
        yield ()
        return
    rows = len(lam)

    def rec(r, acc):
        if r == rows:
            yield tuple(tuple(row) for row in acc)
            return
        def fill(c, row):
            if c == lam[r]:
                acc.append(row)
                yield from rec(r + 1, acc)
                acc.pop()
                return
            lo = row[c - 1] if c > 0 else 0
            if r > 0 and c < lam[r - 1]:
                lo = max(lo, acc[r - 1][c] + 1)
            for v in range(lo, nvars):
                yield from fill(c + 1, row + [v])
        yield from fill(0, [])

    yield from rec(0, [])
