"""Exact graded arithmetic in products of symmetric-function algebras.

An `Ambient` is a product A = Sym_{k_1} x ... x Sym_{k_N}, optionally taken
modulo the Grassmannian ideal of level m in every block (the quotient
Sym_k / (h_{m-k+1}, ..., h_m), whose Schur basis is the k x (m-k) box).
A `SymElem` stores an element in the product Schur basis with exact rational
coefficients; the elementary generator eps_r of block j is the single-column
Schur function s_{(1^r)} and every x-variable has degree 2.

The other half of this module is the free-module structure of refinements:
splitting an adjacent pair of blocks (a+b) -> (a, b) makes the finer algebra
a free module over the coarser one with basis the Schur functions of the
first block in the a x b box.  `MergeContext.express` re-expands an element
of the fine algebra over that basis by exact degreewise linear solves; the
per-degree matrices are cached, which is what makes the rest of the engine
affordable.
"""

from fractions import Fraction
from functools import cache
from itertools import product as iproduct
from typing import NamedTuple, Optional

from . import linalg
from .partitions import (
    as_partition,
    count_partitions_in_box,
    fits,
    partitions_in_box,
    schur_coproduct,
    schur_mult,
    schur_to_eps,
    size,
)


class Ambient(NamedTuple):
    sizes: tuple
    level: Optional[int] = None

    def __repr__(self):
        lv = "" if self.level is None else f" mod {self.level}"
        return f"A{list(self.sizes)}{lv}"

    def box(self, j):
        k = self.sizes[j]
        return (k, None if self.level is None else self.level - k)

    def nblocks(self):
        return len(self.sizes)

    def valid_key(self, key):
        return len(key) == len(self.sizes) and all(
            fits(lam, *self.box(j)) for j, lam in enumerate(key)
        )

    def generators(self):
        """(block, r) for every elementary generator eps_r^{(block)}."""
        return [(j, r) for j, k in enumerate(self.sizes) for r in range(1, k + 1)]

    def graded_dim(self, d):
        """Dimension of the degree-d piece (degrees are even)."""
        if d < 0 or d % 2:
            return 0
        return sum(1 for _ in self.graded_keys(d))

    def graded_keys(self, d):
        if d < 0 or d % 2:
            return
        n = d // 2
        per_block = []
        for j in range(len(self.sizes)):
            rows, cols = self.box(j)
            per_block.append([(m, partitions_in_box(m, rows, cols)) for m in range(n + 1)])

        def rec(j, remaining, acc):
            if j == len(self.sizes):
                if remaining == 0:
                    yield tuple(acc)
                return
            for m, lams in per_block[j]:
                if m > remaining:
                    break
                for lam in lams:
                    acc.append(lam)
                    yield from rec(j + 1, remaining - m, acc)
                    acc.pop()

        yield from rec(0, n, [])


def key_degree(key):
    return 2 * sum(size(lam) for lam in key)


class SymElem:
    """Element of a product symmetric-function algebra, exact and graded."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient, terms=None):
        self.ambient = ambient
        self.terms = {}
        if terms:
            for k, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[k] = c

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(ambient):
        return SymElem(ambient)

    @staticmethod
    def one(ambient):
        return SymElem(ambient, {((),) * len(ambient.sizes): Fraction(1)})

    @staticmethod
    def schur(ambient, j, lam, coeff=1):
        lam = as_partition(lam)
        if not fits(lam, *ambient.box(j)):
            return SymElem(ambient)
        key = tuple(lam if t == j else () for t in range(len(ambient.sizes)))
        return SymElem(ambient, {key: Fraction(coeff)})

    @staticmethod
    def eps(ambient, j, r, coeff=1):
        """Elementary generator eps_r of block j (degree 2r)."""
        return SymElem.schur(ambient, j, (1,) * r, coeff)

    @staticmethod
    def from_eps_monomials(ambient, data):
        """Build from {((j, r), ...): coeff} maps of eps-monomials."""
        out = SymElem(ambient)
        for mono, c in data.items():
            term = SymElem.one(ambient) * Fraction(c)
            for (j, r) in mono:
                term = term * SymElem.eps(ambient, j, r)
            out = out + term
        return out

    # -- ring ops ------------------------------------------------------
    def __add__(self, other):
        assert self.ambient == other.ambient, "ambient mismatch"
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, Fraction(0)) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SymElem(self.ambient, out)

    def __neg__(self):
        return SymElem(self.ambient, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return SymElem(self.ambient)
        return SymElem(self.ambient, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        assert self.ambient == other.ambient, "ambient mismatch"
        amb = self.ambient
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                c = c1 * c2
                for key, mult in _key_mult(amb, k1, k2).items():
                    v = out.get(key, Fraction(0)) + c * mult
                    if v:
                        out[key] = v
                    else:
                        out.pop(key, None)
        return SymElem(amb, out)

    __rmul__ = __mul__

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, SymElem)
            and self.ambient == other.ambient
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ambient, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for k in sorted(self.terms, key=lambda k: (key_degree(k), k)):
            bits.append(f"{self.terms[k]}*s{list(map(list, k))}")
        return " + ".join(bits)

    # -- grading -------------------------------------------------------
    def degree(self):
        """Degree if homogeneous, else raises."""
        degs = {key_degree(k) for k in self.terms}
        if len(degs) > 1:
            raise ValueError("inhomogeneous element")
        return degs.pop() if degs else None

    def is_homogeneous(self):
        return len({key_degree(k) for k in self.terms}) <= 1

    def homogeneous_part(self, d):
        return SymElem(
            self.ambient, {k: c for k, c in self.terms.items() if key_degree(k) == d}
        )

    def degrees(self):
        return sorted({key_degree(k) for k in self.terms})

    def coeff(self, key):
        return self.terms.get(key, Fraction(0))

    def constant(self):
        return self.coeff(((),) * len(self.ambient.sizes))


@cache
def _block_mult(boxes_key, j, lam, mu):
    rows, cols = boxes_key[j]
    return schur_mult(lam, mu, rows, cols)


def _key_mult(amb, k1, k2):
    boxes_key = tuple(amb.box(j) for j in range(len(amb.sizes)))
    acc = {(): Fraction(1)}
    for j in range(len(amb.sizes)):
        blk = _block_mult(boxes_key, j, k1[j], k2[j])
        nxt = {}
        for pref, c in acc.items():
            for lam, m in blk.items():
                nxt[pref + (lam,)] = c * m
        acc = nxt
        if not acc:
            break
    return acc


# -- quantum integers -------------------------------------------------------

def quantum_int(a):
    """[a] = q^{a-1} + q^{a-3} + ... + q^{1-a} as {power: coeff}."""
    if a < 0:
        raise ValueError("quantum_int needs a >= 0")
    return {a - 1 - 2 * k: 1 for k in range(a)}


def laurent_mult(p, q):
    out = {}
    for d1, c1 in p.items():
        for d2, c2 in q.items():
            v = out.get(d1 + d2, 0) + c1 * c2
            if v:
                out[d1 + d2] = v
            else:
                out.pop(d1 + d2, None)
    return out


def quantum_factorial(a):
    out = {0: 1}
    for i in range(1, a + 1):
        out = laurent_mult(out, quantum_int(i))
    return out


def quantum_binomial(a, b):
    """Quantum binomial [a choose b]: exact Laurent polynomial division."""
    if b < 0 or b > a:
        return {}
    num = quantum_factorial(a)
    den = laurent_mult(quantum_factorial(b), quantum_factorial(a - b))
    return laurent_divide(num, den)


def laurent_divide(num, den):
    num = dict(num)
    out = {}
    dtop = max(den)
    dc = den[dtop]
    while num:
        ntop = max(num)
        c = Fraction(num[ntop], dc)
        out[ntop - dtop] = c
        for d, v in den.items():
            nv = num.get(ntop - dtop + d, 0) - c * v
            if nv:
                num[ntop - dtop + d] = nv
            else:
                num.pop(ntop - dtop + d, None)
    return {d: (int(c) if Fraction(c).denominator == 1 else c) for d, c in out.items()}


def laurent_eval_at_one(p):
    return sum(p.values())


def hilbert_series(ambient, up_to):
    """Dimensions of the graded pieces of A through degree `up_to`."""
    return [ambient.graded_dim(d) for d in range(up_to + 1)]


# -- merges and straightening ----------------------------------------------

class MergeContext:
    """A refinement fine -> coarse given by merging consecutive block groups.

    groups: tuple of (start, stop) index ranges into fine.sizes, covering it.
    """

    def __init__(self, fine, groups):
        self.fine = fine
        self.groups = tuple((int(a), int(b)) for a, b in groups)
        covered = [i for a, b in self.groups for i in range(a, b)]
        assert covered == list(range(len(fine.sizes))), "groups must tile the blocks"
        self.coarse = Ambient(
            tuple(sum(fine.sizes[a:b]) for a, b in self.groups), fine.level
        )

    def free_basis(self):
        """Labels (fine-ambient Schur keys) and degrees of the free basis of
        A_fine over A_coarse.  For a group (b_1, .., b_s) the label at slot t
        ranges over the b_t x (b_{t+1} + ... + b_s) box, the last slot empty.
        """
        per_slot = []
        for a, b in self.groups:
            rest = 0
            boxes = []
            for t in range(b - 1, a - 1, -1):
                boxes.append((t, self.fine.sizes[t], rest))
                rest += self.fine.sizes[t]
            boxes.reverse()
            per_slot.extend(boxes)
        choices = []
        for (t, rows, cols) in per_slot:
            opts = []
            for n in range(rows * cols + 1):
                opts.extend(partitions_in_box(n, rows, cols))
            choices.append(opts)
        out = []
        for combo in iproduct(*choices):
            key = [()] * len(self.fine.sizes)
            for (slot, lam) in zip(per_slot, combo):
                key[slot[0]] = lam
            key = tuple(key)
            out.append((key, key_degree(key)))
        out.sort(key=lambda kd: (kd[1], kd[0]))
        return out

    def rank(self):
        return len(self.free_basis())

    def include(self, f):
        """Image of f in A_fine under the coarse -> fine inclusion."""
        assert f.ambient == self.coarse
        out = SymElem(self.fine)
        for key, c in f.terms.items():
            term = SymElem.one(self.fine).scale(c)
            for g, (a, b) in enumerate(self.groups):
                term = term * _include_block(self.fine, (a, b), key[g])
            out = out + term
        return out

    def express(self, f):
        """Coefficients of f over the free basis: {label: SymElem(coarse)}."""
        assert f.ambient == self.fine
        return _express_rec(self, f)


@cache
def _include_block_cached(fine_sizes, level, span, lam):
    """s_lam of the union alphabet of fine blocks span=(a,b), as a SymElem of
    the fine ambient (iterated coproduct, distributing left to right)."""
    fine = Ambient(fine_sizes, level)
    a, b = span
    blocks = list(range(a, b))
    cur = [(lam, Fraction(1), ())]  # (rest of lam, coeff, assigned partitions)
    for pos, t in enumerate(blocks[:-1]):
        rows1, cols1 = fine.box(t)
        rest_rows = sum(fine.sizes[u] for u in blocks[pos + 1:])
        rest_cols = None if level is None else level
        nxt = []
        for rem, c, assigned in cur:
            for (mu, nu), m in schur_coproduct(rem, rows1, cols1, rest_rows, rest_cols).items():
                nxt.append((nu, c * m, assigned + (mu,)))
        cur = nxt
    terms = {}
    for rem, c, assigned in cur:
        if not fits(rem, *fine.box(blocks[-1])):
            continue
        key = [()] * len(fine_sizes)
        for t, mu in zip(blocks[:-1], assigned):
            key[t] = mu
        key[blocks[-1]] = rem
        key = tuple(key)
        terms[key] = terms.get(key, Fraction(0)) + c
    return SymElem(fine, terms)


def _include_block(fine, span, lam):
    return _include_block_cached(fine.sizes, fine.level, span, lam)


def _express_rec(ctx, f):
    """Iteratively straighten f over all merge pairs, rightmost-first per group."""
    # positions to merge: within each group (a,b), merge pair (t, t+1) for
    # t = b-2 down to a, in a right-to-left sweep; after each merge the block
    # count drops by one, so recompute indices as we go.
    amb = ctx.fine
    labels_template = [None] * len(amb.sizes)
    state = {tuple(labels_template): f}
    sizes = list(amb.sizes)
    # mapping from current block index to original fine index
    orig = list(range(len(sizes)))
    for g, (a, b) in enumerate(ctx.groups):
        for t in range(b - 2, a - 1, -1):
            cur = next(i for i, o in enumerate(orig) if o == t)
            new_state = {}
            for labels, elem in state.items():
                for lam, coeffs in straighten_pair(elem, cur).items():
                    lab = list(labels)
                    lab[t] = lam
                    lab = tuple(lab)
                    if lab in new_state:
                        new_state[lab] = new_state[lab] + coeffs
                    else:
                        new_state[lab] = coeffs
            state = new_state
            orig.pop(cur + 1)
    out = {}
    for labels, elem in state.items():
        key = tuple(lam if lam is not None else () for lam in labels)
        if not elem.is_zero():
            out[key] = elem
    return out


def straighten_pair(f, pos):
    """Express f over the merge of blocks (pos, pos+1): {lam_in_box: coeff
    SymElem over the merged ambient}."""
    amb = f.ambient
    a, b = amb.sizes[pos], amb.sizes[pos + 1]
    merged = Ambient(
        amb.sizes[:pos] + (a + b,) + amb.sizes[pos + 2:], amb.level
    )
    out = {}
    for key, c in f.terms.items():
        lam, mu = key[pos], key[pos + 1]
        spect = key[:pos] + key[pos + 2:]
        for nu, coeffs in _straighten_basis(a, b, amb.level, lam, mu).items():
            for sig, q in coeffs.items():
                mkey = spect[:pos] + (sig,) + spect[pos:]
                if not merged.valid_key(mkey):
                    continue
                tgt = out.setdefault(nu, SymElem(merged))
                out[nu] = tgt + SymElem(merged, {mkey: c * q})
    return {nu: e for nu, e in out.items() if not e.is_zero()}


@cache
def _pair_matrix(a, b, level, d):
    """Linear system for the (a,b) merge at pair-degree d: columns indexed by
    (nu in a x b box, sigma coarse partition), rows by fine keys (lam, mu)."""
    pair = Ambient((a, b), level)
    coarse = Ambient((a + b,), level)
    cols = []
    for nu_n in range(min(a * b, d // 2) + 1):
        for nu in partitions_in_box(nu_n, a, b):
            for sig in partitions_in_box(d // 2 - nu_n, *coarse.box(0)):
                cols.append((nu, sig))
    rows = [k for k in pair.graded_keys(d)]
    row_index = {k: i for i, k in enumerate(rows)}
    m = linalg.zeros(len(rows), len(cols))
    for ci, (nu, sig) in enumerate(cols):
        # s_nu(x) * s_sig(x|y) expanded in the pair basis
        expansion = {}
        r1, c1 = pair.box(0)
        r2, c2 = pair.box(1)
        for (p, q), cpq in schur_coproduct(sig, r1, c1, r2, c2).items():
            for lam, m2 in schur_mult(nu, p, r1, c1).items():
                kk = (lam, q)
                expansion[kk] = expansion.get(kk, 0) + cpq * m2
        for kk, val in expansion.items():
            if kk in row_index:
                m[row_index[kk]][ci] += Fraction(val)
    return rows, cols, linalg.Solver(m)


@cache
def _straighten_basis(a, b, level, lam, mu):
    """Expansion of s_lam(x) s_mu(y) over the (a,b)->(a+b) free basis:
    {nu: {sigma: Fraction}}."""
    d = 2 * (size(lam) + size(mu))
    rows, cols, solver = _pair_matrix(a, b, level, d)
    rhs = [Fraction(0)] * len(rows)
    idx = rows.index((lam, mu))
    rhs[idx] = Fraction(1)
    x = solver.solve(rhs)
    assert x is not None, "free-module straightening must be solvable"
    out = {}
    for ci, (nu, sig) in enumerate(cols):
        if x[ci]:
            out.setdefault(nu, {})[sig] = x[ci]
    return out


def free_basis(fine_sizes, coarse_sizes, level=None):
    """Spec-level helper: basis of A_fine over A_coarse for a block merge.

    Returns [(label key, degree)].  coarse must be a merge of fine.
    """
    groups = _merge_groups(fine_sizes, coarse_sizes)
    ctx = MergeContext(Ambient(tuple(fine_sizes), level), groups)
    return ctx.free_basis()


def schur_expand(f, coarse_sizes):
    """Spec-level helper: express f in A_fine over A_coarse."""
    groups = _merge_groups(f.ambient.sizes, coarse_sizes)
    ctx = MergeContext(f.ambient, groups)
    return ctx.express(f)


def _merge_groups(fine_sizes, coarse_sizes):
    groups = []
    i = 0
    for g, c in enumerate(coarse_sizes):
        j, acc = i, 0
        while acc < c:
            if j >= len(fine_sizes):
                raise ValueError("coarse is not a merge of fine")
            acc += fine_sizes[j]
            j += 1
        if acc != c:
            raise ValueError("coarse is not a merge of fine")
        # attach trailing zero-size fine blocks when no later coarse block is
        # zero-sized (zero blocks are Sym_0 = Q, so the attachment is neutral)
        rest_has_zero = any(cc == 0 for cc in coarse_sizes[g + 1:])
        while (
            j < len(fine_sizes)
            and fine_sizes[j] == 0
            and (not rest_has_zero)
            and len(fine_sizes) - j - 1 >= len(coarse_sizes) - g - 1
        ):
            j += 1
        if c == 0 and j == i:
            # a zero coarse block must consume one zero fine block
            if j < len(fine_sizes) and fine_sizes[j] == 0:
                j += 1
            else:
                raise ValueError("coarse is not a merge of fine")
        groups.append((i, j))
        i = j
    if i != len(fine_sizes):
        raise ValueError("coarse is not a merge of fine")
    return groups


def rho_eps_expansion(lam):
    """Schur function as a signed sum of eps-monomials (dual Jacobi-Trudi);
    used to evaluate right actions multiplicatively from generator matrices."""
    return schur_to_eps(lam)
