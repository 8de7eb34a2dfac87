"""Graded bimodules presented as free left modules with right-action matrices.

A `GradedBimodule` over (A_left, A_right) is a finite free left A_left-module
with a labeled homogeneous basis plus one matrix over A_left per elementary
generator of A_right, the matrices pairwise commuting.  A `BimoduleMap` is a
homogeneous matrix over A_left commuting with the right actions.  Composition
of 1-morphisms is `tensor_compose`; 2-morphism spaces are computed by exact
degreewise linear solves (`hom_basis`), and idempotents split by a minimal-
degree generator search (`split_idempotent`).

Degree bookkeeping: a map entry at (row u, col t) is homogeneous of degree
map.degree + deg(source_t) - deg(target_u), with grading shifts folded into
the basis degrees (shifting by <s> lowers every basis degree by s).
"""

from fractions import Fraction

from . import linalg
from .symfunc import Ambient, SymElem, key_degree, rho_eps_expansion


class SMat:
    """Sparse matrix with SymElem entries (all over one ambient)."""

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows, ncols, entries=None):
        self.nrows = nrows
        self.ncols = ncols
        self.entries = {}
        if entries:
            for k, v in entries.items():
                if not v.is_zero():
                    self.entries[k] = v

    @staticmethod
    def zero(nrows, ncols):
        return SMat(nrows, ncols)

    @staticmethod
    def identity(n, ambient):
        one = SymElem.one(ambient)
        return SMat(n, n, {(i, i): one for i in range(n)})

    @staticmethod
    def scalar(n, f):
        return SMat(n, n, {(i, i): f for i in range(n)})

    def get(self, i, j):
        return self.entries.get((i, j))

    def __add__(self, other):
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        out = dict(self.entries)
        for k, v in other.entries.items():
            w = out.get(k)
            s = v if w is None else w + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return SMat(self.nrows, self.ncols, out)

    def __neg__(self):
        return SMat(self.nrows, self.ncols, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return SMat(self.nrows, self.ncols, {k: v.scale(c) for k, v in self.entries.items()})

    def __mul__(self, other):
        """Matrix product self @ other."""
        assert self.ncols == other.nrows, "shape mismatch"
        by_row = {}
        for (i, k), v in self.entries.items():
            by_row.setdefault(i, []).append((k, v))
        by_col = {}
        for (k, j), v in other.entries.items():
            by_col.setdefault(j, {})[k] = v
        out = {}
        for i, row in by_row.items():
            for j, col in by_col.items():
                acc = None
                for k, v in row:
                    w = col.get(k)
                    if w is not None:
                        p = v * w
                        acc = p if acc is None else acc + p
                if acc is not None and not acc.is_zero():
                    out[(i, j)] = acc
        return SMat(self.nrows, other.ncols, out)

    def scalar_mult(self, f):
        """Entrywise multiply by a SymElem (left-module scaling)."""
        return SMat(self.nrows, self.ncols, {k: f * v for k, v in self.entries.items()})

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (
            isinstance(other, SMat)
            and (self.nrows, self.ncols) == (other.nrows, other.ncols)
            and self.entries == other.entries
        )

    def transpose_pattern(self):
        return {(j, i) for (i, j) in self.entries}

    def submatrix(self, rows, cols):
        ri = {r: i for i, r in enumerate(rows)}
        ci = {c: j for j, c in enumerate(cols)}
        out = {}
        for (i, j), v in self.entries.items():
            if i in ri and j in ci:
                out[(ri[i], ci[j])] = v
        return SMat(len(rows), len(cols), out)


class GradedBimodule:
    """Free left module with commuting right-action matrices.

    basis: tuple of (label, degree); right_action: {(block, r): SMat}.
    A zero bimodule has empty basis (left/right ambients kept for weights).
    """

    __slots__ = ("left", "right", "basis", "right_action", "_rho_cache")

    def __init__(self, left, right, basis, right_action, validate=True):
        self.left = left
        self.right = right
        self.basis = tuple(basis)
        self.right_action = right_action
        self._rho_cache = {}
        if validate:
            self.validate()

    @staticmethod
    def zero(left, right):
        return GradedBimodule(left, right, (), {}, validate=False)

    @staticmethod
    def identity(ambient, shift=0):
        # the empty basis label makes tensoring with the identity strictly
        # neutral (labels concatenate)
        act = {}
        for (j, r) in ambient.generators():
            act[(j, r)] = SMat(1, 1, {(0, 0): SymElem.eps(ambient, j, r)})
        return GradedBimodule(ambient, ambient, (((), -shift),), act, validate=False)

    def is_zero(self):
        return len(self.basis) == 0

    def rank(self):
        return len(self.basis)

    def degrees(self):
        return tuple(d for _, d in self.basis)

    def graded_rank(self):
        out = {}
        for _, d in self.basis:
            out[d] = out.get(d, 0) + 1
        return out

    def validate(self):
        if self.is_zero():
            return
        gens = set(self.right.generators())
        assert set(self.right_action) == gens, "right action must cover all generators"
        n = len(self.basis)
        for (j, r), m in self.right_action.items():
            assert (m.nrows, m.ncols) == (n, n), "action matrix shape"
            for (u, t), v in m.entries.items():
                want = 2 * r + self.basis[t][1] - self.basis[u][1]
                assert v.ambient == self.left
                assert v.is_homogeneous() and (v.is_zero() or v.degree() == want), (
                    f"inhomogeneous right action entry at {(u, t)}"
                )
        items = sorted(self.right_action.items())
        for a in range(len(items)):
            for b in range(a + 1, len(items)):
                ma, mb = items[a][1], items[b][1]
                assert ma * mb == mb * ma, (
                    f"right actions do not commute: {items[a][0]} vs {items[b][0]}"
                )

    def rho(self, f):
        """Matrix of the right action of an arbitrary f in A_right."""
        n = len(self.basis)
        out = SMat(n, n)
        for key, c in f.terms.items():
            m = self._rho_key(key)
            out = out + m.scale(c)
        return out

    def _rho_key(self, key):
        got = self._rho_cache.get(key)
        if got is not None:
            return got
        n = len(self.basis)
        m = SMat.identity(n, self.left)
        for j, lam in enumerate(key):
            if lam:
                m = m * self._rho_block_schur(j, lam)
        self._rho_cache[key] = m
        return m

    def _rho_block_schur(self, j, lam):
        ck = ("schur", j, lam)
        got = self._rho_cache.get(ck)
        if got is not None:
            return got
        n = len(self.basis)
        size = self.right.sizes[j]
        acc = SMat(n, n)
        for eps_idx, sgn in rho_eps_expansion(lam).items():
            if any(r > size for r in eps_idx):
                continue  # eps_r = 0 beyond the block size
            m = SMat.identity(n, self.left)
            for r in eps_idx:
                m = m * self.right_action[(j, r)]
            acc = acc + m.scale(sgn)
        self._rho_cache[ck] = acc
        return acc

    def shifted(self, s):
        """Internal shift <s>: lowers all basis degrees by s."""
        if s == 0 or self.is_zero():
            return self
        return GradedBimodule(
            self.left,
            self.right,
            tuple((lab, d - s) for lab, d in self.basis),
            self.right_action,
            validate=False,
        )

    def __repr__(self):
        if self.is_zero():
            return f"ZeroBimod({self.left}|{self.right})"
        return f"Bimod({self.left}|{self.right}, rank {self.rank()})"


def make_bimodule(left, right, basis, right_action):
    """Validated constructor (commutativity and homogeneity checked)."""
    return GradedBimodule(left, right, basis, right_action, validate=True)


def tensor_compose(m, n):
    """Composite 1-morphism M after N: M tensor_{A_mid} N.

    Basis labels concatenate, so the operation is strictly associative.
    """
    if m.is_zero() or n.is_zero():
        return GradedBimodule.zero(m.left, n.right)
    assert m.right == n.left, f"weight mismatch: {m.right} vs {n.left}"
    basis = []
    for ml, md in m.basis:
        for nl, nd in n.basis:
            basis.append((ml + nl, md + nd))
    nm, nn = len(m.basis), len(n.basis)

    def pos(s, t):
        return s * nn + t

    action = {}
    for (j, r) in n.right.generators():
        src = n.right_action[(j, r)]
        out = {}
        for (v, t), coeff in src.entries.items():
            block = m.rho(coeff)  # matrix over m.left
            for (u, s), val in block.entries.items():
                k = (pos(u, v), pos(s, t))
                w = out.get(k)
                tot = val if w is None else w + val
                if tot.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = tot
        action[(j, r)] = SMat(len(basis), len(basis), out)
    return GradedBimodule(m.left, n.right, basis, action, validate=False)


class BimoduleMap:
    __slots__ = ("source", "target", "degree", "mat")

    def __init__(self, source, target, degree, mat, validate=False):
        self.source = source
        self.target = target
        self.degree = degree
        self.mat = mat
        if validate:
            self.validate()

    @staticmethod
    def zero(source, target, degree=0):
        return BimoduleMap(source, target, degree, SMat(target.rank(), source.rank()))

    @staticmethod
    def identity(m):
        return BimoduleMap(m, m, 0, SMat.identity(m.rank(), m.left))

    def validate(self):
        assert self.source.left == self.target.left
        assert self.source.right == self.target.right
        for (u, t), v in self.mat.entries.items():
            want = self.degree + self.source.basis[t][1] - self.target.basis[u][1]
            assert v.is_homogeneous() and (v.is_zero() or v.degree() == want), (
                f"map entry degree at {(u, t)}: got {v.degrees()}, want {want}"
            )
        for g in self.source.right.generators():
            lhs = self.mat * self.source.right_action[g]
            rhs = self.target.right_action[g] * self.mat
            assert lhs == rhs, f"map does not intertwine right action {g}"

    def is_zero(self):
        return self.mat.is_zero()

    def __add__(self, other):
        assert self.source is other.source or self.source.basis == other.source.basis
        assert self.degree == other.degree
        return BimoduleMap(self.source, self.target, self.degree, self.mat + other.mat)

    def __neg__(self):
        return BimoduleMap(self.source, self.target, self.degree, -self.mat)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return BimoduleMap(self.source, self.target, self.degree, self.mat.scale(c))

    def compose(self, other):
        """self after other."""
        return BimoduleMap(
            other.source, self.target, self.degree + other.degree, self.mat * other.mat
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self.compose(other)

    def __eq__(self, other):
        return (
            isinstance(other, BimoduleMap)
            and self.source.basis == other.source.basis
            and self.target.basis == other.target.basis
            and self.mat == other.mat
        )

    def whisker_left(self, m):
        """Id_M tensor self: M N_src -> M N_tgt."""
        src = tensor_compose(m, self.source)
        tgt = tensor_compose(m, self.target)
        out = {}
        ntgt = self.target.rank()
        nsrc = self.source.rank()
        for (v, t), coeff in self.mat.entries.items():
            block = m.rho(coeff)
            for (u, s), val in block.entries.items():
                k = (u * ntgt + v, s * nsrc + t)
                w = out.get(k)
                tot = val if w is None else w + val
                if not tot.is_zero():
                    out[k] = tot
                else:
                    out.pop(k, None)
        return BimoduleMap(src, tgt, self.degree, SMat(tgt.rank(), src.rank(), out))

    def whisker_right(self, n):
        """self tensor Id_N: M_src N -> M_tgt N."""
        src = tensor_compose(self.source, n)
        tgt = tensor_compose(self.target, n)
        nn = n.rank()
        out = {}
        for (u, s), val in self.mat.entries.items():
            for t in range(nn):
                out[(u * nn + t, s * nn + t)] = val
        return BimoduleMap(src, tgt, self.degree, SMat(tgt.rank(), src.rank(), out))

    def left_mult(self, f):
        """Post-multiply by f in A_left (scalar on the left module)."""
        return BimoduleMap(
            self.source, self.target, self.degree + f.degree(), self.mat.scalar_mult(f)
        )

    def __repr__(self):
        return f"BimoduleMap(deg {self.degree}, {self.source!r} -> {self.target!r})"


def map_algebra(f, g, kind):
    """Spec-surface dispatcher for exact map arithmetic."""
    if kind == "compose":
        return f.compose(g)
    if kind == "add":
        return f + g
    if kind == "scale":
        return f.scale(g)
    if kind == "shift":
        return BimoduleMap(f.source.shifted(g), f.target.shifted(g), f.degree, f.mat)
    raise ValueError(kind)


# -- exact degreewise Hom solving -------------------------------------------

def _entry_slots(source, target, degree):
    """For each matrix slot (u, t) the graded basis keys of its entry."""
    amb = source.left
    slots = []
    for u, (_, du) in enumerate(target.basis):
        for t, (_, dt) in enumerate(source.basis):
            d = degree + dt - du
            keys = list(amb.graded_keys(d)) if d >= 0 else []
            if keys:
                slots.append(((u, t), keys))
    return slots


def hom_basis(source, target, degree):
    """Basis of the space of degree-d bimodule maps source -> target."""
    if source.is_zero() or target.is_zero():
        return []
    assert source.left == target.left and source.right == target.right
    amb = source.left
    slots = _entry_slots(source, target, degree)
    if not slots:
        return []
    var_index = {}
    for (slot, keys) in slots:
        for k in keys:
            var_index[(slot, k)] = len(var_index)
    nvars = len(var_index)

    rows = []
    for g in source.right.generators():
        sa = source.right_action[g]
        ta = target.right_action[g]
        # constraint X sa - ta X = 0, entry (u, t)
        for u in range(target.rank()):
            for t in range(source.rank()):
                # collect linear combination: sum_s X[u,s] sa[s,t] - sum_v ta[u,v] X[v,t]
                contrib = {}
                for ((uu, ss), keys) in slots:
                    if uu != u:
                        continue
                    c = sa.get(ss, t)
                    if c is None:
                        continue
                    for k in keys:
                        base = SymElem(amb, {k: 1})
                        prod = base * c
                        for pk, pv in prod.terms.items():
                            contrib.setdefault(pk, {})[var_index[((uu, ss), k)]] = (
                                contrib.setdefault(pk, {}).get(var_index[((uu, ss), k)], 0) + pv
                            )
                for ((vv, tt), keys) in slots:
                    if tt != t:
                        continue
                    c = ta.get(u, vv)
                    if c is None:
                        continue
                    for k in keys:
                        base = SymElem(amb, {k: 1})
                        prod = c * base
                        for pk, pv in prod.terms.items():
                            d = contrib.setdefault(pk, {})
                            d[var_index[((vv, tt), k)]] = d.get(var_index[((vv, tt), k)], 0) - pv
                for pk, coeffs in contrib.items():
                    row = [Fraction(0)] * nvars
                    nonzero = False
                    for vi, cv in coeffs.items():
                        if cv:
                            row[vi] = Fraction(cv)
                            nonzero = True
                    if nonzero:
                        rows.append(row)
    if not rows:
        basis_vectors = [
            [Fraction(1) if i == j else Fraction(0) for j in range(nvars)]
            for i in range(nvars)
        ]
    else:
        basis_vectors = linalg.nullspace(rows)
    out = []
    for vec in basis_vectors:
        entries = {}
        for ((slot, k), vi) in var_index.items():
            if vec[vi]:
                cur = entries.get(slot)
                add = SymElem(amb, {k: vec[vi]})
                entries[slot] = add if cur is None else cur + add
        out.append(
            BimoduleMap(source, target, degree, SMat(target.rank(), source.rank(), entries))
        )
    return out


def solve_map_equations(source, target, degree, equations):
    """Solve simultaneous affine equations for a map-shaped unknown X.

    equations: list of (pairs, rhs) where pairs is a list of (L, R) SMat
    sandwiches (None = identity) contributing sum_i L_i X R_i, and rhs is the
    corresponding SMat.  Degreewise exact.  Returns a BimoduleMap or None.
    """
    amb = source.left
    slots = _entry_slots(source, target, degree)
    var_index = {}
    for (slot, keys) in slots:
        for k in keys:
            var_index[(slot, k)] = len(var_index)
    nvars = len(var_index)

    a_rows = []
    b_vals = []
    for eqno, (pairs, rhs) in enumerate(equations):
        eq_rows = {}

        def add_contrib(eqkey, var, coeff):
            row = eq_rows.setdefault(eqkey, {})
            row[var] = row.get(var, Fraction(0)) + coeff

        for (L, R) in pairs:
            for ((s_u, s_t), keys) in slots:
                for k in keys:
                    var = var_index[((s_u, s_t), k)]
                    base = SymElem(amb, {k: 1})
                    li = [(s_u, None)] if L is None else [
                        (i, L.get(i, s_u)) for i in range(L.nrows) if L.get(i, s_u) is not None
                    ]
                    rj = [(s_t, None)] if R is None else [
                        (j, R.get(s_t, j)) for j in range(R.ncols) if R.get(s_t, j) is not None
                    ]
                    for (i, lv) in li:
                        for (j, rv) in rj:
                            prod = base
                            if lv is not None:
                                prod = lv * prod
                            if rv is not None:
                                prod = prod * rv
                            for pk, pv in prod.terms.items():
                                add_contrib((i, j, pk), var, pv)
        rhs_map = {}
        for (i, j), v in rhs.entries.items():
            for pk, pv in v.terms.items():
                rhs_map[(i, j, pk)] = rhs_map.get((i, j, pk), Fraction(0)) + pv
        for ek in sorted(set(eq_rows) | set(rhs_map)):
            row = [Fraction(0)] * nvars
            for var, c in eq_rows.get(ek, {}).items():
                row[var] = Fraction(c)
            a_rows.append(row)
            b_vals.append(Fraction(rhs_map.get(ek, 0)))

    if nvars == 0:
        if any(b_vals):
            return None
        return BimoduleMap(source, target, degree, SMat(target.rank(), source.rank()))
    x = linalg.solve(a_rows, b_vals)
    if x is None:
        return None
    entries = {}
    for ((slot, k), vi) in var_index.items():
        if x[vi]:
            cur = entries.get(slot)
            add = SymElem(amb, {k: x[vi]})
            entries[slot] = add if cur is None else cur + add
    return BimoduleMap(source, target, degree, SMat(target.rank(), source.rank(), entries))


# -- idempotent splitting ----------------------------------------------------

def split_idempotent(e):
    """Split a degree-0 idempotent: returns (image, incl, proj).

    The image of an idempotent on a graded free module over a connected
    graded polynomial ring is free; generators are found in minimal degrees.
    """
    m = e.source
    assert e.degree == 0
    assert (e * e).mat == e.mat, "not an idempotent"
    amb = m.left
    if e.is_zero():
        z = GradedBimodule.zero(m.left, m.right)
        return z, BimoduleMap(z, m, 0, SMat(m.rank(), 0)), BimoduleMap(m, z, 0, SMat(0, m.rank()))

    degs = sorted({d for _, d in m.basis})
    dmin, dmax = degs[0], degs[-1]
    # generator candidates: image of e in each degree, modulo A_+ * (earlier gens)
    gens = []  # list of (degree, column vector over basis as dict row->SymElem)
    for d in range(dmin, dmax + 1):
        # Q-basis of degree-d elements of M: (basis index t, monomial key of deg d - deg_t)
        slots = []
        for t, (_, dt) in enumerate(m.basis):
            dd = d - dt
            if dd >= 0:
                for k in amb.graded_keys(dd):
                    slots.append((t, k))
        if not slots:
            continue
        slot_index = {s: i for i, s in enumerate(slots)}

        def vec_of(colmap):
            v = [Fraction(0)] * len(slots)
            for t, f in colmap.items():
                for k, c in f.terms.items():
                    v[slot_index[(t, k)]] += c
            return v

        cols = []
        # e applied to every degree-d element
        for (t, k) in slots:
            colmap = {}
            for u in range(m.rank()):
                v = e.mat.get(u, t)
                if v is not None:
                    prod = SymElem(amb, {k: 1}) * v
                    if not prod.is_zero():
                        colmap[u] = prod
            cols.append(vec_of(colmap))
        # span of A_+ * gens in degree d
        for (gd, gcol) in gens:
            for k in amb.graded_keys(d - gd):
                if key_degree(k) == 0:
                    continue
                colmap = {}
                for u, f in gcol.items():
                    colmap[u] = SymElem(amb, {k: 1}) * f
                cols.append(vec_of(colmap))
        n_im = linalg.rank([list(r) for r in zip(*cols)]) if cols else 0
        old_cols = cols[len(slots):]
        n_old = linalg.rank([list(r) for r in zip(*old_cols)]) if old_cols else 0
        if n_im == n_old:
            continue
        # choose new generator columns extending the old span
        matrix_cols = old_cols[:]
        chosen = []
        for ci in range(len(slots)):
            cand = matrix_cols + [cols[ci]]
            if linalg.rank([list(r) for r in zip(*cand)]) > linalg.rank(
                [list(r) for r in zip(*matrix_cols)] if matrix_cols else [[Fraction(0)] * 0]
            ):
                matrix_cols.append(cols[ci])
                chosen.append(ci)
                if len(matrix_cols) - len(old_cols) == n_im - n_old:
                    break
        for ci in chosen:
            (t, k) = slots[ci]
            colmap = {}
            for u in range(m.rank()):
                v = e.mat.get(u, t)
                if v is not None:
                    prod = SymElem(amb, {k: 1}) * v
                    if not prod.is_zero():
                        colmap[u] = prod
            gens.append((d, colmap))

    img_basis = tuple(((f"e{idx}",), gd) for idx, (gd, _) in enumerate(gens))
    incl_entries = {}
    for idx, (gd, gcol) in enumerate(gens):
        for u, f in gcol.items():
            incl_entries[(u, idx)] = f
    img_stub = GradedBimodule(m.left, m.right, img_basis, {}, validate=False)
    incl_mat = SMat(m.rank(), len(gens), incl_entries)

    # projection: solve incl . proj_cols = e columns (then proj is forced)
    proj = _solve_through(incl_mat, img_basis, e.mat, m, amb)
    proj_mat = proj
    # right action on the image: proj . rho . incl
    action = {}
    for g in m.right.generators():
        action[g] = proj_mat * (m.right_action[g] * incl_mat)
    img = GradedBimodule(m.left, m.right, img_basis, action, validate=False)
    incl = BimoduleMap(img, m, 0, incl_mat)
    projm = BimoduleMap(m, img, 0, proj_mat)
    assert (incl.mat * projm.mat) == e.mat, "idempotent split: iota pi = e failed"
    assert (projm.mat * incl.mat) == SMat.identity(len(gens), amb), "pi iota = id failed"
    return img, incl, projm


def _solve_through(incl_mat, img_basis, target_mat, m, amb):
    """Solve incl . X = target_mat column by column, degreewise."""
    out = {}
    for t in range(m.rank()):
        dt = m.basis[t][1]
        # column t of target
        col = {u: target_mat.get(u, t) for u in range(m.rank()) if target_mat.get(u, t) is not None}
        # unknowns: X[idx, t] of degree dt - deg(img_basis[idx])
        slots = []
        for idx, (_, gd) in enumerate(img_basis):
            dd = dt - gd
            if dd >= 0:
                for k in amb.graded_keys(dd):
                    slots.append((idx, k))
        # equations over rows u and monomials
        eq = {}
        for si, (idx, k) in enumerate(slots):
            for u in range(m.rank()):
                v = incl_mat.get(u, idx)
                if v is None:
                    continue
                prod = SymElem(amb, {k: 1}) * v
                for pk, pv in prod.terms.items():
                    eq.setdefault((u, pk), {})[si] = eq.setdefault((u, pk), {}).get(si, Fraction(0)) + pv
        rhs = {}
        for u, f in col.items():
            for pk, pv in f.terms.items():
                rhs[(u, pk)] = pv
        keys = sorted(set(eq) | set(rhs))
        a = [[Fraction(eq.get(kk, {}).get(si, 0)) for si in range(len(slots))] for kk in keys]
        b = [Fraction(rhs.get(kk, 0)) for kk in keys]
        if not slots:
            assert not any(b), "projection solve failed"
            continue
        x = linalg.solve(a, b)
        assert x is not None, "projection solve failed"
        for si, (idx, k) in enumerate(slots):
            if x[si]:
                cur = out.get((idx, t))
                add = SymElem(amb, {k: x[si]})
                out[(idx, t)] = add if cur is None else cur + add
    return SMat(len(img_basis), m.rank(), out)
