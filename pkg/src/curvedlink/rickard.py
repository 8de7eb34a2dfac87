"""Curved Rickard complexes, braid factorizations, connectors and clasps.

For a color i at weight w with lam = w_{i+1} - w_i, the complex tau has terms
E^(t + max(-lam,0)) F^(t + max(lam,0)) 1_w <t> in homological degree t (the
leftmost term in degree zero), differential d+ (with its (-1)^(lam+1) sign),
and deformation c u d- back; tau' mirrors it with d- as differential, terms
in degrees -t with <-t>, and c u d+ back.  Both are (B_{s_i(y)}, B_y)-
factorizations when c = -y_i + y_{i+1}, which build_factorization verifies
exactly.  Weight truncation makes every complex finite.

Braid words: letters are nonzero integers, sigma_j > 0 maps to the
hat-normalized tau'_j (positive crossings sit in nonpositive homological
degrees, matching the Hopf example), sigma_j^{-1} to hat tau_j; colors and
deformation values thread through the permutation action.  Clasps are
truncated powers of the full twist with a stability report, never a claimed
limit.
"""

from fractions import Fraction

from .bimodule import BimoduleMap, GradedBimodule, SMat, tensor_compose
from .curved import (
    CurvedComplex,
    CurvedMap,
    identity_factorization,
    reduce_left_profile,
    simplify,
    tensor_curved,
)
from .flagrep import (
    d_minus,
    d_plus,
    deform_elem,
    generator_bimodule,
    lam_of,
    reflect_weight,
    weight_ok,
    weight_shift,
)
from .symfunc import Ambient


class BraidWord:
    def __init__(self, strands, letters):
        self.strands = int(strands)
        self.letters = tuple(int(x) for x in letters)
        for x in self.letters:
            if x == 0 or abs(x) >= self.strands:
                raise ValueError(f"letter {x} out of range for {self.strands} strands")

    @staticmethod
    def parse(text, strands=None):
        letters = tuple(int(tok) for tok in text.split())
        if strands is None:
            strands = max((abs(x) for x in letters), default=0) + 1
        return BraidWord(strands, letters)

    def permutation(self):
        """One-line permutation: position p at the bottom ends at perm[p]."""
        perm = list(range(self.strands))
        for x in self.letters:
            j = abs(x) - 1
            perm[j], perm[j + 1] = perm[j + 1], perm[j]
        return tuple(perm)

    def components(self):
        """Cycles of the closure permutation, as disjoint position tuples."""
        perm = self.permutation()
        seen = [False] * self.strands
        out = []
        for p in range(self.strands):
            if seen[p]:
                continue
            cyc = []
            q = p
            while not seen[q]:
                seen[q] = True
                cyc.append(q)
                q = perm[q]
            out.append(tuple(cyc))
        return out

    def __repr__(self):
        return f"BraidWord({self.strands}, {list(self.letters)})"


def _y_for_c(i, n, c):
    y = [Fraction(0)] * n
    y[i] = Fraction(c)
    return tuple(y)


def rickard_terms(i, w, level=None):
    """[(a_t, b_t, bimodule of E^(a)F^(b)1_w <t>)] for t = 0, 1, ...  until
    weight truncation (bimodule unshifted; callers add shifts)."""
    lam = lam_of(w, i)
    out = []
    t = 0
    while True:
        a, b = t + max(-lam, 0), t + max(lam, 0)
        ge = generator_bimodule("E", i, a, weight_shift(w, i, -b), level)
        gf = generator_bimodule("F", i, b, w, level)
        if ge.is_zero() or gf.is_zero():
            break
        out.append((a, b, tensor_compose(ge, gf)))
        t += 1
    return out


def rickard_complex(i, w, c=0, variant="tau", level=None, y=None):
    """The (curved) Rickard complex tau_{i,c} or tau'_{i,c} at weight w.

    y (optional): full deformation vector with -y_i + y_{i+1} = c; used for
    the declared curvature.  Validated exactly via Delta^2 = (z_B - z_A) u.
    """
    w = tuple(w)
    if not weight_ok(w, level):
        return CurvedComplex((), {}, None, None, validate=False)
    if y is None:
        y = _y_for_c(i, len(w), c)
    else:
        y = tuple(Fraction(v) for v in y)
        assert -y[i - 1] + y[i] == Fraction(c), "y does not realize c"
    raw = rickard_terms(i, w, level)
    sw = reflect_weight(w, i)
    sy = list(y)
    sy[i - 1], sy[i] = sy[i], sy[i - 1]
    z_right = deform_elem(y, w, level)
    z_left = deform_elem(sy, sw, level)
    terms = []
    conn = {}
    sign = -1 if variant == "tau" else 1
    for t, (a, b, bim) in enumerate(raw):
        if variant == "tau":
            terms.append((bim.shifted(t), t))
        else:
            terms.append((bim.shifted(-t), -t))
    for t in range(len(raw) - 1):
        a, b, _ = raw[t]
        up = d_plus(i, w, a, b, level)
        dn = d_minus(i, w, a + 1, b + 1, level)
        if variant == "tau":
            # d+ is the u^0 differential, c u d- the deformation
            if not up.is_zero():
                conn[(t + 1, t)] = {0: BimoduleMap(terms[t][0], terms[t + 1][0], 0, up.mat)}
            if c and not dn.is_zero():
                conn[(t, t + 1)] = {1: BimoduleMap(terms[t + 1][0], terms[t][0], 2, dn.mat).scale(c)}
        else:
            if not dn.is_zero():
                conn[(t, t + 1)] = {0: BimoduleMap(terms[t + 1][0], terms[t][0], 0, dn.mat)}
            if c and not up.is_zero():
                conn[(t + 1, t)] = {1: BimoduleMap(terms[t][0], terms[t + 1][0], 2, up.mat).scale(c)}
    return CurvedComplex(tuple(terms), conn, z_left, z_right, validate=True)


def hat_shifts(i, w):
    """(hom, internal) shift of the hat normalization of tau_i at w."""
    ki, kj = w[i - 1], w[i]
    if lam_of(w, i) <= 0:
        return (-kj, kj + ki * kj)
    return (-ki, ki + ki * kj)


def hat_normalize(cplx, i, w, variant="tau"):
    """Apply the hat shifts (negated for tau')."""
    hom, internal = hat_shifts(i, w)
    if variant != "tau":
        hom, internal = -hom, -internal
    return cplx.shift(hom=hom, internal=internal)


def crossing_complex(letter, w, y, level=None, hat=True):
    """The curved complex of one braid letter at (weight, deformation) state."""
    j = abs(letter)
    c = -y[j - 1] + y[j]
    variant = "tauprime" if letter > 0 else "tau"
    cx = rickard_complex(j, w, c, variant, level, y=y)
    if hat:
        cx = hat_normalize(cx, j, w, variant)
    return cx


def braid_factorization(braid, colors, y, level=None, hat=True, reduce_steps=False):
    """Left-to-right curved tensor of the hat-normalized crossing complexes,
    threading weights and deformation values; a (B_{beta(y)}, B_y)-
    factorization (positive letters are tau'-flavored).
    """
    colors = tuple(colors)
    assert braid.strands == len(colors)
    y = tuple(Fraction(v) for v in y)
    w = colors
    yv = list(y)
    comp = identity_factorization(Ambient(w, level), deform_elem(yv, w, level))
    for letter in braid.letters:
        j = abs(letter)
        cx = crossing_complex(letter, w, tuple(yv), level, hat)
        comp = tensor_curved(cx, comp)
        if reduce_steps:
            comp = simplify(comp)
        w = reflect_weight(w, j)
        yv[j - 1], yv[j] = yv[j], yv[j - 1]
    comp.validate()
    return comp


def eta_connector(i, w, c, level=None):
    """The connector tau_{i,c} -> tau'_{i,c} with components (c u)^k."""
    w = tuple(w)
    tau = rickard_complex(i, w, c, "tau", level)
    taup = rickard_complex(i, w, c, "tauprime", level)
    comps = {}
    coeff = Fraction(1)
    for k in range(len(tau.terms)):
        bim_s = tau.terms[k][0]
        bim_t = taup.terms[k][0]
        m = SMat.identity(bim_s.rank(), bim_s.left).scale(coeff)
        comps[(k, k)] = {k: BimoduleMap(bim_s, bim_t, 2 * k, m)}
        coeff *= Fraction(c)
        if coeff == 0 and k + 1 < len(tau.terms):
            break
    return CurvedMap(tau, taup, comps, validate=True)


def full_twist_word(strands):
    letters = []
    for top in range(strands - 1, 0, -1):
        letters.extend(range(1, top + 1))
    return BraidWord(strands, letters)


def clasp_truncate(colors, levels, level=None, y=None):
    """Truncated clasps (tau'_omega)^{2 l} for l in `levels`: returns
    {l: (complex-or-None, profile)} plus a stability report between
    consecutive levels.  profile: {hom: sorted tuple of internal degrees} of
    the reduced complex as a left-module complex.
    """
    colors = tuple(colors)
    s = len(colors)
    if y is None:
        y = (0,) * s
    if s == 1:
        prof = {0: (0,)}
        return {l: prof for l in levels}, []
    ft = full_twist_word(s)
    out = {}
    reports = []
    for l in sorted(levels):
        word = BraidWord(s, ft.letters * (2 * l))
        comp = braid_factorization(word, colors, y, level, hat=True, reduce_steps=True)
        comp = simplify(comp)
        out[l] = reduce_left_profile(comp)
    ls = sorted(levels)
    for a, b in zip(ls, ls[1:]):
        reports.append((a, b, stability_bound(out[a], out[b])))
    return out, reports


def stability_bound(prof_a, prof_b):
    """Largest homological degree at which the two profiles differ (the
    instability bound); None when identical."""
    hs = set(prof_a) | set(prof_b)
    diffs = [h for h in hs if prof_a.get(h) != prof_b.get(h)]
    return max(diffs) if diffs else None
