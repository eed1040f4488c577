"""Bigraded left A(n)-modules that are free over the coefficient ring.

A module has an ordered list of H-basis generators, each with a label and a
cohomological bidegree, and an action table giving every algebra generator
(beta and the powers P^{l^j}, j < n) on every basis generator.  The action of
an arbitrary Milnor symbol is obtained by writing it as a word in the
algebra generators (solved once per algebra and cached) and applying the
table along the word.  Coefficients are moved past operations with the
Milnor algebra's move_h, so the real profile is handled as well.

Module elements are dicts {(a, b, i): c} meaning c * rho^a tau^b * gen_i.
"""

from __future__ import annotations

import json

from .arith import binom_mod
from .coeff import HElement, Profile, format_h
from .dualalg import ONE, An
from .hopf import top_degree
from .ops import MilnorElement, _acc, _solve_in, milnor_algebra

BETA = (1, ())


def p_gen(p, j):
    """Milnor monomial of P^{l^j}."""
    return (0, (p ** j,))


def algebra_generators(profile, n):
    """beta, P^1, P^l, ..., P^{l^(n-1)} as Milnor monomials of A(n)."""
    return [BETA] + [p_gen(profile.prime, j) for j in range(n)]


# ---------------------------------------------------------------------------
# words: each Milnor symbol of A(n) as a combination of h * g * h' * rho_y
# ---------------------------------------------------------------------------

_WORDS = {}


def words(profile, n):
    key = (profile, n)
    w = _WORDS.get(key)
    if w is None:
        w = _WORDS[key] = Words(profile, n)
    return w


class Words:
    """Cached expressions of Milnor symbols through the algebra generators."""

    def __init__(self, profile: Profile, n: int):
        self.profile = profile
        self.n = n
        self.env = milnor_algebra(profile, An(n))
        self.gens = algebra_generators(profile, n)
        self.gen_set = set(self.gens)
        self._expr = {}

    def expression(self, x):
        """List of (c, (a1, b1), g, (a2, b2), y) with rho_x = sum c h1 g h2 rho_y."""
        e = self._expr.get(x)
        if e is not None:
            return e
        env, prof = self.env, self.profile
        dx, wx = env.degree(x)
        cands = []
        for g in self.gens:
            dg, wg = env.degree(g)
            for dy in range(0, dx - dg + 1):
                for y in env.dual.monomials_at(dy):
                    wy = env.degree(y)[1]
                    asum = dx - dg - dy
                    bsum = wx - wg - wy - asum
                    if bsum < 0:
                        continue
                    for a1 in range(asum + 1):
                        for b1 in range(bsum + 1):
                            h1, h2 = (a1, b1), (asum - a1, bsum - b1)
                            if not (prof.allowed(*h1) and prof.allowed(*h2)):
                                continue
                            img = env.mul({(h1[0], h1[1], g): 1}, {(h2[0], h2[1], y): 1})
                            if img:
                                cands.append(((h1, g, h2, y), img))
        # simplest candidates first, so solutions prefer bare words
        cands.sort(key=lambda t: (t[0][0] != (0, 0) or t[0][2] != (0, 0)))
        combo, _, _ = _solve_in(env, dx, wx, cands, {(0, 0, x): 1})
        if combo is None:
            raise ArithmeticError("symbol %r is not generated in A(%d)" % (x, self.n))
        e = [(c, cands[t][0][0], cands[t][0][1], cands[t][0][2], cands[t][0][3])
             for t, c in sorted(combo.items())]
        self._expr[x] = e
        return e

    def all_symbols(self):
        return self.env.dual.monomials_upto(top_degree(self.env.dual))


# ---------------------------------------------------------------------------
# modules
# ---------------------------------------------------------------------------

def _hscale(profile, a, b, c, elt, out):
    p = profile.prime
    for (a2, b2, j), c2 in elt.items():
        if profile.allowed(a + a2, b + b2):
            _acc(out, (a + a2, b + b2, j), c * c2, p)


class FPModule:
    """A left A(n)-module with a finite free H-basis.

    ``gens`` lists (label, (p, q)).  ``rule(e, r, label)`` returns the
    image of beta^e P^r on a generator as {(a, b, label'): c}; labels that
    are not generators are dropped, which realises band truncations.
    Alternatively ``table`` gives {(g, i): {(a, b, j): c}} directly.
    """

    def __init__(self, profile: Profile, n: int, gens, rule=None, table=None,
                 name="module", kind=None, shift=(0, 0), params=None):
        self.profile = profile
        self.n = n
        self.gens = [(lab, tuple(bd)) for lab, bd in gens]
        self.index = {lab: i for i, (lab, _) in enumerate(self.gens)}
        if len(self.index) != len(self.gens):
            raise ValueError("duplicate generator labels")
        self.rule = rule
        self.name = name
        self.kind = kind
        self.shift = tuple(shift)
        self.params = dict(params or {})
        self._table = {}
        if table is not None:
            for (g, i), img in table.items():
                self._table[(g, i)] = {k: v % profile.prime for k, v in img.items() if v % profile.prime}
        elif rule is None:
            raise ValueError("a module needs a rule or an action table")
        self._memo = {}

    def __repr__(self):
        return "FPModule(%s, %s, A(%d), %d gens)" % (self.name, self.profile, self.n, len(self.gens))

    def __len__(self):
        return len(self.gens)

    # -- bookkeeping -----------------------------------------------------------
    def degree(self, i):
        return self.gens[i][1]

    def label(self, i):
        return self.gens[i][0]

    def basis_at(self, P, Q):
        """H-basis (a, b, i) of the F_l vector space in bidegree (P, Q)."""
        prof = self.profile
        out = []
        for i, (_, (p, q)) in enumerate(self.gens):
            a = P - p
            b = Q - q - a
            if prof.allowed(a, b):
                out.append((a, b, i))
        return out

    def bidegrees(self):
        return sorted({bd for _, bd in self.gens})

    def _from_rule(self, img):
        out = {}
        p = self.profile.prime
        for (a, b, lab), c in img.items():
            j = self.index.get(lab)
            if j is not None:
                _acc(out, (a, b, j), c, p)
        return out

    def gen_action(self, g, i):
        """Image of the algebra generator g on basis generator i."""
        key = (g, i)
        r = self._table.get(key)
        if r is None:
            if self.rule is None:
                return {}
            E, R = g
            r = self._from_rule(self.rule(E, R[0] if R else 0, self.gens[i][0]))
            self._table[key] = r
        return r

    def table(self):
        """Full action table over the algebra generators of A(n)."""
        return {(g, i): self.gen_action(g, i)
                for g in algebra_generators(self.profile, self.n) for i in range(len(self.gens))}

    # -- action ------------------------------------------------------------------
    def _words(self, n):
        if n > self.n and self.rule is None:
            raise ValueError("operation in A(%d) outside the module envelope A(%d)" % (n, self.n))
        return words(self.profile, n)

    def act_symbol(self, x, i, n=None):
        """rho_x applied to generator i, for a Milnor monomial x of A(n)."""
        n = self.n if n is None else n
        key = (x, i, n)
        r = self._memo.get(key)
        if r is not None:
            return r
        if x == ONE:
            r = {(0, 0, i): 1}
        else:
            w = self._words(n)
            if x in w.gen_set:
                r = self.gen_action(x, i)
            else:
                r = {}
                for c, (a1, b1), g, (a2, b2), y in w.expression(x):
                    inner = {}
                    _hscale(self.profile, a2, b2, 1, self.act_symbol(y, i, n), inner)
                    _hscale(self.profile, a1, b1, c, self._act_gen(g, inner, n), r)
        self._memo[key] = r
        return r

    def _act_gen(self, g, elt, n):
        return self.act_terms({(0, 0, g): 1}, elt, n)

    def act_terms(self, op_terms, elt, n=None):
        """Apply an A(n) element {(a, b, x): c} to a module element."""
        n = self.n if n is None else n
        env = milnor_algebra(self.profile, An(n))
        out = {}
        for (a, b, x), c in op_terms.items():
            for (a2, b2, j), c2 in elt.items():
                for (a3, b3, z), c3 in env.move_h(x, a2, b2).items():
                    _hscale(self.profile, a + a3, b + b3, c * c2 * c3,
                            self.act_symbol(z, j, n), out)
        return out

    def act(self, op: MilnorElement, x):
        """op . x for a Milnor element op of some A(m) and a module element x."""
        if op.tag.kind != "A":
            raise ValueError("modules are acted on by A(n) elements")
        elt = x.terms if isinstance(x, ModuleElement) else x
        res = self.act_terms(op.terms, elt, op.tag.n)
        return ModuleElement(self, res)

    # -- elements ----------------------------------------------------------------
    def element(self, label, a=0, b=0, c=1):
        return ModuleElement(self, {(a, b, self.index[label]): c})

    def gen(self, label):
        return self.element(label)

    # -- serialization -----------------------------------------------------------
    def describe(self):
        tab = []
        for (g, i), img in sorted(self.table().items(), key=lambda kv: (kv[0][1], kv[0][0])):
            if not img:
                continue
            tab.append({"op": _gen_name(self.profile, g), "gen": _jlabel(self.gens[i][0]),
                        "image": [{"coeff": format_h({(a, b): c}), "gen": _jlabel(self.gens[j][0])}
                                  for (a, b, j), c in sorted(img.items())]})
        return {"name": self.name, "prime": self.profile.prime,
                "profile": self.profile.kind.value, "envelope": self.n,
                "generators": [{"label": _jlabel(lab), "bidegree": list(bd)} for lab, bd in self.gens],
                "action": tab}

    def to_json(self):
        return json.dumps(self.describe(), indent=2)


def _jlabel(lab):
    return list(lab) if isinstance(lab, tuple) else lab


def _gen_name(profile, g):
    if g == BETA:
        return "beta"
    return "P%d" % g[1][0]


class ModuleElement:
    __slots__ = ("module", "terms")

    def __init__(self, module: FPModule, terms=None):
        self.module = module
        p = module.profile.prime
        clean = {}
        for k, c in dict(terms or {}).items():
            if module.profile.allowed(k[0], k[1]):
                _acc(clean, k, c, p)
        self.terms = clean

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, ModuleElement) and self.module is other.module and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if other.module is not self.module:
            raise ValueError("elements of different modules")
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return ModuleElement(self.module, t)

    def __neg__(self):
        return ModuleElement(self.module, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return ModuleElement(self.module, {k: c * other for k, c in self.terms.items()})
        if isinstance(other, HElement):
            out = {}
            for (a, b), c in other.terms.items():
                _hscale(self.module.profile, a, b, c, self.terms, out)
            return ModuleElement(self.module, out)
        return NotImplemented

    def is_zero(self):
        return not self.terms

    def bidegree(self):
        for (a, b, i) in self.terms:
            p, q = self.module.degree(i)
            return p + a, q + a + b
        return None

    def coefficient(self, label):
        """The H-coefficient of a basis generator."""
        i = self.module.index[label]
        return HElement(self.module.profile, {(a, b): c for (a, b, j), c in self.terms.items() if j == i})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b, i), c in sorted(self.terms.items(), key=lambda kv: (kv[0][2], kv[0][:2])):
            h = format_h({(a, b): c})
            g = _fmt_label(self.module, self.module.label(i))
            parts.append(g if h == "1" else "%s*%s" % (h, g))
        return " + ".join(parts)

    __repr__ = __str__


def _fmt_label(module, lab):
    if module.kind in ("bmu", "lens", "bsigma") and isinstance(lab, tuple):
        i, k = lab
        x, y = ("u", "v") if module.kind != "bsigma" else ("c", "d")
        s = (x if i else "") + ("%s^%d" % (y, k) if k not in (0, 1) else (y if k == 1 else ""))
        s = s or "1"
        return ("S" + s) if module.shift != (0, 0) else s
    return str(lab)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def trivial_module(profile, n=2):
    """H itself: every positive-degree symbol acts by zero on the unit."""
    return FPModule(profile, n, [("1", (0, 0))], rule=lambda e, r, lab: {},
                    name="trivial", kind="trivial")


def bmu_degree(p, i, k):
    """Bidegree of u^i v^k: u in (1, 1), v in (2, 1)."""
    return (i + 2 * k, i + k)


def bsigma_degree(p, i, k):
    """Bidegree of c^i d^k: c in (2l-3, l-1), d in (2l-2, l-1)."""
    return (i * (2 * p - 3) + k * (2 * p - 2), (i + k) * (p - 1))


def bmu_rule(p):
    def rule(e, r, lab):
        i, k = lab
        c = binom_mod(k, r, p)
        if not c:
            return {}
        if i == 1:
            return {(0, 0, (0, (p - 1) * r + 1 + k) if e else (1, (p - 1) * r + k)): c}
        if e:
            return {}
        return {(0, 0, (0, (p - 1) * r + k)): c}
    return rule


def bsigma_rule(p):
    def rule(e, r, lab):
        i, k = lab
        sign = -1 if r % 2 else 1
        if i == 1:
            c = sign * binom_mod((p - 1) * (k + 1) - 1, r, p)
            if not c % p:
                return {}
            return {(0, 0, (0, r + 1 + k) if e else (1, r + k)): c}
        if e:
            return {}
        c = sign * binom_mod((p - 1) * k, r, p)
        return {(0, 0, (0, r + k)): c} if c % p else {}
    return rule


def bmu_band(profile, kmin, kmax, n=2):
    """Band {u^i v^k : kmin <= k <= kmax} of the localized H(B mu_l)."""
    if kmin > kmax:
        raise ValueError("need kmin <= kmax")
    p = profile.prime
    gens = [((i, k), bmu_degree(p, i, k)) for k in range(kmin, kmax + 1) for i in (0, 1)]
    return FPModule(profile, n, gens, rule=bmu_rule(p), name="bmu:%d..%d" % (kmin, kmax),
                    kind="bmu", params={"kmin": kmin, "kmax": kmax})


def bsigma_band(profile, kmin, kmax, n=2):
    """Band {c^i d^k : kmin <= k <= kmax} of the localized H(BS_l)."""
    if kmin > kmax:
        raise ValueError("need kmin <= kmax")
    p = profile.prime
    gens = [((i, k), bsigma_degree(p, i, k)) for k in range(kmin, kmax + 1) for i in (0, 1)]
    return FPModule(profile, n, gens, rule=bsigma_rule(p), name="bsigma:%d..%d" % (kmin, kmax),
                    kind="bsigma", params={"kmin": kmin, "kmax": kmax})


def lens_module(profile, m, n, envelope=2):
    """Cohomology of the Thom spectrum of -m times the tautological bundle
    over the lens space L^{2n-1}: the band -m <= k < n - m of H(B mu_l)_loc.

    Operations only raise k, so classes beyond the top are a submodule and
    the band is the corresponding quotient.
    """
    if m < 0 or n < 1:
        raise ValueError("need m >= 0 and n >= 1")
    M = bmu_band(profile, -m, n - m - 1, envelope)
    M.name = "lens:m=%d,n=%d" % (m, n)
    M.kind = "lens"
    M.params.update({"m": m, "n": n})
    return M


def suspend(M: FPModule, p, q):
    """Sigma^{p,q} M.  Odd-degree operations pick up the sign (-1)^p."""
    prime = M.profile.prime
    gens = [(lab, (a + p, b + q)) for lab, (a, b) in M.gens]
    sign_odd = -1 if (p % 2 and prime != 2) else 1
    base = M

    def rule(e, r, lab):
        if base.rule is not None:
            img = base._from_rule(base.rule(e, r, lab))
        else:
            img = base.gen_action((e, (r,) if r else ()), base.index[lab])
        s = sign_odd if e else 1
        return {(a, b, base.gens[j][0]): s * c for (a, b, j), c in img.items()}

    out = FPModule(M.profile, M.n, gens, rule=rule, name="susp:%d,%d:%s" % (p, q, M.name),
                   kind=M.kind, shift=(M.shift[0] + p, M.shift[1] + q), params=M.params)
    return out


# ---------------------------------------------------------------------------
# homomorphisms
# ---------------------------------------------------------------------------

class ModuleMap:
    """H-linear map given on generators: images[i] = {(a, b, j): c}."""

    def __init__(self, src: FPModule, tgt: FPModule, images):
        self.src = src
        self.tgt = tgt
        self.images = {i: dict(v) for i, v in images.items()}

    def apply_terms(self, elt):
        out = {}
        for (a, b, i), c in elt.items():
            _hscale(self.src.profile, a, b, c, self.images.get(i, {}), out)
        return out

    def __call__(self, x):
        elt = x.terms if isinstance(x, ModuleElement) else x
        return ModuleElement(self.tgt, self.apply_terms(elt))

    def linearity_failures(self, n=None):
        """Generators g and basis elements i with f(g i) != g f(i)."""
        n = self.src.n if n is None else n
        bad = []
        for g in algebra_generators(self.src.profile, n):
            for i in range(len(self.src)):
                lhs = self.apply_terms(self.src.act_symbol(g, i, n))
                rhs = self.tgt.act_terms({(0, 0, g): 1}, self.images.get(i, {}), n)
                if lhs != rhs:
                    bad.append((g, self.src.label(i)))
        return bad

    def is_injective_per_bidegree(self):
        from .linalg import rank
        p = self.src.profile.prime
        for P, Q in _all_bidegrees(self.src):
            basis = self.src.basis_at(P, Q)
            imgs = _indexed([self.apply_terms({k: 1}) for k in basis])
            if rank(p, imgs) < len(basis):
                return False
        return True


def _indexed(vectors):
    """Relabel dict vectors with hashable keys by consecutive integers."""
    index = {}
    return [{index.setdefault(k, len(index)): c for k, c in v.items()} for v in vectors]


def _all_bidegrees(M, extra=3):
    """Bidegrees carrying classes of M, including coefficient multiples."""
    out = set()
    prof = M.profile
    reach = extra if prof.has_tau else 0
    for _, (p, q) in M.gens:
        for a in range(reach + 1 if prof.has_rho else 1):
            for b in range(reach + 1):
                if prof.allowed(a, b):
                    out.add((p + a, q + a + b))
    return sorted(out)


def identity_map(M):
    return ModuleMap(M, M, {i: {(0, 0, i): 1} for i in range(len(M))})


def zero_map(M, N):
    return ModuleMap(M, N, {})


def label_map(src, tgt, fn):
    """Map sending generator label to fn(label) = {(a, b, label'): c}."""
    images = {}
    for i, (lab, _) in enumerate(src.gens):
        images[i] = tgt._from_rule(fn(lab))
    return ModuleMap(src, tgt, images)


# ---------------------------------------------------------------------------
# named maps between the band modules
# ---------------------------------------------------------------------------

def psigma_inclusion(x: ModuleElement, target: FPModule):
    """H(BS) -> H(B mu): c -> -u v^{l-2}, d -> -v^{l-1}."""
    src = x.module
    if src.kind != "bsigma" or target.kind not in ("bmu", "lens"):
        raise ValueError("psigma_inclusion maps a bsigma band into a bmu band")
    return psigma_map(src, target)(x)


def psigma_map(src, target):
    p = src.profile.prime

    def fn(lab):
        i, k = lab
        sign = -1 if (i + k) % 2 else 1
        return {(0, 0, (i, (p - 1) * k + i * (p - 2))): sign}

    for i, (lab, _) in enumerate(src.gens):
        img = fn(lab)
        for key in img:
            if key[2] not in target.index:
                raise ValueError("band overflow: image of %s not in %s" % (lab, target.name))
    return label_map(src, target, fn)


def jstar(x: ModuleElement, same_n=False):
    """The Thom-class map j^*: x U_{-m} -> x v U_{-(m+1)} on absolute labels.

    By default the target is lens_module(m+1, n+1), so every basis label
    is kept (the top class included) and the map is injective.  With
    ``same_n`` the target is lens_module(m+1, n), where v^n = 0 kills the
    top classes u^i v^{n-m-1}.
    """
    M = x.module
    if M.kind != "lens":
        raise ValueError("jstar expects an element of a lens module")
    return jstar_map(M, same_n)(x)


def jstar_map(M, same_n=False):
    m, n = M.params["m"], M.params["n"]
    T = lens_module(M.profile, m + 1, n if same_n else n + 1, M.n)
    return label_map(M, T, lambda lab: {(0, 0, lab): 1})


class Tower:
    """A sequence of modules with maps level_m -> level_{m+1}."""

    def __init__(self, levels, maps, name="tower"):
        if len(maps) != len(levels) - 1:
            raise ValueError("a tower with k levels needs k - 1 maps")
        self.levels = list(levels)
        self.maps = list(maps)
        self.name = name

    def __len__(self):
        return len(self.levels)


def lens_tower(profile, m0, m1, n, envelope=2):
    """Levels H(L_{-2m}^{2n-1}) for m0 <= m <= m1: bands -m <= k <= n-1.

    The maps are the inclusions of absolute labels (the j^* of the
    infinite stunted lens spectra, truncated at a common top cell).
    """
    levels = [lens_module(profile, m, n + m, envelope) for m in range(m0, m1 + 1)]
    maps = [label_map(levels[t], levels[t + 1], lambda lab: {(0, 0, lab): 1})
            for t in range(len(levels) - 1)]
    return Tower(levels, maps, name="tower:lens:m0=%d,m1=%d,n=%d" % (m0, m1, n))


def in_window(bd, window):
    (pmin, pmax) = window
    return pmin <= bd[0] <= pmax


def tower_colim(T: Tower, window=None):
    """Colimit of a finite tower: its last level.

    With a window (pmin, pmax) on the first degree, the last map must be
    bijective on the classes in the window; otherwise the window has not
    stabilized and ValueError is raised.
    """
    last = T.levels[-1]
    if window is not None and len(T.levels) > 1:
        f = T.maps[-1]
        src = f.src
        from .linalg import rank
        p = last.profile.prime
        for P, Q in sorted(set(_all_bidegrees(src)) | set(_all_bidegrees(last))):
            if not in_window((P, Q), window):
                continue
            sb, tb = src.basis_at(P, Q), last.basis_at(P, Q)
            imgs = _indexed([f.apply_terms({k: 1}) for k in sb])
            if len(sb) != len(tb) or rank(p, imgs) != len(tb):
                raise ValueError("tower has not stabilized at bidegree %s" % ((P, Q),))
    return last


def colim_basis(M: FPModule, window):
    return [lab for lab, bd in M.gens if in_window(bd, window)]


# ---------------------------------------------------------------------------
# residue, Frobenius adjoint, projection
# ---------------------------------------------------------------------------

def _is_suspended_band(M, kinds=("bmu", "bsigma", "lens")):
    return M.kind in kinds and M.shift == (1, 0)


def residue(x: ModuleElement) -> HElement:
    """res(S u^i v^k) = 1 for (i, k) = (1, -1) and 0 otherwise, extended H-linearly."""
    M = x.module
    if not _is_suspended_band(M):
        raise ValueError("residue is defined on Sigma of a bmu or bsigma band")
    if (1, -1) not in M.index:
        return HElement.zero(M.profile)
    return x.coefficient((1, -1))


def band_product(profile, kind, x, y):
    """Product of labels (i, k) in H(B mu)_loc or H(BS)_loc, as {(a, b, label): c}.

    u^2 = tau v + rho u, and likewise c^2 = tau d + rho c at the prime 2;
    for odd l the square of u (or c) vanishes.
    """
    (i, k), (j, l) = x, y
    if i + j < 2:
        return {(0, 0, (i + j, k + l)): 1}
    if profile.prime != 2:
        return {}
    out = {}
    if profile.allowed(0, 1):
        out[(0, 1, (0, k + l + 1))] = 1
    if profile.allowed(1, 0):
        out[(1, 0, (1, k + l))] = 1
    return out


def frobenius_formula(x: ModuleElement):
    """Adjoint of the residue pairing on basis generators, from the displayed
    formulas: S v^k -> (u v^{-k-1})^dual, S u v^{k-1} -> (v^{-k})^dual + rho (u v^{-k})^dual.

    Returns {label: HElement} of dual-basis coefficients.
    """
    M = x.module
    if not _is_suspended_band(M):
        raise ValueError("frobenius_adjoint is defined on Sigma of a band")
    prof = M.profile
    out = {}
    for (a, b, i), c in x.terms.items():
        i0, k = M.label(i)
        if i0 == 0:
            parts = [((1, -k - 1), 0)]
        else:
            kk = k + 1
            parts = [((0, -kk), 0), ((1, -kk), 1)]
        for lab, rho in parts:
            if rho and not prof.allowed(a + 1, b):
                continue
            h = HElement.mono(prof, a + rho, b, c)
            out[lab] = out[lab] + h if lab in out else h
    return {k: v for k, v in out.items() if not v.is_zero()}


def frobenius_adjoint(x: ModuleElement, window):
    """Adjoint computed from the pairing S x (x) y -> res(S x y) over the
    dual labels y with k in the given (kmin, kmax) window."""
    M = x.module
    if not _is_suspended_band(M):
        raise ValueError("frobenius_adjoint is defined on Sigma of a band")
    prof = M.profile
    kind = "bsigma" if M.kind == "bsigma" else "bmu"
    out = {}
    for (a, b, i), c in x.terms.items():
        lab = M.label(i)
        for k in range(window[0], window[1] + 1):
            for i2 in (0, 1):
                prod = band_product(prof, kind, lab, (i2, k))
                for (a2, b2, l2), c2 in prod.items():
                    if l2 == (1, -1) and prof.allowed(a + a2, b + b2):
                        h = HElement.mono(prof, a + a2, b + b2, c * c2)
                        key = (i2, k)
                        out[key] = out[key] + h if key in out else h
    return {k: v for k, v in out.items() if not v.is_zero()}


def pi_projection(x: ModuleElement, target: FPModule):
    """S v^{(l-1)k} -> (-1)^k S d^k and S u v^{(l-1)k-1} -> (-1)^k S c d^{k-1};
    every other S u^i v^k goes to zero."""
    return pi_map(x.module, target)(x)


def pi_map(src, target):
    if not _is_suspended_band(src, ("bmu", "lens")) or not _is_suspended_band(target, ("bsigma",)):
        raise ValueError("pi maps Sigma bmu bands to Sigma bsigma bands")
    p = src.profile.prime

    def fn(lab):
        i, k = lab
        kk = k + i
        if kk % (p - 1):
            return {}
        q = kk // (p - 1)
        sign = -1 if q % 2 else 1
        return {(0, 0, (i, q - i)): sign}

    return label_map(src, target, fn)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def relation_failures(M: FPModule, n=None):
    """Check that the table respects A(n): for generators g and Milnor
    symbols w, g . (w . x) must equal (g w) . x on every generator x."""
    n = M.n if n is None else n
    w = words(M.profile, n)
    env = w.env
    bad = []
    syms = w.all_symbols()
    for g in w.gens:
        for y in syms:
            prod = env.mul({(0, 0, g): 1}, {(0, 0, y): 1})
            for i in range(len(M)):
                lhs = M.act_terms({(0, 0, g): 1}, M.act_symbol(y, i, n), n)
                rhs = M.act_terms(prod, {(0, 0, i): 1}, n)
                if lhs != rhs:
                    bad.append((g, y, M.label(i)))
    return bad


def rule_failures(M: FPModule, n=None, rmax=None):
    """Compare the action of beta^e P^r obtained through words with the
    module's closed formula, for all r with P^r in A(n)."""
    n = M.n if n is None else n
    if M.rule is None:
        return []
    p = M.profile.prime
    rmax = p ** n - 1 if rmax is None else min(rmax, p ** n - 1)
    bad = []
    for r in range(rmax + 1):
        for e in (0, 1):
            x = (e, (r,) if r else ())
            for i in range(len(M)):
                got = M.act_symbol(x, i, n) if x != ONE else {(0, 0, i): 1}
                want = M._from_rule(M.rule(e, r, M.label(i))) if x != ONE else {(0, 0, i): 1}
                if got != want:
                    bad.append((e, r, M.label(i)))
    return bad


# ---------------------------------------------------------------------------
# parsing for the command line
# ---------------------------------------------------------------------------

def _kv(text):
    out = {}
    for part in text.split(","):
        k, v = part.split("=")
        out[k.strip()] = int(v)
    return out


def _range(text):
    a, b = text.split("..")
    return int(a), int(b)


def parse_module(text: str, profile: Profile, n=2):
    """Parse ``trivial``, ``lens:m=M,n=N``, ``bmu:a..b``, ``bsigma:a..b``,
    ``susp:p,q:<module>`` or ``tower:lens:m0..m1,n=N``.

    Towers come back as Tower objects, everything else as FPModule.
    """
    t = text.strip()
    try:
        if t == "trivial":
            return trivial_module(profile, n)
        if t.startswith("lens:"):
            kv = _kv(t[5:])
            return lens_module(profile, kv["m"], kv["n"], n)
        if t.startswith("bmu:"):
            return bmu_band(profile, *_range(t[4:]), n=n)
        if t.startswith("bsigma:"):
            return bsigma_band(profile, *_range(t[7:]), n=n)
        if t.startswith("susp:"):
            rest = t[5:]
            pq, inner = rest.split(":", 1)
            p, q = (int(v) for v in pq.split(","))
            return suspend(parse_module(inner, profile, n), p, q)
        if t.startswith("tower:lens:"):
            rest = t[len("tower:lens:"):]
            if ".." in rest.split(",")[0]:
                rng, tail = rest.split(",", 1)
                m0, m1 = _range(rng)
                N = _kv(tail)["n"]
            else:
                kv = _kv(rest)
                m0, m1, N = kv["m0"], kv["m1"], kv["n"]
            return lens_tower(profile, m0, m1, N, n)
    except (KeyError, ValueError) as exc:
        raise ValueError("bad module descriptor %r: %s" % (text, exc))
    raise ValueError("unknown module descriptor %r" % text)
