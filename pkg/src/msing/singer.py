"""Small and large motivic Singer constructions over a module M.

The small construction R_S(M) is kept in its B(0) (x) M normal form: an
element is an H-combination of beta^e P^r (x) m with r any integer and m
a basis generator of M.  The large construction R_mu(M) uses the basis
S u^i v^k (x) m.  Both are built as FPModules over an r-window (or
k-window); the generator actions come from the closed Singer formulas and
the rest of A(n) acts through words, exactly as for any other module.

An independent route to the small action goes through B(n) (x)_{A(n-1)} M:
act on the B(n) factor with the Milnor bimodule action, split the result
as sum beta^e P^r . b with b in A(n-1), and let b act on m.
"""

from __future__ import annotations

from .amod import BETA, FPModule, ModuleElement, _hscale, bsigma_band, suspend
from .arith import binom_mod
from .dualalg import ONE, An, Bn
from .ops import MilnorElement, _acc, decompose_right_An1, milnor_algebra


def _sym(e, r):
    return (e, (r,) if r else ())


def _er(m):
    E, R = m
    return E, (R[0] if R else 0)


def sq_symbol(j):
    return _sym(j & 1, j >> 1)


def _module_op(M, x, i):
    """rho_x applied to generator i of M, using the smallest envelope that holds x."""
    n = M.n
    if M.rule is not None:
        while x[1] and x[1][0] >= M.profile.prime ** n:
            n += 1
    return M.act_symbol(x, i, n)


class _Builder:
    """Accumulates H-combinations of labels, moving coefficients of the
    right tensor factor across the B(0) factor."""

    def __init__(self, profile):
        self.profile = profile
        self.p = profile.prime
        self.b0 = milnor_algebra(profile, Bn(0))
        self.out = {}

    def add_small(self, a0, b0, coeff, e, r, M, melt):
        """coeff * rho^a0 tau^b0 * beta^e P^r (x) melt."""
        prof = self.profile
        for (a, b, j), c in melt.items():
            if (a, b) == (0, 0):
                moved = {(0, 0, _sym(e, r)): 1}
            else:
                moved = self.b0.times_h({(0, 0, _sym(e, r)): 1}, {(a, b): 1})
            for (a2, b2, z), c2 in moved.items():
                A, B = a0 + a2, b0 + b2
                if prof.allowed(A, B):
                    e2, r2 = _er(z)
                    _acc(self.out, (A, B, (e2, r2, M.label(j))), coeff * c * c2, self.p)

    def add_large(self, a0, b0, coeff, i, k, M, melt):
        prof = self.profile
        for (a, b, j), c in melt.items():
            A, B = a0 + a, b0 + b
            if prof.allowed(A, B):
                _acc(self.out, (A, B, (i, k, M.label(j))), coeff * c, self.p)


# ---------------------------------------------------------------------------
# small construction
# ---------------------------------------------------------------------------

def small_degree(p, e, r):
    """Cohomological bidegree of beta^e P^r: (e + (2l-2) r, (l-1) r)."""
    return (e + (2 * p - 2) * r, (p - 1) * r)


def _rs_power(M, a, lab):
    """P^a (Sq^{2a} at the prime 2) on beta^e P^b (x) m, as labelled terms."""
    prof = M.profile
    p = prof.prime
    e, b, mlab = lab
    i = M.index[mlab]
    out = _Builder(prof)
    if p == 2:
        A = 2 * a
        B = 2 * b + e
        for j in range(a + 1):
            c = binom_mod(B - 1 - j, A - 2 * j, 2)
            if not c:
                continue
            mj = _module_op(M, sq_symbol(j), i)
            top = A + B - j
            if B % 2 == 0:
                if j % 2 == 0 or prof.allowed(0, 1):
                    out.add_small(0, j % 2, c, top & 1, top >> 1, M, mj)
            else:
                out.add_small(0, 0, c, top & 1, top >> 1, M, mj)
                if j % 2 == 1 and prof.allowed(1, 0):
                    t2 = top - 1
                    out.add_small(1, 0, c, t2 & 1, t2 >> 1, M, mj)
        return out.out
    for j in range(a // p + 1):
        sign = -1 if (a + j) % 2 else 1
        pj = _module_op(M, _sym(0, j), i)
        if e == 0:
            c = sign * binom_mod((p - 1) * (b - j) - 1, a - p * j, p)
            if c % p:
                out.add_small(0, 0, c, 0, a + b - j, M, pj)
        else:
            c = sign * binom_mod((p - 1) * (b - j), a - p * j, p)
            if c % p:
                out.add_small(0, 0, c, 1, a + b - j, M, pj)
            if a - p * j - 1 >= 0:
                c = -sign * binom_mod((p - 1) * (b - j) - 1, a - p * j - 1, p)
                if c % p:
                    out.add_small(0, 0, c, 0, a + b - j, M, _module_op(M, _sym(1, j), i))
    return out.out


def _rs_beta(prof, terms):
    """beta on labelled small terms: beta (h x) = beta(h) x + h beta(x),
    beta(P^r (x) m) = beta P^r (x) m and beta(beta P^r (x) m) = 0."""
    env = milnor_algebra(prof, An(0))
    p = prof.prime
    out = {}
    for (a, b, (e, r, mlab)), c in terms.items():
        for (a2, b2, z), c2 in env.move_h(BETA, a, b).items():
            if z == ONE:
                _acc(out, (a2, b2, (e, r, mlab)), c * c2, p)
            elif e == 0:
                _acc(out, (a2, b2, (1, r, mlab)), c * c2, p)
    return out


def singer_small(M: FPModule, rmin: int, rmax: int, n=None):
    """R_S(M) restricted to rmin <= r <= rmax.

    P^a only raises r, so the window is a quotient of the part r >= rmin.
    """
    prof = M.profile
    p = prof.prime
    gens = []
    for r in range(rmin, rmax + 1):
        for e in (0, 1):
            for mlab, (mp, mq) in M.gens:
                d = small_degree(p, e, r)
                gens.append(((e, r, mlab), (d[0] + mp, d[1] + mq)))

    def rule(e, a, lab):
        if a == 0:
            base = {(0, 0, lab): 1}
        else:
            base = _rs_power(M, a, lab)
        if e:
            base = _rs_beta(prof, base)
        return base

    R = FPModule(prof, M.n if n is None else n, gens, rule=rule,
                 name="RS(%s)[%d..%d]" % (M.name, rmin, rmax), kind="singer_small",
                 params={"base": M, "rmin": rmin, "rmax": rmax})
    return R


def eval_small(x: ModuleElement, M: FPModule = None) -> ModuleElement:
    """epsilon(beta^e P^r (x) m) = beta^e P^r (m) for r >= 0 and 0 for r < 0."""
    R = x.module
    M = M or R.params["base"]
    out = {}
    for (a, b, i), c in x.terms.items():
        e, r, mlab = R.label(i)
        if r < 0:
            continue
        img = _module_op(M, _sym(e, r), M.index[mlab]) if (e, r) != (0, 0) else {(0, 0, M.index[mlab]): 1}
        _hscale(M.profile, a, b, c, img, out)
    return ModuleElement(M, out)


def eval_small_map_failures(R: FPModule, n=None):
    """Generators g and basis elements x of R_S(M) with eps(g x) != g eps(x)."""
    from .amod import algebra_generators
    M = R.params["base"]
    n = R.n if n is None else n
    bad = []
    for g in algebra_generators(R.profile, n):
        for i in range(len(R)):
            lhs = eval_small(ModuleElement(R, R.act_symbol(g, i, n)), M)
            rhs = M.act_terms({(0, 0, g): 1}, eval_small(ModuleElement(R, {(0, 0, i): 1}), M).terms, n)
            if lhs.terms != rhs:
                bad.append((g, R.label(i)))
    return bad


# -- the route through B(n) (x)_{A(n-1)} M ---------------------------------------

def stabilize(bterms, n, M: FPModule, mlab):
    """Rewrite (B(n) element) (x) m in the B(0) (x) M normal form.

    bterms is {(a, b, sym): c} in B(n).  Each symbol is split as
    beta^e P^r . b' with b' in A(n-1), and b' is applied to m.
    """
    prof = M.profile
    out = _Builder(prof)
    x = MilnorElement(milnor_algebra(prof, Bn(n)), bterms)
    i = M.index[mlab]
    if n == 0:
        for (a, b, z), c in x.terms.items():
            e, r = _er(z)
            out.add_small(a, b, c, e, r, M, {(0, 0, i): 1})
        return out.out
    for (e, r), bel in decompose_right_An1(x):
        melt = M.act_terms(bel.terms, {(0, 0, i): 1}, n - 1)
        out.add_small(0, 0, 1, e, r, M, melt)
    return out.out


def act_through_bn(op: MilnorElement, lab, M: FPModule, n: int):
    """op . (beta^e P^r (x) m) computed in B(n) (x)_{A(n-1)} M, op in A(m), m <= n."""
    e, r, mlab = lab
    prof = M.profile
    benv = milnor_algebra(prof, Bn(n))
    aterms = op.terms
    if op.tag.n != n:
        if op.tag.n > n:
            raise ValueError("operation outside A(%d)" % n)
        aterms = MilnorElement(milnor_algebra(prof, An(n)), op.terms).terms
    y = benv.act_left(aterms, {(0, 0, _sym(e, r)): 1})
    return stabilize(y, n, M, mlab)


def n_independence_failures(R: FPModule, ops, ns):
    """Compare the formula action on R_S(M) with the B(n) route for every n in ns.

    ``ops`` are Milnor elements of A(m) with m <= min(ns).  Only basis
    elements whose images stay inside the r-window are compared.
    """
    M = R.params["base"]
    rmax = R.params["rmax"]
    bad = []
    for op in ops:
        for i in range(len(R)):
            lab = R.label(i)
            want = {(a, b, R.label(j)): c for (a, b, j), c in R.act_terms(op.terms, {(0, 0, i): 1}, max(ns)).items()}
            for n in ns:
                got = act_through_bn(op, lab, M, n)
                got = {k: c for k, c in got.items() if k[2][1] <= rmax}
                if got != want:
                    bad.append((str(op), lab, n))
    return bad


# -- the isomorphism with Sigma H(BS)_loc for M = H ------------------------------

def iso_rs_to_bsigma(R: FPModule, target: FPModule = None):
    """P^k -> S c d^{k-1} and beta P^k -> -S d^k, for R = R_S(H) on a window.

    Returns the ModuleMap into Sigma bsigma_band(rmin - 1, rmax - 1); the
    class beta P^{rmax} would land at the top and is cut off.
    """
    from .amod import label_map
    if R.kind != "singer_small" or R.params["base"].kind != "trivial":
        raise ValueError("the isomorphism is defined for R_S(H)")
    rmin, rmax = R.params["rmin"], R.params["rmax"]
    if target is None:
        target = suspend(bsigma_band(R.profile, rmin - 1, rmax - 1, R.n), 1, 0)

    def fn(lab):
        e, r, _ = lab
        if e == 0:
            return {(0, 0, (1, r - 1)): 1}
        return {(0, 0, (0, r)): -1}

    return label_map(R, target, fn)


# ---------------------------------------------------------------------------
# large construction
# ---------------------------------------------------------------------------

def _rmu_power(M, r, lab):
    prof = M.profile
    p = prof.prime
    i0, k, mlab = lab
    mi = M.index[mlab]
    out = _Builder(prof)
    if p == 2:
        for j in range(r // 2 + 1):
            m2 = None
            if i0 == 1:
                c = binom_mod(k - j, r - 2 * j, 2)
                if c:
                    m2 = _module_op(M, sq_symbol(2 * j), mi)
                    out.add_large(0, 0, c, 1, r + k - j, M, m2)
            else:
                c = binom_mod(k - j, r - 2 * j, 2)
                if c:
                    out.add_large(0, 0, c, 0, r + k - j, M, _module_op(M, sq_symbol(2 * j), mi))
        for j in range((r - 1) // 2 + 1 if r >= 1 else 0):
            m3 = _module_op(M, sq_symbol(2 * j + 1), mi)
            if i0 == 1:
                c = binom_mod(k - j, r - 2 * j - 1, 2)
                if c and prof.allowed(0, 1):
                    out.add_large(0, 1, c, 0, r + k - j, M, m3)
            else:
                c = binom_mod(k - j - 1, r - 2 * j - 1, 2)
                if c:
                    out.add_large(0, 0, c, 1, r + k - j - 1, M, m3)
                    if prof.allowed(1, 0):
                        out.add_large(1, 0, c, 0, r + k - j - 1, M, m3)
        return out.out
    for j in range(r // p + 1):
        pj = _module_op(M, _sym(0, j), mi)
        if i0 == 1:
            kk = k + 1
            c = binom_mod(kk - (p - 1) * j - 1, r - p * j, p)
            if c:
                out.add_large(0, 0, c, 1, kk + (p - 1) * (r - j) - 1, M, pj)
        else:
            c = binom_mod(k - (p - 1) * j, r - p * j, p)
            if c:
                out.add_large(0, 0, c, 0, k + (p - 1) * (r - j), M, pj)
    if i0 == 0:
        for j in range((r - 1) // p + 1 if r >= 1 else 0):
            c = binom_mod(k - (p - 1) * j - 1, r - p * j - 1, p)
            if c:
                out.add_large(0, 0, c, 1, k + (p - 1) * (r - j) - 1, M, _module_op(M, _sym(1, j), mi))
    return out.out


def _rmu_beta(prof, terms):
    """beta(S u v^k (x) m) = -S v^{k+1} (x) m and beta(S v^k (x) m) = 0."""
    env = milnor_algebra(prof, An(0))
    p = prof.prime
    out = {}
    for (a, b, (i0, k, mlab)), c in terms.items():
        for (a2, b2, z), c2 in env.move_h(BETA, a, b).items():
            if z == ONE:
                _acc(out, (a2, b2, (i0, k, mlab)), c * c2, p)
            elif i0 == 1:
                _acc(out, (a2, b2, (0, k + 1, mlab)), -c * c2, p)
    return out


def large_degree(p, i, k):
    """Bidegree of S u^i v^k with S = Sigma^{1,0}."""
    return (1 + i + 2 * k, i + k)


def singer_large(M: FPModule, kmin: int, kmax: int, n=None):
    """R_mu(M) restricted to kmin <= k <= kmax (a quotient, as for bands)."""
    prof = M.profile
    p = prof.prime
    gens = []
    for k in range(kmin, kmax + 1):
        for i0 in (0, 1):
            for mlab, (mp, mq) in M.gens:
                d = large_degree(p, i0, k)
                gens.append(((i0, k, mlab), (d[0] + mp, d[1] + mq)))

    def rule(e, r, lab):
        base = {(0, 0, lab): 1} if r == 0 else _rmu_power(M, r, lab)
        if e:
            base = _rmu_beta(prof, base)
        return base

    return FPModule(prof, M.n if n is None else n, gens, rule=rule,
                    name="Rmu(%s)[%d..%d]" % (M.name, kmin, kmax), kind="singer_large",
                    params={"base": M, "kmin": kmin, "kmax": kmax})


def pi_label(p, i, k):
    """pi on S u^i v^k: the (label, sign) in Sigma H(BS), or None."""
    kk = k + i
    if kk % (p - 1):
        return None
    q = kk // (p - 1)
    return (i, q - i), (-1 if q % 2 else 1)


def large_to_small(i, k, p):
    """pi followed by the inverse of the small isomorphism on S u^i v^k.

    Returns ((e, r), sign) or None: S c d^{q-1} <- P^q and -S d^q <- beta P^q.
    """
    t = pi_label(p, i, k)
    if t is None:
        return None
    (ci, dk), sign = t
    if ci == 1:
        return (0, dk + 1), sign
    return (1, dk), -sign


def eval_large(x: ModuleElement, M: FPModule = None) -> ModuleElement:
    """The composite of pi (x) 1 and the small evaluation."""
    R = x.module
    M = M or R.params["base"]
    p = M.profile.prime
    out = {}
    for (a, b, idx), c in x.terms.items():
        i0, k, mlab = R.label(idx)
        t = large_to_small(i0, k, p)
        if t is None:
            continue
        (e, r), sign = t
        if r < 0:
            continue
        mi = M.index[mlab]
        img = _module_op(M, _sym(e, r), mi) if (e, r) != (0, 0) else {(0, 0, mi): 1}
        _hscale(M.profile, a, b, c * sign, img, out)
    return ModuleElement(M, out)


def eval_large_map_failures(R: FPModule, n=None):
    from .amod import algebra_generators
    M = R.params["base"]
    n = R.n if n is None else n
    bad = []
    for g in algebra_generators(R.profile, n):
        for i in range(len(R)):
            lhs = eval_large(ModuleElement(R, R.act_symbol(g, i, n)), M)
            rhs = M.act_terms({(0, 0, g): 1}, eval_large(ModuleElement(R, {(0, 0, i): 1}), M).terms, n)
            if lhs.terms != rhs:
                bad.append((g, R.label(i)))
    return bad


# ---------------------------------------------------------------------------
# text parsing for the command line
# ---------------------------------------------------------------------------

def parse_small_element(text, R: FPModule):
    """Parse ``Sq-1|1`` or ``bP2|(0, 1)``: an operation symbol and a module label."""
    from .ops import parse_op
    op_text, _, mtext = text.partition("|")
    M = R.params["base"]
    mlab = _parse_label(mtext.strip() or "1", M)
    prof = R.profile
    op = op_text.strip()
    if op.startswith("Sq"):
        k = int(op[2:])
        e, r = k & 1, k >> 1
    elif op.startswith("bP"):
        e, r = 1, int(op[2:])
    elif op.startswith("P"):
        e, r = 0, int(op[1:])
    else:
        parse_op(op, prof)
        raise ValueError("small Singer elements use Sq, P or bP symbols")
    return R.element((e, r, mlab))


def parse_large_element(text, R: FPModule):
    """Parse ``Su v^-1|1`` style input: ``u^i v^k|label`` with i in {0, 1}."""
    left, _, mtext = text.partition("|")
    M = R.params["base"]
    mlab = _parse_label(mtext.strip() or "1", M)
    s = left.replace("S", "").replace("*", " ").split()
    i0, k = 0, 0
    for tok in s:
        if tok == "u":
            i0 = 1
        elif tok.startswith("v"):
            k = int(tok[2:]) if tok.startswith("v^") else 1
        elif tok == "1":
            pass
        else:
            raise ValueError("bad large Singer element %r" % text)
    return R.element((i0, k, mlab))


def _parse_label(text, M):
    if text in M.index:
        return text
    import ast
    try:
        lab = ast.literal_eval(text)
    except (ValueError, SyntaxError):
        raise ValueError("unknown module generator %r" % text)
    if lab not in M.index:
        raise ValueError("unknown module generator %r" % text)
    return lab


def format_small(x: ModuleElement):
    if not x.terms:
        return "0"
    R = x.module
    p = R.profile.prime
    from .coeff import format_h
    parts = []
    for (a, b, i), c in sorted(x.terms.items(), key=lambda kv: (R.label(kv[0][2])[1], kv[0])):
        e, r, mlab = R.label(i)
        sym = ("Sq%d" % (2 * r + e)) if p == 2 else (("bP%d" if e else "P%d") % r)
        h = format_h({(a, b): c})
        s = "%s|%s" % (sym, mlab)
        parts.append(s if h == "1" else "%s*%s" % (h, s))
    return " + ".join(parts)


def format_large(x: ModuleElement):
    if not x.terms:
        return "0"
    R = x.module
    from .coeff import format_h
    parts = []
    for (a, b, i), c in sorted(x.terms.items()):
        i0, k, mlab = R.label(i)
        s = "S%sv^%d|%s" % ("u" if i0 else "", k, mlab)
        h = format_h({(a, b): c})
        parts.append(s if h == "1" else "%s*%s" % (h, s))
    return " + ".join(parts)
