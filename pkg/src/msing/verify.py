"""Verification suites shared by the command line and the test-suite.

Each suite is a function ``(profiles, max_deg) -> list of failure strings``;
an empty list means the suite passed.  ``run_suites`` times them and
returns a machine-readable report.
"""

from __future__ import annotations

import time

from .adem import check_adem
from .amod import (bmu_band, bsigma_band, lens_module, relation_failures, rule_failures,
                   suspend, trivial_module)
from .coeff import HElement, Kind, Profile
from .dualalg import FULL, An, Bn, Cn
from .hopf import (bn_left_iso, bn_right_iso, cn_left_iso, coactions_commute, hopf_axioms,
                   right_basis_roundtrip, xi_power_sequence, xn_iso)
from .ops import p_op, q_op, sq, steenrod_p

DEFAULT_PROFILES = (Profile(2), Profile(3), Profile(2, Kind.COMPLEX), Profile(2, Kind.REAL))


def suite_hopf(profiles, max_deg=16):
    fails = []
    for prof in profiles:
        fails += ["%s: %s" % (prof, f) for f in hopf_axioms(prof, max_deg)]
    return fails


def suite_basis(profiles, max_deg=16, K=4):
    """Right-basis round trips and the comodule isomorphisms per bidegree."""
    fails = []
    for prof in profiles:
        for tag in (FULL, An(2), Cn(2)):
            fails += ["%s: %s" % (prof, f) for f in right_basis_roundtrip(prof, tag, max_deg)]
        fails += ["%s: %s" % (prof, f)
                  for f in right_basis_roundtrip(prof, Bn(2), max_deg, -max_deg)]
        for n in (1, 2):
            checks = [("X(n) splitting", xn_iso), ("C(n) left coaction", cn_left_iso),
                      ("B(n) left coaction", bn_left_iso), ("xi_1 power sequence", xi_power_sequence)]
            if n >= 2:
                checks.append(("B(n) right coaction", bn_right_iso))
            for name, fn in checks:
                fails += ["%s n=%d %s: %s" % (prof, n, name, f) for f in fn(prof, n, max_deg, K)]
            fails += ["%s: %s" % (prof, f) for f in coactions_commute(prof, n, max_deg)]
    return fails


def suite_milnor(profiles, max_deg=20):
    """Sq^2 Sq^2 = tau Sq^3 Sq^1, [P_n^0, Q_0] = Q_n and the Adem relations."""
    fails = []
    for prof in profiles:
        if prof.kind is Kind.REAL:
            lhs = sq(prof, 2, 1) * sq(prof, 2, 1)
            rhs = HElement.mono(prof, 0, 1) * (sq(prof, 3, 1) * sq(prof, 1, 1))
            if lhs != rhs:
                fails.append("%s: Sq2 Sq2 = %s, expected tau Sq3 Sq1" % (prof, lhs))
        for n in range(1, 4):
            P = p_op(prof, (0,) * (n - 1) + (1,), n)
            Q0 = q_op(prof, 0, n)
            if P * Q0 - Q0 * P != q_op(prof, n, n):
                fails.append("%s: [P_%d^0, Q_0] != Q_%d" % (prof, n, n))
        if prof.prime == 2:
            fails += ["%s: %s" % (prof, f) for f in check_adem(prof, max_deg)]
    return fails


def suite_modules(profiles, max_deg=12):
    """Module relations and the closed-form actions on bands."""
    fails = []
    for prof in profiles:
        mods = [trivial_module(prof, 2), bmu_band(prof, -4, 4, 2), bsigma_band(prof, -4, 4, 2),
                lens_module(prof, 2, 6, 2), suspend(bmu_band(prof, -3, 3, 2), 1, 0)]
        for M in mods:
            fails += ["%s %s: %s" % (prof, M.name, f) for f in relation_failures(M, 2)]
            if M.rule is not None:
                fails += ["%s %s: %s" % (prof, M.name, f) for f in rule_failures(M, 2)]
    return fails


def suite_singer(profiles, max_deg=16):
    """n-independence, evaluation linearity and the band isomorphism.

    The B(n) route for n-independence is expensive at odd primes and over
    the reals, so those profiles use a narrower r-window.
    """
    from .singer import (eval_large_map_failures, eval_small_map_failures, iso_rs_to_bsigma,
                         n_independence_failures, singer_large, singer_small)
    fails = []
    for prof in profiles:
        p = prof.prime
        H = trivial_module(prof, 3)
        lo, hi = (-3, 4) if p == 2 and prof.kind is not Kind.REAL else (-1, 2)
        ops = [steenrod_p(prof, 0, 1, beta=True), steenrod_p(prof, 1, 1)]
        fails += ["%s n-independence: %s" % (prof, f)
                  for f in n_independence_failures(singer_small(trivial_module(prof, 1), lo, hi, 1),
                                                   ops, (1, 2, 3))]
        R = singer_small(H, -7, 9, 3)
        for base in (H, lens_module(prof, 1, 3, 3)):
            Rb = R if base is H else singer_small(base, -3, 5, 3)
            fails += ["%s eval_small %s: %s" % (prof, base.name, f)
                      for f in eval_small_map_failures(Rb, 3)]
            L = singer_large(base, -8 * (p - 1), 8 * (p - 1), 3)
            fails += ["%s eval_large %s: %s" % (prof, base.name, f)
                      for f in eval_large_map_failures(L, 3)]
        iso = iso_rs_to_bsigma(R)
        fails += ["%s iso: %s" % (prof, f) for f in iso.linearity_failures(3)]
    return fails


def suite_ext(profiles, max_deg=12):
    """Resolution invariants and the cobar oracle over A(0), A(1)."""
    from .cobar import CobarOracle
    from .ext import Resolution, Window, chart_of
    fails = []
    for prof in profiles:
        if prof.kind is not Kind.TRIVIAL:
            continue
        for n in (0, 1):
            W = Window(4, -4, max_deg)
            R = Resolution(trivial_module(prof, n), n, W)
            if R.d_squared_failures():
                fails.append("%s A(%d): d^2 != 0" % (prof, n))
            if R.exactness_failures():
                fails.append("%s A(%d): resolution not exact" % (prof, n))
            if not R.is_minimal():
                fails.append("%s A(%d): resolution not minimal" % (prof, n))
            mine = {k: v for k, v in chart_of(R, W).entries.items() if k[1] <= max_deg}
            oracle = CobarOracle(prof.prime, n).chart(4, max_deg)
            if mine != oracle:
                fails.append("%s A(%d): Ext differs from the cobar oracle" % (prof, n))
    return fails


SUITES = {
    "hopf": suite_hopf,
    "basis": suite_basis,
    "adem": suite_milnor,
    "modules": suite_modules,
    "singer": suite_singer,
    "ext": suite_ext,
}


def run_suites(names=None, profiles=DEFAULT_PROFILES, max_deg=None):
    report = []
    for name in names or SUITES:
        fn = SUITES[name]
        t0 = time.time()
        fails = fn(profiles, max_deg) if max_deg is not None else fn(profiles)
        report.append({"suite": name, "passed": not fails, "failures": fails[:50],
                       "failure_count": len(fails), "seconds": round(time.time() - t0, 2)})
    return report
