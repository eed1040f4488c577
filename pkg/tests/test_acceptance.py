"""Acceptance criteria, one test per criterion.

Each test prints a single ``Cn PASS|FAIL ...`` line to the terminal (outside
pytest's capture) and then asserts.  The headline criterion is run at the
stated caps; see ``test_headline_iso_at_wider_bands`` for the widths at which
the band stabilizes.
"""

import time

import pytest

from conftest import ALL_PROFILES, COMPLEX, REAL, TRIVIAL2, TRIVIAL3
from msing.amod import lens_tower, tower_colim, trivial_module
from msing.ext import Window, ext_dims, lin_check, total_complex_e2
from msing.verify import suite_basis, suite_ext, suite_hopf, suite_milnor, suite_singer

HEADLINE_PROFILES = (TRIVIAL2, TRIVIAL3, COMPLEX)
HEADLINE_WINDOW = Window(3, 0, 6)


@pytest.fixture
def report(capsys):
    def emit(tag, ok, detail=""):
        with capsys.disabled():
            print("\n%s %s %s" % (tag, "PASS" if ok else "FAIL", detail))
    return emit


def timed(fn, *args, **kw):
    t0 = time.time()
    out = fn(*args, **kw)
    return out, time.time() - t0


def test_c1_hopf_algebroid_axioms(report):
    fails, secs = timed(suite_hopf, ALL_PROFILES, 16)
    ok = not fails and secs <= 120
    report("C1", ok, "hopf axioms deg<=16: %d failures, %.1fs" % (len(fails), secs))
    assert fails == [] and secs <= 120


def test_c2_basis_and_comodule_isomorphisms(report):
    fails, secs = timed(suite_basis, ALL_PROFILES, 16)
    report("C2", not fails, "basis round trips deg<=16: %d failures, %.1fs" % (len(fails), secs))
    assert fails == []


def test_c3_milnor_and_adem(report):
    fails, secs = timed(suite_milnor, ALL_PROFILES, 20)
    report("C3", not fails, "milnor/adem a+b<=20: %d failures, %.1fs" % (len(fails), secs))
    assert fails == []


def test_c4_singer_constructions(report):
    fails, secs = timed(suite_singer, ALL_PROFILES)
    report("C4", not fails, "singer suite: %d failures, %.1fs" % (len(fails), secs))
    assert fails == []


def test_c5_ext_matches_cobar_oracle(report):
    fails, secs = timed(suite_ext, (TRIVIAL2, TRIVIAL3), 12)
    ok = not fails and secs <= 300
    report("C5", ok, "A(0), A(1) vs cobar s<=4 t<=12: %d failures, %.1fs" % (len(fails), secs))
    assert fails == [] and secs <= 300


def test_c6_delayed_e2_equals_colimit(report):
    W = Window(3, -4, 6)
    bad = []
    t0 = time.time()
    for prof in ALL_PROFILES:
        n = 2 if prof in (TRIVIAL2, COMPLEX) else 1
        T = lens_tower(prof, 0, 4, 8, n)
        chart, _ = total_complex_e2(T, n, W)
        if chart != ext_dims(tower_colim(T), n, W):
            bad.append(str(prof))
    report("C6", not bad, "lens tower m=0..4 n=8: mismatches %s, %.1fs" % (bad, time.time() - t0))
    assert bad == []


def test_c7_headline_residue_iso(report):
    verdicts = {}
    t0 = time.time()
    for prof in HEADLINE_PROFILES:
        v = lin_check(prof, HEADLINE_WINDOW, nmax=3, widths=list(range(4, 13)))
        verdicts[str(prof)] = v.status
    secs = time.time() - t0
    ok = all(s == "ISO" for s in verdicts.values()) and secs <= 900
    report("C7", ok, "residue on s<=3 t-s in [0,6], n<=3, half-width<=12: %s, %.1fs"
           % (verdicts, secs))
    assert ok


def test_c8_weight_zero_vanishing(report):
    W = Window(3, -1, 0)
    bad = []
    for prof in HEADLINE_PROFILES:
        chart = ext_dims(trivial_module(prof, 3), 3, W)
        assert chart.entries, "window should see the h_0 tower"
        bad += [(str(prof), k) for k in chart.entries
                if k[1] - k[0] == -1 and k[2] == 0]
    report("C8", not bad, "Ext^{s,t,0}(H,H) at t-s=-1: nonzero at %s" % bad)
    assert bad == []
