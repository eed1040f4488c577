"""Command line entry point: ``msing verify|chart|singer|resolve|lin``.

Exit codes: 0 success or ISO, 1 failed verification or FAIL, 2
INCONCLUSIVE, 3 usage error.  Every command reads an optional flat
``key = value`` config file; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .coeff import Profile

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class RunConfig:
    """Flat key/value configuration mirroring the command line flags."""

    def __init__(self, values=None):
        self.values = {}
        for k, v in (values or {}).items():
            self.values[self._key(k)] = str(v)

    @staticmethod
    def _key(k):
        return k.strip().lstrip("-").replace("-", "_")

    @classmethod
    def from_text(cls, text):
        vals = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError("config line %d: expected key = value" % lineno)
            k, v = line.split("=", 1)
            vals[k] = v.strip()
        return cls(vals)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise UsageError("cannot read config %s: %s" % (path, exc))

    def to_text(self):
        return "".join("%s = %s\n" % (k, v) for k, v in sorted(self.values.items()))

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.values == other.values

    def __repr__(self):
        return "RunConfig(%r)" % self.values


def thread_cap():
    """Parallelism cap from MSING_THREADS; the engine itself runs serially."""
    raw = os.environ.get("MSING_THREADS")
    if raw is None:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise UsageError("MSING_THREADS must be a positive integer, got %r" % raw)
    if k < 1:
        raise UsageError("MSING_THREADS must be a positive integer, got %r" % raw)
    return k


# -- output helpers ---------------------------------------------------------------

def _emit(text, out):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True)


def chart_svg(chart_json):
    """Static dot chart (x = t - s, y = s) drawn from the chart JSON alone."""
    data = json.loads(chart_json) if isinstance(chart_json, str) else chart_json
    win = data["window"]
    s_hi = win["s"][1]
    x_lo, x_hi = win["ts"]
    cell, pad = 40, 30
    width = (x_hi - x_lo + 1) * cell + 2 * pad
    height = (s_hi + 1) * cell + 2 * pad
    buckets = {}
    for e in data["entries"]:
        key = (e["t"] - e["s"], e["s"])
        buckets.setdefault(key, []).append(e)
    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">' % (width, height),
           '<rect width="100%" height="100%" fill="white"/>']
    for x in range(x_lo, x_hi + 1):
        cx = pad + (x - x_lo) * cell + cell // 2
        out.append('<text x="%d" y="%d" font-size="10" text-anchor="middle">%d</text>'
                   % (cx, height - 8, x))
    for s in range(s_hi + 1):
        cy = height - pad - s * cell - cell // 2
        out.append('<text x="8" y="%d" font-size="10">%d</text>' % (cy + 3, s))
    for (x, s), es in sorted(buckets.items()):
        if not x_lo <= x <= x_hi:
            continue
        cx = pad + (x - x_lo) * cell + cell // 2
        cy = height - pad - s * cell - cell // 2
        for j, e in enumerate(sorted(es, key=lambda e: e["u"])):
            dx = (j - (len(es) - 1) / 2.0) * 8
            out.append('<circle cx="%.1f" cy="%d" r="3" fill="black"><title>s=%d t=%d u=%d dim=%d'
                       '</title></circle>' % (cx + dx, cy, e["s"], e["t"], e["u"], e["dim"]))
    out.append("</svg>")
    return "\n".join(out)


# -- argument handling --------------------------------------------------------------

def _profile(args):
    try:
        return Profile(int(args.prime), args.profile)
    except ValueError as exc:
        raise UsageError(str(exc))


def _window(text):
    from .ext import parse_window
    try:
        return parse_window(text)
    except ValueError:
        raise UsageError("bad window %r (expected s=0..3,ts=0..6)" % text)


def _module(text, prof, n):
    from .amod import parse_module
    try:
        return parse_module(text, prof, n)
    except ValueError as exc:
        raise UsageError(str(exc))


def _range_arg(text):
    try:
        a, b = text.split("..")
        return int(a), int(b)
    except ValueError:
        raise UsageError("bad range %r (expected lo..hi)" % text)


# -- commands ---------------------------------------------------------------------

def cmd_verify(args):
    from .coeff import Kind
    from .verify import DEFAULT_PROFILES, SUITES, run_suites
    names = None
    if args.suite:
        names = [s for chunk in args.suite for s in chunk.split(",") if s]
        unknown = [s for s in names if s not in SUITES]
        if unknown:
            raise UsageError("unknown suite(s) %s; choose from %s" % (unknown, sorted(SUITES)))
    if args.prime is None and args.profile is None:
        profiles = DEFAULT_PROFILES
    else:
        args.prime = args.prime or 2
        args.profile = args.profile or Kind.TRIVIAL.value
        profiles = (_profile(args),)
    max_deg = int(args.max_deg) if args.max_deg is not None else None
    report = run_suites(names, profiles, max_deg)
    body = {"profiles": [str(p) for p in profiles], "max_deg": max_deg,
            "suites": [{k: v for k, v in r.items() if k != "seconds"} for r in report]}
    _emit(_dumps(body), args.out)
    return EXIT_OK if all(r["passed"] for r in report) else EXIT_FAIL


def cmd_chart(args):
    from .amod import Tower, tower_colim
    from .ext import ext_dims, total_complex_e2
    prof = _profile(args)
    n = int(args.envelope)
    W = _window(args.window)
    M = _module(args.module, prof, n)
    if args.mode == "total-complex":
        if not isinstance(M, Tower):
            raise UsageError("--mode total-complex needs a tower module")
        chart, _ = total_complex_e2(M, n, W)
    else:
        if isinstance(M, Tower):
            M = tower_colim(M)
        chart = ext_dims(M, n, W)
    js = _dumps(chart.describe())
    if args.format == "json":
        _emit(js, args.out)
    elif args.format == "svg":
        _emit(chart_svg(js), args.out)
    else:
        _emit(chart.to_text(), args.out)
    return EXIT_OK


def cmd_singer(args):
    from .ops import parse_op
    from .singer import (format_large, format_small, parse_large_element, parse_small_element,
                         singer_large, singer_small)
    prof = _profile(args)
    n = int(args.envelope)
    M = _module(args.module, prof, n)
    lo, hi = _range_arg(args.band) if args.band else (-8 * (prof.prime - 1), 8 * (prof.prime - 1))
    try:
        if args.construction == "small":
            R = singer_small(M, lo, hi, n)
            x = parse_small_element(args.element, R)
        else:
            R = singer_large(M, lo, hi, n)
            x = parse_large_element(args.element, R)
        op = parse_op(args.op, prof, n=n)
    except (KeyError, ValueError) as exc:
        raise UsageError("singer: %s" % exc)
    y = R.act(op, x)
    fmt = format_small if args.construction == "small" else format_large
    _emit(fmt(y), args.out)
    return EXIT_OK


def cmd_resolve(args):
    from .amod import Tower
    from .ext import Resolution
    prof = _profile(args)
    n = int(args.envelope)
    M = _module(args.module, prof, n)
    if isinstance(M, Tower):
        raise UsageError("resolve takes a single module; use chart --mode total-complex for towers")
    R = Resolution(M, n, _window(args.window))
    _emit(_dumps(R.describe()), args.out)
    return EXIT_OK


def cmd_lin(args):
    from .ext import lin_check
    prof = _profile(args)
    W = _window(args.window)
    lo = int(args.min_width)
    hi = int(args.max_width)
    widths = list(range(lo, hi + 1, int(args.width_step)))
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    v = lin_check(prof, W, nmax=int(args.envelope), widths=widths,
                  zero_map=args.zero_map, log=log)
    _emit(_dumps(v.describe()), args.out)
    return {"ISO": EXIT_OK, "FAIL": EXIT_FAIL}.get(v.status, EXIT_INCONCLUSIVE)


# -- parser ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags win")
    common.add_argument("--prime", default=None)
    common.add_argument("--profile", default=None, choices=["trivial", "complex", "real"])
    common.add_argument("--envelope", default=None)
    common.add_argument("--window", default=None)
    common.add_argument("--module", default=None)
    common.add_argument("--max-deg", default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--format", default=None, choices=["json", "svg", "txt"])

    p = _Parser(prog="msing", description="Motivic Steenrod algebra and Singer constructions")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", action="append", default=None,
                   help="suite name (repeatable or comma separated)")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("chart", parents=[common], help="Ext chart of a module or tower")
    c.add_argument("--mode", default=None, choices=["ext", "total-complex"])
    c.set_defaults(func=cmd_chart)

    s = sub.add_parser("singer", parents=[common], help="act on a Singer construction element")
    s.add_argument("--construction", default=None, choices=["small", "large"])
    s.add_argument("--op", default=None)
    s.add_argument("--element", default=None)
    s.add_argument("--band", default=None, help="r-window (small) or k-window (large), lo..hi")
    s.set_defaults(func=cmd_singer)

    r = sub.add_parser("resolve", parents=[common], help="minimal resolution as JSON")
    r.set_defaults(func=cmd_resolve)

    ln = sub.add_parser("lin", parents=[common], help="residue Ext-equivalence check")
    ln.add_argument("--min-width", default=None)
    ln.add_argument("--max-width", default=None)
    ln.add_argument("--width-step", default=None)
    ln.add_argument("--zero-map", action="store_true", default=None,
                    help="test hook: replace the residue by the zero map")
    ln.add_argument("--verbose", action="store_true", default=None)
    ln.set_defaults(func=cmd_lin)
    return p


DEFAULTS = {
    "verify": {},
    "chart": {"prime": "2", "profile": "trivial", "envelope": "2", "window": "s=0..3,ts=0..6",
              "module": "trivial", "format": "json", "mode": "ext"},
    "singer": {"prime": "2", "profile": "trivial", "envelope": "2", "module": "trivial",
               "construction": "small"},
    "resolve": {"prime": "2", "profile": "trivial", "envelope": "2", "window": "s=0..3,ts=0..6",
                "module": "trivial"},
    "lin": {"prime": "2", "profile": "trivial", "envelope": "3", "window": "s=0..3,ts=0..6",
            "min_width": "4", "max_width": "12", "width_step": "2", "zero_map": False,
            "verbose": False},
}


def _merge(args):
    """Fill unset flags from the config file, then from built-in defaults."""
    cfg = RunConfig.load(args.config).values if args.config else {}
    for key, val in cfg.items():
        if not hasattr(args, key):
            raise UsageError("unknown config key %r for %s" % (key, args.command))
        if getattr(args, key) is None:
            if key in ("zero_map", "verbose"):
                val = val.lower() in ("1", "true", "yes")
            setattr(args, key, val)
    for key, val in DEFAULTS[args.command].items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)
    missing = {"singer": ("op", "element")}.get(args.command, ())
    for key in missing:
        if getattr(args, key) is None:
            raise UsageError("--%s is required" % key)
    return args


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("choose a command: verify, chart, singer, resolve or lin")
        thread_cap()
        return args.func(_merge(args))
    except UsageError as exc:
        print("msing: error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
