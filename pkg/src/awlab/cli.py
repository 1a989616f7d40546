"""Command line driver: ``awlab <command> [options]``.

Exit status: 0 when a verification passes (or a computation succeeds),
1 when a verification fails, 2 on usage or input errors.  Reports are JSON
with sorted keys and embed the resolved configuration, so identical
arguments give byte-identical output.

Word grammar for ``awlab moments`` (whitespace separates letters)::

    expr    := term (("+" | "-") term)*
    term    := coef | [coef ["*"]] word
    coef    := NUMBER | NUMBER "j" | "(" NUMBER ("+" | "-") NUMBER "j" ")"
    word    := letter+
    letter  := "s(" INT ")" | "l(" INT ")" | "l*(" INT ")" | "y" | "y*"

``s(i)`` is the semicircular field of the i-th real basis vector of the
representation, ``l(i)`` / ``l*(i)`` create / annihilate the i-th basis vector
of the complexification and ``y`` is the generalized circular element
``l(e1) + sqrt(lambda) l(e2)^*``.  Indices start at 1.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .fock import (FockBudgetError, build_fock, creation, generalized_circular,
                   semicircular_field, vacuum_expectation)
from .rep import RepSpec, RepSpecError, classify, parse_rep_spec
from .words import WordExpr

__all__ = ["main", "run", "parse_word_expr", "WordSyntaxError"]

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class WordSyntaxError(ValueError):
    code = "word_syntax"


class UsageError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# word grammar


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<complex>\(\s*[-+]?\d*\.?\d+(?:[eE][-+]?\d+)?\s*[-+]\s*\d*\.?\d+(?:[eE][-+]?\d+)?j\s*\))
  | (?P<number>\d*\.?\d+(?:[eE][-+]?\d+)?j?)
  | (?P<letter>l\*\(\s*\d+\s*\)|[sl]\(\s*\d+\s*\)|y\*|y)
  | (?P<op>[-+*])
""", re.VERBOSE)


def _tokenize(text: str) -> List[Tuple[str, str]]:
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise WordSyntaxError(f"unexpected input at position {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group().replace(" ", "")))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        if not self.tokens:
            raise WordSyntaxError("empty expression")

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self) -> WordExpr:
        sign = 1.0
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1.0 if val == "-" else 1.0
        out = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind is None:
                return out
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                out = out + t if val == "+" else out - t
            else:
                raise WordSyntaxError(f"expected '+' or '-', found {val!r}")

    def term(self) -> WordExpr:
        coef = 1.0 + 0j
        kind, val = self.peek()
        if kind in ("number", "complex"):
            self.take()
            coef = complex(val.replace("(", "").replace(")", ""))
            k2, v2 = self.peek()
            if k2 == "op" and v2 == "*":
                self.take()
            if self.peek()[0] != "letter":
                # a bare scalar term, or a number standing for the unit
                return WordExpr.scalar(coef)
        letters = []
        while self.peek()[0] == "letter":
            letters.append(self.take()[1])
        if not letters:
            raise WordSyntaxError(f"expected a letter, found {self.peek()[1]!r}")
        return WordExpr.from_word(tuple(_letter(tok) for tok in letters), coef)


def _letter(tok: str) -> Tuple[str, bool]:
    if tok == "y":
        return ("y", False)
    if tok == "y*":
        return ("y", True)
    m = re.fullmatch(r"(s|l\*?)\((\d+)\)", tok)
    kind, idx = m.group(1), int(m.group(2))
    if idx < 1:
        raise WordSyntaxError("indices start at 1")
    if kind == "s":
        return (f"s({idx})", False)
    return (f"l({idx})", kind == "l*")


def parse_word_expr(text: str) -> WordExpr:
    """Parse the ``moments`` word grammar into a :class:`WordExpr`."""
    return _Parser(text).expr()


# commands


def _load_rep(path: Optional[str]) -> Optional[RepSpec]:
    if path is None:
        return None
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError("io_error", f"cannot read {path}: {exc.strerror}") from None
    return parse_rep_spec(text)


def _config(args) -> dict:
    keys = ("command", "target", "rep", "depth", "lam", "seed", "samples", "format",
            "max_dim", "n", "family", "order", "freeness", "word_len", "expr")
    doc = {}
    for k in keys:
        if hasattr(args, k):
            v = getattr(args, k)
            doc["lambda" if k == "lam" else k] = v
    return doc


def cmd_classify(args) -> Tuple[dict, int]:
    rep = _load_rep(args.rep)
    if rep is None:
        raise UsageError("missing_rep", "classify needs --rep PATH")
    label = classify(rep)
    doc = label.to_json()
    doc["rep"] = rep.to_json()
    return doc, EXIT_PASS


def cmd_moments(args) -> Tuple[dict, int]:
    expr = parse_word_expr(" ".join(args.expr))
    rep = _load_rep(args.rep)
    names = expr.generators
    max_idx = 0
    for g in names:
        m = re.fullmatch(r"[sl]\((\d+)\)", g)
        if m:
            max_idx = max(max_idx, int(m.group(1)))
    if rep is None:
        rep = RepSpec.create(trivial_dim=max(2 if "y" in names else 1, max_idx))
    d = rep.dim
    if max_idx > d:
        raise UsageError("index_out_of_range", f"index {max_idx} exceeds dimension {d}")
    if "y" in names and d < 2:
        raise UsageError("dimension_mismatch", "y needs a one-particle space of dimension >= 2")
    if args.depth is None:
        args.depth = max(expr.degree, 1)
    depth = args.depth
    if "y" in names and args.lam is None:
        args.lam = 1.0
    F = build_fock(d, depth, max_dim=args.max_dim)
    basis = np.eye(d)
    ops = {}
    for g in names:
        if g == "y":
            ops[g] = generalized_circular(F, args.lam, basis[0], basis[1])
        else:
            idx = int(g[2:-1]) - 1
            ops[g] = (semicircular_field(F, rep, basis[idx]) if g.startswith("s")
                      else creation(F, basis[idx]))
    value, exact = vacuum_expectation(expr, ops, with_flag=True)
    return {"expr": str(expr), "value": [value.real, value.imag], "exact": exact,
            "fock": {"d": d, "depth": depth, "total_dim": F.total_dim},
            "rep": rep.to_json()}, EXIT_PASS


_VERIFY_DEFAULTS = {
    "semicircle": {"depth": 8},
    "freeness": {"depth": 6, "lam": 0.5, "seed": 0},
    "kms": {"depth": 4, "lam": 0.5},
    "tla": {"depth": 12, "lam": 0.5},
    "barnett": {"seed": 7, "samples": 200, "lam": 0.5},
}


def cmd_verify(args) -> Tuple[dict, int]:
    from . import suites
    target = args.target
    for key, value in _VERIFY_DEFAULTS[target].items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    if target == "semicircle":
        doc = suites.semicircle_suite(args.depth)
    elif target == "freeness":
        doc = suites.freeness_suite(args.lam, max_len=args.depth, seed=args.seed)
    elif target == "kms":
        rep = _load_rep(args.rep)
        doc = suites.kms_suite(None if rep is None else [rep], depth=args.depth,
                               period_lam=args.lam)
    elif target == "tla":
        if args.depth < 7:
            raise UsageError("depth_too_small", "the sweep runs from depth 6 and needs --depth >= 7")
        doc = suites.tla_suite(args.lam, tuple(range(6, args.depth + 1)))
    else:
        doc = suites.barnett_suite(args.seed, args.samples, args.lam)
    return doc, EXIT_PASS if doc["pass"] else EXIT_FAIL


def cmd_matrix_model(args) -> Tuple[dict, int]:
    from .matrix_models import EnsembleSpec, asymptotic_freeness_check, mc_moments
    if args.seed is None:
        args.seed = 0
    if args.samples is None:
        args.samples = 50
    spec = EnsembleSpec(args.n, args.samples, args.seed, args.family)
    if args.family == "gue_pair" and args.freeness:
        rep = asymptotic_freeness_check(spec, word_len=args.word_len)
        doc = rep.to_json()
        return doc, EXIT_PASS if rep.passed else EXIT_FAIL
    est = mc_moments(spec, args.order)
    ok = bool(np.all(est.within(3.0)))
    if args.format == "csv":
        return {"csv": est.to_csv(), "pass": ok}, EXIT_PASS if ok else EXIT_FAIL
    doc = est.to_json()
    doc["pass"] = ok
    return doc, EXIT_PASS if ok else EXIT_FAIL


def _tla_csv(doc: dict) -> str:
    lines = ["k,l,depth,defect"]
    for r in doc["reports"]:
        for k, row in enumerate(r["table"]):
            for l, v in enumerate(row):
                lines.append(f"{k},{l},{r['depth']},{v:.17g}")
    return "\n".join(lines) + "\n"


class _Parser_(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("usage", message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rep", metavar="PATH", help="representation file (JSON)")
    common.add_argument("--depth", type=int, help="Fock truncation depth")
    common.add_argument("--lambda", dest="lam", type=float, help="lambda in (0, 1]")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--max-dim", dest="max_dim", type=int,
                        help="largest Fock dimension allowed")

    p = _Parser_(prog="awlab", description="Free Araki-Woods numerical workbench")
    sub = p.add_subparsers(dest="command", parser_class=_Parser_)
    sub.required = True
    c = sub.add_parser("classify", parents=[common], help="factor type of a representation")
    c.set_defaults(func=cmd_classify)
    m = sub.add_parser("moments", parents=[common], help="vacuum moment of a word expression")
    m.add_argument("expr", nargs="+", help="word expression, e.g. 's(1) s(1)'")
    m.set_defaults(func=cmd_moments)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("target", choices=("semicircle", "freeness", "kms", "tla", "barnett"))
    v.set_defaults(func=cmd_verify)
    mm = sub.add_parser("matrix-model", parents=[common], help="Monte Carlo matrix models")
    mm.add_argument("--n", type=int, default=512, help="matrix size")
    mm.add_argument("--family", choices=("gue_single", "gue_pair", "complex_ginibre"),
                    default="gue_single")
    mm.add_argument("--order", type=int, default=4)
    mm.add_argument("--freeness", action="store_true",
                    help="with gue_pair: alternating centered trace words against bands")
    mm.add_argument("--word-len", dest="word_len", type=int, default=6)
    mm.set_defaults(func=cmd_matrix_model)
    return p


def _emit(doc: dict, out) -> None:
    out.write(json.dumps(doc, sort_keys=True, indent=1, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        doc, code = args.func(args)
    except UsageError as exc:
        _emit({"error": {"code": exc.code, "message": str(exc)}}, out)
        return EXIT_USAGE
    except FockBudgetError as exc:
        _emit({"error": {"code": exc.code, "message": str(exc),
                         "required_dim": exc.required_dim,
                         "required_bytes": exc.required_bytes}}, out)
        return EXIT_USAGE
    except (RepSpecError, WordSyntaxError) as exc:
        _emit({"error": {"code": exc.code, "message": str(exc)}}, out)
        return EXIT_USAGE
    except ValueError as exc:
        _emit({"error": {"code": "invalid_input", "message": str(exc)}}, out)
        return EXIT_USAGE
    if args.format == "csv" and args.command == "verify" and args.target == "tla":
        out.write(_tla_csv(doc))
        return code
    if args.format == "csv" and "csv" in doc:
        out.write(doc["csv"])
        return code
    doc["config"] = _config(args)
    doc["status"] = "PASS" if code == EXIT_PASS else "FAIL"
    _emit(doc, out)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
