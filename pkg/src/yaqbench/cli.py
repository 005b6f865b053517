"""Command line entry point.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage or
parse error, 3 an internal search budget ran out.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Optional, Sequence

from . import acceptance
from .category.finmodel import FinModel
from .category.laws import DIAGRAMS, check_laws, default_objects
from .category.yaq import YAQ
from .config import CliConfig, ConfigError, load_config, parse_lawcfg
from .elaborate import NotTypeable, infer, infer_all
from .equivalence import ax_equal, normalize
from .quantum import (
    QuantumError, QubitBudgetExceeded, load_gate_table, quantum_signature, run_distribution, run_sample,
)
from .semantics import Uninterpretable, interpret
from .subtyping import BudgetExceeded, all_types, derive, is_subtype
from .syntax import ParseError, erase, is_pure, parse_judgment, parse_type, show
from .typecheck import Derivation, Judgment, TypingError, check

__all__ = ["main", "main_entry", "build_parser"]

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _Out:
    """Collects what a subcommand prints; JSON mode prints one document."""

    def __init__(self, fmt: str, stream):
        self.fmt, self.stream = fmt, stream

    def emit(self, text: str, doc=None):
        if self.fmt == "json" and doc is not None:
            self.stream.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
        else:
            self.stream.write(text.rstrip("\n") + "\n")


# ---------------------------------------------------------------- input


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None


def _parse_file(text: str, constants=None):
    """``(ctx, term, type)``; indexed syntax first, then pure syntax."""
    try:
        return parse_judgment(text, indexed=True, constants=constants)
    except ParseError as first:
        try:
            return parse_judgment(text, indexed=False, constants=constants)
        except ParseError as second:
            raise max(first, second, key=lambda e: (e.line, e.col)) from None


def _derive(ctx, term, ty, cfg: CliConfig, signature=None, placement: str = "shared") -> Derivation:
    if is_pure(term):
        return infer(ctx, term, ty, signature, cfg.bang_budget).derivation
    return check(Judgment(tuple(ctx), term, ty), signature, placement)


def _load(path: str, cfg: CliConfig, signature=None, placement: str = "shared") -> Derivation:
    # gate tables can add constants, which must not parse as variables
    ctx, term, ty = _parse_file(_read(path), set(signature) if signature else None)
    return _derive(ctx, term, ty, cfg, signature, placement)


def _span(text: str, sub: Optional[str]) -> Optional[list]:
    """Character offsets of ``sub`` in ``text`` modulo whitespace, if it occurs."""
    if not sub:
        return None
    pattern = r"\s*".join(re.escape(tok) for tok in sub.split())
    m = re.search(pattern, text)
    return [m.start(), m.end()] if m else None


# ---------------------------------------------------------------- subcommands


def cmd_sub(args, cfg, out) -> int:
    a, b = parse_type(args.lhs), parse_type(args.rhs)
    yes = is_subtype(a, b)
    doc = {"lhs": show(a), "rhs": show(b), "subtype": yes}
    text = "yes" if yes else "no"
    if args.derive:
        doc["derivation"] = derive(a, b)
        text += "\n" + json.dumps(doc["derivation"], indent=2)
    out.emit(text, doc)
    return EXIT_OK if yes else EXIT_NEGATIVE


def cmd_check(args, cfg, out) -> int:
    text = _read(args.file)
    sig = quantum_signature(_gates(cfg)) if cfg.gates else None
    ctx, term, ty = _parse_file(text, set(sig) if sig else None)
    try:
        d = check(Judgment(tuple(ctx), term, ty), sig, args.placement)
    except TypingError as exc:
        at = show(exc.term) if exc.term is not None else None
        doc = {"error": type(exc).__name__, "message": str(exc), "at": at or "", "span": _span(text, at)}
        out.emit(f"{type(exc).__name__}: {exc}" + (f"\n  span {doc['span']}" if doc["span"] else ""), doc)
        return EXIT_NEGATIVE
    out.emit(f"ok: {Judgment(d.ctx, d.term, d.ty)}", d.to_json())
    return EXIT_OK


def cmd_infer(args, cfg, out) -> int:
    ctx, term, ty = _parse_file(_read(args.file))
    goal = parse_type(args.goal) if args.goal else ty
    try:
        rs = infer_all(ctx, term, goal, args.k, None, cfg.bang_budget)
    except NotTypeable as exc:
        out.emit(f"NotTypeable: {exc}", {"error": "NotTypeable", "message": str(exc)})
        return EXIT_NEGATIVE
    lines = [f"{show(r.term)} : {show(r.ty)}" for r in rs]
    out.emit("\n".join(lines), {"indexations": [r.derivation.to_json() for r in rs]})
    return EXIT_OK


def cmd_erase(args, cfg, out) -> int:
    _, term, _ = _parse_file(_read(args.file))
    e = show(erase(term))
    out.emit(e, {"term": e})
    return EXIT_OK


def cmd_normalize(args, cfg, out) -> int:
    d = _load(args.file, cfg)
    nf = normalize(d, None, cfg.normalize_steps)
    out.emit(show(nf), {"term": show(nf), "type": show(d.ty)})
    return EXIT_OK


def cmd_eq(args, cfg, out) -> int:
    c1, t1, ty1 = _parse_file(_read(args.file1))
    c2, t2, ty2 = _parse_file(_read(args.file2))
    # a header-less second file borrows the first file's context and type
    if not c2 and ty2 is None:
        c2, ty2 = c1, ty1
    d1 = _derive(c1, t1, ty1, cfg)
    d2 = _derive(c2, t2, ty2 or d1.ty, cfg)
    v = ax_equal(d1, d2, None, steps=cfg.normalize_steps, depth=cfg.bfs_depth, max_nodes=cfg.bfs_nodes)
    out.emit(v.status, v.to_json())
    return EXIT_OK if v.status == "equal" else EXIT_NEGATIVE


def _model(name: str):
    return YAQ() if name == "yaq" else FinModel()


def cmd_denote(args, cfg, out) -> int:
    d = _load(args.file, cfg)
    model = _model(args.model)
    den = interpret(d, model, args.kind)
    arrow = den.arrow
    doc = {"model": model.name, "kind": den.kind, "dom": show(model.dom(arrow)), "cod": show(model.cod(arrow))}
    if model.name == "yaq":
        doc["term"] = str(arrow)
        text = str(arrow)
    else:
        doc["table"] = [list(row) for row in model.table(arrow)]
        text = "\n".join(f"{x}\t{y}" for x, y in doc["table"])
    out.emit(text, doc)
    return EXIT_OK


def _objects(spec: Optional[str], model, cfg: CliConfig):
    if not spec:
        return default_objects(model, cfg.law_max_size) if model.name == "yaq" else None
    if spec.startswith("size:"):
        return list(all_types(int(spec[5:]), constants=("a",), unit=True))
    return [parse_type(s) for s in spec.split(";") if s.strip()]


def cmd_laws(args, cfg, out) -> int:
    law = parse_lawcfg(_read(args.lawcfg)) if args.lawcfg else {}
    model = _model(args.model or law.get("model", "finset"))
    objects = _objects(args.objects or law.get("objects"), model, cfg)
    limit = args.limit if args.limit is not None else law.get("limit", cfg.law_limit)
    diagrams = args.diagram or law.get("diagrams")
    unknown = set(diagrams or ()) - {d.id for d in DIAGRAMS}
    if unknown:
        raise _Usage(f"unknown diagram(s): {', '.join(sorted(unknown))}")
    optional = law.get("optional_limit", 1 if model.name == "yaq" else None)
    rep = check_laws(model, objects, limit or None, law.get("seed", cfg.seed), diagrams, optional)
    doc = rep.to_json()
    lines = [f"{e.diagram}\t{','.join(e.objects)}\t{e.verdict}" for e in rep.entries]
    lines.append(f"# {rep.model}: {len(rep.entries)} checked, {len(rep.failures())} failures")
    out.emit("\n".join(lines), doc)
    return EXIT_OK if rep.all_pass() else EXIT_NEGATIVE


def _gates(cfg: CliConfig):
    return load_gate_table(cfg.gates) if cfg.gates else None


def cmd_run(args, cfg, out) -> int:
    gates = _gates(cfg)
    sig = quantum_signature(gates)
    d = _load(args.file, cfg, sig)
    stem = os.path.splitext(os.path.basename(args.file))[0] if args.file != "-" else "stdin"
    if args.shots is not None:
        seed = args.seed if args.seed is not None else cfg.seed
        counts = run_sample(d, args.shots, seed, gates, cfg.max_qubits, sig)
        doc = {"kind": "histogram", "shots": args.shots, "seed": seed, "counts": counts}
        rows = [(k, v) for k, v in counts.items()]
        header, values, ylabel = ("value", "count"), {k: float(v) for k, v in counts.items()}, "count"
    else:
        dist = run_distribution(d, gates, cfg.max_qubits, sig)
        doc = dist.to_json()
        rows = [(o["value"], o["probability"]) for o in doc["outcomes"]]
        header, values, ylabel = ("value", "probability"), {k: float(p) for k, p in dist.probs.items()}, "probability"
    out.emit("\n".join(f"{k}\t{v}" for k, v in rows), doc)
    if args.figures:
        from . import report  # matplotlib is slow to import; only load it when drawing
        os.makedirs(args.figures, exist_ok=True)
        report.write_tsv(os.path.join(args.figures, f"{stem}.tsv"), header, rows)
        report.plot_outcomes(os.path.join(args.figures, f"{stem}.png"), values, show(d.term), ylabel)
    return EXIT_OK


def cmd_corpus(args, cfg, out) -> int:
    names = args.suite or list(acceptance.SUITES)
    unknown = [n for n in names if n not in acceptance.SUITES]
    if unknown:
        raise _Usage(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(acceptance.SUITES)}")

    def progress(r):
        if cfg.format == "text":
            out.stream.write(r.line() if args.timings else _untimed(r.line()))
            out.stream.write("\n")
            out.stream.flush()

    results = acceptance.run_suites(names, progress)
    ok = all(r.passed for r in results)
    docs = []
    for r in results:
        doc = r.to_json()
        if not args.timings:
            doc.pop("seconds")
        docs.append(doc)
    if cfg.format == "json":
        out.emit("", {"all_pass": ok, "criteria": docs})
    if args.out:
        from . import report  # see cmd_run
        os.makedirs(args.out, exist_ok=True)
        header = ["criterion", "suite", "passed", "checked", "failures"] + (["seconds"] if args.timings else [])
        rows = []
        for name, r in zip(names, results):
            row = [r.number, name, "pass" if r.passed else "fail", r.checked, len(r.failures)]
            rows.append(row + ([f"{r.seconds:.3f}"] if args.timings else []))
        report.write_tsv(os.path.join(args.out, "corpus.tsv"), header, rows)
        report.plot_corpus(args.out, results, timings=args.timings)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _untimed(line: str) -> str:
    return re.sub(r" \(\d+\.\d+s\)$", "", line)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="yaqbench", description="Workbench for a call-by-value linear lambda calculus.")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--format", choices=("text", "json"), help="output format (default text)")
    p.add_argument("--seed", type=int, help="seed for sampled checks and shots")
    p.add_argument("--gates", help="JSON gate table extending the built-in gates")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sub", help="decide A <: B")
    s.add_argument("lhs")
    s.add_argument("rhs")
    s.add_argument("--derive", action="store_true", help="print the derivation tree")
    s.set_defaults(fn=cmd_sub)

    s = sub.add_parser("check", help="type check an indexed judgment")
    s.add_argument("file")
    s.add_argument("--placement", choices=("shared", "minimal"), default="shared")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("infer", help="elaborate a pure term")
    s.add_argument("file")
    s.add_argument("--goal", help="result type")
    s.add_argument("-k", type=int, default=1, help="number of indexations to list")
    s.set_defaults(fn=cmd_infer)

    s = sub.add_parser("erase", help="drop annotations and indices")
    s.add_argument("file")
    s.set_defaults(fn=cmd_erase)

    s = sub.add_parser("normalize", help="print a normal form")
    s.add_argument("file")
    s.set_defaults(fn=cmd_normalize)

    s = sub.add_parser("eq", help="decide axiomatic equivalence")
    s.add_argument("file1")
    s.add_argument("file2")
    s.set_defaults(fn=cmd_eq)

    s = sub.add_parser("denote", help="interpret a judgment in a model")
    s.add_argument("file")
    s.add_argument("--model", choices=("yaq", "finset"), default="finset")
    s.add_argument("--kind", choices=("v", "c"), default="c")
    s.set_defaults(fn=cmd_denote)

    s = sub.add_parser("laws", help="check the categorical laws of a model")
    s.add_argument("--model", choices=("yaq", "finset"))
    s.add_argument("--objects", help="'size:N' or a ';'-separated list of types")
    s.add_argument("--limit", type=int, help="tuples per diagram (0: all)")
    s.add_argument("--diagram", action="append", help="restrict to a diagram id (repeatable)")
    s.add_argument("--lawcfg", help="law configuration file")
    s.set_defaults(fn=cmd_laws)

    s = sub.add_parser("run", help="evaluate a quantum program")
    s.add_argument("file")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--shots", type=int, help="sample this many runs")
    mode.add_argument("--exact", action="store_true", help="exact outcome distribution (default)")
    s.add_argument("--figures", metavar="DIR", help="write a TSV and a bar chart to DIR")
    s.set_defaults(fn=cmd_run)

    s = sub.add_parser("corpus", help="run the bundled acceptance corpus")
    s.add_argument("--suite", action="append", help=f"one of: {', '.join(acceptance.SUITES)} (repeatable)")
    s.add_argument("--out", metavar="DIR", help="write corpus.tsv and figures to DIR")
    s.add_argument("--timings", action="store_true", help="include wall times (not reproducible)")
    s.set_defaults(fn=cmd_corpus)
    return p


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config).override(format=args.format, seed=args.seed, gates=args.gates)
    except (OSError, ConfigError) as exc:
        stderr.write(f"config error: {exc}\n")
        return EXIT_USAGE
    if getattr(args, "shots", None) is not None and args.shots < 0:
        stderr.write("--shots must be non-negative\n")
        return EXIT_USAGE
    out = _Out(cfg.format, stdout)
    try:
        return args.fn(args, cfg, out)
    except (_Usage, ConfigError) as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        out_err = {"error": "ParseError", "message": str(exc), "line": exc.line, "col": exc.col}
        _report(stderr, out, out_err)
        return EXIT_USAGE
    except (BudgetExceeded, QubitBudgetExceeded) as exc:
        _report(stderr, out, {"error": type(exc).__name__, "message": str(exc)})
        return EXIT_BUDGET
    except (TypingError, QuantumError, Uninterpretable, ValueError) as exc:
        _report(stderr, out, {"error": type(exc).__name__, "message": str(exc)})
        return EXIT_NEGATIVE


def _report(stderr, out: _Out, doc: dict) -> None:
    if out.fmt == "json":
        out.emit("", doc)
    else:
        stderr.write(f"{doc['error']}: {doc['message']}\n")


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
