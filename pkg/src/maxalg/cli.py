"""Command-line front end: ``maxalg <command> [options]``.

Vertex indices in all output are 1-based. ``--json`` switches from the
human-readable report to a deterministic JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import acceptance
from .dynamics import (
    Word,
    boolean_period,
    commuting_word_limit,
    common_eigenbasis,
    elsner_period,
    lc_limit,
    oracle_iterate,
    periodic_point,
    power_limit,
    step_cap,
    two_matrix_boolean_limit,
)
from .errors import (
    DimensionError,
    InconclusiveError,
    IterationCancelled,
    ParseError,
    PreconditionError,
)
from .graphstruct import apply_permutation, frobenius_form, is_irreducible
from .maxcore import EXACT_TOL, STRUCT_TOL, MaxMatrix
from .spectral import critical_graph, dad_scale, mu, mu_bounds, spectrum

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_INCONCLUSIVE = 4
EXIT_VERIFY_FAILED = 5


# --------------------------------------------------------------------------- matrix files


@dataclass(frozen=True)
class MatrixFile:
    name: str
    matrix: MaxMatrix
    labels: tuple[str, ...] | None = None


def _number(tok: str, line: int, col: int) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", line, col) from None
    if not np.isfinite(x):
        raise ParseError(f"entry must be finite, got {tok!r}", line, col)
    if x < 0:
        raise ParseError(f"entry must be nonnegative, got {tok!r}", line, col)
    return x


def _parse_tsv(text: str) -> list[list[float]]:
    rows = []
    width = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if not toks:
            continue
        row = [_number(t, ln, c) for c, t in enumerate(toks, start=1)]
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"row has {len(row)} entries, expected {width}", ln, min(len(row), width) + 1)
        rows.append(row)
    if not rows:
        raise ParseError("empty matrix", 1, 1)
    if len(rows) != width:
        raise ParseError(f"matrix is {len(rows)}x{width}, not square", len(rows), width)
    return rows


def _parse_structured(text: str) -> tuple[list[list[float]], tuple[str, ...] | None]:
    if not text.strip():
        raise ParseError("empty document", 1, 1)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "n" not in doc or "rows" not in doc:
        raise ParseError("expected an object with fields 'n' and 'rows'", 1, 1)
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}", 1, 1)
    rows = doc["rows"]
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f"'rows' must hold {n} rows", 1, 1)
    out = []
    for i, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"row {i} must hold {n} entries", i, 1)
        vals = []
        for j, x in enumerate(row, start=1):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"not a number: {x!r}", i, j)
            vals.append(_number(repr(x), i, j))
        out.append(vals)
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n or not all(isinstance(s, str) for s in labels):
            raise ParseError(f"'labels' must be {n} strings", 1, 1)
        labels = tuple(labels)
    return out, labels


def parse_matrix(text: str, fmt: str = "tsv", name: str = "<input>") -> MatrixFile:
    """Read a matrix from ``tsv`` (whitespace rows) or ``structured`` (JSON) text."""
    if fmt == "tsv":
        rows, labels = _parse_tsv(text), None
    elif fmt == "structured":
        rows, labels = _parse_structured(text)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return MatrixFile(name, MaxMatrix(rows), labels)


def serialize_matrix(m: MatrixFile | MaxMatrix, fmt: str = "tsv") -> str:
    """Inverse of :func:`parse_matrix`; floats use the shortest round-trip form."""
    mf = m if isinstance(m, MatrixFile) else MatrixFile("<memory>", MaxMatrix.coerce(m))
    rows = mf.matrix.tolist()
    if fmt == "tsv":
        return "".join("\t".join(repr(float(x)) for x in row) + "\n" for row in rows)
    if fmt == "structured":
        doc: dict[str, Any] = {"n": mf.matrix.n, "rows": rows}
        if mf.labels is not None:
            doc["labels"] = list(mf.labels)
        return json.dumps(doc, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def load_matrix(path: str, fmt: str | None = None) -> MatrixFile:
    if path == "-":
        text, name = sys.stdin.read(), "<stdin>"
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}") from None
        name = path
    if fmt is None:
        fmt = "structured" if path.endswith(".json") else "tsv"
    return parse_matrix(text, fmt, name)


# --------------------------------------------------------------------------- reports


def _plain(x: Any) -> Any:
    """Convert numpy and library values into JSON-ready builtins."""
    if isinstance(x, MaxMatrix):
        return x.tolist()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


@dataclass
class RunReport:
    command: str
    inputs: list[str]
    result: dict[str, Any]
    timings: dict[str, float] = field(default_factory=dict)

    def to_json(self, with_timings: bool = False) -> str:
        doc = {"command": self.command, "inputs": self.inputs, "result": _plain(self.result)}
        if with_timings:
            doc["timings"] = self.timings
        return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_text(self, with_timings: bool = False) -> str:
        lines = [f"{self.command}: {', '.join(self.inputs) or '-'}"]
        for key in sorted(self.result):
            lines.extend(_text_field(key, _plain(self.result[key])))
        if with_timings:
            lines.extend(f"  time {k}: {v:.6f}s" for k, v in sorted(self.timings.items()))
        return "\n".join(lines) + "\n"


def _is_matrix(v: Any) -> bool:
    return isinstance(v, list) and bool(v) and all(isinstance(r, list) and r and not isinstance(r[0], (list, dict)) for r in v)


_PAIR_FIELDS = {"critical_edges", "access"}


def _text_field(key: str, v: Any, indent: str = "  ") -> list[str]:
    if key in _PAIR_FIELDS:
        return [f"{indent}{key}: " + (" ".join(f"({i},{j})" for i, j in v) or "none")]
    if _is_matrix(v):
        return [f"{indent}{key}:"] + [indent + "  " + "  ".join(repr(x) for x in row) for row in v]
    if isinstance(v, list) and v and all(_is_matrix(m) or isinstance(m, dict) for m in v):
        out = [f"{indent}{key}:"]
        for k, item in enumerate(v, start=1):
            if isinstance(item, dict):
                out.append(f"{indent}  [{k}]")
                for sub in sorted(item):
                    out.extend(_text_field(sub, item[sub], indent + "    "))
            else:
                out.extend(_text_field(f"[{k}]", item, indent + "  "))
        return out
    return [f"{indent}{key}: {json.dumps(v)}"]


class _Clock:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, phase: str, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timings[phase] = time.perf_counter() - start


def _one_based(pairs) -> list[list[int]]:
    return [[int(i) + 1, int(j) + 1] for i, j in pairs]


def _vector(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(" ", "").split(",") if t])
    except ValueError:
        raise PreconditionError(f"bad {what} {text!r}: expected comma-separated numbers") from None


# --------------------------------------------------------------------------- commands


def _single(args, clock: _Clock) -> MatrixFile:
    return clock.run("parse", load_matrix, args.file, args.format)


def _family(args, clock: _Clock) -> list[MatrixFile]:
    if not args.matrix:
        raise PreconditionError("give the matrices with repeated --matrix FILE")
    return [clock.run(f"parse {k}", load_matrix, p, args.format) for k, p in enumerate(args.matrix, start=1)]


def cmd_mu(args, clock):
    mf = _single(args, clock)
    m = clock.run("mu", mu, mf.matrix)
    res = {"mu": m, "bounds": list(mu_bounds(mf.matrix))}
    if m > 0:
        res["critical_edges"] = _one_based(critical_graph(mf.matrix, args.tol or STRUCT_TOL).critical_edges)
    return [mf.name], res


def cmd_fnf(args, clock):
    mf = _single(args, clock)
    form = clock.run("fnf", frobenius_form, mf.matrix)
    res = {
        "order": [v + 1 for v in form.order],
        "classes": [[v + 1 for v in c] for c in form.classes],
        "block_kind": list(form.block_kind),
        "access": _one_based((i, j) for i, j in np.argwhere(form.access) if i != j),
        "permuted": apply_permutation(mf.matrix, form),
    }
    return [mf.name], res


def cmd_critical(args, clock):
    mf = _single(args, clock)
    cg = clock.run("critical", critical_graph, mf.matrix, args.tol or STRUCT_TOL)
    res = {
        "mu": cg.mu,
        "critical_vertices": [v + 1 for v in cg.critical_vertices],
        "critical_edges": _one_based(cg.critical_edges),
        "critical_matrix": cg.critical_matrix,
    }
    return [mf.name], res


def cmd_spectrum(args, clock):
    mf = _single(args, clock)
    rep = clock.run("spectrum", spectrum, mf.matrix)
    res = {
        "mu": rep.mu,
        "class_mu": list(rep.class_mu),
        "classes": [[v + 1 for v in c] for c in rep.form.classes],
        "eigenvalues": [
            {"value": ev.value, "admissible": ev.admissible, "class": ev.witness_class + 1}
            for ev in rep.eigenvalues
        ],
        "admissible": rep.admissible_values,
        "eigenvectors": [{"value": lam, "vector": v} for lam, v in sorted(rep.eigenvectors.items())],
    }
    return [mf.name], res


def cmd_scale(args, clock):
    mf = _single(args, clock)
    seed = _vector(args.seed, "seed") if args.seed else None
    d, scaled = clock.run("scale", dad_scale, mf.matrix, seed)
    return [mf.name], {"d": d, "scaled": scaled}


def cmd_period(args, clock):
    mf = _single(args, clock)
    e = mf.matrix.entries
    tol = args.tol or EXACT_TOL
    if np.all((e == 0) | (e == 1)):
        rep = clock.run("period", boolean_period, mf.matrix, args.max_steps)
    elif is_irreducible(mf.matrix) and abs(mu(mf.matrix) - 1.0) <= STRUCT_TOL:
        rep = clock.run("period", elsner_period, mf.matrix, args.max_steps, tol)
    else:
        # Outside the exact-periodicity regime only the asymptotic period is defined.
        lim = clock.run("period", power_limit, mf.matrix, tol, args.max_steps)
        return [mf.name], {"q": lim.q, "t0": lim.t0, "method": "asymptotic_limit"}
    return [mf.name], {"q": rep.q, "t0": rep.t0, "method": rep.method}


def _limit_payload(lim) -> dict[str, Any]:
    return {"q": lim.q, "t0": lim.t0, "cycle_period": lim.cycle_period, "limits": list(lim.limits)}


def cmd_power_limit(args, clock):
    mf = _single(args, clock)
    lim = clock.run("power_limit", power_limit, mf.matrix, args.tol or EXACT_TOL, args.max_steps)
    return [mf.name], _limit_payload(lim)


def cmd_apply(args, clock):
    mf = _single(args, clock)
    tol = args.tol or EXACT_TOL
    lim = clock.run("power_limit", power_limit, mf.matrix, tol, args.max_steps)
    x = _vector(args.x, "x")
    pp = clock.run("periodic_point", periodic_point, mf.matrix, x, lim, args.j, tol)
    return [mf.name], {"q": lim.q, "j": args.j, "vector": pp.vector, "period": pp.period}


def cmd_word_limit(args, clock):
    files = _family(args, clock)
    mats = [f.matrix for f in files]
    w = Word.parse(args.word)
    tol = args.tol or EXACT_TOL
    if args.method == "two-matrix":
        if len(mats) != 2:
            raise PreconditionError("the two-matrix method needs exactly two --matrix files")
        tm = clock.run("word_limit", two_matrix_boolean_limit, mats[0], mats[1], w, tol, args.max_steps)
        res = _limit_payload(tm.limit)
        res.update(t0=tm.t0, membership=list(tm.membership))
    else:
        res = _limit_payload(clock.run("word_limit", commuting_word_limit, mats, w, tol))
    res["word"] = list(w.letters)
    return [f.name for f in files], res


def cmd_lc_limit(args, clock):
    files = _family(args, clock)
    mats = [f.matrix for f in files]
    if not args.vector:
        raise PreconditionError("give candidate eigenvectors with repeated --vector v1,v2,...")
    cands = [_vector(v, "vector") for v in args.vector]
    basis = clock.run("eigenbasis", common_eigenbasis, mats, cands, args.tol or STRUCT_TOL)
    coeffs = _vector(args.coeffs, "coefficients") if args.coeffs else np.ones(len(basis.vectors))
    xi = clock.run("lc_limit", lc_limit, mats, basis, coeffs, Word.parse(args.word), args.tol or EXACT_TOL)
    res = {
        "accepted": [v for v in basis.vectors],
        "eigenvalues": [list(row) for row in basis.eigenvalues],
        "persistent": [j + 1 for j in basis.persistent],
        "transient": [j + 1 for j in basis.transient],
        "rejected": [j + 1 for j in basis.rejected],
        "limit": xi,
    }
    return [f.name for f in files], res


def cmd_oracle(args, clock):
    mf = _single(args, clock)
    cap = args.max_steps if args.max_steps is not None else step_cap(mf.matrix.n)
    tr = clock.run(
        "oracle", oracle_iterate, mf.matrix, cap, args.zero_tol, args.tol or EXACT_TOL
    )
    res: dict[str, Any] = {"status": tr.status, "t0": tr.t0, "q": tr.q, "steps": len(tr.powers) - 1}
    if tr.status == "periodic":
        res["cycle"] = [tr.power(t) for t in range(tr.t0, tr.t0 + tr.q)]
    return [mf.name], res


def cmd_verify_fixtures(args, clock):
    results = clock.run("verify", acceptance.run_all, args.seed_rng)
    res = {
        "criteria": [
            {
                "number": r.number,
                "title": r.title,
                "passed": r.passed,
                "failed_checks": [{"check": n, "detail": d} for n, ok, d in r.checks if not ok],
            }
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    return [], res


COMMANDS = {
    "mu": (cmd_mu, "maximum circuit geometric mean, bounds and critical edges"),
    "fnf": (cmd_fnf, "Frobenius normal form"),
    "critical": (cmd_critical, "critical graph"),
    "spectrum": (cmd_spectrum, "max eigenvalues and eigenvectors"),
    "scale": (cmd_scale, "diagonal scaling bounded by the all-ones matrix"),
    "period": (cmd_period, "exact period and transient"),
    "power-limit": (cmd_power_limit, "limits of the power sequence"),
    "apply": (cmd_apply, "periodic point L(j) x"),
    "word-limit": (cmd_word_limit, "limits of powers of a word product"),
    "lc-limit": (cmd_lc_limit, "limit of a word product on a combination of common eigenvectors"),
    "oracle": (cmd_oracle, "brute-force power iteration with repeat detection"),
    "verify-fixtures": (cmd_verify_fixtures, "run the reference suite and report pass/fail"),
}

SINGLE = {"mu", "fnf", "critical", "spectrum", "scale", "period", "power-limit", "apply", "oracle"}
FAMILY = {"word-limit", "lc-limit"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--timings", action="store_true", help="include wall-clock time per phase")
    common.add_argument("--tol", type=float, default=None, help="override the default tolerance")
    common.add_argument("--max-steps", type=int, default=None, help="iteration cap")

    parser = _Parser(prog="maxalg", description="Max-times matrix algebra.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name in SINGLE:
            p.add_argument("file", help="matrix file, '-' for stdin")
        if name in SINGLE or name in FAMILY:
            p.add_argument("--format", choices=["tsv", "structured"], default=None,
                           help="input format (default: structured for .json, else tsv)")
        if name in FAMILY:
            p.add_argument("--matrix", action="append", default=[], help="matrix for the next letter")
            p.add_argument("--word", required=True, help="letters, e.g. 1,2,1")
        if name == "scale":
            p.add_argument("--seed", help="positive seed vector, comma-separated")
        if name == "apply":
            p.add_argument("--x", required=True, help="vector, comma-separated")
            p.add_argument("--j", type=int, default=1, help="residue class 1..q")
        if name == "word-limit":
            p.add_argument("--method", choices=["commuting", "two-matrix"], default="commuting")
        if name == "lc-limit":
            p.add_argument("--vector", action="append", default=[], help="candidate common eigenvector")
            p.add_argument("--coeffs", help="coefficients for the accepted vectors")
        if name == "oracle":
            p.add_argument("--zero-tol", type=float, default=0.0, help="clamp entries below this to 0")
        if name == "verify-fixtures":
            p.add_argument("--seed-rng", type=int, default=acceptance.SEED, help="seed for random suites")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    fn = COMMANDS[args.command][0]
    clock = _Clock()
    try:
        inputs, result = fn(args, clock)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, DimensionError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InconclusiveError, IterationCancelled) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except AssertionError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    report = RunReport(args.command, inputs, result, clock.timings)
    if args.json:
        sys.stdout.write(report.to_json(args.timings))
    elif args.command == "verify-fixtures":
        for c in result["criteria"]:
            status = "PASS" if c["passed"] else "FAIL"
            print(f"[{status}] criterion {c['number']}: {c['title']}")
            for f in c["failed_checks"]:
                print(f"       {f['check']}: {f['detail']}")
    else:
        sys.stdout.write(report.to_text(args.timings))
    if args.command == "verify-fixtures" and not result["all_passed"]:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
