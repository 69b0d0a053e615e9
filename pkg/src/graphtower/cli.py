"""Command line front end.

Exit codes: 0 success, 1 domain error (including a tower that has not
stabilized), 2 job-file parse error, 3 Kida verdict is a theorem violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .graphs import GraphError, jacobian, kappa, kappa_bruteforce
from .groups import GroupError
from .iwasawa import NotStabilizedError, TowerError, fit_invariants, kida_check, reproduce_table1, tower_report
from .jobspec import JobSpecError, load_jobspec
from .reports import (
    FIT_HEADER,
    TABLE1_HEADER,
    TOWER_HEADER,
    kida_rows,
    kida_table,
    fit_rows,
    render_table,
    table1_rows,
    tower_rows,
    write_csv,
    write_derived_layer,
)
from .voltage import VoltageError, connectivity, derive, quotient_voltage

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE, EXIT_VIOLATION = 0, 1, 2, 3

ORACLE_EDGE_LIMIT = 12


class CommandFailed(Exception):
    def __init__(self, code: int, kind: str, message: str, extra=None):
        super().__init__(message)
        self.code, self.kind, self.extra = code, kind, extra or {}


def _out_dir(args, job=None) -> Path:
    if args.output_dir:
        return Path(args.output_dir)
    if job is not None and job.output_dir:
        return Path(job.output_dir)
    return Path(".")


def _load(args):
    job = load_jobspec(args.job)
    stem = Path(args.job).stem
    n_max = args.n_max if getattr(args, "n_max", None) is not None else job.n_max
    return job, stem, n_max


def _emit(args, header, rows, path, title=None):
    write_csv(path, header, rows)
    if args.format == "table":
        if title:
            print(title)
        print(render_table(header, rows), end="")
    else:
        print(path.read_text(), end="")


def cmd_derive(args) -> int:
    job, stem, _ = _load(args)
    vg = job.voltage if args.quotient == "full" else quotient_voltage(job.voltage, "G")
    layer = derive(vg, args.level)
    out = _out_dir(args, job)
    vpath, epath = write_derived_layer(layer, out, f"{stem}_{args.quotient}_level{args.level}",
                                       job.edge_names)
    parts = connectivity(layer)
    print(f"level {args.level}: {layer.graph.num_vertices} vertices, "
          f"{layer.graph.num_undirected} edges, {parts} component(s)")
    print(vpath)
    print(epath)
    return EXIT_OK


def _tower_and_fit(vg, quotient, n_max):
    report = tower_report(vg, quotient, n_max)
    fit = fit_invariants(report)
    if not fit.stabilized:
        raise NotStabilizedError(f"{quotient} tower up to level {n_max}")
    return report, fit


def cmd_tower(args) -> int:
    job, stem, n_max = _load(args)
    quotient = args.quotient or job.quotient
    out = _out_dir(args, job)
    report = tower_report(job.voltage, quotient, n_max)
    _emit(args, TOWER_HEADER, tower_rows(report), out / f"{stem}_tower_{quotient}.csv")
    fit = fit_invariants(report)
    _emit(args, FIT_HEADER, fit_rows(fit, quotient), out / f"{stem}_fit_{quotient}.csv")
    if not fit.stabilized:
        raise NotStabilizedError(f"{quotient} tower up to level {n_max}")
    return EXIT_OK


def cmd_invariants(args) -> int:
    job, stem, n_max = _load(args)
    out = _out_dir(args, job)
    rows = []
    for quotient in ("full", "base"):
        report, fit = _tower_and_fit(job.voltage, quotient, n_max)
        write_csv(out / f"{stem}_tower_{quotient}.csv", TOWER_HEADER, tower_rows(report))
        rows.append((quotient, fit.lam, fit.mu, fit.nu, fit.n0, fit.stabilized))
    _emit(args, ("tower", "lambda", "mu", "nu", "n0", "stabilized"), rows,
          out / f"{stem}_invariants.csv")
    return EXIT_OK


def cmd_kida(args) -> int:
    job, stem, n_max = _load(args)
    out = _out_dir(args, job)
    report = kida_check(job.voltage, n_max)
    text = kida_table(report)
    (out / f"{stem}_kida.txt").parent.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}_kida.txt").write_text(text)
    write_csv(out / f"{stem}_kida.csv", FIT_HEADER, kida_rows(report))
    if args.format == "table":
        print(text, end="")
    else:
        print((out / f"{stem}_kida.csv").read_text(), end="")
    if report.verdict == "theorem-violation":
        raise CommandFailed(EXIT_VIOLATION, "theorem-violation",
                            "Kida identity or mu-criterion failed", {"lhs": report.lhs, "rhs": report.rhs})
    if report.verdict == "inconclusive":
        raise NotStabilizedError("fits for the Kida check")
    return EXIT_OK


def cmd_oracle(args) -> int:
    """Cross-check spanning-tree counts by determinant, Smith form and enumeration."""
    job, stem, n_max = _load(args)
    out = _out_dir(args, job)
    rows = []
    agree = True
    candidates = [("base", None, job.base)]
    for quotient in ("full", "base"):
        vg = job.voltage if quotient == "full" else quotient_voltage(job.voltage, "G")
        for n in range(n_max + 1):
            layer = derive(vg, n)
            if layer.graph.num_undirected > ORACLE_EDGE_LIMIT:
                break
            if connectivity(layer) == 1:
                candidates.append((quotient, n, layer.graph))
    for name, n, g in candidates:
        det_k = kappa(g)
        snf_k = kappa(g, method="smith")
        jac_k = jacobian(g).torsion_order
        brute = kappa_bruteforce(g) if g.num_undirected <= ORACLE_EDGE_LIMIT else None
        ok = det_k == snf_k == jac_k and (brute is None or brute == det_k)
        agree = agree and ok
        rows.append((name, n, g.num_vertices, g.num_undirected, det_k, snf_k, jac_k, brute, ok))
    _emit(args, ("tower", "n", "|V|", "|E|", "kappa_bareiss", "kappa_smith", "jac_order",
                 "kappa_enum", "agree"), rows, out / f"{stem}_oracle.csv")
    if not agree:
        raise CommandFailed(EXIT_DOMAIN, "oracle-mismatch", "spanning-tree counts disagree")
    return EXIT_OK


def cmd_table1(args) -> int:
    out = _out_dir(args)
    n_max = 4 if args.n_max is None else args.n_max
    report = reproduce_table1(args.p, args.m, n_max)
    path = out / f"table1_p{args.p}_m{args.m}.csv"
    _emit(args, TABLE1_HEADER, table1_rows(report), path)
    if not report.passed:
        first = report.failures()[0]
        raise CommandFailed(EXIT_DOMAIN, "table-mismatch",
                            f"case {first['case']}, row {first['row']}, level {first['level']}: "
                            f"expected {first['expected']}, observed {first['observed']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphtower",
        description="Iwasawa invariants and Kida's formula for towers of graph coverings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, job=True, n_max=True):
        if job:
            p.add_argument("job", help="YAML job file")
        if n_max:
            p.add_argument("--n-max", type=int, default=None, help="highest tower level")
        p.add_argument("--output-dir", default=None)
        p.add_argument("--format", choices=("csv", "table"), default="csv")

    p = sub.add_parser("derive", help="write the derived graph at one level as edge lists")
    common(p, n_max=False)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--quotient", choices=("full", "base"), default="full")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("tower", help="kappa and ord_p per level, plus the fitted invariants")
    common(p)
    p.add_argument("--quotient", choices=("full", "base"), default=None)
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("invariants", help="fitted (lambda, mu, nu) of both towers")
    common(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("kida", help="check Kida's formula and the mu-criterion")
    common(p)
    p.set_defaults(func=cmd_kida)

    p = sub.add_parser("oracle", help="cross-check kappa on small layers")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("table1", help="recompute the cycle-graph example table")
    common(p, job=False)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_table1)
    return parser


def _error_record(args, code, kind, message, extra=None):
    record = {"status": "error", "exit_code": code, "kind": kind, "message": message}
    record.update(extra or {})
    text = json.dumps(record, sort_keys=True)
    print(text, file=sys.stderr)
    try:
        out = Path(getattr(args, "output_dir", None) or ".")
        out.mkdir(parents=True, exist_ok=True)
        (out / "error.json").write_text(text + "\n")
    except OSError:
        pass
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except JobSpecError as exc:
        return _error_record(args, EXIT_PARSE, "parse-error", "invalid job file",
                             {"diagnostics": [vars(d) for d in exc.diagnostics]})
    except NotStabilizedError as exc:
        return _error_record(args, EXIT_DOMAIN, "not-stabilized", str(exc))
    except CommandFailed as exc:
        return _error_record(args, exc.code, exc.kind, str(exc), exc.extra)
    except (TowerError, GraphError, GroupError, VoltageError, OSError) as exc:
        return _error_record(args, EXIT_DOMAIN, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
