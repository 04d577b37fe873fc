"""Command-line entry point: ``logicsat solve|gen-hwb|extract|bench``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .cnf import evaluate
from .dimacs import DimacsError, parse_dimacs, write_dimacs
from .hwb import build_miter, miter_comments
from .oracle import MAX_VARS, brute_force_sat
from .rules import match_rules, verify_match
from .simplify import simplify
from .splitter import SplitConfig, solve_formula
from .xor_extract import extract_xors

SCHEMA = "logicsat.run/1"
EXIT_SAT, EXIT_UNSAT, EXIT_UNKNOWN, EXIT_ERROR = 10, 20, 0, 1
STATUS_LINE = {"SAT": "SATISFIABLE", "UNSAT": "UNSATISFIABLE", "UNKNOWN": "UNKNOWN"}


@dataclass
class RunReport:
    instance: str
    verdict: str
    configuration: dict
    split: dict
    expected: Optional[str] = None
    wall_time: float = 0.0
    schema: str = SCHEMA
    extra: dict = field(default_factory=dict)

    def stats_record(self) -> dict:
        """Everything except timing, so that repeated runs are byte-identical."""
        d = asdict(self)
        d.pop("wall_time")
        return d


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-rules", action="store_true", help="skip rule consequences")
    p.add_argument("--no-split", action="store_true", help="plain CDCL, no splitting")
    p.add_argument("--cutoff-offset", type=int, default=4, metavar="K")
    p.add_argument("--fallback-cutoff", type=int, default=10, metavar="K")
    p.add_argument("--max-xor-arity", type=int, default=4, metavar="K")
    p.add_argument("--timeout", type=float, default=None, metavar="S")
    p.add_argument("--seed", type=int, default=None, metavar="N")
    p.add_argument("--debug-rules", action="store_true", help="oracle-check every rule match")


def _config(args, use_rules: Optional[bool] = None) -> SplitConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("LOGICSAT_SEED", "0"))
    return SplitConfig(
        cutoff_offset=args.cutoff_offset,
        fallback_cutoff=args.fallback_cutoff,
        max_xor_arity=args.max_xor_arity,
        use_rules=(not args.no_rules) if use_rules is None else use_rules,
        seed=seed,
        time_limit=args.timeout,
        debug_rules=args.debug_rules,
    )


def _snapshot(cfg: SplitConfig, split: bool) -> dict:
    d = asdict(cfg)
    d["split"] = split
    return d


def _expected(comments) -> Optional[str]:
    for c in comments:
        if c.lower().startswith("expected:"):
            return c.split(":", 1)[1].strip().upper()
    return None


def _read(path: str):
    data = Path(path).read_bytes()
    return parse_dimacs(data)


def run_instance(path: str, cfg: SplitConfig, split: bool = True) -> RunReport:
    formula, diag = _read(path)
    t0 = time.perf_counter()
    res = solve_formula(formula, cfg, split=split)
    wall = time.perf_counter() - t0
    report = RunReport(
        instance=Path(path).name,
        verdict=res.status,
        configuration=_snapshot(cfg, split),
        split=res.stats.as_dict(),
        expected=_expected(diag.comments),
        wall_time=wall,
    )
    report.extra["model"] = (
        [v if b else -v for v, b in sorted(res.model.items())] if res.model else None
    )
    return report


def cmd_solve(args) -> int:
    try:
        formula, diag = _read(args.file)
    except (OSError, DimacsError) as e:
        print(f"c error: {e}", file=sys.stderr)
        return EXIT_ERROR
    for line, msg in diag.warnings:
        print(f"c warning line {line}: {msg}")
    cfg = _config(args)
    t0 = time.perf_counter()
    res = solve_formula(formula, cfg, split=not args.no_split)
    wall = time.perf_counter() - t0
    report = RunReport(
        instance=Path(args.file).name,
        verdict=res.status,
        configuration=_snapshot(cfg, not args.no_split),
        split=res.stats.as_dict(),
        expected=_expected(diag.comments),
    )
    print(f"c time {wall:.3f}")
    print("c stats " + _dumps(report.stats_record()))
    if args.stats:
        with open(args.stats, "a") as fh:
            fh.write(_dumps(report.stats_record()) + "\n")
    if args.verify:
        if formula.num_vars <= MAX_VARS:
            o = brute_force_sat(formula)
            if res.status != "UNKNOWN" and o.status != res.status:
                print(f"c verify FAILED: oracle says {o.status}")
                return EXIT_ERROR
            print(f"c verify ok ({o.status})")
        else:
            print(f"c verify skipped ({formula.num_vars} > {MAX_VARS} variables)")
    print(f"s {STATUS_LINE[res.status]}")
    if res.status == "SAT":
        assert evaluate(formula, res.model)
        lits = [v if b else -v for v, b in sorted(res.model.items())]
        print("v " + " ".join(map(str, lits)) + " 0")
        return EXIT_SAT
    return EXIT_UNSAT if res.status == "UNSAT" else EXIT_UNKNOWN


def cmd_gen_hwb(args) -> int:
    if args.n < 2:
        print("c error: n must be at least 2", file=sys.stderr)
        return EXIT_ERROR
    f = build_miter(args.n, negate_second=args.broken)
    comments = miter_comments(args.n)
    if args.broken:
        comments = comments[:-1] + ("broken miter (second output negated)", "expected: SAT")
    data = write_dimacs(f, "native", comments)
    if args.output:
        try:
            Path(args.output).write_bytes(data)
        except OSError as e:
            print(f"c error: {e}", file=sys.stderr)
            return EXIT_ERROR
    else:
        sys.stdout.write(data.decode())
    return 0


def extract_report(formula, max_arity: int = 4, debug: bool = False) -> list[str]:
    g, rep = extract_xors(formula, max_arity)
    out = simplify(g)
    g2, _ = extract_xors(out.formula, max_arity)
    matches = match_rules(g2)
    arities = Counter(x.arity for x in g2.xors)
    lines = [f"c xors {sum(arities.values())}"]
    lines += [f"c xors arity={k} count={v}" for k, v in sorted(arities.items())]
    by_rule = Counter(m.rule for m in matches)
    lines.append(f"c matches {len(matches)}")
    lines += [f"c matches rule={k} count={v}" for k, v in sorted(by_rule.items())]
    if out.status == "proven_unsat":
        lines.append("c simplify proved the formula unsatisfiable")
    for m in matches:
        line = m.dump()
        if debug:
            line += " verified" if verify_match(m, g2) else " UNSOUND"
        lines.append(line)
    return lines


def cmd_extract(args) -> int:
    try:
        formula, _ = _read(args.file)
    except (OSError, DimacsError) as e:
        print(f"c error: {e}", file=sys.stderr)
        return EXIT_ERROR
    for line in extract_report(formula, args.max_xor_arity, args.debug_rules):
        print(line)
    return 0


def _bench_job(job):
    path, cfg, split = job
    return run_instance(path, cfg, split)


def bench_table(records: list[dict]) -> list[str]:
    """Render records (as produced by ``bench``) into the comparison table."""
    rows: dict[str, dict] = {}
    for r in records:
        label = "rules-on" if r["configuration"]["use_rules"] else "rules-off"
        rows.setdefault(r["instance"], {"expected": r.get("expected")})[label] = r
    out = [
        f"{'instance':<24} {'expected':>8} {'rules-on':>10} {'rules-off':>10} "
        f"{'verdict':>8} {'confl-on':>9} {'confl-off':>9} {'simpl%':>7}"
    ]
    subs = simpl = 0
    levels: Counter = Counter()
    agree = True
    for name in sorted(rows):
        row = rows[name]
        on, off = row.get("rules-on"), row.get("rules-off")

        def t(r):
            if r is None:
                return "-"
            if r["verdict"] == "UNKNOWN":
                return "timeout"
            return f"{r['wall_time']:.2f}"

        verdicts = {r["verdict"] for r in (on, off) if r and r["verdict"] != "UNKNOWN"}
        if len(verdicts) > 1:
            agree = False
        verdict = "/".join(sorted(verdicts)) or "UNKNOWN"
        frac = "-"
        if on is not None:
            s = on["split"]
            subs += s["subproblems"]
            simpl += s["subproblems_simplified"]
            levels.update({int(k): v for k, v in s["cdcl_call_levels"].items()})
            if s["subproblems"]:
                frac = f"{100.0 * s['subproblems_simplified'] / s['subproblems']:.1f}"
        out.append(
            f"{name:<24} {row['expected'] or '?':>8} {t(on):>10} {t(off):>10} {verdict:>8} "
            f"{on['split']['cdcl']['conflicts'] if on else '-':>9} "
            f"{off['split']['cdcl']['conflicts'] if off else '-':>9} {frac:>7}"
        )
    frac_all = f"{100.0 * simpl / subs:.1f}%" if subs else "n/a"
    out.append(f"c subproblems with non-empty CNF(G): {simpl}/{subs} ({frac_all})")
    hist = " ".join(f"{k}:{v}" for k, v in sorted(levels.items())) or "none"
    out.append(f"c CDCL call levels: {hist}")
    out.append(f"c verdicts agree across configurations: {'yes' if agree else 'NO'}")
    return out


def cmd_bench(args) -> int:
    if args.replay:
        records = [json.loads(l) for l in Path(args.replay).read_text().splitlines() if l.strip()]
        print("\n".join(bench_table(records)))
        return 0
    corpus = Path(args.dir)
    files = sorted(p for p in corpus.iterdir() if p.suffix in (".cnf", ".dimacs") and p.is_file())
    jobs = []
    for p in files:
        try:
            _read(str(p))
        except (OSError, DimacsError) as e:
            print(f"c warning: skipping {p.name}: {e}", file=sys.stderr)
            continue
        for rules in (True, False):
            jobs.append((str(p), _config(args, use_rules=rules), not args.no_split))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            reports = list(pool.map(_bench_job, jobs))
    else:
        reports = [_bench_job(j) for j in jobs]
    records = []
    sink = open(args.records, "a") if args.records else None
    try:
        for rep in reports:
            rec = asdict(rep)
            rec.pop("extra")
            records.append(rec)
            if sink:
                sink.write(_dumps(rec) + "\n")
    finally:
        if sink:
            sink.close()
    print("\n".join(bench_table(records)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logicsat", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a DIMACS file")
    s.add_argument("file")
    _add_solver_flags(s)
    s.add_argument("--verify", action="store_true", help="cross-check with the brute-force oracle")
    s.add_argument("--stats", metavar="FILE", help="append the stats record to FILE")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen-hwb", help="write an HWB equivalence-checking miter")
    g.add_argument("n", type=int)
    g.add_argument("-o", "--output")
    g.add_argument("--broken", action="store_true", help="negate one output (satisfiable)")
    g.set_defaults(func=cmd_gen_hwb)

    e = sub.add_parser("extract", help="report XORs and rule matches")
    e.add_argument("file")
    e.add_argument("--max-xor-arity", type=int, default=4)
    e.add_argument("--debug-rules", action="store_true")
    e.set_defaults(func=cmd_extract)

    b = sub.add_parser("bench", help="rules-on vs rules-off over a corpus")
    b.add_argument("dir", nargs="?", default=".")
    _add_solver_flags(b)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--records", metavar="FILE", help="append one JSON record per run")
    b.add_argument("--replay", metavar="FILE", help="render the table from saved records")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
