"""Command-line driver. Exit status: 0 pass, 1 analysis failure, 2 parse or usage error."""

from __future__ import annotations

import argparse
import sys

from . import lra
from .ent import prop2_report
from .scenario import Report, ScenarioError, ScenarioFile, parse_scenario

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lrauth", description="Local random authentication analyses.")
    sub = ap.add_subparsers(dest="cmd", metavar="command")

    p = sub.add_parser("verify", help="check one authentication protocol")
    p.add_argument("file")
    p.add_argument("--question", type=int, required=True)
    p.add_argument("--protocol", required=True)

    p = sub.add_parser("complete", help="check a full strategy (protocols declared with for=k)")
    p.add_argument("file")

    p = sub.add_parser("nullspace", help="first-round orthogonality constraint space")
    p.add_argument("file")
    p.add_argument("--question", type=int, required=True)
    p.add_argument("--party", type=int, required=True)

    p = sub.add_parser("classify", help="classify a complete orthonormal basis")
    p.add_argument("file")

    p = sub.add_parser("conclusive", help="conclusive identification from a protocol")
    p.add_argument("file")
    p.add_argument("--question", type=int, help="authentication question to convert; "
                                                "omit to evaluate a tree with label leaves")
    p.add_argument("--protocol", required=True)

    sub.add_parser("prop2", help="two-copy qutrit report for psi4")

    p = sub.add_parser("demo", help="built-in demonstrations")
    p.add_argument("which", choices=["bell"])

    p = sub.add_parser("run", help="execute every 'analyze' directive in a file")
    p.add_argument("file")
    return ap


def _load(path: str) -> ScenarioFile:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise UsageError(f"{path}: not UTF-8 ({e})") from None
    return parse_scenario(text)


def _question(sf: ScenarioFile, k) -> int:
    if k is None:
        raise UsageError("a question index is required")
    k = int(k)
    if not 1 <= k <= len(sf.states):
        raise UsageError(f"question {k} out of range 1..{len(sf.states)}")
    return k


def _protocol(sf: ScenarioFile, name: str):
    if name is None:
        raise UsageError("a protocol name is required")
    try:
        return sf.tree(name)
    except KeyError:
        raise UsageError(f"unknown protocol {name!r}") from None


def analyze_verify(sf, question, protocol):
    return "verify", lra.verify_authentication(sf.scenario(), _question(sf, question), _protocol(sf, protocol))


def analyze_complete(sf):
    scn = sf.scenario()
    strategy = sf.strategy()
    missing = [k for k in range(1, len(scn) + 1) if k not in strategy]
    if missing:
        raise UsageError(f"no protocol declared (for=k) for questions {missing}")
    return "complete", lra.verify_complete_lra(scn, strategy)


def analyze_nullspace(sf, question, party):
    if party is None:
        raise UsageError("a party index is required")
    party = int(party)
    if not 0 <= party < len(sf.dims):
        raise UsageError(f"party {party} not in layout")
    return "nullspace", lra.constraint_verdict(sf.scenario(), _question(sf, question), party)


def analyze_classify(sf):
    return "classify", lra.classify_complete_basis(sf.scenario())


def analyze_conclusive(sf, protocol, question=None):
    scn = sf.scenario()
    tree = _protocol(sf, protocol)
    if question is None:
        res = lra.evaluate_conclusive(scn, tree)
    else:
        k = _question(sf, question)
        auth = lra.verify_authentication(scn, k, tree)
        if not auth.passed:
            return "conclusive", lra.Verdict(lra.CONCLUSIVE, False, auth.evidence,
                                             f"protocol does not authenticate {scn.name(k)}")
        res = lra.lra_to_conclusive(scn, k, tree)
    ok = res.success_probability > 0 and res.mislabel_probability <= lra.ATOL
    return "conclusive", lra.Verdict(lra.CONCLUSIVE, ok, {
        "success_probability": res.success_probability,
        "mislabel_probability": res.mislabel_probability,
        "identifications": res.detail,
    })


def analyze_prop2():
    return "prop2", prop2_report().as_dict()


def demo_bell():
    scn = lra.bell_triple()
    return "complete", lra.verify_complete_lra(scn, lra.bell_strategy())


def analyze_directives(sf: ScenarioFile):
    out = []
    for a in sf.analyses:
        p = dict(a.params)
        if a.kind == "verify":
            out.append(analyze_verify(sf, p.get("question"), p.get("protocol")))
        elif a.kind == "complete":
            out.append(analyze_complete(sf))
        elif a.kind == "nullspace":
            out.append(analyze_nullspace(sf, p.get("question"), p.get("party")))
        elif a.kind == "classify":
            out.append(analyze_classify(sf))
        elif a.kind == "conclusive":
            out.append(analyze_conclusive(sf, p.get("protocol"), p.get("question")))
        elif a.kind == "prop2":
            out.append(analyze_prop2())
    if not out:
        raise UsageError("file has no 'analyze' directives")
    return out


def run_cli(argv=None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    as_json = "--json" in argv
    argv = [a for a in argv if a != "--json"]
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_PASS
    if args.cmd is None:
        ap.print_usage(err)
        return EXIT_USAGE

    try:
        if args.cmd == "prop2":
            verdicts = [analyze_prop2()]
        elif args.cmd == "demo":
            verdicts = [demo_bell()]
        else:
            sf = _load(args.file)
            if args.cmd == "verify":
                verdicts = [analyze_verify(sf, args.question, args.protocol)]
            elif args.cmd == "complete":
                verdicts = [analyze_complete(sf)]
            elif args.cmd == "nullspace":
                verdicts = [analyze_nullspace(sf, args.question, args.party)]
            elif args.cmd == "classify":
                verdicts = [analyze_classify(sf)]
            elif args.cmd == "conclusive":
                verdicts = [analyze_conclusive(sf, args.protocol, args.question)]
            else:
                verdicts = analyze_directives(sf)
    except ScenarioError as e:
        print(str(e), file=err)
        return EXIT_USAGE
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE

    report = Report.build(" ".join(["lrauth"] + argv + (["--json"] if as_json else [])), verdicts)
    print(report.to_json() if as_json else report.to_text(), file=out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
