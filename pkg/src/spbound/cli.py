"""Command-line frontend.

Every subcommand prints (or writes with --out) a JSON document carrying a
"schema_version" field. Exit status: 0 when every check passed, 1 when a
check failed (the JSON then has a "failures" list), 2 for invalid arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .rings import ZZ, Ring, factorize, v_of_ideal
from .symplectic import Long, SpMatrix, positive_roots, random_sp, relation_check, root_element
from .words import eval_word, verify_certificate, word_from_json, word_to_json

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass
class ExperimentConfig:
    command: str
    n: int = 3
    mod: int | None = None
    seed: int = 0
    word_length: int = 30
    samples: int = 50
    k: int = 1
    x: int = 1
    variant: str = "first"
    group: str = "sp4f2"
    set: str = "long-root"
    cutoff: int | None = None
    matrix: str | None = None
    out: str | None = None
    csv: str | None = None
    inputs: list[str] = field(default_factory=list)

    def validate(self) -> None:
        problems = []
        if self.n < 1:
            problems.append("--n must be positive")
        if self.mod is not None and self.mod < 2:
            problems.append("--mod must be at least 2")
        if self.word_length < 0:
            problems.append("--word-length must be nonnegative")
        if self.samples < 1:
            problems.append("--samples must be positive")
        if self.k < 1:
            problems.append("--k must be positive")
        if self.cutoff is not None and self.cutoff < 0:
            problems.append("--cutoff must be nonnegative")
        needs_mod = {"certify", "decompose", "pipeline", "lower-bound"}
        if self.command in needs_mod and self.mod is None:
            problems.append(f"{self.command} needs --mod")
        needs_rank3 = {"level-ideal", "certify", "hessenberg", "pipeline"}
        if self.command in needs_rank3 and self.n < 3:
            problems.append(f"{self.command} needs --n >= 3")
        if self.command == "lower-bound" and self.mod is not None and self.k > len(factorize(self.mod)):
            problems.append("--k exceeds the number of prime factors of --mod")
        if self.command == "hessenberg" and self.variant not in ("first", "second"):
            problems.append("--variant is first or second")
        if self.matrix is not None and not Path(self.matrix).exists():
            problems.append(f"matrix file {self.matrix} not found")
        for p in self.inputs:
            if not Path(p).exists():
                problems.append(f"input {p} not found")
        if problems:
            raise ConfigError(problems)

    @property
    def ring(self) -> Ring:
        return ZZ if self.mod is None else Ring(self.mod)


def _matrix(cfg: ExperimentConfig) -> SpMatrix:
    if cfg.matrix:
        A = SpMatrix.from_json(json.loads(Path(cfg.matrix).read_text()))
        if A.n != cfg.n or A.ring != cfg.ring:
            raise ConfigError([f"matrix file has n={A.n} over {A.ring}, flags say n={cfg.n} over {cfg.ring}"])
        return A
    return random_sp(cfg.n, cfg.ring, cfg.word_length, cfg.seed)


def _certificate(word, S, target, budget) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "certificate",
        "set": [A.to_json() for A in S],
        "word": word_to_json(word, target, budget),
    }


def _emit_certificate(word, S, target, budget, extra=None) -> tuple[dict, list]:
    ok = verify_certificate(word, S, target, budget)
    doc = _certificate(word, S, target, budget)
    doc.update(extra or {})
    return doc, ([] if ok else ["certificate failed verification"])


# ---------------------------------------------------------------------------
# Subcommands; each returns (document, failures)


def cmd_relations_check(cfg):
    ring = cfg.ring
    t = time.perf_counter()
    fails = relation_check(cfg.n, ring, samples=cfg.samples, seed=cfg.seed, roots=positive_roots(cfg.n))
    fails += relation_check(cfg.n, ring, samples=max(1, cfg.samples // 5), seed=cfg.seed + 1)
    doc = {
        "n": cfg.n,
        "ring": ring.to_json(),
        "samples": cfg.samples,
        "failures_count": len(fails),
        "seconds": round(time.perf_counter() - t, 3),
    }
    return doc, [f"{psi} {phi} a={a} b={b}" for psi, phi, a, b in fails]


def cmd_hessenberg(cfg):
    from .reduction import first_hessenberg, is_first_hessenberg, is_second_hessenberg, second_hessenberg

    A = _matrix(cfg)
    res = (first_hessenberg if cfg.variant == "first" else second_hessenberg)(A)
    fails = []
    if res.conjugator @ A @ res.conjugator.inverse() != res.form:
        fails.append("conjugation identity")
    check = is_first_hessenberg if cfg.variant == "first" else is_second_hessenberg
    if not check(res.form):
        fails.append("zero pattern")
    doc = {"input": A.to_json(), "variant": cfg.variant, "conjugator": res.conjugator.to_json(), "form": res.form.to_json()}
    return doc, fails


def cmd_level_ideal(cfg):
    from .bounds import pi_of_set
    from .reduction import level_ideal, scalar_congruence_failures, stage_totals

    A = _matrix(cfg)
    ci = level_ideal(A)
    V = v_of_ideal(ci.ideal)
    Pi = pi_of_set([A])
    fails = scalar_congruence_failures(A, ci.ideal)
    if not V.issubset(Pi):
        fails.append(f"V(I(A)) = {V} is not inside Pi = {Pi}")
    if ci.budget > 320 * cfg.n:
        fails.append("budget exceeds 320n")
    doc = {
        "input": A.to_json(),
        **ci.to_json(),
        "V": V.to_json(),
        "Pi": Pi.to_json(),
        "stage_totals": stage_totals(ci, cfg.n),
    }
    return doc, fails


def cmd_certify(cfg):
    from .reduction import level_ideal

    A = _matrix(cfg)
    ci = level_ideal(A)
    if not ci.ideal.contains(cfg.x):
        return {"ideal": ci.ideal.to_json(), "x": cfg.x}, [f"x = {cfg.x} is not in I(A)"]
    w = ci.certify(cfg.x)
    return _emit_certificate(w, [A], ci.target(cfg.x), ci.budget)


def cmd_decompose(cfg):
    from .decomposition import factor_elq, unipotent_decompose_sr1

    A = _matrix(cfg)
    F = unipotent_decompose_sr1(A)
    E = factor_elq(A)
    doc, fails = _emit_certificate(E.word, [], A, E.budget)
    doc["factors"] = {k: getattr(F, k).to_json() for k in ("u1p", "u1m", "u2p", "u2m")}
    doc["elq_length"] = len(E.word)
    if F.product() != A:
        fails.append("(U+U-)^2 product")
    return doc, fails


def cmd_pipeline(cfg):
    from .bounds import crt_generating_set
    from .decomposition import theorem_b1_pipeline

    S = crt_generating_set(cfg.ring, cfg.k, n=cfg.n).set
    A = _matrix(cfg)
    res = theorem_b1_pipeline(A, S)
    doc, fails = _emit_certificate(res.word, S, A, res.bound)
    doc["budget_report"] = res.report()
    return doc, fails


def _ball_set(cfg, group):
    from .bounds import no_eigenvalue_one_witness

    R = group.ring
    if cfg.set == "long-root":
        return [root_element(group.n, Long(1), 1, R)]
    if cfg.set == "witness":
        return [no_eigenvalue_one_witness(group.n, group.p)]
    if cfg.matrix:
        return [SpMatrix.from_json(json.loads(Path(cfg.matrix).read_text())).with_ring(R)]
    raise ConfigError([f"unknown --set {cfg.set!r} (long-root, witness, or --matrix)"])


def cmd_diameter(cfg):
    from .search import GroupSpec, bfs_balls

    group = GroupSpec.parse(cfg.group)
    S = _ball_set(cfg, group)
    rep = bfs_balls(S, group, cutoff=cfg.cutoff)
    if cfg.csv:
        Path(cfg.csv).write_text(rep.to_csv())
    return rep.to_json(), []


def cmd_lower_bound(cfg):
    from .bounds import check_x_pattern, crt_generating_set, pi_of_set

    cert = crt_generating_set(cfg.ring, cfg.k, n=cfg.n)
    fails = check_x_pattern(cert)
    if not pi_of_set(cert.set).is_empty():
        fails.append("Pi(S) is not empty")
    return cert.to_json(), fails


def cmd_verify(cfg):
    """Pure evaluation of certificate files; nothing is recomputed."""
    results, fails = [], []
    for path in cfg.inputs:
        try:
            doc = json.loads(Path(path).read_text())
            S = [SpMatrix.from_json(m) for m in doc["set"]]
            wj = doc["word"]
            w = word_from_json(wj)
            target = SpMatrix.from_json(wj["claimed_target"])
            budget = int(wj["budget"])
            ok = len(w) <= budget and eval_word(w, S) == target
        except (KeyError, ValueError, TypeError, IndexError) as e:
            ok, w, budget = False, None, None
            fails.append(f"{path}: malformed ({e})")
        results.append({"file": path, "ok": ok, "length": None if w is None else len(w), "budget": budget})
        if not ok and w is not None:
            fails.append(f"{path}: evaluation or budget check failed")
    return {"results": results}, fails


def cmd_report(cfg):
    """Summarize JSON artifacts into one CSV row each."""
    rows = []
    for path in cfg.inputs:
        doc = json.loads(Path(path).read_text())
        word = doc.get("word", {})
        rows.append(
            {
                "file": path,
                "kind": doc.get("kind", doc.get("group", "")),
                "length": len(word.get("letters", [])) if word else "",
                "budget": word.get("budget", doc.get("claimed_bound", "")),
                "diameter": doc.get("diameter", ""),
            }
        )
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["schema_version", "file", "kind", "length", "budget", "diameter"])
    writer.writeheader()
    for r in rows:
        writer.writerow({"schema_version": SCHEMA_VERSION, **r})
    if cfg.csv:
        Path(cfg.csv).write_text(buf.getvalue())
    return {"rows": rows}, []


COMMANDS = {
    "relations-check": cmd_relations_check,
    "hessenberg": cmd_hessenberg,
    "level-ideal": cmd_level_ideal,
    "certify": cmd_certify,
    "decompose": cmd_decompose,
    "pipeline": cmd_pipeline,
    "diameter": cmd_diameter,
    "lower-bound": cmd_lower_bound,
    "verify": cmd_verify,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mod=True, matrix=True):
        p.add_argument("--n", type=int, default=3)
        if mod:
            p.add_argument("--mod", type=int, default=None, help="modulus m; omit for the integers")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--word-length", type=int, default=30, help="length of the random root word")
        if matrix:
            p.add_argument("--matrix", help="JSON file with an input matrix")
        p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("relations-check", help="commutator relations on random parameters")
    common(p, matrix=False)
    p.add_argument("--samples", type=int, default=50)
    p = sub.add_parser("hessenberg", help="first or second Hessenberg form")
    common(p)
    p.add_argument("--variant", default="first")
    p = sub.add_parser("level-ideal", help="level ideal with its budget ledger")
    common(p)
    p = sub.add_parser("certify", help="word over {A} for a short root element eps(x)")
    common(p)
    p.add_argument("--x", type=int, default=1)
    p = sub.add_parser("decompose", help="(U+U-)^2 and EL_Q factorizations")
    common(p)
    p = sub.add_parser("pipeline", help="word over a CRT generating set for a target")
    common(p)
    p.add_argument("--k", type=int, default=1)
    p = sub.add_parser("diameter", help="conjugation word norm balls by BFS")
    p.add_argument("--group", default="sp4f2")
    p.add_argument("--set", default="long-root")
    p.add_argument("--matrix")
    p.add_argument("--cutoff", type=int, default=None, help="stop after this radius")
    p.add_argument("--csv", help="also write (radius, ball size) as CSV")
    p.add_argument("--out")
    p = sub.add_parser("lower-bound", help="CRT generating set with its lower-bound certificate")
    common(p, matrix=False)
    p.add_argument("--k", type=int, default=1)
    p = sub.add_parser("verify", help="evaluate certificate files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out")
    p = sub.add_parser("report", help="CSV summary of JSON artifacts")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--csv")
    p.add_argument("--out")
    return parser


def _config(ns: argparse.Namespace) -> ExperimentConfig:
    known = ExperimentConfig.__dataclass_fields__
    kwargs = {k: v for k, v in vars(ns).items() if k in known and v is not None}
    return ExperimentConfig(**kwargs)


def _write(doc: dict, out: str | None):
    text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cfg = _config(ns)
    try:
        cfg.validate()
        doc, fails = COMMANDS[cfg.command](cfg)
    except ConfigError as e:
        _write({"schema_version": SCHEMA_VERSION, "command": cfg.command, "errors": e.problems}, None)
        return 2
    except (ValueError, ArithmeticError) as e:
        _write({"schema_version": SCHEMA_VERSION, "command": cfg.command, "status": "error", "failures": [str(e)]}, None)
        return 1
    doc = {"schema_version": SCHEMA_VERSION, "command": cfg.command, **doc}
    doc["status"] = "ok" if not fails else "failed"
    if fails:
        doc["failures"] = fails
    _write(doc, cfg.out)
    return 0 if not fails else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
