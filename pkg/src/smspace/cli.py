"""Command line driver.

Exit codes: 0 ok, 2 a cap or budget was exhausted, 3 validation error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from multiprocessing import Pool
from pathlib import Path

from . import lab, presentation as pres, smachine as sm, tm
from .words import Alphabet

EXIT_OK, EXIT_CAP, EXIT_INVALID = 0, 2, 3


class CliError(Exception):
    pass


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True)


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read {path}: {e}") from None


def load_machine(source):
    """A TMachine or SMachine from a file, or the shipped toy machine."""
    if source in (None, "toy"):
        return tm.toy_machine()
    doc = _load_json(source)
    if "rules" in doc:
        return sm.smachine_from_json(doc)
    return tm.machine_from_json(doc)


def dump_machine(M) -> str:
    if isinstance(M, tm.TMachine):
        return _dump(tm.machine_to_json(M))
    return _dump(sm.smachine_to_json(M))


def parse_stage(stage: str):
    name, _, arg = stage.partition(":")
    if name in ("multiply", "hat"):
        try:
            L = int(arg)
        except ValueError:
            raise CliError(f"stage {stage!r} needs an even count, e.g. {name}:4") from None
        if L < 2 or L % 2:
            raise CliError(f"L must be even and at least 2, got {L}")
        return name, L
    if name not in ("pad", "symmetrize", "split", "normalize", "smachine", "compose"):
        raise CliError(f"unknown stage {stage!r}")
    return name, None


def run_stages(M, stages, log=None):
    for stage in stages:
        name, L = parse_stage(stage)
        if name in ("pad", "symmetrize", "split", "normalize", "smachine", "compose") \
                and not isinstance(M, tm.TMachine):
            raise CliError(f"stage {name!r} needs a Turing machine")
        if name in ("multiply", "hat") and not isinstance(M, sm.SMachine):
            raise CliError(f"stage {name!r} needs an S-machine")
        if name == "pad":
            M = tm.pad_machine(M)
        elif name == "symmetrize":
            M = tm.symmetrize(M)
        elif name == "split":
            M = tm.split_single_letter(M)
        elif name == "normalize":
            M = tm.normalize_s10(M)
        elif name == "smachine":
            M = sm.s_from_tm(M)
        elif name == "compose":
            M = sm.compose(M)
        elif name == "multiply":
            M = sm.multiply(M, L)
        else:
            M = sm.hat_variant(M, L)
        if log is not None:
            log(stage, M)
    return M


def _counts(M) -> str:
    if isinstance(M, tm.TMachine):
        states = sum(len(b) for b in M.state_blocks)
        return f"tapes={M.tapes} states={states} commands={len(M.commands)}"
    states = sum(len(b) for b in M.blocks)
    return f"blocks={M.N} states={states} rules={len(M.rules)}"


def load_config(path) -> dict:
    return {} if path is None else _load_json(path)


def _opt(args, cfg, key, default=None):
    v = getattr(args, key, None)
    if v is not None:
        return v
    return cfg.get(key, default)


def _delta(args, cfg):
    d = _opt(args, cfg, "delta")
    return None if d is None else Fraction(d)


def cmd_build(args, cfg):
    M = load_machine(_opt(args, cfg, "machine"))
    stages = _opt(args, cfg, "stages", [])
    if isinstance(stages, str):
        stages = [s for s in stages.split(",") if s]
    lines = [f"input: {_counts(M)}"]
    M = run_stages(M, stages, lambda st, X: lines.append(f"{st}: {_counts(X)}"))
    print("\n".join(lines), file=sys.stderr)
    _write(_opt(args, cfg, "output"), dump_machine(M))
    return EXIT_OK


def cmd_compile(args, cfg):
    S = load_machine(_opt(args, cfg, "smachine"))
    if not isinstance(S, sm.SMachine):
        raise CliError("compile needs a multiplied S-machine file")
    hat = _opt(args, cfg, "hat")
    if hat:
        H = load_machine(hat)
        P = pres.compile_embedding(S, H, _delta(args, cfg))
    else:
        P = pres.compile(S, _delta(args, cfg))
    print(f"generators={len(P.alphabet)} relators={len(P.relators)} N={P.N}", file=sys.stderr)
    _write(_opt(args, cfg, "output"), pres.dumps(P))
    return EXIT_OK


def load_presentation(path) -> pres.GroupPresentation:
    if path is None:
        raise CliError("--presentation is required")
    return pres.presentation_from_json(_load_json(path))


def _parse_word(al: Alphabet, text) -> tuple:
    toks = text.split() if isinstance(text, str) else list(text)
    return al.word(toks)


def cmd_space(args, cfg):
    P = load_presentation(_opt(args, cfg, "presentation"))
    cap = int(_opt(args, cfg, "cap", 32))
    budget = int(_opt(args, cfg, "budget", 10**6))
    metric = _opt(args, cfg, "metric", "comb")
    delta = _delta(args, cfg)
    out = {}
    if _opt(args, cfg, "smachine"):
        S = load_machine(_opt(args, cfg, "smachine"))
        u = S.input_by_name(str(_opt(args, cfg, "input", "")).split())
        W = S.input_word(u)
        found = sm.s_space_search(S, W, int(_opt(args, cfg, "machine_cap", cap)),
                                  int(_opt(args, cfg, "time_cap", 10**6)))
        if not found.accepted:
            print("no accepting computation within the caps", file=sys.stderr)
            return EXIT_CAP if found.exhausted else EXIT_INVALID
        C = sm.run(S, W, found.history)
        D = lab.witness_derivation(P, C, S)
        v = lab.verify(P, D)
        out["witness_space"] = v.space
        out["computation"] = sm.computation_to_json(S, C)
        if _opt(args, cfg, "derivation_out"):
            Path(_opt(args, cfg, "derivation_out")).write_text(_dump(D.to_json(P, v.space)) + "\n")
        w = W.word()
    else:
        w = _parse_word(P.alphabet, _opt(args, cfg, "word", ""))
    res = lab.space_search(P, w, cap, budget, metric, delta)
    out.update({"word": P.alphabet.spell(w), "cap": cap, "status": res.status,
                "space": None if res.space is None else str(res.space),
                "explored": res.explored})
    if res.witness is not None:
        out["derivation"] = res.witness.to_json(P, res.witness.space(P))
    _write(_opt(args, cfg, "output"), _dump(out))
    return EXIT_CAP if res.status == "exhausted" else EXIT_OK


def _search_one(job):
    P, w, cap, budget, metric, delta = job
    return lab.space_search(P, w, cap, budget, metric, delta)


def cmd_table(args, cfg):
    P = load_presentation(_opt(args, cfg, "presentation"))
    n_max = int(_opt(args, cfg, "n_max", 4))
    cap = int(_opt(args, cfg, "cap", 2 * n_max))
    budget = int(_opt(args, cfg, "budget", 10**5))
    metric = _opt(args, cfg, "metric", "comb")
    delta = _delta(args, cfg)
    source = _opt(args, cfg, "words")
    if source:
        words = [P.alphabet.word(w) for w in _load_json(source)]
    else:
        words = lab.enumerate_words(P, n_max)
    words = [w for w in words if len(w) <= n_max]
    jobs = int(_opt(args, cfg, "jobs", 1))
    if jobs > 1:
        with Pool(jobs) as pool:
            results = pool.map(_search_one, [(P, w, cap, budget, metric, delta) for w in words])
        one = iter(results)
        rows = lab.space_function(P, n_max, cap, words, budget, metric, delta,
                                  search=lambda *_a, **_k: next(one))
    else:
        rows = lab.space_function(P, n_max, cap, words, budget, metric, delta)
    _write(_opt(args, cfg, "output"), lab.table_csv(rows))
    return EXIT_CAP if any(r[3] != "proven" for r in rows) else EXIT_OK


def cmd_verify(args, cfg):
    P = load_presentation(_opt(args, cfg, "presentation"))
    D = lab.Derivation.from_json(_load_json(args.derivation), P)
    v = lab.verify(P, D)
    if v.ok:
        print(f"ok space={v.space}")
        return EXIT_OK
    print(f"fail at step {v.failed_at}: {v.message}")
    return EXIT_INVALID


G_SPECS = {
    "identity": lambda n: n,
    "linear": lambda n: n,
    "double": lambda n: 2 * n,
    "square": lambda n: n * n,
    "exp": lambda n: 2 ** n,
    "log": lambda n: max(1, n.bit_length()),
}


def cmd_fit(args, cfg):
    rows = lab.read_table_csv(Path(_opt(args, cfg, "table")).read_text())
    g = _opt(args, cfg, "g", "identity")
    if g in G_SPECS:
        gf = G_SPECS[g]
    else:
        gf = lab.read_table_csv(Path(g).read_text())
    c = lab.preceq_fit(rows, gf, int(_opt(args, cfg, "c_max", 8)))
    print("none" if c is None else c)
    return EXIT_OK


def cmd_check(args, cfg):
    M = load_machine(_opt(args, cfg, "machine"))
    M.validate()
    if isinstance(M, tm.TMachine):
        problems = tm.check_s10(M)
        print(f"valid TM: {_counts(M)}; symmetric={M.symmetric}; "
              f"s10={'yes' if not problems else 'no (' + '; '.join(problems) + ')'}")
        samples = int(_opt(args, cfg, "samples", 0))
        if samples:
            rng = random.Random(int(_opt(args, cfg, "seed", 0)))
            ok = replay_check(M, samples, rng)
            print(f"replayed {samples} random computations: {'ok' if ok else 'MISMATCH'}")
            if not ok:
                return EXIT_INVALID
    else:
        print(f"valid S-machine: {_counts(M)}")
    return EXIT_OK


def replay_check(M, samples, rng, steps=12) -> bool:
    """Random TM computations must replay verbatim in S(M) of the normalized machine."""
    Mx = M if M.symmetric and not any(c.letters > 1 for c in M.commands) \
        else tm.split_single_letter(tm.symmetrize(M))
    S = sm.s_from_tm(Mx)
    for _ in range(samples):
        u = tuple(rng.choice(Mx.input) for _ in range(rng.randrange(5)))
        w = tm.input_config(Mx, u)
        W = S.input_word(u)
        for _ in range(steps):
            opts = list(tm.successors(Mx, w))
            if not opts:
                break
            c, w = opts[rng.randrange(len(opts))]
            W = sm.s_apply(S, W, S.rule[c.name])
            if W != tm_to_admissible(S, w):
                return False
    return True


def tm_to_admissible(S, w) -> sm.AdmissibleWord:
    states, sectors = [], []
    k = len(w)
    for j, (u, q, v) in enumerate(w):
        states += [S.blocks[3 * j][0], q, S.blocks[3 * j + 2][0]]
        sectors += [u, v]
        if j < k - 1:
            sectors.append(())
    return sm.AdmissibleWord(tuple(states), tuple(sectors))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smspace", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default options")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--metric", choices=["comb", "modified"])
    common.add_argument("--delta", help="modified-length parameter P/Q")
    common.add_argument("-o", "--output")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="run the construction pipeline")
    b.add_argument("--machine", help="TM/S-machine JSON file or 'toy'")
    b.add_argument("--stages", help="comma list: pad,symmetrize,split,normalize,smachine,compose,multiply:L,hat:L")

    c = sub.add_parser("compile", parents=[common], help="compile a multiplied S-machine")
    c.add_argument("--smachine")
    c.add_argument("--hat", help="hat variant to compile alongside")

    s = sub.add_parser("space", parents=[common], help="least space of a word")
    s.add_argument("--presentation")
    s.add_argument("--word", help="space separated letters, '-x' for inverses")
    s.add_argument("--smachine", help="use Sigma(u, L) of this machine and build a witness")
    s.add_argument("--input", help="input word u for --smachine")
    s.add_argument("--cap", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--machine-cap", dest="machine_cap", type=int)
    s.add_argument("--time-cap", dest="time_cap", type=int)
    s.add_argument("--derivation-out", dest="derivation_out")

    t = sub.add_parser("table", parents=[common], help="space-function table as CSV")
    t.add_argument("--presentation")
    t.add_argument("--n-max", dest="n_max", type=int)
    t.add_argument("--cap", type=int)
    t.add_argument("--budget", type=int)
    t.add_argument("--words", help="JSON list of words; default enumerates all words")

    v = sub.add_parser("verify", parents=[common], help="replay a derivation")
    v.add_argument("derivation")
    v.add_argument("--presentation")

    f = sub.add_parser("fit", parents=[common], help="least c with f <= c g(cn) + cn")
    f.add_argument("--table")
    f.add_argument("--g", help="identity, double, square, exp, log or a CSV table")
    f.add_argument("--c-max", dest="c_max", type=int)

    k = sub.add_parser("check", parents=[common], help="validate a machine file")
    k.add_argument("--machine")
    k.add_argument("--samples", type=int)
    return p


COMMANDS = {"build": cmd_build, "compile": cmd_compile, "space": cmd_space, "table": cmd_table,
            "verify": cmd_verify, "fit": cmd_fit, "check": cmd_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        d = _delta(args, cfg)
        if d is not None and d <= 0:
            raise CliError("delta must be positive")
        return COMMANDS[args.command](args, cfg)
    except (CliError, tm.MachineError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
