"""Command-line interface: ``rcsets <command> [options]``.

Exit status is 0 on success, 2 when an experiment's verdict is ``fail`` and
1 on usage or domain errors.  Codes are given as literal strings
(``0122``) or as ``@path`` references to files holding one code per line.
Relative ``--output`` paths are placed under ``$RCSETS_OUTPUT_DIR`` when
that variable is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import dimension as dim
from . import galton_watson as gw
from . import intersection as inter
from . import montecarlo as mc
from .errors import BudgetExceeded, Extinct, InsufficientSurvivors
from .measures import BernoulliPair, OffspringLaw, RandomStream, SurvivalPair, gw_offspring
from .tree_codec import PrefixTree, QuadCode, TritCode, decode_quad, decode_trit, encode_quad, encode_trit

OUTPUT_DIR_ENV = "RCSETS_OUTPUT_DIR"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


@dataclass
class CommandSpec:
    """A parsed invocation: which command, its flags, and where output goes."""

    name: str
    flags: dict
    output: Path | None = None
    format: str = "plain"
    threads: int = 1


# ---- flag types -----------------------------------------------------------


def _prob(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a decimal number") from None
    if not 0 <= x <= 1:
        raise argparse.ArgumentTypeError(f"{x} must lie in [0, 1]")
    return x


def _half_prob(text: str) -> float:
    x = _prob(text)
    if x > 0.5:
        raise argparse.ArgumentTypeError(f"{x} must lie in [0, 1/2]")
    return x


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"{n} must be at least 1")
    return n


def _nonneg_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"{n} must be non-negative")
    return n


def _seed(text: str) -> int:
    n = _nonneg_int(text)
    if n >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return n


def _prob_list(count: int):
    def parse(text: str) -> tuple[float, ...]:
        parts = text.split(",")
        if len(parts) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        return tuple(_prob(p) for p in parts)

    return parse


def _read_codes(ref: str) -> list[str]:
    if ref.startswith("@"):
        path = Path(ref[1:])
        try:
            lines = path.read_text().split()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        if not lines:
            raise UsageError(f"{path} holds no codes")
        return lines
    return [ref]


def _one_code(ref: str, flag: str) -> str:
    codes = _read_codes(ref)
    if len(codes) != 1:
        raise UsageError(f"{flag} expects a single code, {ref} holds {len(codes)}")
    return codes[0]


def _text_arg(ref: str) -> str:
    if ref.startswith("@"):
        try:
            return Path(ref[1:]).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {ref[1:]}: {exc.strerror}") from None
    return ref


# ---- output ---------------------------------------------------------------


def _plain(obj) -> str:
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, dict):
        return "\n".join(f"{k}: {_plain_value(v)}" for k, v in obj.items())
    return str(obj)


def _plain_value(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return repr(v) if isinstance(v, float) else str(v)


def _flat_csv(row: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
    writer.writeheader()
    writer.writerow({k: _plain_value(v) if isinstance(v, (dict, list)) else v for k, v in row.items()})
    return buf.getvalue()


def _render(result, fmt: str) -> str:
    if isinstance(result, mc.EstimateRecord):
        if fmt == "json":
            return json.dumps(result.to_dict(), indent=2)
        if fmt == "csv":
            return mc.records_to_csv([result])
        return _plain(result.to_dict())
    if isinstance(result, mc.ExperimentReport):
        if fmt == "json":
            return result.to_json()
        if fmt == "csv":
            return mc.records_to_csv(result.records)
        lines = [f"{result.name}: {result.verdict}", _plain(result.details)]
        lines += [
            f"{r.name}: {r.value:.6f} (exact {r.exact:.6f}, tol {r.tolerance:.4f}) {r.verdict}"
            for r in result.records
        ]
        return "\n".join(lines)
    if fmt == "json":
        return json.dumps(result, indent=2)
    if fmt == "csv":
        return _flat_csv(result)
    if isinstance(result, dict) and "value" in result and len(result) <= 3:
        return _plain(result["value"])
    return _plain(result)


def _emit(cmd: CommandSpec, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if cmd.output is None:
        sys.stdout.write(text)
        return
    path = cmd.output
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _verdict_status(result) -> int:
    verdict = getattr(result, "verdict", "pass")
    return EXIT_OK if verdict == "pass" else EXIT_FAIL


# ---- commands -------------------------------------------------------------


def cmd_decode(a) -> dict:
    text = _one_code(a.code, "--code")
    if a.quad:
        out = decode_quad(QuadCode.from_str(text), a.depth)
    else:
        out = decode_trit(TritCode.from_str(text), a.depth)
    return {
        "depth": a.depth,
        "consumed": out.consumed,
        "extinct": out.extinct,
        "levels": out.tree.levels(),
    }


def _tree_from_arg(a) -> PrefixTree:
    text = _text_arg(a.tree).strip()
    if text.startswith("{"):
        try:
            return PrefixTree.from_json(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--tree: invalid JSON ({exc.msg})") from None
    if a.depth is None:
        raise UsageError("--depth is required when --tree is a node list")
    nodes = [n.strip() for n in text.replace("\n", ",").split(",")]
    nodes = ["" if n in ("", "e") else n for n in nodes]
    return PrefixTree(a.depth, frozenset(nodes))


def cmd_encode(a) -> dict:
    tree = _tree_from_arg(a)
    code = encode_quad(tree, pad_to=a.pad) if a.quad else encode_trit(tree)
    return {"code": str(code), "alphabet": "quad" if a.quad else "trit", "depth": tree.depth}


def cmd_intersect(a) -> dict:
    codes = [c for ref in a.codes.split(",") for c in _read_codes(ref)]
    if len(codes) < 2:
        raise UsageError("--codes needs at least two codes")
    trits = [TritCode.from_str(c) for c in codes]
    pad = None if a.no_pad else a.depth
    quad = inter.intersect_many(trits, a.depth, pad_to=pad)
    tree = decode_quad(quad, a.depth).tree
    reached = tree.height()
    return {
        "code": str(quad),
        "depth": a.depth,
        "empty": reached < a.depth,
        "reached": reached,
        "nodes": len(tree),
    }


def cmd_prune(a) -> dict:
    text = _one_code(a.code, "--code")
    code = gw.prune_code(QuadCode.from_str(text), a.horizon, a.readable)
    return {"code": str(code), "horizon": a.horizon, "readable": a.readable}


_FORMULA_FLAGS = {
    "fn": ("p", "n"),
    "fn-inverse": ("p", "n"),
    "threshold": ("n",),
    "degree": ("p",),
    "dim-bounds": ("p",),
}


def cmd_formulas(a) -> dict:
    what = a.formula
    for flag in _FORMULA_FLAGS.get(what, ()):
        if getattr(a, flag) is None:
            raise UsageError(f"formulas {what}: --{flag} is required")
    if a.p is not None:
        hi = 1 - 0.5 ** a.n if what == "fn-inverse" and a.n else 0.5
        if a.p > hi:
            raise UsageError(f"--p: {a.p} must lie in [0, {hi}] for {what}")
    if what == "fn":
        return {"name": "f_n", "value": inter.f_n(a.p, a.n)}
    if what == "fn-inverse":
        return {"name": "f_n_inverse", "value": inter.f_n_inverse(a.p, a.n)}
    if what == "threshold":
        return {"name": "threshold", "value": inter.threshold(a.n)}
    if what == "emptiness":
        if a.pair is not None:
            return {"name": "pair_emptiness", "value": inter.pair_emptiness_prob(*a.pair)}
        if a.p is None or a.n is None:
            raise UsageError("emptiness needs --p and --n, or --pair p,q,r,s")
        return {"name": "nfold_emptiness", "value": inter.nfold_emptiness_prob(a.p, a.n)}
    if what == "degree":
        rep = inter.degree_of_intersectability(a.p)
        return {
            "name": "degree",
            "p": a.p,
            "degree": rep.degree,
            "interval": list(rep.interval),
            "high_included": rep.high_included,
        }
    if what == "dim-bounds":
        rep = dim.dim_bounds(a.p)
        return {
            "name": "dim_bounds",
            "p": a.p,
            "member_lower_bound": rep.gamma,
            "degree": rep.degree,
            "degree_bound": rep.member_bound,
        }
    raise UsageError(f"unknown formula {what!r}")


def _law_from_args(a) -> OffspringLaw:
    given = [a.law is not None, a.betas is not None, a.nfold is not None]
    if sum(given) != 1:
        raise UsageError("give exactly one of --law, --betas, --nfold")
    if a.law is not None:
        return OffspringLaw(*a.law)
    if a.betas is not None:
        return gw_offspring(SurvivalPair(*a.betas))
    p, n = a.nfold
    return inter.nfold_symbol_law(p, n)


def _nfold_arg(text: str) -> tuple[float, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected p,n, got {text!r}")
    return _half_prob(parts[0]), _positive_int(parts[1])


def cmd_estimate(a):
    kind = a.experiment
    if kind == "survival":
        return mc.estimate_survival(
            _law_from_args(a), a.depth, a.trials, a.seed, a.tolerance, a.threads
        )
    if kind == "pair-emptiness":
        return mc.estimate_pair_emptiness(
            BernoulliPair(*a.a), BernoulliPair(*a.b), a.depth, a.trials, a.seed, a.tolerance, a.threads
        )
    if kind == "nfold-emptiness":
        return mc.estimate_nfold_emptiness(
            a.p, a.n, a.depth, a.trials, a.seed, a.mode, a.tolerance, a.threads,
            check_threshold=not a.allow_above_threshold,
        )
    if kind == "pruned-freqs":
        return mc.pruned_frequency_experiment(
            _law_from_args(a), a.horizon, a.readable, a.trials, a.seed, a.tolerance, a.threads
        )
    if kind == "converse-test":
        return mc.converse_distribution_test(
            a.p, a.n, a.horizon, a.readable, a.trials, a.seed, a.alpha, a.intersect_p,
            threads=a.threads,
        )
    raise UsageError(f"unknown experiment {kind!r}")


def cmd_dim(a) -> dict:
    if a.action == "sample-path":
        path = dim.sample_member_path(a.p, a.length, a.policy, RandomStream(a.seed))
        return {
            "p": a.p,
            "policy": a.policy,
            "seed": a.seed,
            "length": a.length,
            "ones_frequency": path.count("1") / len(path),
            "path": path,
        }
    bits = "".join(_text_arg(a.bits).split())
    est = dim.estimate_dim(bits)
    return {
        "length": est.sequence_length,
        "phrases": est.phrases,
        "code_length": est.code_length,
        "rate": est.rate,
        "overhead": est.overhead,
    }


# ---- parser ---------------------------------------------------------------


def _add_output_flags(p: argparse.ArgumentParser, default_format: str = "plain"):
    p.add_argument("--format", choices=("json", "csv", "plain"), default=default_format)
    p.add_argument("--output", type=Path, help=f"write here instead of stdout (relative to ${OUTPUT_DIR_ENV} if set)")


def _add_law_flags(p: argparse.ArgumentParser):
    p.add_argument("--law", type=_prob_list(4), metavar="A0,A1,A2,A3", help="offspring law")
    p.add_argument("--betas", type=_prob_list(2), metavar="B0,B1", help="product law from child survival rates")
    p.add_argument("--nfold", type=_nfold_arg, metavar="P,N", help="law of an n-fold intersection of mu_p trees")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rcsets", description="Random closed sets: codes, formulas and experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decode", help="decode a trit (or quad) code to a tree")
    p.add_argument("--code", required=True)
    p.add_argument("--depth", type=_nonneg_int, required=True)
    p.add_argument("--quad", action="store_true", help="read a quad code")
    _add_output_flags(p)

    p = sub.add_parser("encode", help="encode a tree as a trit (or quad) code")
    p.add_argument("--tree", required=True, help='tree JSON {"depth", "nodes"} or comma-separated nodes (e = root)')
    p.add_argument("--depth", type=_nonneg_int)
    p.add_argument("--quad", action="store_true")
    p.add_argument("--pad", type=_nonneg_int, help="pad a quad code with 3s to this length")
    _add_output_flags(p)

    p = sub.add_parser("intersect", help="quad code of the intersection of trit-coded trees")
    p.add_argument("--codes", required=True, help="comma-separated codes or @files")
    p.add_argument("--depth", type=_nonneg_int, required=True)
    p.add_argument("--no-pad", action="store_true", help="do not pad the quad code with 3s to --depth")
    _add_output_flags(p)

    p = sub.add_parser("prune", help="trit code of the pruned tree of a quad code")
    p.add_argument("--code", required=True)
    p.add_argument("--horizon", type=_nonneg_int, required=True)
    p.add_argument("--readable", type=_nonneg_int, required=True)
    _add_output_flags(p)

    p = sub.add_parser("formulas", help="closed-form values (no randomness)")
    p.add_argument("formula", choices=("fn", "fn-inverse", "threshold", "emptiness", "degree", "dim-bounds"))
    p.add_argument("--p", type=_prob)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--pair", type=_prob_list(4), metavar="P,Q,R,S")
    _add_output_flags(p)

    p = sub.add_parser("estimate", help="seeded Monte Carlo experiments")
    esub = p.add_subparsers(dest="experiment", required=True, parser_class=_Parser)

    def experiment(name, help_text, **defaults):
        e = esub.add_parser(name, help=help_text)
        e.add_argument("--seed", type=_seed, required=True)
        e.add_argument("--trials", type=_positive_int, default=defaults.get("trials", 100_000))
        e.add_argument("--threads", type=_positive_int, default=1)
        _add_output_flags(e)
        return e

    e = experiment("survival", "survival of a Galton-Watson tree to --depth")
    _add_law_flags(e)
    e.add_argument("--depth", type=_nonneg_int, default=25)
    e.add_argument("--tolerance", type=float)

    e = experiment("pair-emptiness", "emptiness of the intersection of two random trees", trials=10_000)
    e.add_argument("--a", type=_prob_list(2), required=True, metavar="P,Q")
    e.add_argument("--b", type=_prob_list(2), required=True, metavar="R,S")
    e.add_argument("--depth", type=_nonneg_int, default=12)
    e.add_argument("--tolerance", type=float)

    e = experiment("nfold-emptiness", "emptiness of an n-fold intersection")
    e.add_argument("--p", type=_half_prob, required=True)
    e.add_argument("--n", type=_positive_int, required=True)
    e.add_argument("--depth", type=_nonneg_int, default=60)
    e.add_argument("--mode", choices=("auto", "tree", "process"), default="auto")
    e.add_argument("--tolerance", type=float)
    e.add_argument("--allow-above-threshold", action="store_true")

    e = experiment("pruned-freqs", "branching frequencies of pruned surviving trees")
    _add_law_flags(e)
    e.add_argument("--horizon", type=_positive_int, default=30)
    e.add_argument("--readable", type=_positive_int, default=10)
    e.add_argument("--tolerance", type=float, default=0.01)

    e = experiment("converse-test", "chi-square comparison of direct and intersected codes")
    e.add_argument("--p", type=_half_prob, required=True)
    e.add_argument("--n", type=_positive_int, required=True)
    e.add_argument("--horizon", type=_positive_int, default=30)
    e.add_argument("--readable", type=_positive_int, default=8)
    e.add_argument("--alpha", type=float, default=1e-3)
    e.add_argument("--intersect-p", type=_half_prob, help="parameter of the intersected trees (default --p)")

    p = sub.add_parser("dim", help="dimension diagnostics")
    dsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = dsub.add_parser("sample-path", help="a member path of a pruned mu_p tree")
    d.add_argument("--p", type=_half_prob, required=True)
    d.add_argument("--length", type=_positive_int, default=100_000)
    d.add_argument("--policy", choices=("uniform", "leftmost"), default="uniform")
    d.add_argument("--seed", type=_seed, required=True)
    _add_output_flags(d)
    d = dsub.add_parser("estimate", help="LZ78 compression rate of a bit string")
    d.add_argument("--bits", required=True, help="0/1 string or @file")
    _add_output_flags(d)

    return parser


_HANDLERS = {
    "decode": cmd_decode,
    "encode": cmd_encode,
    "intersect": cmd_intersect,
    "prune": cmd_prune,
    "formulas": cmd_formulas,
    "estimate": cmd_estimate,
    "dim": cmd_dim,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cmd = CommandSpec(
        name=args.command,
        flags={k: v for k, v in vars(args).items() if k not in ("command", "output", "format")},
        output=args.output,
        format=args.format,
        threads=getattr(args, "threads", 1),
    )
    try:
        result = _HANDLERS[cmd.name](args)
    except (UsageError, ValueError, Extinct, BudgetExceeded, InsufficientSurvivors) as exc:
        print(f"rcsets {cmd.name}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(cmd, _render(result, cmd.format))
    return _verdict_status(result)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
