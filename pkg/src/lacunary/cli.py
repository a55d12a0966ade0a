"""Command-line entry point.

Exit status: 0 when a result was computed (a FAIL verdict is still a
result), 1 for usage or input errors, 2 when a cap or guard made the
computation infeasible.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .cayley import Ball, Homomorphism, injectivity_radius, parse_map
from .chains import (
    ChainParams,
    RankOneSpec,
    audit_chain,
    audit_csv,
    build_monster_chain,
    build_rips_chain,
    probe_commensurable,
    probe_elementary,
    read_plan,
)
from .errors import InfeasibleError
from .hyperbolicity import hyperbolicity_function, sublinearity_report, synchronized_report
from .oracles import (
    BallClosureOracle,
    DehnOracle,
    FreeOracle,
    FreeProductOracle,
    GroupOracle,
    Presentation,
    abelian_oracle,
    auto_oracle,
    factor_presentations,
    finite_oracle,
    format_presentation,
    read_presentation,
)
from .smallcancel import ScParams, check_classical, check_generalized, exact, find_epsilon_pieces
from .words import parse_word, render
from .wordsystems import build_schedule, build_word_system, validate_conditions

ORACLES = ("auto", "free", "finite", "freeprod", "dehn", "ball", "abelian")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# oracle construction


def make_oracle(p: Presentation, kind: str, closure_radius: int = 4) -> GroupOracle:
    if kind == "free":
        if p.relators:
            raise UsageError("--oracle free needs a presentation without relators")
        return FreeOracle(p.generators)
    if kind == "finite":
        return finite_oracle(p)
    if kind == "freeprod":
        return FreeProductOracle([auto_oracle(f, closure_radius) for f in factor_presentations(p)],
                                 order=p.generators)
    if kind == "dehn":
        return DehnOracle(p)
    if kind == "ball":
        return BallClosureOracle(p, closure_radius)
    if kind == "abelian":
        return abelian_oracle(p)
    return auto_oracle(p, closure_radius)


def _load(path: str) -> Presentation:
    try:
        return read_presentation(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e


def _oracle_from_args(a: argparse.Namespace, path: str | None = None, kind: str | None = None) -> GroupOracle:
    return make_oracle(_load(path or a.pres), kind or a.oracle, a.closure_radius)


def _word(text: str, o: GroupOracle) -> str:
    return parse_word(text, o.generators)


def _emit(lines: Sequence[str]) -> None:
    sys.stdout.write("".join(f"{x}\n" for x in lines))


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in _csv_list(text)]
    except ValueError as e:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from e


# ---------------------------------------------------------------------------
# subcommands


def cmd_ball(a):
    b = Ball(_oracle_from_args(a), a.radius, permissive=a.permissive)
    sys.stdout.write("element_id,representative_word,distance\n")
    for i, (w, d) in enumerate(zip(b.words, b.dist)):
        sys.stdout.write(f"{i},{render(w)},{d}\n")


def cmd_profile(a):
    radius = a.radius if a.radius is not None else (a.tmax + 1) // 2
    b = Ball(_oracle_from_args(a), radius, permissive=a.permissive)
    prof = hyperbolicity_function(b, a.tmax, a.mode)
    sys.stdout.write(prof.csv())
    if a.sublinearity:
        _emit(sublinearity_report(prof).lines())


def cmd_inj_radius(a):
    dom = _oracle_from_args(a, a.dom, a.dom_oracle)
    cod = _oracle_from_args(a, a.cod, a.cod_oracle)
    try:
        images = parse_map(a.map, dom.generators)
    except ValueError as e:
        raise UsageError(str(e)) from e
    h = Homomorphism(images, cod)
    r = injectivity_radius(h, Ball(dom, a.radius, permissive=True), cod)
    lines = [f"injectivity_radius: {r}", f"certificate: {r.certificate.value}"]
    if r.witness:
        lines.append(f"collision: {render(r.witness[0])} {render(r.witness[1])}")
    _emit(lines)


def _relator_set(a, ambient: Presentation) -> frozenset[str]:
    if a.rel:
        return _load(a.rel).symmetrized()
    if not ambient.relators:
        raise UsageError("no relators given")
    return ambient.symmetrized()


def _ambient(a) -> tuple[Presentation, GroupOracle]:
    p = _load(a.pres)
    if a.rel:
        return p, make_oracle(p, a.oracle, a.closure_radius)
    # relators of the file itself are measured in the free group on its generators
    return p, FreeOracle(p.generators)


def cmd_pieces(a):
    p, o = _ambient(a)
    R = _relator_set(a, p)
    rep = find_epsilon_pieces(o, R, a.eps)
    lines = [f"max_piece: {rep.max_piece}", f"eps: {a.eps}", f"relators: {len(set(R))}"]
    for w in rep.witnesses:
        lines.append(f"piece: R={w.R} R'={w.R2} U={render(w.U)} U'={render(w.U2)} "
                     f"Y={render(w.Y)} Z={render(w.Z)} length={w.length}")
    lines.append(f"certificate: {rep.certificate.value}")
    _emit(lines)


def cmd_check_sc(a):
    p = _load(a.pres)
    if not p.relators:
        raise UsageError("presentation has no relators")
    rep = check_classical(p.symmetrized(), exact(a.mu))
    lines = rep.lines()
    lines += [f"witness: {r} {s} {u}" for r, s, u in rep.witnesses]
    _emit(lines)


def _params(a) -> ScParams:
    return ScParams(lam=exact(a.lam), c=exact(a.c), eps=a.eps, mu=exact(a.mu), rho=exact(a.rho))


def cmd_check_gsc(a):
    p, o = _ambient(a)
    R = _relator_set(a, p)
    rep = check_generalized(o, R, _params(a), prime=a.prime)
    _emit(rep.lines())


def _system(a):
    Z = _csv_list(a.z)
    sched = build_schedule(a.m1, a.k if a.k is not None else len(Z))
    return build_word_system(Z, a.u, a.v, sched)


def cmd_gen_system(a):
    ws = _system(a)
    gens = sorted({x.lower() for r in ws.relators for x in r})
    if a.out:
        text = format_presentation(Presentation(tuple(gens), ws.relators),
                                   [f"word system m1={a.m1} k={ws.schedule.k} U={a.u} V={a.v}"])
        Path(a.out).write_text(text)
    _emit(ws.lines() + [f"R{i}: {r}" for i, r in enumerate(ws.relators, 1)])


PARAM_KEYS = {"lambda": "lam", "c": "c", "eps": "eps", "mu": "mu", "rho": "rho",
              "delta": "delta", "Ktilde": "Ktilde", "Rstab": "Rstab"}


def read_param_file(path: str) -> dict[str, Fraction]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in PARAM_KEYS:
            raise UsageError(f"{path}:{n}: expected '<key> <value>' with key in {sorted(PARAM_KEYS)}")
        try:
            out[PARAM_KEYS[parts[0]]] = exact(parts[1])
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"{path}:{n}: bad number {parts[1]!r}") from e
    return out


def cmd_validate_system(a):
    ws = _system(a)
    vals = read_param_file(a.params)
    if "eps" in vals:
        if vals["eps"].denominator != 1:
            raise UsageError("eps must be an integer")
        vals["eps"] = int(vals["eps"])
    p = ScParams(**vals)
    _emit(validate_conditions(ws, p).lines())


def cmd_probe_elem(a):
    o = _oracle_from_args(a)
    _emit(probe_elementary(o, _word(a.g, o), _word(a.x, o), a.nmax).lines())


def cmd_probe_comm(a):
    o = _oracle_from_args(a)
    _emit(probe_commensurable(o, _word(a.g, o), _word(a.h, o), a.kmax, a.conj_radius).lines())


def _chain_params(a) -> ChainParams:
    return ChainParams(m1=a.m1, seed=a.seed, w_length=a.w_length, mu=exact(a.mu),
                       audit_radius=a.audit_radius, closure_radius=a.closure_radius)


def read_w_file(path: str) -> dict[str, str]:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"{path}:{n}: expected '<conjugation word> <word over H>'")
        out[parts[0]] = "" if parts[1] == "1" else parts[1]
    return out


def cmd_chain(a):
    params = _chain_params(a)
    if a.chain_kind == "rips":
        w_source = read_w_file(a.w_file) if a.w_file else None
        plan = build_rips_chain(_load(a.q), _load(a.h), a.steps, params, w_source, audit=not a.no_audit)
    else:
        family = [RankOneSpec(tuple(_int_list(m))) for m in a.multipliers]
        plan = build_monster_chain(_load(a.g0), family, a.steps, params, audit=not a.no_audit)
    if a.out:
        plan.write(a.out)
    _emit(plan.ledger_lines())


def cmd_audit_chain(a):
    plan = read_plan(a.plan)
    rows = audit_chain(plan, _int_list(a.radius), a.tmax, a.profile_radius, a.closure_radius)
    text = audit_csv(rows)
    if a.out:
        Path(a.out).write_text(text)
    sys.stdout.write(text)


def cmd_sync_report(a):
    radius = a.radius if a.radius is not None else (a.tmax + 1) // 2
    profiles = []
    for path in a.group:
        b = Ball(_oracle_from_args(a, path), radius, permissive=True)
        profiles.append(hyperbolicity_function(b, a.tmax, a.mode))
    product = None
    if a.product:
        b = Ball(_oracle_from_args(a, a.product), radius, permissive=True)
        product = hyperbolicity_function(b, a.tmax, a.mode)
    scales = _int_list(a.scales) if a.scales else list(range(1, a.tmax + 1))
    _emit(synchronized_report(profiles, scales, exact(a.tolerance), product).lines())


# ---------------------------------------------------------------------------
# parser


def _oracle_flags(p: argparse.ArgumentParser, pres: bool = True) -> None:
    if pres:
        p.add_argument("--pres", required=True, help="presentation file")
    p.add_argument("--oracle", choices=ORACLES, default="auto")
    p.add_argument("--closure-radius", type=int, default=4, help="radius for ball-closure backends")


def _sc_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--c", default="0")
    p.add_argument("--eps", type=int, default=0)
    p.add_argument("--mu", default="1/6")
    p.add_argument("--rho", default="1")


def _system_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--z", required=True, help="comma-separated words z_1,...,z_k")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--k", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lacunary", description="Finite-scale hyperbolicity and small-cancellation tools.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ball", help="list a Cayley ball as CSV")
    _oracle_flags(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--permissive", action="store_true")
    p.set_defaults(fn=cmd_ball)

    p = sub.add_parser("profile", help="hyperbolicity function on a ball")
    _oracle_flags(p)
    p.add_argument("--tmax", type=int, required=True)
    p.add_argument("--radius", type=int)
    p.add_argument("--mode", choices=("exact", "interval"), default="exact")
    p.add_argument("--permissive", action="store_true")
    p.add_argument("--sublinearity", action="store_true")
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("inj-radius", help="injectivity radius of a homomorphism")
    p.add_argument("--dom", required=True)
    p.add_argument("--cod", required=True)
    p.add_argument("--map", default="")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--dom-oracle", choices=ORACLES, default="auto")
    p.add_argument("--cod-oracle", choices=ORACLES, default="auto")
    p.add_argument("--closure-radius", type=int, default=4)
    p.set_defaults(fn=cmd_inj_radius, pres=None, oracle="auto")

    for name, fn, text in (("pieces", cmd_pieces, "epsilon-pieces of a symmetrized relator set"),
                           ("check-gsc", cmd_check_gsc, "generalized small-cancellation clauses")):
        p = sub.add_parser(name, help=text)
        _oracle_flags(p)
        p.add_argument("--rel", help="relator file; defaults to the relators of --pres over its free group")
        if name == "pieces":
            p.add_argument("--eps", type=int, default=0)
        else:
            _sc_flags(p)
            p.add_argument("--prime", action="store_true", help="also apply the same-relator clause")
        p.set_defaults(fn=fn)

    p = sub.add_parser("check-sc", help="classical C'(mu)")
    p.add_argument("--pres", required=True)
    p.add_argument("--mu", default="1/6")
    p.set_defaults(fn=cmd_check_sc)

    p = sub.add_parser("gen-system", help="instantiate a word system")
    _system_flags(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen_system)

    p = sub.add_parser("validate-system", help="parameter inequalities for a word system")
    _system_flags(p)
    p.add_argument("--params", required=True, help="file of 'key value' lines")
    p.set_defaults(fn=cmd_validate_system)

    p = sub.add_parser("probe-elem", help="bounded elementary-subgroup membership probe")
    _oracle_flags(p)
    p.add_argument("--g", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--nmax", type=int, default=6)
    p.set_defaults(fn=cmd_probe_elem)

    p = sub.add_parser("probe-comm", help="bounded commensurability probe")
    _oracle_flags(p)
    p.add_argument("--g", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--conj-radius", type=int, default=2)
    p.set_defaults(fn=cmd_probe_comm)

    p = sub.add_parser("chain", help="generate a truncated chain plan")
    kinds = p.add_subparsers(dest="chain_kind", required=True, parser_class=_Parser)
    for kind in ("rips", "monster"):
        c = kinds.add_parser(kind)
        if kind == "rips":
            c.add_argument("--q", required=True)
            c.add_argument("--h", required=True)
            c.add_argument("--w-file", help="lines '<conjugation word> <word over H>'")
        else:
            c.add_argument("--g0", required=True)
            c.add_argument("--multipliers", action="append", required=True,
                           help="comma-separated multipliers of one family member; repeat per member")
        c.add_argument("--steps", type=int, required=True)
        c.add_argument("--m1", type=int, default=3)
        c.add_argument("--seed", type=int, default=0)
        c.add_argument("--w-length", type=int, default=8)
        c.add_argument("--mu", default="1/6")
        c.add_argument("--audit-radius", type=int, default=2)
        c.add_argument("--closure-radius", type=int, default=3)
        c.add_argument("--no-audit", action="store_true")
        c.add_argument("--out")
        c.set_defaults(fn=cmd_chain)

    p = sub.add_parser("audit-chain", help="audit a plan directory")
    p.add_argument("--plan", required=True)
    p.add_argument("--radius", default="2", help="comma-separated ball radii")
    p.add_argument("--tmax", type=int, default=4)
    p.add_argument("--profile-radius", type=int)
    p.add_argument("--closure-radius", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_audit_chain)

    p = sub.add_parser("sync-report", help="synchronized sublinearity evidence across groups")
    p.add_argument("--group", action="append", required=True, help="presentation file; repeat per group")
    p.add_argument("--product", help="free product presentation for the sandwich check")
    p.add_argument("--oracle", choices=ORACLES, default="auto")
    p.add_argument("--closure-radius", type=int, default=4)
    p.add_argument("--tmax", type=int, required=True)
    p.add_argument("--radius", type=int)
    p.add_argument("--mode", choices=("exact", "interval"), default="exact")
    p.add_argument("--scales")
    p.add_argument("--tolerance", default="1/10")
    p.set_defaults(fn=cmd_sync_report)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.fn(args)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return 1
    except InfeasibleError as e:
        sys.stderr.write(f"infeasible: {e}\n")
        return 2
    except (ValueError, KeyError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
