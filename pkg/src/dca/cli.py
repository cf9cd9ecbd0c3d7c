"""Command line entry point: ``dca <family> <command> [options]``.

Families are ``core``, ``euclid``, ``hyper`` and ``dyn``.  Every command
prints a report (JSON by default, ``--format csv`` for a claim table) and
exits with 0 exactly when all of its claims pass.  ``--out`` receives the
command's data artifact when it has one (ball JSON, Green table, words,
function values) and the report otherwise.  ``--config FILE`` reads
``key=value`` lines that act as defaults below explicit flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time

from . import claims
from .dynamics import Word, growth_series, recode, substitute
from .errors import DCAError, LengthCap
from .euclid import kernels
from .euclid.lattice import read_lattice_csv
from .euclid.polynomials import CanonicalTriangle, pol_space_basis, taylor_step
from .exact import format_exact
from .hyperbolic.ball import ball_to_json, boundary_path, boundary_word, build_ball, right_convex_check
from .hyperbolic.counting import dof_rank_check, equation_count
from .hyperbolic.functions import construct_special, default_anchor, qb_residual, zero_set_components
from .report import Report, dumps
from .triangle_ops import random_combination

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(DCAError):
    pass


# -- commands --------------------------------------------------------------------------


def _core_identity(a):
    return claims.factorization(a.radius, a.hyper_radius), None


def _core_liouville(a):
    return claims.liouville(_int_list(a.sizes)), None


def _core_maxprinciple(a):
    return claims.maximum_principle(a.samples, a.seed, a.radius, a.hyper_radius), None


def _core_acceptance(a):
    rep = Report("core acceptance")
    spec = _quadrature(a)
    for sub in (
        claims.ball_counts(5),
        claims.substitution_consistency(4),
        claims.perron(),
        claims.degrees_of_freedom(min(4, a.max_radius), a.max_radius),
        claims.pol_dimensions(8, 3, a.seed),
        claims.factorization(),
        claims.liouville(),
        claims.maximum_principle(a.samples, a.seed),
        claims.green(21, spec),
        claims.cauchy(3, 6, a.seed, spec),
        claims.zero_sets(a.samples, a.seed),
    ):
        rep.extend(sub)
    return rep, None


def _euclid_pol_dim(a):
    rep = Report("euclid pol-dim")
    space = pol_space_basis(a.k)
    rep.claim(f"dim_Pol_{a.k}", 2 * a.k + 2, space.dimension, "published",
              space.dimension == 2 * a.k + 2 and space.determined_by_triangle)
    rep.data["window"] = space.window.size
    return rep, None


def _euclid_taylor(a):
    import random

    rep = Report("euclid taylor")
    if a.input:
        psi = read_lattice_csv(a.input)
        anchor = tuple(_int_list(a.anchor)) if a.anchor else min(psi, key=lambda p: (p[0] + p[1], p))
        tri = CanonicalTriangle(anchor, a.k)
        space = pol_space_basis(a.k, tri)
    else:
        tri = CanonicalTriangle((0, 0), a.k)
        space = pol_space_basis(a.k, tri)
        psi = random_combination(space.basis, random.Random(a.seed))
    step = taylor_step(psi, tri)
    again = taylor_step(step.phi, tri)
    if a.input:
        agree = all(step.phi[p] == psi[p] for p in tri.points())
        rep.claim("agrees_on_triangle", True, agree, "trivial", agree)
        rep.data["input_in_Pol_k"] = all(step.phi.get(p) == v for p, v in psi.items() if p in step.phi)
    else:
        rep.claim("recovers_input", True, step.phi == psi, "trivial", step.phi == psi)
    rep.claim("idempotent", True, again.phi == step.phi, "derived", again.phi == step.phi)
    rep.claim("rank_on_triangle", space.dimension, step.rank, "derived", step.rank == space.dimension)
    table = [(m, n, format_exact(v)) for (m, n), v in sorted(step.phi.items())]
    return rep, ("m,n,value", table)


def _euclid_green(a):
    spec = _quadrature(a)
    rep = claims.green(a.window, spec, slopes=a.slopes)
    h = a.window // 2
    pts = [(m, n) for m in range(-h, h + 1) for n in range(-h, h + 1)]
    g = kernels.green_function(pts, spec)
    table = [(m, n, repr(v)) for (m, n), v in sorted(g.values.items())]
    return rep, ("m,n,value", table)


def _euclid_cauchy(a):
    names = ("pascal", "fourier") if a.kernel == "both" else (a.kernel,)
    rep = claims.cauchy(a.k, a.radius, a.seed, _quadrature(a), names)
    return rep, None


def _hyper_ball(a):
    _cap(a, a.radius)
    ball = build_ball(a.radius)
    rep = Report("hyper ball")
    for r in range(1, a.radius + 1):
        expected = claims.BALL_COUNTS[r - 1] if r <= len(claims.BALL_COUNTS) else None
        got = ball.boundary_size(r)
        rep.claim(f"boundary_D{r}", expected, got, "published" if expected else "computed",
                  expected is None or got == expected)
        conv = right_convex_check(ball, boundary_path(ball, r), closed=True)
        rep.claim(f"right_convex_D{r}", True, conv.convex, "derived", conv.convex)
    rep.data["vertices"] = ball.vertex_count
    rep.data["triangles"] = len(ball.triangles)
    return rep, ("json", ball_to_json(ball))


def _hyper_word(a):
    _cap(a, a.radius)
    if not 1 <= a.layer <= a.radius:
        raise UsageError(f"--layer must be in 1..{a.radius}")
    ball = build_ball(a.radius)
    word = boundary_word(ball, a.layer)
    rep = Report("hyper word")
    expected = claims.BALL_COUNTS[a.layer - 1] if a.layer <= len(claims.BALL_COUNTS) else None
    rep.claim("length", expected, len(word), "published" if expected else "computed", expected is None or len(word) == expected)
    rep.claim("balanced", True, word.count("b") == word.count("w"), "derived", word.count("b") == word.count("w"))
    rep.data["word"] = word
    return rep, ("text", word)


def _hyper_dof(a):
    rep = Report("hyper dof")
    counts = equation_count(a.radius)
    expected = counts["boundary"] // 2 + 1
    rep.claim(f"counting_D{a.radius + 1}", expected, counts["dof"], "published", counts["pass"] and counts["dof"] == expected)
    if a.rank:
        chk = dof_rank_check(a.radius, a.max_radius)
        rep.claim(f"nullspace_D{a.radius + 1}", expected, chk["dof"], "derived", chk["pass"])
        rep.data["rank"] = chk["rank"]
    rep.data.update({k: counts[k] for k in ("N_r", "N_r1", "Eq_r1", "B_r1", "W_r1")})
    rep.data["strips"] = counts["strips"]
    return rep, None


def _hyper_special(a):
    _cap(a, a.radius)
    ball = build_ball(a.radius)
    anchor = tuple(_int_list(a.anchor)) if a.anchor else default_anchor(ball, a.kind)
    sf = construct_special(a.kind, anchor, a.radius, a.policy, ball)
    rep = Report("hyper special")
    bad = len(qb_residual(ball, sf.psi))
    rep.claim("Qb_residual_triangles", 0, bad, "derived", bad == 0)
    comps = zero_set_components(ball, sf.psi)
    convex = all(c.right_convex for c in comps)
    rep.claim("zero_set_right_convex", True, convex, "published", convex)
    rep.data.update({"kind": sf.kind, "anchor": list(anchor), "policy": sf.policy, "growth": sf.growth})
    rep.data["experimental"] = True
    table = [(v, format_exact(x)) for v, x in sorted(sf.psi.items())]
    return rep, ("vertex,value", table)


def _hyper_zeroset(a):
    _cap(a, a.radius)
    return claims.zero_sets(a.samples, a.seed, a.radius), None


def _dyn_grow(a):
    word = Word(a.word, cyclic=not a.linear)
    try:
        series = growth_series(word, a.steps, a.max_length)
    except LengthCap as err:
        raise UsageError(str(err)) from None
    rep = Report("dyn grow")
    rep.data["lengths"] = series.lengths
    rep.data["ratios"] = series.ratios
    rep.data["deviations"] = series.deviations
    chain = [word] + _iterates(word, a.steps)
    if word.cyclic:
        for i, (u, v) in enumerate(zip(chain, chain[1:])):
            pairs = u.pairs()
            alt = sum(p[0] != p[1] for p in pairs)
            law = 4 * alt + 3 * (len(pairs) - alt)
            rep.claim(f"length_law_{i + 1}", law, len(v), "derived", law == len(v))
    if a.emit == "words":
        if a.recoded:
            words = [",".join(recode(w)) for w in chain]
        else:
            words = [w.letters for w in chain]
        rep.data["words"] = words
        return rep, ("text", "\n".join(words))
    return rep, ("step,length", list(enumerate(series.lengths)))


def _iterates(word: Word, steps: int) -> list[Word]:
    out = []
    for _ in range(steps):
        word = substitute(word)
        out.append(word)
    return out


def _dyn_perron(a):
    return claims.perron(), None


# -- helpers --------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    return [int(x) for x in str(text).split(",") if x.strip()]


def _cap(a, radius: int) -> None:
    if radius > a.max_radius_build:
        raise UsageError(f"radius {radius} above the build cap {a.max_radius_build}")


def _quadrature(a) -> kernels.QuadratureSpec:
    return kernels.QuadratureSpec(grid=a.grid, mode=a.mode, refine=a.refine, tol=a.tol)


def _write_artifact(kind_rows, fmt: str) -> str:
    kind, rows = kind_rows
    if kind == "json":
        return dumps(rows)
    if kind == "text":
        return rows + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(kind.split(","))
    w.writerows(rows)
    return buf.getvalue()


def read_config(path: str) -> dict[str, str]:
    """``key=value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--max-radius", type=int, default=4, help="cap for exact rank checks")
    p.add_argument("--max-radius-build", type=int, default=7, help="cap for explicit balls")
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--refine", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--mode", choices=kernels.MODES, default="residue")
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    p.add_argument("--config")


def build_parser() -> tuple[argparse.ArgumentParser, list[argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="dca", description="Discrete complex analysis on black/white triangulations.")
    fam = parser.add_subparsers(dest="family", required=True)
    leaves = []

    def leaf(group, name, func, help_text):
        p = group.add_parser(name, help=help_text)
        _common(p)
        p.set_defaults(func=func)
        leaves.append(p)
        return p

    core = fam.add_parser("core", help="surfaces, operators, identities").add_subparsers(dest="command", required=True)
    p = leaf(core, "identity", _core_identity, "factorization identities")
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--hyper-radius", type=int, default=3)
    p = leaf(core, "liouville", _core_liouville, "kernel of Q^b on 3N tori")
    p.add_argument("--sizes", default="1,2,3")
    p = leaf(core, "maxprinciple", _core_maxprinciple, "maximum principle on random functions")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--hyper-radius", type=int, default=3)
    p = leaf(core, "acceptance", _core_acceptance, "all acceptance claims")
    p.add_argument("--samples", type=int, default=100)

    eu = fam.add_parser("euclid", help="equilateral lattice").add_subparsers(dest="command", required=True)
    p = leaf(eu, "pol-dim", _euclid_pol_dim, "dimension of Pol_k")
    p.add_argument("--k", type=int, required=True)
    p = leaf(eu, "taylor", _euclid_taylor, "Taylor projection of a random element of Pol_k")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--input", help="lattice function CSV (m,n,value); default: random element of Pol_k")
    p.add_argument("--anchor", help="m,n corner of T_k (default: lowest point of the input)")
    p = leaf(eu, "green", _euclid_green, "Fourier Green function and decay")
    p.add_argument("--window", type=int, default=21)
    p.add_argument("--slopes", action="store_true")
    p = leaf(eu, "cauchy", _euclid_cauchy, "Cauchy formula with both kernels")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--kernel", choices=("pascal", "fourier", "both"), default="both")

    hy = fam.add_parser("hyper", help="{3,8} lattice").add_subparsers(dest="command", required=True)
    p = leaf(hy, "ball", _hyper_ball, "build D_R")
    p.add_argument("--radius", type=int, required=True)
    p = leaf(hy, "word", _hyper_word, "boundary word of D_K")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--layer", type=int, required=True)
    p = leaf(hy, "dof", _hyper_dof, "equations and degrees of freedom on D_{R+1}")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--rank", action="store_true")
    p = leaf(hy, "special", _hyper_special, "psi_xl or z_pr on D_R (experimental extension)")
    p.add_argument("--kind", choices=("psi_xl", "z_pr"), required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--policy", choices=("least-norm", "sparse"), default="least-norm")
    p.add_argument("--anchor", help="x,l for psi_xl or r,vertex for z_pr")
    p = leaf(hy, "zeroset", _hyper_zeroset, "right convexity of zero sets")
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--samples", type=int, default=100)

    dy = fam.add_parser("dyn", help="boundary word dynamics").add_subparsers(dest="command", required=True)
    p = leaf(dy, "grow", _dyn_grow, "iterate the substitution")
    p.add_argument("--word", required=True)
    p.add_argument("--cyclic", action="store_true", default=True)
    p.add_argument("--linear", action="store_true")
    p.add_argument("--steps", type=int, default=4)
    p.add_argument("--emit", choices=("lengths", "words"), default="lengths")
    p.add_argument("--recoded", action="store_true")
    p.add_argument("--max-length", type=int, default=10_000_000)
    leaf(dy, "perron", _dyn_perron, "Perron eigenvalue certificate")
    return parser, leaves


def _apply_config(argv: list[str], leaves: list[argparse.ArgumentParser]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = read_config(known.config)
    for p in leaves:
        types = {act.dest: act for act in p._actions}
        defaults = {}
        for k, v in cfg.items():
            act = types.get(k)
            if act is None:
                continue
            if act.nargs == 0:
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                defaults[k] = act.type(v) if act.type else v
                if act.choices is not None and defaults[k] not in act.choices:
                    raise UsageError(f"{k}={v} is not one of {list(act.choices)}")
            # a value from the config satisfies a required flag
            act.required = False
        p.set_defaults(**defaults)


def run(argv: list[str] | None = None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    parser, leaves = build_parser()
    try:
        _apply_config(argv, leaves)
    except (OSError, UsageError, ValueError) as err:
        print(f"dca: {err}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report, artifact = args.func(args)
    except (DCAError, ValueError, OSError) as err:
        print(f"dca: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_USAGE
    report.data["config"] = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "config", "timing") and v is not None
    }
    if args.timing:
        report.data["seconds"] = round(time.perf_counter() - start, 3)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    try:
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(_write_artifact(artifact, args.format) if artifact else text)
        if not args.out or artifact:
            stdout.write(text)
    except OSError as err:
        print(f"dca: cannot write output: {err}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
