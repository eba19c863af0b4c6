"""
Command-line front end.

Every subcommand prints JSON (default) or TSV on stdout. Errors are written to
stderr as JSON objects; exit codes are 0 on success, 1 when verification
finds a failing row and 2 for any other error.
"""

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

import structlog

from app import __version__
from app.config import get_settings
from app.exceptions import ContractError, InternalError, ParseError, WeylabError
from app.logging_config import configure_logging
from app.services.characters import (
    decompose,
    exterior_power,
    freudenthal_multiplicity,
    symmetric_power,
    tensor,
    weight_set,
    weyl_character,
)
from app.services.embed import (
    FormKind,
    FormType,
    ambient_group,
    format_root_restrictions_tsv,
    restrict_character,
    root_restrictions,
    torus_assignment,
)
from app.services.levels import (
    LeviSubset,
    format_levels_tsv,
    level_decomposition,
    level_factor_count,
    level_reducible,
    levi_structure,
)
from app.services.rootcore import (
    build_root_system,
    format_weight,
    is_self_dual,
    parse_type,
    parse_weight,
    weyl_orbit,
)
from app.services.verify import (
    FixtureTable,
    fixture_lookup,
    load_fixtures,
    module_dimension,
    resolve_form,
    run_verification_suite,
)

logger = structlog.get_logger(__name__)

# (payload for JSON, TSV text, exit code)
Outcome = Tuple[Any, str, int]


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting"""

    def error(self, message: str) -> None:
        raise ParseError(message)


def _tsv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = ["\t".join(header)] + ["\t".join(str(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def _group(args) -> Tuple[Any, Tuple[int, ...]]:
    t = parse_type(args.type)
    return build_root_system(t), parse_weight(args.weight, t.rank)


def _factor_tsv(dec) -> str:
    return _tsv(
        ["hw", "mult"], [[format_weight(w), m] for w, m in sorted(dec.factors.items())]
    )


# -- handlers -------------------------------------------------------------


def cmd_dim(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs, lam = _group(args)
    dim, source = module_dimension(rs, lam, args.p, fixtures)
    payload = {
        "type": str(rs.type),
        "weight": format_weight(lam),
        "p": args.p,
        "dim": dim,
        "source": source,
    }
    header = ["type", "weight", "p", "dim", "source"]
    return payload, _tsv(header, [payload.values()]), 0


def cmd_mult(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs, lam = _group(args)
    mu = parse_weight(args.mu, rs.rank)
    m = freudenthal_multiplicity(rs, lam, mu)
    payload = {
        "type": str(rs.type),
        "weight": format_weight(lam),
        "mu": format_weight(mu),
        "mult": m,
    }
    return payload, _tsv(["type", "weight", "mu", "mult"], [payload.values()]), 0


def cmd_orbit(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs, lam = _group(args)
    orbit = sorted(weyl_orbit(rs, lam, cap))
    payload = {
        "type": str(rs.type),
        "weight": format_weight(lam),
        "size": len(orbit),
        "orbit": [format_weight(w) for w in orbit],
    }
    return payload, _tsv(["weight"], [[format_weight(w)] for w in orbit]), 0


def cmd_weights(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs, lam = _group(args)
    char = weight_set(rs, lam, cap) if args.premet else weyl_character(rs, lam, cap)
    rows = [[format_weight(w), m] for w, m in sorted(char.items())]
    return char.to_json(), _tsv(["weight", "mult"], rows), 0


def cmd_levels(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs, delta = _group(args)
    subset = LeviSubset.parse(args.subset, rs.rank)
    pl = level_decomposition(rs, delta, subset, weyl_character(rs, delta, cap))
    structure = None
    if is_self_dual(rs, delta):
        form = resolve_form(rs, delta, args.p, fixtures)
        if form.kind != FormKind.NONE:
            structure = levi_structure(rs, pl, form.kind.value)
    levels = []
    for level in pl.levels:
        entry: Dict[str, Any] = {
            "level": level.index,
            "dim": level.dim,
            "distinct": level.distinct,
            "shapes": [list(s) for s in sorted(level.shapes)],
            "reducible": level_reducible(pl, level.index),
        }
        if args.factors:
            dec = level_factor_count(rs, pl, level.index)
            entry["factors"] = dec.to_json()["factors"]
        levels.append(entry)
    levi = None
    if structure:
        levi = [f.model_dump() | {"tag": f.tag} for f in structure.factors]
    payload = {
        "type": str(rs.type),
        "delta": format_weight(delta),
        "subset": list(subset.nodes),
        "ell": pl.ell,
        "levels": levels,
        "levi": levi,
    }
    return payload, format_levels_tsv(pl, structure), 0


def cmd_form(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs, delta = _group(args)
    form = resolve_form(rs, delta, args.p, fixtures)
    dim, source = module_dimension(rs, delta, args.p, fixtures)
    ambient = ambient_group(dim, form, args.p)
    payload = {
        "type": str(rs.type),
        "delta": format_weight(delta),
        "p": args.p,
        "form": str(form),
        "p2_override": form.p2_override,
        "dim": dim,
        "ambient": str(ambient),
    }
    header = ["type", "delta", "p", "form", "dim", "ambient"]
    return payload, _tsv(header, [[payload[k] for k in header]]), 0


def cmd_restrict(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs_x, delta = _group(args)
    ambient = parse_type(args.ambient) if args.ambient else None
    form = None
    if ambient is not None and ambient.family == "A":
        form = FormType(kind=FormKind.NONE)
    spec = torus_assignment(rs_x, delta, form=form, ambient=ambient, p=args.p, cap=cap)
    payload: Dict[str, Any] = {"embedding": spec.to_json()}
    if args.roots:
        table = root_restrictions(spec)
        payload["roots"] = [row.model_dump() for row in table.rows]
        tsv = format_root_restrictions_tsv(table)
    else:
        if not args.lam:
            raise ParseError("restrict needs --lambda (or --roots)")
        rs_g = build_root_system(spec.ambient)
        lam = parse_weight(args.lam, rs_g.rank)
        restricted = restrict_character(rs_g, lam, spec, cap)
        dec = decompose(rs_x, restricted, cap)
        payload.update(
            {
                "lambda": format_weight(lam),
                "dim": restricted.dim,
                "kappa": dec.kappa,
                **dec.to_json(),
            }
        )
        tsv = _factor_tsv(dec)
    return payload, tsv, 0


def cmd_decompose(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs, lam = _group(args)
    char = weyl_character(rs, lam, cap)
    if args.tensor:
        other = weyl_character(rs, parse_weight(args.tensor, rs.rank), cap)
        char = tensor(char, other, cap)
    dec = decompose(rs, char, cap)
    payload = {
        "type": str(rs.type),
        "dim": char.dim,
        "kappa": dec.kappa,
        **dec.to_json(),
    }
    return payload, _factor_tsv(dec), 0


def cmd_power(args, cap: int, fixtures: FixtureTable) -> Outcome:
    rs, lam = _group(args)
    build = exterior_power if args.kind == "exterior" else symmetric_power
    power = build(weyl_character(rs, lam, cap), args.k, cap)
    dec = decompose(rs, power, cap)
    payload = {
        "type": str(rs.type),
        "kind": args.kind,
        "k": args.k,
        "dim": power.dim,
        **dec.to_json(),
    }
    return payload, _factor_tsv(dec), 0


def cmd_verify_tables(args, cap: int, fixtures: FixtureTable) -> Outcome:
    reports = run_verification_suite(fixtures=fixtures, cap=cap)
    payload = [r.model_dump() for r in reports]
    tsv = _tsv(["row", "status"], [[r.row, r.status] for r in reports])
    code = 1 if any(r.status == "fail" for r in reports) else 0
    return payload, tsv, code


def cmd_fixtures(args, cap: int, fixtures: FixtureTable) -> Outcome:
    if args.type or args.weight or args.p is not None:
        if not (args.type and args.weight and args.p is not None):
            raise ContractError(
                "fixtures lookup needs --type, --weight and --p together"
            )
        rows = [fixture_lookup(args.type, args.weight, args.p, fixtures)]
    else:
        rows = fixtures.rows
    payload = [row.model_dump() for row in rows]
    table = [[r.type, r.weight, r.p, r.dim, r.cite] for r in rows]
    return payload, _tsv(["type", "weight", "p", "dim", "cite"], table), 0


# -- parser ---------------------------------------------------------------

Handler = Callable[[argparse.Namespace, int, FixtureTable], Outcome]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--cap",
        type=int,
        default=None,
        help="Character entry cap (overrides WEYLAB_CAP)",
    )
    common.add_argument(
        "--format", choices=["json", "tsv"], default="json", help="Output format"
    )
    common.add_argument(
        "--fixtures",
        default=None,
        help="Fixtures file (defaults to the bundled dataset)",
    )

    typed = _Parser(add_help=False)
    typed.add_argument("--type", required=True, help="Simple type, e.g. A5")
    typed.add_argument("--weight", required=True, help="Dynkin labels, e.g. 0,0,1,0,0")
    typed.add_argument("--p", type=int, default=0, help="Characteristic (0 for char 0)")

    parser = _Parser(
        prog="weylab",
        description="Exact weight and character computations for irreducible triples",
    )
    parser.add_argument("--version", action="version", version=f"weylab {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(
        name: str, handler: Handler, help_text: str, with_type: bool = True
    ) -> argparse.ArgumentParser:
        parents = [common, typed] if with_type else [common]
        p = sub.add_parser(name, parents=parents, help=help_text)
        p.set_defaults(handler=handler)
        return p

    add("dim", cmd_dim, "Dimension of V(weight)")
    add("mult", cmd_mult, "Weight multiplicity").add_argument(
        "--mu", required=True, help="Weight whose multiplicity is wanted"
    )
    add("orbit", cmd_orbit, "Weyl orbit of a weight")
    add("weights", cmd_weights, "Character of V(weight)").add_argument(
        "--premet", action="store_true", help="Weight set only, multiplicities 1"
    )
    levels = add("levels", cmd_levels, "Q_X-levels for a parabolic")
    levels.add_argument(
        "--subset", default="borel", help="'borel' or Levi nodes, e.g. 2,3,4"
    )
    levels.add_argument(
        "--factors",
        action="store_true",
        help="Levi composition factors of each level",
    )
    add("form", cmd_form, "Invariant form and ambient classical group")
    restrict = add("restrict", cmd_restrict, "Restrict an ambient module to X = type")
    restrict.add_argument(
        "--lambda", dest="lam", default=None, help="Ambient highest weight"
    )
    restrict.add_argument(
        "--ambient", default=None, help="Explicit ambient type, e.g. A5 for SL(W)"
    )
    restrict.add_argument(
        "--roots",
        action="store_true",
        help="Print the root-restriction table instead",
    )
    decomposer = add(
        "decompose", cmd_decompose, "Decompose V(weight) or a tensor product"
    )
    decomposer.add_argument("--tensor", default=None, help="Second highest weight")
    power = add("power", cmd_power, "Decompose an exterior or symmetric power")
    power.add_argument("--k", type=int, required=True)
    power.add_argument("--kind", choices=["exterior", "symmetric"], default="exterior")
    add(
        "verify-tables",
        cmd_verify_tables,
        "Run the full verification suite",
        with_type=False,
    )
    fixtures = add(
        "fixtures",
        cmd_fixtures,
        "List or look up quoted dimensions",
        with_type=False,
    )
    fixtures.add_argument("--type", default=None)
    fixtures.add_argument("--weight", default=None)
    fixtures.add_argument("--p", type=int, default=None)
    return parser


def _emit(payload: Any, tsv: str, fmt: str, out: TextIO) -> None:
    if fmt == "tsv":
        out.write(tsv)
    else:
        out.write(json.dumps(payload, sort_keys=True) + "\n")


def run(
    argv: Optional[List[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """Parse argv, run one subcommand and return the exit code"""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    settings = get_settings()
    configure_logging(settings.log_level, settings.log_format)
    try:
        args = build_parser().parse_args(argv)
        cap = args.cap if args.cap is not None else settings.cap
        if cap <= 0:
            raise ParseError(f"--cap must be positive, got {cap}")
        fixtures = load_fixtures(args.fixtures)
        logger.debug("command", command=args.command, cap=cap)
        payload, tsv, code = args.handler(args, cap, fixtures)
    except WeylabError as exc:
        stderr.write(json.dumps(exc.to_dict(), sort_keys=True) + "\n")
        return 2
    except Exception as exc:
        logger.error("unexpected failure", error=str(exc), kind=type(exc).__name__)
        err = InternalError(f"{type(exc).__name__}: {exc}")
        stderr.write(json.dumps(err.to_dict(), sort_keys=True) + "\n")
        return 2
    _emit(payload, tsv, args.format, stdout)
    return code


def main() -> None:
    sys.exit(run())
