"""Command line interface: ``foldq canonical|pbw|eval|verify|affine``."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

import click
import jsonschema

from . import __version__, affroots, suites
from .cartan import PRESET_NAMES, CartanError, load_datum_json, preset
from .folding import FoldingContext, FoldingError
from .pbw import PBWAlgebra, PBWOrder, canonical_basis, root_vector
from .ualg import AlgebraError, ParseError, UMinusElt, parse_expression

DEFAULT_WORD_CAP = 250_000
DEFAULT_SEED = 0


# ---------------------------------------------------------------------------
# config file and output helpers


def parse_config(text: str) -> dict:
    """key = value lines; '#' starts a comment; quotes around values are dropped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.BadParameter(f"line {lineno}: expected key = value", param_hint="--config")
        k, v = (s.strip() for s in line.split("=", 1))
        if len(v) >= 2 and v[0] == v[-1] and v[0] in "\"'":
            v = v[1:-1]
        out[k.replace("-", "_")] = v
    return out


def _default_map(group: click.Group, flat: dict) -> dict:
    """Per-command defaults from flag names (``format``, ``max-words``) to parameter names."""
    m = {}
    for name, cmd in group.commands.items():
        if isinstance(cmd, click.Group):
            m[name] = _default_map(cmd, flat)
            continue
        sub = {}
        for param in cmd.params:
            for opt in getattr(param, "opts", []):
                key = opt.lstrip("-").replace("-", "_")
                if key in flat:
                    sub[param.name] = flat[key]
        m[name] = sub
    return m


def report_schema() -> dict:
    text = resources.files("foldq").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


def build_report(command: str, config: dict, reps, rows: list | None = None) -> dict:
    doc = {
        "tool": "foldq",
        "version": __version__,
        "command": command,
        "config": config,
        "ok": all(r.ok for r in reps),
        "suites": [r.as_dict() for r in reps],
    }
    if rows is not None:
        doc["rows"] = rows
    jsonschema.validate(doc, report_schema())
    return doc


def emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def render_rows(rows: list[dict], fmt: str) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
    lines = ["  ".join(c.ljust(widths[c]) for c in cols).rstrip()]
    for r in rows:
        lines.append("  ".join(str(r[c]).ljust(widths[c]) for c in cols).rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# presets


def load_setup(preset_name: str | None, n: int | None, datum_path: str | None):
    """(X, sigma, preset or None) from a preset label or a JSON datum file."""
    if datum_path:
        X, s = load_datum_json(Path(datum_path).read_text())
        return X, s, None
    try:
        pr = preset(preset_name or "A2", n)
    except CartanError as e:
        raise click.UsageError(str(e)) from None
    return pr.X, pr.sigma, pr


def finite_order(X, s) -> PBWOrder:
    if not X.is_finite:
        raise click.UsageError(f"{X.name} is not of finite type; PBW and canonical bases need a finite datum")
    if s.order > 1:
        try:
            return PBWOrder.lifted(s)
        except Exception:
            pass
    return PBWOrder.from_word(X)


def weights_up_to(rank: int, height: int) -> list[tuple[int, ...]]:
    out = []

    def rec(prefix, left):
        if len(prefix) == rank:
            out.append(tuple(prefix))
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a)

    rec([], height)
    return sorted(out, key=lambda v: (sum(v), v))


def word_count(nu) -> int:
    return math.factorial(sum(nu)) // math.prod(math.factorial(a) for a in nu)


def check_cap(weights, cap: int) -> None:
    worst = max(weights, key=word_count)
    est = word_count(worst)
    if est > cap:
        raise click.UsageError(
            f"weight {list(worst)} has an estimated {est} words, above the cap of {cap}; "
            "lower --height or raise --max-words")


def vq_context(pr, p: int | None) -> FoldingContext:
    if pr is None:
        raise click.UsageError("--mod-J needs a preset")
    if pr.excluded:
        raise click.UsageError(
            f"preset {pr.case} is excluded: the isomorphism between V_q and the folded algebra "
            "does not hold for it, so V_q computations are refused")
    try:
        return FoldingContext(pr, p=p)
    except FoldingError as e:
        raise click.UsageError(str(e)) from None


# ---------------------------------------------------------------------------
# commands


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="foldq")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="key = value file mirroring the command flags.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Exact computations for folded quantum groups."""
    if config_path:
        flat = parse_config(Path(config_path).read_text())
        ctx.default_map = _default_map(main, flat)


preset_opt = click.option("--preset", "preset_name", default="A2", show_default=True,
                          help=f"Built-in preset: {', '.join(PRESET_NAMES)}.")
n_opt = click.option("--n", type=click.IntRange(min=1), default=None, help="Rank parameter of the preset.")
datum_opt = click.option("--datum", "datum_path", type=click.Path(exists=True, dir_okay=False),
                         help="JSON datum {labels, pairing, sigma} instead of a preset.")
fmt_opt = click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text",
                       show_default=True)
out_opt = click.option("--output", type=click.Path(dir_okay=False), default=None, help="Write to a file.")
seed_opt = click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)


@main.command()
@preset_opt
@n_opt
@datum_opt
@click.option("--height", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--max-words", type=click.IntRange(min=1), default=DEFAULT_WORD_CAP, show_default=True,
              help="Refuse weight spaces with more words than this.")
@fmt_opt
@out_opt
def canonical(preset_name, n, datum_path, height, max_words, fmt, output):
    """Canonical basis per weight, in PBW coordinates."""
    X, s, _ = load_setup(preset_name, n, datum_path)
    order = finite_order(X, s)
    ws = weights_up_to(X.rank, height)
    check_cap(ws, max_words)
    rows = []
    for nu in ws:
        for b in canonical_basis(nu, order):
            row = {"weight": "(" + ",".join(map(str, nu)) + ")"}
            for k, ck in enumerate(b.index):
                row[f"c{k + 1}"] = ck
            row["b"] = "1" if not any(b.index) else _render_pbw(b.pbw)
            row["monomial"] = monomial_form(b.to_uminus(), nu) or "-"
            rows.append(row)
    _emit_rows("canonical", {"preset": preset_name, "n": n, "height": height}, rows, fmt, output)


def monomial_form(x: UMinusElt, nu, max_parts: int = 3) -> str | None:
    """Divided-power monomials f_{i1}^(a1)...f_{ik}^(ak), k <= max_parts, equal to x, joined by ' = '."""
    X = x.datum
    if not any(nu):
        return "1"
    hits: list[str] = []

    def rec(parts, left):
        if not any(left):
            m = UMinusElt.word(X, parts)
            if m.equals(x):
                hits.append(m.render())
            return
        if len(parts) == max_parts:
            return
        for i in range(X.rank):
            if parts and parts[-1][0] == i:
                continue
            for a in range(left[i], 0, -1):
                rest = list(left)
                rest[i] -= a
                rec(parts + [(i, a)], rest)

    rec([], list(nu))
    return " = ".join(sorted(hits, key=lambda h: (h.count("*"), h))) or None


def _render_pbw(v: dict) -> str:
    parts = []
    for c in sorted(v):
        coeff = v[c]
        body = "L(" + ",".join(map(str, c)) + ")"
        cs = str(coeff)
        parts.append(body if cs == "1" else f"({cs})*{body}")
    return " + ".join(parts)


def _emit_rows(command: str, config: dict, rows: list[dict], fmt: str, output: str | None) -> None:
    if fmt == "json":
        doc = build_report(command, config, [], rows)
        emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", output)
    else:
        emit(render_rows(rows, fmt), output)


@main.command()
@preset_opt
@n_opt
@datum_opt
@click.option("--height", type=click.IntRange(min=0), default=None,
              help="Also list PBW indices of every weight up to this height.")
@click.option("--max-words", type=click.IntRange(min=1), default=DEFAULT_WORD_CAP, show_default=True)
@fmt_opt
@out_opt
def pbw(preset_name, n, datum_path, height, max_words, fmt, output):
    """Reduced word, roots and root vectors of the PBW order."""
    X, s, _ = load_setup(preset_name, n, datum_path)
    order = finite_order(X, s)
    rows = []
    if height is None:
        check_cap([order.betas[k] for k in range(order.N)], max_words)
        for k, beta in enumerate(order.betas):
            rows.append({"k": k + 1, "letter": X.labels[order.word[k]],
                         "beta": "(" + ",".join(map(str, beta)) + ")",
                         "f_beta": root_vector(order, k + 1).render()})
    else:
        for nu in weights_up_to(X.rank, height):
            for c in order.indices(nu):
                rows.append({"weight": "(" + ",".join(map(str, nu)) + ")",
                             "c": "(" + ",".join(map(str, c)) + ")"})
    _emit_rows("pbw", {"preset": preset_name, "n": n, "height": height}, rows, fmt, output)


@main.command("eval")
@click.argument("expr")
@preset_opt
@n_opt
@datum_opt
@click.option("--p", "p", type=click.Choice(["2", "3"]), default=None,
              help="Coefficient field F_p for --mod-J (default: the preset's prime).")
@click.option("--mod-J", "mod_j", is_flag=True, help="Project to V_q (sigma-invariant input only).")
@fmt_opt
@out_opt
def eval_(expr, preset_name, n, datum_path, p, mod_j, fmt, output):
    """Evaluate an expression such as 'f1*f2^(2)*f1 - q^2*f2^(2)*f1^(2)'."""
    X, s, pr = load_setup(preset_name, n, datum_path)
    try:
        x = parse_expression(expr, X)
    except ParseError as e:
        raise click.UsageError(f"parse error: {e}") from None
    if mod_j:
        ctx = vq_context(pr, int(p) if p else None)
        try:
            res = ctx.project(x).render()
        except (FoldingError, AlgebraError) as e:
            raise click.UsageError(str(e)) from None
    else:
        res = x.render()
    if fmt == "json":
        doc = build_report("eval", {"expr": expr, "preset": preset_name, "mod_J": mod_j}, [],
                           [{"input": expr, "value": res}])
        emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", output)
    elif fmt == "csv":
        emit(render_rows([{"input": expr, "value": res}], "csv"), output)
    else:
        emit(res + "\n", output)


@main.command()
@click.argument("target", type=click.Choice(suites.TARGETS))
@seed_opt
@click.option("--window", type=click.IntRange(min=1), default=200, show_default=True,
              help="Minimum number of roots in each convex-order window.")
@click.option("--height", type=click.IntRange(min=1), default=None,
              help="Override the height bound of suites that take one.")
@fmt_opt
@out_opt
def verify(target, seed, window, height, fmt, output):
    """Run verification suites; exit status 1 if any check fails."""
    reps = suites.run(target, seed=seed, window=window, height=height)
    config = {"target": target, "seed": seed, "window": window, "height": height}
    doc = build_report(f"verify {target}", config, reps)
    if fmt == "json":
        emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", output)
    else:
        rows = [{"suite": r.suite, "checks": len(r.checks), "failed": len(r.failures()),
                 "status": "pass" if r.ok else "FAIL"} for r in reps]
        text = render_rows(rows, "csv" if fmt == "csv" else "text")
        if fmt == "text":
            for r in reps:
                for c in r.failures():
                    text += f"FAIL [{r.suite}] {c.identity}: {c.witness}\n"
                for note in r.notes:
                    text += f"note [{r.suite}] {note}\n"
        emit(text, output)
    sys.exit(0 if doc["ok"] else 1)


@main.group()
def affine():
    """Affine root combinatorics under a diagram automorphism."""


case_opt = click.option("--case", type=click.Choice(["A", "B", "C", "D"], case_sensitive=False), required=True)


@affine.command()
@case_opt
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--levels", type=click.IntRange(min=0), default=2, show_default=True)
@fmt_opt
@out_opt
def classify(case, n, levels, fmt, output):
    """Positive real roots with level, orbit size, O-image and Sigma family."""
    try:
        rows = affroots.classify_rows(case.upper(), n, levels)
    except affroots.AffineError as e:
        raise click.UsageError(str(e)) from None
    _emit_rows("affine classify", {"case": case.upper(), "n": n, "levels": levels}, rows, fmt, output)


@affine.command()
@case_opt
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--window", type=click.IntRange(min=1), default=200, show_default=True)
@click.option("--orderings", type=click.IntRange(min=1), default=3, show_default=True)
@seed_opt
@fmt_opt
@out_opt
def convex(case, n, window, orderings, seed, fmt, output):
    """Check convexity of the order built from an infinite reduced word."""
    case = case.upper()
    try:
        rep = affroots.verify_convex(case, n, window=window, seed=seed, orderings=orderings)
    except affroots.AffineError as e:
        raise click.UsageError(str(e)) from None
    doc = build_report("affine convex", {"case": case, "n": n, "window": window, "seed": seed,
                                         "orderings": orderings}, [rep])
    if fmt == "json":
        emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", output)
    else:
        rows = [c.as_dict() for c in rep.checks]
        emit(render_rows(rows, "csv" if fmt == "csv" else "text"), output)
    sys.exit(0 if doc["ok"] else 1)


if __name__ == "__main__":
    main()
