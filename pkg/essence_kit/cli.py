#!/usr/bin/env python
"""
🪢 essence-kit command line

Reports on the spanning surfaces of a link diagram: flags, Tait and state
graphs, Goeritz forms, essence bounds, cap searches and deplumbings.

🔧 Usage:
    essence-kit classify trefoil.pd
    essence-kit essence --color black trefoil.pd
    essence-kit essence --state allA --end-essential torus_grid
    essence-kit capsearch --height 2 p222.pd
    essence-kit deplumb --twisted --threshold inf --color black trefoil.pd
    essence-kit --format json selftest --quick

A diagram argument is a PD or JSON file, ``-`` for stdin, or the name of a
fixture under ``data/fixtures`` (``trefoil``, ``8_18``, ...).

🧾 Logs go to stderr and ``<log_dir>/essence-kit.log``; stdout carries only
the report.
"""
from __future__ import annotations

import math
import random
import sys
from functools import wraps
from pathlib import Path

import click
from pydantic import BaseModel, Field, ValidationError, model_validator

from essence_kit.capsearch import MODES, build_decomposition, dump_strata, find_bounded_height_caps
from essence_kit.config import Settings, get_settings
from essence_kit.diagram import (
    COLORS,
    LinkDiagram,
    classify_diagram,
    diagram_to_json,
    parse_state,
    serialize_diagram,
)
from essence_kit.errors import BudgetExceeded, EssenceKitError, HypothesisError, UsageError
from essence_kit.essence import (
    checkerboard_bounds_report,
    combine_bounds,
    end_essential_report,
    ess_c_report,
    essence_alternating_checkerboard,
    essence_state_surface,
)
from essence_kit.generators import diagram_from_text, fixture_names, load_fixture, random_alternating_diagram, read_diagram
from essence_kit.goeritz import definite_form, form_minimum, goeritz_matrix, is_positive_definite
from essence_kit.graphs import betti_1, cut_components, girth, is_adequate, is_homogeneous, state_graph, tait_graph
from essence_kit.logconf import logging
from essence_kit.plumbing import deplumb_state, hierarchical_twisted_deplumb, plumbing_bound
from essence_kit.selftest import run_selftest
from essence_kit.serialize import render_json, render_table, table

log = logging.getLogger(__name__)

_COLOR = click.Choice(COLORS)


class RunConfig(BaseModel):
    """One invocation; the flags must fit the command before any work starts."""

    command: str
    source: str = "-"
    color: str | None = Field(None, pattern=r"^(black|white)$")
    state: str | None = None
    max_height: int = Field(2, ge=0)
    max_l: int | None = Field(None, ge=0)
    mode: str = Field("geometric", pattern=r"^(geometric|boundary|algebraic)$")
    twisted: bool = False
    output: str = Field("text", pattern=r"^(text|json)$")
    seed: int = 0

    @model_validator(mode="after")
    def _flags_fit_command(self):
        if self.command in ("goeritz", "capsearch") and self.color is None:
            raise ValueError(f"{self.command} needs --color")
        if self.command == "essence" and (self.color is None) == (self.state is None):
            raise ValueError("essence needs exactly one of --color and --state")
        if self.command == "deplumb":
            if self.twisted and self.color is None:
                raise ValueError("deplumb --twisted needs --color")
            if not self.twisted and self.state is None:
                raise ValueError("deplumb needs --state, or --twisted with --color")
        return self


class Run(BaseModel):
    settings: Settings
    output: str = "text"

    def config(self, command: str, **flags) -> RunConfig:
        try:
            return RunConfig(command=command, output=self.output, seed=self.settings.seed, **flags)
        except ValidationError as e:
            raise UsageError("; ".join(err["msg"].removeprefix("Value error, ") for err in e.errors())) from e

    def emit(self, payload, headline: str = "", *tables):
        if self.output == "json":
            click.echo(render_json(payload))
            return
        if headline:
            click.echo(headline)
        for t in tables:
            click.echo(render_table(t), nl=False)


def reported(fn):
    """Turn library errors into a red message and the error's exit code."""
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EssenceKitError as exc:
            click.secho(f"❌ {type(exc).__name__}: {exc}", fg="red", err=True)
            sys.exit(exc.exit_code)
    return wrapper


def _diagram(run: Run, source: str) -> LinkDiagram:
    if source == "-":
        return diagram_from_text(click.get_text_stream("stdin").read())
    if Path(source).is_file():
        return read_diagram(source)
    return load_fixture(source, run.settings)


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _num(x) -> str:
    return "∞" if isinstance(x, float) and math.isinf(x) else str(x)


@click.group()
@click.option("--format", "output", type=click.Choice(["text", "json"]), default="text", help="Report format on stdout")
@click.option("--threads", type=click.IntRange(1, 64), help="Worker threads for cap search")
@click.option("--budget", type=click.IntRange(min=1), help="Cap-search node budget")
@click.option("--seed", type=int, help="Seed for generate and selftest")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.pass_context
def cli(ctx, output, threads, budget, seed, log_level):
    """Essence and compressibility reports for spanning surfaces of link diagrams"""
    overrides = {"threads": threads, "node_budget": budget, "seed": seed, "log_level": log_level and log_level.upper()}
    settings = get_settings().model_copy(update={k: v for k, v in overrides.items() if v is not None})
    logging.getLogger().setLevel(settings.log_level)
    ctx.obj = Run(settings=settings, output=output)


@cli.command()
@click.argument("source", default="-")
@click.pass_obj
@reported
def classify(run: Run, source):
    """Alternating, reduced, prime and cellular flags, genus, nugatory crossings"""
    diagram = _diagram(run, source)
    flags = classify_diagram(diagram)
    payload = {
        "crossings": diagram.n,
        "components": diagram.component_count,
        "faces": len(diagram.faces),
        **flags.as_dict(),
    }
    rows = [(k, _yes(v) if isinstance(v, bool) else v) for k, v in payload.items() if k != "nugatory"]
    rows.append(("nugatory", ", ".join(f"c{c + 1}" for c in flags.nugatory) or "-"))
    run.emit(payload, flags.summary(), table("flags", ["flag", "value"], rows))


@cli.command()
@click.argument("source", default="-")
@click.option("--color", type=_COLOR, help="Only this Tait graph")
@click.option("--state", help="Also the state graph: allA, allB, seifert or a label string")
@click.pass_obj
@reported
def graphs(run: Run, source, color, state):
    """Tait graphs and state graphs with girth, adequacy and homogeneity"""
    diagram = _diagram(run, source)
    found = {f"tait:{c}": tait_graph(diagram, c) for c in ([color] if color else COLORS)}
    if state:
        s = parse_state(state, diagram)
        found[f"state:{s}"] = state_graph(diagram, s)
    payload, rows = {}, []
    for name, g in found.items():
        facts = {
            "girth": girth(g),
            "beta_1": betti_1(g),
            "adequate": is_adequate(g),
            "homogeneous": is_homogeneous(g),
            "blocks": [[k + 1 for k in b] for b in cut_components(g).blocks],
        }
        payload[name] = {**g.as_dict(), **facts, "girth": None if math.isinf(facts["girth"]) else facts["girth"]}
        rows.append((name, len(g.vertices), len(g.edges), _num(facts["girth"]), facts["beta_1"],
                     _yes(facts["adequate"]), _yes(facts["homogeneous"]), len(facts["blocks"])))
    cols = ["graph", "vertices", "edges", "girth", "beta_1", "adequate", "homogeneous", "blocks"]
    run.emit(payload, "", table("graphs", cols, rows))


@cli.command()
@click.argument("source", default="-")
@click.option("--color", type=_COLOR, required=True)
@click.pass_obj
@reported
def goeritz(run: Run, source, color):
    """Goeritz matrix of a checkerboard surface and, when definite, its minimum"""
    run.config("goeritz", source=source, color=color)
    diagram = _diagram(run, source)
    form = goeritz_matrix(diagram, color)
    payload = form.as_dict()
    definite = is_positive_definite(form) or is_positive_definite(form.negate())
    payload["definite"] = definite
    payload["minimum"] = None
    if definite and form.n:
        payload["minimum"] = form_minimum(definite_form(form))
    rows = [[str(a) for a in row] for row in form.matrix]
    headline = f"{color} Goeritz form: {form.n}x{form.n}, " + (
        f"definite, minimum {_num(payload['minimum'])}" if definite else "indefinite"
    )
    run.emit(payload, headline, table("G", [str(f) for f in form.retained], rows))


@cli.command()
@click.argument("source", default="-")
@click.option("--color", type=_COLOR, help="Checkerboard surface of this color")
@click.option("--state", help="State surface: allA, allB, seifert or a label string")
@click.option("--ess-c", "with_ess_c", is_flag=True, help="Add the boundary-contractible essence report")
@click.option("--max-r", type=float, default=math.inf, show_default=True, help="Largest cap cycle length for --ess-c")
@click.option("--capsearch-height", type=click.IntRange(min=0), help="Fold in a geometric cap search to this height")
@click.option("--end-essential", is_flag=True, help="Add the end-essential verdict of the state")
@click.pass_obj
@reported
def essence(run: Run, source, color, state, with_ess_c, max_r, capsearch_height, end_essential):
    """Certified bounds on ess, ess_g and ess_c of one surface"""
    run.config("essence", source=source, color=color, state=state)
    diagram = _diagram(run, source)
    extra = {}
    if color:
        try:
            report = essence_alternating_checkerboard(diagram, color)
        except HypothesisError as exc:
            click.secho(f"⚠️ {exc}; reporting bounds only", fg="yellow", err=True)
            report = checkerboard_bounds_report(diagram, color)
        if with_ess_c and not report.failed:
            essc = ess_c_report(diagram, color, max_r)
            extra["ess_c"] = essc.as_dict()
            report = combine_bounds(report, ess_c=essc.bounds)
        if capsearch_height is not None:
            result = find_bounded_height_caps(
                build_decomposition(diagram, color), capsearch_height, "geometric", 0, run.settings
            )
            extra["capsearch"] = result.as_json()
            report = combine_bounds(report, capsearch=[result])
    else:
        s = parse_state(state, diagram)
        report = essence_state_surface(diagram, s)
        if end_essential:
            extra["end_essential"] = end_essential_report(diagram, s).as_dict()
    payload = {**report.as_dict(), **extra}
    tables = []
    certs = [c for b in (report.ess, report.ess_g) for c in b.certificates()]
    if certs:
        tables.append(table("certificates", ["tag", "statement"], sorted({(c.tag, c.statement) for c in certs})))
    if "ess_c" in extra:
        tables.append(table("ess_c", ["beta_1", "value", "note"],
                            [(extra["ess_c"]["beta_1"], extra["ess_c"]["value"], extra["ess_c"]["note"])]))
    if "end_essential" in extra:
        v = extra["end_essential"]
        tables.append(table("end-essential", ["verdict", "theorem", "failed"],
                            [(v["verdict"], v["theorem"] or "-", ", ".join(v["failed"]) or "-")]))
    run.emit(payload, report.summary(), *tables)
    if report.inconclusive:
        sys.exit(HypothesisError.exit_code)


@cli.command()
@click.argument("source", default="-")
@click.option("--color", type=_COLOR, default="black", show_default=True)
@click.option("--height", "max_height", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--mode", type=click.Choice(MODES), default="geometric", show_default=True)
@click.option("--max-l", type=click.IntRange(min=0), default=None, help="Link touches allowed per cap [default: 0, or the settings limit in boundary mode]")
@click.option("--dump-strata", "dump", is_flag=True, help="Print every subdisk type and interface instead")
@click.pass_obj
@reported
def capsearch(run: Run, source, color, max_height, mode, max_l, dump):
    """Bounded-height search for compressing caps of a checkerboard surface"""
    cfg = run.config("capsearch", source=source, color=color, max_height=max_height, mode=mode, max_l=max_l)
    decomp = build_decomposition(_diagram(run, source), cfg.color)
    if dump:
        click.echo(render_json(dump_strata(decomp, cfg.max_height, cfg.mode, run.settings)))
        return
    result = find_bounded_height_caps(decomp, cfg.max_height, cfg.mode, cfg.max_l, run.settings)
    rows = [(k, len(layer)) for k, layer in enumerate(result.strata.layers)]
    tables = [table("strata", ["height", "subdisk types"], rows)]
    if result.caps:
        tables.append(table("caps", ["height", "L touches", "essential"], [
            (a.max_height, v.boundary_L_count, _yes(v.essential)) for a, v in result.caps
        ]))
    run.emit(result.as_json(), result.summary(), *tables)
    if result.budget_exceeded and not result.compressible:
        sys.exit(BudgetExceeded.exit_code)


@cli.command()
@click.argument("source", default="-")
@click.option("--state", help="Untwisted deplumbing of this state surface")
@click.option("--twisted", is_flag=True, help="Hierarchical twisted deplumbing of a checkerboard surface")
@click.option("--color", type=_COLOR, help="Checkerboard color for --twisted")
@click.option("--threshold", type=float, default=math.inf, show_default=True, help="Stop at caps of this complexity")
@click.pass_obj
@reported
def deplumb(run: Run, source, state, twisted, color, threshold):
    """Plumbing factors of a surface and the plumbing lower bound on ess"""
    run.config("deplumb", source=source, color=color, state=state, twisted=twisted)
    diagram = _diagram(run, source)
    if twisted:
        tree = hierarchical_twisted_deplumb(diagram, color, threshold)
    else:
        tree = deplumb_state(diagram, parse_state(state, diagram))
    bound = plumbing_bound(tree)
    payload = {
        **tree.as_dict(),
        "bound": {"value": bound.value, "applicable": bound.applicable, "reason": bound.reason, "tag": bound.tag},
    }
    nodes = table("factors", ["#", "kind", "crossings", "girth", "beta_1", "chi"], [
        (i, n.kind, " ".join(str(c + 1) for c in n.crossings), _num(n.girth), n.beta_1, n.chi)
        for i, n in enumerate(tree.nodes)
    ])
    edges = table("plumbings", ["u", "v", "twisted", "complexity / disk"], [
        (e.u, e.v, _yes(e.twisted), e.complexity if e.twisted else e.cut_vertex) for e in tree.edges
    ])
    headline = f"{len(tree.nodes)} factors, {len(tree.edges)} plumbings; " + (
        f"ess >= {_num(bound.value)} ({bound.tag})" if bound.applicable else f"{bound.tag} not applicable: {bound.reason}"
    )
    run.emit(payload, headline, nodes, edges)


@cli.command()
@click.option("--quick", is_flag=True, help="One twentieth of the cases per suite")
@click.pass_obj
@reported
def selftest(run: Run, quick):
    """Seeded property suites; the JSON summary depends only on the seed"""
    click.secho("🚀 Running selftest suites...", fg="cyan", err=True)
    summary = run_selftest(run.settings.seed, run.settings, quick=quick)
    click.echo(render_json(summary))
    click.secho("✅ selftest passed", fg="green", err=True)


@cli.command()
@click.option("--crossings", type=click.IntRange(min=2), default=6, show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True)
@click.pass_obj
@reported
def generate(run: Run, crossings, count):
    """Random reduced alternating diagrams (medials of random planar maps)"""
    rng = random.Random(run.settings.seed)
    diagrams = [random_alternating_diagram(crossings, rng) for _ in range(count)]
    if run.output == "json":
        click.echo(render_json([diagram_to_json(d) for d in diagrams]))
        return
    click.echo("\n".join(f"# seed {run.settings.seed}, diagram {i + 1}\n{serialize_diagram(d)}" for i, d in enumerate(diagrams)), nl=False)


@cli.command()
@click.pass_obj
def fixtures(run: Run):
    """Names accepted in place of a diagram file"""
    names = fixture_names(run.settings)
    run.emit(names, "\n".join(names))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Serve the HTTP API under uvicorn"""
    import uvicorn

    click.secho(f"🌐 essence-kit API on http://{host}:{port}", fg="cyan", err=True)
    uvicorn.run("backend.main:app", host=host, port=port)


if __name__ == "__main__":
    cli()
