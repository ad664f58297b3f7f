"""``ecorelint`` command line.

Exit codes: 0 success (lint: no findings), 1 lint found only warnings or
info, 2 errors found or the operation was refused (conflicts, unsatisfiable
root, missing element), 3 usage, configuration or parse failure.
"""
from __future__ import annotations

import json
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional

import click

from .compare import (
    ConflictList, ReplaceScope, copy_elements, diff, import_package, render_changelog,
    search_replace,
)
from .config import CliConfig, load_config
from .diagnostics import DiagnosticReport, catalog_table
from .errors import (
    ConfigError, EcoreError, ElementNotFound, InstanceError, LayoutFormatError, XmiFormatError,
    XmiSyntaxError,
)
from .export import export_docs, export_svg
from .instances import (
    Unsatisfiable, parse_instance, serialize_instance, synthesize_minimal_instance,
    validate_instance,
)
from .jsonio import export_json
from .layout import LayoutModel, parse_layout
from .metamodel import FilterQuery, filter_selection
from .naming import load_dictionary
from .provenance import element_history, provenance_log_append
from .rules import run_rules
from .xmi import load_model, serialize_xmi

EXIT_OK, EXIT_WARN, EXIT_FAIL, EXIT_USAGE = 0, 1, 2, 3

_INPUT_ERRORS = (XmiSyntaxError, XmiFormatError, LayoutFormatError, ConfigError, InstanceError)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def atomic_write(path, data: bytes) -> None:
    """Write through a temporary file in the same directory, then rename."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(data: bytes, output: Optional[str]) -> None:
    if output:
        atomic_write(output, data)
    else:
        click.echo(data.decode("utf-8"), nl=False)


def _destination(model_path: str, output: Optional[str], write: bool) -> Optional[str]:
    if write and output:
        raise click.UsageError("use either --write or --output, not both")
    return model_path if write else output


class EcoreLintGroup(click.Group):
    """Maps exceptions onto the exit-code table instead of click's defaults."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            code = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                                standalone_mode=False, **extra)
        except click.UsageError as exc:
            exc.show()
            code = EXIT_USAGE
        except click.ClickException as exc:
            exc.show()
            code = EXIT_USAGE
        except click.Abort:
            click.echo("aborted", err=True)
            code = EXIT_USAGE
        except _INPUT_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            code = EXIT_USAGE
        except OSError as exc:
            click.echo(f"error: {exc.filename or ''}: {exc.strerror}", err=True)
            code = EXIT_USAGE
        except EcoreError as exc:
            click.echo(f"error: {exc}", err=True)
            code = EXIT_FAIL
        code = code if isinstance(code, int) else EXIT_OK
        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=EcoreLintGroup)
@click.version_option(package_name="ecorelint")
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="JSON config file (default: $ECORELINT_CONFIG).")
@click.pass_context
def cli(ctx, config_path):
    """Quality checks, diffs and exports for Ecore metamodels."""
    ctx.obj = load_config(config_path)


def _config(ctx) -> CliConfig:
    return ctx.find_root().obj or CliConfig()


# -- lint -------------------------------------------------------------------------------

def _human(report: DiagnosticReport, filename: str) -> str:
    lines = []
    for d in report.diagnostics:
        line, col = d.location or (0, 0)
        lines.append(f"{filename}:{line}:{col} {d.rule_id} {d.severity} {d.message} [{d.path}]")
    s = report.summary["by_severity"]
    lines.append(f"{report.summary['total']} finding(s): {s['error']} error(s), "
                 f"{s['warning']} warning(s), {s['info']} info")
    return "\n".join(lines)


@cli.command()
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--layout", "layout_path", type=click.Path(exists=True, dir_okay=False),
              help="Layout sidecar for the layout rules.")
@click.option("--dict", "dict_path", type=click.Path(dir_okay=False),
              help="Word list for the spelling rule.")
@click.option("--format", "fmt", type=click.Choice(["human", "json"]), default=None)
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="Config file overriding the global one.")
@click.pass_context
def lint(ctx, model_path, layout_path, dict_path, fmt, config_path):
    """Run the rule catalog on MODEL_PATH."""
    cfg = load_config(config_path) if config_path else _config(ctx)
    fmt = fmt or cfg.format
    model = load_model(model_path)
    layout = parse_layout(Path(layout_path).read_bytes(), model) if layout_path else None
    dict_path = dict_path or cfg.dictionary
    dictionary = load_dictionary(dict_path) if dict_path else None
    report = run_rules(model, layout=layout, dictionary=dictionary, config=cfg.rules)
    if fmt == "json":
        click.echo(_dump(report.to_json()))
    else:
        click.echo(_human(report, model_path))
    if report.has_errors():
        return EXIT_FAIL
    return EXIT_WARN if report.diagnostics else EXIT_OK


@cli.command("rules")
@click.option("--format", "fmt", type=click.Choice(["human", "json"]), default="human")
def rules_cmd(fmt):
    """List the rule catalog."""
    table = catalog_table()
    if fmt == "json":
        click.echo(_dump(table))
        return EXIT_OK
    for row in table:
        flag = "" if row["enabled"] else " (off by default)"
        click.echo(f"{row['id']}  {row['level']:<10} {row['severity']:<8}"
                   f"{row['description']}{flag}")
    return EXIT_OK


# -- compare ----------------------------------------------------------------------------

@cli.command("diff")
@click.argument("old_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("new_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--log", "log_path", type=click.Path(dir_okay=False),
              help="Append the changes to this provenance log.")
@click.option("--time", "timestamp", type=float, help="Timestamp for log records (default: now).")
@click.pass_context
def diff_cmd(ctx, old_path, new_path, fmt, log_path, timestamp):
    """Changelog between two versions of a model."""
    delta = diff(load_model(old_path), load_model(new_path))
    _emit(render_changelog(delta, fmt), None)
    log_path = log_path or _config(ctx).provenance_log
    if log_path:
        provenance_log_append(log_path, delta, time.time() if timestamp is None else timestamp)
    return EXIT_OK


@cli.command()
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("pattern")
@click.argument("replacement")
@click.option("--regex", is_flag=True, help="Treat PATTERN as a regular expression ($1 for groups).")
@click.option("--ignore-case", is_flag=True)
@click.option("--kind", "kinds", multiple=True, help="Element kinds in scope (default: all).")
@click.option("--field", "fields", multiple=True, default=("name",), show_default=True,
              help="Fields in scope.")
@click.option("--dry-run", is_flag=True, help="Only list the changes.")
@click.option("--write", is_flag=True, help="Rewrite MODEL_PATH in place.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def replace(model_path, pattern, replacement, regex, ignore_case, kinds, fields, dry_run,
            write, output):
    """Search and replace in names and other text fields."""
    dest = _destination(model_path, output, write)
    model = load_model(model_path)
    scope = ReplaceScope(tuple(kinds) or None, tuple(fields))
    new, changes = search_replace(model, pattern, replacement, scope,
                                  case_sensitive=not ignore_case, regex=regex, dry_run=dry_run)
    listing = [f"{c.path} {c.field}: {c.old!r} -> {c.new!r}" for c in changes.renames]
    if dry_run:
        click.echo("\n".join(listing + [f"{len(changes)} change(s) (dry run)"]))
        return EXIT_OK
    _emit(serialize_xmi(new), dest)
    click.echo(f"{len(changes)} change(s)", err=True)
    return EXIT_OK


def _report_conflicts(result: ConflictList) -> int:
    for c in result:
        click.echo(f"conflict: {c.name} exists at {c.target_path} (from {c.source_path})", err=True)
    return EXIT_FAIL


@cli.command("import")
@click.argument("target_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--write", is_flag=True, help="Rewrite TARGET_PATH in place.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def import_cmd(target_path, source_path, write, output):
    """Import every classifier of SOURCE into TARGET, refusing on name clashes."""
    dest = _destination(target_path, output, write)
    result = import_package(load_model(target_path), load_model(source_path))
    if isinstance(result, ConflictList):
        return _report_conflicts(result)
    _emit(serialize_xmi(result), dest)
    return EXIT_OK


@cli.command("copy")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("target_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("paths", nargs=-1, required=True)
@click.option("--into", help="Target package or class path (default: target root package).")
@click.option("--write", is_flag=True, help="Rewrite TARGET_PATH in place.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def copy_cmd(source_path, target_path, paths, into, write, output):
    """Copy classifiers or features from SOURCE into TARGET."""
    dest = _destination(target_path, output, write)
    result = copy_elements(load_model(source_path), paths, load_model(target_path), into=into)
    if isinstance(result, ConflictList):
        return _report_conflicts(result)
    _emit(serialize_xmi(result), dest)
    return EXIT_OK


# -- instances --------------------------------------------------------------------------

@cli.group()
def instance():
    """Validate or create dynamic instances."""


@instance.command("validate")
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["human", "json"]), default="human")
def instance_validate(model_path, instance_path, fmt):
    """Check INSTANCE_PATH against the metamodel."""
    model = load_model(model_path)
    obj = parse_instance(Path(instance_path).read_bytes(), model)
    report = DiagnosticReport(validate_instance(obj, model))
    if fmt == "json":
        click.echo(_dump(report.to_json()))
    else:
        click.echo(_human(report, instance_path))
    return EXIT_FAIL if report.has_errors() else EXIT_OK


@instance.command("new")
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--root", required=True, help="Class name or element path of the root object.")
@click.option("--max-depth", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def instance_new(model_path, root, max_depth, output):
    """Print the smallest valid instance of ROOT."""
    model = load_model(model_path)
    try:
        cls = model.find_class(root)
    except ElementNotFound:
        click.echo(f"error: no class {root!r} in {model_path}", err=True)
        return EXIT_FAIL
    result = synthesize_minimal_instance(model, cls, max_depth=max_depth)
    if isinstance(result, Unsatisfiable):
        where = f" at {result.path}" if result.path is not None else ""
        click.echo(f"unsatisfiable{where}: {result.reason}", err=True)
        return EXIT_FAIL
    _emit(serialize_instance(result, model), output)
    return EXIT_OK


# -- export, filter, age ------------------------------------------------------------------

@cli.command("export")
@click.argument("fmt", type=click.Choice(["json", "svg", "docs", "xmi"]))
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--layout", "layout_path", type=click.Path(exists=True, dir_okay=False),
              help="Layout sidecar (svg only).")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def export_cmd(fmt, model_path, layout_path, output):
    """Export MODEL_PATH as JSON, SVG, Markdown docs or canonical XMI."""
    model = load_model(model_path)
    if fmt == "json":
        data = export_json(model)
    elif fmt == "svg":
        layout = parse_layout(Path(layout_path).read_bytes(), model) if layout_path else LayoutModel()
        data = export_svg(model, layout)
    elif fmt == "docs":
        data = export_docs(model)
    else:
        data = serialize_xmi(model)
    _emit(data, output)
    return EXIT_OK


@cli.command("filter")
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("query")
@click.option("--format", "fmt", type=click.Choice(["human", "json"]), default="human")
def filter_cmd(model_path, query, fmt):
    """Element paths matching QUERY, e.g. supertypes-of:Order or by-kind:EEnum."""
    model = load_model(model_path)
    try:
        q = FilterQuery.parse(query)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="QUERY") from None
    picked = filter_selection(model, q)
    ordered = [str(p) for p in model.element_index if p in picked]
    click.echo(_dump(ordered) if fmt == "json" else "\n".join(ordered))
    return EXIT_OK


@cli.command("age")
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("log_path", type=click.Path(dir_okay=False), required=False)
@click.option("--now", type=float, help="Reference time in unix seconds (default: now).")
@click.option("--format", "fmt", type=click.Choice(["human", "json"]), default="human")
@click.pass_context
def age_cmd(ctx, model_path, log_path, now, fmt):
    """Age and last modification of every class, from the provenance log."""
    log_path = log_path or _config(ctx).provenance_log
    if not log_path:
        raise click.UsageError("no provenance log given")
    model = load_model(model_path)
    history = element_history(log_path, model, time.time() if now is None else now)
    rows = [{"path": str(p), "age": h.age, "created": h.created, "last_modified": h.last_modified}
            for p, h in history.items() if model.element_index[p].kind == "EClass"]
    if fmt == "json":
        click.echo(_dump(rows))
    else:
        for r in rows:
            age = "unknown" if r["age"] is None else f"{r['age']:g}s"
            mod = "" if r["last_modified"] is None else f" (modified at {r['last_modified']:g})"
            click.echo(f"{r['path']} {age}{mod}")
    return EXIT_OK


def main(argv=None) -> int:
    return cli.main(args=argv, prog_name="ecorelint", standalone_mode=True)


if __name__ == "__main__":
    main()
