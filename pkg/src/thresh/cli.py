"""Command line front door. Every command is a thin composition of library
operations; no behavior lives here that the library does not already have.

Exit codes: 0 success, 1 validation or conversion failure, 2 usage or I/O.
Diagnostics go to stderr; `--json` emits them as a JSON array on stdout.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from typing import Any

import click

from . import __version__
from .annotations import (
    AnnotationSet,
    merge_annotations,
    parse_annotations,
    parse_instances,
    serialize_annotations,
)
from .compiler import interface_json, read_bundle, write_bundle
from .converters import converter_names, from_unified, to_unified
from .errors import Diagnostic, ThreshError
from .typology import parse_template

UNIFIED = "unified"


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc.strerror or exc}", err=True)
        sys.exit(2)


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
            if not text.endswith("\n"):
                f.write("\n")
    except OSError as exc:
        click.echo(f"cannot write {out}: {exc.strerror or exc}", err=True)
        sys.exit(2)


def _emit_diagnostics(diagnostics: list[Diagnostic], as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps([d.to_dict() for d in diagnostics], ensure_ascii=False))
        return
    for d in diagnostics:
        where = f" {d.path}" if d.path else ""
        click.echo(f"{d.severity} {d.code}{where}: {d.message}", err=True)


def _fail(exc: ThreshError, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(exc.detail_dicts(), ensure_ascii=False))
    else:
        where = f" {exc.path}" if exc.path else ""
        click.echo(f"error {exc.code}{where}: {exc.message}", err=True)
        for d in exc.diagnostics[1:]:
            click.echo(f"{d.severity} {d.code} {d.path}: {d.message}", err=True)
    sys.exit(1)


@click.group()
@click.version_option(version=__version__, prog_name="thresh")
def main() -> None:
    """Span-level text annotation: validate, compile, convert, merge, serve."""


@main.command()
@click.option("-t", "--template", "template_path", required=True, type=click.Path())
@click.option("-d", "--data", "data_path", type=click.Path(), default=None,
              help="Instance file to validate against the template.")
@click.option("-a", "--annotations", "annotation_paths", type=click.Path(), multiple=True,
              help="Annotation file(s) to validate; needs --data.")
@click.option("--json", "as_json", is_flag=True, help="Diagnostics as a JSON array on stdout.")
def validate(template_path: str, data_path: str | None, annotation_paths: tuple[str, ...],
             as_json: bool) -> None:
    """Check a template, and optionally data and annotations, for violations."""
    if annotation_paths and data_path is None:
        click.echo("--annotations requires --data", err=True)
        sys.exit(2)
    try:
        t = parse_template(_read_file(template_path))
        diagnostics = list(t.warnings)
        if data_path is not None:
            instances = parse_instances(_read_file(data_path), t.config)
            for path in annotation_paths:
                parse_annotations(_read_file(path), t, instances)
    except ThreshError as exc:
        _fail(exc, as_json)
        return
    _emit_diagnostics(diagnostics, as_json)


@main.command()
@click.option("-t", "--template", "template_path", required=True, type=click.Path())
@click.option("-d", "--data", "data_path", required=True, type=click.Path())
@click.option("-a", "--annotations", "annotations_path", type=click.Path(), default=None)
@click.option("--locale", default=None, help="Override the template language.")
@click.option("-o", "--out", default=None, help="Write the interface JSON here.")
@click.option("--json", "as_json", is_flag=True, help="Diagnostics as a JSON array on failure.")
def compile(template_path: str, data_path: str, annotations_path: str | None,
            locale: str | None, out: str | None, as_json: bool) -> None:
    """Compile template + data (+ annotations) into interface JSON."""
    try:
        t = parse_template(_read_file(template_path))
        instances = parse_instances(_read_file(data_path), t.config)
        annotations: AnnotationSet | None = None
        if annotations_path is not None:
            annotations = parse_annotations(_read_file(annotations_path), t, instances)
        payload = interface_json(t, instances, annotations, locale=locale)
    except ThreshError as exc:
        _fail(exc, as_json)
        return
    _write_output(payload, out)


@main.command()
@click.option("-t", "--template", "template_path", required=True, type=click.Path())
@click.option("-d", "--data", "data_path", required=True, type=click.Path())
@click.option("-a", "--annotations", "annotations_path", type=click.Path(), default=None)
@click.option("-o", "--out", required=True, help="Bundle path, conventionally *.thresh.json.")
def bundle(template_path: str, data_path: str, annotations_path: str | None, out: str) -> None:
    """Pack template, data, and optional annotations into one portable file."""
    template_text = _read_file(template_path)
    data_text = _read_file(data_path)
    annotations_text = _read_file(annotations_path) if annotations_path else None
    try:
        t = parse_template(template_text)
        instances = parse_instances(data_text, t.config)
        if annotations_text is not None:
            parse_annotations(annotations_text, t, instances)
        payload = write_bundle(template_text, data_text, annotations_text)
    except ThreshError as exc:
        _fail(exc, False)
        return
    _write_output(payload, out)


@main.command()
@click.argument("bundle_path", type=click.Path())
@click.option("-d", "--dest", required=True, help="Directory for the unpacked sections.")
def unbundle(bundle_path: str, dest: str) -> None:
    """Unpack a bundle after verifying its manifest hashes."""
    import os

    try:
        parts = read_bundle(_read_file(bundle_path))
    except ThreshError as exc:
        _fail(exc, False)
        return
    try:
        os.makedirs(dest, exist_ok=True)
        with open(os.path.join(dest, "template.yml"), "w", encoding="utf-8") as f:
            f.write(parts.template)
        with open(os.path.join(dest, "data.json"), "w", encoding="utf-8") as f:
            f.write(parts.instances)
        if parts.annotations is not None:
            with open(os.path.join(dest, "annotations.json"), "w", encoding="utf-8") as f:
                f.write(parts.annotations)
    except OSError as exc:
        click.echo(f"cannot write into {dest}: {exc.strerror or exc}", err=True)
        sys.exit(2)
    click.echo(f"unpacked into {dest}", err=True)


@main.command()
@click.option("--from", "from_format", required=True,
              help=f"Input format: {UNIFIED} or an external format name.")
@click.option("--to", "to_format", required=True,
              help=f"Output format: {UNIFIED} or an external format name.")
@click.option("-i", "--in", "input_path", required=True, type=click.Path())
@click.option("-o", "--out", default=None)
@click.option("-t", "--template", "template_path", required=True, type=click.Path())
@click.option("-d", "--data", "data_path", required=True, type=click.Path())
def convert(from_format: str, to_format: str, input_path: str, out: str | None,
            template_path: str, data_path: str) -> None:
    """Convert annotations between the unified format and an external one.

    Exactly one side must be `unified`. External formats: offset-label.
    """
    external = [f for f in (from_format, to_format) if f != UNIFIED]
    if len(external) != 1:
        click.echo(f"exactly one of --from/--to must be {UNIFIED!r} "
                   f"(external formats: {', '.join(converter_names())})", err=True)
        sys.exit(2)
    try:
        t = parse_template(_read_file(template_path))
        instances = parse_instances(_read_file(data_path), t.config)
        text = _read_file(input_path)
        if from_format == UNIFIED:
            annotations = parse_annotations(text, t, instances)
            result = from_unified(to_format, annotations, t, instances)
        else:
            result = serialize_annotations(to_unified(from_format, text, t, instances))
    except ThreshError as exc:
        _fail(exc, False)
        return
    _write_output(result, out)


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path())
@click.option("-t", "--template", "template_path", required=True, type=click.Path())
@click.option("-d", "--data", "data_path", required=True, type=click.Path())
@click.option("-o", "--out", default=None)
@click.option("--json", "as_json", is_flag=True, help="Diagnostics as a JSON array on stdout.")
def merge(files: tuple[str, ...], template_path: str, data_path: str, out: str | None,
          as_json: bool) -> None:
    """Union several annotation files; conflicts are reported and excluded.

    Exits 1 when any conflict was found, even though the merged output
    (with conflicting entries removed) is still written.
    """
    try:
        t = parse_template(_read_file(template_path))
        instances = parse_instances(_read_file(data_path), t.config)
        merged, diagnostics = merge_annotations([_read_file(p) for p in files], t, instances)
    except ThreshError as exc:
        _fail(exc, as_json)
        return
    had_errors = any(d.severity == "error" for d in diagnostics)
    _emit_diagnostics(diagnostics, as_json)
    _write_output(serialize_annotations(merged), out)
    if had_errors:
        sys.exit(1)


@main.command()
@click.option("-c", "--config", "config_path", type=click.Path(), default=None,
              help="YAML config; defaults to $THRESH_CONFIG when set.")
@click.option("--port", type=int, default=None, help="Override the configured port.")
@click.option("--host", default=None, help="Override the configured host.")
@click.option("--store", "store_dir", default=None, help="Session directory (else in-memory).")
@click.option("--static", "static_dir", default=None, help="Serve this directory at /.")
def serve(config_path: str | None, port: int | None, host: str | None,
          store_dir: str | None, static_dir: str | None) -> None:
    """Run the annotation service."""
    from .server import load_config
    from .server.app import serve as run_server

    try:
        config = load_config(config_path)
    except ThreshError as exc:
        _fail(exc, False)
        return
    except OSError as exc:
        click.echo(f"cannot read config: {exc.strerror or exc}", err=True)
        sys.exit(2)
    overrides: dict[str, Any] = {}
    if port is not None:
        overrides["port"] = port
    if host is not None:
        overrides["host"] = host
    if store_dir is not None:
        overrides["store_dir"] = store_dir
    if static_dir is not None:
        overrides["static_dir"] = static_dir
    if overrides:
        config = dataclasses.replace(config, **overrides)
    run_server(config)


if __name__ == "__main__":
    main()
