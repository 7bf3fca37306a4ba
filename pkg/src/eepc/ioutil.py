"""Atomic result files: CSV with embedded config, JSON summaries."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from importlib import resources

from . import __version__

SCHEMA_VERSION = 1


def version_hash(config: dict) -> str:
    ident = json.dumps({"version": __version__, "config": config}, sort_keys=True, default=str)
    return hashlib.sha256(ident.encode()).hexdigest()[:12]


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def write_csv(path: str, columns: list[str], rows: list, config: dict) -> None:
    """CSV with `# key = value` comment header embedding the resolved config."""
    buf = io.StringIO()
    buf.write(f"# eepc {__version__} hash={version_hash(config)}\n")
    for key in sorted(config):
        buf.write(f"# {key} = {config[key]}\n")
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow(list(row))
    atomic_write_text(path, buf.getvalue())


def read_csv_rows(path: str) -> tuple[list[str], list[list[str]]]:
    """Read a result CSV back, skipping the comment header."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def summary_payload(command: str, config: dict, results: dict) -> dict:
    return {
        "schema": "eepc-summary",
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "version_hash": version_hash(config),
        "command": command,
        "config": config,
        "results": results,
    }


def write_json_summary(path: str, command: str, config: dict, results: dict) -> dict:
    payload = summary_payload(command, config, results)
    validate_summary(payload)
    atomic_write_text(path, json.dumps(payload, indent=2, default=str) + "\n")
    return payload


def load_schema() -> dict:
    with resources.files("eepc.schemas").joinpath("summary.schema.json").open() as fh:
        return json.load(fh)


def validate_summary(payload: dict) -> None:
    """Structural check of a summary against the published schema."""
    schema = load_schema()
    _validate(payload, schema, "$")


def _validate(value, schema: dict, where: str) -> None:
    typ = schema.get("type")
    types = {"object": dict, "string": str, "integer": int, "number": (int, float),
             "array": list, "boolean": bool}
    if typ is not None and not isinstance(value, types[typ]):
        raise ValueError(f"{where}: expected {typ}, got {type(value).__name__}")
    if typ == "object":
        for key in schema.get("required", []):
            if key not in value:
                raise ValueError(f"{where}: missing required key {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in value:
                _validate(value[key], sub, f"{where}.{key}")
    if "const" in schema and value != schema["const"]:
        raise ValueError(f"{where}: expected {schema['const']!r}, got {value!r}")
