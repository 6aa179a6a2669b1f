"""
File formats.

Spectrum CSV
    ``#``-prefixed header lines ``# key = <json value>`` followed by
    comma-separated numeric rows. Required header keys: ``columns`` (list of
    names, first is the axis) and ``calibrated``. Floats are written with 17
    significant digits so a write/read cycle is lossless.

Structured documents
    JSON objects (sorted keys, 2-space indent): cavity models, Airy fits,
    CQED reports and spectra (``{"axis": [...], "channels": {...},
    "metadata": {...}}``).

All writers go through a temporary file in the target directory followed by
an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .cavity import CavityModel, Mirror, PathSection
from .errors import DataFormatError
from .fbg import FBGSpec
from .spectra import Spectrum

SPECTRUM_MAGIC = "nanofiber_fp spectrum v1"
MODEL_SCHEMA = "nanofiber_fp.cavity_model/1"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via temp-file-then-rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_json(path, doc) -> None:
    atomic_write(path, dumps(doc))


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON ({exc})") from exc


# -- cavity model -----------------------------------------------------------

def model_to_dict(model: CavityModel) -> dict:
    def mirror(m: Mirror):
        return {
            "r_amp": m.r_amp,
            "t_amp": m.t_amp,
            "fbg": None if m.fbg is None else asdict(m.fbg),
        }

    return {
        "schema": MODEL_SCHEMA,
        "mirror1": mirror(model.mirror1),
        "mirror2": mirror(model.mirror2),
        "sections": [asdict(s) for s in model.sections],
        "t_c": model.t_c,
        "birefringent_splitting": model.birefringent_splitting,
        "background_transmission": model.background_transmission,
        "resonance_frequency": model.resonance_frequency,
    }


def model_from_dict(d: dict) -> CavityModel:
    try:
        if d.get("schema", MODEL_SCHEMA) != MODEL_SCHEMA:
            raise DataFormatError(f"unknown model schema {d.get('schema')!r}")

        def mirror(md):
            fbg = None if md.get("fbg") is None else FBGSpec(**md["fbg"])
            return Mirror(float(md["r_amp"]), float(md["t_amp"]), fbg)

        return CavityModel(
            mirror(d["mirror1"]),
            mirror(d["mirror2"]),
            tuple(PathSection(**s) for s in d["sections"]),
            t_c=float(d["t_c"]),
            birefringent_splitting=float(d.get("birefringent_splitting", 0.0)),
            background_transmission=float(d.get("background_transmission", 0.9)),
            resonance_frequency=float(d.get("resonance_frequency", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"malformed cavity model: {exc}") from exc


def save_model(path, model: CavityModel) -> None:
    write_json(path, model_to_dict(model))


def load_model(path) -> CavityModel:
    return model_from_dict(read_json(path))


# -- spectra ----------------------------------------------------------------

def spectrum_to_csv(spec: Spectrum, extra_header: dict | None = None) -> str:
    names = ["axis"] + list(spec.channels)
    header = {"columns": names, **spec.metadata, **(extra_header or {})}
    lines = [f"# {SPECTRUM_MAGIC}"]
    for k in sorted(header):
        lines.append(f"# {k} = {json.dumps(_jsonable(header[k]), sort_keys=True)}")
    data = np.column_stack([spec.axis] + [spec.channels[c] for c in spec.channels])
    for row in data:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def spectrum_from_csv(text: str, source: str = "<string>") -> Spectrum:
    header = {}
    rows = []
    for ln, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                try:
                    header[k.strip()] = json.loads(v.strip())
                except json.JSONDecodeError as exc:
                    raise DataFormatError(f"{source}:{ln}: bad header value") from exc
            continue
        try:
            rows.append([float(x) for x in s.split(",")])
        except ValueError as exc:
            raise DataFormatError(f"{source}:{ln}: non-numeric data") from exc
    if not rows:
        raise DataFormatError(f"{source}: no data rows")
    data = np.array(rows)
    names = header.pop("columns", None)
    if names is None:
        names = ["axis", "transmission", "reflection", "etalon", "reference"][: data.shape[1]]
    if len(names) != data.shape[1]:
        raise DataFormatError(f"{source}: {len(names)} column names for {data.shape[1]} columns")
    header.setdefault("calibrated", True)
    return Spectrum(data[:, 0], {n: data[:, i] for i, n in enumerate(names) if i > 0}, header)


def write_spectrum(path, spec: Spectrum, fmt: str = "csv", extra_header: dict | None = None) -> None:
    if fmt == "csv":
        atomic_write(path, spectrum_to_csv(spec, extra_header))
    elif fmt == "json":
        write_json(path, {
            "axis": spec.axis, "channels": spec.channels,
            "metadata": {**spec.metadata, **(extra_header or {})},
        })
    else:
        raise DataFormatError(f"unknown format {fmt!r}")


def read_spectrum(path) -> Spectrum:
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        d = json.loads(text)
        try:
            return Spectrum(d["axis"], d["channels"], d.get("metadata", {}))
        except KeyError as exc:
            raise DataFormatError(f"{path}: missing key {exc}") from exc
    return spectrum_from_csv(text, str(path))


def _csv_cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return repr(float(v))


def rows_to_csv(rows: list, columns, header: dict | None = None) -> str:
    """Plot-ready table: header comments, a column-name line, then data rows."""
    lines = [f"# {k} = {json.dumps(_jsonable(v), sort_keys=True)}" for k, v in sorted((header or {}).items())]
    lines.append(",".join(columns))
    for r in rows:
        lines.append(",".join(_csv_cell(r[c]) for c in columns))
    return "\n".join(lines) + "\n"
