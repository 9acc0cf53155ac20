#!/usr/bin/env python3.11
"""
Data conversion utilities for result files.

Numpy scalars, arrays and complex numbers are converted to plain JSON types;
CSV tables carry '#'-prefixed metadata lines ahead of the header row, with
the generation timestamp alone on the first line.
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np


class NumericJSONEncoder(json.JSONEncoder):
    """JSON encoder that handles numpy values and complex numbers"""
    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return prepare_json_serializable(obj.tolist())
        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, (np.floating,)):
            return float(obj)
        if isinstance(obj, (np.bool_,)):
            return bool(obj)
        if isinstance(obj, (complex, np.complexfloating)):
            return complex_to_pair(obj)
        if isinstance(obj, tuple):
            return list(obj)
        return super().default(obj)


def complex_to_pair(z: complex) -> List[float]:
    """[re, im] with negative zeros cleared"""
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def prepare_json_serializable(obj: Any) -> Any:
    """Recursively convert a structure to JSON-native types"""
    if isinstance(obj, dict):
        return {str(key): prepare_json_serializable(value) for key, value in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [prepare_json_serializable(item) for item in obj]
    elif isinstance(obj, np.ndarray):
        return prepare_json_serializable(obj.tolist())
    elif isinstance(obj, (complex, np.complexfloating)):
        return complex_to_pair(obj)
    elif isinstance(obj, np.integer):
        return int(obj)
    elif isinstance(obj, np.floating):
        return float(obj)
    elif isinstance(obj, np.bool_):
        return bool(obj)
    else:
        return obj


def format_value(value: Any) -> str:
    """Stable text form of one CSV cell"""
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]],
               metadata: Optional[Dict[str, Any]] = None, generated: Optional[str] = None) -> str:
    """CSV text with '# generated', '# key: value' metadata, header and rows"""
    buffer = io.StringIO()
    if generated is not None:
        buffer.write(f"# generated: {generated}\n")
    for key, value in (metadata or {}).items():
        buffer.write(f"# {key}: {value}\n")
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv_file(file_path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]],
                   metadata: Optional[Dict[str, Any]] = None, generated: Optional[str] = None) -> Path:
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    file_path.write_text(render_csv(header, rows, metadata, generated))
    return file_path


def read_csv_table(file_path: Path) -> Dict[str, Any]:
    """Parse a table written by write_csv_file into metadata, header and rows"""
    metadata: Dict[str, str] = {}
    body: List[str] = []
    for line in Path(file_path).read_text().splitlines():
        if line.startswith('#'):
            key, _, value = line[1:].strip().partition(':')
            metadata[key.strip()] = value.strip()
        else:
            body.append(line)
    parsed = list(csv.reader(body))
    return {'metadata': metadata, 'header': parsed[0] if parsed else [], 'rows': parsed[1:]}
