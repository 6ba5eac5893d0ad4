"""Canonical serialization for run reports.

Reports are byte-deterministic: JSON is emitted with sorted keys, fixed
indentation and ASCII escapes, exact rationals carry decimal-string
numerator/denominator plus a rounded decimal rendering, and nothing
embeds a timestamp.  Identical configs and seeds therefore reproduce
identical files.
"""

import csv
import dataclasses
import json
import sys
from fractions import Fraction

from .exact import dec_sci
from .index_sets import IndexSet
from .words import WordExpr, format_word

VERSION = "abset 0.1.0"
DEFAULT_SEED = 20260823

# stage rationals overflow the default int-to-str guard
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(2_000_000)


def fraction_payload(fr: Fraction) -> dict:
    """num/den as decimal strings, plus a fixed-width decimal rendering."""
    return {"num": str(fr.numerator), "den": str(fr.denominator),
            "dec": dec_sci(fr)}


def jsonable(obj):
    """Recursively convert report objects to JSON-serializable values."""
    if isinstance(obj, Fraction):
        return fraction_payload(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str, float)):
        return obj
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in seq]
    if isinstance(obj, WordExpr):
        return format_word(obj)
    if isinstance(obj, IndexSet):
        return jsonable(obj.describe())
    return str(obj)


def canonical_json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2,
                      ensure_ascii=True) + "\n"


def write_json(path: str, obj) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(canonical_json(obj))


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def cell(value) -> str:
    """One CSV cell: exact rationals as num/den, everything else as str."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if value is None:
        return ""
    return str(value)
