import os
import csv
import json
import math
import logging

from core.config import Config
from core.errors import ReportError
from lab.discretization import SPHERE_MEASURE, EQUATOR_MEASURE

logger = logging.getLogger("report")

COLUMNS = ("m", "lambda", "eps", "tau_re", "tau_im", "regime", "value_kind", "value", "flag")
FORMATS = ("csv", "json")

NORMALIZATION_NOTE = (
    f"Integrals are against a(x)^2 dx without angular factors; sphere-integrated norms "
    f"carry {SPHERE_MEASURE!r} and equatorial-mode reductions {EQUATOR_MEASURE!r}."
)


def _number(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def make_row(m, lam, eps, tau, regime, value_kind, value, flag=""):
    """
    One report row with plain Python scalars

    Args:
        m (int): Degeneracy
        lam (float or None): lambda
        eps (float or None): eps
        tau (complex or None): tau
        regime (str or None): Regime label
        value_kind (str): What value measures
        value (float or None): Measurement, None when it could not be taken
        flag (str): Empty, or a short status such as 'near_resonance'

    Returns:
        dict: Row keyed by COLUMNS
    """
    tau = None if tau is None else complex(tau)
    return {
        "m": int(m),
        "lambda": _number(lam),
        "eps": _number(eps),
        "tau_re": None if tau is None else _number(tau.real),
        "tau_im": None if tau is None else _number(tau.imag),
        "regime": "" if regime is None else str(regime),
        "value_kind": str(value_kind),
        "value": _number(value),
        "flag": str(flag or ""),
    }


def _sort_key(row):
    lam = row["lambda"]
    eps = row["eps"]
    return (row["m"], -math.inf if lam is None else lam, -math.inf if eps is None else eps)


class SweepReport:
    """
    Config echo, measured rows, fits and pass/fail flags of one sweep

    Rows are kept sorted by (m, lambda, eps); the sort is stable so rows
    sharing a key stay in measurement order.
    """
    def __init__(self, config_echo, rows, fits=None, flags=None):
        self.config = config_echo
        self.rows = sorted((dict(row) for row in rows), key=_sort_key)
        self.fits = dict(fits or {})
        self.flags = {name: bool(value) for name, value in (flags or {}).items()}

    @property
    def passed(self):
        return all(self.flags.values())

    def failed_flags(self):
        return sorted(name for name, value in self.flags.items() if not value)

    def as_dict(self):
        return {
            "config": self.config,
            "normalization": NORMALIZATION_NOTE,
            "rows": self.rows,
            "fits": self.fits,
            "flags": self.flags,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, document):
        try:
            return cls(document["config"], document["rows"], document.get("fits"), document.get("flags"))
        except (KeyError, TypeError) as e:
            raise ReportError(f"Malformed report document: {e}")


def _csv_value(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(report, file_path):
    with open(file_path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(COLUMNS)
        for row in report.rows:
            writer.writerow([_csv_value(row[column]) for column in COLUMNS])


def write_json(report, file_path):
    with open(file_path, 'w') as f:
        json.dump(report.as_dict(), f, sort_keys=True, indent=2)
        f.write('\n')


def emit_report(report, fmt, out_dir, basename):
    """
    Write a report as CSV or JSON

    Args:
        report (SweepReport): Complete report
        fmt (str): 'csv' or 'json'
        out_dir (str): Output directory, created when missing
        basename (str): File name without extension

    Returns:
        str: Path of the written file
    """
    if fmt not in FORMATS:
        raise ReportError(f"Unknown report format '{fmt}', expected one of {FORMATS}")
    file_path = os.path.join(out_dir, f"{basename}.{fmt}")
    try:
        os.makedirs(out_dir, exist_ok=True)
        if fmt == "csv":
            write_csv(report, file_path)
        else:
            write_json(report, file_path)
    except OSError as e:
        raise ReportError(f"Could not write {file_path}: {e}")
    logger.info(f"Wrote {len(report.rows)} rows to {file_path}")
    return file_path


def load_report(file_path):
    """
    Read a JSON report written by emit_report
    """
    try:
        document = Config.load_json(file_path)
    except (OSError, ValueError) as e:
        raise ReportError(f"Could not read report {file_path}: {e}")
    return SweepReport.from_dict(document)
