"""CSV input and output for the command-line interface."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Tuple

import numpy as np

from .core import Dataset
from .engine import PARAM_NAMES, BoostModel, risk_path
from .errors import DimensionError, GamlssBoostError

INTERCEPT = "(Intercept)"


class DataFormatError(GamlssBoostError, ValueError):
    """The input file cannot be turned into a dataset."""


def fmt(value) -> str:
    """17 significant digits for floats so outputs diff cleanly."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    return str(value)


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_dataset(path, response: str) -> Dataset:
    """Load a CSV with a header row; every column except ``response`` is a covariate."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    except csv.Error as exc:
        raise DataFormatError(f"{path}: malformed CSV: {exc}") from exc
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise DataFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if response not in header:
        raise DataFormatError(f"{path}: response column {response!r} not found (columns: {', '.join(header)})")
    if len(set(header)) != len(header):
        raise DataFormatError(f"{path}: duplicate column names")
    values = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataFormatError(f"{path}, line {i}: expected {len(header)} fields, found {len(row)}")
        for c, cell in enumerate(row):
            cell = cell.strip()
            if cell == "" or cell.lower() in ("na", "nan", "null"):
                raise DataFormatError(f"{path}, line {i}: missing value in column {header[c]!r}")
            try:
                v = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"{path}, line {i}: non-numeric value {cell!r} in column {header[c]!r}"
                ) from None
            if not math.isfinite(v):
                raise DataFormatError(f"{path}, line {i}: non-finite value in column {header[c]!r}")
            values[i - 2, c] = v
    r = header.index(response)
    covariates = [c for c in range(len(header)) if c != r]
    if not covariates:
        raise DataFormatError(f"{path}: no covariate columns besides {response!r}")
    if values.shape[0] < 2:
        raise DataFormatError(f"{path}: need at least two data rows")
    return Dataset(values[:, r], values[:, covariates], tuple(header[c] for c in covariates))


def write_dataset(path, data: Dataset, response: str = "y") -> None:
    rows = (np.concatenate([[yi], xi]) for yi, xi in zip(data.y, data.X))
    write_csv(path, (response,) + tuple(data.names), rows)


def write_coefficients(path, model: BoostModel) -> None:
    rows = [(INTERCEPT, model.intercept_mu, model.intercept_sigma)]
    rows += [(name, model.coef_mu[j, 1], model.coef_sigma[j, 1]) for j, name in enumerate(model.names)]
    write_csv(path, ("term", "eta_mu", "eta_sigma"), rows)


def write_trace(path, model: BoostModel) -> None:
    t = model.trace
    rows = (
        (t.m[i], PARAM_NAMES[t.k[i]], model.names[t.j[i]], t.nu_star[i], t.nu[i], t.risk[i])
        for i in range(len(t))
    )
    write_csv(path, ("m", "k_star", "j_star", "nu_star", "nu", "risk_after"), rows)


def write_study(path, rows) -> None:
    """One line per (replicate, policy) with the metric columns."""
    from .simulate import STUDY_COLUMNS

    write_csv(path, STUDY_COLUMNS, ([r.as_dict()[c] for c in STUDY_COLUMNS] for r in rows))


def write_risk_path(path, model: BoostModel, data: Dataset) -> None:
    write_csv(path, ("m", "risk"), enumerate(risk_path(model, data)))


@dataclass(frozen=True)
class CoefficientTable:
    names: Tuple[str, ...]
    intercept_mu: float
    intercept_sigma: float
    slope_mu: np.ndarray
    slope_sigma: np.ndarray

    def predict(self, X) -> Tuple[np.ndarray, np.ndarray]:
        """``(mu_hat, sigma_hat)`` for the rows of ``X``."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.names):
            raise DimensionError(f"expected {len(self.names)} columns, got shape {X.shape}")
        return self.intercept_mu + X @ self.slope_mu, np.exp(self.intercept_sigma + X @ self.slope_sigma)


def read_coefficients(path) -> CoefficientTable:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["term", "eta_mu", "eta_sigma"]:
        raise DataFormatError(f"{path}: not a coefficient table")
    body = rows[1:]
    if not body or body[0][0] != INTERCEPT:
        raise DataFormatError(f"{path}: first row must be {INTERCEPT}")
    values = np.array([[float(r[1]), float(r[2])] for r in body])
    return CoefficientTable(
        tuple(r[0] for r in body[1:]), float(values[0, 0]), float(values[0, 1]),
        values[1:, 0].copy(), values[1:, 1].copy(),
    )
