"""Price-series loading and log-return computation.

Input files are header-carrying CSVs (RFC-4180 quoting) with a date
column and a pre-adjusted close column.  Returns are consecutive-row
log-ratios; calendar gaps are not imputed.
"""

from __future__ import annotations

import csv
import datetime as _dt
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InsufficientDataError, SchemaError

_DATE_FORMATS = ("%Y-%m-%d", "%Y/%m/%d", "%m/%d/%Y", "%d-%m-%Y")


def _parse_date(text: str, row: int) -> _dt.date:
    for fmt in _DATE_FORMATS:
        try:
            return _dt.datetime.strptime(text.strip(), fmt).date()
        except ValueError:
            continue
    raise SchemaError(f"row {row}: unparseable date {text!r}")


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.dates) != len(self.values):
            raise SchemaError("dates and values must be aligned")
        if (self.values <= 0).any():
            raise DomainError("all prices must be positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise SchemaError("dates must be strictly increasing")

    def __len__(self):
        return len(self.values)

    def restrict(self, start=None, end=None) -> "PriceSeries":
        """Slice to dates in [start, end] (ISO strings or date objects)."""
        start = _parse_date(start, -1) if isinstance(start, str) else start
        end = _parse_date(end, -1) if isinstance(end, str) else end
        keep = [i for i, d in enumerate(self.dates)
                if (start is None or d >= start) and (end is None or d <= end)]
        return PriceSeries(dates=tuple(self.dates[i] for i in keep),
                           values=self.values[keep])


@dataclass(frozen=True)
class ReturnSeries:
    values: np.ndarray
    standardized: bool = False
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self):
        return len(self.values)


def load_price_csv(path, date_column: str = "Date",
                   price_column: str = "Adj Close") -> PriceSeries:
    """Read (date, price) rows; sorted by date; duplicates and non-positive
    prices are rejected with the offending data-row number."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError("file has no header row")
        missing = {date_column, price_column} - set(reader.fieldnames)
        if missing:
            raise SchemaError(
                f"missing column(s) {sorted(missing)}; file has {reader.fieldnames}"
            )
        for i, rec in enumerate(reader, start=1):
            date = _parse_date(rec[date_column], i)
            try:
                price = float(rec[price_column])
            except (TypeError, ValueError):
                raise SchemaError(f"row {i}: unparseable price {rec[price_column]!r}")
            if price <= 0:
                raise DomainError(f"row {i}: non-positive price {price!r}")
            rows.append((date, price, i))
    if not rows:
        raise InsufficientDataError("no data rows")
    rows.sort(key=lambda r: r[0])
    for (d1, _, i1), (d2, _, i2) in zip(rows, rows[1:]):
        if d1 == d2:
            raise SchemaError(f"duplicate date {d1} (rows {i1} and {i2})")
    return PriceSeries(dates=tuple(r[0] for r in rows),
                       values=np.array([r[1] for r in rows]))


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """r_t = ln S_{t+1} - ln S_t; length n-1."""
    if len(prices) < 2:
        raise InsufficientDataError("need at least 2 prices")
    values = np.diff(np.log(prices.values))
    return ReturnSeries(values=values, standardized=False,
                        source={"n_prices": len(prices),
                                "first_date": str(prices.dates[0]),
                                "last_date": str(prices.dates[-1])})


def standardize(series: ReturnSeries) -> ReturnSeries:
    """Zero-mean unit-variance transform; (mu, sd) recorded for round-trips."""
    x = series.values
    mu = float(x.mean())
    sd = float(x.std(ddof=1))
    if sd == 0:
        raise DomainError("zero-variance return series cannot be standardized")
    meta = dict(series.source)
    meta.update({"mu": mu, "sd": sd})
    return ReturnSeries(values=(x - mu) / sd, standardized=True, source=meta)
