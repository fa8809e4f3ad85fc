"""File formats: readers and writers for every on-disk interface.

All text files are UTF-8. Writers are atomic (temp file + rename) and emit
floats with repr formatting, so identical inputs always produce byte-identical
artifacts. Readers validate hard (a malformed file is a data error naming the
file and line), with one exception: text-record TSVs skip and count malformed
lines instead of failing, since raw social-media dumps are never clean.
"""

from __future__ import annotations

import csv
import datetime as dt
import os
import tempfile
from contextlib import contextmanager
from importlib.resources import files as _package_files
from pathlib import Path

import numpy as np

from .errors import DataError
from .timeseries import AnchorCalendar, AnchorKind, AveragedYear, CenteredYear, WeeklySeries


def _fixture(name: str):
    return _package_files("moodcycles").joinpath("fixtures", name)


def fmt(value: float) -> str:
    """Stable, round-trippable float formatting for output files."""
    return repr(float(value))


@contextmanager
def atomic_write(path: str | Path, newline: str = ""):
    """Write to a temp file in the target directory, rename on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline=newline) as handle:
            yield handle
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _parse_date(text: str, where: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError as exc:
        raise DataError(f"{where}: bad date {text!r}") from exc


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise DataError(f"{where}: bad number {text!r}") from exc


def _open_csv(path: str | Path, expected_header: list[str]):
    path = Path(path)
    try:
        handle = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    reader = csv.reader(handle)
    header = next(reader, None)
    if header != expected_header:
        handle.close()
        raise DataError(
            f"{path}: expected header {','.join(expected_header)!r}, got "
            f"{','.join(header) if header else '<empty file>'!r}"
        )
    return handle, reader


# ---------------------------------------------------------------- weekly series

def read_weekly_series(path: str | Path) -> WeeklySeries:
    """Read `week_start,value` rows; weeks must be consecutive Sundays-apart."""
    handle, reader = _open_csv(path, ["week_start", "value"])
    with handle:
        starts: list[dt.date] = []
        values: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            where = f"{path}:{lineno}"
            day = _parse_date(row[0], where)
            if starts and day != starts[-1] + dt.timedelta(days=7):
                raise DataError(
                    f"{where}: week {day} does not follow {starts[-1]} "
                    "(series must be strictly consecutive, no gaps)"
                )
            starts.append(day)
            values.append(_parse_float(row[1], where))
    if not values:
        raise DataError(f"{path}: no data rows")
    return WeeklySeries(start_date=starts[0], values=np.array(values))


def write_weekly_series(path: str | Path, series: WeeklySeries) -> int:
    with atomic_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(["week_start", "value"])
        for i, value in enumerate(series.values):
            writer.writerow([series.week_start(i).isoformat(), fmt(value)])
    return len(series)


# ------------------------------------------------------------- anchor calendars

def read_anchor_calendar(path: str | Path, kind: AnchorKind | str) -> AnchorCalendar:
    """Read `kind,anchor_date` rows, keeping rows matching ``kind``."""
    kind = AnchorKind(kind)
    handle, reader = _open_csv(path, ["kind", "anchor_date"])
    with handle:
        dates = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                row_kind = AnchorKind(row[0].strip())
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: unknown calendar kind {row[0]!r}") from exc
            if row_kind is kind:
                dates.append(_parse_date(row[1], f"{path}:{lineno}"))
    if not dates:
        raise DataError(f"{path}: no anchor dates of kind {kind.value!r}")
    return AnchorCalendar(kind=kind, anchor_dates=tuple(dates))


def eid_calendar() -> AnchorCalendar:
    """The bundled Eid al-Fitr anchor dates (2004-2013)."""
    return read_anchor_calendar(_fixture("eid_al_fitr_dates.csv"), AnchorKind.EID_AL_FITR)


def calendar_for(kind: AnchorKind | str, years, eid_path: str | Path | None = None) -> AnchorCalendar:
    """Calendar of ``kind`` covering ``years`` (solar) or the Eid date table."""
    kind = AnchorKind(kind)
    if kind is AnchorKind.EID_AL_FITR:
        if eid_path is not None:
            return read_anchor_calendar(eid_path, kind)
        return eid_calendar()
    return AnchorCalendar.solar(kind, years)


# ----------------------------------------------------------------------- births

def read_births(path: str | Path) -> dict[str, list[tuple[int, int, float]]]:
    """Read `country,year,month,count` rows grouped by country."""
    handle, reader = _open_csv(path, ["country", "year", "month", "count"])
    with handle:
        out: dict[str, list[tuple[int, int, float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            where = f"{path}:{lineno}"
            try:
                year, month = int(row[1]), int(row[2])
            except ValueError as exc:
                raise DataError(f"{where}: bad year/month") from exc
            out.setdefault(row[0].strip(), []).append((year, month, _parse_float(row[3], where)))
    if not out:
        raise DataError(f"{path}: no data rows")
    return out


def write_birth_series(path: str | Path, per_country: dict[str, "object"]) -> int:
    """Write shifted normalized rates as `country,year,month,rate` rows."""
    rows = 0
    with atomic_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(["country", "year", "month", "rate"])
        for country in sorted(per_country):
            for year, month, rate in per_country[country].normalized:
                writer.writerow([country, year, month, fmt(rate)])
                rows += 1
    return rows


# --------------------------------------------------------------- centered years

def write_centered_years(path: str | Path, years: list[CenteredYear]) -> int:
    rows = 0
    with atomic_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(["anchor_date", "week_index", "value"])
        for year in years:
            for i, value in enumerate(year.weeks, start=1):
                writer.writerow([year.anchor_date.isoformat(), i, fmt(value)])
                rows += 1
    return rows


def write_averaged_year(path: str | Path, avg: AveragedYear) -> int:
    with atomic_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(["week_index", "mean", "std", "n_years"])
        for i, (m, s) in enumerate(zip(avg.weeks, avg.per_week_std), start=1):
            writer.writerow([i, fmt(m), fmt(s), avg.n_years])
    return len(avg.weeks)


# -------------------------------------------------------------------- countries

_META_HEADER = ["code", "name", "first_week", "identification", "pct_christian",
                "pct_muslim", "continent", "hemisphere"]


def read_country_metadata(path: str | Path | None = None) -> list[dict]:
    """Country metadata rows; ``path=None`` loads the bundled table."""
    src = _fixture("country_metadata.csv") if path is None else path
    handle, reader = _open_csv(src, _META_HEADER)
    with handle:
        rows = []
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 8:
                raise DataError(f"{src}:{lineno}: expected 8 fields, got {len(row)}")
            code = row[0].strip()
            if code in seen:
                raise DataError(f"{src}:{lineno}: duplicate country code {code!r}")
            seen.add(code)
            rows.append({
                "code": code,
                "name": row[1].strip(),
                "first_week": _parse_date(row[2], f"{src}:{lineno}"),
                "identification": row[3].strip(),
                "pct_christian": float(row[4]) if row[4].strip() else None,
                "pct_muslim": float(row[5]) if row[5].strip() else None,
                "continent": row[6].strip(),
                "hemisphere": row[7].strip(),
            })
    return rows


def read_identification_overrides(path: str | Path | None = None) -> dict[str, str]:
    src = _fixture("identification_overrides.csv") if path is None else path
    handle, reader = _open_csv(src, ["code", "identification"])
    with handle:
        return {row[0].strip(): row[1].strip() for row in reader if row}


def read_zscore_table(path: str | Path | None = None) -> list[dict]:
    """Per-country anchor z-scores; ``path=None`` loads the bundled table."""
    src = _fixture("holiday_zscores.csv") if path is None else path
    header = ["code", "name", "identification", "hemisphere",
              "z_christmas", "z_eid", "z_june", "z_dec"]
    handle, reader = _open_csv(src, header)
    with handle:
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 8:
                raise DataError(f"{src}:{lineno}: expected 8 fields, got {len(row)}")
            where = f"{src}:{lineno}"
            rows.append({
                "code": row[0].strip(),
                "name": row[1].strip(),
                "identification": row[2].strip(),
                "hemisphere": row[3].strip(),
                "z_christmas": _parse_float(row[4], where),
                "z_eid": _parse_float(row[5], where),
                "z_june": _parse_float(row[6], where),
                "z_dec": _parse_float(row[7], where),
            })
    return rows


def expected_agreement(path: str | Path | None = None) -> dict[tuple[str, str, str], int]:
    """Published agreement percentages keyed by (group_kind, group, anchor)."""
    src = _fixture("expected_agreement.csv") if path is None else path
    handle, reader = _open_csv(src, ["group_kind", "group", "anchor", "pct"])
    with handle:
        return {(r[0], r[1], r[2]): int(r[3]) for r in reader if r}


# --------------------------------------------------------------------- lexicons

def read_lexicons(path: str | Path) -> dict[str, dict[str, tuple[float, float, float]]]:
    """Read `language,word,valence,arousal,dominance` grouped by language."""
    handle, reader = _open_csv(path, ["language", "word", "valence", "arousal", "dominance"])
    with handle:
        out: dict[str, dict[str, tuple[float, float, float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise DataError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
            where = f"{path}:{lineno}"
            lang, word = row[0].strip(), row[1].strip().lower()
            if not word:
                raise DataError(f"{where}: empty word")
            scores = tuple(_parse_float(v, where) for v in row[2:5])
            for s in scores:
                if not 1.0 <= s <= 9.0:
                    raise DataError(f"{where}: score {s} outside [1, 9]")
            entries = out.setdefault(lang, {})
            if word in entries:
                raise DataError(f"{where}: duplicate word {word!r} for {lang!r}")
            entries[word] = scores
    if not out:
        raise DataError(f"{path}: no lexicon entries")
    return out


def read_stoplist_lines(path: str | Path | None = None) -> list[str]:
    """Stoplist phrases, one per line; ``path=None`` loads the bundled list."""
    src = _fixture("holiday_greetings.txt") if path is None else Path(path)
    try:
        text = src.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{src}: {exc}") from exc
    return [line.strip() for line in text.splitlines() if line.strip()]


# ------------------------------------------------------------------ text records

def read_records(path: str | Path) -> tuple[list[tuple[dt.datetime, str, str]], int]:
    """Read tab-separated `timestamp_utc, country, text` records.

    Returns (records, n_malformed). Malformed lines (wrong field count,
    unparseable timestamp) are counted and skipped, not fatal.
    """
    path = Path(path)
    records: list[tuple[dt.datetime, str, str]] = []
    malformed = 0
    try:
        handle = open(path, encoding="utf-8", errors="replace", newline="")
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    with handle:
        for line in handle:
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                malformed += 1
                continue
            stamp = parse_timestamp(parts[0])
            if stamp is None:
                malformed += 1
                continue
            records.append((stamp, parts[1].strip(), parts[2]))
    return records, malformed


def parse_timestamp(text: str) -> dt.datetime | None:
    """ISO-8601 timestamp as UTC; naive values are taken to already be GMT."""
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        stamp = dt.datetime.fromisoformat(text)
    except ValueError:
        return None
    if stamp.tzinfo is None:
        return stamp.replace(tzinfo=dt.timezone.utc)
    return stamp.astimezone(dt.timezone.utc)


# --------------------------------------------------------- weekly mood / binned

def write_weekly_mood(path: str | Path, rows: list[tuple[str, dt.date, str, float, int]]) -> int:
    """`country,week_start,dim,mean,n_scored` rows."""
    with atomic_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(["country", "week_start", "dim", "mean", "n_scored"])
        for country, week, dim, mean, n in rows:
            writer.writerow([country, week.isoformat(), dim, fmt(mean), n])
    return len(rows)


def _prob_columns(n_bins: int) -> list[str]:
    return [f"p{i:02d}" for i in range(1, n_bins + 1)]


def write_binned(path: str | Path, rows: list[tuple[dt.date, str, int, np.ndarray]], n_bins: int) -> int:
    """Tab-separated `week_start,dim,n` plus one probability column per bin."""
    with atomic_write(path) as handle:
        writer = csv.writer(handle, delimiter="\t")
        writer.writerow(["week_start", "dim", "n"] + _prob_columns(n_bins))
        for week, dim, n, probs in rows:
            if len(probs) != n_bins:
                raise DataError(f"binned row for {week}/{dim} has {len(probs)} bins, wanted {n_bins}")
            writer.writerow([week.isoformat(), dim, n] + [fmt(p) for p in probs])
    return len(rows)


def read_binned(path: str | Path) -> dict[str, tuple[list[dt.date], list[int], np.ndarray]]:
    """Binned TSV back as {dim: (week_starts, n_scored, probs matrix)}."""
    path = Path(path)
    try:
        handle = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle, delimiter="\t")
        header = next(reader, None)
        if not header or header[:3] != ["week_start", "dim", "n"]:
            raise DataError(f"{path}: expected binned TSV header starting week_start,dim,n")
        n_bins = len(header) - 3
        if n_bins < 2 or header[3:] != _prob_columns(n_bins):
            raise DataError(f"{path}: malformed probability columns")
        acc: dict[str, tuple[list[dt.date], list[int], list[list[float]]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3 + n_bins:
                raise DataError(f"{path}:{lineno}: expected {3 + n_bins} fields, got {len(row)}")
            where = f"{path}:{lineno}"
            week = _parse_date(row[0], where)
            dim = row[1].strip()
            try:
                n = int(row[2])
            except ValueError as exc:
                raise DataError(f"{where}: bad count {row[2]!r}") from exc
            probs = [_parse_float(v, where) for v in row[3:]]
            weeks, counts, mat = acc.setdefault(dim, ([], [], []))
            if weeks and week <= weeks[-1]:
                raise DataError(f"{where}: weeks out of order for dim {dim!r}")
            weeks.append(week)
            counts.append(n)
            mat.append(probs)
    if not acc:
        raise DataError(f"{path}: no data rows")
    return {dim: (weeks, counts, np.array(mat)) for dim, (weeks, counts, mat) in acc.items()}


# ------------------------------------------------------------------- flat tables

def write_table(path: str | Path, header: list[str], rows: list[list], delimiter: str = ",") -> int:
    """Generic flat table writer with stable float formatting."""
    with atomic_write(path) as handle:
        writer = csv.writer(handle, delimiter=delimiter)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return len(rows)


def read_keyed_values(path: str | Path) -> dict[str, float]:
    """Two-column CSV (any header): key -> numeric value, for joins."""
    path = Path(path)
    try:
        handle = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise DataError(f"{path}: expected a two-column CSV with a header")
        out: dict[str, float] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields")
            key = row[0].strip()
            if key in out:
                raise DataError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = _parse_float(row[1], f"{path}:{lineno}")
    if not out:
        raise DataError(f"{path}: no data rows")
    return out
