"""Lexicon-based sentiment scoring of short texts.

Each text is matched, token by token, against per-language affective
lexicons that assign every word a valence, arousal, and dominance score in
[1, 9]. The language with the most matched tokens wins and the text's score
is the mean of its matched entries. Scores aggregate to daily means (GMT
days) and weekly means (Sunday-start weeks, days weighted equally), and each
week's individual scores can be binned into a 25-bin distribution.

Generic holiday greeting phrases are removed before tokenization so that
formulaic well-wishing does not masquerade as mood, and a handful of
holiday-named lexicon words never match for the same reason.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DataError

# Lexicon words that name the holidays themselves; matching them would
# conflate topical volume with mood.
DEFAULT_REMOVED_WORDS = frozenset(
    {"christmas", "valentine", "navidad", "natal", "valentín", "valentin", "valentim"}
)

_TOKEN = re.compile(r"[^\W\d_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased letter-only tokens; digits and punctuation split tokens."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class Lexicon:
    """Per-language word scores. Entries in removed_words never match."""

    language: str
    entries: dict[str, tuple[float, float, float]]
    removed_words: frozenset[str] = DEFAULT_REMOVED_WORDS

    def __post_init__(self):
        for word, scores in self.entries.items():
            if len(scores) != 3 or not all(1.0 <= s <= 9.0 for s in scores):
                raise DataError(f"lexicon {self.language}: {word!r} scores out of [1,9]")

    def lookup(self, token: str) -> tuple[float, float, float] | None:
        if token in self.removed_words:
            return None
        return self.entries.get(token)


def load_lexicons(path, removed_words: frozenset[str] = DEFAULT_REMOVED_WORDS) -> list[Lexicon]:
    from .io import read_lexicons

    tables = read_lexicons(path)
    return [Lexicon(lang, entries, removed_words) for lang, entries in sorted(tables.items())]


class GreetingStoplist:
    """Removes whole-phrase holiday greetings from text.

    Phrases match case-insensitively as token sequences: any run of
    non-alphanumeric characters separates tokens, and a match cannot sit
    inside a longer word. Longer phrases are tried before shorter ones, and
    removal repeats until no phrase remains, so stripping is idempotent.
    """

    def __init__(self, phrases: list[str]):
        cleaned = []
        seen = set()
        for phrase in phrases:
            tokens = [t for t in re.split(r"[\W_]+", phrase.lower()) if t]
            if not tokens:
                raise DataError("stoplist contains an empty phrase")
            key = tuple(tokens)
            if key not in seen:
                seen.add(key)
                cleaned.append(tokens)
        cleaned.sort(key=lambda ts: (-len(ts), -sum(map(len, ts))))
        self.phrases = [" ".join(ts) for ts in cleaned]
        alternation = "|".join(r"[\W_]+".join(map(re.escape, ts)) for ts in cleaned)
        self._pattern = re.compile(
            r"(?<![^\W_])(?:" + alternation + r")(?![^\W_])",
            re.IGNORECASE | re.UNICODE,
        )
        # cheap prefilter: texts without any phrase's first token skip the regex
        self._first_tokens = frozenset(ts[0] for ts in cleaned)

    @classmethod
    def default(cls) -> "GreetingStoplist":
        from .io import read_stoplist_lines

        return cls(read_stoplist_lines())

    def _may_match(self, text: str) -> bool:
        return not self._first_tokens.isdisjoint(tokenize(text))

    def strip(self, text: str) -> str:
        """Text with every stoplist phrase removed (whitespace collapsed if any)."""
        if not self._may_match(text):
            return text
        result, changed = text, False
        while True:
            result, n = self._pattern.subn(" ", result)
            if n == 0:
                break
            changed = True
        if changed:
            result = " ".join(result.split())
        return result


def strip_greetings(text: str, stoplist: GreetingStoplist) -> str:
    return stoplist.strip(text)


@dataclass(frozen=True)
class TextScore:
    valence: float
    arousal: float
    dominance: float
    matched_language: str
    n_matched: int
    tie: bool = False

    def dim(self, dimension: str) -> float:
        return {"valence": self.valence, "arousal": self.arousal, "dominance": self.dominance}[dimension]


DIMENSIONS = ("valence", "arousal", "dominance")


def score_text(text: str, lexicons: list[Lexicon], stoplist: GreetingStoplist | None = None) -> TextScore | None:
    """Score one text, or None when no lexicon matches any token.

    The lexicon matching the most tokens (occurrences count) provides the
    score: the per-dimension mean of its matched entries. Lexicons tying for
    most matches contribute the mean of their per-language means.
    """
    if not lexicons:
        raise DataError("need at least one lexicon")
    if stoplist is not None:
        text = stoplist.strip(text)
    tokens = tokenize(text)
    if not tokens:
        return None
    best: list[tuple[str, int, tuple[float, float, float]]] = []
    best_count = 0
    for lex in lexicons:
        totals = [0.0, 0.0, 0.0]
        count = 0
        for token in tokens:
            scores = lex.lookup(token)
            if scores is not None:
                count += 1
                for i in range(3):
                    totals[i] += scores[i]
        if count == 0 or count < best_count:
            continue
        mean = (totals[0] / count, totals[1] / count, totals[2] / count)
        if count > best_count:
            best, best_count = [(lex.language, count, mean)], count
        else:
            best.append((lex.language, count, mean))
    if not best:
        return None
    if len(best) == 1:
        language, count, (v, a, d) = best[0]
        return TextScore(v, a, d, language, count)
    v, a, d = (sum(b[2][i] for b in best) / len(best) for i in range(3))
    return TextScore(v, a, d, "+".join(b[0] for b in best), best_count, tie=True)


@dataclass(frozen=True)
class ScoredRecord:
    timestamp_utc: dt.datetime
    country: str
    score: TextScore | None


def score_records(
    records: list[tuple[dt.datetime, str, str]],
    lexicons: list[Lexicon],
    stoplist: GreetingStoplist | None = None,
) -> list[ScoredRecord]:
    return [
        ScoredRecord(ts, country, score_text(text, lexicons, stoplist))
        for ts, country, text in records
    ]


def _sunday_on_or_before(day: dt.date) -> dt.date:
    return day - dt.timedelta(days=(day.weekday() + 1) % 7)


LOW_CONFIDENCE_WEEK = 100  # scored texts; below this the week is flagged, not dropped


@dataclass(frozen=True)
class WeeklyMood:
    week_start: dt.date                      # a Sunday
    mean: tuple[float, float, float]
    n_scored: int
    daily_means: tuple[tuple[float, float, float] | None, ...]  # Sun..Sat
    low_confidence: bool = False


def aggregate(
    scored: list[ScoredRecord],
    country: str,
    week_grid: tuple[dt.date, int] | None = None,
) -> tuple[list[WeeklyMood], list[dt.date]]:
    """(weekly means, gap week starts) for one country.

    Days follow GMT; weeks run Sunday through Saturday. Each day with at
    least one scored record contributes its mean with equal weight to the
    weekly mean. The grid defaults to the span of the country's scored
    records; weeks inside the grid with no scored records are returned as
    gaps rather than zero-filled rows.
    """
    by_day: dict[dt.date, list[TextScore]] = {}
    for rec in scored:
        if rec.country != country or rec.score is None:
            continue
        by_day.setdefault(rec.timestamp_utc.date(), []).append(rec.score)
    if week_grid is None:
        if not by_day:
            return [], []
        first = _sunday_on_or_before(min(by_day))
        last = _sunday_on_or_before(max(by_day))
        n_weeks = (last - first).days // 7 + 1
    else:
        first, n_weeks = week_grid
        if first.weekday() != 6:
            raise DataError(f"week grid must start on a Sunday, got {first}")
        if n_weeks < 1:
            raise DataError("week grid must span at least one week")

    weeks: list[WeeklyMood] = []
    gaps: list[dt.date] = []
    for w in range(n_weeks):
        start = first + dt.timedelta(weeks=w)
        daily: list[tuple[float, float, float] | None] = []
        day_means = []
        n_scored = 0
        for d in range(7):
            day_scores = by_day.get(start + dt.timedelta(days=d))
            if not day_scores:
                daily.append(None)
                continue
            n_scored += len(day_scores)
            mean = tuple(
                sum(s.dim(dim) for s in day_scores) / len(day_scores) for dim in DIMENSIONS
            )
            daily.append(mean)
            day_means.append(mean)
        if not day_means:
            gaps.append(start)
            continue
        mean = tuple(sum(m[i] for m in day_means) / len(day_means) for i in range(3))
        weeks.append(
            WeeklyMood(
                week_start=start,
                mean=mean,
                n_scored=n_scored,
                daily_means=tuple(daily),
                low_confidence=n_scored < LOW_CONFIDENCE_WEEK,
            )
        )
    return weeks, gaps


def weekly_scores(
    scored: list[ScoredRecord],
    country: str,
) -> dict[dt.date, list[TextScore]]:
    """Scored texts grouped by GMT Sunday week, for binning."""
    by_week: dict[dt.date, list[TextScore]] = {}
    for rec in scored:
        if rec.country != country or rec.score is None:
            continue
        week = _sunday_on_or_before(rec.timestamp_utc.date())
        by_week.setdefault(week, []).append(rec.score)
    return by_week


N_BINS = 25


def bin_edges(n_bins: int = N_BINS) -> np.ndarray:
    """n_bins+1 edges splitting [1,9] into equal widths, endpoints exact."""
    return np.array([1.0 + 8.0 * k / n_bins for k in range(n_bins + 1)])


def bin_index(values, n_bins: int = N_BINS) -> np.ndarray:
    """0-based bin per value; bin i covers [edge_i, edge_{i+1}), last closed."""
    values = np.asarray(values, dtype=float)
    if values.size and (values.min() < 1.0 or values.max() > 9.0):
        raise DataError("scores outside [1,9] cannot be binned")
    idx = np.searchsorted(bin_edges(n_bins), values, side="right") - 1
    return np.minimum(idx, n_bins - 1)


@dataclass(frozen=True)
class BinnedWeek:
    """One week's score distribution for one dimension.

    Integer counts are kept so that coarser binnings (summing adjacent bins)
    reproduce direct coarse binning exactly.
    """

    week_start: dt.date
    dimension: str
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        if counts.ndim != 1 or counts.sum() <= 0 or (counts < 0).any():
            raise DataError("binned week needs non-negative counts with a positive total")

    @property
    def n_scored(self) -> int:
        return int(self.counts.sum())

    @cached_property
    def probs(self) -> np.ndarray:
        p = self.counts / self.counts.sum()
        p.flags.writeable = False
        return p

    def coarsened(self, factor: int) -> "BinnedWeek":
        """Sum adjacent bins in groups of ``factor``."""
        if len(self.counts) % factor != 0:
            raise DataError(f"{len(self.counts)} bins do not group by {factor}")
        grouped = self.counts.reshape(-1, factor).sum(axis=1)
        return BinnedWeek(self.week_start, self.dimension, grouped)


def bin_week(
    week_start: dt.date,
    dimension: str,
    scores: list[float],
    n_bins: int = N_BINS,
) -> BinnedWeek:
    if dimension not in DIMENSIONS:
        raise DataError(f"unknown dimension {dimension!r}")
    if not len(scores):
        raise DataError(f"week {week_start}: no scores to bin")
    counts = np.bincount(bin_index(scores, n_bins), minlength=n_bins)
    return BinnedWeek(week_start, dimension, counts)


def bin_weeks(
    by_week: dict[dt.date, list[TextScore]],
    n_bins: int = N_BINS,
) -> list[BinnedWeek]:
    """One BinnedWeek per (week, dimension), weeks in date order."""
    out = []
    for week_start in sorted(by_week):
        scores = by_week[week_start]
        for dim in DIMENSIONS:
            out.append(bin_week(week_start, dim, [s.dim(dim) for s in scores], n_bins))
    return out
