"""Sliding-window word statistics over a stream of articles.

Frequencies are document frequencies: the number of window articles whose
word list contains the word. Co-occurrence counts articles containing both
words of a pair. Word lists are deduplicated per article, which makes
c(u, v) <= min(f(u), f(v)) hold structurally.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import combinations

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class ArticleError(ValueError):
    """Raised for articles that violate the record invariants."""


@dataclass(frozen=True)
class Article:
    """One normalized stream item with its filtered word list."""

    id: str
    source: str
    timestamp: datetime
    text: str
    words: tuple[str, ...]
    title: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ArticleError("article id must be nonempty")
        deduped = tuple(dict.fromkeys(self.words))
        object.__setattr__(self, "words", deduped)


@dataclass(frozen=True)
class CooccurrenceTable:
    """Symmetric (word pair) -> count mapping; absent pairs count 0."""

    counts: dict[tuple[str, str], int] = field(default_factory=dict)

    @staticmethod
    def key(u: str, v: str) -> tuple[str, str]:
        return (u, v) if u <= v else (v, u)

    def get(self, u: str, v: str) -> int:
        return self.counts.get(self.key(u, v), 0)

    def pairs(self) -> list[tuple[str, str, int]]:
        return [(u, v, c) for (u, v), c in self.counts.items()]


@dataclass(frozen=True)
class AnalysisSnapshot:
    """Selected words with their frequencies and co-occurrence counts."""

    words: tuple[str, ...]
    freq: dict[str, int]
    cooc: CooccurrenceTable
    window_size: int


class Window:
    """Bounded FIFO of the most recent articles, keyed by article id.

    Re-ingesting an id currently held in the window is a no-op.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("window capacity must be >= 1")
        self.capacity = capacity
        self._articles: OrderedDict[str, Article] = OrderedDict()

    def __len__(self) -> int:
        return len(self._articles)

    def __iter__(self):
        return iter(self._articles.values())

    def articles(self) -> list[Article]:
        return list(self._articles.values())

    def ingest(self, article: Article) -> None:
        if not article.id:
            raise ArticleError("article id must be nonempty")
        if article.id in self._articles:
            return
        self._articles[article.id] = article
        while len(self._articles) > self.capacity:
            self._articles.popitem(last=False)

    def clear(self) -> None:
        self._articles.clear()


def frequencies(window: Window) -> dict[str, int]:
    """Document frequency of every word present in the window."""
    freq: dict[str, int] = {}
    for article in window:
        for word in article.words:
            freq[word] = freq.get(word, 0) + 1
    return freq


def cooccurrence(window: Window, vocabulary: list[str] | tuple[str, ...]) -> CooccurrenceTable:
    """Number of window articles containing both words, over ``vocabulary``."""
    vocab = set(vocabulary)
    counts: dict[tuple[str, str], int] = {}
    for article in window:
        present = sorted(vocab.intersection(article.words))
        for u, v in combinations(present, 2):
            key = (u, v)
            counts[key] = counts.get(key, 0) + 1
    return CooccurrenceTable(counts)


def prune_and_select(freq: dict[str, int], f_min: int, n_max: int) -> list[str]:
    """Words at or above ``f_min``, by descending frequency then
    ascending lexicographic order, truncated to ``n_max``."""
    if f_min < 1:
        raise ValueError("f_min must be >= 1")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    kept = [w for w, f in freq.items() if f >= f_min]
    kept.sort(key=lambda w: (-freq[w], w))
    return kept[:n_max]


def snapshot(window: Window, f_min: int, n_max: int) -> AnalysisSnapshot:
    """Frequency, selection and co-occurrence over the current window."""
    freq = frequencies(window)
    selected = prune_and_select(freq, f_min, n_max)
    cooc = cooccurrence(window, selected)
    return AnalysisSnapshot(
        words=tuple(selected),
        freq={w: freq[w] for w in selected},
        cooc=cooc,
        window_size=len(window),
    )
