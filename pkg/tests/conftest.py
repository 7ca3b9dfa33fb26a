from __future__ import annotations

from datetime import datetime, timezone

import pytest

from wordswarm.analyzer import Article, Window


def make_article(article_id: str, words, text: str = "", source: str = "test",
                 ts: datetime | None = None, title: str | None = None) -> Article:
    return Article(
        id=article_id,
        source=source,
        title=title,
        timestamp=ts or datetime(2026, 1, 1, tzinfo=timezone.utc),
        text=text or " ".join(words),
        words=tuple(words),
    )


@pytest.fixture
def two_article_window() -> Window:
    """The alpha/beta/gamma corpus: A1={alpha,beta}, A2={alpha,gamma}."""
    window = Window(capacity=10)
    window.ingest(make_article("A1", ["alpha", "beta"]))
    window.ingest(make_article("A2", ["alpha", "gamma"]))
    return window
