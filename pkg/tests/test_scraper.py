from __future__ import annotations

import io
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordswarm.scraper import (
    FeedError,
    FeedSource,
    FilterConfig,
    SeenSet,
    default_stoplist,
    filter_words,
    load_stoplist,
    parse_article_line,
    parse_feed,
    poll_and_emit,
    replay,
    serialize_article,
    stable_id,
    strip_html,
)

FIXTURES = Path(__file__).parent / "fixtures"

CONFIG = FilterConfig(stoplist=frozenset({"the"}), min_len=3, max_len=12)


# --------------------------------------------------------------- parse_feed


def test_parse_rss_fixture_three_items():
    items = parse_feed((FIXTURES / "feed.rss.xml").read_bytes(), "rss")
    assert len(items) == 3
    assert [i.title for i in items] == [
        "Soldier convoy reaches mountain pass",
        "Soldiers patrol the river crossing",
        "Mountain weather halts the convoy",
    ]
    assert items[0].id == "fixture-001"
    assert items[0].timestamp.isoformat() == "2026-01-05T10:00:00+00:00"


def test_parse_rss_missing_guid_gets_stable_hash():
    items = parse_feed((FIXTURES / "feed.rss.xml").read_bytes(), "rss")
    again = parse_feed((FIXTURES / "feed.rss.xml").read_bytes(), "rss")
    assert items[1].id == again[1].id
    assert items[1].id == stable_id("http://feeds.example.org/articles/2", "Soldiers patrol the river crossing")
    assert items[1].id.startswith("sha1:")


def test_parse_empty_channel():
    data = b'<?xml version="1.0"?><rss version="2.0"><channel><title>t</title></channel></rss>'
    assert parse_feed(data, "rss") == []


def test_parse_atom_fixture():
    items = parse_feed((FIXTURES / "feed.atom.xml").read_bytes(), "atom")
    assert len(items) == 2
    assert items[0].id == "urn:fixture:atom-1"
    assert items[1].id == stable_id("http://feeds.example.org/atom/2", "Tugboats guide the tanker in")
    assert items[0].timestamp.isoformat() == "2026-01-05T06:00:00+00:00"


def test_parse_garbage_raises_feed_error():
    with pytest.raises(FeedError):
        parse_feed(b"this is not xml at all", "rss")


def test_parse_feed_rejects_file_kind():
    with pytest.raises(ValueError):
        parse_feed(b"<rss/>", "ndjson_file")


# --------------------------------------------------------------- strip_html


def test_strip_html_removes_tags():
    assert strip_html("a <b>bold</b> word") == "a bold word"


def test_strip_html_identity_without_markup():
    assert strip_html("plain text stays put") == "plain text stays put"


def test_strip_html_decodes_entities():
    assert strip_html("x &amp; y") == "x & y"
    assert strip_html("&lt;kept&gt; &quot;q&quot; &apos;a&apos;") == "<kept> \"q\" 'a'"
    # double-escaped ampersand decodes exactly one level
    assert strip_html("tom &amp;lt; jerry") == "tom &lt; jerry"


def test_strip_html_unbalanced_tag_drops_to_end():
    assert strip_html("start <a href='x") == "start"


def test_strip_html_collapses_whitespace():
    assert strip_html("a  <p>b</p>\n c") == "a b c"


# ------------------------------------------------------------- filter_words


def test_filter_words_rules():
    assert filter_words("The quick fox! The fox.", CONFIG) == ["quick", "fox"]


def test_filter_words_empty_text():
    assert filter_words("", CONFIG) == []


def test_filter_words_too_short():
    assert filter_words("ab", CONFIG) == []


def test_filter_words_drops_digits_and_long_words():
    config = FilterConfig(stoplist=frozenset(), min_len=3, max_len=6)
    assert filter_words("abc123def gigantically x7y", config) == ["abc", "def"]


@settings(max_examples=80, deadline=None)
@given(st.text(max_size=200))
def test_filter_words_idempotent(text):
    once = filter_words(text, CONFIG)
    again = filter_words(" ".join(once), CONFIG)
    assert once == again


@settings(max_examples=80, deadline=None)
@given(st.text(max_size=200))
def test_filter_words_respects_all_rules(text):
    for word in filter_words(text, CONFIG):
        assert word == word.lower()
        assert CONFIG.min_len <= len(word) <= CONFIG.max_len
        assert word not in CONFIG.stoplist


# ---------------------------------------------------------------- stoplists


def test_load_stoplist_skips_comments(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment\nthe\nAnd\n\n  of  \n", encoding="utf-8")
    assert load_stoplist(path) == frozenset({"the", "and", "of"})


def test_default_stoplist_has_common_words():
    stop = default_stoplist()
    assert {"the", "and", "of", "with"} <= stop
    assert len(stop) > 300


# ------------------------------------------------------------ poll_and_emit


def rss_source(name="feed.rss.xml"):
    return FeedSource(location=str(FIXTURES / name), kind="rss", tag="fixture-feed")


def test_first_poll_emits_all_items():
    out = io.StringIO()
    seen = SeenSet()
    assert poll_and_emit(rss_source(), CONFIG, out, seen) == 3
    lines = out.getvalue().splitlines()
    assert len(lines) == 3
    record = json.loads(lines[0])
    assert record["id"] == "fixture-001"
    assert record["source"] == "fixture-feed"
    assert record["words"][0] == "soldier"


def test_second_poll_emits_nothing():
    out = io.StringIO()
    seen = SeenSet()
    poll_and_emit(rss_source(), CONFIG, out, seen)
    assert poll_and_emit(rss_source(), CONFIG, out, seen) == 0


def test_updated_feed_emits_only_new_item():
    out = io.StringIO()
    seen = SeenSet()
    poll_and_emit(rss_source(), CONFIG, out, seen)
    out2 = io.StringIO()
    assert poll_and_emit(rss_source("feed_updated.rss.xml"), CONFIG, out2, seen) == 1
    record = json.loads(out2.getvalue())
    assert record["id"] == "fixture-004"


def test_unreachable_source_emits_zero():
    out = io.StringIO()
    source = FeedSource(location=str(FIXTURES / "no-such-file.xml"), kind="rss")
    assert poll_and_emit(source, CONFIG, out, SeenSet()) == 0
    assert out.getvalue() == ""


def test_seen_set_is_bounded():
    seen = SeenSet(capacity=3)
    for k in range(10):
        seen.add(f"id-{k}")
    assert "id-0" not in seen
    assert "id-9" in seen


# ------------------------------------------------------------------- replay


def write_corpus(path: Path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def sample_record(article_id="R1", words=("alpha", "beta")):
    return json.dumps(
        {
            "id": article_id,
            "source": "replay",
            "ts": "2026-01-05T10:00:00+00:00",
            "text": " ".join(words),
            "words": list(words),
        },
        separators=(",", ":"),
    )


def test_replay_emits_in_order(tmp_path):
    path = tmp_path / "corpus.ndjson"
    write_corpus(path, [sample_record(f"R{k}") for k in range(10)])
    out = io.StringIO()
    emitted, skipped = replay(path, rate=0, output=out)
    assert emitted == 10 and skipped == 0
    ids = [json.loads(line)["id"] for line in out.getvalue().splitlines()]
    assert ids == [f"R{k}" for k in range(10)]


def test_replay_skips_malformed_lines(tmp_path):
    path = tmp_path / "corpus.ndjson"
    write_corpus(path, [sample_record("R1"), "{not json", sample_record("R2"),
                        '{"id":"x"}', sample_record("R3"), sample_record("R4")])
    out = io.StringIO()
    emitted, skipped = replay(path, rate=0, output=out)
    assert emitted == 4 and skipped == 2


def test_replay_deterministic(tmp_path):
    path = tmp_path / "corpus.ndjson"
    write_corpus(path, [sample_record(f"R{k}") for k in range(5)])
    out1, out2 = io.StringIO(), io.StringIO()
    replay(path, rate=0, output=out1)
    replay(path, rate=0, output=out2)
    assert out1.getvalue() == out2.getvalue()


# -------------------------------------------------------------- wire format


def test_article_line_roundtrip():
    line = sample_record()
    article = parse_article_line(line)
    assert serialize_article(article) == line


def test_parse_article_line_rejects_missing_fields():
    with pytest.raises(ValueError):
        parse_article_line('{"id": "x", "source": "s"}')
    with pytest.raises(ValueError):
        parse_article_line('["not", "an", "object"]')
    with pytest.raises(ValueError):
        parse_article_line(
            '{"id":"x","source":"s","ts":"2026-01-01T00:00:00+00:00","text":"t","words":"oops"}'
        )
