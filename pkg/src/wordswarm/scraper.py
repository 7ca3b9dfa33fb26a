"""Feed scraper: polls RSS/Atom sources or replays recorded corpora and
emits normalized article records, one JSON object per line.

The scraper is meant to run in its own process, decoupled from the
visualization: records travel over stdout or a TCP connection, and a
runtime control line ``QUERY <terms>`` on stdin swaps the search terms of
network sources between polls.

Wire format (one line per article):
    {"id": ..., "source": ..., "title": ..., "ts": ..., "text": ..., "words": [...]}
``title`` is omitted when the feed entry has none; ``ts`` is an ISO-8601
UTC timestamp.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import re
import socket
import sys
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime
from importlib import resources
from pathlib import Path
from typing import IO, Iterable

from .analyzer import EPOCH, Article

log = logging.getLogger(__name__)

KIND_RSS = "rss"
KIND_ATOM = "atom"
KIND_NDJSON = "ndjson_file"
KINDS = (KIND_RSS, KIND_ATOM, KIND_NDJSON)

DEFAULT_SEEN_CAPACITY = 10_000
_ATOM_NS = "{http://www.w3.org/2005/Atom}"


class FeedError(ValueError):
    """Raised when a byte stream cannot be parsed as the declared format."""


@dataclass(frozen=True)
class FeedSource:
    """One polled feed or replayable file.

    ``tag`` overrides the source string stamped onto emitted records;
    it defaults to the location itself.
    """

    location: str
    kind: str
    poll_interval: float = 60.0
    query_terms: tuple[str, ...] = ()
    tag: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind != KIND_NDJSON and self.poll_interval < 1:
            raise ValueError("poll_interval must be >= 1s for network sources")

    @property
    def source_tag(self) -> str:
        return self.tag if self.tag is not None else self.location


@dataclass(frozen=True)
class FilterConfig:
    """Word filtering rules: length bounds plus a stop list."""

    stoplist: frozenset[str] = frozenset()
    min_len: int = 3
    max_len: int = 20
    strip_markup: bool = True

    def __post_init__(self):
        if not (1 <= self.min_len <= self.max_len):
            raise ValueError("need 1 <= min_len <= max_len")


@dataclass(frozen=True)
class RawItem:
    """One feed entry before filtering."""

    id: str
    title: str | None
    body: str
    timestamp: datetime
    link: str | None


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a stop list: UTF-8, one lowercase word per line, '#' comments."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def default_stoplist() -> frozenset[str]:
    """The stop list shipped with the package (common English words)."""
    text = resources.files("wordswarm").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    )


_TAG_RE = re.compile(r"<[^>]*>|<[^>]*$")
_WS_RE = re.compile(r"\s+")
# Decoded after tag removal; ampersand goes last so "&amp;lt;" stays "&lt;".
_ENTITIES = [
    ("&lt;", "<"),
    ("&gt;", ">"),
    ("&quot;", '"'),
    ("&apos;", "'"),
    ("&#39;", "'"),
    ("&#34;", '"'),
    ("&amp;", "&"),
]


def strip_html(text: str) -> str:
    """Drop tag spans ('<' through the next '>' or end of text), decode the
    entities for ampersand, angle brackets and quotes, and collapse
    whitespace to single spaces."""
    out = _TAG_RE.sub(" ", text)
    for entity, char in _ENTITIES:
        out = out.replace(entity, char)
    return _WS_RE.sub(" ", out).strip()


_LETTERS_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


def filter_words(text: str, config: FilterConfig) -> list[str]:
    """Lowercase, split on non-letters, apply length bounds and the stop
    list, and deduplicate preserving first occurrence."""
    seen: dict[str, None] = {}
    for token in _LETTERS_RE.findall(text.lower()):
        if len(token) < config.min_len or len(token) > config.max_len:
            continue
        if token in config.stoplist:
            continue
        seen.setdefault(token)
    return list(seen)


def stable_id(link: str | None, title: str | None) -> str:
    digest = hashlib.sha1(f"{link or ''}\x00{title or ''}".encode("utf-8")).hexdigest()
    return f"sha1:{digest[:16]}"


def _parse_timestamp(value: str | None, kind: str) -> datetime:
    """Normalize a feed timestamp to UTC. Missing timestamps map to the
    Unix epoch so output stays deterministic; unparseable ones raise."""
    if not value or not value.strip():
        return EPOCH
    value = value.strip()
    if kind == KIND_RSS:
        parsed = parsedate_to_datetime(value)
    else:
        parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def _first_text(element: ET.Element, *paths: str) -> str | None:
    for path in paths:
        found = element.findtext(path)
        if found is not None and found.strip():
            return found.strip()
    return None


def parse_feed(data: bytes, kind: str) -> list[RawItem]:
    """Parse RSS or Atom bytes into raw items.

    Malformed entries (no usable content, or an unparseable timestamp) are
    skipped with a warning; an unparseable document raises FeedError.
    """
    if kind not in (KIND_RSS, KIND_ATOM):
        raise ValueError(f"parse_feed expects rss or atom, got {kind!r}")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise FeedError(f"not parseable as {kind}: {exc}") from exc

    items: list[RawItem] = []
    if kind == KIND_RSS:
        entries = root.findall("./channel/item")
        for entry in entries:
            items.extend(
                _build_item(
                    guid=_first_text(entry, "guid"),
                    title=_first_text(entry, "title"),
                    body=_first_text(entry, "description", "content"),
                    ts_text=_first_text(entry, "pubDate"),
                    link=_first_text(entry, "link"),
                    kind=kind,
                )
            )
    else:
        for entry in root.findall(f"{_ATOM_NS}entry"):
            link_el = entry.find(f"{_ATOM_NS}link")
            link = link_el.get("href") if link_el is not None else None
            items.extend(
                _build_item(
                    guid=_first_text(entry, f"{_ATOM_NS}id"),
                    title=_first_text(entry, f"{_ATOM_NS}title"),
                    body=_first_text(entry, f"{_ATOM_NS}summary", f"{_ATOM_NS}content"),
                    ts_text=_first_text(entry, f"{_ATOM_NS}updated", f"{_ATOM_NS}published"),
                    link=link,
                    kind=kind,
                )
            )
    return items


def _build_item(
    guid: str | None,
    title: str | None,
    body: str | None,
    ts_text: str | None,
    link: str | None,
    kind: str,
) -> list[RawItem]:
    if body is None and title is None:
        log.warning("skipping feed entry with no title and no body")
        return []
    try:
        ts = _parse_timestamp(ts_text, kind)
    except (ValueError, TypeError) as exc:
        log.warning("skipping feed entry with bad timestamp %r: %s", ts_text, exc)
        return []
    item_id = guid if guid else stable_id(link, title)
    return [RawItem(id=item_id, title=title, body=body or title or "", timestamp=ts, link=link)]


def normalize_item(item: RawItem, source_tag: str, config: FilterConfig) -> Article:
    """Turn a raw feed item into a filtered article record."""
    text = strip_html(item.body) if config.strip_markup else item.body
    return Article(
        id=item.id,
        source=source_tag,
        title=item.title,
        timestamp=item.timestamp,
        text=text,
        words=tuple(filter_words(text, config)),
    )


def serialize_article(article: Article) -> str:
    """Canonical one-line JSON form of an article record."""
    record: dict = {"id": article.id, "source": article.source}
    if article.title is not None:
        record["title"] = article.title
    record["ts"] = article.timestamp.astimezone(timezone.utc).isoformat()
    record["text"] = article.text
    record["words"] = list(article.words)
    return json.dumps(record, separators=(",", ":"), ensure_ascii=False)


def parse_article_line(line: str) -> Article:
    """Parse one wire-format line; raises ArticleError/ValueError on
    malformed input."""
    record = json.loads(line)
    if not isinstance(record, dict):
        raise ValueError("article record must be a JSON object")
    for key in ("id", "source", "ts", "text", "words"):
        if key not in record:
            raise ValueError(f"article record missing field {key!r}")
    words = record["words"]
    if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
        raise ValueError("words must be an array of strings")
    return Article(
        id=str(record["id"]),
        source=str(record["source"]),
        title=record.get("title"),
        timestamp=datetime.fromisoformat(str(record["ts"]).replace("Z", "+00:00")),
        text=str(record["text"]),
        words=tuple(words),
    )


class SeenSet:
    """Bounded FIFO set of already-emitted article ids."""

    def __init__(self, capacity: int = DEFAULT_SEEN_CAPACITY):
        self.capacity = capacity
        self._ids: OrderedDict[str, None] = OrderedDict()

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._ids

    def add(self, item_id: str) -> None:
        self._ids[item_id] = None
        while len(self._ids) > self.capacity:
            self._ids.popitem(last=False)


def _source_url(source: FeedSource) -> str:
    """Source URL with any query terms appended as repeated ``q`` params."""
    if not source.query_terms:
        return source.location
    parts = urllib.parse.urlsplit(source.location)
    query = urllib.parse.parse_qsl(parts.query, keep_blank_values=True)
    query.extend(("q", term) for term in source.query_terms)
    return urllib.parse.urlunsplit(parts._replace(query=urllib.parse.urlencode(query)))


def fetch_bytes(source: FeedSource, timeout: float = 30.0) -> bytes:
    location = source.location
    if "://" not in location:
        return Path(location).read_bytes()
    with urllib.request.urlopen(_source_url(source), timeout=timeout) as response:
        return response.read()


def poll_and_emit(
    source: FeedSource,
    config: FilterConfig,
    output: IO[str],
    seen: SeenSet,
) -> int:
    """Fetch the source once and emit every not-yet-seen item as one record
    line. Network or parse failures emit nothing (retried next interval)."""
    try:
        data = fetch_bytes(source)
    except (OSError, urllib.error.URLError) as exc:
        log.warning("fetch failed for %s: %s", source.location, exc)
        return 0
    try:
        items = parse_feed(data, source.kind)
    except FeedError as exc:
        log.warning("%s", exc)
        return 0

    emitted = 0
    for item in items:
        if item.id in seen:
            continue
        seen.add(item.id)
        article = normalize_item(item, source_tag=source.source_tag, config=config)
        output.write(serialize_article(article) + "\n")
        emitted += 1
    output.flush()
    return emitted


def replay(path: str | Path, rate: float, output: IO[str]) -> tuple[int, int]:
    """Emit a recorded corpus in file order.

    ``rate`` is articles per second; 0 emits everything immediately.
    Malformed lines are skipped with a warning. Returns (emitted, skipped).
    """
    emitted = 0
    skipped = 0
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            article = parse_article_line(line)
        except (ValueError, KeyError) as exc:
            skipped += 1
            log.warning("skipping malformed replay line: %s", exc)
            continue
        output.write(serialize_article(article) + "\n")
        output.flush()
        emitted += 1
        if rate > 0:
            time.sleep(1.0 / rate)
    return emitted, skipped


@dataclass
class _Control:
    """Query terms shared between the poll loop and the stdin reader."""

    terms: tuple[str, ...] = ()
    lock: threading.Lock = field(default_factory=threading.Lock)
    stop: threading.Event = field(default_factory=threading.Event)

    def get(self) -> tuple[str, ...]:
        with self.lock:
            return self.terms

    def set(self, terms: tuple[str, ...]) -> None:
        with self.lock:
            self.terms = terms


def _control_reader(control: _Control, stream: IO[str]) -> None:
    for line in stream:
        line = line.strip()
        if line.startswith("QUERY"):
            terms = tuple(line[len("QUERY"):].split())
            control.set(terms)
            log.info("query terms now %s", list(terms))
    control.stop.set()


def _open_output(spec: str):
    if spec == "stdout":
        return sys.stdout, None
    if spec.startswith("tcp:"):
        _, host, port = spec.split(":", 2)
        conn = socket.create_connection((host, int(port)))
        return conn.makefile("w", encoding="utf-8", newline="\n"), conn
    raise ValueError(f"unknown output spec {spec!r}")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wordswarm-scraper", description=__doc__)
    parser.add_argument("--source", required=True, help="feed url or file path")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--query", action="append", default=[], help="query term (repeatable)")
    parser.add_argument("--stoplist", default=None, help="stop list file (default: built-in)")
    parser.add_argument("--min-len", type=int, default=3)
    parser.add_argument("--max-len", type=int, default=20)
    parser.add_argument("--interval", type=float, default=60.0, help="poll interval in seconds")
    parser.add_argument("--out", default="stdout", help="stdout or tcp:host:port")
    parser.add_argument("--tag", default=None, help="source tag stamped on records (default: the source itself)")
    parser.add_argument("--replay-rate", type=float, default=0.0, help="articles/second, 0 = all at once")
    parser.add_argument("--once", action="store_true", help="poll or replay a single time, then exit")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_arg_parser().parse_args(argv)

    stoplist = load_stoplist(args.stoplist) if args.stoplist else default_stoplist()
    config = FilterConfig(stoplist=stoplist, min_len=args.min_len, max_len=args.max_len)
    source = FeedSource(
        location=args.source,
        kind=args.kind,
        poll_interval=args.interval if args.kind != KIND_NDJSON else 0.0,
        query_terms=tuple(args.query),
        tag=args.tag,
    )

    try:
        output, conn = _open_output(args.out)
    except (OSError, ValueError) as exc:
        log.error("cannot open output %r: %s", args.out, exc)
        return 2

    control = _Control(terms=source.query_terms)
    reader = threading.Thread(target=_control_reader, args=(control, sys.stdin), daemon=True)
    reader.start()

    try:
        if source.kind == KIND_NDJSON:
            emitted, skipped = replay(source.location, args.replay_rate, output)
            log.info("replayed %d records (%d skipped)", emitted, skipped)
            if not args.once:
                control.stop.wait()
            return 0
        seen = SeenSet()
        while True:
            live = FeedSource(source.location, source.kind, source.poll_interval, control.get(), source.tag)
            count = poll_and_emit(live, config, output, seen)
            log.info("emitted %d new records from %s", count, source.location)
            if args.once:
                return 0
            if control.stop.wait(timeout=source.poll_interval):
                return 0
    except BrokenPipeError:
        log.error("output channel closed")
        return 2
    finally:
        try:
            output.flush()
        except (OSError, ValueError):
            pass
        if conn is not None:
            conn.close()


if __name__ == "__main__":
    sys.exit(main())
