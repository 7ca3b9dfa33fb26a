"""Pipeline orchestration: articles in, frames out.

A `Session` owns the analyzer window, the agent set and the ideal distance
matrix. Driving it is explicit: `on_article_lines` feeds records,
`advance` runs the periodic analysis/rebuild cadence plus one layout tick,
and `handle_message` services client protocol commands. All methods mutate
the session from a single owner; the emitted frames are immutable values.

Frames and commands follow the client wire protocol:
  server -> client: {"type":"frame", ...} and {"type":"article", ...}
  client -> server: {"type":"set_query"|"open_article"|"close_article"|
                     "pause"|"resume"|"set_param", ...}
  errors:           {"type":"error", "message": ...}
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, fields, replace
from typing import Callable

import numpy as np

from . import analyzer as analyzer_mod
from . import euler as euler_mod
from . import layout as layout_mod
from .analyzer import AnalysisSnapshot, Article, ArticleError, Window
from .euler import EulerParams
from .layout import Agent, AgentKind, LayoutParams, LayoutState
from .scraper import parse_article_line

log = logging.getLogger(__name__)

MODE_REFRESH = "refresh"
MODE_INCREMENTAL = "incremental"


class CommandError(ValueError):
    """Raised when a client command cannot be honored; reported, not fatal."""


@dataclass
class AnalyzerParams:
    window: int = 200
    f_min: int = 2
    n_max: int = 60

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("analyzer window must be >= 1")
        if self.f_min < 1:
            raise ValueError("f_min must be >= 1")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


@dataclass
class SessionConfig:
    update_mode: str = MODE_REFRESH
    tick_rate: float = 30.0
    snapshot_period: float = 5.0
    layout: LayoutParams = field(default_factory=LayoutParams)
    euler: EulerParams = field(default_factory=EulerParams)
    analyzer: AnalyzerParams = field(default_factory=AnalyzerParams)
    rng_seed: int = 0
    article_radius_factor: float = 3.0
    article_margin: float | None = None

    def __post_init__(self):
        if self.update_mode not in (MODE_REFRESH, MODE_INCREMENTAL):
            raise ValueError(f"unknown update_mode {self.update_mode!r}")
        if self.tick_rate <= 0:
            raise ValueError("tick_rate must be > 0")
        if self.snapshot_period <= 0:
            raise ValueError("snapshot_period must be > 0")
        if self.article_radius_factor <= 0:
            raise ValueError("article_radius_factor must be > 0")

    @property
    def snapshot_every_ticks(self) -> int:
        return max(1, round(self.snapshot_period * self.tick_rate))

    @property
    def effective_article_margin(self) -> float:
        # r_max absorbs the cluster-attraction compression so opened cards
        # keep a full word radius of clearance at equilibrium
        return self.article_margin if self.article_margin is not None else self.euler.r_max


@dataclass(frozen=True)
class FrameAgent:
    id: str
    label: str
    kind: str
    x: float
    y: float
    r: float
    stress: float
    freq: int


@dataclass(frozen=True)
class Frame:
    tick: int
    agents: tuple[FrameAgent, ...]
    mean_speed: float
    stable: bool


def frame_to_message(frame: Frame) -> dict:
    return {
        "type": "frame",
        "tick": frame.tick,
        "agents": [
            {
                "id": a.id,
                "label": a.label,
                "kind": a.kind,
                "x": round(a.x, 6),
                "y": round(a.y, 6),
                "r": round(a.r, 6),
                "stress": round(a.stress, 6),
                "freq": a.freq,
            }
            for a in frame.agents
        ],
        "mean_speed": round(frame.mean_speed, 6),
        "stable": frame.stable,
    }


def frame_to_json(frame: Frame) -> str:
    return json.dumps(frame_to_message(frame), separators=(",", ":"), ensure_ascii=False)


def article_message(article_id: str, article: Article) -> dict:
    return {
        "type": "article",
        "id": article_id,
        "title": article.title or "",
        "source": article.source,
        "text": article.text,
    }


_EMPTY_FRAME = Frame(tick=0, agents=(), mean_speed=0.0, stable=True)


class Session:
    """Single-owner pipeline state; see module docstring for the protocol."""

    def __init__(self, config: SessionConfig, query_sink: Callable[[str], None] | None = None):
        self.config = config
        self.query_sink = query_sink
        self.window = Window(config.analyzer.window)
        self.rng = np.random.default_rng(config.rng_seed)
        self.state = LayoutState(agents=(), ideal=np.zeros((0, 0)))
        self.installed: AnalysisSnapshot | None = None
        self.open_articles: dict[str, Article] = {}
        self.paused = False
        self.last_frame = _EMPTY_FRAME
        self.counters = {"ingested": 0, "malformed": 0}
        self._article_seq = 0
        self._snapshot_pending = False

    # ------------------------------------------------------------------ intake

    def on_article_lines(self, lines) -> None:
        """Parse and ingest wire-format record lines; malformed ones are
        counted and dropped, duplicates are no-ops."""
        for line in lines:
            if not line.strip():
                continue
            try:
                article = parse_article_line(line)
            except (ValueError, ArticleError) as exc:
                self.counters["malformed"] += 1
                log.warning("dropping malformed record: %s", exc)
                continue
            self.window.ingest(article)
            self.counters["ingested"] += 1

    def on_articles(self, articles) -> None:
        for article in articles:
            self.window.ingest(article)
            self.counters["ingested"] += 1

    # ---------------------------------------------------------------- analysis

    def refresh_analysis(self) -> bool:
        """Take a snapshot; rebuild agents if it differs from the installed
        one. Returns whether a rebuild happened."""
        snap = analyzer_mod.snapshot(self.window, self.config.analyzer.f_min, self.config.analyzer.n_max)
        if self.installed is not None and snap == self.installed:
            return False
        self.rebuild(snap)
        return True

    def rebuild(self, snap: AnalysisSnapshot) -> None:
        """Install a snapshot as the new agent set and ideal matrix.

        Refresh mode re-creates every word agent at a seeded random
        position; incremental mode keeps surviving words in place, drops
        vanished ones and spawns new words next to their strongest
        surviving co-occurrence neighbor. Article agents survive both.
        """
        radii, word_ideal = euler_mod.build_ideal_matrix(snap, self.config.euler)
        previous = {a.id: a for a in self.state.agents if a.kind is AgentKind.WORD}
        article_agents = [a for a in self.state.agents if a.kind is AgentKind.ARTICLE]

        word_agents: list[Agent] = []
        if self.config.update_mode == MODE_REFRESH:
            for w in snap.words:
                word_agents.append(Agent(id=w, position=self._random_position(), radius=radii[w]))
        else:
            surviving = [w for w in snap.words if w in previous]
            for w in snap.words:
                if w in previous:
                    word_agents.append(replace(previous[w], radius=radii[w]))
                else:
                    pos = self._place_near_neighbor(w, snap, surviving, previous)
                    word_agents.append(Agent(id=w, position=pos, radius=radii[w]))

        agents = tuple(word_agents) + tuple(article_agents)
        n_words = len(word_agents)
        n = len(agents)
        ideal = np.zeros((n, n))
        ideal[:n_words, :n_words] = word_ideal
        margin = self.config.effective_article_margin
        for k, art in enumerate(article_agents):
            i = n_words + k
            for j, other in enumerate(agents):
                if i == j:
                    continue
                d = art.radius + other.radius + margin
                ideal[i, j] = d
                ideal[j, i] = d
        self.state = LayoutState(agents=agents, ideal=ideal, tick=self.state.tick)
        self.installed = snap
        self._snapshot_pending = False

    def _random_position(self) -> tuple[float, float]:
        vp = self.config.layout.viewport
        return (
            float(self.rng.uniform(vp.x_min, vp.x_max)),
            float(self.rng.uniform(vp.y_min, vp.y_max)),
        )

    def _place_near_neighbor(
        self,
        word: str,
        snap: AnalysisSnapshot,
        surviving: list[str],
        previous: dict[str, Agent],
    ) -> tuple[float, float]:
        best: str | None = None
        best_count = 0
        for s in surviving:
            c = snap.cooc.get(word, s)
            if c > best_count or (c == best_count and c > 0 and (best is None or s < best)):
                best = s
                best_count = c
        if best is None or best_count == 0:
            return self._random_position()
        angle = float(self.rng.uniform(0.0, 2.0 * math.pi))
        px, py = previous[best].position
        offset = self.config.euler.r_max
        return (px + offset * math.cos(angle), py + offset * math.sin(angle))

    # -------------------------------------------------------------------- tick

    def tick(self) -> Frame:
        """One layout step; paused sessions return the last frame untouched."""
        if self.paused:
            return self.last_frame
        self.state, velocities = layout_mod.step(self.state, self.config.layout)
        frame = self._assemble_frame(velocities)
        self.last_frame = frame
        return frame

    def advance(self) -> Frame:
        """Scheduler step: run the snapshot cadence when due, then tick."""
        if self.paused:
            return self.last_frame
        every = self.config.snapshot_every_ticks
        if self._snapshot_pending or self.state.tick % every == 0:
            self.refresh_analysis()
        return self.tick()

    def current_frame(self) -> Frame:
        """Frame for the present state without advancing the layout."""
        return self._assemble_frame(np.zeros((len(self.state.agents), 2)))

    def _assemble_frame(self, velocities: np.ndarray) -> Frame:
        delta = layout_mod.delta_matrix(self.state)
        raw = layout_mod.stress_values(delta)
        top = float(raw.max()) if raw.size else 0.0
        norm = raw / top if top > 0 else np.zeros_like(raw)
        freq = self.installed.freq if self.installed is not None else {}
        agents = []
        for k, agent in enumerate(self.state.agents):
            if agent.kind is AgentKind.ARTICLE:
                article = self.open_articles.get(agent.id)
                label = (article.title if article and article.title else agent.id)
                f = 0
            else:
                label = agent.id
                f = freq.get(agent.id, 0)
            agents.append(
                FrameAgent(
                    id=agent.id,
                    label=label,
                    kind=agent.kind.value,
                    x=agent.position[0],
                    y=agent.position[1],
                    r=agent.radius,
                    stress=float(norm[k]),
                    freq=f,
                )
            )
        ms = layout_mod.mean_speed(velocities)
        return Frame(
            tick=self.state.tick,
            agents=tuple(agents),
            mean_speed=ms,
            stable=layout_mod.is_stable(ms, self.config.layout),
        )

    # ---------------------------------------------------------------- commands

    def open_article(self, word: str, point: tuple[float, float]) -> str:
        """Pin an article card at the click point and push words out of it.

        Picks the most recently ingested window article containing the
        word; the card's ideal distance to every other agent is the sum of
        radii plus the configured margin.
        """
        vp = self.config.layout.viewport
        if not (vp.x_min <= point[0] <= vp.x_max and vp.y_min <= point[1] <= vp.y_max):
            raise CommandError(f"click point {point} outside viewport")
        word_ids = {a.id for a in self.state.agents if a.kind is AgentKind.WORD}
        if word not in word_ids:
            raise CommandError(f"unknown word agent {word!r}")
        matches = [a for a in self.window if word in a.words]
        if not matches:
            raise CommandError(f"no window article contains {word!r}")
        article = matches[-1]

        self._article_seq += 1
        agent_id = f"article-{self._article_seq}"
        radius = self.config.article_radius_factor * self.config.euler.r_max
        margin = self.config.effective_article_margin
        row = [radius + other.radius + margin for other in self.state.agents] + [0.0]
        agent = Agent(
            id=agent_id,
            position=(float(point[0]), float(point[1])),
            radius=radius,
            kind=AgentKind.ARTICLE,
            pinned=True,
        )
        self.state = layout_mod.add_agent(self.state, agent, np.array(row))
        self.open_articles[agent_id] = article
        return agent_id

    def close_article(self, agent_id: str) -> None:
        if agent_id not in self.open_articles:
            raise CommandError(f"no open article {agent_id!r}")
        self.state = layout_mod.remove_agent(self.state, agent_id)
        del self.open_articles[agent_id]

    def set_query(self, terms) -> None:
        """Forward a new stream query to the scraper and restart analysis
        on the emptied window at the next snapshot."""
        terms = [t for t in terms if isinstance(t, str) and t.strip()]
        if not terms:
            raise CommandError("query terms must be nonempty")
        if self.query_sink is None:
            raise CommandError("scraper channel closed")
        try:
            self.query_sink("QUERY " + " ".join(terms))
        except Exception as exc:
            raise CommandError(f"scraper channel closed: {exc}") from exc
        self.window.clear()
        self._snapshot_pending = True

    def pause(self) -> None:
        self.paused = True

    def resume(self) -> None:
        self.paused = False

    _SETTABLE_SECTIONS = ("layout", "euler", "analyzer")
    _SETTABLE_TOP = ("tick_rate", "snapshot_period", "update_mode", "article_radius_factor", "article_margin")

    def set_param(self, path: str, value) -> None:
        """Adjust one configuration value by dotted path, e.g.
        ``layout.speed_coefficient``."""
        parts = path.split(".")
        try:
            if len(parts) == 2 and parts[0] in self._SETTABLE_SECTIONS:
                section = getattr(self.config, parts[0])
                if parts[1] not in {f.name for f in fields(section)}:
                    raise CommandError(f"unknown parameter {path!r}")
                if parts[1] == "behaviors":
                    value = tuple(value)
                setattr(self.config, parts[0], replace(section, **{parts[1]: value}))
            elif len(parts) == 1 and parts[0] in self._SETTABLE_TOP:
                self.config = replace(self.config, **{parts[0]: value})
            else:
                raise CommandError(f"unknown parameter {path!r}")
        except (ValueError, TypeError) as exc:
            if isinstance(exc, CommandError):
                raise
            raise CommandError(f"cannot set {path!r}: {exc}") from exc

    def handle_message(self, message: dict) -> list[dict]:
        """Service one client protocol message; returns reply messages."""
        try:
            kind = message.get("type")
            if kind == "set_query":
                self.set_query(message.get("terms") or [])
                return [{"type": "ok", "command": "set_query"}]
            if kind == "open_article":
                word = message.get("word") or message.get("id")
                point = (float(message.get("x", 0.0)), float(message.get("y", 0.0)))
                agent_id = self.open_article(word, point)
                return [article_message(agent_id, self.open_articles[agent_id])]
            if kind == "close_article":
                self.close_article(message.get("id"))
                return [{"type": "ok", "command": "close_article"}]
            if kind == "pause":
                self.pause()
                return [{"type": "ok", "command": "pause"}]
            if kind == "resume":
                self.resume()
                return [{"type": "ok", "command": "resume"}]
            if kind == "set_param":
                self.set_param(str(message.get("path", "")), message.get("value"))
                return [{"type": "ok", "command": "set_param"}]
            raise CommandError(f"unknown command type {kind!r}")
        except CommandError as exc:
            return [{"type": "error", "message": str(exc)}]

    # ------------------------------------------------------------------ status

    def status(self) -> dict:
        return {
            "ingested": self.counters["ingested"],
            "malformed": self.counters["malformed"],
            "window": len(self.window),
            "agents": len(self.state.agents),
            "tick": self.state.tick,
        }
