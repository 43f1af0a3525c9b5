"""A deterministic scripted backend that plays any built-in scenario offline.

The fixtures below answer every prompt the simulation can issue — planning,
decomposition, reactions, dialogue, importance scoring, life summaries — with
a simple story: everyone who knows about the event preps at home, gathers
what they are bringing, attends, and winds down. In the hard variant the host
first tours the guests' homes and invites whoever is not in the know yet.
"""

from __future__ import annotations

import json
import re

from ..llm import CompletionRequest, Fixture, ScriptedBackend
from .builders import Scenario
from .runtime import VARIANTS, event_brief

KNOWS_MARKER = "is happening today"
ATTEND_LEAD_TICKS = 20
VISIT_TICKS = 15
CHAT_WINDOW_BEFORE_EVENT = 30

_PLAN_TAG = re.compile(r"^plan:([^:]+):(\d+)$")
_TAG_AGENT = re.compile(r"^[a-z]+:([^:]+):(\d+)$")
_ENTRY_RE = re.compile(r"^Plan entry: (.*)$", re.MULTILINE)
_PLACE_RE = re.compile(r"^Place: (.*)$", re.MULTILINE)
_SPAN_RE = re.compile(r"Starts at tick (\d+) and lasts (\d+) ticks\.")
_PARTNER_RE = re.compile(r"You are talking with (.*?)\. The conversation started about: (.*)")

# What each participant is expected to bring, by item-type name. Host first.
BRING: dict[str, dict[str, tuple[str, ...]]] = {
    "fitness_competition": {"maya": ("stopwatch", "medal"), "sam": ("water bottle",)},
    "friends_dinner": {
        "elena": ("casserole dish", "wine bottle"),
        "yuki": ("salad bowl",),
        "marcus": ("cutlery set",),
    },
    "lins_family_party": {
        "wei": ("welcome banner", "paper lantern"),
        "mei": ("tea set",),
        "ada": ("gift box",),
        "hao": ("gift box",),
    },
    "music_jam_session": {"derek": ("acoustic guitar", "songbook"), "raj": ("tambourine",)},
    "mixology_workshop": {"carlos": ("cocktail shaker", "jigger")},
    "open_mic_comedy": {
        "dana": ("microphone",),
        "felix": ("prop box",),
        "becca": ("cue cards",),
    },
    "philosophy_lecture": {"alan": ("lecture notes", "chalk box")},
    "writing_workshop": {"grace": ("manuscript", "fountain pen"), "noah": ("manuscript",)},
}


def _fenced(doc: dict) -> str:
    return "```json\n" + json.dumps(doc) + "\n```"


def _tag_parts(request: CompletionRequest) -> tuple[str, int]:
    m = _TAG_AGENT.match(request.tag)
    if not m:
        raise ValueError(f"unparsable tag {request.tag!r}")
    return m.group(1), int(m.group(2))


class _Story:
    """Shared mutable state + response logic for one scenario run."""

    def __init__(self, scenario: Scenario, variant: str) -> None:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.scenario = scenario
        self.variant = variant
        self.world = scenario.world
        self.brief = event_brief(scenario)
        self.venue = scenario.event_area_name
        self.names = {aid: self.world.agents[aid].name for aid in scenario.participants}
        self.by_name = {name: aid for aid, name in self.names.items()}
        self.homes = {
            aid: self.world.areas[self.world.agents[aid].home_area].name
            for aid in scenario.participants
        }
        self.bring = BRING.get(scenario.id, {})
        self.invited: set[str] = set()  # agent ids confirmed via dialogue
        self.chatted: set[frozenset[str]] = set()

    # -- planning -------------------------------------------------------------

    def plan(self, request: CompletionRequest) -> str:
        agent, now = _tag_parts(request)
        knows = self.variant == "basic" or KNOWS_MARKER in request.text()
        home = self.homes[agent]
        es = self.scenario.event_start_tick
        ed = self.scenario.event_duration_ticks
        entries: list[dict] = []
        if not knows:
            entries = [
                {"description": "potter around at home", "area": home, "start_tick": now,
                 "duration_ticks": 90},
                {"description": "stroll around the plaza", "area": "Plaza",
                 "start_tick": now + 90, "duration_ticks": 40},
                {"description": "afternoon chores at home", "area": home,
                 "start_tick": now + 130, "duration_ticks": 120},
            ]
            return _fenced({"entries": entries})
        t = now
        if self.variant == "hard" and agent == self.scenario.host:
            pending = [a for a in self.scenario.participants
                       if a != agent and a not in self.invited]
            if pending and now < es - 40:
                entries.append({"description": "get ready to go inviting", "area": home,
                                "start_tick": t, "duration_ticks": 10})
                t += 10
                for guest in pending:
                    first = self.names[guest].split()[0]
                    entries.append({
                        "description": f"visit {first} and invite them to {self.scenario.name}",
                        "area": self.homes[guest],
                        "start_tick": t,
                        "duration_ticks": VISIT_TICKS,
                    })
                    t += VISIT_TICKS
        attend_start = max(t, es - ATTEND_LEAD_TICKS)
        if now < es + ed:
            if attend_start > t:
                entries.append({"description": f"get ready for {self.scenario.name}",
                                "area": home, "start_tick": t,
                                "duration_ticks": attend_start - t})
            entries.append({"description": f"attend {self.scenario.name}", "area": self.venue,
                            "start_tick": attend_start,
                            "duration_ticks": es + ed - attend_start})
            entries.append({"description": "wind down at home", "area": home,
                            "start_tick": es + ed, "duration_ticks": 90})
        else:
            entries.append({"description": "reflect on the day at home", "area": home,
                            "start_tick": now, "duration_ticks": 120})
        return _fenced({"entries": entries})

    # -- decomposition ----------------------------------------------------------

    def decompose(self, request: CompletionRequest) -> str:
        agent, _now = _tag_parts(request)
        text = request.text()
        entry = _ENTRY_RE.search(text)
        place = _PLACE_RE.search(text)
        span = _SPAN_RE.search(text)
        if not (entry and place and span):
            raise ValueError("decompose prompt missing entry markers")
        description = entry.group(1).strip()
        area = place.group(1).strip()
        duration = max(1, int(span.group(2)))
        actions: list[dict] = []
        bring = [
            name for name in self.bring.get(agent, ())
            if any(t.name == name for t in self.world.item_types.values())
        ]
        if area == self.venue and description.startswith("attend") and bring:
            setup = max(1, min(10, duration - 1))
            actions.append({"description": "bring what's needed and set up", "area": area,
                            "items": bring, "duration_ticks": setup})
            if duration - setup >= 1:
                actions.append({"description": f"take part in {self.scenario.name}",
                                "area": area, "items": [], "duration_ticks": duration - setup})
        else:
            actions.append({"description": description, "area": area, "items": [],
                            "duration_ticks": duration})
        return _fenced({"actions": actions})

    # -- reactions ---------------------------------------------------------------

    def react(self, request: CompletionRequest) -> str:
        agent, now = _tag_parts(request)
        text = request.text()
        noticed = text.split("You just noticed:", 1)[-1].split("Relevant memories:", 1)[0]
        es = self.scenario.event_start_tick
        ed = self.scenario.event_duration_ticks
        if self.variant == "hard" and agent == self.scenario.host:
            for guest in self.scenario.participants:
                if guest == agent or guest in self.invited:
                    continue
                name = self.names[guest]
                if name in noticed:
                    return _fenced({
                        "decision": "talk",
                        "target": name,
                        "topic": f"an invitation to {self.scenario.name}",
                    })
        if es - CHAT_WINDOW_BEFORE_EVENT <= now <= es + ed:
            for other in self.scenario.participants:
                if other == agent:
                    continue
                pair = frozenset((agent, other))
                if pair in self.chatted:
                    continue
                if self.names[other] in noticed:
                    self.chatted.add(pair)  # one attempt per pair
                    return _fenced({
                        "decision": "talk",
                        "target": self.names[other],
                        "topic": f"{self.scenario.name} today",
                    })
        return _fenced({"decision": "continue", "reason": "nothing pressing"})

    # -- dialogue ---------------------------------------------------------------

    def dialogue(self, request: CompletionRequest) -> str:
        agent, _now = _tag_parts(request)
        text = request.text()
        m = _PARTNER_RE.search(text)
        if not m:
            raise ValueError("dialogue prompt missing partner line")
        partner = self.by_name.get(m.group(1).strip(), "")
        transcript = text.split("Conversation so far:", 1)[-1].split("Relevant memories:", 1)[0]
        first = "(no lines yet)" in transcript
        hosting = self.variant == "hard" and agent == self.scenario.host
        if hosting and partner and partner not in self.invited:
            if KNOWS_MARKER not in transcript:
                return _fenced({
                    "utterance": f"So glad I caught you! {self.brief} Will you come?",
                    "stop": False,
                })
            self.invited.add(partner)
            return _fenced({"utterance": "Wonderful, see you there!", "stop": True})
        if KNOWS_MARKER in transcript and agent != self.scenario.host:
            self.invited.add(agent)
            return _fenced({
                "utterance": f"Count me in, I will be at {self.venue}.",
                "stop": True,
            })
        partner_first = self.names.get(partner, "friend").split()[0]
        if first:
            return _fenced({
                "utterance": f"Hey {partner_first}! Ready for {self.scenario.name}?",
                "stop": False,
            })
        return _fenced({"utterance": "Absolutely, glad you made it.", "stop": True})

    # -- scoring and summaries ---------------------------------------------------

    def importance(self, request: CompletionRequest) -> str:
        return "9" if KNOWS_MARKER in request.text() else "4"

    def life(self, request: CompletionRequest) -> str:
        agent, _now = _tag_parts(request)
        profile = self.world.agents[agent]
        return f"I am {profile.name}. {profile.lifestyle} The days have felt full lately."


def scripted_backend(scenario: Scenario, variant: str) -> ScriptedBackend:
    """One shared backend answering every mind in a scenario run."""
    story = _Story(scenario, variant)
    return ScriptedBackend([
        Fixture(tag_prefix="plan:", response=story.plan),
        Fixture(tag_prefix="decompose:", response=story.decompose),
        Fixture(tag_prefix="react:", response=story.react),
        Fixture(tag_prefix="dialogue:", response=story.dialogue),
        Fixture(tag_prefix="importance:", response=story.importance),
        Fixture(tag_prefix="life:", response=story.life),
    ])
