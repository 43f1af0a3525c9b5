"""The eight built-in event scenarios, authored as code.

Every scenario ships its own small town map (40x30): houses along the top,
an open plaza, and a venue building where the event happens. Maps are built
deterministically, so saving one to a bundle is byte-stable run over run.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..mapio import validate_map
from ..errors import MapValidationError
from ..world import (
    Area,
    AgentProfile,
    GridPos,
    InContainer,
    ItemInstance,
    ItemType,
    OnTile,
    WorldMap,
)

MAP_WIDTH = 40
MAP_HEIGHT = 30

_TOP_SLOTS = ((2, 2, 8, 8), (11, 2, 17, 8), (20, 2, 26, 8), (29, 2, 35, 8))
_SIDE_SLOTS = ((2, 10, 8, 16), (31, 10, 37, 16))
_VENUE_RECT = (12, 19, 27, 27)
_PLAZA_RECT = (10, 10, 29, 17)

DEFAULT_START_TIME = "07:00"


@dataclass(frozen=True)
class Scenario:
    id: str
    name: str
    world: WorldMap
    host: str  # agent id; first participant
    participants: tuple[str, ...]  # agent ids, host included
    event_description: str
    event_area: str  # area id of the venue room
    event_start_tick: int
    event_duration_ticks: int
    start_time: str = DEFAULT_START_TIME

    @property
    def event_area_name(self) -> str:
        return self.world.areas[self.event_area].name

    def meta(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "host": self.host,
            "participants": list(self.participants),
            "event_description": self.event_description,
            "event_area": self.event_area,
            "event_area_name": self.event_area_name,
            "event_start_tick": self.event_start_tick,
            "event_duration_ticks": self.event_duration_ticks,
        }


def _tick_at(start_time: str, clock_time: str) -> int:
    """Minutes between the day start and a wall-clock time (1 min per tick)."""
    sh, sm = (int(v) for v in start_time.split(":"))
    eh, em = (int(v) for v in clock_time.split(":"))
    return (eh * 60 + em) - (sh * 60 + sm)


def _rect_tiles(x0: int, y0: int, x1: int, y1: int) -> frozenset[GridPos]:
    return frozenset(GridPos(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1))


class _TownBuilder:
    def __init__(self, map_id: str, name: str) -> None:
        self.map_id = map_id
        self.name = name
        self.walkable = [[True] * MAP_WIDTH for _ in range(MAP_HEIGHT)]
        for x in range(MAP_WIDTH):  # border ring
            self.walkable[0][x] = self.walkable[MAP_HEIGHT - 1][x] = False
        for y in range(MAP_HEIGHT):
            self.walkable[y][0] = self.walkable[y][MAP_WIDTH - 1] = False
        self.areas: dict[str, Area] = {
            "town": Area("town", "Town", "sector", _rect_tiles(0, 0, MAP_WIDTH - 1, MAP_HEIGHT - 1))
        }
        self.areas["plaza"] = Area("plaza", "Plaza", "sector", _rect_tiles(*_PLAZA_RECT), parent="town")
        self.item_types: dict[str, ItemType] = {}
        self.items: dict[str, ItemInstance] = {}
        self.agents: dict[str, AgentProfile] = {}

    def building(
        self, bid: str, bname: str, rect: tuple[int, int, int, int], room_id: str, room_name: str
    ) -> None:
        x0, y0, x1, y1 = rect
        door = ((x0 + x1) // 2, y1) if y1 < MAP_HEIGHT // 2 else ((x0 + x1) // 2, y0)
        for x in range(x0, x1 + 1):
            self.walkable[y0][x] = self.walkable[y1][x] = False
        for y in range(y0, y1 + 1):
            self.walkable[y][x0] = self.walkable[y][x1] = False
        self.walkable[door[1]][door[0]] = True
        self.areas[bid] = Area(bid, bname, "building", _rect_tiles(*rect), parent="town")
        self.areas[room_id] = Area(
            room_id, room_name, "room", _rect_tiles(x0 + 1, y0 + 1, x1 - 1, y1 - 1), parent=bid
        )

    def add_type(
        self, tid: str, name: str, *, portable: bool = True, capacity: int = 0, **props: str
    ) -> None:
        self.item_types[tid] = ItemType(
            id=tid,
            name=name,
            properties={k: str(v) for k, v in props.items()},
            portable=portable,
            container_capacity=capacity,
        )

    def add_item(self, iid: str, tid: str, where: tuple) -> None:
        match where:
            case ("tile", x, y):
                placement = OnTile(GridPos(x, y))
            case ("in", container_id):
                placement = InContainer(container_id)
            case _:
                raise ValueError(f"bad item placement spec: {where!r}")
        self.items[iid] = ItemInstance(id=iid, type_id=tid, placement=placement)

    def add_agent(
        self,
        aid: str,
        name: str,
        *,
        home: str,
        pos: tuple[int, int],
        personality: str,
        traits: tuple[str, ...],
        lifestyle: str,
        speed: float = 4.0,
    ) -> None:
        self.agents[aid] = AgentProfile(
            id=aid,
            name=name,
            personality=personality,
            core_traits=traits,
            lifestyle=lifestyle,
            home_area=home,
            start_pos=GridPos(*pos),
            movement_speed=speed,
        )

    def build(self) -> WorldMap:
        world = WorldMap(
            id=self.map_id,
            name=self.name,
            width=MAP_WIDTH,
            height=MAP_HEIGHT,
            walkable=tuple(tuple(row) for row in self.walkable),
            areas=self.areas,
            item_types=self.item_types,
            items=self.items,
            agents=self.agents,
        )
        report = validate_map(world)
        if not report.ok:  # authored content must never ship broken
            raise MapValidationError(report)
        return world


def _town_with_cast(
    map_id: str,
    map_name: str,
    venue_id: str,
    venue_name: str,
    cast: list[dict],
) -> _TownBuilder:
    """Shared town skeleton: one house per cast member, plus the venue."""
    b = _TownBuilder(map_id, map_name)
    b.building(f"{venue_id}_bld", f"{venue_name} Building", _VENUE_RECT, venue_id, venue_name)
    slots = list(_TOP_SLOTS) + list(_SIDE_SLOTS)
    if len(cast) > len(slots):
        raise ValueError(f"cast of {len(cast)} exceeds {len(slots)} house slots")
    for member, rect in zip(cast, slots):
        aid = member["id"]
        label = aid.capitalize()
        b.building(f"{aid}_house", f"{label} House", rect, f"{aid}_home", f"{label} Home")
        x0, y0, x1, y1 = rect
        b.add_agent(
            aid,
            member["name"],
            home=f"{aid}_home",
            pos=(x0 + 2, y0 + 2),
            personality=member["personality"],
            traits=member["traits"],
            lifestyle=member["lifestyle"],
            speed=member.get("speed", 4.0),
        )
    return b


def _host_home_spot(b: _TownBuilder, host: str, offset: int = 0) -> tuple[int, int]:
    pos = b.agents[host].start_pos
    return (pos.x + 1 + offset, pos.y + 1)


def _venue_spot(offset: int) -> tuple[int, int]:
    x0, y0, x1, y1 = _VENUE_RECT
    return (x0 + 2 + offset, y0 + 2)


def _fitness_competition() -> Scenario:
    cast = [
        {
            "id": "maya",
            "name": "Maya Torres",
            "personality": "an upbeat gym coach who turns everything into a challenge",
            "traits": ("energetic", "organized", "loud"),
            "lifestyle": "wakes at dawn, trains clients all day, and keeps a strict meal schedule",
        },
        {
            "id": "leo",
            "name": "Leo Park",
            "personality": "a quietly competitive runner who hates losing more than he admits",
            "traits": ("disciplined", "reserved", "stubborn"),
            "lifestyle": "runs every morning before his remote job and logs every workout",
        },
        {
            "id": "priya",
            "name": "Priya Nair",
            "personality": "a cheerful yoga instructor who joins everything for the people, not the prizes",
            "traits": ("warm", "flexible", "talkative"),
            "lifestyle": "teaches two classes a day and spends afternoons in the plaza with friends",
            "speed": 3.0,
        },
        {
            "id": "sam",
            "name": "Sam Brooks",
            "personality": "a former couch potato three months into a fitness streak he is proud of",
            "traits": ("earnest", "self-deprecating", "persistent"),
            "lifestyle": "works the morning shift at the bakery, then trains in the evening",
        },
    ]
    b = _town_with_cast("fitness_competition", "Gym Town", "gym_hall", "Community Gym", cast)
    b.add_type("yoga_mat", "yoga mat")
    b.add_type("water_bottle", "water bottle")
    b.add_type("stopwatch", "stopwatch")
    b.add_type("medal", "medal", material="brass")
    b.add_type("gym_bag", "gym bag", capacity=3)
    b.add_type("weight_rack", "weight rack", portable=False)
    b.add_item("rack1", "weight_rack", ("tile", *_venue_spot(10)))
    b.add_item("bag1", "gym_bag", ("tile", *_host_home_spot(b, "maya")))
    b.add_item("watch1", "stopwatch", ("in", "bag1"))
    b.add_item("medal1", "medal", ("in", "bag1"))
    b.add_item("mat1", "yoga_mat", ("tile", *_venue_spot(2)))
    b.add_item("mat2", "yoga_mat", ("tile", *_venue_spot(3)))
    b.add_item("bottle1", "water_bottle", ("tile", *_host_home_spot(b, "maya", 1)))
    b.add_item("bottle2", "water_bottle", ("tile", *_venue_spot(5)))
    return Scenario(
        id="fitness_competition",
        name="a fitness competition",
        world=b.build(),
        host="maya",
        participants=("maya", "leo", "priya", "sam"),
        event_description="a friendly fitness competition with timed circuits and a medal ceremony",
        event_area="gym_hall",
        event_start_tick=_tick_at(DEFAULT_START_TIME, "10:00"),
        event_duration_ticks=120,
    )


def _friends_dinner() -> Scenario:
    cast = [
        {
            "id": "elena",
            "name": "Elena Rossi",
            "personality": "a generous cook who shows affection by overfeeding her friends",
            "traits": ("hospitable", "perfectionist", "chatty"),
            "lifestyle": "works from home as a translator and plans meals days in advance",
        },
        {
            "id": "marcus",
            "name": "Marcus Webb",
            "personality": "a laid-back carpenter who never arrives anywhere on time",
            "traits": ("easygoing", "handy", "forgetful"),
            "lifestyle": "builds furniture in his garage and naps after lunch",
        },
        {
            "id": "yuki",
            "name": "Yuki Tanaka",
            "personality": "a thoughtful librarian who brings a carefully chosen gift to every gathering",
            "traits": ("considerate", "observant", "soft-spoken"),
            "lifestyle": "shelves books until five and reads in the plaza before dinner",
            "speed": 3.0,
        },
    ]
    b = _town_with_cast("friends_dinner", "Dinner Town", "dining_room", "Long Table Room", cast)
    b.add_type("casserole_dish", "casserole dish")
    b.add_type("wine_bottle", "wine bottle", vintage="2019")
    b.add_type("salad_bowl", "salad bowl")
    b.add_type("cutlery_set", "cutlery set")
    b.add_type("pantry_cupboard", "pantry cupboard", portable=False, capacity=4)
    b.add_type("recipe_card", "recipe card")
    b.add_item("cupboard1", "pantry_cupboard", ("tile", *_host_home_spot(b, "elena")))
    b.add_item("casserole1", "casserole_dish", ("in", "cupboard1"))
    b.add_item("wine1", "wine_bottle", ("in", "cupboard1"))
    b.add_item("recipe1", "recipe_card", ("in", "cupboard1"))
    b.add_item("cutlery1", "cutlery_set", ("tile", *_venue_spot(4)))
    salad_home = b.agents["yuki"].start_pos
    b.add_item("salad1", "salad_bowl", ("tile", salad_home.x + 1, salad_home.y + 1))
    b.add_item("wine2", "wine_bottle", ("tile", *_venue_spot(8)))
    return Scenario(
        id="friends_dinner",
        name="a friends' dinner",
        world=b.build(),
        host="elena",
        participants=("elena", "marcus", "yuki"),
        event_description="a home-cooked dinner for three old friends",
        event_area="dining_room",
        event_start_tick=_tick_at(DEFAULT_START_TIME, "18:00"),
        event_duration_ticks=120,
    )


def _lins_family_party() -> Scenario:
    cast = [
        {
            "id": "wei",
            "name": "Lin Wei",
            "personality": "the family patriarch who plans gatherings with military precision",
            "traits": ("proud", "meticulous", "devoted"),
            "lifestyle": "retired schoolteacher; gardens in the morning, plays chess at noon",
            "speed": 3.0,
        },
        {
            "id": "mei",
            "name": "Lin Mei",
            "personality": "Wei's wife, a calm cook whose dumplings settle every family argument",
            "traits": ("patient", "wry", "nurturing"),
            "lifestyle": "runs the household and a small tea stall on weekends",
            "speed": 3.0,
        },
        {
            "id": "hao",
            "name": "Lin Hao",
            "personality": "their restless son who brings a new hobby to every gathering",
            "traits": ("impulsive", "funny", "generous"),
            "lifestyle": "delivery rider by day, amateur photographer by night",
        },
        {
            "id": "xiu",
            "name": "Lin Xiu",
            "personality": "their daughter, a medical resident who guards her rare free evenings",
            "traits": ("precise", "tired", "loyal"),
            "lifestyle": "hospital shifts at odd hours; sleeps when she can",
        },
        {
            "id": "tom",
            "name": "Tom Lin",
            "personality": "Hao's young cousin who mostly wants to be included in everything",
            "traits": ("eager", "clumsy", "sweet"),
            "lifestyle": "student; does homework late and snacks constantly",
        },
        {
            "id": "ada",
            "name": "Ada Lin",
            "personality": "Xiu's aunt, the family storyteller with an opinion on every dish",
            "traits": ("talkative", "warm", "nosy"),
            "lifestyle": "runs the corner shop and knows everyone in town",
            "speed": 2.0,
        },
    ]
    b = _town_with_cast("lins_family_party", "Lin Town", "party_hall", "Lin Banquet Hall", cast)
    b.add_type("gift_box", "gift box")
    b.add_type("lantern", "paper lantern")
    b.add_type("tea_set", "tea set")
    b.add_type("mahjong_set", "mahjong set")
    b.add_type("banner", "welcome banner")
    b.add_type("storage_chest", "storage chest", portable=False, capacity=5)
    b.add_item("chest1", "storage_chest", ("tile", *_host_home_spot(b, "wei")))
    b.add_item("banner1", "banner", ("in", "chest1"))
    b.add_item("lantern1", "lantern", ("in", "chest1"))
    b.add_item("lantern2", "lantern", ("in", "chest1"))
    b.add_item("tea1", "tea_set", ("tile", *_host_home_spot(b, "wei", 1)))
    b.add_item("mahjong1", "mahjong_set", ("tile", *_venue_spot(6)))
    gift_home = b.agents["ada"].start_pos
    b.add_item("gift1", "gift_box", ("tile", gift_home.x + 1, gift_home.y + 1))
    gift_home2 = b.agents["hao"].start_pos
    b.add_item("gift2", "gift_box", ("tile", gift_home2.x + 1, gift_home2.y + 1))
    return Scenario(
        id="lins_family_party",
        name="a Lin's family party",
        world=b.build(),
        host="wei",
        participants=("wei", "mei", "hao", "xiu", "tom", "ada"),
        event_description="the Lin family's spring reunion party with tea, dumplings, and mahjong",
        event_area="party_hall",
        event_start_tick=_tick_at(DEFAULT_START_TIME, "17:00"),
        event_duration_ticks=180,
    )


def _music_jam_session() -> Scenario:
    cast = [
        {
            "id": "derek",
            "name": "Derek Stone",
            "personality": "a gruff bassist who secretly rehearses his casual remarks",
            "traits": ("gruff", "dedicated", "dry-humored"),
            "lifestyle": "repairs instruments in his workshop and gigs on weekends",
        },
        {
            "id": "ivy",
            "name": "Ivy Chen",
            "personality": "a conservatory dropout who plays everything by ear and nothing by the rules",
            "traits": ("intuitive", "restless", "bright"),
            "lifestyle": "teaches piano to kids in the afternoon, writes songs at night",
        },
        {
            "id": "raj",
            "name": "Raj Patel",
            "personality": "a percussionist who drums on every surface, including during conversations",
            "traits": ("rhythmic", "impatient", "cheerful"),
            "lifestyle": "barista in the morning; practices tabla every evening",
        },
        {
            "id": "nina",
            "name": "Nina Alvarez",
            "personality": "a shy singer with a huge voice she only trusts among friends",
            "traits": ("shy", "soulful", "meticulous"),
            "lifestyle": "works at the pharmacy and hums through the stockroom shifts",
            "speed": 3.0,
        },
    ]
    b = _town_with_cast("music_jam_session", "Jam Town", "studio_room", "Riverside Studio", cast)
    b.add_type("guitar", "acoustic guitar")
    b.add_type("tambourine", "tambourine")
    b.add_type("keyboard", "stage keyboard", portable=False)
    b.add_type("songbook", "songbook")
    b.add_type("amp_case", "amp case", capacity=2)
    b.add_item("keys1", "keyboard", ("tile", *_venue_spot(9)))
    b.add_item("case1", "amp_case", ("tile", *_host_home_spot(b, "derek")))
    b.add_item("book1", "songbook", ("in", "case1"))
    b.add_item("guitar1", "guitar", ("tile", *_host_home_spot(b, "derek", 1)))
    tamb_home = b.agents["raj"].start_pos
    b.add_item("tamb1", "tambourine", ("tile", tamb_home.x + 1, tamb_home.y + 1))
    b.add_item("book2", "songbook", ("tile", *_venue_spot(4)))
    return Scenario(
        id="music_jam_session",
        name="a music jam session",
        world=b.build(),
        host="derek",
        participants=("derek", "ivy", "raj", "nina"),
        event_description="an informal jam session at the studio, all instruments welcome",
        event_area="studio_room",
        event_start_tick=_tick_at(DEFAULT_START_TIME, "15:00"),
        event_duration_ticks=120,
    )


def _mixology_workshop() -> Scenario:
    cast = [
        {
            "id": "carlos",
            "name": "Carlos Vega",
            "personality": "a showman bartender who narrates every pour like a cooking show",
            "traits": ("theatrical", "precise", "welcoming"),
            "lifestyle": "preps the bar in the afternoon and sleeps long mornings",
        },
        {
            "id": "fiona",
            "name": "Fiona O'Brien",
            "personality": "a chemist who treats cocktails as titration with better glassware",
            "traits": ("analytical", "curious", "droll"),
            "lifestyle": "lab work until four, then long walks through the plaza",
        },
        {
            "id": "kenji",
            "name": "Kenji Sato",
            "personality": "a quiet tea master skeptical that anything beats a good gyokuro",
            "traits": ("serene", "exacting", "open-minded"),
            "lifestyle": "runs a tiny tea room; closes early on workshop days",
            "speed": 3.0,
        },
        {
            "id": "lara",
            "name": "Lara Kim",
            "personality": "an event photographer who collects recipes she never makes",
            "traits": ("social", "visual", "scattered"),
            "lifestyle": "shoots events at night and edits photos over late breakfasts",
        },
    ]
    b = _town_with_cast("mixology_workshop", "Cocktail Town", "bar_room", "Copper Bar", cast)
    b.add_type("cocktail_shaker", "cocktail shaker")
    b.add_type("jigger", "jigger")
    b.add_type("citrus_crate", "citrus crate", capacity=6)
    b.add_type("glassware_set", "glassware set")
    b.add_type("syrup_bottle", "syrup bottle")
    b.add_type("bar_counter", "bar counter", portable=False)
    b.add_item("counter1", "bar_counter", ("tile", *_venue_spot(11)))
    b.add_item("crate1", "citrus_crate", ("tile", *_venue_spot(1)))
    b.add_item("syrup1", "syrup_bottle", ("in", "crate1"))
    b.add_item("shaker1", "cocktail_shaker", ("tile", *_host_home_spot(b, "carlos")))
    b.add_item("jigger1", "jigger", ("tile", *_host_home_spot(b, "carlos", 1)))
    b.add_item("glasses1", "glassware_set", ("tile", *_venue_spot(5)))
    return Scenario(
        id="mixology_workshop",
        name="a mixology workshop",
        world=b.build(),
        host="carlos",
        participants=("carlos", "fiona", "kenji", "lara"),
        event_description="a hands-on mixology workshop: three classic cocktails, tools provided",
        event_area="bar_room",
        event_start_tick=_tick_at(DEFAULT_START_TIME, "16:00"),
        event_duration_ticks=90,
    )


def _open_mic_comedy() -> Scenario:
    cast = [
        {
            "id": "dana",
            "name": "Dana Flores",
            "personality": "a veteran MC who can rescue any silence with a heckle of her own",
            "traits": ("quick-witted", "generous", "unflappable"),
            "lifestyle": "writes jokes over breakfast and runs the comedy night calendar",
        },
        {
            "id": "omar",
            "name": "Omar Haddad",
            "personality": "a deadpan accountant whose five minutes are entirely about spreadsheets",
            "traits": ("deadpan", "methodical", "secretly nervous"),
            "lifestyle": "balances books by day, rehearses in the mirror at night",
        },
        {
            "id": "becca",
            "name": "Becca Stein",
            "personality": "a first-timer who has rewritten her set eleven times this week",
            "traits": ("anxious", "sharp", "hopeful"),
            "lifestyle": "grad student; edits her thesis and her jokes in the same cafe",
            "speed": 3.0,
        },
        {
            "id": "felix",
            "name": "Felix Wright",
            "personality": "a prop comic whose suitcase is funnier than most people's sets",
            "traits": ("absurd", "crafty", "kind"),
            "lifestyle": "mail carrier by day; builds props in his shed after dinner",
        },
        {
            "id": "joy",
            "name": "Joy Osei",
            "personality": "a crowd-work natural who has never finished a written joke",
            "traits": ("improvisational", "bold", "warm"),
            "lifestyle": "hairdresser; tries material on customers all day",
        },
    ]
    b = _town_with_cast("open_mic_comedy", "Comedy Town", "stage_room", "Basement Stage", cast)
    b.add_type("microphone", "microphone")
    b.add_type("cue_cards", "cue cards")
    b.add_type("stage_stool", "stage stool")
    b.add_type("prop_box", "prop box", capacity=4)
    b.add_type("pa_speaker", "PA speaker", portable=False)
    b.add_item("speaker1", "pa_speaker", ("tile", *_venue_spot(12)))
    b.add_item("mic1", "microphone", ("tile", *_host_home_spot(b, "dana")))
    b.add_item("stool1", "stage_stool", ("tile", *_venue_spot(7)))
    props_home = b.agents["felix"].start_pos
    b.add_item("propbox1", "prop_box", ("tile", props_home.x + 1, props_home.y + 1))
    b.add_item("cards1", "cue_cards", ("in", "propbox1"))
    cards_home = b.agents["becca"].start_pos
    b.add_item("cards2", "cue_cards", ("tile", cards_home.x + 1, cards_home.y + 1))
    return Scenario(
        id="open_mic_comedy",
        name="an open mic comedy night",
        world=b.build(),
        host="dana",
        participants=("dana", "omar", "becca", "felix", "joy"),
        event_description="an open mic comedy night, five minutes per set, sign-up at the door",
        event_area="stage_room",
        event_start_tick=_tick_at(DEFAULT_START_TIME, "19:00"),
        event_duration_ticks=120,
    )


def _philosophy_lecture() -> Scenario:
    cast = [
        {
            "id": "alan",
            "name": "Alan Reyes",
            "personality": "a retired professor who lectures for the questions, not the applause",
            "traits": ("erudite", "mischievous", "punctual"),
            "lifestyle": "annotates books all morning and walks the same loop at noon",
            "speed": 3.0,
        },
        {
            "id": "mina",
            "name": "Mina Kaur",
            "personality": "a software engineer who discovered Stoicism through a podcast and went all in",
            "traits": ("systematic", "enthusiastic", "literal"),
            "lifestyle": "codes from home; schedules even her leisure",
        },
        {
            "id": "theo",
            "name": "Theo Brandt",
            "personality": "a barge skipper who argues with every book he reads, out loud",
            "traits": ("contrarian", "well-read", "booming"),
            "lifestyle": "hauls cargo on the river and reads at the tiller",
        },
        {
            "id": "sofia",
            "name": "Sofia Costa",
            "personality": "a high-school teacher collecting ideas her students might actually use",
            "traits": ("practical", "curious", "patient"),
            "lifestyle": "grades in the morning, gardens after school",
        },
    ]
    b = _town_with_cast("philosophy_lecture", "Lecture Town", "lecture_hall", "Stoa Lecture Hall", cast)
    b.add_type("lecture_notes", "lecture notes")
    b.add_type("projector", "projector", portable=False)
    b.add_type("handout_stack", "handout stack")
    b.add_type("chalk_box", "chalk box", capacity=2)
    b.add_type("lectern", "lectern", portable=False)
    b.add_item("lectern1", "lectern", ("tile", *_venue_spot(10)))
    b.add_item("projector1", "projector", ("tile", *_venue_spot(12)))
    b.add_item("notes1", "lecture_notes", ("tile", *_host_home_spot(b, "alan")))
    b.add_item("chalk1", "chalk_box", ("tile", *_host_home_spot(b, "alan", 1)))
    b.add_item("handouts1", "handout_stack", ("in", "chalk1"))
    b.add_item("handouts2", "handout_stack", ("tile", *_venue_spot(3)))
    return Scenario(
        id="philosophy_lecture",
        name="a philosophy lecture",
        world=b.build(),
        host="alan",
        participants=("alan", "mina", "theo", "sofia"),
        event_description="a public lecture on Stoic practice, with a long question session",
        event_area="lecture_hall",
        event_start_tick=_tick_at(DEFAULT_START_TIME, "14:00"),
        event_duration_ticks=90,
    )


def _writing_workshop() -> Scenario:
    cast = [
        {
            "id": "grace",
            "name": "Grace Liu",
            "personality": "a published novelist who believes every draft deserves one kind sentence",
            "traits": ("encouraging", "rigorous", "calm"),
            "lifestyle": "writes from five to nine in the morning, edits for others after lunch",
        },
        {
            "id": "noah",
            "name": "Noah Bell",
            "personality": "a crime-fiction hopeful who plots murders over breakfast cereal",
            "traits": ("morbid", "cheerful", "disciplined"),
            "lifestyle": "night-shift security guard; writes in the quiet hours",
        },
        {
            "id": "amara",
            "name": "Amara Diop",
            "personality": "a poet who measures every word and still brings five extra pages",
            "traits": ("lyrical", "exacting", "generous"),
            "lifestyle": "teaches French in the morning and walks the riverbank for lines",
            "speed": 3.0,
        },
    ]
    b = _town_with_cast("writing_workshop", "Writers Town", "reading_room", "Quiet Reading Room", cast)
    b.add_type("notebook", "notebook")
    b.add_type("fountain_pen", "fountain pen")
    b.add_type("manuscript", "manuscript")
    b.add_type("book_crate", "book crate", capacity=5)
    b.add_type("typewriter", "typewriter", portable=False)
    b.add_item("typewriter1", "typewriter", ("tile", *_venue_spot(9)))
    b.add_item("crate1", "book_crate", ("tile", *_venue_spot(1)))
    b.add_item("notebook1", "notebook", ("in", "crate1"))
    b.add_item("ms1", "manuscript", ("tile", *_host_home_spot(b, "grace")))
    b.add_item("pen1", "fountain_pen", ("tile", *_host_home_spot(b, "grace", 1)))
    ms_home = b.agents["noah"].start_pos
    b.add_item("ms2", "manuscript", ("tile", ms_home.x + 1, ms_home.y + 1))
    return Scenario(
        id="writing_workshop",
        name="a writing workshop",
        world=b.build(),
        host="grace",
        participants=("grace", "noah", "amara"),
        event_description="a small writing workshop: read a page aloud, get notes, trade pages",
        event_area="reading_room",
        event_start_tick=_tick_at(DEFAULT_START_TIME, "13:00"),
        event_duration_ticks=120,
    )


_BUILDERS = (
    _fitness_competition,
    _friends_dinner,
    _lins_family_party,
    _music_jam_session,
    _mixology_workshop,
    _open_mic_comedy,
    _philosophy_lecture,
    _writing_workshop,
)


@lru_cache(maxsize=1)
def builtin_scenarios() -> dict[str, Scenario]:
    scenarios = {}
    for build in _BUILDERS:
        scenario = build()
        scenarios[scenario.id] = scenario
    return scenarios
