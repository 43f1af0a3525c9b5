"""Built-in scenario integrity, knowledge seeding, runs, and bundle export."""

from __future__ import annotations

import pytest

from townlet.errors import BundleError
from townlet.llm import ScriptedBackend
from townlet.mapio import validate_map
from townlet.scenarios import (
    VARIANTS,
    build_minds,
    builtin_scenarios,
    event_brief,
    export_scenario,
    get_scenario,
    load_scenario,
    run_scenario,
    scripted_backend,
    seed_knowledge,
)


def all_scenarios():
    return builtin_scenarios()


class TestBuiltinIntegrity:
    def test_eight_scenarios_ship(self) -> None:
        assert len(all_scenarios()) == 8

    def test_every_map_validates(self) -> None:
        for scenario in all_scenarios().values():
            report = validate_map(scenario.world)
            assert report.ok, f"{scenario.id}: {report}"

    def test_cast_sizes_between_three_and_six(self) -> None:
        sizes = {sid: len(s.participants) for sid, s in all_scenarios().items()}
        assert all(3 <= n <= 6 for n in sizes.values()), sizes
        assert max(sizes.values()) == 6  # the family party exercises the top end

    def test_host_is_a_participant_with_a_mind_profile(self) -> None:
        for scenario in all_scenarios().values():
            assert scenario.host in scenario.participants
            for agent_id in scenario.participants:
                assert agent_id in scenario.world.agents, f"{scenario.id}:{agent_id}"

    def test_event_window_fits_inside_the_day(self) -> None:
        for scenario in all_scenarios().values():
            assert 0 < scenario.event_start_tick < 1440
            assert scenario.event_start_tick + scenario.event_duration_ticks <= 1440

    def test_event_area_exists(self) -> None:
        for scenario in all_scenarios().values():
            assert scenario.event_area in scenario.world.areas
            assert scenario.event_area_name  # resolvable to a display name

    def test_briefs_mention_place_and_name(self) -> None:
        for scenario in all_scenarios().values():
            brief = event_brief(scenario)
            assert scenario.name in brief
            assert scenario.event_area_name in brief
            assert "is happening today" in brief


class TestKnowledgeSeeding:
    def seeded(self, scenario, variant):
        minds = build_minds(scenario, ScriptedBackend([]))
        seed_knowledge(scenario, variant, minds)
        return minds

    @pytest.mark.parametrize("scenario_id", sorted(builtin_scenarios()))
    def test_basic_informs_everyone(self, scenario_id) -> None:
        scenario = all_scenarios()[scenario_id]
        minds = self.seeded(scenario, "basic")
        for agent_id, mind in minds.items():
            knowledge = [m for m in mind.memory.entries if m.kind == "EventKnowledge"]
            assert len(knowledge) == 1, f"{agent_id} in {scenario_id}"
            assert scenario.name in knowledge[0].text

    @pytest.mark.parametrize("scenario_id", sorted(builtin_scenarios()))
    def test_hard_informs_only_the_host(self, scenario_id) -> None:
        scenario = all_scenarios()[scenario_id]
        minds = self.seeded(scenario, "hard")
        for agent_id, mind in minds.items():
            knowledge = [m for m in mind.memory.entries if m.kind == "EventKnowledge"]
            if agent_id == scenario.host:
                assert len(knowledge) == 1
                assert "hosting" in knowledge[0].text
            else:
                assert knowledge == [], f"{agent_id} leaked knowledge in {scenario_id}"

    def test_unknown_variant_rejected(self) -> None:
        scenario = all_scenarios()["friends_dinner"]
        minds = self.seeded(scenario, "basic")
        with pytest.raises(ValueError):
            seed_knowledge(scenario, "nightmare", minds)

    def test_variant_list_is_fixed(self) -> None:
        assert VARIANTS == ("basic", "hard")


class TestRunScenario:
    def test_short_run_produces_a_readable_trace(self, tmp_path) -> None:
        scenario = all_scenarios()["friends_dinner"]
        reader = run_scenario(
            scenario,
            "basic",
            scripted_backend(scenario, "basic"),
            out_path=tmp_path / "dinner.trace",
            ticks=30,
        )
        assert reader.header.scenario["id"] == "friends_dinner"
        assert reader.header.variant == "basic"
        assert reader.header.agents == tuple(sorted(scenario.participants))
        assert reader.header.backend_kind == "scripted"
        assert reader.events()  # something happened

    def test_same_seed_same_bytes(self, tmp_path) -> None:
        scenario = all_scenarios()["friends_dinner"]
        paths = []
        for name in ("a.trace", "b.trace"):
            path = tmp_path / name
            run_scenario(
                scenario,
                "basic",
                scripted_backend(scenario, "basic"),
                out_path=path,
                ticks=120,
                seed=7,
            )
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_full_day_reaches_attendance(self, tmp_path) -> None:
        scenario = all_scenarios()["friends_dinner"]
        for variant in VARIANTS:
            reader = run_scenario(
                scenario,
                variant,
                scripted_backend(scenario, variant),
                out_path=tmp_path / f"{variant}.trace",
                ticks=1440,
            )
            midpoint = scenario.event_start_tick + scenario.event_duration_ticks // 2
            snapshot = reader.snapshot_at(scenario.world, midpoint)
            venue = scenario.world.areas[scenario.event_area]
            attending = sum(
                1
                for agent_id in scenario.participants
                if tuple(snapshot["agents"][agent_id]["pos"]) in venue.tiles
            )
            assert attending == len(scenario.participants), f"{variant}: {attending}"

    def test_hard_variant_spreads_word_through_dialogue(self, tmp_path) -> None:
        scenario = all_scenarios()["friends_dinner"]
        reader = run_scenario(
            scenario,
            "hard",
            scripted_backend(scenario, "hard"),
            out_path=tmp_path / "hard.trace",
            ticks=scenario.event_start_tick,
        )
        sessions = [e for e in reader.events() if e.kind == "DialogueStart"]
        assert sessions, "host never invited anyone"
        initiators = {e.agent for e in sessions}
        assert scenario.host in initiators


class TestBundles:
    def test_export_then_load_round_trip(self, tmp_path) -> None:
        scenario = all_scenarios()["writing_workshop"]
        export_scenario(scenario, tmp_path)
        loaded = load_scenario(tmp_path / "writing_workshop.scenario.json")
        assert loaded.id == scenario.id
        assert loaded.participants == scenario.participants
        assert loaded.event_start_tick == scenario.event_start_tick
        assert loaded.world == scenario.world

    def test_get_scenario_by_builtin_id(self) -> None:
        assert get_scenario("music_jam_session").id == "music_jam_session"

    def test_get_scenario_by_path(self, tmp_path) -> None:
        scenario = all_scenarios()["mixology_workshop"]
        export_scenario(scenario, tmp_path)
        loaded = get_scenario(str(tmp_path / "mixology_workshop.scenario.json"))
        assert loaded.id == "mixology_workshop"

    def test_unknown_reference_rejected(self) -> None:
        with pytest.raises(BundleError):
            get_scenario("block_party")

    def test_corrupt_bundle_rejected(self, tmp_path) -> None:
        path = tmp_path / "broken.scenario.json"
        path.write_text('{"id": "broken"}', encoding="utf-8")
        with pytest.raises(BundleError):
            load_scenario(path)
