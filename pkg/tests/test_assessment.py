import random
from datetime import datetime, timedelta, timezone

import pytest

from abspm.assessment import (
    AssessmentError,
    Judgment,
    JudgmentStore,
    Observation,
    Q1_TEXT,
    element_label,
    generate_observations,
    normalize_verdict,
    render_questions,
    summarize,
)
from abspm.dfg import build_dfg
from abspm.eventlog import Event, EventLog, Trace
from oracles import random_log

UTC = timezone.utc
BASE = datetime(2023, 10, 17, tzinfo=UTC)


def make_log(case_specs):
    traces = []
    for cid, events in case_specs.items():
        traces.append(Trace(cid, tuple(
            Event(a, BASE + timedelta(days=d), {"step_counter": i})
            for i, (a, d) in enumerate(events))))
    return EventLog(tuple(traces), {})


def table3_observations():
    """The nine expert-reviewed facts, as published."""

    def obs(i, element, indicator, value, display):
        return Observation(i, element, indicator, value, display)

    return [
        obs(1, "move_location", "case_frequency", 12, "CF=12 (100%)"),
        obs(2, "move_location", "max_repetitions", 22, "MNR=22"),
        obs(3, ("move_location", "move_location"), "case_frequency", 12, "CF=12 (100%)"),
        obs(4, "change_happy_3_2", "case_frequency", 5, "CF=5 (42%)"),
        obs(5, "change_happy_3_2", "max_repetitions", 1, "MNR=1"),
        obs(6, ("move_location", "change_happy_5_3"), "case_frequency", 4, "CF=4 (33%)"),
        obs(7, "change_unhappy_4_2", "case_frequency", 3, "CF=3 (25%)"),
        obs(8, "change_unhappy_4_2", "max_repetitions", 2, "MNR=2"),
        obs(9, ("change_happy_7_4", "change_unhappy_4_2"), "case_frequency", 1, "CF=1 (8%)"),
    ]


TABLE3_VERDICTS = {
    1: ("not_plausible", "plausible"),
    2: ("not_plausible", "further_investigation"),
    3: ("not_plausible", "not_plausible"),
    4: ("further_investigation", "plausible"),
    5: ("plausible", "plausible"),
    6: ("plausible", "plausible"),
    7: ("plausible", "plausible"),
    8: ("further_investigation", "plausible"),
    9: ("further_investigation", "plausible"),
}


def table3_store(observations):
    store = JudgmentStore(o.obs_id for o in observations)
    for obs_id, (q1, q2) in TABLE3_VERDICTS.items():
        store.record(Judgment(obs_id, "Q1", q1))
        store.record(Judgment(obs_id, "Q2", q2))
    return store


class TestGenerateObservations:
    def twelve_case_log(self):
        cases = {}
        for i in range(12):
            events = [("move_location", 0), ("move_location", 1)]
            if i < 5:
                events.append(("change_happy_3_2", 2))
            cases[str(i + 1)] = events
        return make_log(cases)

    def test_full_coverage_display(self):
        dfg = build_dfg(self.twelve_case_log())
        observations = generate_observations(dfg, ("case_frequency",), top_k=1)
        assert observations[0].element == "move_location"
        assert observations[0].value_display == "CF=12 (100%)"

    def test_path_observation_display(self):
        dfg = build_dfg(self.twelve_case_log())
        observations = generate_observations(dfg, ("case_frequency",), top_k=3)
        path_obs = [o for o in observations if isinstance(o.element, tuple)]
        assert path_obs
        assert path_obs[0].element == ("move_location", "move_location")
        assert path_obs[0].value_display == "CF=12 (100%)"

    def test_partial_coverage_percent_rounded(self):
        dfg = build_dfg(self.twelve_case_log())
        observations = generate_observations(dfg, ("case_frequency",), top_k=10)
        displays = {o.value_display for o in observations}
        assert "CF=5 (42%)" in displays  # 5/12 -> 41.67 -> 42

    def test_obs_ids_stable_and_sequential(self):
        dfg = build_dfg(self.twelve_case_log())
        observations = generate_observations(dfg)
        assert [o.obs_id for o in observations] == list(range(1, len(observations) + 1))
        again = generate_observations(dfg)
        assert observations == again

    def test_empty_indicator_list(self):
        dfg = build_dfg(self.twelve_case_log())
        assert generate_observations(dfg, (), top_k=3) == []

    def test_unknown_indicator_rejected(self):
        dfg = build_dfg(self.twelve_case_log())
        with pytest.raises(Exception, match="indicator"):
            generate_observations(dfg, ("bogus",))

    def test_values_rederivable_from_dfg(self):
        rng = random.Random(1)
        dfg = build_dfg(random_log(rng))
        for obs in generate_observations(dfg, ("case_frequency", "max_repetitions"), 5):
            if isinstance(obs.element, tuple):
                assert obs.value == dfg.edges[obs.element].value(obs.indicator)
            else:
                assert obs.value == dfg.nodes[obs.element].value(obs.indicator)


class TestRenderQuestions:
    def test_population_280(self):
        obs = table3_observations()[0]
        q1, q2 = render_questions(obs, 280)
        assert q1 == Q1_TEXT
        assert "280 agents" in q2
        assert q2 == ("Given an overall population size of 280 agents, can the "
                      "obtained performance indicator value be considered a "
                      "plausible representation?")

    def test_singular_population(self):
        _, q2 = render_questions(table3_observations()[0], 1)
        assert "1 agent," in q2
        assert "1 agents" not in q2

    def test_q1_constant_across_observations(self):
        texts = {render_questions(o, 280)[0] for o in table3_observations()}
        assert texts == {Q1_TEXT}

    def test_population_must_be_positive(self):
        with pytest.raises(AssessmentError):
            render_questions(table3_observations()[0], 0)


class TestJudgmentStore:
    def test_first_verdict_grows_store(self):
        store = JudgmentStore([1])
        store.record(Judgment(1, "Q1", "plausible"))
        assert len(store) == 1

    def test_upsert_overwrites_and_audits(self):
        store = JudgmentStore([1])
        store.record(Judgment(1, "Q1", "plausible"))
        store.record(Judgment(1, "Q1", "not_plausible"))
        assert len(store) == 1
        assert len(store.audit) == 2
        assert store.verdict_for(1, "Q1") == "not_plausible"

    def test_table3_load_gives_18_entries(self):
        store = table3_store(table3_observations())
        assert len(store) == 18

    def test_unknown_obs_id_rejected(self):
        store = JudgmentStore([1])
        with pytest.raises(AssessmentError):
            store.record(Judgment(2, "Q1", "plausible"))

    def test_invalid_verdict_rejected(self):
        with pytest.raises(AssessmentError):
            Judgment(1, "Q1", "maybe")
        with pytest.raises(AssessmentError):
            normalize_verdict("definitely")

    def test_verdict_token_normalization(self):
        assert normalize_verdict("Not Plausible") == "not_plausible"
        assert normalize_verdict("further investigation") == "further_investigation"

    def test_persistence_round_trip(self, tmp_path):
        store = table3_store(table3_observations())
        audit = tmp_path / "audit.ndjson"
        current = tmp_path / "current.json"
        store.save(audit, current)
        loaded = JudgmentStore.load(audit, current)
        assert len(loaded) == 18
        assert len(loaded.audit) == 18
        assert loaded.verdict_for(1, "Q2") == "plausible"


class TestSummarize:
    def test_table3_q1_counts(self):
        observations = table3_observations()
        report = summarize(observations, table3_store(observations))
        assert report.counts["Q1"] == {
            "plausible": 3, "not_plausible": 3, "further_investigation": 3}

    def test_table3_q2_counts(self):
        observations = table3_observations()
        report = summarize(observations, table3_store(observations))
        assert report.counts["Q2"] == {
            "plausible": 7, "further_investigation": 1, "not_plausible": 1}

    def test_table3_discrepancies(self):
        observations = table3_observations()
        report = summarize(observations, table3_store(observations))
        assert set(report.discrepancies) == {1, 2, 4, 8, 9}

    def test_counts_sum_to_judged_rows(self):
        observations = table3_observations()
        report = summarize(observations, table3_store(observations))
        for q in ("Q1", "Q2"):
            assert sum(report.counts[q].values()) == 9

    def test_most_frequent_q2_is_plausible(self):
        observations = table3_observations()
        report = summarize(observations, table3_store(observations))
        assert report.most_frequent["Q2"] == "plausible"

    def test_pending_rows_reported(self):
        observations = table3_observations()
        store = JudgmentStore(o.obs_id for o in observations)
        store.record(Judgment(1, "Q1", "plausible"))
        report = summarize(observations, store)
        assert set(report.pending) == set(range(1, 10))
        assert report.discrepancies == ()

    def test_report_deterministic(self):
        observations = table3_observations()
        store = table3_store(observations)
        assert summarize(observations, store).to_markdown() == \
            summarize(observations, store).to_markdown()

    def test_markdown_contains_table3_rows(self):
        observations = table3_observations()
        report = summarize(observations, table3_store(observations))
        md = report.to_markdown()
        assert "| 1 | move_location | CF=12 (100%) | not plausible | plausible |" in md
        assert "move_location -> move_location" in md

    def test_csv_rendering(self):
        observations = table3_observations()
        report = summarize(observations, table3_store(observations))
        lines = report.to_csv().splitlines()
        assert lines[0] == "#,Activity/path,Observation,Question 1,Question 2"
        assert len(lines) == 10
