"""Generate indicator observations and compile a face-validity report.

Observations are the top activities/paths per indicator. Each is judged on
two questions (accuracy in isolation, plausibility against the pre-filter
population) with a three-way verdict; the summary counts verdicts per
question and lists rows where the two questions disagree.
"""

from abspm.assessment import (
    Judgment,
    JudgmentStore,
    generate_observations,
    render_questions,
    summarize,
)
from abspm.dfg import build_dfg
from abspm.eventlog import apply_filters, convert, paper_outlier_preset
from abspm.simulation import SimConfig, run

config = SimConfig(seed=42)
log = apply_filters(convert(run(config).records, config.base_date),
                    paper_outlier_preset(config.base_date))
dfg = build_dfg(log)

observations = generate_observations(dfg, ("case_frequency", "max_repetitions"), top_k=3)
population = config.agent_count

print("observations for review:")
for obs in observations:
    q1, q2 = render_questions(obs, population)
    element = obs.element if isinstance(obs.element, str) else " -> ".join(obs.element)
    print(f"  [{obs.obs_id}] {element}: {obs.value_display}")

# scripted verdicts standing in for an interactive expert session
store = JudgmentStore(o.obs_id for o in observations)
for obs in observations:
    strict = "not_plausible" if obs.value >= dfg.total_cases else "plausible"
    store.record(Judgment(obs.obs_id, "Q1", strict))
    store.record(Judgment(obs.obs_id, "Q2", "plausible"))

report = summarize(observations, store)
print("\n" + report.to_markdown())
