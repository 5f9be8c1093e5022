"""Derive an XES event log from raw records and apply the outlier filters.

The conversion names activities `move_location` / `change_happy_X_Y` /
`change_unhappy_X_Y` and interprets each simulation step as one day. The
filters keep whole cases only: a timeframe starting one week in, case
durations under 90 days, and at most 25 events per case.
"""

from abspm.eventlog import apply_filters, convert, log_stats, paper_outlier_preset
from abspm.simulation import SimConfig, run
from abspm.xes import write_xes

config = SimConfig(seed=42)
result = run(config)
log = convert(result.records, config.base_date, metadata={"name": "demo"})

stats = log_stats(log)
print(f"events={stats.events} cases={stats.cases} activities={stats.activities}")
print(f"events per case: min={stats.events_per_case_min} "
      f"median={stats.events_per_case_median} max={stats.events_per_case_max}")
print(f"span: {stats.first_timestamp.date()} .. {stats.last_timestamp.date()}")

top = sorted(stats.activity_frequencies.items(), key=lambda kv: -kv[1])[:5]
print("\nmost frequent activities:")
for label, count in top:
    print(f"  {label}: {count}")

spec = paper_outlier_preset(config.base_date)
filtered = apply_filters(log, spec)
fs = log_stats(filtered)
print(f"\nafter outlier filters: events={fs.events} cases={fs.cases} "
      f"({fs.cases / stats.cases:.0%} of cases)")

write_xes(filtered, "demo_filtered.xes")
print("wrote demo_filtered.xes")
