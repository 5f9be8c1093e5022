"""Run a seeded segregation simulation and inspect its raw records.

Every run is fully determined by its configuration: same seed, same records.
The raw log is the Table-style CSV that feeds the rest of the pipeline.
"""

from pathlib import Path

from abspm.simulation import SimConfig, run, write_raw_csv

config = SimConfig(seed=42)  # 20x20 grid, density 0.70 -> 280 agents, tolerance 0.55
result = run(config)

print(f"agents: {len(result.final_grid)}")
print(f"steps executed: {result.steps_executed} (converged={result.converged})")
print(f"raw records: {len(result.records)}")

print("\nfirst five records:")
for r in result.records[:5]:
    print(f"  #{r.event_no} step={r.step}/{r.step_counter} agent={r.agent_id} "
          f"{r.kind} -> {r.new_loc} neighbors={len(r.neighbor_ids)} "
          f"similar={r.similar_count}")

moves = [r for r in result.records if r.kind == "move"]
print(f"\nmoves: {len(moves)}, status flips: {len(result.records) - len(moves) - 280}")

out = Path("demo_raw_log.csv")
write_raw_csv(result, out)
print(f"\nwrote {out} ({out.stat().st_size} bytes)")
