#!/usr/bin/env python3
# Run the frozen 500-turn scenario under all three context strategies and
# print the score table. Fully deterministic: same numbers every run.

from mnemex import canonical_scenario, compare_strategies

reports = compare_strategies(canonical_scenario())

cols = ("strategy", "completion%", "contra%", "abstain%", "avg_tokens", "final_size")
print("  ".join(f"{c:>12}" for c in cols))
for r in reports:
    row = (r.strategy, r.task_completion_rate, r.contradiction_rate,
           r.abstain_rate, round(r.avg_token_cost, 3), r.episodic_size_over_time[-1])
    print("  ".join(f"{v:>12}" for v in row))

hybrid = next(r for r in reports if r.strategy == "hybrid")
print(f"\nhybrid ran decay {hybrid.decay_runs} times and applied "
      f"{hybrid.feedback_applied} curation feedback events")
