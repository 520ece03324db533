"""
Decay run: pin, forget, consolidate
===================================

Builds a small store with one entry of each fate and runs a single decay
pass: the pinned entry survives any threshold, the forgotten one dies at
any threshold, the flagged low-scorer is distilled into a semantic fact
before deletion, and the relevant one just stays.
"""

from mnemex import (
    DecayConfig,
    EpisodicStore,
    SemanticStore,
    TaskContext,
    hashed_embedding,
    run_decay,
)

DIM = 256
store = EpisodicStore(DIM)
semantic = SemanticStore(DIM)


def add(kind, text, utility=1, flag=False):
    return store.insert(kind, text, hashed_embedding(text, DIM),
                        user_utility=utility, consolidation_flag=flag)


store.advance_turn()
pinned = add("user_message", "The production API key lives in vault path kv/prod/api.", utility=2)
doomed = add("observation", "Scratch note, ignore me.", utility=0)
flagged = add("tool_call", "Deploy log: version 4.2.1 rolled out to eu-west. No errors seen.",
              flag=True)
relevant = add("agent_action", "Reviewing the quarterly billing report now.")

# age everything, then make "billing report" the live task
for _ in range(40):
    store.advance_turn()
task = TaskContext(
    task_vector=hashed_embedding("quarterly billing report", DIM),
    current_turn=store.turn,
)

report = run_decay(store, semantic, task, DecayConfig(theta_decay=0.45))

print(f"decay at turn {report.run_turn}, theta=0.45")
for entry_id, s in report.scored:
    fate = ("deleted" if entry_id in report.deleted_ids else "kept")
    print(f"  entry {entry_id}: total={s.total:.4f} -> {fate}")

print(f"\nsurvivors: {sorted(e.id for e in store.get_all_in_time_order())}"
      f"  (pinned {pinned} and relevant {relevant})")
print(f"deleted:   {report.deleted_ids}  (forgotten {doomed}, flagged {flagged})")

for fact in semantic.get_all_facts():
    print(f"\ndistilled fact {fact.id} from entries {list(fact.source_entry_ids)}:")
    print(f"  {fact.text!r}")

# a second run at the same turn is a no-op by construction
second = run_decay(store, semantic, task, DecayConfig(theta_decay=0.45))
print(f"\nsecond run at the same turn deletes {len(second.deleted_ids)} entries")
