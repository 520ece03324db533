"""
How an entry earns its score
============================

Walks the composite utility score by hand: recency decays exponentially
with elapsed turns, relevance is cosine-against-task mapped onto [0, 1],
and the user's 0..N rating is normalized.  The total is just the weighted
sum — no hidden terms.
"""

from mnemex import (
    DecayConfig,
    EpisodicStore,
    TaskContext,
    hashed_embedding,
    utility_score,
)

DIM = 256

store = EpisodicStore(DIM)

# a short session: three memories at different ages
store.advance_turn()
old_id = store.insert("observation", "CI pipeline flaked on the flaky-net test.",
                      hashed_embedding("CI pipeline flaked on the flaky-net test.", DIM))

for _ in range(20):
    store.advance_turn()
mid_id = store.insert("user_message", "Please track the database migration deadline.",
                      hashed_embedding("Please track the database migration deadline.", DIM))

for _ in range(5):
    store.advance_turn()
new_id = store.insert("agent_action", "Scheduled the database migration for Friday.",
                      hashed_embedding("Scheduled the database migration for Friday.", DIM))

# the task right now: the user's last message
task = TaskContext(
    task_vector=hashed_embedding("Please track the database migration deadline.", DIM),
    current_turn=store.turn,
)
config = DecayConfig()  # alpha=0.3, beta=0.5, gamma=0.2, rate=0.05

print(f"turn is {store.turn}; weights a={config.alpha} b={config.beta} g={config.gamma}\n")
for entry_id in (old_id, mid_id, new_id):
    entry = store.get(entry_id)
    s = utility_score(entry, task, config)
    print(f"  entry {entry.id} (turn {entry.turn}): {entry.content!r}")
    print(f"    recency={s.recency:.4f}  relevance={s.relevance:.4f}  "
          f"user={s.user_utility_norm:.2f}  ->  total={s.total:.4f}")

print("\nThe migration request itself scores highest: it IS the task vector")
print("(relevance 1.0), and 25 turns of age cost the flaky-CI note dearly.")
