"""
A persisted curation session, then a crash-and-replay
=====================================================

Drives MemoryService the way the HTTP layer does: every mutation lands in
the append-only event log, so dropping the process and replaying the log
rebuilds the exact same state, byte for byte. Run from any directory; the
store lands in a temp dir that is printed so you can poke at the files.
"""

import json
import tempfile
from pathlib import Path

from mnemex import MemoryService, replay_service

data_dir = Path(tempfile.mkdtemp(prefix="mnemex-demo-")) / "store"
service = MemoryService(data_dir=data_dir)

service.advance_turn()
service.insert_entry("user_message", "Remember: the vendor contract renews on March 3.")
service.insert_entry("observation", "Weather chat, nothing important.")
service.insert_entry("tool_call", "Fetched invoice #4411 for acme corp, total 12,400 EUR.",
                     consolidation_flag=True)

service.set_utility(0, 2)        # pin the contract note
service.set_utility(1, 0)        # forget the small talk
service.consolidate(2)           # distill the invoice now, keep the fact

for _ in range(9):
    service.advance_turn()
report = service.run_decay_once()
print(f"decay at turn {report.run_turn}: deleted {report.deleted_ids}, "
      f"{len(report.consolidated)} consolidated")

print("\ntimeline after curation:")
for node in service.timeline():
    print(f"  [{node['status']:>13}] {node['entry_id']}: {node['content_preview']}")
print("facts:", json.dumps([f['text'] for f in service.semantic_facts()]))

# --- simulate a crash: new process, same directory -------------------------
reborn = replay_service(data_dir)
same = reborn.state_json() == service.state_json()
print(f"\nreplayed {reborn.log.sequence} events from {data_dir}")
print("state identical after replay:", same)
assert same
