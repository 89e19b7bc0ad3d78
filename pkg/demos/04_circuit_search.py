"""Rediscover a four-CNOT GHZ circuit with the learned-toolbox search.

Run: python demos/04_circuit_search.py [seed]
"""

import sys
import time

from qutrit_ghz import SearchConfig, run, run_search
from qutrit_ghz.states import ghz_family_fidelity

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
start = time.perf_counter()
result = run_search(SearchConfig(max_cnots=4, seed=seed))
elapsed = time.perf_counter() - start

print(f"seed {seed}: converged={result.converged} after {result.trials_used} trials "
      f"in {elapsed:.1f}s; toolbox grew to {result.toolbox_size} elements")
best = result.best
print(f"best score {best.score:.6f} with {best.cnot_count} CNOTs; free angle {best.free_angle}")
for ins in best.circuit.instructions:
    print(f"  {ins.label:5s} params={tuple(round(p, 4) for p in ins.params)} on {ins.targets}")
print(f"check: family fidelity of the returned circuit = {ghz_family_fidelity(run(best.circuit)):.6f}")

print("\nImprovements along the way (trial: best score):")
previous = -1.0
for e in result.log:
    if e.best > previous + 1e-9:
        print(f"  {e.trial:6d}: {e.best:.4f}")
        previous = e.best
