"""
Letting the explorer design the process
=======================================

Instead of writing processes by hand, hand the recipe and the catalog to
the explorer.  It enumerates every assignment of equipment to recipe
steps, adds quality measures where risky failure modes are uncovered,
drops candidates that miss a threshold or the budget, and ranks the rest.
"""

from dataclasses import replace

from autopfmea import explore, write_report
from autopfmea.datasets import load_roll_example
from autopfmea.explorer import enumerate_base_processes

roll = load_roll_example()

bases = enumerate_base_processes(roll.recipe, roll.catalog)
print(f"{len(bases)} base processes:")
for process in bases:
    print("  ", process.id)

# Greedy mode inserts the single best covering inspection for each risky
# uncovered row and stops as soon as the candidate passes.
result = explore(roll.recipe, roll.catalog, roll.config)
print(f"\ngreedy: {len(result.ranked)} ranked, {result.rejected_count} rejected")
print(write_report(result, "table"))

# Exhaustive mode tries every combination of inspections up to the limit,
# so cheaper or safer variants show up side by side and the ranking
# criteria decide between them.
exhaustive = replace(roll.config, exhaustive_qm=True)
result = explore(roll.recipe, roll.catalog, exhaustive)
print(f"exhaustive: {len(result.ranked)} ranked, {result.rejected_count} rejected")
print(write_report(result, "table"))

# Putting cost first changes which candidate wins.
cost_first = replace(exhaustive, ranking_criteria=("expected_cost", "worst_rpn", "duration"))
best = explore(roll.recipe, roll.catalog, cost_first).ranked[0]
print("cheapest acceptable process:", best.process.id,
      f"({best.economics.expected_cost_per_accepted:.4f} per accepted part, "
      f"worst RPN {best.worksheet.worst_rpn})")
