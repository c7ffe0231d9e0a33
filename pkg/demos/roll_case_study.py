"""
Roll assembly: two processes for one recipe
===========================================

The bundled roll dataset describes a small assembly line.  A part is
conveyed, picked and placed, greased, and picked and placed twice more.
Two hand-written processes realise that recipe with different robots.
This script scores both of them and shows why the second is preferred.
"""

from autopfmea import analyze_process, economic_report, process_produces, write_report
from autopfmea.datasets import load_roll_example

roll = load_roll_example()
cfg = roll.config
print(f"rating scale 1..{cfg.scale_max}, risk threshold {cfg.risk_threshold}, "
      f"RPN threshold {cfg.rpn_threshold}")

# Both processes must actually produce the recipe before any scoring makes
# sense.  The matcher binds every recipe step to a process step in order.
for process in (roll.process_p, roll.process_p_prime):
    match = process_produces(process, roll.recipe, roll.catalog)
    print(f"\n{process.id}: produces={match.produces}")
    for recipe_step, process_step in match.bindings:
        print(f"  {recipe_step} <- {process_step}")

# Process P uses robot A for the picks.  Robot A crimps more often than
# robot B, and nothing downstream can see a crimp, so those rows sit at
# the maximum detection rating.
p = analyze_process(roll.process_p, roll.recipe, roll.catalog, cfg)
print("\nWorksheet for", p.process_id)
print(write_report(p, "table"))

# P-prime makes two changes.  Robot B does the first pick, which only
# handles plastic and crimps less often, and the final inspection is a
# laser scanner, which can see robot B's crimps.  Together they bring the
# worst RPN well under the threshold.
p_prime = analyze_process(roll.process_p_prime, roll.recipe, roll.catalog, cfg)
print("Worksheet for", p_prime.process_id)
print(write_report(p_prime, "table"))

print(f"worst RPN: {p.process_id} = {p.worst_rpn}, "
      f"{p_prime.process_id} = {p_prime.worst_rpn}")

# Cost tells the rest of the story.  A rejected part has to be made again,
# so the expected cost per accepted part is the attempt cost scaled up by
# the rejection rate.
for process, sheet in ((roll.process_p, p), (roll.process_p_prime, p_prime)):
    econ = economic_report(process, sheet, roll.recipe, roll.catalog, cfg)
    print(f"{process.id}: attempt {econ.attempt_cost:.2f}, "
          f"rejection {econ.rejection_rate:.4%}, escape {econ.escape_rate:.4%}, "
          f"per accepted part {econ.expected_cost_per_accepted:.4f}, "
          f"within budget: {econ.within_budget}")
