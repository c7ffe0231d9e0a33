"""
Checking the closed-form rates by simulation
============================================

The economic report uses closed-form rejection and escape rates that
assume failure modes fire independently.  Simulating parts one at a time
gives an independent estimate, and a large gap between the two points at
a modelling or data error.
"""

import numpy as np

from autopfmea import analyze_process, compare_with_analytic, economic_report, simulate
from autopfmea.datasets import load_roll_example

roll = load_roll_example()
process = roll.process_p_prime
sheet = analyze_process(process, roll.recipe, roll.catalog, roll.config)
econ = economic_report(process, sheet, roll.recipe, roll.catalog, roll.config)

stats = simulate(process, sheet, roll.catalog, roll.config, items=1_000_000, seed=7)
report = compare_with_analytic(stats, econ)
for check in report.checks:
    verdict = "FLAG" if check.flagged else "ok"
    print(f"{check.name:15s} analytic {check.analytic:.6f}  simulated {check.empirical:.6f}"
          f"  ({abs(check.empirical - check.analytic) / check.sigma:.2f} sigma)  {verdict}")

# The same seed always reproduces the same counts.
again = simulate(process, sheet, roll.catalog, roll.config, items=1_000_000, seed=7)
print("reproducible:", again == stats)

# Across seeds the simulated rejection rate scatters around the analytic
# value with roughly the binomial spread.
rates = np.array([simulate(process, sheet, roll.catalog, roll.config, 200_000, seed).rejection_rate
                  for seed in range(20)])
sigma = np.sqrt(econ.rejection_rate * (1 - econ.rejection_rate) / 200_000)
print(f"20 seeds: mean {rates.mean():.6f}, sd {rates.std(ddof=1):.6f}, "
      f"binomial sigma {sigma:.6f}, analytic {econ.rejection_rate:.6f}")
