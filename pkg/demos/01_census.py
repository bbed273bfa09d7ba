"""
Census of agreements over 29 rounds
===================================

Enumerate every composition of B-C, A-D and A-C stages for a 29-round
game (at most two A-C stages), count those that beat Nash play for both
players, and list the reference figures the computation does not match.
"""

from pd_deposit import REFERENCE_MATRIX, enumerate_census, summary_rows
from pd_deposit.explorer import discrepancies, rows_to_csv

m = REFERENCE_MATRIX
census = enumerate_census(29, m, max_ac=2)

print("compositions enumerated:", census.total_enumerated)
print("effective:", census.effective)
for label, count in census.threshold_counts.items():
    print(f"  both expectations {label}: {count}")

###############################################################################
# The ten compositions used as worked examples. Row (11,17,1) replaces the
# printed (11,17,2), whose counts sum to 30.

examples = [(10, 19, 0), (11, 17, 1), (12, 15, 2), (15, 14, 0), (16, 12, 1),
            (17, 10, 2), (20, 9, 0), (22, 7, 0), (23, 4, 2), (26, 3, 0)]
print()
print(rows_to_csv(summary_rows(examples, m)))

###############################################################################
# Figures that do not reproduce, side by side.

for item in discrepancies(m):
    print(f"{item['item']:<32} reference={item['reference']!s:<12} computed={item['computed']}")
