# %% [markdown]
# # Survey of universal inequalities
#
# Every universal inequality is evaluated on exact spectra for k = 1..100.
# The table lists, per inequality, how many cases were checked and the
# smallest relative slack seen.  Small slack means the bound is nearly
# sharp for that shape.

# %%
import math
from collections import defaultdict

from spectral_gaps import bounds
from spectral_gaps.oracles import box_spectrum, disk_spectrum, rectangle_spectrum

spectra = {"square": rectangle_spectrum(1, 1, 102),
           "rectangle 2x1": rectangle_spectrum(2, 1, 102),
           "cube": box_spectrum(1, 1, 1, 102),
           "disk": disk_spectrum(1.0, 102)}

# %%
for name, spectrum in spectra.items():
    stats = defaultdict(lambda: [0, math.inf])
    for check in bounds.check_all(spectrum, which="all"):
        if check.status not in ("ok", "violated"):
            continue
        entry = stats[check.inequality_id]
        entry[0] += 1
        if check.rhs:
            entry[1] = min(entry[1], check.slack / abs(check.rhs))
    print(name)
    for ident, (count, slack) in sorted(stats.items()):
        print(f"  {ident:<25s} {count:4d} cases  min rel slack {slack:.4f}")

# %% [markdown]
# The chain quadratic_sum => mean_ratio => hile_protter => thompson shows up as
# increasing slack down the chain.
