# %% [markdown]
# # From a universe to an upgrade
#
# Three packages: `p@1` and `q@1` are installed, `p@2` is wanted, and
# `q@1` refuses to live next to `p@2`.  We follow the request through every
# stage: pseudo-Boolean encoding, weighted CNF, core-guided search, decoding.

# %%
from cudfopt import brute_force, parse_universe, solve
from cudfopt.pbenc import encode, write_opb
from cudfopt.wcnf import pb_to_wcnf, write_wcnf

TEXT = """\
package: p
version: 1
conflicts: p
installed: true

package: p
version: 2
conflicts: p

package: q
version: 1
conflicts: p (= 2)
installed: true

request:
install: p (= 2)
"""
universe, request = parse_universe(TEXT)
print(universe.rule_count, "rules,", universe.installed_count, "installed")

# %% [markdown]
# ## Pseudo-Boolean stage
#
# Package variables come first, then Root and Noop, then one indicator per
# (measure, name).  The objective weights removals by `B = names + 1` so a
# single removal outweighs every possible change.

# %%
problem = encode(universe, request, "paranoid")
print(write_opb(problem))

# %% [markdown]
# ## Weighted CNF stage
#
# Clauses stay hard, the at-most-one over the versions of `p` becomes
# `m * ceil(log2 m)` binary clauses over a fresh bit, and each objective term
# becomes a unit soft clause.

# %%
print(write_wcnf(pb_to_wcnf(problem)))

# %%
solution = solve(universe, request, "paranoid")
print(solution.status, solution.vector)
print("added:  ", sorted(map(str, solution.added)))
print("removed:", sorted(map(str, solution.removed)))

# %% [markdown]
# The exhaustive oracle agrees: one removal (`q`), two changed names.

# %%
print(brute_force(universe, request, "paranoid").vector)
