# %% [markdown]
# # Stopping early
#
# Both engines report every improving model.  With a short budget the run
# stops with the best profile so far, and the sequence of vectors it
# reported never goes up.

# %%
from cudfopt.generate import generate
from cudfopt.model import validate_profile
from cudfopt.pipeline import solve

universe, request = generate(
    8, 700, 5, dep_density=0.45, conflict_density=0.05, installed_fraction=0.5, absent_fraction=0.0
)
print(universe.rule_count, "rules")

# %%
for budget in (0.5, 1.0, 3.0, 10.0):
    seen = []
    sol = solve(universe, request, "trendy", timeout=budget, progress=seen.append)
    ok = sol.profile is not None and not validate_profile(universe, request, sol.profile)
    print(f"budget {budget:5.1f}s  {sol.status:10}  final {sol.vector}  valid={ok}")
    for vec in seen:
        print("        ", vec)
