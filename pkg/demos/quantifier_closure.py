# %% [markdown]
# # Closure of structure classes
#
# A class of structures is closed under a family when adding the one-step
# image of the family never leaves the class. These checks run over a
# finite census of small structures, so a positive verdict is evidence
# rather than proof. A negative verdict comes with a counterexample.

# %%
from polyclosure.csp import build_c_ell, build_hypergraph_target
from polyclosure.families import majority, near_unanimity
from polyclosure.quantifiers import (csp_class, exhaustive_census, gamma_equivalence_check,
                                     imhof_star, is_downwards_monotone, is_p_closed)

C3 = build_c_ell(3)
K = csp_class(C3)
census = exhaustive_census(C3.vocab, 2)
print(census.description, len(census))

# %%
print(is_downwards_monotone(K, census).as_dict()["holds"])
print(is_p_closed(K, near_unanimity(4), census).as_dict()["holds"])
print(gamma_equivalence_check(K, near_unanimity(4), census).as_dict()["holds"])

# %% [markdown]
# Majority does not preserve the parity template, so the class is not
# majority-closed and the search returns a witness.

# %%
v = is_p_closed(K, majority(), census)
print(v.holds, v.counterexample)

# %% [markdown]
# The star transform pairs every relation with a complement symbol
# `co_R`. A member keeps each pair disjoint, and it either covers all
# tuples and lies in the original class or leaves some tuple uncovered.

# %%
H = build_hypergraph_target(3, 3, 2)
star = imhof_star(csp_class(H))
print(star.vocab.names)
small = exhaustive_census(star.vocab, 1)
print(sum(A in star for A in small), "of", len(small))
