# %% [markdown]
# # Structures and partial function families
#
# A structure is a universe `range(n)` with named relations. A partial
# function family is evaluated pointwise on columns of tuples; where it is
# undefined on some column the image tuple is dropped.

# %%
from polyclosure import Structure, Vocabulary
from polyclosure.csp import build_c_ell, build_hypergraph_target
from polyclosure.families import (apply_to_structure, check_invariance, gamma_closure,
                                  is_partial_polymorphism, majority, maltsev, near_unanimity)

vocab = Vocabulary.of(("R", 2))
A = Structure(vocab, 2, {"R": frozenset({(0, 1), (1, 1), (1, 0)})})
print(A.tuples("R"))

# %% [markdown]
# Maltsev maps `(x, x, y)` and `(y, x, x)` to `y`. Applied to the rows
# `(0, 1), (1, 1), (1, 0)` it produces `(0, 0)`, after which the
# relation is full and the closure stops.

# %%
print(apply_to_structure(maltsev(), A).tuples("R"))
closed, trace = gamma_closure(maltsev(), A)
print(closed.tuples("R"), trace)

# %% [markdown]
# Invariance properties of the standard families over small universes.

# %%
for P in (maltsev(), majority(), near_unanimity(4)):
    print(P.name, check_invariance(P, 3).as_dict())

# %% [markdown]
# Parity templates are closed under Maltsev. Hypergraph targets are
# closed under majority, and the two-colouring targets `H^k` under the
# 4-ary near-unanimity family.

# %%
print(is_partial_polymorphism(maltsev(), build_c_ell(3)))
print(is_partial_polymorphism(majority(), build_hypergraph_target(4, 3)))
print(is_partial_polymorphism(near_unanimity(4), build_hypergraph_target(3, 3, 2)))
