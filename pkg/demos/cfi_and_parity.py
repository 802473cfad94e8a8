# %% [markdown]
# # CFI structures as parity instances
#
# Each edge `e` of a regular graph contributes two elements `2e` and
# `2e + 1`. A vertex gadget lists the tuples over its incident edges with
# a prescribed parity. Twisting an odd number of vertices makes the
# resulting XOR system unsatisfiable.

# %%
from polyclosure.cfi import (SwitchSet, all_switch_sets, even_cfi, is_automorphism, odd_cfi,
                             switch_along_path)
from polyclosure.csp import build_c_ell, solve_csp, solve_xor, structure_to_xor
from polyclosure.graphs import complete_graph

G = complete_graph(4)
even, odd = even_cfi(G), odd_cfi(G)
print(even.structure.n, len(even.structure.tuples("R0")), len(even.structure.tuples("R1")))

# %% [markdown]
# Both instances map into the parity template of degree 3 exactly when
# their XOR systems are solvable.

# %%
C3 = build_c_ell(3)
for inst in (even, odd):
    xor = structure_to_xor(inst.structure)
    print(solve_xor(xor) is not None, solve_csp(inst.structure, C3) is not None)

# %% [markdown]
# A switch set flips both elements of each chosen edge. It is an
# automorphism of the even structure exactly when every vertex sees an
# even number of switched edges.

# %%
good = [S for S in all_switch_sets(G) if is_automorphism(S, even)]
print(len(good), "of", 2 ** len(G.edges))
print(all(S.is_good() for S in good))

# %% [markdown]
# Switching along a path moves the odd vertices to its endpoints. This is
# how the twist is carried around the graph.

# %%
S = switch_along_path(SwitchSet.identity(G), (0, 1, 2))
print(S.to_list(), sorted(S.odd_set()), S.twist())
