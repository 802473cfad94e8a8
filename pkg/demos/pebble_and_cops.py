# %% [markdown]
# # Pebble game, Cops&Robber and the Duplicator strategy
#
# The pebble game is solved as a greatest fixpoint over positions. On CFI
# pairs the outcome tracks the Cops&Robber game on the underlying graph,
# and the Robber's safe positions drive an explicit Duplicator strategy.

# %%
import random

from polyclosure.cfi import even_cfi, odd_cfi
from polyclosure.families import nowhere
from polyclosure.games import (GirthStrategy, PGConfig, adversarial_verify,
                               solve_cr_game, solve_cr_game_minimax, solve_pebble_game,
                               switch_set_bijections)
from polyclosure.graphs import complete_graph, generate_regular, girth

G = complete_graph(4)
even, odd = even_cfi(G).structure, odd_cfi(G).structure

# %% [markdown]
# With bijections restricted to switch sets, a single pebble is not
# enough for Spoiler to expose the twist on K4.

# %%
cfg = PGConfig(1, nowhere(), bijections=tuple(switch_set_bijections(len(G.edges))))
res = solve_pebble_game(even, odd, cfg)
print(res.winner, res.region_size())

# %% [markdown]
# The flow-based Cops&Robber solver and the plain minimax solver agree.

# %%
for k in (1, 2, 3):
    sol = solve_cr_game(G, k)
    print(k, sol.safe_vertices(), set(sol.safe) == set(solve_cr_game_minimax(G, k)))

# %% [markdown]
# The Robber's safe set certifies a Duplicator strategy. Every Spoiler
# continuation for three rounds is replayed and checked.

# %%
sol = solve_cr_game(G, 1)
report = adversarial_verify(G, 1, 3, sol)
print(report.ok, report.states, report.steps)

# %% [markdown]
# On a cubic graph of girth 7 the Robber stays far from the cops with no
# table. With distance 1 the escape move exists whenever no new cop is
# announced, and every endpoint satisfies the invariant for the new cops.

# %%
H = generate_regular(3, 30, 7, seed=0)
print(H.n, girth(H))
strategy = GirthStrategy(H, 1)
rng = random.Random(0)
F = frozenset({rng.randrange(len(H.edges))})
u = next(v for v in range(H.n) if strategy.is_safe(F, v))
paths = strategy.escape_paths(F, u, frozenset())
print(u, len(paths), all(strategy.is_safe(frozenset(), p[-1]) for p in paths))
