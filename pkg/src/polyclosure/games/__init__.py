"""Game solvers: pebble game, Cops&Robber, Duplicator strategy, colour refinement."""
from .copsrobber import (CRSolution, GirthStrategy, invariant_star, robber_girth_move,
                         solve_cr_game, solve_cr_game_minimax)
from .duplicator import (CFIGame, DuplicatorState, adversarial_verify,
                         duplicator_strategy_step, random_play)
from .pebble import LEFT, RIGHT, PGConfig, PGResult, solve_pebble_game, switch_set_bijections
from .refinement import color_refinement, distinguishes, stable_partition

__all__ = [
    "CRSolution", "GirthStrategy", "invariant_star", "robber_girth_move", "solve_cr_game",
    "solve_cr_game_minimax", "CFIGame", "DuplicatorState", "adversarial_verify",
    "duplicator_strategy_step", "random_play", "LEFT", "RIGHT", "PGConfig", "PGResult",
    "solve_pebble_game", "switch_set_bijections", "color_refinement", "distinguishes",
    "stable_partition",
]
