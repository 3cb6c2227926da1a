"""Hat-guessing games on graphs.

Library surface: game/strategy types and exhaustive verification (core),
closed-form classifications and named games (catalogue), theorem-backed
game transformations (constructors), exhaustive CSP solving and DIMACS
export (solver), and the rook/queen/king-check board games (rookcheck).
"""

from .core import (
    Game, Strategy, Verdict, VerifyResult, VertexTable,
    HatsError, ValidationError, SizeLimitError,
    arrangements, arrangement_to_index, index_to_arrangement,
    build_strategy, complete_game, cycle_game, empty_game, make_game, path_game,
    correct_count, is_precise, subgame, verify_strategy, view_index,
    strategy_from_tables,
)

__all__ = [
    "Game", "Strategy", "Verdict", "VerifyResult", "VertexTable",
    "HatsError", "ValidationError", "SizeLimitError",
    "arrangements", "arrangement_to_index", "index_to_arrangement",
    "build_strategy", "complete_game", "cycle_game", "empty_game", "make_game",
    "path_game", "correct_count", "is_precise", "subgame", "verify_strategy",
    "view_index", "strategy_from_tables",
]

__version__ = "0.1.0"
