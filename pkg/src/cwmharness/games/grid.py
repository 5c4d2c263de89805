"""Grid line-forming games: Tic-Tac-Toe and its generalized family.

Two players alternately claim empty cells on a rows x cols board; the
first to own line_length consecutive cells in a row, column or diagonal
wins. Actions are "r,c" strings with zero-based coordinates. Perfect
information: both players observe the whole board.
"""

from __future__ import annotations

from ..gamespec import TERMINAL_PLAYER

EMPTY = -1

_DIRECTIONS = ((0, 1), (1, 0), (1, 1), (1, -1))


class GridLineGame:
    """Engine for the generalized rows x cols, line_length-in-a-row game."""

    def __init__(self, rows: int = 6, cols: int = 6, line_length: int = 4):
        if rows < 1 or cols < 1:
            raise ValueError("board must have at least one cell")
        if line_length < 1 or line_length > max(rows, cols):
            raise ValueError("line_length must fit on the board")
        self.rows = rows
        self.cols = cols
        self.line_length = line_length

    # -- engine contract --------------------------------------------------

    def get_initial_state(self) -> dict:
        """Returns the empty-board state with player 0 to move."""
        return {
            "board": [[EMPTY] * self.cols for _ in range(self.rows)],
            "to_move": 0,
            "moves": 0,
            "winner": None,
        }

    def apply_action(self, state: dict, action: str) -> dict:
        """Returns the successor state; never touches the input state."""
        row, col = self._parse_action(action)
        if self._is_terminal(state):
            raise ValueError("cannot act in a terminal state")
        if state["board"][row][col] != EMPTY:
            raise ValueError(f"cell already taken: {action}")
        player = state["to_move"]
        board = [list(r) for r in state["board"]]
        board[row][col] = player
        winner = player if self._completes_line(board, row, col, player) else None
        return {
            "board": board,
            "to_move": 1 - player,
            "moves": state["moves"] + 1,
            "winner": winner,
        }

    def get_current_player(self, state: dict) -> int:
        if self._is_terminal(state):
            return TERMINAL_PLAYER
        return state["to_move"]

    def get_player_name(self, player_id: int) -> str:
        return f"Player {player_id}"

    def get_rewards(self, state: dict) -> list[float]:
        winner = state["winner"]
        if winner is None:
            return [0.0, 0.0]
        return [1.0, -1.0] if winner == 0 else [-1.0, 1.0]

    def get_legal_actions(self, state: dict) -> list[str]:
        if self._is_terminal(state):
            return []
        return [
            f"{r},{c}"
            for r in range(self.rows)
            for c in range(self.cols)
            if state["board"][r][c] == EMPTY
        ]

    def get_observations(self, state: dict) -> list[dict]:
        """Both players see the same board."""
        return [self._observation(state), self._observation(state)]

    # -- internals --------------------------------------------------------

    def _observation(self, state: dict) -> dict:
        return {
            "board": [list(r) for r in state["board"]],
            "current_player": self.get_current_player(state),
        }

    def _parse_action(self, action: str) -> tuple[int, int]:
        try:
            row_text, col_text = action.split(",")
            row, col = int(row_text), int(col_text)
        except (ValueError, AttributeError) as exc:
            raise ValueError(f"malformed action: {action!r}") from exc
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise ValueError(f"action off the board: {action!r}")
        return row, col

    def _is_terminal(self, state: dict) -> bool:
        return state["winner"] is not None or state["moves"] >= self.rows * self.cols

    def _completes_line(self, board: list[list[int]], row: int, col: int, player: int) -> bool:
        for dr, dc in _DIRECTIONS:
            count = 1
            for sign in (1, -1):
                r, c = row + sign * dr, col + sign * dc
                while 0 <= r < self.rows and 0 <= c < self.cols and board[r][c] == player:
                    count += 1
                    r += sign * dr
                    c += sign * dc
            if count >= self.line_length:
                return True
        return False


class TicTacToe(GridLineGame):
    """The classic 3x3, three-in-a-row instance."""

    def __init__(self, rows: int = 3, cols: int = 3, line_length: int = 3):
        super().__init__(rows, cols, line_length)
