"""Verification, fuzzing and reward harness for candidate game engines.

The harness scores implementations of a fixed engine contract
(state transitions, legal actions, rewards, observations, and history
resampling for imperfect-information games) against four tiers of checks,
combines them into a gated composite reward for training loops, and runs
MCTS / ISMCTS over engines that pass, closing the loop from verification
to actual play.
"""

from .canon import CanonicalizationError, canonical_fingerprint, canonicalize_value
from .games import BUILTIN_CANDIDATES, GAME_NAMES, ReferenceGame, builtin_candidate, make_game
from .gamespec import CHANCE_PLAYER, TERMINAL_PLAYER, GameSpec, is_chance_state, is_terminal_player
from .reward import (
    RewardBreakdown,
    breakdown_from_evaluation,
    compute_reward,
    effective_weights,
    evaluate,
    gated_reward,
)
from .session import (
    ApplyResult,
    CandidateCrash,
    FunctionSession,
    Session,
    SessionDead,
    SessionError,
    SessionInfo,
    UnsupportedOperation,
    WalkRecord,
    WalkStep,
)
from .solver import SearchConfig, SearchError, ismcts_choose, mcts_choose
from .stubcheck import detect_stub
from .tiers import TierReport
from .tiers.dynamics import FuzzConfig, run_dynamics
from .tiers.information import ProbeConfig, run_information
from .tiers.scenarios import Scenario, ScenarioFile, parse_scenarios, run_scenarios
from .tiers.static import run_static, static_gate

__version__ = "0.1.0"

__all__ = [
    "ApplyResult",
    "BUILTIN_CANDIDATES",
    "CHANCE_PLAYER",
    "CandidateCrash",
    "CanonicalizationError",
    "FunctionSession",
    "FuzzConfig",
    "GAME_NAMES",
    "GameSpec",
    "ProbeConfig",
    "ReferenceGame",
    "RewardBreakdown",
    "Scenario",
    "ScenarioFile",
    "SearchConfig",
    "SearchError",
    "Session",
    "SessionDead",
    "SessionError",
    "SessionInfo",
    "TERMINAL_PLAYER",
    "TierReport",
    "UnsupportedOperation",
    "WalkRecord",
    "WalkStep",
    "breakdown_from_evaluation",
    "builtin_candidate",
    "canonical_fingerprint",
    "canonicalize_value",
    "compute_reward",
    "detect_stub",
    "effective_weights",
    "evaluate",
    "gated_reward",
    "is_chance_state",
    "is_terminal_player",
    "ismcts_choose",
    "make_game",
    "mcts_choose",
    "parse_scenarios",
    "run_dynamics",
    "run_information",
    "run_scenarios",
    "run_static",
    "static_gate",
]
