# Type definitions
Action = str
State = dict

# The shared utility header is missing; this module-level use of `random`
# fails at load time unless the adapter injects the preamble.
RNG = random.Random(0)
DECK = deepcopy(["J", "Q", "K"])


def get_initial_state() -> State:
    return {"cards": list(DECK), "n": 0}


def apply_action(state, action):
    new = deepcopy(state)
    new["n"] += 1
    return new


def get_current_player(state):
    return -4 if state["n"] >= 2 else state["n"] % 2


def get_player_name(player_id):
    return f"Player {player_id}"


def get_rewards(state):
    return [0.0, 0.0]


def get_legal_actions(state):
    return [] if state["n"] >= 2 else ["tick"]


def get_observations(state):
    return [dict(state), dict(state)]
