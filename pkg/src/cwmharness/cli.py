"""Command-line surface: verify, reward, serve and play.

Exit codes report harness health only: 0 means the harness ran (however
badly the candidate scored), 2 is a usage error, 3 a harness fault.
Candidate faults are data in the reports, never nonzero exits, so
training loops can tell "bad code" from "broken harness".
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

from .fixtures import builtin_scenarios_path
from .games import BUILTIN_CANDIDATES, GAME_NAMES, builtin_candidate, make_game
from .gamespec import GameSpec, derive_seed
from .host import DEFAULT_CALL_TIMEOUT, default_adapter_command, spawn
from .match import parse_agent_spec, play_match, validate_agent_for_game
from .report import build_report, serialize_report
from .reward import breakdown_from_evaluation, compute_reward, evaluate
from .session import SessionFactory, SpawnError
from .tiers.scenarios import ScenarioFile, ScenarioParseError, load_scenario_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAULT = 3

GAME_FILE_SUFFIX = ".game.json"
SCENARIO_FILE_SUFFIX = ".scenarios.json"


class UsageError(Exception):
    """Bad flags or arguments; exits with code 2."""


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpawnError as exc:
        print(f"harness fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    except Exception:  # noqa: BLE001 - anything unexpected is a harness fault
        traceback.print_exc()
        return EXIT_FAULT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cwm",
        description="Verify, score and play candidate game-engine implementations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run all verification tiers and report the mean")
    _common_flags(verify)
    verify.add_argument("--fuzz-n", type=int, default=100, help="fuzzing trajectories")
    verify.add_argument("--info-n", type=int, default=100, help="information probes")
    verify.set_defaults(handler=cmd_verify)

    reward = sub.add_parser("reward", help="compute the gated training reward")
    _common_flags(reward)
    reward.add_argument("--n", type=int, default=20, help="trajectories/probes per tier")
    reward.add_argument("--timeout", type=float, default=60.0, help="whole-run timeout (s)")
    reward.set_defaults(handler=cmd_reward)

    serve = sub.add_parser("serve", help="long-running reward service on stdio")
    serve.add_argument("--games-dir", required=True, help="directory of *.game.json specs")
    serve.add_argument("--scenarios-dir", required=True, help="directory of *.scenarios.json")
    serve.add_argument("--parallel", type=int, default=1, help="max concurrent evaluations")
    serve.add_argument("--n", type=int, default=20)
    serve.add_argument("--timeout", type=float, default=60.0)
    serve.add_argument("--seed", type=int, default=42)
    serve.set_defaults(handler=cmd_serve)

    play = sub.add_parser("play", help="play a match between two agents")
    play.add_argument("--game", required=True)
    play.add_argument("--candidate", required=True)
    play.add_argument("--agent0", required=True, help="random | mcts:sims=N[,c=X] | ismcts:sims=N")
    play.add_argument("--agent1", required=True)
    play.add_argument("--games", type=int, default=100)
    play.add_argument(
        "--game-param",
        dest="game_params",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="game parameter override, e.g. board_rows=4 (repeatable)",
    )
    play.add_argument("--seed", type=int, default=0)
    play.add_argument("--json", dest="json_out", default=None, help="write the match report here")
    play.set_defaults(handler=cmd_play)

    return parser


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--game", required=True, help=f"one of: {', '.join(GAME_NAMES)}")
    sub.add_argument(
        "--candidate",
        required=True,
        help="builtin:NAME for a shipped engine, or a path to a candidate file "
        "hosted by the adapter (CWM_ADAPTER overrides the adapter command)",
    )
    sub.add_argument("--scenarios", default=None, help="scenario file (default: shipped fixture)")
    sub.add_argument(
        "--game-param",
        dest="game_params",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="game parameter override, e.g. board_rows=4 (repeatable)",
    )
    sub.add_argument("--seed", type=int, default=42)
    sub.add_argument("--json", dest="json_out", default=None, help="write the JSON report here")


# -- resolution helpers -----------------------------------------------------


def _parse_game_params(pairs: list[str]) -> dict:
    params: dict = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"bad --game-param {pair!r}; expected KEY=VALUE")
        try:
            params[key] = int(value)
        except ValueError:
            raise UsageError(f"bad --game-param {pair!r}; value must be an integer") from None
    return params


def _resolve_spec(game: str, params: Optional[dict] = None) -> GameSpec:
    try:
        return make_game(game, params=params).spec
    except KeyError:
        raise UsageError(
            f"unknown game {game!r}; known games: {', '.join(GAME_NAMES)}"
        ) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _resolve_candidate(
    text: str, game: str, seed: int, params: Optional[dict] = None
) -> tuple[dict, SessionFactory]:
    if text.startswith("builtin:"):
        name = text.split(":", 1)[1]
        try:
            base_game, factory = builtin_candidate(
                name, chance_seed=derive_seed(seed, "chance"), params=params
            )
        except KeyError:
            raise UsageError(
                f"unknown builtin candidate {name!r}; "
                f"known: {', '.join(BUILTIN_CANDIDATES)}"
            ) from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if base_game != game:
            raise UsageError(
                f"builtin candidate {name!r} implements {base_game!r}, not {game!r}"
            )
        return {"kind": "builtin", "name": name}, factory

    path = str(Path(text))
    command = default_adapter_command()

    def factory() -> Any:
        return spawn(command, path, per_call_timeout=DEFAULT_CALL_TIMEOUT)

    return {"kind": "file", "path": path, "adapter": command}, factory


def _resolve_scenarios(path_text: Optional[str], game: str) -> tuple[str, ScenarioFile]:
    if path_text is None:
        builtin = builtin_scenarios_path(game)
        if builtin is None:
            raise UsageError(
                f"no shipped scenario fixture for {game!r}; pass --scenarios PATH"
            )
        path = builtin
    else:
        path = Path(path_text)
        if not path.is_file():
            raise UsageError(f"scenario file not found: {path}")
    try:
        file = load_scenario_file(str(path))
    except ScenarioParseError as exc:
        raise UsageError(f"bad scenario file {path}: {exc}") from exc
    if file.game != game:
        raise UsageError(f"scenario file is for {file.game!r}, not {game!r}")
    return str(path), file


def _write_json(path: Optional[str], text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


# -- subcommands -------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    params = _parse_game_params(args.game_params)
    spec = _resolve_spec(args.game, params)
    scenarios_path, scenarios = _resolve_scenarios(args.scenarios, args.game)
    descriptor, factory = _resolve_candidate(args.candidate, args.game, args.seed, params)

    evaluation = evaluate(
        factory, spec, scenarios, fuzz_n=args.fuzz_n, info_n=args.info_n, seed=args.seed
    )
    breakdown = breakdown_from_evaluation(spec, evaluation)
    report = build_report(
        game=args.game,
        candidate=descriptor,
        config={
            "seed": args.seed,
            "fuzz_n": args.fuzz_n,
            "info_n": args.info_n,
            "scenarios_path": scenarios_path,
        },
        evaluation=evaluation,
        breakdown=breakdown,
    )
    _write_json(args.json_out, serialize_report(report))

    print(f"game: {args.game}  candidate: {args.candidate}")
    for name, tier in evaluation.tiers.items():
        print(f"  {name:<12} {tier.passed}/{tier.total}  score {tier.score:.4f}")
    print(f"evaluate mean: {evaluation.mean:.4f}")
    print(f"gated reward:  {breakdown.reward:.4f}")
    return EXIT_OK


def cmd_reward(args: argparse.Namespace) -> int:
    params = _parse_game_params(args.game_params)
    spec = _resolve_spec(args.game, params)
    _, scenarios = _resolve_scenarios(args.scenarios, args.game)
    _, factory = _resolve_candidate(args.candidate, args.game, args.seed, params)

    breakdown = compute_reward(
        factory, spec, scenarios, n=args.n, timeout_seconds=args.timeout, seed=args.seed
    )
    _write_json(args.json_out, json.dumps(breakdown.to_dict(), sort_keys=True, indent=2) + "\n")
    print(breakdown.reward)
    return EXIT_OK


def cmd_play(args: argparse.Namespace) -> int:
    params = _parse_game_params(args.game_params)
    spec = _resolve_spec(args.game, params)
    descriptor, factory = _resolve_candidate(args.candidate, args.game, args.seed, params)
    try:
        agent0 = parse_agent_spec(args.agent0)
        agent1 = parse_agent_spec(args.agent1)
        validate_agent_for_game(agent0, spec)
        validate_agent_for_game(agent1, spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    report = play_match(factory, spec, agent0, agent1, args.games, seed=args.seed)
    if args.json_out:
        _write_json(args.json_out, json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
    print(
        f"{args.agent0} vs {args.agent1} on {args.game} ({descriptor.get('name', descriptor.get('path'))})"
    )
    print(
        f"  games {report.games_played}/{report.games_requested}"
        f"  W/D/L {report.wins}/{report.draws}/{report.losses}"
    )
    print(
        f"  mean rewards: agent0 {report.mean_rewards[0]:+.4f}, agent1 {report.mean_rewards[1]:+.4f}"
    )
    print(f"  first-mover wins: {report.first_mover_wins}")
    if report.incomplete:
        print(f"  INCOMPLETE: {report.failure}")
    return EXIT_OK


# -- the reward service -------------------------------------------------------


def _load_game_specs(games_dir: str) -> dict[str, GameSpec]:
    """Built-in specs, overlaid with any *.game.json files in games_dir."""
    specs = {name: make_game(name).spec for name in GAME_NAMES}
    root = Path(games_dir)
    if not root.is_dir():
        raise UsageError(f"--games-dir is not a directory: {games_dir}")
    for path in sorted(root.glob(f"*{GAME_FILE_SUFFIX}")):
        doc = json.loads(path.read_text(encoding="utf-8"))
        name = doc.get("name") or path.name[: -len(GAME_FILE_SUFFIX)]
        specs[name] = GameSpec(
            name=name,
            n_players=int(doc.get("n_players", 2)),
            info_kind=doc.get("info_kind", "perfect"),
            chance_action_prefixes=tuple(doc.get("chance_action_prefixes", ("deal:", "chance:"))),
            max_walk_steps=int(doc.get("max_walk_steps", 200)),
        )
    return specs


def _serve_scenarios(scenarios_dir: Path, game: str) -> ScenarioFile:
    path = scenarios_dir / f"{game}{SCENARIO_FILE_SUFFIX}"
    if path.is_file():
        return load_scenario_file(str(path))
    builtin = builtin_scenarios_path(game)
    if builtin is not None:
        return load_scenario_file(str(builtin))
    raise FileNotFoundError(f"no scenario file for game {game!r}")


def cmd_serve(args: argparse.Namespace) -> int:
    if args.parallel < 1:
        raise UsageError("--parallel must be >= 1")
    specs = _load_game_specs(args.games_dir)
    scenarios_dir = Path(args.scenarios_dir)
    if not scenarios_dir.is_dir():
        raise UsageError(f"--scenarios-dir is not a directory: {args.scenarios_dir}")

    write_lock = threading.Lock()

    def respond(payload: dict) -> None:
        with write_lock:
            sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
            sys.stdout.flush()

    def handle(line: str) -> None:
        request_id: Any = None
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request must be a JSON object")
            request_id = request.get("id")
            game = request["game"]
            candidate_path = request["candidate_path"]
        except (ValueError, KeyError) as exc:
            respond({"id": request_id, "error": f"bad request: {exc}"})
            return
        spec = specs.get(game)
        if spec is None:
            respond({"id": request_id, "error": f"unknown game {game!r}"})
            return
        try:
            scenarios = _serve_scenarios(scenarios_dir, game)
        except (FileNotFoundError, ScenarioParseError) as exc:
            respond({"id": request_id, "error": str(exc)})
            return
        command = default_adapter_command()

        def factory() -> Any:
            return spawn(command, str(candidate_path), per_call_timeout=DEFAULT_CALL_TIMEOUT)

        try:
            breakdown = compute_reward(
                factory, spec, scenarios, n=args.n, timeout_seconds=args.timeout, seed=args.seed
            )
        except Exception as exc:  # noqa: BLE001 - keep the service alive
            respond({"id": request_id, "error": f"evaluation failed: {exc}"})
            return
        respond({"id": request_id, "reward": breakdown.reward, "breakdown": breakdown.to_dict()})

    with ThreadPoolExecutor(max_workers=args.parallel) as pool:
        futures = []
        for line in sys.stdin:
            line = line.strip()
            if not line:
                continue
            futures.append(pool.submit(handle, line))
        for future in futures:
            future.result()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
