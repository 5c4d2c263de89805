"""Tier aggregation: the evaluation mean and the gated composite reward.

Two scorers are deliberately kept distinct. evaluate() runs every
applicable tier unconditionally and reports the unweighted mean, which is
the reporting path. compute_reward() is the training-side scorer: tiers
are gated (static must pass structurally before dynamics, dynamics must
score at least 0.5 before the semantic tiers), a stubbed resampler
forfeits the information weight without renormalization, and the whole
pipeline is bounded by a wall-clock timeout that yields reward 0.0.

All arithmetic is exact: weights and scores are rationals internally and
only become floats at the reporting boundary.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .gamespec import GameSpec, derive_seed
from .session import Session, SessionError, SessionFactory, SessionInfo
from .stubcheck import detect_stub
from .tiers import TierReport
from .tiers.dynamics import FuzzConfig, run_dynamics
from .tiers.information import ProbeConfig, run_information
from .tiers.scenarios import ScenarioFile, run_scenarios
from .tiers.static import run_static, static_gate

TIER_WEIGHTS: dict[str, Fraction] = {
    "static": Fraction(3, 20),  # 0.15
    "dynamics": Fraction(1, 4),  # 0.25
    "scenarios": Fraction(3, 10),  # 0.30
    "information": Fraction(3, 10),  # 0.30
}

DYNAMICS_GATE_THRESHOLD = Fraction(1, 2)

Number = Union[int, float, Fraction]


def effective_weights(spec: GameSpec) -> dict[str, Fraction]:
    """Per-tier weights; renormalized when the information tier is skipped.

    Imperfect-information games use the published weights as-is. Perfect-
    information games drop the information tier and divide the remaining
    three weights by 0.70, so they always sum to exactly 1.
    """
    if spec.imperfect:
        return dict(TIER_WEIGHTS)
    remaining = Fraction(1) - TIER_WEIGHTS["information"]
    return {
        tier: TIER_WEIGHTS[tier] / remaining
        for tier in ("static", "dynamics", "scenarios")
    }


@dataclass
class RewardBreakdown:
    """Everything that went into (or was withheld from) one reward."""

    reward: float = 0.0
    tier_scores: dict = field(default_factory=dict)  # only tiers the gating counted
    weights_used: dict = field(default_factory=dict)
    gates: dict = field(default_factory=lambda: {"static_continue": False, "dynamics_gate": False})
    stub: bool = False
    timed_out: bool = False
    load_ok: bool = True
    load_error: Optional[str] = None
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "reward": self.reward,
            "tier_scores": {k: float(v) for k, v in self.tier_scores.items()},
            "weights_used": {k: float(v) for k, v in self.weights_used.items()},
            "gates": dict(self.gates),
            "stub": self.stub,
            "timed_out": self.timed_out,
            "load_ok": self.load_ok,
            "load_error": self.load_error,
            "diagnostics": list(self.diagnostics),
        }


def gated_reward(
    spec: GameSpec,
    static_score: Number,
    dynamics_score: Optional[Number] = None,
    scenarios_score: Optional[Number] = None,
    information_score: Optional[Number] = None,
    static_continue: bool = True,
    stub: bool = False,
) -> RewardBreakdown:
    """Apply the gated weighted-sum arithmetic to already-known tier scores.

    Scores for tiers the gates cut off may be omitted; they contribute
    nothing and do not appear in the breakdown's tier_scores.
    """
    weights = effective_weights(spec)
    s_static = _fraction(static_score)
    breakdown = RewardBreakdown(weights_used=dict(weights))
    breakdown.tier_scores["static"] = s_static
    total = s_static * weights["static"]
    breakdown.gates["static_continue"] = static_continue

    if static_continue and dynamics_score is not None:
        s_dyn = _fraction(dynamics_score)
        breakdown.tier_scores["dynamics"] = s_dyn
        total += s_dyn * weights["dynamics"]
        if s_dyn >= DYNAMICS_GATE_THRESHOLD:
            breakdown.gates["dynamics_gate"] = True
            if scenarios_score is not None:
                s_scen = _fraction(scenarios_score)
                breakdown.tier_scores["scenarios"] = s_scen
                total += s_scen * weights["scenarios"]
            if spec.imperfect:
                breakdown.stub = stub
                if not stub and information_score is not None:
                    s_info = _fraction(information_score)
                    breakdown.tier_scores["information"] = s_info
                    total += s_info * weights["information"]

    breakdown.reward = float(total)
    breakdown.tier_scores = {k: float(v) for k, v in breakdown.tier_scores.items()}
    breakdown.weights_used = {k: float(v) for k, v in breakdown.weights_used.items()}
    return breakdown


def _fraction(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass
class EvaluationResult:
    """Per-tier reports plus the unweighted mean, the reporting-path score."""

    tiers: dict  # tier name -> TierReport, in run order
    mean: float
    session_info: SessionInfo
    stub: bool
    timings_ms: dict = field(default_factory=dict)

    def mean_fraction(self) -> Fraction:
        scores = [report.score_fraction() for report in self.tiers.values()]
        if not scores:
            return Fraction(0)
        return sum(scores, Fraction(0)) / len(scores)


def evaluate(
    candidate: SessionFactory,
    spec: GameSpec,
    scenarios: ScenarioFile,
    fuzz_n: int = 100,
    info_n: int = 100,
    seed: int = 42,
) -> EvaluationResult:
    """Run every applicable tier unconditionally and average the scores."""
    timings: dict[str, float] = {}
    started = time.perf_counter()
    session = candidate()
    try:
        info = _session_info(session)
        static_report = run_static(session)
    finally:
        session.close()
    timings["static"] = _elapsed_ms(started)

    tiers: dict[str, TierReport] = {"static": static_report}
    fuzz_cfg = FuzzConfig(
        n_trajectories=fuzz_n,
        max_walk_steps=spec.max_walk_steps,
        rng_seed=derive_seed(seed, "dynamics"),
    )
    started = time.perf_counter()
    tiers["dynamics"] = run_dynamics(candidate, fuzz_cfg, spec)
    timings["dynamics"] = _elapsed_ms(started)

    started = time.perf_counter()
    tiers["scenarios"] = run_scenarios(candidate, scenarios)
    timings["scenarios"] = _elapsed_ms(started)

    stub = False
    if spec.imperfect:
        probe_cfg = ProbeConfig(n_probes=info_n, rng_seed=derive_seed(seed, "information"))
        started = time.perf_counter()
        tiers["information"] = run_information(candidate, probe_cfg, spec)
        timings["information"] = _elapsed_ms(started)
        stub = detect_stub(info.resample_source)

    timings["total"] = sum(timings.values())
    result = EvaluationResult(
        tiers=tiers, mean=0.0, session_info=info, stub=stub, timings_ms=timings
    )
    result.mean = float(result.mean_fraction())
    return result


def _elapsed_ms(started: float) -> float:
    return round((time.perf_counter() - started) * 1000.0, 3)


def breakdown_from_evaluation(spec: GameSpec, result: EvaluationResult) -> RewardBreakdown:
    """Derive the gated reward from an ungated evaluation's tier reports."""
    static_report = result.tiers["static"]
    breakdown = gated_reward(
        spec,
        static_score=static_report.score_fraction(),
        dynamics_score=_tier_score(result, "dynamics"),
        scenarios_score=_tier_score(result, "scenarios"),
        information_score=_tier_score(result, "information"),
        static_continue=static_gate(static_report),
        stub=result.stub,
    )
    breakdown.load_ok = result.session_info.load_ok
    breakdown.load_error = result.session_info.load_error
    if not result.session_info.load_ok:
        breakdown.reward = 0.0
        breakdown.tier_scores = {}
        breakdown.gates = {"static_continue": False, "dynamics_gate": False}
    return breakdown


def _tier_score(result: EvaluationResult, tier: str) -> Optional[Fraction]:
    report = result.tiers.get(tier)
    return report.score_fraction() if report is not None else None


def _session_info(session: Session) -> SessionInfo:
    try:
        return session.info()
    except SessionError as exc:
        return SessionInfo(api_present={}, load_ok=False, load_error=str(exc))


class _TrackingFactory:
    """Session factory wrapper that remembers every session it produced."""

    def __init__(self, factory: SessionFactory):
        self._factory = factory
        self._lock = threading.Lock()
        self.sessions: list[Session] = []

    def __call__(self) -> Session:
        session = self._factory()
        with self._lock:
            self.sessions.append(session)
        return session

    def close_all(self) -> None:
        with self._lock:
            sessions = list(self.sessions)
        for session in sessions:
            try:
                session.close()
            except Exception:  # noqa: BLE001 - best-effort teardown
                pass


def compute_reward(
    candidate: SessionFactory,
    spec: GameSpec,
    scenarios: ScenarioFile,
    n: int = 20,
    timeout_seconds: float = 60.0,
    seed: int = 42,
) -> RewardBreakdown:
    """Gated composite reward with wall-clock timeout semantics.

    A candidate that hangs anywhere in the pipeline yields reward 0.0 with
    timed_out set; its sessions are killed on expiry.
    """
    factory = _TrackingFactory(candidate)
    box: dict[str, RewardBreakdown] = {}

    def work() -> None:
        try:
            box["result"] = _reward_pipeline(factory, spec, scenarios, n, seed)
        except Exception as exc:  # noqa: BLE001 - surfaced as a harness fault below
            box["error"] = exc  # type: ignore[assignment]

    worker = threading.Thread(target=work, daemon=True)
    worker.start()
    worker.join(timeout_seconds)
    if worker.is_alive():
        factory.close_all()
        worker.join(2.0)
        return RewardBreakdown(
            reward=0.0,
            weights_used={k: float(v) for k, v in effective_weights(spec).items()},
            timed_out=True,
            diagnostics=[f"evaluation exceeded {timeout_seconds}s and was aborted"],
        )
    factory.close_all()
    if "error" in box:
        raise box["error"]  # type: ignore[misc]
    return box["result"]


def _reward_pipeline(
    factory: _TrackingFactory,
    spec: GameSpec,
    scenarios: ScenarioFile,
    n: int,
    seed: int,
) -> RewardBreakdown:
    session = factory()
    try:
        info = _session_info(session)
        if not info.load_ok:
            breakdown = RewardBreakdown(
                reward=0.0,
                weights_used={k: float(v) for k, v in effective_weights(spec).items()},
                load_ok=False,
                load_error=info.load_error,
                diagnostics=["load failed; reward is 0.0"],
            )
            return breakdown
        static_report = run_static(session)
    finally:
        session.close()

    if not static_gate(static_report):
        return gated_reward(spec, static_report.score_fraction(), static_continue=False)

    fuzz_cfg = FuzzConfig(
        n_trajectories=n,
        max_walk_steps=spec.max_walk_steps,
        rng_seed=derive_seed(seed, "dynamics"),
    )
    dynamics_report = run_dynamics(factory, fuzz_cfg, spec)
    if dynamics_report.score_fraction() < DYNAMICS_GATE_THRESHOLD:
        return gated_reward(
            spec,
            static_report.score_fraction(),
            dynamics_score=dynamics_report.score_fraction(),
        )

    scenarios_report = run_scenarios(factory, scenarios)
    information_score: Optional[Fraction] = None
    stub = False
    if spec.imperfect:
        stub = detect_stub(info.resample_source)
        if not stub:
            probe_cfg = ProbeConfig(n_probes=n, rng_seed=derive_seed(seed, "information"))
            information_score = run_information(factory, probe_cfg, spec).score_fraction()

    return gated_reward(
        spec,
        static_report.score_fraction(),
        dynamics_score=dynamics_report.score_fraction(),
        scenarios_score=scenarios_report.score_fraction(),
        information_score=information_score,
        stub=stub,
    )
