"""Machine-readable verification reports.

Reports round-trip losslessly through JSON and serialize with sorted keys
so two runs with identical flags and seeds produce byte-identical output
apart from the timing fields, which strip_timings removes for comparison.
The schema ships at docs/report.schema.json.
"""

from __future__ import annotations

import copy
import json
from .reward import EvaluationResult, RewardBreakdown

REPORT_FORMAT_VERSION = 1
HARNESS_VERSION = "0.1.0"


def build_report(
    game: str,
    candidate: dict,
    config: dict,
    evaluation: EvaluationResult,
    breakdown: RewardBreakdown,
) -> dict:
    """Assemble the report dict for one verification run."""
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "harness_version": HARNESS_VERSION,
        "game": game,
        "candidate": candidate,
        "config": config,
        "tiers": {name: report.to_dict() for name, report in evaluation.tiers.items()},
        "evaluate_mean": evaluation.mean,
        "reward_breakdown": breakdown.to_dict(),
        "timings_ms": dict(evaluation.timings_ms),
    }


def serialize_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def parse_report(text: str) -> dict:
    return json.loads(text)


def strip_timings(report: dict) -> dict:
    """A deep copy with every timing field removed, for determinism checks."""
    stripped = copy.deepcopy(report)
    stripped.pop("timings_ms", None)
    return stripped
