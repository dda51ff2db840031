"""User feedback and scoring-system updates.

After a round's content delivery, the winner's performance over the
requested tasks is distilled into a report (objective content quality plus
a noisy subjective acceptance signal). Each accepted report moves the
owner's feedback multiplier toward a bounded target via an exponential
moving average and is appended to the scoring system's history.

History persistence uses a one-line JSON header (weights and multiplier
state) followed by one JSON record per report, so ledgers stay
append-friendly and diff-able.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from .market import (
    AuctionOutcome,
    FeedbackReport,
    ModelProfile,
    ScoringSystem,
    TaskRequestSet,
)

# Half-width of the uniform noise separating subjective acceptance from
# measured quality.
ACCEPTANCE_NOISE = 0.1

_HISTORY_FORMAT = "gms-scoring-history"
_HISTORY_VERSION = 1


class HistoryLoadError(ValueError):
    """A scoring-history file could not be parsed; the message names the line."""


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


def synthesize_feedback(
    outcome: AuctionOutcome,
    winner_profile: ModelProfile,
    requests: TaskRequestSet,
    rng: np.random.Generator,
    round_index: int = 0,
) -> FeedbackReport | None:
    """Build the round's feedback report for the winning model.

    Content quality is the mean execution value of the winner's
    capabilities over the requested tasks (0.0 when it covers none);
    user acceptance perturbs that by uniform noise in
    [-ACCEPTANCE_NOISE, +ACCEPTANCE_NOISE]. Both are clamped to [0, 1].
    Returns None when the round had no winner.
    """
    if outcome.winner is None:
        return None
    if winner_profile.owner_id != outcome.winner:
        raise ValueError(
            f"profile belongs to owner {winner_profile.owner_id}, "
            f"but the outcome's winner is {outcome.winner}"
        )
    covered = [
        value for task, value in winner_profile.capabilities.items() if task in requests
    ]
    quality = _clamp(sum(covered) / len(covered) if covered else 0.0, 0.0, 1.0)
    noise = float(rng.uniform(-ACCEPTANCE_NOISE, ACCEPTANCE_NOISE))
    acceptance = _clamp(quality + noise, 0.0, 1.0)
    return FeedbackReport(
        owner_id=outcome.winner,
        round_index=round_index,
        user_acceptance=acceptance,
        content_quality=quality,
    )


def update_scoring(
    scoring: ScoringSystem,
    report: FeedbackReport,
    subjective_weight: float = 0.5,
) -> ScoringSystem:
    """Fold one report into the scoring system, returning a new value.

    The report is appended to the history and the owner's multiplier moves
    by an EMA step toward ``floor + (ceiling - floor) * blend``, where
    ``blend`` mixes acceptance and quality (50/50 by default). The result
    is clamped to [floor, ceiling]; no other owner is affected.
    """
    if not (0.0 <= report.user_acceptance <= 1.0 and 0.0 <= report.content_quality <= 1.0):
        raise ValueError(f"report scores must be in [0, 1], got {report!r}")
    if not (0.0 <= subjective_weight <= 1.0):
        raise ValueError(f"subjective_weight must be in [0, 1], got {subjective_weight!r}")
    blend = (
        subjective_weight * report.user_acceptance
        + (1.0 - subjective_weight) * report.content_quality
    )
    floor, ceiling = scoring.feedback_floor, scoring.feedback_ceiling
    target = floor + (ceiling - floor) * blend
    alpha = scoring.ema_alpha
    old = scoring.multiplier_for(report.owner_id)
    updated = _clamp((1.0 - alpha) * old + alpha * target, floor, ceiling)
    multipliers = dict(scoring.feedback_multiplier)
    multipliers[report.owner_id] = updated
    return replace(
        scoring,
        feedback_multiplier=multipliers,
        history=scoring.history + (report,),
    )


def persist_history(scoring: ScoringSystem, path: str | Path) -> None:
    """Write weights, multipliers, and the full report ledger to ``path``."""
    path = Path(path)
    header = {
        "format": _HISTORY_FORMAT,
        "version": _HISTORY_VERSION,
        "basic_weight": scoring.basic_weight,
        "execution_weight": scoring.execution_weight,
        "price_weight": scoring.price_weight,
        "normalize_by_request_count": scoring.normalize_by_request_count,
        "feedback_floor": scoring.feedback_floor,
        "feedback_ceiling": scoring.feedback_ceiling,
        "ema_alpha": scoring.ema_alpha,
        "feedback_multiplier": {str(o): m for o, m in sorted(scoring.feedback_multiplier.items())},
        "report_count": len(scoring.history),
    }
    lines = [json.dumps(header, sort_keys=True)]
    for report in scoring.history:
        lines.append(
            json.dumps(
                {
                    "owner_id": report.owner_id,
                    "round_index": report.round_index,
                    "user_acceptance": report.user_acceptance,
                    "content_quality": report.content_quality,
                },
                sort_keys=True,
            )
        )
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write("\n".join(lines) + "\n")
        os.chmod(tmp_name, 0o644)  # mkstemp defaults to 0600
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_history(path: str | Path) -> ScoringSystem:
    """Reconstruct a scoring system persisted by :func:`persist_history`.

    Round-trips exactly: weights, multipliers, and every report are
    restored bit-for-bit. Corrupt or truncated files raise
    :class:`HistoryLoadError` naming the offending line.
    """
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise HistoryLoadError(f"{path}: line 1: empty file, expected a header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise HistoryLoadError(f"{path}: line 1: invalid header: {exc.msg}") from exc
    if not isinstance(header, dict) or header.get("format") != _HISTORY_FORMAT:
        raise HistoryLoadError(f"{path}: line 1: not a scoring-history header")
    if header.get("version") != _HISTORY_VERSION:
        raise HistoryLoadError(f"{path}: line 1: unsupported version {header.get('version')!r}")

    reports = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise HistoryLoadError(f"{path}: line {lineno}: blank line inside the ledger")
        try:
            record = json.loads(line)
            reports.append(
                FeedbackReport(
                    owner_id=record["owner_id"],
                    round_index=record["round_index"],
                    user_acceptance=record["user_acceptance"],
                    content_quality=record["content_quality"],
                )
            )
        except json.JSONDecodeError as exc:
            raise HistoryLoadError(f"{path}: line {lineno}: invalid record: {exc.msg}") from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise HistoryLoadError(f"{path}: line {lineno}: bad report: {exc}") from exc

    expected = header.get("report_count")
    if expected != len(reports):
        raise HistoryLoadError(
            f"{path}: line {len(lines)}: header promises {expected} reports, found {len(reports)}"
        )
    try:
        return ScoringSystem(
            basic_weight=header["basic_weight"],
            execution_weight=header["execution_weight"],
            price_weight=header["price_weight"],
            normalize_by_request_count=header["normalize_by_request_count"],
            feedback_multiplier={int(o): m for o, m in header["feedback_multiplier"].items()},
            feedback_floor=header["feedback_floor"],
            feedback_ceiling=header["feedback_ceiling"],
            ema_alpha=header["ema_alpha"],
            history=tuple(reports),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise HistoryLoadError(f"{path}: line 1: bad header: {exc}") from exc
