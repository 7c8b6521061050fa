"""Seeded experiment runner and report emission.

A config fully determines every trial: trial t draws its generator and
its fresh instance from streams derived from (seed, t), so re-running a
config reproduces each report bit for bit with the builtin oracle.  The
success flag of a trial is always recomputed from the ground-truth rank,
never taken from the algorithm under test.  Trials can run in a worker
pool; reports are assembled in trial order either way.
"""

from __future__ import annotations

import json
import multiprocessing
import sys
from dataclasses import asdict, dataclass
from io import StringIO
from typing import Optional, Sequence, TextIO

import numpy as np

from .apxrank import approximate_rank
from .errors import InvalidParameterError, OracleError
from .external import ExternalOracle
from .minfind import max_find, min_find
from .oracle import InstanceOracle
from .order import exact_rank, make_instance
from .ranktest import rank_at_most
from .selection import approximate_select

ALGORITHMS = ("minfind", "maxfind", "testle", "rank", "select")

CSV_COLUMNS = (
    "algo,n,target,delta,epsilon,seed,trial,result_id,est_rank,true_rank,"
    "success,queries_left,queries_right,rounds"
)


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    n: int
    trials: int
    seed: int
    r: Optional[float] = None
    k: Optional[int] = None
    delta: Optional[float] = None
    epsilon: Optional[float] = None
    oracle: str = "builtin"
    fixed_instance: bool = False
    x_rank: Optional[int] = None
    workers: int = 1

    @property
    def target(self) -> Optional[float]:
        if self.algorithm == "testle":
            return self.r
        if self.algorithm == "select":
            return self.k
        return None


@dataclass(frozen=True)
class TrialReport:
    trial: int
    result_id: Optional[int]
    est_rank: Optional[int]
    true_rank: Optional[int]
    success: Optional[bool]
    queries_left: int
    queries_right: int
    rounds: Optional[int]
    error: Optional[str] = None


def validate_config(config: ExperimentConfig) -> None:
    if config.algorithm not in ALGORITHMS:
        raise InvalidParameterError(f"unknown algorithm {config.algorithm!r}")
    if config.n < 1:
        raise InvalidParameterError(f"n must be positive, got {config.n}")
    if config.trials < 1:
        raise InvalidParameterError(f"trials must be positive, got {config.trials}")
    needs_band = config.algorithm in ("testle", "rank", "select")
    if needs_band:
        if config.delta is None or not 0.0 < config.delta < 1.0:
            raise InvalidParameterError(f"{config.algorithm} needs delta in (0,1)")
        if config.epsilon is None or not 0.0 < config.epsilon < 1.0:
            raise InvalidParameterError(f"{config.algorithm} needs epsilon in (0,1)")
    if config.algorithm == "testle" and (config.r is None or not 0 < config.r < config.n):
        raise InvalidParameterError("testle needs a target rank r in (0, n)")
    if config.algorithm == "select" and (config.k is None or not 1 <= config.k <= config.n):
        raise InvalidParameterError("select needs a target rank k in 1..n")
    if config.x_rank is not None:
        if config.algorithm not in ("testle", "rank"):
            raise InvalidParameterError("x_rank applies only to testle and rank")
        if not 1 <= config.x_rank <= config.n:
            raise InvalidParameterError(f"x_rank {config.x_rank} outside 1..{config.n}")
        if not config.oracle == "builtin":
            raise InvalidParameterError("x_rank requires the builtin oracle")
    if config.oracle != "builtin" and not config.oracle.startswith("cmd:"):
        raise InvalidParameterError("oracle must be 'builtin' or 'cmd:<command>'")


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    entropy = (seed & 0xFFFFFFFFFFFFFFFF, trial, 1)
    return np.random.default_rng(np.random.SeedSequence(entropy=entropy))


def _instance_seed(config: ExperimentConfig, trial: int) -> int:
    if config.fixed_instance:
        return config.seed
    ss = np.random.SeedSequence(entropy=(config.seed & 0xFFFFFFFFFFFFFFFF, trial, 0))
    return int(ss.generate_state(1, np.uint64)[0])


def _testle_success(answer: bool, true_rank: int, r: float, delta: float, n: int) -> bool:
    band = delta * min(r, n - r)
    if abs(true_rank - r) < band:
        return True  # inside the band either answer is acceptable
    return answer == (true_rank <= r)


def _run_builtin_trial(config: ExperimentConfig, trial: int) -> TrialReport:
    rng = _trial_rng(config.seed, trial)
    instance = make_instance(config.n, _instance_seed(config, trial))
    oracle = InstanceOracle(instance)
    n = config.n

    if config.algorithm in ("minfind", "maxfind"):
        find = min_find if config.algorithm == "minfind" else max_find
        outcome = find(oracle, n, rng)
        true_rank = exact_rank(instance, outcome.element)
        wanted = 1 if config.algorithm == "minfind" else n
        return TrialReport(
            trial=trial,
            result_id=outcome.element,
            est_rank=None,
            true_rank=true_rank,
            success=true_rank == wanted,
            queries_left=outcome.ledger.left_count,
            queries_right=outcome.ledger.right_count,
            rounds=None,
        )

    if config.algorithm == "testle":
        x = (instance.element_with_rank(config.x_rank) if config.x_rank is not None
             else int(rng.integers(0, n)))
        outcome = rank_at_most(oracle, x, config.r, config.delta, config.epsilon, rng)
        true_rank = exact_rank(instance, x)
        return TrialReport(
            trial=trial,
            result_id=x,
            est_rank=None,
            true_rank=true_rank,
            success=_testle_success(outcome.answer, true_rank, config.r,
                                    config.delta, n),
            queries_left=outcome.ledger.left_count,
            queries_right=outcome.ledger.right_count,
            rounds=None,
        )

    if config.algorithm == "rank":
        x = (instance.element_with_rank(config.x_rank) if config.x_rank is not None
             else int(rng.integers(0, n)))
        estimate = approximate_rank(oracle, x, config.delta, config.epsilon, rng)
        true_rank = exact_rank(instance, x)
        band = config.delta * min(estimate.rank, n - estimate.rank)
        return TrialReport(
            trial=trial,
            result_id=x,
            est_rank=estimate.rank,
            true_rank=true_rank,
            success=abs(true_rank - estimate.rank) <= band,
            queries_left=estimate.ledger.left_count,
            queries_right=estimate.ledger.right_count,
            rounds=None,
        )

    # select
    outcome = approximate_select(oracle, n, config.k, config.delta, config.epsilon, rng)
    if outcome.found:
        true_rank = exact_rank(instance, outcome.element)
        band = config.delta * min(config.k, n - config.k)
        success = abs(true_rank - config.k) <= band
    else:
        true_rank = None
        success = None
    return TrialReport(
        trial=trial,
        result_id=outcome.element,
        est_rank=None,
        true_rank=true_rank,
        success=success,
        queries_left=outcome.ledger.left_count,
        queries_right=outcome.ledger.right_count,
        rounds=outcome.rounds_used,
    )


def _run_external_trial(config: ExperimentConfig, trial: int,
                        oracle: ExternalOracle) -> TrialReport:
    # the hidden order lives in the server, so true ranks and success
    # flags cannot be computed on this side
    rng = _trial_rng(config.seed, trial)
    n = config.n
    try:
        if config.algorithm in ("minfind", "maxfind"):
            find = min_find if config.algorithm == "minfind" else max_find
            outcome = find(oracle, n, rng)
            return TrialReport(trial, outcome.element, None, None, None,
                               outcome.ledger.left_count,
                               outcome.ledger.right_count, None)
        if config.algorithm == "testle":
            x = int(rng.integers(0, n))
            outcome = rank_at_most(oracle, x, config.r, config.delta,
                                   config.epsilon, rng)
            return TrialReport(trial, x, None, None, None,
                               outcome.ledger.left_count,
                               outcome.ledger.right_count, None)
        if config.algorithm == "rank":
            x = int(rng.integers(0, n))
            estimate = approximate_rank(oracle, x, config.delta, config.epsilon, rng)
            return TrialReport(trial, x, estimate.rank, None, None,
                               estimate.ledger.left_count,
                               estimate.ledger.right_count, None)
        outcome = approximate_select(oracle, n, config.k, config.delta,
                                     config.epsilon, rng)
        return TrialReport(trial, outcome.element, None, None, None,
                           outcome.ledger.left_count,
                           outcome.ledger.right_count, outcome.rounds_used)
    except OracleError as exc:
        return TrialReport(trial, None, None, None, None, 0, 0, None,
                           error=str(exc))


def summarize(config: ExperimentConfig, reports: Sequence[TrialReport]) -> dict:
    totals = [r.queries_left + r.queries_right for r in reports]
    flagged = [r.success for r in reports if r.success is not None]
    summary = {
        "algorithm": config.algorithm,
        "n": config.n,
        "trials": len(reports),
        "seed": config.seed,
        "total_queries": int(sum(totals)),
        "mean_queries": (sum(totals) / len(reports)) if reports else 0.0,
        "max_queries": max(totals, default=0),
        "success_rate": (sum(flagged) / len(flagged)) if flagged else None,
        "errors": sum(1 for r in reports if r.error is not None),
    }
    if config.algorithm == "select":
        returned = [r for r in reports if r.result_id is not None]
        summary["return_rate"] = len(returned) / len(reports) if reports else 0.0
        rounds = [r.rounds for r in reports if r.rounds is not None]
        summary["mean_rounds"] = (sum(rounds) / len(rounds)) if rounds else 0.0
    return summary


def _worker(args: tuple) -> TrialReport:
    config, trial = args
    return _run_builtin_trial(config, trial)


def run_experiment(config: ExperimentConfig) -> tuple[list[TrialReport], dict]:
    """Execute all trials of a config and aggregate the results."""
    validate_config(config)
    if config.oracle.startswith("cmd:"):
        # exclusive-use oracle: one worker, one shared server process
        with ExternalOracle(config.oracle[4:], config.n) as oracle:
            reports = [_run_external_trial(config, t, oracle)
                       for t in range(config.trials)]
    elif config.workers > 1 and config.trials > 1:
        with multiprocessing.Pool(config.workers) as pool:
            chunk = max(1, config.trials // (config.workers * 4))
            args = [(config, t) for t in range(config.trials)]
            reports = list(pool.imap(_worker, args, chunksize=chunk))
    else:
        reports = [_run_builtin_trial(config, t) for t in range(config.trials)]
    return reports, summarize(config, reports)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_csv(config: ExperimentConfig, reports: Sequence[TrialReport]) -> str:
    out = StringIO()
    out.write(CSV_COLUMNS + "\n")
    base = (
        f"{config.algorithm},{config.n},{_cell(config.target)},"
        f"{_cell(config.delta)},{_cell(config.epsilon)},{config.seed}"
    )
    for r in reports:
        out.write(
            f"{base},{r.trial},{_cell(r.result_id)},{_cell(r.est_rank)},"
            f"{_cell(r.true_rank)},{_cell(r.success)},{r.queries_left},"
            f"{r.queries_right},{_cell(r.rounds)}\n"
        )
    return out.getvalue()


def render_json(config: ExperimentConfig, reports: Sequence[TrialReport],
                summary: dict) -> str:
    payload = {
        "config": asdict(config),
        "summary": summary,
        "trials": [asdict(r) for r in reports],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_report(config: ExperimentConfig, reports: Sequence[TrialReport],
                 summary: dict, fmt: str = "csv",
                 path: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """Emit the report as CSV (schema-fixed columns) or JSON."""
    if fmt == "csv":
        text = render_csv(config, reports)
    elif fmt == "json":
        text = render_json(config, reports, summary)
    else:
        raise InvalidParameterError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", encoding="ascii") as handle:
                handle.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    else:
        (stream or sys.stdout).write(text)
