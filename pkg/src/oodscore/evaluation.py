"""AUROC with exact tie handling, split-vs-split tasks, and report output.

AUROC here is the Mann-Whitney probability that a random OOD score exceeds
a random in-domain score, ties credited 0.5. The rank-sum computation is
O((n+m) log(n+m)) and matches the O(n*m) pairwise count bit for bit: tied
groups get exact half-integer average ranks, every intermediate stays an
exactly-representable multiple of 0.5, and a single final division by n*m
produces the same float the pairwise form does.

OOD is always the score-high (positive) side; no method is sign-flipped.
"""

from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .errors import (
    EmptyList,
    MissingScore,
    NonFinite,
    UnknownSplit,
    UnlabeledImage,
)


def auroc(ood_scores, in_scores) -> float:
    """Probability an OOD score ranks above an in-domain score, ties 0.5."""
    ood = np.asarray(ood_scores, dtype=np.float64)
    ind = np.asarray(in_scores, dtype=np.float64)
    if ood.size == 0 or ind.size == 0:
        raise EmptyList("auroc needs at least one score on each side")
    if not np.all(np.isfinite(ood)) or not np.all(np.isfinite(ind)):
        raise NonFinite("auroc inputs contain NaN or Inf")
    n, m = ood.size, ind.size
    pooled = np.concatenate([ood, ind])
    _, inverse, counts = np.unique(pooled, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts
    # Average 1-based rank of each tied group: exact multiples of 0.5.
    avg_rank = (starts + 1 + ends) / 2.0
    rank_sum = float(np.sum(avg_rank[inverse[:n]]))
    u = rank_sum - n * (n + 1) / 2.0
    return u / (n * m)


@dataclass(frozen=True)
class EvalTask:
    """One AUROC cell: positive (OOD) split vs negative (in-domain) split."""

    name: str
    positive_split: str
    negative_split: str
    method: str

    def __post_init__(self):
        if self.positive_split == self.negative_split:
            raise UnknownSplit(
                f"task {self.name!r}: positive and negative splits are both "
                f"{self.positive_split!r}"
            )


@dataclass(frozen=True)
class TaskResult:
    name: str
    method: str
    auroc: float
    n_pos: int
    n_neg: int


@dataclass(frozen=True)
class EvalReport:
    tasks: tuple[TaskResult, ...]
    config: dict = field(default_factory=dict)


def _scores_for(records, split: str, method: str, task_name: str):
    values = []
    for rec in records:
        if rec.split != split:
            continue
        if method not in rec.scores:
            raise MissingScore(
                f"task {task_name!r}: record {rec.id!r} lacks method {method!r}"
            )
        values.append(rec.scores[method])
    if not values:
        raise UnknownSplit(f"task {task_name!r}: no records in split {split!r}")
    return values


def run_tasks(records, tasks, config=None) -> EvalReport:
    """Evaluate each task over the scored records; order follows the tasks."""
    records = list(records)
    results = []
    for task in tasks:
        pos = _scores_for(records, task.positive_split, task.method, task.name)
        neg = _scores_for(records, task.negative_split, task.method, task.name)
        results.append(TaskResult(
            name=task.name, method=task.method,
            auroc=auroc(pos, neg), n_pos=len(pos), n_neg=len(neg),
        ))
    return EvalReport(tasks=tuple(results), config=dict(config or {}))


def mixture_eval(results, truth: dict, method: str, config=None) -> EvalReport:
    """Spread-score AUROCs: mixed vs pure_in and mixed vs pure_out.

    Images without a spread score (fewer than two boxes) are not mixture
    candidates and are skipped; images missing from the truth map are a
    hard error.
    """
    groups = {"pure_in": [], "pure_out": [], "mixed": []}
    for res in results:
        if res.image_id not in truth:
            raise UnlabeledImage(f"no truth label for image {res.image_id!r}")
        if res.g is None:
            continue
        groups[truth[res.image_id]].append(res.g)

    tasks = []
    for neg_name in ("pure_in", "pure_out"):
        mixed, pure = groups["mixed"], groups[neg_name]
        if not mixed or not pure:
            raise EmptyList(
                f"mixture eval needs spread scores in both 'mixed' and "
                f"{neg_name!r} (got {len(mixed)} and {len(pure)})"
            )
        tasks.append(TaskResult(
            name=f"mixed_vs_{neg_name}", method=f"g({method})",
            auroc=auroc(mixed, pure), n_pos=len(mixed), n_neg=len(pure),
        ))
    return EvalReport(tasks=tuple(tasks), config=dict(config or {}))


def report_to_json(report: EvalReport) -> dict:
    return {
        "tasks": [
            {"name": t.name, "method": t.method, "auroc": t.auroc,
             "n_pos": t.n_pos, "n_neg": t.n_neg}
            for t in report.tasks
        ],
        "config": report.config,
    }


def save_report(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize.dumps(report_to_json(report)))
        fh.write("\n")


def report_to_markdown(report: EvalReport) -> str:
    """Task-by-method grid of AUROC values, one row per task name."""
    task_names, methods = [], []
    cells = {}
    for t in report.tasks:
        if t.name not in task_names:
            task_names.append(t.name)
        if t.method not in methods:
            methods.append(t.method)
        cells[(t.name, t.method)] = t.auroc
    lines = ["| task | " + " | ".join(methods) + " |",
             "|---" * (len(methods) + 1) + "|"]
    for name in task_names:
        row = [name]
        for method in methods:
            value = cells.get((name, method))
            row.append("" if value is None else f"{value:.4f}")
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"
