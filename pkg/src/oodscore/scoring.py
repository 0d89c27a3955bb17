"""Five OOD scores over in/out logit pairs, plus their shared decomposition.

Every method takes the same preprocessed logits (divided by temperature) and
is oriented so that higher means more likely OOD:

    neg_max_prob     -max softmax probability over the in-side alone
    sum_out_prob     total softmax mass on the out-side, softmax over both
    max_out_prob     largest out-side softmax probability, softmax over both
    neg_max_in_prob  -largest in-side softmax probability, softmax over both
    max_logit_diff   max out-logit minus max in-logit

Softmax uses max-subtraction, all arithmetic is float64, and ties resolve to
the lowest index so repeated runs are bit-identical.

The last two methods are linked: with q the best out-side label and
r = sum over all other labels of e^(w_l - w_q),

    -log(-neg_max_in_prob) = max_logit_diff + log(1 + r)

``identity_residual`` evaluates both sides independently for verification.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .embeddings import logits as embed_logits
from .errors import EmptyInSet, EmptyOutSet, NonFinite, UnknownMethod

METHODS = (
    "neg_max_prob",
    "sum_out_prob",
    "max_out_prob",
    "neg_max_in_prob",
    "max_logit_diff",
)

# Methods that never look at the out side.
IN_ONLY_METHODS = ("neg_max_prob",)


@dataclass(frozen=True)
class ScoreConfig:
    method: str
    temperature: float = 1.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise UnknownMethod(f"unknown scoring method {self.method!r}")
        if not (self.temperature > 0.0) or not math.isfinite(self.temperature):
            raise UnknownMethod(
                f"temperature must be a positive finite float, got {self.temperature!r}"
            )


@dataclass(frozen=True)
class JointLogits:
    """Raw similarities split by side, in class order."""

    in_logits: np.ndarray
    out_logits: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "in_logits", np.asarray(self.in_logits, dtype=np.float64))
        object.__setattr__(self, "out_logits", np.asarray(self.out_logits, dtype=np.float64))
        if self.in_logits.size == 0:
            raise EmptyInSet("in-side logits are empty")
        if not np.all(np.isfinite(self.in_logits)) or not np.all(
            np.isfinite(self.out_logits)
        ):
            raise NonFinite("logits contain NaN or Inf")


@dataclass(frozen=True)
class ScoredRecord:
    id: str
    split: str
    scores: dict[str, float]


def softmax(values: np.ndarray) -> np.ndarray:
    """Stable softmax: exponentials are taken after subtracting the max."""
    shifted = values - np.max(values)
    exps = np.exp(shifted)
    return exps / np.sum(exps)


def _scaled(jl: JointLogits, cfg: ScoreConfig):
    return jl.in_logits / cfg.temperature, jl.out_logits / cfg.temperature


def _require_out(jl: JointLogits):
    if jl.out_logits.size == 0:
        raise EmptyOutSet("method requires a non-empty OOD class list")


def score_neg_max_prob(jl: JointLogits, cfg: ScoreConfig) -> float:
    win, _ = _scaled(jl, cfg)
    return float(-np.max(softmax(win)))


def score_sum_out_prob(jl: JointLogits, cfg: ScoreConfig) -> float:
    _require_out(jl)
    win, wout = _scaled(jl, cfg)
    probs = softmax(np.concatenate([win, wout]))
    return float(np.sum(probs[win.size:]))


def score_max_out_prob(jl: JointLogits, cfg: ScoreConfig) -> float:
    _require_out(jl)
    win, wout = _scaled(jl, cfg)
    probs = softmax(np.concatenate([win, wout]))
    return float(np.max(probs[win.size:]))


def score_neg_max_in_prob(jl: JointLogits, cfg: ScoreConfig) -> float:
    _require_out(jl)
    win, wout = _scaled(jl, cfg)
    probs = softmax(np.concatenate([win, wout]))
    return float(-np.max(probs[: win.size]))


def score_max_logit_diff(jl: JointLogits, cfg: ScoreConfig) -> float:
    _require_out(jl)
    win, wout = _scaled(jl, cfg)
    return float(np.max(wout) - np.max(win))


_SCORERS = {
    "neg_max_prob": score_neg_max_prob,
    "sum_out_prob": score_sum_out_prob,
    "max_out_prob": score_max_out_prob,
    "neg_max_in_prob": score_neg_max_in_prob,
    "max_logit_diff": score_max_logit_diff,
}


def score(jl: JointLogits, cfg: ScoreConfig) -> float:
    return _SCORERS[cfg.method](jl, cfg)


def identity_residual(jl: JointLogits, cfg: ScoreConfig):
    """Both sides of -log(-neg_max_in_prob) = max_logit_diff + log(1 + r).

    Returns (lhs, rhs, r). q is the best out-side label (lowest index on a
    tie); r sums e^(w_l - w_q) over every other label of the union. rhs is
    built from max_logit_diff and log1p without evaluating any softmax, so
    the two sides are independent computations of the same quantity.
    """
    _require_out(jl)
    win, wout = _scaled(jl, cfg)
    lhs = -math.log(-score_neg_max_in_prob(jl, cfg))
    union = np.concatenate([win, wout])
    q = win.size + int(np.argmax(wout))
    rest = np.delete(union, q)
    r = float(np.sum(np.exp(rest - union[q])))
    rhs = score_max_logit_diff(jl, cfg) + math.log1p(r)
    return lhs, rhs, r


def joint_logits_for(img, in_matrix, out_matrix) -> JointLogits:
    """Build JointLogits from an image embedding and stacked class rows."""
    in_row = embed_logits(img, in_matrix, [""] * len(in_matrix)).values
    if out_matrix is not None and len(out_matrix):
        out_row = embed_logits(img, out_matrix, [""] * len(out_matrix)).values
    else:
        out_row = np.zeros(0)
    return JointLogits(in_logits=in_row, out_logits=out_row)


def score_record(record_id, split, img, in_matrix, out_matrix, configs) -> ScoredRecord:
    """All requested scores for one image embedding.

    Methods that ignore the out side still work when out_matrix is empty;
    the others raise EmptyOutSet. Errors carry the record id.
    """
    jl = joint_logits_for(img, in_matrix, out_matrix)
    scores = {}
    for cfg in configs:
        try:
            scores[cfg.method] = score(jl, cfg)
        except (EmptyInSet, EmptyOutSet) as exc:
            exc.args = (f"record {record_id!r}: {exc.args[0]}",)
            raise
    return ScoredRecord(id=str(record_id), split=str(split), scores=scores)


def score_batch(records, in_matrix, out_matrix, configs, threads: int = 1):
    """ScoredRecords for (id, split, vector) triples, input order preserved.

    Scoring is pure per record, so the thread pool only adds throughput;
    results are collected by input index and identical for any thread count.
    """
    items = list(records)

    def one(item):
        rid, split, vec = item
        return score_record(rid, split, vec, in_matrix, out_matrix, configs)

    if threads <= 1 or len(items) <= 1:
        return [one(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, items))


def records_to_ndjson(records, path) -> None:
    """Write ScoredRecords as NDJSON, one object per record, 17-digit floats."""
    rows = [
        {"id": rec.id, "split": rec.split,
         "scores": {m: rec.scores[m] for m in METHODS if m in rec.scores}}
        for rec in records
    ]
    serialize.dump_ndjson(rows, path)


def records_from_ndjson(path):
    """Read ScoredRecords back from a scores NDJSON file."""
    import json

    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            out.append(ScoredRecord(
                id=str(obj["id"]), split=str(obj.get("split", "")),
                scores={k: float(v) for k, v in obj.get("scores", {}).items()},
            ))
    return out
