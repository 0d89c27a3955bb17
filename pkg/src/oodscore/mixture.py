"""Per-bounding-box OOD scores and the mixed-content spread score.

Detector confidences per box are treated directly as logits over an ordered
label list, split into in/out sides by class-name membership, and scored
with the same methods as whole images. The spread score for an image is

    g = max(per-box scores) - min(per-box scores)

and exists only for images with at least two boxes: a large spread means
some boxes look in-domain while others look OOD, i.e. mixed content.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import serialize
from .errors import DataError, LabelOrderMismatch, NonFinite, TooFewBoxes
from .labelsets import LabelSet
from .scoring import JointLogits, ScoreConfig, score


@dataclass(frozen=True)
class Box:
    """One detection: pixel box plus a confidence per label."""

    bbox: tuple[float, float, float, float]
    scores: tuple[float, ...]

    def __post_init__(self):
        x0, y0, x1, y1 = self.bbox
        if not (x0 < x1 and y0 < y1):
            raise DataError(f"degenerate bbox {self.bbox}")
        if not all(np.isfinite(s) for s in self.scores):
            raise NonFinite("box scores contain NaN or Inf")


@dataclass(frozen=True)
class BoxScoreSet:
    """All detections for one image against one label order."""

    image_id: str
    label_order: tuple[str, ...]
    boxes: tuple[Box, ...]

    def __post_init__(self):
        for box in self.boxes:
            if len(box.scores) != len(self.label_order):
                raise LabelOrderMismatch(
                    f"image {self.image_id!r}: box has {len(box.scores)} scores "
                    f"for {len(self.label_order)} labels"
                )


@dataclass(frozen=True)
class MixtureResult:
    image_id: str
    per_box_scores: tuple[float, ...]
    g: float | None


def _side_indices(label_order, labelset: LabelSet):
    """Positions of in-side and out-side labels within label_order.

    The label order must partition exactly into the label set's two sides:
    no label missing, none extra, none on both sides.
    """
    in_names = set(labelset.in_names())
    out_names = set(labelset.out_names())
    in_idx, out_idx = [], []
    for i, name in enumerate(label_order):
        if name in in_names:
            in_idx.append(i)
        elif name in out_names:
            out_idx.append(i)
        else:
            raise LabelOrderMismatch(f"label {name!r} not in label set")
    if len(in_idx) + len(out_idx) != len(label_order):
        raise LabelOrderMismatch("label order does not partition into in/out")
    missing = (in_names | out_names) - set(label_order)
    if missing:
        raise LabelOrderMismatch(f"label order missing classes {sorted(missing)}")
    if len(set(label_order)) != len(label_order):
        raise LabelOrderMismatch("label order contains duplicates")
    return np.array(in_idx, dtype=int), np.array(out_idx, dtype=int)


def box_scores(box_set: BoxScoreSet, labelset: LabelSet, cfg: ScoreConfig):
    """The configured score for each box, in box order."""
    in_idx, out_idx = _side_indices(box_set.label_order, labelset)
    out = []
    for box in box_set.boxes:
        row = np.asarray(box.scores, dtype=np.float64)
        jl = JointLogits(in_logits=row[in_idx], out_logits=row[out_idx])
        out.append(score(jl, cfg))
    return out


def mixture_score(per_box) -> float:
    """Largest pairwise score spread: max - min. Needs two or more boxes."""
    values = list(per_box)
    if len(values) < 2:
        raise TooFewBoxes(f"mixture score needs >= 2 boxes, got {len(values)}")
    return float(max(values) - min(values))


def mixture_result(box_set: BoxScoreSet, labelset: LabelSet, cfg: ScoreConfig) -> MixtureResult:
    """Per-box scores plus g; g is absent (None) below two boxes."""
    per_box = box_scores(box_set, labelset, cfg)
    g = mixture_score(per_box) if len(per_box) >= 2 else None
    return MixtureResult(
        image_id=box_set.image_id,
        per_box_scores=tuple(per_box),
        g=g,
    )


def load_box_sets(path):
    """Read box-score NDJSON: image_id, label_order, boxes with bbox+scores."""
    sets = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            boxes = tuple(
                Box(bbox=tuple(float(v) for v in b["bbox"]),
                    scores=tuple(float(v) for v in b["scores"]))
                for b in obj.get("boxes", [])
            )
            sets.append(BoxScoreSet(
                image_id=str(obj["image_id"]),
                label_order=tuple(str(n) for n in obj["label_order"]),
                boxes=boxes,
            ))
    return sets


def save_box_sets(box_sets, path) -> None:
    """Write box-score NDJSON in input order."""
    rows = []
    for bs in box_sets:
        rows.append({
            "image_id": bs.image_id,
            "label_order": list(bs.label_order),
            "boxes": [
                {"bbox": list(b.bbox), "scores": list(b.scores)} for b in bs.boxes
            ],
        })
    serialize.dump_ndjson(rows, path)


def save_mixture_results(results, path) -> None:
    """Write mixture NDJSON; g is omitted, never null, when absent."""
    rows = []
    for res in results:
        row = {
            "image_id": res.image_id,
            "per_box_scores": list(res.per_box_scores),
        }
        if res.g is not None:
            row["g"] = res.g
        rows.append(row)
    serialize.dump_ndjson(rows, path)


def load_mixture_results(path):
    """Read mixture NDJSON written by save_mixture_results."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            out.append(MixtureResult(
                image_id=str(obj["image_id"]),
                per_box_scores=tuple(float(v) for v in obj.get("per_box_scores", [])),
                g=float(obj["g"]) if "g" in obj else None,
            ))
    return out


def load_truth(path) -> dict[str, str]:
    """Read truth NDJSON: image_id -> pure_in | pure_out | mixed."""
    truth = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            label = str(obj["truth"])
            if label not in ("pure_in", "pure_out", "mixed"):
                raise DataError(f"unknown truth label {label!r}")
            truth[str(obj["image_id"])] = label
    return truth


def save_truth(truth_pairs, path) -> None:
    """Write truth NDJSON from (image_id, label) pairs in given order."""
    rows = [{"image_id": str(i), "truth": str(t)} for i, t in truth_pairs]
    serialize.dump_ndjson(rows, path)
