"""Seeded synthetic embeddings and box corpora; no ML model involved.

Two generators share one config file:

``classes`` drives the embedding generator: per class, one unit anchor (the
"text" embedding) and ``count`` images drawn as
``normalize(anchor + gaussian(0, 1/kappa) per coordinate)``; kappa is an
angular concentration knob, larger means tighter.

``box_corpus`` drives the detection-style generator: images tagged
pure_in / pure_out / mixed, each holding ``boxes_per_image`` boxes whose
per-label confidences put ``margin`` on the box's own class and noise
elsewhere. Mixed images hold at least one in-side and one out-side box.
Each image also gets a whole-image embedding dominated by clutter with a
faint dominant-class component, so whole-image scores stay near chance
while the per-box spread separates mixed from pure cleanly.

Everything is driven by the pinned generator in rng (xoshiro256++ under a
splitmix64 seeder), consumed in a fixed documented order so identical
configs give bit-identical files on any platform:

Embedding generator: classes in listed order; per class, the anchor draws
(dim gaussians when random, none when specified) then count * dim image
gaussians.

Box generator (fresh generator from the same seed): first anchors for
in-classes then out-classes (dim gaussians each); then images in category
order pure_in, pure_out, mixed, and per image: box classes (one integer
draw per box; mixed images draw boxes 0 and 1 on fixed sides, later boxes
draw side then class), then per box four bbox uniforms and one gaussian
per label, then one integer draw for the dominant box, dim gaussians for
clutter, and dim gaussians for image noise.
"""

import json
from dataclasses import dataclass

import numpy as np

from .embeddings import make_store, normalize
from .errors import BadConfig
from .labelsets import ClassSpec, LabelSet
from .mixture import Box, BoxScoreSet
from .rng import Rng


@dataclass(frozen=True)
class SynthClass:
    name: str
    count: int
    noise_kappa: float
    split: str = ""
    anchor: tuple[float, ...] | None = None  # None means draw a random unit vector

    def __post_init__(self):
        if self.count < 1:
            raise BadConfig(f"class {self.name!r}: count must be >= 1")
        if not (self.noise_kappa > 0):
            raise BadConfig(f"class {self.name!r}: noise_kappa must be > 0")


@dataclass(frozen=True)
class SynthConfig:
    dim: int
    seed: int
    classes: tuple[SynthClass, ...] = ()
    box_corpus: "BoxCorpusConfig | None" = None

    def __post_init__(self):
        if self.dim < 2:
            raise BadConfig("dim must be >= 2")
        for cls in self.classes:
            if cls.anchor is not None and len(cls.anchor) != self.dim:
                raise BadConfig(
                    f"class {cls.name!r}: anchor has {len(cls.anchor)} "
                    f"components, dim is {self.dim}"
                )


@dataclass(frozen=True)
class BoxCorpusConfig:
    in_classes: tuple[str, ...]
    out_classes: tuple[str, ...]
    n_pure_in: int = 100
    n_pure_out: int = 100
    n_mixed: int = 100
    boxes_per_image: int = 3
    margin: float = 2.0
    box_noise: float = 0.05
    anchor_weight: float = 0.05
    clutter_weight: float = 1.0
    image_noise: float = 0.05

    def __post_init__(self):
        if not self.in_classes or not self.out_classes:
            raise BadConfig("box corpus needs classes on both sides")
        if set(self.in_classes) & set(self.out_classes):
            raise BadConfig("box corpus classes overlap across sides")
        if self.boxes_per_image < 2:
            raise BadConfig("box corpus needs >= 2 boxes per image")
        if min(self.n_pure_in, self.n_pure_out, self.n_mixed) < 0:
            raise BadConfig("image counts must be >= 0")


def _draw_unit(rng: Rng, dim: int) -> np.ndarray:
    return normalize(np.array(rng.gaussians(dim), dtype=np.float64))


def _perturbed(rng: Rng, anchor: np.ndarray, sigma: float) -> np.ndarray:
    noise = np.array(rng.gaussians(len(anchor), sigma=sigma), dtype=np.float64)
    return normalize(anchor + noise)


def generate(cfg: SynthConfig):
    """(image store, anchor store) for the class section of the config."""
    if not cfg.classes:
        raise BadConfig("config has no classes to generate")
    rng = Rng(cfg.seed)
    anchor_records, image_records = [], []
    for cls in cfg.classes:
        if cls.anchor is not None:
            anchor = normalize(np.array(cls.anchor, dtype=np.float64))
        else:
            anchor = _draw_unit(rng, cfg.dim)
        anchor_records.append(
            (cls.name, anchor, {"class": cls.name, "split": cls.split})
        )
        sigma = 1.0 / cls.noise_kappa
        for i in range(cls.count):
            vec = _perturbed(rng, anchor, sigma)
            image_records.append((
                f"{cls.name}-{i:04d}", vec,
                {"class": cls.name, "split": cls.split},
            ))
    images = make_store(cfg.dim, image_records)
    anchors = make_store(cfg.dim, anchor_records)
    return images, anchors


def corpus_labelset(corpus: BoxCorpusConfig) -> LabelSet:
    """Label set matching the corpus classes, all tier seen, no prompts."""
    return LabelSet(
        name="synthetic-box-corpus",
        in_classes=tuple(ClassSpec(name=n) for n in corpus.in_classes),
        out_classes=tuple(ClassSpec(name=n) for n in corpus.out_classes),
    )


def generate_boxes(cfg: SynthConfig):
    """Box corpus: (box sets, truth pairs, whole-image store, anchor store).

    Truth pairs are (image_id, category) in generation order; whole-image
    records carry the category as their split tag.
    """
    corpus = cfg.box_corpus
    if corpus is None:
        raise BadConfig("config has no box_corpus section")
    rng = Rng(cfg.seed)
    label_order = tuple(corpus.in_classes) + tuple(corpus.out_classes)
    anchors = {name: _draw_unit(rng, cfg.dim) for name in label_order}

    box_sets, truth, image_records = [], [], []
    categories = (
        ("pure_in", corpus.n_pure_in),
        ("pure_out", corpus.n_pure_out),
        ("mixed", corpus.n_mixed),
    )
    for category, total in categories:
        for i in range(total):
            image_id = f"{category}-{i:04d}"
            box_classes = _pick_box_classes(rng, corpus, category)
            boxes = []
            for name in box_classes:
                bbox = _draw_bbox(rng)
                scores = np.array(
                    rng.gaussians(len(label_order), sigma=corpus.box_noise)
                )
                scores[label_order.index(name)] += corpus.margin
                boxes.append(Box(bbox=bbox, scores=tuple(float(s) for s in scores)))
            box_sets.append(BoxScoreSet(
                image_id=image_id, label_order=label_order, boxes=tuple(boxes),
            ))
            truth.append((image_id, category))

            dominant = box_classes[rng.below(len(box_classes))]
            clutter = _draw_unit(rng, cfg.dim)
            noise = np.array(rng.gaussians(cfg.dim, sigma=corpus.image_noise))
            whole = normalize(
                corpus.anchor_weight * anchors[dominant]
                + corpus.clutter_weight * clutter
                + noise
            )
            image_records.append((image_id, whole, {"class": dominant, "split": category}))

    images = make_store(cfg.dim, image_records)
    anchor_store = make_store(
        cfg.dim,
        [(name, anchors[name], {"class": name, "split": ""}) for name in label_order],
    )
    return box_sets, truth, images, anchor_store


def _pick_box_classes(rng: Rng, corpus: BoxCorpusConfig, category: str):
    """Class name per box. Mixed pins box 0 in-side and box 1 out-side."""
    names = []
    for b in range(corpus.boxes_per_image):
        if category == "pure_in":
            side = corpus.in_classes
        elif category == "pure_out":
            side = corpus.out_classes
        elif b == 0:
            side = corpus.in_classes
        elif b == 1:
            side = corpus.out_classes
        else:
            side = corpus.in_classes if rng.below(2) == 0 else corpus.out_classes
        names.append(side[rng.below(len(side))])
    return names


def _draw_bbox(rng: Rng):
    x0 = 200.0 * rng.uniform()
    y0 = 200.0 * rng.uniform()
    w = 10.0 + 90.0 * rng.uniform()
    h = 10.0 + 90.0 * rng.uniform()
    return (x0, y0, x0 + w, y0 + h)


def _parse_class(obj) -> SynthClass:
    if not isinstance(obj, dict) or "name" not in obj:
        raise BadConfig("each synth class must be an object with a name")
    mode = obj.get("anchor_mode", "specified" if "anchor" in obj else "random_unit")
    if mode == "random_unit":
        anchor = None
    elif mode == "specified":
        if "anchor" not in obj:
            raise BadConfig(f"class {obj['name']!r}: anchor_mode specified needs anchor")
        anchor = tuple(float(v) for v in obj["anchor"])
    else:
        raise BadConfig(f"class {obj['name']!r}: unknown anchor_mode {mode!r}")
    return SynthClass(
        name=str(obj["name"]),
        count=int(obj.get("count", 1)),
        noise_kappa=float(obj.get("noise_kappa", 20.0)),
        split=str(obj.get("split", "")),
        anchor=anchor,
    )


def from_config(obj: dict) -> SynthConfig:
    """Build a SynthConfig from its JSON object form."""
    if not isinstance(obj, dict) or "dim" not in obj or "seed" not in obj:
        raise BadConfig("synth config must be an object with dim and seed")
    classes = tuple(_parse_class(c) for c in obj.get("classes", []))
    corpus = None
    if "box_corpus" in obj:
        raw = obj["box_corpus"]
        if not isinstance(raw, dict):
            raise BadConfig("box_corpus must be an object")
        kwargs = {
            "in_classes": tuple(str(n) for n in raw.get("in_classes", [])),
            "out_classes": tuple(str(n) for n in raw.get("out_classes", [])),
        }
        for key in ("n_pure_in", "n_pure_out", "n_mixed", "boxes_per_image"):
            if key in raw:
                kwargs[key] = int(raw[key])
        for key in ("margin", "box_noise", "anchor_weight", "clutter_weight",
                    "image_noise"):
            if key in raw:
                kwargs[key] = float(raw[key])
        corpus = BoxCorpusConfig(**kwargs)
    if not classes and corpus is None:
        raise BadConfig("synth config needs a classes list or a box_corpus")
    return SynthConfig(
        dim=int(obj["dim"]), seed=int(obj["seed"]),
        classes=classes, box_corpus=corpus,
    )


def load_config(path) -> SynthConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise BadConfig(f"{path}: not valid JSON ({exc})") from exc
    return from_config(obj)
