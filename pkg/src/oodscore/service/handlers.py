"""One function per endpoint, shared by the HTTP app and the local CLI.

Each handler takes a request model and returns a response model, raising
ConfigError or DataError subclasses on bad input; the HTTP layer maps those
to status codes and the CLI maps them to exit codes. Handlers write output
files where requests name them, so a local CLI call and a request served
over HTTP produce byte-identical artifacts.
"""

import os

from .. import __version__, evaluation, labelsets, mixture, scoring, serialize, synth
from ..embeddings import load_store, save_store
from ..errors import BadConfig, DataError, MissingScore, UnknownMethod
from . import models

FORMAT_VERSION = 1


def _resolve_labels(labels) -> labelsets.LabelSet:
    if isinstance(labels, str):
        return labelsets.load_config(labels)
    return labelsets.from_config(labels.model_dump(by_alias=True))


def _check_methods(methods):
    if not methods:
        raise BadConfig("at least one scoring method is required")
    for m in methods:
        if m not in scoring.METHODS:
            raise UnknownMethod(f"unknown scoring method {m!r}")


def _require_file(path: str, what: str) -> str:
    if not os.path.exists(path):
        raise DataError(f"{what} file not found: {path}")
    return path


def score(req: models.ScoreRequest) -> models.ScoreResponse:
    """Score an image store against a label set's class embeddings."""
    _check_methods(req.methods)
    if req.temperature <= 0:
        raise BadConfig(f"temperature must be > 0, got {req.temperature}")
    labelset = _resolve_labels(req.labels)
    need_out = any(m not in scoring.IN_ONLY_METHODS for m in req.methods)
    labelsets.require_sides(labelset, need_out=need_out)

    images = load_store(_require_file(req.images, "image store"))
    texts = load_store(_require_file(req.texts, "text store"))
    lookup = texts.lookup()
    in_matrix = labelsets.class_matrix(labelset.in_classes, lookup)
    out_matrix = (
        labelsets.class_matrix(labelset.out_classes, lookup)
        if labelset.out_classes else None
    )

    configs = [scoring.ScoreConfig(method=m, temperature=req.temperature)
               for m in req.methods]
    triples = [
        (rid, images.meta[i].get("split") or "", images.lookup()[rid])
        for i, rid in enumerate(images.ids)
    ]
    records = scoring.score_batch(
        triples, in_matrix, out_matrix, configs, threads=max(1, req.threads)
    )
    scoring.records_to_ndjson(records, req.out)
    return models.ScoreResponse(
        records=len(records), methods=list(req.methods), out=req.out,
        renormalized_inputs=images.renormalized or texts.renormalized,
    )


def score_inline(req: models.InlineScoreRequest) -> models.InlineScoreResponse:
    """Score one raw logit row; used for probing and remote smoke tests."""
    _check_methods(req.methods)
    jl = scoring.JointLogits(in_logits=req.in_logits, out_logits=req.out_logits)
    out = {}
    for m in req.methods:
        cfg = scoring.ScoreConfig(method=m, temperature=req.temperature)
        out[m] = scoring.score(jl, cfg)
    return models.InlineScoreResponse(scores=out)


def _resolve_tasks(tasks) -> list[evaluation.EvalTask]:
    if isinstance(tasks, str):
        import json

        with open(_require_file(tasks, "tasks"), "r", encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise BadConfig(f"{tasks}: not valid JSON ({exc})") from exc
        items = obj["tasks"] if isinstance(obj, dict) and "tasks" in obj else obj
        if not isinstance(items, list):
            raise BadConfig(f"{tasks}: expected a task list")
        parsed = []
        for item in items:
            try:
                parsed.append(evaluation.EvalTask(
                    name=str(item["name"]),
                    positive_split=str(item["positive_split"]),
                    negative_split=str(item["negative_split"]),
                    method=str(item["method"]),
                ))
            except KeyError as exc:
                raise BadConfig(f"{tasks}: task missing field {exc}") from exc
        tasks = parsed
    else:
        tasks = [
            evaluation.EvalTask(
                name=t.name, positive_split=t.positive_split,
                negative_split=t.negative_split, method=t.method,
            )
            for t in tasks
        ]
    if not tasks:
        raise BadConfig("no evaluation tasks given")
    for t in tasks:
        if t.method not in scoring.METHODS:
            raise UnknownMethod(f"task {t.name!r}: unknown method {t.method!r}")
    return tasks


def evaluate(req: models.EvalRequest) -> models.EvalResponse:
    """AUROC per task over a scores file; writes the report JSON."""
    tasks = _resolve_tasks(req.tasks)
    records = scoring.records_from_ndjson(_require_file(req.scores, "scores"))
    if not records:
        raise MissingScore(f"{req.scores}: no scored records")
    config = {
        "scores": req.scores,
        "methods": sorted({t.method for t in tasks}),
    }
    report = evaluation.run_tasks(records, tasks, config=config)
    evaluation.save_report(report, req.out)
    markdown_out = None
    if req.markdown:
        markdown_out = os.path.splitext(req.out)[0] + ".md"
        with open(markdown_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(evaluation.report_to_markdown(report))
    return models.EvalResponse(
        tasks=[models.TaskResultModel(
            name=t.name, method=t.method, auroc=t.auroc,
            n_pos=t.n_pos, n_neg=t.n_neg,
        ) for t in report.tasks],
        out=req.out, markdown_out=markdown_out,
    )


def mixture_run(req: models.MixtureRequest) -> models.MixtureResponse:
    """Per-box scores and spread per image; optional truth-based report."""
    if req.method not in scoring.METHODS:
        raise UnknownMethod(f"unknown scoring method {req.method!r}")
    labelset = _resolve_labels(req.labels)
    labelsets.require_sides(labelset, need_out=True)
    cfg = scoring.ScoreConfig(method=req.method, temperature=req.temperature)
    box_sets = mixture.load_box_sets(_require_file(req.boxes, "box scores"))
    results = [mixture.mixture_result(bs, labelset, cfg) for bs in box_sets]
    mixture.save_mixture_results(results, req.out)

    tasks, report_out = [], None
    if req.truth is not None:
        truth = mixture.load_truth(_require_file(req.truth, "truth"))
        report = evaluation.mixture_eval(
            results, truth, req.method,
            config={"boxes": req.boxes, "method": req.method,
                    "temperature": req.temperature},
        )
        tasks = [models.TaskResultModel(
            name=t.name, method=t.method, auroc=t.auroc,
            n_pos=t.n_pos, n_neg=t.n_neg,
        ) for t in report.tasks]
        if req.report_out:
            evaluation.save_report(report, req.report_out)
            report_out = req.report_out
    return models.MixtureResponse(
        images=len(results), with_g=sum(1 for r in results if r.g is not None),
        out=req.out, tasks=tasks, report_out=report_out,
    )


def synth_run(req: models.SynthRequest) -> models.SynthResponse:
    """Generate stores and corpora named by the config into out_dir."""
    cfg = synth.load_config(_require_file(req.config, "synth config"))
    os.makedirs(req.out_dir, exist_ok=True)
    written = []

    def emit_store(store, stem):
        path = os.path.join(req.out_dir, stem + ".oceb")
        save_store(store, path)
        written.extend([path, os.path.join(req.out_dir, stem + ".meta.jsonl")])

    if cfg.classes:
        images, anchors = synth.generate(cfg)
        emit_store(images, "images")
        emit_store(anchors, "anchors")
    if cfg.box_corpus is not None:
        box_sets, truth, box_images, box_anchors = synth.generate_boxes(cfg)
        boxes_path = os.path.join(req.out_dir, "boxes.ndjson")
        mixture.save_box_sets(box_sets, boxes_path)
        written.append(boxes_path)
        truth_path = os.path.join(req.out_dir, "truth.ndjson")
        mixture.save_truth(truth, truth_path)
        written.append(truth_path)
        emit_store(box_images, "box_images")
        emit_store(box_anchors, "box_anchors")
        labels_path = os.path.join(req.out_dir, "labels.json")
        with open(labels_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(serialize.dumps(
                labelsets.to_config(synth.corpus_labelset(cfg.box_corpus))
            ))
            fh.write("\n")
        written.append(labels_path)
    return models.SynthResponse(written=written)


def validate(req: models.ValidateRequest) -> models.ValidateResponse:
    """Structural label-set check; violations are data, not errors."""
    labelset = _resolve_labels(req.labels)
    violations = labelsets.validate(labelset)
    return models.ValidateResponse(ok=not violations, violations=violations)


def version() -> models.VersionResponse:
    return models.VersionResponse(version=__version__, format_version=FORMAT_VERSION)
