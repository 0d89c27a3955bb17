"""Request and response bodies for the HTTP API.

File-driven endpoints take paths (the service is a local daemon sharing a
filesystem with its clients); the inline endpoint scores raw logits with no
file I/O. ``in`` is a Python keyword, so the label-config models expose it
through field aliases; both alias and field name are accepted on input.
"""

from pydantic import BaseModel, ConfigDict, Field

from ..scoring import METHODS


class ClassSpecModel(BaseModel):
    name: str
    prompts: list[str] = []
    tier: str = "seen"


class LabelConfigModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str = ""
    in_classes: list[ClassSpecModel] = Field(default=[], alias="in")
    out_classes: list[ClassSpecModel] = Field(default=[], alias="out")


class ScoreRequest(BaseModel):
    """Score every record of an image store against a label set."""

    images: str
    texts: str
    labels: str | LabelConfigModel
    methods: list[str] = list(METHODS)
    temperature: float = 1.0
    out: str
    threads: int = 1


class ScoreResponse(BaseModel):
    records: int
    methods: list[str]
    out: str
    renormalized_inputs: bool


class InlineScoreRequest(BaseModel):
    """Score one logit row directly; no stores involved."""

    in_logits: list[float]
    out_logits: list[float] = []
    methods: list[str] = list(METHODS)
    temperature: float = 1.0


class InlineScoreResponse(BaseModel):
    scores: dict[str, float]


class EvalTaskModel(BaseModel):
    name: str
    positive_split: str
    negative_split: str
    method: str


class EvalRequest(BaseModel):
    scores: str
    tasks: str | list[EvalTaskModel]
    out: str
    markdown: bool = False


class TaskResultModel(BaseModel):
    name: str
    method: str
    auroc: float
    n_pos: int
    n_neg: int


class EvalResponse(BaseModel):
    tasks: list[TaskResultModel]
    out: str
    markdown_out: str | None = None


class MixtureRequest(BaseModel):
    boxes: str
    labels: str | LabelConfigModel
    method: str = "max_logit_diff"
    temperature: float = 1.0
    out: str
    truth: str | None = None
    report_out: str | None = None


class MixtureResponse(BaseModel):
    images: int
    with_g: int
    out: str
    tasks: list[TaskResultModel] = []
    report_out: str | None = None


class SynthRequest(BaseModel):
    config: str
    out_dir: str


class SynthResponse(BaseModel):
    written: list[str]


class ValidateRequest(BaseModel):
    labels: str | LabelConfigModel


class ValidateResponse(BaseModel):
    ok: bool
    violations: list[str]


class VersionResponse(BaseModel):
    version: str
    format_version: int
