"""FastAPI app exposing the scoring pipeline.

Error contract: config problems (bad methods, malformed label sets,
nonsensical parameters) return 400; data problems (missing or corrupt
files, dimension mismatches, unknown splits) return 422. Bodies carry
``{"error": {"category", "type", "message"}}`` so clients can map failures
to exit codes without parsing prose. Request-shape violations caught by
validation are reported as config errors.
"""

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import ConfigError, DataError
from . import handlers, models


def _error_body(category: str, exc_type: str, message: str) -> dict:
    return {"error": {"category": category, "type": exc_type, "message": message}}


def create_app() -> FastAPI:
    app = FastAPI(title="oodscore", version=__version__)

    @app.exception_handler(ConfigError)
    async def config_error(request: Request, exc: ConfigError):
        return JSONResponse(
            status_code=400,
            content=_error_body("config", type(exc).__name__, str(exc)),
        )

    @app.exception_handler(DataError)
    async def data_error(request: Request, exc: DataError):
        return JSONResponse(
            status_code=422,
            content=_error_body("data", type(exc).__name__, str(exc)),
        )

    @app.exception_handler(RequestValidationError)
    async def bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=_error_body("config", "RequestValidationError", str(exc.errors())),
        )

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.get("/v1/version", response_model=models.VersionResponse)
    async def version():
        return handlers.version()

    @app.post("/v1/score", response_model=models.ScoreResponse)
    async def score(req: models.ScoreRequest):
        return handlers.score(req)

    @app.post("/v1/score/inline", response_model=models.InlineScoreResponse)
    async def score_inline(req: models.InlineScoreRequest):
        return handlers.score_inline(req)

    @app.post("/v1/eval", response_model=models.EvalResponse)
    async def evaluate(req: models.EvalRequest):
        return handlers.evaluate(req)

    @app.post("/v1/mixture", response_model=models.MixtureResponse)
    async def mixture_run(req: models.MixtureRequest):
        return handlers.mixture_run(req)

    @app.post("/v1/synth", response_model=models.SynthResponse)
    async def synth_run(req: models.SynthRequest):
        return handlers.synth_run(req)

    @app.post("/v1/labels/validate", response_model=models.ValidateResponse)
    async def validate(req: models.ValidateRequest):
        return handlers.validate(req)

    return app


app = create_app()
