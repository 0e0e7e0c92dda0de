"""FastAPI application wrapping the compute handlers."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import QeslabError
from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(title="qeslab", version=__version__)

    def guarded(fn, request):
        try:
            return fn(request)
        except QeslabError as exc:
            raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}") from exc
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/classify", response_model=schemas.ClassifyResponse)
    def classify(request: schemas.ClassifyRequest) -> schemas.ClassifyResponse:
        return guarded(handlers.run_classify, request)

    @app.post("/spectrum", response_model=schemas.SpectrumResponse)
    def spectrum(request: schemas.SpectrumRequest) -> schemas.SpectrumResponse:
        return guarded(handlers.run_spectrum, request)

    @app.post("/dualize", response_model=schemas.DualizeResponse)
    def dualize(request: schemas.DualizeRequest) -> schemas.DualizeResponse:
        return guarded(handlers.run_dualize, request)

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve(request: schemas.SolveRequest) -> schemas.SolveResponse:
        return guarded(handlers.run_solve, request)

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def verify(request: schemas.VerifyRequest) -> schemas.VerifyResponse:
        return guarded(handlers.run_verify, request)

    @app.post("/crosscheck", response_model=schemas.CrosscheckResponse)
    def crosscheck(request: schemas.CrosscheckRequest) -> schemas.CrosscheckResponse:
        return guarded(handlers.run_crosscheck, request)

    return app


app = create_app()
