"""HTTP front door: a thin JSON adapter over the engine and model layers.

Every response is derived from one library call plus serialization; no
search or model logic lives here.  Error bodies are always {code, message}.
Index and model swaps are plain reference replacements, so in-flight
requests finish on the snapshot they started with.
"""

from __future__ import annotations

import logging
import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .config import ServiceConfig
from .corpus import alphabet_stats, build_index, load_corpus_jsonl, load_index, save_index
from .engine import ConfigurationError, Engine, SearchOptions, SearchRequest, StaleFeedbackError
from .interest import UserProfile, load_model, predict, save_model
from .wordspace import build_codebook, load_embeddings

logger = logging.getLogger(__name__)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class ServiceState:
    """Loaded snapshots plus the mutable profile store and build lock."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.engine: Engine | None = None
        self.profiles: dict[str, list[str]] = {}
        self.build_lock = threading.Lock()
        self.table = None
        self.codebook = None
        self.params = None
        self.weights = None
        self.corpus = None

    @classmethod
    def from_config(cls, config: ServiceConfig) -> ServiceState:
        problems = config.validate()
        if problems:
            raise ValueError("invalid configuration: " + "; ".join(problems))
        state = cls(config)
        if config.index_path and _exists(config.index_path):
            state.corpus = load_index(config.index_path)
        elif config.corpus_path:
            state.corpus = build_index(load_corpus_jsonl(config.corpus_path))
        if config.model_path and _exists(config.model_path):
            state.params, state.weights, state.profiles = load_model(config.model_path)
        if config.vectors_path:
            state.table = load_embeddings(config.vectors_path)
            if state.corpus is not None and state.corpus.keyword_index:
                state.codebook, missing = build_codebook(
                    state.table, sorted(state.corpus.keyword_index)
                )
                if missing:
                    logger.info("%d corpus labels absent from the vector table", len(missing))
        state._rebuild_engine()
        return state

    def _rebuild_engine(self) -> None:
        if self.corpus is None:
            self.engine = None
            return
        c = self.config
        self.engine = Engine(
            self.corpus,
            params=self.params,
            weights=self.weights,
            table=self.table,
            codebook=self.codebook,
            th1=c.th1,
            th2=c.th2,
            beta=c.beta,
            gamma=c.gamma,
            journal_size=c.journal_size,
        )

    def persist_model(self) -> None:
        if self.config.model_path and self.params is not None and self.engine is not None:
            save_model(self.config.model_path, self.params, self.engine.weights, self.profiles)

    def require_engine(self) -> Engine:
        if self.engine is None:
            raise ApiError(503, "corpus_not_loaded", "no index has been built or loaded")
        return self.engine

    def require_params(self):
        if self.params is None:
            raise ApiError(400, "model_not_loaded", "no interest model is loaded")
        return self.params


def _exists(path: str) -> bool:
    import os

    return os.path.exists(path)


class SearchOptionsBody(BaseModel):
    use_prediction: bool | None = None
    use_word2vec: bool | None = None
    max_results: int | None = None
    threshold: float | None = None
    expansion_n: int | None = None
    top_interests: int | None = None
    assoc_mode: str | None = None


class SearchBody(BaseModel):
    text: str = ""
    user_id: str | None = None
    options: SearchOptionsBody | None = None


class FeedbackBody(BaseModel):
    request_id: str
    item_id: str
    accept: bool


class ProfileBody(BaseModel):
    factors: list[str]


class BuildBody(BaseModel):
    corpus_path: str


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="ifind", version="0.1.0")

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc.errors()[:3])}
        )

    def _options(body: SearchOptionsBody | None) -> SearchOptions:
        c = state.config
        opts = SearchOptions(
            use_prediction=c.use_prediction,
            use_word2vec=c.use_word2vec,
            max_results=c.max_results,
            threshold=c.threshold,
            expansion_n=c.expansion_n,
            top_interests=c.top_interests,
        )
        if body is None:
            return opts
        overrides = {k: v for k, v in body.model_dump().items() if v is not None}
        try:
            return SearchOptions(
                **{**opts.__dict__, **overrides}
            )
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc))

    def _profile_for(user_id: str | None) -> UserProfile | None:
        if user_id is None:
            return None
        factors = state.profiles.get(user_id)
        return UserProfile(frozenset(factors)) if factors else None

    @app.post("/v1/search")
    def search(body: SearchBody):
        engine = state.require_engine()
        profile = _profile_for(body.user_id)
        if not body.text and profile is None:
            raise ApiError(400, "empty_request", "search needs a non-empty text or a stored profile")
        try:
            response = engine.search(SearchRequest(body.text, profile, _options(body.options)))
        except ConfigurationError as exc:
            raise ApiError(400, "configuration_error", str(exc))
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc))
        return {
            "request_id": response.request_id,
            "results": [
                {
                    "item_id": r.item_id,
                    "title": r.title,
                    "score": r.score,
                    "provenance": r.provenance,
                }
                for r in response.results
            ],
            "predicted_interests": list(response.predicted_interests),
            "expansions": response.expansions,
        }

    @app.post("/v1/feedback")
    def feedback(body: FeedbackBody):
        engine = state.require_engine()
        try:
            updated = engine.record_feedback(body.request_id, body.item_id, body.accept)
        except StaleFeedbackError:
            raise ApiError(410, "stale_request", f"unknown or expired request_id {body.request_id!r}")
        if updated:
            state.persist_model()
        return {"updated": updated}

    @app.put("/v1/users/{user_id}/profile", status_code=204)
    def put_profile(user_id: str, body: ProfileBody):
        params = state.require_params()
        if not body.factors:
            raise ApiError(422, "invalid_profile", "profile needs at least one factor")
        known = set(params.factors)
        for factor in body.factors:
            if factor not in known:
                raise ApiError(422, "unknown_factor", f"unknown profile factor: {factor!r}")
        state.profiles[user_id] = sorted(set(body.factors))
        state.persist_model()
        return Response(status_code=204)

    @app.get("/v1/users/{user_id}/interests")
    def interests(user_id: str, top: int = 4):
        params = state.require_params()
        engine = state.require_engine()
        factors = state.profiles.get(user_id)
        if not factors:
            raise ApiError(404, "unknown_user", f"no stored profile for user {user_id!r}")
        try:
            ranked = predict(UserProfile(frozenset(factors)), params, engine.weights, top)
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc))
        return {
            "user_id": user_id,
            "interests": [{"interest": k, "score": s} for k, s in ranked],
        }

    @app.post("/v1/index/build")
    def index_build(body: BuildBody):
        if not state.build_lock.acquire(blocking=False):
            raise ApiError(409, "build_in_progress", "an index build is already running")
        try:
            try:
                items = load_corpus_jsonl(body.corpus_path)
                corpus = build_index(items)
            except (OSError, ValueError) as exc:
                raise ApiError(400, "bad_corpus", str(exc))
            if state.config.index_path:
                save_index(corpus, state.config.index_path)
            state.corpus = corpus
            if state.table is not None and corpus.keyword_index:
                state.codebook, _ = build_codebook(state.table, sorted(corpus.keyword_index))
            state._rebuild_engine()
        finally:
            state.build_lock.release()
        keyword_count, alphabet_size = alphabet_stats(corpus)
        return {"items": len(corpus.items), "keyword_count": keyword_count,
                "alphabet_size": alphabet_size}

    @app.get("/v1/healthz")
    def healthz():
        corpus = state.corpus
        keyword_count, alphabet_size = alphabet_stats(corpus) if corpus else (0, 0)
        return {
            "status": "ok",
            "corpus_loaded": corpus is not None,
            "model_loaded": state.params is not None,
            "keyword_count": keyword_count,
            "alphabet_size": alphabet_size,
        }

    @app.get("/v1/vocab")
    def vocab():
        params = state.params
        return {
            "factors": list(params.factors) if params else [],
            "interests": list(params.interests) if params else [],
        }

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    state = ServiceState.from_config(config)
    app = create_app(state)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
