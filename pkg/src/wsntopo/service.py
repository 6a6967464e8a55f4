"""HTTP face of the experiment runners.

Every endpoint is a pure function of its request body: the response carries
the produced documents and CSV text, and the caller decides what to write
where.  Domain configuration problems surface as 400 with a ``kind`` field;
schema violations are FastAPI's usual 422.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .config import ExperimentConfig
from .errors import (
    AnalysisError,
    ConfigError,
    ElectionError,
    SeedTopologyError,
    WsnTopoError,
)
from .experiments import (
    MODEL_NAMES,
    run_analyze,
    run_fig2,
    run_fig3,
    run_generate,
    run_table2,
)
from .graph import Graph

__all__ = ["create_app"]


class GenerateRequest(BaseModel):
    config: ExperimentConfig = Field(default_factory=ExperimentConfig)
    model: str
    m: int | None = None


class GenerateResponse(BaseModel):
    model: str
    label: str
    deployments: list[dict]
    graphs: list[dict]
    reports: list[dict | None]
    stats: list[dict]


class ConfigRequest(BaseModel):
    config: ExperimentConfig = Field(default_factory=ExperimentConfig)


class Table2Response(BaseModel):
    csv: str
    rows: list[dict]


class Fig2Response(BaseModel):
    files: dict[str, str]
    ks_stats: dict[str, dict]
    sub_m_fraction: dict[str, float]


class Fig3Response(BaseModel):
    csv: str
    rows: list[dict]


class GraphDocument(BaseModel):
    node_count: int
    directed: bool = False
    edges: list[tuple[int, int]]


class AnalyzeRequest(BaseModel):
    graph: GraphDocument
    sink: int | None = None


class AnalyzeResponse(BaseModel):
    node_count: int
    edge_count: int
    directed: bool
    avg_degree: float
    min_degree: int
    max_degree: int
    gc_size: int
    gc_fraction: float
    sink_component_size: int | None


def _config_error(exc: WsnTopoError) -> HTTPException:
    return HTTPException(status_code=400, detail={"kind": "config", "error": str(exc)})


def create_app() -> FastAPI:
    app = FastAPI(
        title="wsntopo",
        description="Sensor-network topology construction and robustness analysis",
    )

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/defaults", response_model=ExperimentConfig)
    def defaults() -> ExperimentConfig:
        return ExperimentConfig()

    @app.get("/api/models")
    def models() -> dict:
        return {"models": list(MODEL_NAMES)}

    @app.post("/api/generate", response_model=GenerateResponse)
    def generate(req: GenerateRequest) -> GenerateResponse:
        try:
            result = run_generate(req.config, req.model, req.m)
        except (ConfigError, SeedTopologyError, ElectionError) as exc:
            raise _config_error(exc) from exc
        return GenerateResponse(
            model=result.model,
            label=result.label,
            deployments=result.deployments,
            graphs=result.graphs,
            reports=result.reports,
            stats=result.stats,
        )

    @app.post("/api/table2", response_model=Table2Response)
    def table2(req: ConfigRequest) -> Table2Response:
        try:
            result = run_table2(req.config)
        except (ConfigError, SeedTopologyError, ElectionError) as exc:
            raise _config_error(exc) from exc
        return Table2Response(csv=result.csv, rows=result.rows)

    @app.post("/api/fig2", response_model=Fig2Response)
    def fig2(req: ConfigRequest) -> Fig2Response:
        try:
            result = run_fig2(req.config)
        except (ConfigError, SeedTopologyError, ElectionError) as exc:
            raise _config_error(exc) from exc
        return Fig2Response(
            files=result.files,
            ks_stats=result.ks_stats,
            sub_m_fraction=result.sub_m_fraction,
        )

    @app.post("/api/fig3", response_model=Fig3Response)
    def fig3(req: ConfigRequest) -> Fig3Response:
        try:
            result = run_fig3(req.config)
        except (ConfigError, SeedTopologyError, ElectionError) as exc:
            raise _config_error(exc) from exc
        return Fig3Response(csv=result.csv, rows=result.rows)

    @app.post("/api/analyze", response_model=AnalyzeResponse)
    def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
        try:
            graph = Graph.from_json_dict(req.graph.model_dump())
            stats = run_analyze(graph, req.sink)
        except (ConfigError, AnalysisError) as exc:
            raise _config_error(exc) from exc
        return AnalyzeResponse(**stats)

    return app
