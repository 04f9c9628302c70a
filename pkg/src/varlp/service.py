"""HTTP service wrapping the verification laboratory.

Endpoints mirror the CLI: run a check suite, or compute a single norm,
weight-class constant, or operator estimate.  All request models accept
the same flat config keys as the config file via the ``config`` mapping;
explicit fields override it.  Config errors map to HTTP 400, missing
frozen fixtures to HTTP 409 (run calibration first), check failures are
not errors — they are reported in the response body.
"""

from __future__ import annotations

import json
import typing

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .config import ConfigError, config_from_mapping
from .harness import available_suites, run_suite
from .oneshot import (CONSTANT_KINDS, OPERATOR_NAMES, compute_constant,
                      compute_norm, compute_op)


class ConfigurableRequest(BaseModel):
    """Common run parameters; ``config`` takes any flat config-file key."""

    config: typing.Dict[str, typing.Any] = Field(default_factory=dict)
    n: typing.Optional[int] = None
    alpha: typing.Optional[float] = None
    seed: typing.Optional[int] = None
    refine: typing.Optional[bool] = None
    exponent: typing.Optional[str] = None
    weight: typing.Optional[str] = None

    def experiment_config(self, **extra):
        overrides = {k: getattr(self, k)
                     for k in ("n", "alpha", "seed", "refine", "exponent",
                               "weight")
                     if getattr(self, k) is not None}
        overrides.update({k: v for k, v in extra.items() if v is not None})
        return config_from_mapping(dict(self.config), **overrides)


class VerifyRequest(ConfigurableRequest):
    suite: str
    out_dir: typing.Optional[str] = None


class CheckRow(BaseModel):
    check_id: str
    paper_ref: str
    statistic: float
    bound: float
    polarity: str
    passed: bool
    runtime_ms: float


class VerifyResponse(BaseModel):
    suite: str
    exit_code: int
    passed: bool
    checks: typing.List[CheckRow]
    report: typing.Dict[str, typing.Any]
    json_path: str
    csv_path: str


class NormRequest(ConfigurableRequest):
    field: str = "power:0.5"


class ConstantRequest(ConfigurableRequest):
    constant: str


class OpRequest(ConfigurableRequest):
    operator: str
    k: typing.Optional[float] = None


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except FileNotFoundError as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc


def create_app():
    app = FastAPI(title="varlp verification service", version=__version__)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/suites")
    def suites():
        return {"suites": available_suites()}

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest):
        config = _run(req.experiment_config, suite=req.suite,
                      out_dir=req.out_dir)
        run = _run(run_suite, req.suite, config=config)
        checks = [CheckRow(check_id=r.check_id, paper_ref=r.paper_ref,
                           statistic=r.statistic, bound=r.bound,
                           polarity=r.polarity, passed=r.passed,
                           runtime_ms=r.runtime_ms)
                  for r in run.results]
        with open(run.json_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return VerifyResponse(suite=run.suite, exit_code=run.exit_code,
                              passed=run.passed, checks=checks, report=doc,
                              json_path=run.json_path, csv_path=run.csv_path)

    @app.post("/norm")
    def norm(req: NormRequest):
        config = _run(req.experiment_config)
        return _run(compute_norm, config, field=req.field)

    @app.post("/constant")
    def constant(req: ConstantRequest):
        if req.constant not in CONSTANT_KINDS:
            raise HTTPException(
                status_code=400,
                detail=f"unknown constant kind: {req.constant!r}")
        config = _run(req.experiment_config)
        return _run(compute_constant, config, req.constant)

    @app.post("/op")
    def op(req: OpRequest):
        if req.operator not in OPERATOR_NAMES:
            raise HTTPException(
                status_code=400, detail=f"unknown operator: {req.operator!r}")
        kw = {"op_k": req.k} if req.k is not None else {}
        config = _run(req.experiment_config, **kw)
        return _run(compute_op, config, req.operator)

    return app


app = create_app()
