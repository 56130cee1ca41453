"""HTTP service exposing the campaign statistics.

One long-running service can watch over many campaigns: clients condense
their local event logs or snapshot CSVs into small frequency payloads and
POST them here.  All endpoints are deterministic for identical payloads
(bootstrap seeds included), so responses can be diffed across runs.
"""

from __future__ import annotations

import io

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__, abundance, incidence, ingest
from ..bootstrap import BootstrapConfig, bootstrap_ci
from ..errors import FormulaRangeError, FuzzcastError
from ..evaluate import evaluate_estimator, evaluate_extrapolator, run_campaign_set
from ..simulate import (
    AdaptiveBias,
    Assemblage,
    geometric_assemblage,
    sample_campaign,
    uniform_assemblage,
    zipf_assemblage,
)
from ..species import INCIDENCE, MULTINOMIAL, AbundanceFrequencies, IncidenceFrequencies
from . import schemas

_METHOD_ALIASES = {
    "chao": "chao",
    "chao1": "chao",
    "chao2": "chao",
    "ichao": "ichao",
    "ichao1": "ichao",
    "ichao2": "ichao",
    "jk1": "jk1",
    "jackknife1": "jk1",
    "jk2": "jk2",
    "jackknife2": "jk2",
    "known": "known",
}


def compute_richness(
    freq: AbundanceFrequencies | IncidenceFrequencies,
    method: str,
    s_known: int | None = None,
) -> abundance.RichnessEstimate:
    """Resolve a method name (chao, ichao, jk1, jk2, known) for either model."""
    canon = _METHOD_ALIASES.get(method)
    if canon is None:
        raise ValueError(f"unknown estimation method {method!r}")
    if isinstance(freq, AbundanceFrequencies):
        if canon == "chao":
            return abundance.chao1(freq)
        if canon == "ichao":
            return abundance.ichao1(freq)
        if canon == "jk1":
            return abundance.jackknife(freq, 1)
        if canon == "jk2":
            return abundance.jackknife(freq, 2)
        return abundance.known_richness(freq, s_known)
    if canon == "chao":
        return incidence.chao2(freq)
    if canon == "ichao":
        return incidence.ichao2(freq)
    if canon == "known":
        return incidence.known_richness(freq, s_known)
    raise ValueError("jackknife estimators are not defined for incidence data")


def _bootstrap_estimator_name(method: str, model: str) -> str:
    canon = _METHOD_ALIASES[method]
    if model == MULTINOMIAL:
        return {"chao": "chao1", "ichao": "ichao1", "jk1": "jackknife1", "jk2": "jackknife2", "known": "known"}[canon]
    return {"chao": "chao2", "ichao": "ichao2", "known": "known"}[canon]


def _assemblage(req) -> Assemblage:
    if req.dist == "uniform":
        return uniform_assemblage(req.species, model=req.model, detection_rate=req.detection_rate)
    if req.dist == "geometric":
        return geometric_assemblage(
            req.species, req.ratio, model=req.model, peak_rate=req.detection_rate
        )
    return zipf_assemblage(req.species, req.exponent, model=req.model, peak_rate=req.detection_rate)


def _interval(freq, method, s_known, opts: schemas.BootstrapIn, estimator=None) -> schemas.IntervalOut:
    cfg = BootstrapConfig(replicates=opts.replicates, level=opts.level, seed=opts.seed)
    model = MULTINOMIAL if isinstance(freq, AbundanceFrequencies) else INCIDENCE
    target = estimator if estimator is not None else _bootstrap_estimator_name(method, model)
    interval = bootstrap_ci(freq, target, cfg)
    return schemas.IntervalOut(
        lower=interval.lower,
        upper=interval.upper,
        level=interval.level,
        degraded=interval.degraded,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="fuzzcast", version=__version__)

    @app.exception_handler(FuzzcastError)
    async def _domain_error(request, exc: FuzzcastError):
        return JSONResponse(
            status_code=422, content={"error": exc.code, "message": str(exc)}
        )

    @app.exception_handler(ValueError)
    async def _argument_error(request, exc: ValueError):
        return JSONResponse(
            status_code=400, content={"error": "argument", "message": str(exc)}
        )

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/estimate", response_model=schemas.EstimateResponse)
    def estimate(req: schemas.EstimateRequest) -> schemas.EstimateResponse:
        freq = req.snapshot.to_frequencies(req.s_known)
        rich = compute_richness(freq, req.method, freq.s_known)
        coverage = abundance.species_coverage(freq, rich)
        if isinstance(freq, AbundanceFrequencies):
            u = abundance.good_turing(freq)
            naive = None
            singles, doubles = freq.f1, freq.f2
        else:
            disc = incidence.incidence_discovery(freq, rich)
            u, naive = disc.u_hat, disc.naive
            singles, doubles = freq.q1, freq.q2
        inputs_next = (1.0 / u) if u > 0 else None
        seconds_next = (inputs_next / req.rate) if (inputs_next and req.rate) else None
        ci = _interval(freq, req.method, freq.s_known, req.bootstrap) if req.bootstrap else None
        return schemas.EstimateResponse(
            model=req.snapshot.model,
            n=freq.n,
            species=freq.s_obs,
            method=rich.method,
            s_hat=rich.s_hat,
            f0_hat=rich.f0_hat,
            degraded=rich.degraded,
            ci=ci,
            coverage=coverage,
            discovery=u,
            discovery_naive=naive,
            inputs_to_next=inputs_next,
            seconds_to_next=seconds_next,
            singletons=singles,
            doubletons=doubles,
        )

    @app.post("/extrapolate", response_model=schemas.ExtrapolateResponse)
    def extrapolate(req: schemas.ExtrapolateRequest) -> schemas.ExtrapolateResponse:
        freq = req.snapshot.to_frequencies(req.s_known)
        rich = compute_richness(freq, req.method, freq.s_known)
        points = []
        for m in req.horizons:
            if isinstance(freq, AbundanceFrequencies):
                pt = abundance.extrapolate_richness(freq, rich, m)
            else:
                pt = incidence.incidence_extrapolate(freq, rich, m)
            ci = None
            if req.bootstrap:

                def predict(fq, m=m):
                    r2 = compute_richness(fq, req.method, fq.s_known)
                    if isinstance(fq, AbundanceFrequencies):
                        return abundance.extrapolate_richness(fq, r2, m).s_pred
                    return incidence.incidence_extrapolate(fq, r2, m).s_pred

                ci = _interval(freq, req.method, freq.s_known, req.bootstrap, estimator=predict)
            points.append(
                schemas.ExtrapolatePointOut(
                    m_star=pt.m_star,
                    s_pred=pt.s_pred,
                    u_pred=pt.u_pred,
                    coverage_pred=min(1.0, pt.s_pred / rich.s_hat) if rich.s_hat > 0 else 1.0,
                    ci=ci,
                )
            )
        return schemas.ExtrapolateResponse(
            model=req.snapshot.model,
            n=freq.n,
            species=freq.s_obs,
            method=rich.method,
            s_hat=rich.s_hat,
            points=points,
        )

    @app.post("/effort", response_model=schemas.EffortResponse)
    def effort(req: schemas.EffortRequest) -> schemas.EffortResponse:
        freq = req.snapshot.to_frequencies(req.s_known)
        rich = compute_richness(freq, req.method, freq.s_known)
        coverage = abundance.species_coverage(freq, rich)
        note = None
        if isinstance(freq, AbundanceFrequencies):
            est = abundance.required_effort(freq, rich, req.target)
            m_exact, m_formula = est.m_exact, est.m_formula
        else:
            try:
                est = incidence.incidence_required_effort(freq, rich, req.target)
                m_exact, m_formula = est.m_exact, est.m_formula
            except FormulaRangeError as exc:
                m_exact, m_formula = exc.m_exact, None
                note = str(exc)
        return schemas.EffortResponse(
            model=req.snapshot.model,
            target=req.target,
            coverage_now=coverage,
            s_hat=rich.s_hat,
            m_exact=m_exact,
            m_formula=m_formula,
            note=note,
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
        asm = _assemblage(req)
        bias = (
            AdaptiveBias(boost=req.bias_boost, degree=req.bias_degree)
            if req.bias_boost
            else None
        )
        sink = io.StringIO() if req.include_events else None
        checkpoints = [req.inputs] if req.inputs > 0 else None
        campaign = sample_campaign(
            asm,
            req.inputs,
            req.seed,
            bias=bias,
            checkpoint_every=req.checkpoint_every,
            checkpoints=checkpoints,
            record_snapshots=True,
            sink=sink,
        )
        rows = []
        for n_at, fq in campaign.snapshots:
            rows.append(
                ingest.CampaignSnapshotRow(
                    time_s=n_at / req.rate,
                    n=n_at,
                    species=fq.s_obs,
                    f1=fq.f1 if req.model == MULTINOMIAL else fq.q1,
                    f2=fq.f2 if req.model == MULTINOMIAL else fq.q2,
                    f3=fq.f3 if req.model == MULTINOMIAL else fq.q3,
                    f4=fq.f4 if req.model == MULTINOMIAL else fq.q4,
                    model=req.model,
                    v=None if req.model == MULTINOMIAL else fq.v,
                )
            )
        return schemas.SimulateResponse(
            model=req.model,
            n=campaign.n,
            species_true=asm.s_true,
            species_discovered=int(campaign.discovered.sum()),
            events=sink.getvalue() if sink is not None else None,
            trajectory_csv=ingest.snapshots_to_csv(rows, model=req.model),
        )

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        asm = _assemblage(req)
        seeds = [req.seed + i for i in range(req.runs)]
        canon = _METHOD_ALIASES.get(req.estimator)
        if canon is None:
            raise ValueError(f"unknown estimation method {req.estimator!r}")
        if req.horizons:
            campaigns = [sample_campaign(asm, req.inputs, s) for s in seeds]

            def predict(fq, m):
                rich = compute_richness(fq, req.estimator, fq.s_known)
                if isinstance(fq, AbundanceFrequencies):
                    return abundance.extrapolate_richness(fq, rich, m).s_pred
                return incidence.incidence_extrapolate(fq, rich, m).s_pred

            report = evaluate_extrapolator(campaigns, req.horizons, predict)
        else:
            campaigns = run_campaign_set(
                asm, req.inputs, seeds, points=req.checkpoints, known=(canon == "known")
            )

            def score(fq):
                return compute_richness(fq, req.estimator, fq.s_known).s_hat

            score.__name__ = req.estimator
            report = evaluate_estimator(campaigns, score, reference=req.reference)
        return schemas.EvaluateResponse(
            kind=report.kind,
            rows=[schemas.EvaluateRowOut(**row) for row in report.as_dicts()],
        )

    return app


app = create_app()
