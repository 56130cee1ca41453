"""Ground-truth campaign simulator.

Draws synthetic fuzzing campaigns from a known species distribution so that
estimators can be scored against the truth.  The random source is NumPy's
Philox 4x64 counter-based generator; given the same seed, the generated
stream is identical across platforms and across any split of the run into
separate calls, which makes "continue this campaign" reproduce a single
longer run exactly.

Campaigns can emit their event stream in the ingest event-file format and
record a trajectory of (n, S(n), true discovery probability) checkpoints.
The recorded truth is exact by construction: at any point the true
discovery probability is the rate mass of still-undiscovered species
divided by the total rate mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .species import (
    INCIDENCE,
    MULTINOMIAL,
    AbundanceFrequencies,
    IncidenceFrequencies,
)

_CHUNK = 1 << 16
_INCIDENCE_CELLS = 1 << 22


@dataclass(frozen=True)
class Assemblage:
    """A synthetic species pool with known per-species rates.

    For the multinomial model ``rates`` are relative abundances summing to
    1; for the incidence model they are independent per-input detection
    probabilities in (0, 1].
    """

    rates: np.ndarray
    model: str = MULTINOMIAL
    family: str = "custom"

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=np.float64)
        if rates.ndim != 1 or rates.size == 0:
            raise ValueError("an assemblage needs a 1-d, non-empty rate vector")
        if np.any(rates <= 0):
            raise ValueError("species rates must be positive")
        if self.model == MULTINOMIAL:
            rates = rates / rates.sum()
        elif self.model == INCIDENCE:
            if np.any(rates > 1):
                raise ValueError("incidence detection rates must be <= 1")
        else:
            raise ValueError(f"unknown model {self.model!r}")
        rates.flags.writeable = False
        object.__setattr__(self, "rates", rates)

    @property
    def s_true(self) -> int:
        return int(self.rates.size)


def uniform_assemblage(
    s: int, *, model: str = MULTINOMIAL, detection_rate: float = 0.01
) -> Assemblage:
    """All species equally likely (multinomial) or equally detectable (incidence)."""
    if s < 1:
        raise ValueError("species count must be >= 1")
    if model == MULTINOMIAL:
        rates = np.full(s, 1.0 / s)
    else:
        rates = np.full(s, detection_rate)
    return Assemblage(rates=rates, model=model, family="uniform")


def geometric_assemblage(
    s: int, ratio: float, *, model: str = MULTINOMIAL, peak_rate: float = 0.02
) -> Assemblage:
    """Rates decaying by a constant factor per species rank."""
    if s < 1:
        raise ValueError("species count must be >= 1")
    if not 0 < ratio <= 1:
        raise ValueError("ratio must be in (0, 1]")
    rates = ratio ** np.arange(s, dtype=np.float64)
    if model == INCIDENCE:
        rates = peak_rate * rates
    return Assemblage(rates=rates, model=model, family="geometric")


def zipf_assemblage(
    s: int, exponent: float, *, model: str = MULTINOMIAL, peak_rate: float = 0.05
) -> Assemblage:
    """Power-law rates, rank^-exponent; the classic heavy-tailed shape."""
    if s < 1:
        raise ValueError("species count must be >= 1")
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    rates = np.arange(1, s + 1, dtype=np.float64) ** -exponent
    if model == INCIDENCE:
        rates = peak_rate * rates
    return Assemblage(rates=rates, model=model, family="zipf")


def custom_assemblage(rates: Sequence[float], *, model: str = MULTINOMIAL) -> Assemblage:
    return Assemblage(rates=np.asarray(rates, dtype=np.float64), model=model)


@dataclass(frozen=True)
class AdaptiveBias:
    """Feedback model: discovering a species makes its neighbours hotter.

    On every first discovery of species i, the rates of the ring
    neighbourhood {i - degree, ..., i + degree} (indices mod S) are
    multiplied by ``boost``.  Multinomial rates are renormalized to sum to
    1 afterwards; incidence rates are capped at 1.
    """

    boost: float = 2.0
    degree: int = 2

    def __post_init__(self):
        if self.boost <= 1:
            raise ValueError("boost must be > 1; the feedback always amplifies")
        if self.degree < 0:
            raise ValueError("degree must be >= 0")


@dataclass(frozen=True)
class TrajectoryPoint:
    """Recorded truth at one checkpoint of a simulated campaign."""

    n: int
    s_obs: int
    u_true: float


class Campaign:
    """A running simulated campaign; create via :func:`sample_campaign`."""

    def __init__(
        self,
        assemblage: Assemblage,
        seed: int,
        *,
        bias: AdaptiveBias | None = None,
        checkpoint_every: int | None = None,
        checkpoints: Sequence[int] | None = None,
        record_snapshots: bool = False,
        snapshot_known: bool = False,
        sink: IO[str] | list[str] | None = None,
    ):
        if checkpoint_every is not None and checkpoint_every < 1:
            raise ValueError("checkpoint_every must be >= 1")
        self.assemblage = assemblage
        self.model = assemblage.model
        self.bias = bias
        self.seed = seed
        self.rng = np.random.Generator(np.random.Philox(key=seed))
        self.rates = assemblage.rates.copy()
        s = assemblage.s_true
        self.counts = np.zeros(s, dtype=np.int64)
        self.discovered = np.zeros(s, dtype=bool)
        self.n = 0
        self.v = 0
        self.trajectory: list[TrajectoryPoint] = [TrajectoryPoint(0, 0, 1.0)]
        self.snapshots: list[tuple[int, AbundanceFrequencies | IncidenceFrequencies]] = []
        self._record_snapshots = record_snapshots
        self._snapshot_known = snapshot_known
        self._checkpoint_every = checkpoint_every
        self._explicit_cps = sorted(set(checkpoints)) if checkpoints else []
        self._sink = sink
        self._tokens: list[str] | None = None
        self._cdf: np.ndarray | None = None
        if self.model == MULTINOMIAL:
            self._rebuild_cdf()

    # -- plumbing ---------------------------------------------------------

    def _rebuild_cdf(self):
        cdf = np.cumsum(self.rates)
        cdf[-1] = max(cdf[-1], 1.0)
        self._cdf = cdf

    def _next_checkpoint(self) -> int | None:
        candidates = []
        if self._checkpoint_every:
            k = self._checkpoint_every
            candidates.append((self.n // k + 1) * k)
        for cp in self._explicit_cps:
            if cp > self.n:
                candidates.append(cp)
                break
        return min(candidates) if candidates else None

    def _checkpoint(self):
        self.trajectory.append(
            TrajectoryPoint(n=self.n, s_obs=int(self.discovered.sum()), u_true=self.true_discovery())
        )
        if self._record_snapshots:
            self.snapshots.append((self.n, self.snapshot(known=self._snapshot_known)))

    def _token_table(self) -> list[str]:
        if self._tokens is None:
            self._tokens = [f"s{i:06d}" for i in range(self.assemblage.s_true)]
        return self._tokens

    def _emit(self, lines: list[str]):
        if self._sink is None:
            return
        if isinstance(self._sink, list):
            self._sink.extend(lines)
        else:
            self._sink.write("\n".join(lines) + "\n")

    def _boost_around(self, species: int):
        assert self.bias is not None
        s = self.rates.size
        d = self.bias.degree
        idx = (np.arange(species - d, species + d + 1)) % s
        self.rates[idx] *= self.bias.boost
        if self.model == MULTINOMIAL:
            self.rates /= self.rates.sum()
            self._rebuild_cdf()
        else:
            np.clip(self.rates, None, 1.0, out=self.rates)

    # -- observable truth -------------------------------------------------

    def true_discovery(self) -> float:
        """Undiscovered share of the total rate mass (exact, not estimated)."""
        total = self.rates.sum()
        return float(self.rates[~self.discovered].sum() / total)

    def snapshot(
        self, known: bool = False
    ) -> AbundanceFrequencies | IncidenceFrequencies:
        """Frequency summary of the campaign so far.

        Args:
            known: attach the assemblage's true size as ``s_known`` (for
                exercising the known-total estimator).
        """
        nonzero = self.counts[self.counts > 0]
        ks, cs = np.unique(nonzero, return_counts=True)
        fmap = {int(k): int(c) for k, c in zip(ks, cs)}
        s_known = self.assemblage.s_true if known else None
        if self.model == MULTINOMIAL:
            return AbundanceFrequencies(
                n=self.n, s_obs=int(nonzero.size), f=fmap, s_known=s_known
            )
        return IncidenceFrequencies(
            n=self.n, s_obs=int(nonzero.size), q=fmap, v=self.v, s_known=s_known
        )

    # -- generation -------------------------------------------------------

    def run(self, m: int) -> "Campaign":
        """Generate ``m`` further inputs, updating counts and checkpoints."""
        if m < 0:
            raise ValueError("cannot generate a negative number of inputs")
        remaining = m
        while remaining > 0:
            cap = remaining
            cp = self._next_checkpoint()
            if cp is not None:
                cap = min(cap, cp - self.n)
            if self.model == MULTINOMIAL:
                step = min(cap, _CHUNK)
                self._run_multinomial(step)
            else:
                step = min(cap, max(1, _INCIDENCE_CELLS // self.rates.size))
                self._run_incidence(step)
            remaining -= step
            if cp is not None and self.n == cp:
                self._checkpoint()
        if self.trajectory[-1].n != self.n:
            self._checkpoint()
        return self

    def _run_multinomial(self, m: int):
        u = self.rng.random(m)
        if self.bias is None:
            idx = np.searchsorted(self._cdf, u, side="right")
            self.counts += np.bincount(idx, minlength=self.counts.size)
            self.discovered[idx] = True
            self.n += m
            self.v += m
            if self._sink is not None:
                tokens = self._token_table()
                self._emit([tokens[i] for i in idx])
            return
        emitted: list[int] = []
        pos = 0
        while pos < m:
            idx = np.searchsorted(self._cdf, u[pos:], side="right")
            fresh = ~self.discovered[idx]
            if not fresh.any():
                take = idx
            else:
                first = int(np.argmax(fresh))
                take = idx[: first + 1]
            self.counts += np.bincount(take, minlength=self.counts.size)
            self.discovered[take] = True
            emitted.extend(take.tolist())
            pos += take.size
            if fresh.any():
                self._boost_around(int(take[-1]))
        self.n += m
        self.v += m
        if self._sink is not None:
            tokens = self._token_table()
            self._emit([tokens[i] for i in emitted])

    def _run_incidence(self, m: int):
        s = self.rates.size
        if self.bias is None:
            hits = self.rng.random((m, s)) < self.rates
            self.counts += hits.sum(axis=0)
            self.discovered |= hits.any(axis=0)
            self.v += int(hits.sum())
            self.n += m
            if self._sink is not None:
                tokens = self._token_table()
                lines = [" ".join(tokens[i] for i in np.nonzero(row)[0]) for row in hits]
                self._emit(lines)
            return
        tokens = self._token_table() if self._sink is not None else None
        lines: list[str] = []
        for _ in range(m):
            row = self.rng.random(s) < self.rates
            new = row & ~self.discovered
            self.counts += row
            self.discovered |= row
            self.v += int(row.sum())
            self.n += 1
            if tokens is not None:
                lines.append(" ".join(tokens[i] for i in np.nonzero(row)[0]))
            for species in np.nonzero(new)[0]:
                self._boost_around(int(species))
        if lines:
            self._emit(lines)


def sample_campaign(
    assemblage: Assemblage,
    n: int,
    seed: int,
    *,
    bias: AdaptiveBias | None = None,
    checkpoint_every: int | None = None,
    checkpoints: Sequence[int] | None = None,
    record_snapshots: bool = False,
    snapshot_known: bool = False,
    sink: IO[str] | list[str] | None = None,
) -> Campaign:
    """Run a fresh simulated campaign of ``n`` inputs.

    Args:
        assemblage: the ground-truth species pool.
        n: number of inputs to generate (0 gives the empty campaign with
            S(0) = 0 and a true discovery probability of 1).
        seed: Philox key; equal seeds give equal campaigns everywhere.
        bias: optional adaptive feedback model.
        checkpoint_every: record a trajectory point every this many inputs.
        checkpoints: additional absolute n values to record at.
        record_snapshots: also store a frequency summary at each checkpoint.
        snapshot_known: recorded summaries carry the true size as s_known.
        sink: stream or list receiving the event lines as they are drawn.

    Returns:
        The finished :class:`Campaign`, which can be continued.
    """
    campaign = Campaign(
        assemblage,
        seed,
        bias=bias,
        checkpoint_every=checkpoint_every,
        checkpoints=checkpoints,
        record_snapshots=record_snapshots,
        snapshot_known=snapshot_known,
        sink=sink,
    )
    return campaign.run(n)


def continue_campaign(campaign: Campaign, m: int) -> Campaign:
    """Generate ``m`` further inputs on an existing campaign.

    The random stream carries on where it stopped, so running n inputs and
    then continuing for m is indistinguishable from a single n + m run with
    the same seed.
    """
    return campaign.run(m)
