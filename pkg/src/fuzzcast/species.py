"""Species accounting for fuzzing campaigns.

A campaign is a stream of generated inputs.  Each input either belongs to
exactly one species (multinomial model, e.g. the path it exercises) or
touches a set of species (incidence model, e.g. the statements it covers).
This module accumulates those observations and condenses them into the
frequency summaries that every estimator in the package consumes.

Terminology used throughout:

* ``n``      number of inputs processed so far.
* ``s_obs``  number of distinct species discovered, S(n).
* ``f_k``    number of species observed exactly k times (abundance).
* ``q_k``    number of species detected by exactly k inputs (incidence).
* ``v``      total incidence count, sum of k * q_k.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .errors import ModeViolationError, SchemaError

MULTINOMIAL = "multinomial"
INCIDENCE = "incidence"

# Species not singled out by the estimators (count >= 5) start here.  The
# marginal constructors rebuild a tail at or above this abundance.
_TAIL_MIN = 5


def species_id(token: str) -> int:
    """Map a species identifier string to a stable 64-bit integer.

    The mapping is a truncated BLAKE2b digest, so it does not depend on the
    process hash seed and is reproducible across platforms and runs.

    Args:
        token: the identifier reported by the fuzzer (path id, branch pair,
            crash site, ...).

    Returns:
        An unsigned 64-bit integer identifying the species.
    """
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _normalize_counts(raw: Mapping[int, int], what: str) -> dict[int, int]:
    out: dict[int, int] = {}
    for k in sorted(raw):
        c = raw[k]
        if k < 1:
            raise ValueError(f"{what} keys must be >= 1, got {k}")
        if c < 0:
            raise ValueError(f"{what}[{k}] must be >= 0, got {c}")
        if c > 0:
            out[int(k)] = int(c)
    return out


@dataclass(frozen=True, eq=True)
class AbundanceFrequencies:
    """Immutable frequency summary of a multinomial (one species per input) stream.

    Attributes:
        n: number of inputs.
        s_obs: number of distinct species observed.
        f: sparse map k -> f_k for k >= 1 (zero entries are dropped).
        s_known: externally known true number of species, if any.
    """

    n: int
    s_obs: int
    f: Mapping[int, int] = field(default_factory=dict)
    s_known: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "f", _normalize_counts(self.f, "f"))
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if sum(self.f.values()) != self.s_obs:
            raise ValueError("sum of f_k must equal s_obs")
        if sum(k * c for k, c in self.f.items()) != self.n:
            raise ValueError("sum of k * f_k must equal n")
        if self.s_known is not None and self.s_known < self.s_obs:
            raise ValueError("s_known cannot be below the observed species count")

    @property
    def f1(self) -> int:
        return self.f.get(1, 0)

    @property
    def f2(self) -> int:
        return self.f.get(2, 0)

    @property
    def f3(self) -> int:
        return self.f.get(3, 0)

    @property
    def f4(self) -> int:
        return self.f.get(4, 0)

    def abundances(self) -> list[int]:
        """Expand the sparse map into one count per observed species, ascending."""
        out: list[int] = []
        for k in sorted(self.f):
            out.extend([k] * self.f[k])
        return out

    @classmethod
    def from_marginals(
        cls,
        n: int,
        s_obs: int,
        f1: int = 0,
        f2: int = 0,
        f3: int = 0,
        f4: int = 0,
        s_known: int | None = None,
    ) -> "AbundanceFrequencies":
        """Rebuild a valid snapshot from logged marginals (n, s_obs, f1..f4).

        Species outside f1..f4 necessarily have abundance >= 5; their counts
        are not recoverable from the marginals, so the remainder is spread as
        evenly as possible over the unaccounted species.  Estimators only read
        n, s_obs and f1..f4, so the synthetic tail does not affect them.

        Raises:
            SchemaError: if the marginals are mutually inconsistent.
        """
        head = {k: c for k, c in zip((1, 2, 3, 4), (f1, f2, f3, f4)) if c}
        tail_species = s_obs - (f1 + f2 + f3 + f4)
        tail_inputs = n - (f1 + 2 * f2 + 3 * f3 + 4 * f4)
        if tail_species < 0:
            raise SchemaError("f1..f4 exceed the observed species count")
        if tail_species == 0:
            if tail_inputs != 0:
                raise SchemaError("counts leave inputs unaccounted for")
        else:
            if tail_inputs < _TAIL_MIN * tail_species:
                raise SchemaError(
                    "counts are inconsistent: species beyond f4 need "
                    f"at least {_TAIL_MIN} inputs each"
                )
            base = tail_inputs // tail_species
            extra = tail_inputs - base * tail_species
            if tail_species - extra:
                head[base] = head.get(base, 0) + (tail_species - extra)
            if extra:
                head[base + 1] = head.get(base + 1, 0) + extra
        return cls(n=n, s_obs=s_obs, f=head, s_known=s_known)


@dataclass(frozen=True, eq=True)
class IncidenceFrequencies:
    """Immutable frequency summary of an incidence (species set per input) stream.

    Attributes:
        n: number of sampling units (inputs).
        s_obs: number of distinct species detected.
        q: sparse map k -> q_k for k >= 1 (zero entries are dropped).
        v: total incidence count, sum over species of detections.
        s_known: externally known true number of species, if any.
    """

    n: int
    s_obs: int
    q: Mapping[int, int] = field(default_factory=dict)
    v: int = 0
    s_known: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "q", _normalize_counts(self.q, "q"))
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if sum(self.q.values()) != self.s_obs:
            raise ValueError("sum of q_k must equal s_obs")
        if sum(k * c for k, c in self.q.items()) != self.v:
            raise ValueError("sum of k * q_k must equal v")
        if any(k > self.n for k in self.q):
            raise ValueError("a species cannot be detected by more inputs than exist")
        if self.s_known is not None and self.s_known < self.s_obs:
            raise ValueError("s_known cannot be below the observed species count")

    @property
    def q1(self) -> int:
        return self.q.get(1, 0)

    @property
    def q2(self) -> int:
        return self.q.get(2, 0)

    @property
    def q3(self) -> int:
        return self.q.get(3, 0)

    @property
    def q4(self) -> int:
        return self.q.get(4, 0)

    def incidences(self) -> list[int]:
        """Expand the sparse map into one detection count per species, ascending."""
        out: list[int] = []
        for k in sorted(self.q):
            out.extend([k] * self.q[k])
        return out

    @classmethod
    def from_marginals(
        cls,
        n: int,
        s_obs: int,
        q1: int = 0,
        q2: int = 0,
        q3: int = 0,
        q4: int = 0,
        v: int = 0,
        s_known: int | None = None,
    ) -> "IncidenceFrequencies":
        """Rebuild a valid snapshot from logged marginals (n, s_obs, q1..q4, v).

        Same tail reconstruction as :meth:`AbundanceFrequencies.from_marginals`,
        with the incidence total ``v`` in place of ``n``.
        """
        head = {k: c for k, c in zip((1, 2, 3, 4), (q1, q2, q3, q4)) if c}
        tail_species = s_obs - (q1 + q2 + q3 + q4)
        tail_v = v - (q1 + 2 * q2 + 3 * q3 + 4 * q4)
        if tail_species < 0:
            raise SchemaError("q1..q4 exceed the observed species count")
        if tail_species == 0:
            if tail_v != 0:
                raise SchemaError("counts leave incidences unaccounted for")
        else:
            if tail_v < _TAIL_MIN * tail_species:
                raise SchemaError(
                    "counts are inconsistent: species beyond q4 need "
                    f"at least {_TAIL_MIN} detections each"
                )
            if n and tail_v > n * tail_species:
                raise SchemaError("counts imply a species detected more than n times")
            base = tail_v // tail_species
            extra = tail_v - base * tail_species
            if tail_species - extra:
                head[base] = head.get(base, 0) + (tail_species - extra)
            if extra:
                head[base + 1] = head.get(base + 1, 0) + extra
        return cls(n=n, s_obs=s_obs, q=head, v=v, s_known=s_known)


class SpeciesAccumulator:
    """Streaming tally of species observations for one campaign.

    The accumulator keeps the full per-species count map (not only the
    f_k margins) so that snapshots, evenness profiles and bootstrap
    resampling all work from the same object.  Memory is O(s_obs).

    Args:
        mode: ``"multinomial"`` (each input is exactly one species) or
            ``"incidence"`` (each input reports a set of species).
        s_known: the true number of species, when known up front (for
            example the number of reachable statements).
    """

    def __init__(self, mode: str = MULTINOMIAL, s_known: int | None = None):
        if mode not in (MULTINOMIAL, INCIDENCE):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.s_known = s_known
        self.counts: dict[Hashable, int] = {}
        self.n = 0
        self.v = 0

    @property
    def s_obs(self) -> int:
        return len(self.counts)

    def observe(self, species: Hashable | Iterable[Hashable]) -> "SpeciesAccumulator":
        """Record one generated input.

        Args:
            species: the species the input belongs to.  A single key
                (str/int/bytes) or an iterable of keys.  In multinomial mode
                exactly one distinct key is required; in incidence mode the
                keys are de-duplicated and an empty set is a valid
                observation (the input still counts toward n).

        Returns:
            self, updated in place.

        Raises:
            ModeViolationError: multinomial input with != 1 distinct species.
        """
        if isinstance(species, (str, bytes, int)):
            keys = {species}
        else:
            keys = set(species)
        if self.mode == MULTINOMIAL:
            if len(keys) != 1:
                raise ModeViolationError(
                    f"multinomial input must have exactly one species, got {len(keys)}"
                )
            (key,) = keys
            self.counts[key] = self.counts.get(key, 0) + 1
            self.n += 1
            self.v += 1
        else:
            for key in keys:
                self.counts[key] = self.counts.get(key, 0) + 1
            self.n += 1
            self.v += len(keys)
        return self

    def abundance_snapshot(self) -> AbundanceFrequencies:
        """Condense the current state into abundance frequency counts.

        Raises:
            ModeViolationError: if the accumulator is in incidence mode.
        """
        if self.mode != MULTINOMIAL:
            raise ModeViolationError("abundance snapshot requires a multinomial accumulator")
        freq = Counter(self.counts.values())
        return AbundanceFrequencies(
            n=self.n, s_obs=self.s_obs, f=dict(freq), s_known=self.s_known
        )

    def incidence_snapshot(self) -> IncidenceFrequencies:
        """Condense the current state into incidence frequency counts.

        Raises:
            ModeViolationError: if the accumulator is in multinomial mode.
        """
        if self.mode != INCIDENCE:
            raise ModeViolationError("incidence snapshot requires an incidence accumulator")
        freq = Counter(self.counts.values())
        return IncidenceFrequencies(
            n=self.n, s_obs=self.s_obs, q=dict(freq), v=self.v, s_known=self.s_known
        )

    def snapshot(self) -> AbundanceFrequencies | IncidenceFrequencies:
        """Snapshot in whichever model the accumulator was built for."""
        if self.mode == MULTINOMIAL:
            return self.abundance_snapshot()
        return self.incidence_snapshot()
