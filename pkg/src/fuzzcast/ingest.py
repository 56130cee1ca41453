"""Reading and writing the on-disk campaign formats.

Two formats are understood:

Event files
    UTF-8 text, one generated input per line, ``#`` lines are comments.
    Multinomial: a single species token per line.  Incidence: whitespace or
    comma separated tokens, and a line may be empty (an input that touched
    no species; it still counts).  Tokens match ``[A-Za-z0-9:_\\-.]+``.

Snapshot CSVs
    A header row plus one row per periodic snapshot of a running campaign.
    Multinomial columns: ``time_s,n,species,f1,f2,f3,f4``.  Incidence
    columns: ``time_s,n,species,q1,q2,q3,q4,v``.  f3/f4 (q3/q4) may be
    omitted; unknown columns are ignored.  Rows must not go backwards in
    time or in n.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from .errors import (
    ModeViolationError,
    MonotonicityError,
    ParseError,
    SchemaError,
    UndefinedEstimateError,
)
from .species import (
    INCIDENCE,
    MULTINOMIAL,
    AbundanceFrequencies,
    IncidenceFrequencies,
    SpeciesAccumulator,
    species_id,
)

TOKEN_RE = re.compile(r"[A-Za-z0-9:_\-.]+")
_SPLIT_RE = re.compile(r"[,\s]+")
_DURATION_RE = re.compile(r"^([0-9]+(?:\.[0-9]+)?)\s*([smhd]?)$")

_UNIT_SECONDS = {"": 1.0, "s": 1.0, "m": 60.0, "h": 3600.0, "d": 86400.0}


def _lines(source: str | Path | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    elif hasattr(source, "read"):
        yield from source
    else:
        yield from source


def parse_events(
    source: str | Path | IO[str] | Iterable[str], mode: str = MULTINOMIAL
) -> SpeciesAccumulator:
    """Replay an event file into a fresh accumulator.

    Args:
        source: path, open text stream, or iterable of lines.
        mode: ``"multinomial"`` or ``"incidence"``.

    Returns:
        A populated :class:`SpeciesAccumulator`.

    Raises:
        ParseError: on malformed tokens (carries the 1-based line number).
        ModeViolationError: when a multinomial line does not hold exactly
            one species.
    """
    acc = SpeciesAccumulator(mode)
    multinomial = mode == MULTINOMIAL
    for line_no, raw in enumerate(_lines(source), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if multinomial:
                raise ModeViolationError(
                    f"line {line_no}: multinomial stream has an empty input line"
                )
            acc.observe(())
            continue
        tokens = _SPLIT_RE.split(line)
        for token in tokens:
            if not TOKEN_RE.fullmatch(token):
                raise ParseError(f"bad species token {token!r}", line=line_no)
        if multinomial:
            if len(tokens) != 1:
                raise ModeViolationError(
                    f"line {line_no}: multinomial input must be one species per line, "
                    f"got {len(tokens)}"
                )
            acc.observe(species_id(tokens[0]))
        else:
            acc.observe(species_id(t) for t in tokens)
    return acc


@dataclass(frozen=True)
class CampaignSnapshotRow:
    """One periodic snapshot of a running campaign.

    For incidence rows the ``f1..f4`` fields hold q1..q4 and ``v`` is the
    incidence total; for multinomial rows ``v`` is None.
    """

    time_s: float
    n: int
    species: int
    f1: int
    f2: int
    f3: int = 0
    f4: int = 0
    model: str = MULTINOMIAL
    v: int | None = None

    def frequencies(
        self, s_known: int | None = None
    ) -> AbundanceFrequencies | IncidenceFrequencies:
        """Rebuild the frequency summary this row was condensed from."""
        if self.model == MULTINOMIAL:
            return AbundanceFrequencies.from_marginals(
                n=self.n,
                s_obs=self.species,
                f1=self.f1,
                f2=self.f2,
                f3=self.f3,
                f4=self.f4,
                s_known=s_known,
            )
        return IncidenceFrequencies.from_marginals(
            n=self.n,
            s_obs=self.species,
            q1=self.f1,
            q2=self.f2,
            q3=self.f3,
            q4=self.f4,
            v=self.v or 0,
            s_known=s_known,
        )


_MULTINOMIAL_COLUMNS = ("time_s", "n", "species", "f1", "f2", "f3", "f4")
_INCIDENCE_COLUMNS = ("time_s", "n", "species", "q1", "q2", "q3", "q4", "v")


def parse_snapshots(
    source: str | Path | IO[str] | Iterable[str],
) -> list[CampaignSnapshotRow]:
    """Parse a snapshot CSV into rows, validating schema and monotonicity.

    The sampling model is detected from the header (``f1`` vs ``q1``
    columns).

    Raises:
        SchemaError: missing mandatory columns, unparseable or negative
            numbers, or inconsistent counts.
        MonotonicityError: a row goes backwards in time_s or n.
    """
    reader = csv.reader(_lines(source))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError("snapshot file is empty") from None
    columns = {name: idx for idx, name in enumerate(header)}
    if "f1" in columns and "q1" in columns:
        raise SchemaError("snapshot header mixes abundance and incidence columns")
    if "q1" in columns:
        model = INCIDENCE
        mandatory = ("time_s", "n", "species", "q1", "q2", "v")
        count_names = ("q1", "q2", "q3", "q4")
    elif "f1" in columns:
        model = MULTINOMIAL
        mandatory = ("time_s", "n", "species", "f1", "f2")
        count_names = ("f1", "f2", "f3", "f4")
    else:
        raise SchemaError("snapshot header has neither f1 nor q1")
    for name in mandatory:
        if name not in columns:
            raise SchemaError(f"snapshot header is missing the {name!r} column")

    def get_int(row: Sequence[str], name: str, line_no: int, default: int = 0) -> int:
        idx = columns.get(name)
        if idx is None or idx >= len(row) or not row[idx].strip():
            return default
        text = row[idx].strip()
        try:
            value = int(text)
        except ValueError:
            raise SchemaError(f"column {name!r} has non-integer value {text!r}", line=line_no)
        if value < 0:
            raise SchemaError(f"column {name!r} is negative", line=line_no)
        return value

    rows: list[CampaignSnapshotRow] = []
    for line_no, row in enumerate(reader, 2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            time_s = float(row[columns["time_s"]])
        except (ValueError, IndexError):
            raise SchemaError("column 'time_s' is not a number", line=line_no) from None
        if time_s < 0:
            raise SchemaError("column 'time_s' is negative", line=line_no)
        n = get_int(row, "n", line_no)
        species = get_int(row, "species", line_no)
        counts = tuple(get_int(row, name, line_no) for name in count_names)
        v = get_int(row, "v", line_no) if model == INCIDENCE else None
        if rows:
            prev = rows[-1]
            if time_s < prev.time_s or n < prev.n:
                raise MonotonicityError(
                    f"snapshot goes backwards (time {prev.time_s} -> {time_s}, "
                    f"n {prev.n} -> {n})",
                    line=line_no,
                )
        parsed = CampaignSnapshotRow(
            time_s=time_s,
            n=n,
            species=species,
            f1=counts[0],
            f2=counts[1],
            f3=counts[2],
            f4=counts[3],
            model=model,
            v=v,
        )
        parsed.frequencies()  # validate consistency early, with a line number
        rows.append(parsed)
    return rows


def write_snapshots(
    rows: Iterable[CampaignSnapshotRow], out: IO[str], model: str | None = None
) -> None:
    """Write rows as a snapshot CSV (header included)."""
    rows = list(rows)
    if model is None:
        model = rows[0].model if rows else MULTINOMIAL
    writer = csv.writer(out, lineterminator="\n")
    if model == INCIDENCE:
        writer.writerow(_INCIDENCE_COLUMNS)
        for r in rows:
            writer.writerow([f"{r.time_s:g}", r.n, r.species, r.f1, r.f2, r.f3, r.f4, r.v or 0])
    else:
        writer.writerow(_MULTINOMIAL_COLUMNS)
        for r in rows:
            writer.writerow([f"{r.time_s:g}", r.n, r.species, r.f1, r.f2, r.f3, r.f4])


def snapshots_to_csv(rows: Iterable[CampaignSnapshotRow], model: str | None = None) -> str:
    buf = io.StringIO()
    write_snapshots(rows, buf, model=model)
    return buf.getvalue()


def parse_duration(text: str) -> float:
    """Parse a duration like ``30m``, ``1h``, ``90s`` or ``3600`` into seconds."""
    m = _DURATION_RE.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse duration {text!r}")
    return float(m.group(1)) * _UNIT_SECONDS[m.group(2)]


def inputs_for_horizon(rows: Sequence[CampaignSnapshotRow], t_star: float) -> int:
    """Convert a further-time budget into a further-input budget.

    Uses the latest snapshot's observed rate: m* = round(n * t_star / t).

    Args:
        rows: parsed snapshot rows, oldest first.
        t_star: additional seconds of campaign time.

    Raises:
        UndefinedEstimateError: with no rows, or a latest row at time 0.
    """
    if not rows:
        raise UndefinedEstimateError("no snapshots to derive an input rate from")
    if t_star < 0:
        raise ValueError("time horizon must be >= 0")
    latest = rows[-1]
    if latest.time_s <= 0:
        raise UndefinedEstimateError("latest snapshot has no elapsed time, rate undefined")
    return int(latest.n * t_star / latest.time_s + 0.5)
