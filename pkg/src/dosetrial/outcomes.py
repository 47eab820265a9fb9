"""Outcome strings for dose-finding trials.

Cohort outcomes are written as an integer dose-level followed by one letter
per patient: ``T``/``N`` when only toxicity is assessed, or ``E``/``T``/``B``/``N``
(efficacy only, toxicity only, both, neither) when efficacy and toxicity are
assessed jointly. ``"1NNN 2TNT"`` describes six patients in two cohorts of
three.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence


class Alphabet(Enum):
    BINARY = "binary"        # letters T, N
    QUATERNARY = "quaternary"  # letters E, T, B, N

    @property
    def letters(self) -> str:
        return "TN" if self is Alphabet.BINARY else "ETBN"


class OutcomeParseError(ValueError):
    """Raised when an outcome string does not follow the cohort grammar."""


_TOKEN_RE = re.compile(r"^(\d+)([A-Z]*)$")


@dataclass(frozen=True)
class PatientRecord:
    """One patient's dose, outcome letter, and evaluation weight."""

    patient_index: int
    dose_level: int
    event: str
    weight: float = 1.0

    def __post_init__(self):
        if self.dose_level < 1:
            raise ValueError(f"dose_level must be >= 1, got {self.dose_level}")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"weight must be in [0, 1], got {self.weight}")

    @property
    def toxicity(self) -> int:
        return 1 if self.event in ("T", "B") else 0

    @property
    def efficacy(self) -> int:
        return 1 if self.event in ("E", "B") else 0


@dataclass(frozen=True)
class OutcomeSequence:
    """Ordered patient records sharing one outcome alphabet."""

    records: tuple[PatientRecord, ...]
    alphabet: Alphabet

    def __post_init__(self):
        letters = self.alphabet.letters
        for i, rec in enumerate(self.records):
            if rec.event not in letters:
                raise ValueError(
                    f"event {rec.event!r} not in {self.alphabet.name} alphabet"
                )
            if rec.patient_index != i + 1:
                raise ValueError("patient_index values must be 1..n contiguous")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def dose_levels(self) -> list[int]:
        return [r.dose_level for r in self.records]

    @property
    def weights(self) -> list[float]:
        return [r.weight for r in self.records]

    def extend(self, other: "OutcomeSequence") -> "OutcomeSequence":
        """Append another sequence's records, renumbering patients."""
        if other.alphabet is not self.alphabet and len(other) and len(self):
            raise ValueError("cannot mix outcome alphabets in one sequence")
        n = len(self.records)
        appended = tuple(
            replace(r, patient_index=n + i + 1) for i, r in enumerate(other.records)
        )
        return OutcomeSequence(self.records + appended, self.alphabet)

    def max_dose_given(self) -> int | None:
        return max(self.dose_levels) if self.records else None


def parse_outcomes(text: str, alphabet: Alphabet) -> OutcomeSequence:
    """Parse a cohort outcome string like ``"1NNN 2TNT"``.

    Empty or blank text yields an empty sequence. Tokens are separated by any
    whitespace; each is an integer dose-level followed by one uppercase letter
    per patient. All parsed weights are 1.
    """
    records: list[PatientRecord] = []
    for pos, token in enumerate(text.split(), start=1):
        m = _TOKEN_RE.match(token)
        if m is None:
            raise OutcomeParseError(
                f"token {pos} ({token!r}): expected integer dose followed by "
                f"outcome letters"
            )
        dose_str, events = m.groups()
        dose = int(dose_str)
        if dose == 0:
            raise OutcomeParseError(f"token {pos} ({token!r}): dose-level 0 is invalid")
        if not events:
            raise OutcomeParseError(
                f"token {pos} ({token!r}): no outcome letters after dose"
            )
        for ch in events:
            if ch not in alphabet.letters:
                raise OutcomeParseError(
                    f"token {pos} ({token!r}): outcome {ch!r} not in "
                    f"{alphabet.name} alphabet {tuple(alphabet.letters)}"
                )
            records.append(PatientRecord(len(records) + 1, dose, ch))
    return OutcomeSequence(tuple(records), alphabet)


def serialize_outcomes(seq: OutcomeSequence) -> str:
    """Render a weight-1 sequence back to its string form.

    Consecutive same-dose patients are grouped into one cohort token, so the
    result is the shortest string that parses back to the same sequence.
    """
    for rec in seq.records:
        if rec.weight != 1.0:
            raise ValueError(
                "weighted sequences have no string form; weights must all be 1"
            )
    tokens: list[str] = []
    for rec in seq.records:
        if tokens and rec.dose_level == _current_dose(tokens[-1]):
            tokens[-1] += rec.event
        else:
            tokens.append(f"{rec.dose_level}{rec.event}")
    return " ".join(tokens)


def _current_dose(token: str) -> int:
    return int(_TOKEN_RE.match(token).group(1))


def from_vectors(
    doses: Sequence[int],
    tox: Sequence[int],
    weights: Sequence[float] | None = None,
) -> OutcomeSequence:
    """Build a binary-alphabet sequence from dose / toxicity / weight vectors.

    This is the input form for time-to-event weighting, where each partially
    evaluated patient carries a weight in [0, 1].
    """
    if weights is None:
        weights = [1.0] * len(doses)
    if not (len(doses) == len(tox) == len(weights)):
        raise ValueError(
            f"length mismatch: doses {len(doses)}, tox {len(tox)}, "
            f"weights {len(weights)}"
        )
    records = []
    for i, (d, y, w) in enumerate(zip(doses, tox, weights)):
        if y not in (0, 1):
            raise ValueError(f"tox values must be 0/1, got {y!r}")
        records.append(PatientRecord(i + 1, int(d), "T" if y else "N", float(w)))
    return OutcomeSequence(tuple(records), Alphabet.BINARY)


def empty_sequence(alphabet: Alphabet) -> OutcomeSequence:
    return OutcomeSequence((), alphabet)
