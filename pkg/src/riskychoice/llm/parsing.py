"""Strict parsers for subject tuples and feature answers, plus their inverse renderers."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

if TYPE_CHECKING:
    from .client import LLMClient


class UnparsableResponse(ValueError):
    """Raised when a reply does not cover every expected id with a well-formed value.

    ``parsed`` keeps whatever did parse so callers can merge retries.
    """

    def __init__(self, message: str, fragments=(), missing_ids=(), parsed=None):
        super().__init__(message)
        self.fragments = list(fragments)
        self.missing_ids = list(missing_ids)
        self.parsed = dict(parsed or {})


@dataclass(frozen=True)
class SubjectResponse:
    task_id: str
    condition: str
    raw_text: str
    p_choose_a: float
    choice: Optional[str] = None
    value: Optional[float] = None
    imputed: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p_choose_a <= 1.0:
            raise ValueError("p_choose_a outside [0, 1]")
        if self.condition == "binary" and not self.imputed and self.p_choose_a not in (0.0, 1.0):
            raise ValueError("binary responses must map to 0 or 1")


_TUPLE = re.compile(r"\(([^()]*)\)")
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*%?$")


def _choice(token: str) -> Optional[str]:
    t = token.strip().strip("'\"*").strip()
    t = re.sub(r"(?i)^option\s+", "", t)
    t = t.upper()
    return t if t in ("A", "B") else None


def _number(token: str) -> Optional[float]:
    t = token.strip().strip("'\"*").strip()
    if not _NUMBER.match(t):
        return None
    v = float(t.rstrip("%").strip())
    return v if math.isfinite(v) else None


def _parse_tuple(condition: str, parts: list[str]):
    """Returns (choice, value, p) or None when malformed."""
    if condition == "binary":
        if len(parts) != 2 or (c := _choice(parts[1])) is None:
            return None
        return c, None, 1.0 if c == "A" else 0.0
    if condition == "confidence":
        if len(parts) != 3:
            return None
        c, k = _choice(parts[1]), _number(parts[2])
        if c is None or k is None or not 0.0 <= k <= 100.0:
            return None
        return c, k, k / 100.0 if c == "A" else 1.0 - k / 100.0
    if condition == "percentage":
        if len(parts) != 2 or (v := _number(parts[1])) is None:
            return None
        return None, v, min(1.0, max(0.0, v / 100.0))
    raise ValueError(f"unknown condition {condition!r}")


def parse_subject_response(condition: str, raw: str, expected_ids: Sequence[str]) -> list[SubjectResponse]:
    """Parse ``(id, ...) | (id, ...)`` replies into one response per expected id.

    Mapping to a choice-A probability: binary A -> 1, B -> 0; confidence k on
    choice A -> k/100, on choice B -> 1 - k/100; percentage v -> v/100 clamped
    to [0, 1].
    """
    if not expected_ids:
        raise ValueError("expected_ids must be non-empty")
    expected = {str(i) for i in expected_ids}
    parsed: dict[str, tuple] = {}
    bad: list[str] = []
    for m in _TUPLE.finditer(raw):
        parts = [p.strip() for p in m.group(1).split(",")]
        tid = parts[0].strip("'\"*").strip() if parts else ""
        if tid not in expected:
            bad.append(m.group(0))
            continue
        result = _parse_tuple(condition, parts)
        if result is None:
            bad.append(m.group(0))
            continue
        if tid in parsed and parsed[tid] != result:
            bad.append(m.group(0))
            parsed[tid] = None
            continue
        parsed.setdefault(tid, result)
    conflicted = [tid for tid, r in parsed.items() if r is None]
    good = {tid: r for tid, r in parsed.items() if r is not None}
    missing = [str(i) for i in expected_ids if str(i) not in good]
    responses = {
        tid: SubjectResponse(tid, condition, raw, p, choice=c, value=v) for tid, (c, v, p) in good.items()
    }
    if missing:
        why = f"{len(missing)} of {len(expected_ids)} ids unresolved"
        if conflicted:
            why += f" ({len(conflicted)} with conflicting answers)"
        raise UnparsableResponse(why, fragments=bad, missing_ids=missing, parsed=responses)
    return [responses[str(i)] for i in expected_ids]


def format_subject_response(condition: str, rows: Sequence[tuple]) -> str:
    """Render tuples in the reply grammar; the inverse of :func:`parse_subject_response`."""
    out = []
    for row in rows:
        if condition == "binary":
            tid, c = row
            out.append(f"({tid}, {c})")
        elif condition == "confidence":
            tid, c, k = row
            out.append(f"({tid}, {c}, {_num(k)})")
        elif condition == "percentage":
            tid, v = row
            out.append(f"({tid}, {_num(v)})")
        else:
            raise ValueError(f"unknown condition {condition!r}")
    return " | ".join(out)


def _num(v) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def impute(task_id: str, condition: str, raw: str) -> SubjectResponse:
    return SubjectResponse(task_id, condition, raw, 0.5, imputed=True)


def resolve_subject_response(
    condition: str, raws: Sequence[str], expected_ids: Sequence[str]
) -> list[SubjectResponse]:
    """Total counterpart of :func:`parse_subject_response` over one or more attempts.

    Earlier attempts take precedence; ids no attempt resolved are imputed at
    p = 0.5 and flagged.
    """
    found: dict[str, SubjectResponse] = {}
    for raw in raws:
        try:
            for r in parse_subject_response(condition, raw, expected_ids):
                found.setdefault(r.task_id, r)
        except UnparsableResponse as exc:
            for tid, r in exc.parsed.items():
                found.setdefault(tid, r)
        if len(found) == len(set(map(str, expected_ids))):
            break
    last = raws[-1] if raws else ""
    return [found.get(str(i)) or impute(str(i), condition, last) for i in expected_ids]


# ---------------------------------------------------------------------------
# Feature answers
# ---------------------------------------------------------------------------

_NEUTRAL = re.compile(
    r"too hard to tell|hard to tell|cannot tell|can't tell|cannot be determined|"
    r"can't be determined|not possible to (tell|determine)|impossible to (tell|determine)|"
    r"\bneither\b|\bneutral\b|\bequal(ly)?\b|\bthe same\b|\bno clear\b|\bunclear\b"
)
_OPT_A = re.compile(r"\boption\s*a\b")
_OPT_B = re.compile(r"\boption\s*b\b")

FEATURE_ANSWER_TEXT = {1: "Option A", -1: "Option B", 0: "It is too hard to tell."}


def parse_feature_response(raw: str) -> int:
    """Map a feature answer to +1 (Option A), -1 (Option B) or 0 (neutral or 'No')."""
    text = " ".join(raw.lower().split()).strip(" .!*'\"")
    if not text:
        raise UnparsableResponse("empty answer", fragments=[raw])
    if _NEUTRAL.search(text):
        return 0
    has_a, has_b = bool(_OPT_A.search(text)), bool(_OPT_B.search(text))
    if has_a != has_b:
        return 1 if has_a else -1
    if not has_a and re.match(r"^no\b", text):
        return 0
    if text in ("a", "b"):
        return 1 if text == "a" else -1
    raise UnparsableResponse("answer names neither or both options", fragments=[raw])


def format_feature_answer(value: int) -> str:
    return FEATURE_ANSWER_TEXT[value]


def resolve_feature_answer(client: "LLMClient", prompt: str, *, seed: Optional[int] = None) -> tuple[int, bool]:
    """(value, flagged): one re-ask on an unparsable answer, then neutral and flagged."""
    from .prompts import FEATURE_REMINDER

    raw = client.complete(prompt, seed=seed)
    try:
        return parse_feature_response(raw), False
    except UnparsableResponse:
        pass
    raw = client.complete(prompt + FEATURE_REMINDER, seed=seed)
    try:
        return parse_feature_response(raw), False
    except UnparsableResponse:
        return 0, True
