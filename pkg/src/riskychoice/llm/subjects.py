"""Simulated-subject sessions: LLM agents answering batches of choice tasks."""

from __future__ import annotations

import hashlib
import json
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ..core import ChoiceTask
from .client import LLMClient
from .parsing import SubjectResponse, UnparsableResponse, parse_subject_response, resolve_subject_response
from .prompts import CONDITIONS, SUBJECT_REMINDER, Personality, render_subject_prompt

logger = logging.getLogger(__name__)

BATCH_SIZE = 50
AGENTS_PER_TASK = 31
BASELINE = "baseline"


class EmptyGroup(ValueError):
    pass


def run_subject_session(
    client: LLMClient,
    condition: str,
    personality: Optional[Personality],
    tasks: Sequence[ChoiceTask],
    seed: Optional[int] = None,
    *,
    batch_size: int = BATCH_SIZE,
    strict: bool = True,
) -> list[SubjectResponse]:
    """One agent answers ``tasks`` in a single prompt.

    An unparsable reply is re-asked once with a format reminder; tasks still
    unresolved get p = 0.5 with ``imputed=True``.
    """
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    if strict and len(tasks) != batch_size:
        raise ValueError(f"session needs exactly {batch_size} tasks, got {len(tasks)}")
    if not tasks:
        raise ValueError("session needs at least one task")
    ids = [t.task_id for t in tasks]
    prompt = render_subject_prompt(condition, personality, tasks)
    raw = client.complete(prompt, seed=seed)
    try:
        return parse_subject_response(condition, raw, ids)
    except UnparsableResponse as exc:
        logger.info("re-asking after unparsable reply (%s)", exc)
    retry = client.complete(prompt + SUBJECT_REMINDER[condition], seed=seed)
    out = resolve_subject_response(condition, [raw, retry], ids)
    n_imputed = sum(r.imputed for r in out)
    if n_imputed:
        logger.warning("%d of %d responses imputed at p=0.5", n_imputed, len(out))
    return out


def aggregate_subject_predictions(groups: Mapping[str, Iterable]) -> dict[str, float]:
    """Mean choice-A probability per task. Values may be responses or raw floats."""
    out = {}
    for tid, items in groups.items():
        ps = [r.p_choose_a if isinstance(r, SubjectResponse) else float(r) for r in items]
        if not ps:
            raise EmptyGroup(f"no responses for task {tid}")
        out[tid] = float(np.mean(ps))
    return out


def agent_seed(master_seed: int, condition: str, setting: str, batch: int, agent: int) -> int:
    h = hashlib.sha256(f"{master_seed}|{condition}|{setting}|{batch}|{agent}".encode()).digest()
    return int.from_bytes(h[:4], "big")


@dataclass(frozen=True)
class SubjectRecord:
    task_id: str
    condition: str
    setting: str
    agent: int
    p_choose_a: float
    imputed: bool
    raw_text: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)


def run_subjects(
    client: LLMClient,
    tasks: Sequence[ChoiceTask],
    *,
    conditions: Sequence[str] = CONDITIONS,
    personalities: Sequence[Optional[Personality]] = (None,),
    agents_per_task: int = AGENTS_PER_TASK,
    seed: int = 0,
    batch_size: int = BATCH_SIZE,
    strict: bool = True,
) -> list[SubjectRecord]:
    """Every (condition, personality setting, batch, agent) session, in canonical order.

    ``None`` in ``personalities`` is the no-personality baseline. Tasks are cut
    into consecutive batches of ``batch_size``; with ``strict`` the task count
    must be a multiple of it.
    """
    if strict and len(tasks) % batch_size:
        raise ValueError(f"{len(tasks)} tasks do not split into batches of {batch_size}")
    batches = [list(tasks[i : i + batch_size]) for i in range(0, len(tasks), batch_size)]
    jobs = [
        (cond, pers, b, agent)
        for cond in conditions
        for pers in personalities
        for b in range(len(batches))
        for agent in range(agents_per_task)
    ]

    def run(job):
        cond, pers, b, agent = job
        setting = pers.name if pers is not None else BASELINE
        sd = agent_seed(seed, cond, setting, b, agent)
        return run_subject_session(client, cond, pers, batches[b], sd, batch_size=batch_size, strict=False)

    if client.parallelism > 1:
        with ThreadPoolExecutor(client.parallelism) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    records = []
    for (cond, pers, _, agent), responses in zip(jobs, results):
        setting = pers.name if pers is not None else BASELINE
        for r in responses:
            records.append(SubjectRecord(r.task_id, cond, setting, agent, r.p_choose_a, r.imputed, r.raw_text))
    return records


def setting_rates(records: Sequence[SubjectRecord], condition: str) -> dict[str, dict[str, float]]:
    """{setting: {task_id: aggregated rate}} for one condition."""
    groups: dict[str, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.condition == condition:
            groups[r.setting][r.task_id].append(r.p_choose_a)
    return {s: aggregate_subject_predictions(g) for s, g in groups.items()}


def score_matrix(
    records: Sequence[SubjectRecord], condition: str, settings: Optional[Sequence[str]] = None
) -> tuple[list[str], list[str], np.ndarray]:
    """(task_ids, setting names, matrix) with one column per personality setting.

    Rows follow first appearance of each task in ``records``.
    """
    rates = setting_rates(records, condition)
    if settings is None:
        settings = [BASELINE] if BASELINE in rates else []
        settings += sorted(s for s in rates if s != BASELINE)
    task_ids = list(dict.fromkeys(r.task_id for r in records if r.condition == condition))
    mat = np.array([[rates[s][t] for s in settings] for t in task_ids], dtype=float)
    return task_ids, list(settings), mat
