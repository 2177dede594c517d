"""Revise entity/relation pseudo labels against a logic knowledge base."""

import json

from ._asper import (
    InputError,
    KnowledgeBase,
    SolverCapError,
    format_real,
    ground_dump,
    percentile_threshold,
)
from . import _asper

__all__ = [
    "InputError",
    "KnowledgeBase",
    "SolverCapError",
    "enumerate_answer_sets",
    "evaluate",
    "format_real",
    "ground_dump",
    "load_kb",
    "percentile_threshold",
    "revise",
]


def load_kb(path):
    with open(path, encoding="utf-8") as f:
        return KnowledgeBase.parse(f.read())


def enumerate_answer_sets(kb, atoms, format="asp-facts", max_doubtful=24):
    """One list of answer-set dicts per sentence."""
    return [[json.loads(a) for a in sentence]
            for sentence in _asper.enumerate_json(kb, atoms, format, max_doubtful)]


def revise(kb, atoms, format="asp-facts", max_doubtful=24):
    return [json.loads(a) for a in _asper.revise_json(kb, atoms, format, max_doubtful)]


def evaluate(pred, gold, format="jsonl"):
    return json.loads(_asper.evaluate_json(pred, gold, format))
