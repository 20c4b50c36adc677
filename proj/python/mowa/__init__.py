"""Python bindings for the mowa augmentation engine."""

import json

from . import _core
from ._core import MowaError, Platform, canonicalize, cohort_stats, extract, locales, message, round_half_away, sign_test, sr

MowaError.key = property(lambda self: self.args[0])
MowaError.detail = property(lambda self: self.args[2] if len(self.args) > 2 else {})


def validate(xml, locale="en"):
    return json.loads(_core.validate(xml, locale))


def spec_to_json(xml):
    return json.loads(_core.spec_to_json(xml))


def weave(spec_xml, corpus_dir, page_url, context=None, cache_dir=None):
    if isinstance(context, dict):
        context = json.dumps(context)
    html, warnings = _core.weave(spec_xml, str(corpus_dir), page_url, context, None if cache_dir is None else str(cache_dir))
    return html, warnings


def simulate(spec_xml, corpus_dir, trace_jsonl, cache_dir=None):
    return json.loads(_core.simulate(spec_xml, str(corpus_dir), trace_jsonl, None if cache_dir is None else str(cache_dir)))


def grade(spec_xml, rubric_path, corpus_dir=None, cache_dir=None):
    return json.loads(
        _core.grade(
            spec_xml,
            str(rubric_path),
            None if corpus_dir is None else str(corpus_dir),
            None if cache_dir is None else str(cache_dir),
        )
    )


def grade_cells(a, b, c, d, e, participant=""):
    return json.loads(_core.grade_cells(a, b, c, d, e, participant))


__all__ = [
    "MowaError",
    "Platform",
    "canonicalize",
    "cohort_stats",
    "extract",
    "grade",
    "grade_cells",
    "locales",
    "message",
    "round_half_away",
    "sign_test",
    "simulate",
    "spec_to_json",
    "sr",
    "validate",
    "weave",
]
