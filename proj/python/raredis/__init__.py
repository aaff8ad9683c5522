"""Python surface of the rare-disease NER prompting benchmark core."""

from _raredis import (
    classify_errors,
    corpus_stats,
    default_definition,
    f1_score,
    ground,
    parse_brat_document,
    parse_llm_output,
    render_prompt,
    score,
    select_similar,
    split_corpus,
)

__all__ = [
    "classify_errors",
    "corpus_stats",
    "default_definition",
    "f1_score",
    "ground",
    "parse_brat_document",
    "parse_llm_output",
    "render_prompt",
    "score",
    "select_similar",
    "split_corpus",
]
