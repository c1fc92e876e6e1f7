"""Multiple-choice question generation from verified instances."""
from .generate import (build_question, default_catalog_version,
                       generate_questions, option_text, partner_token,
                       render_question_text, subject_token)
from .prompts import load_templates, render_prompt
from .types import (BENCHMARK_VERSION, FAMILIES, MAX_OPTIONS, MIN_OPTIONS,
                    AgentRef, BenchmarkDoc, Option, Question, QuestgenError,
                    load_benchmark, save_benchmark)

__all__ = [
    "AgentRef",
    "BENCHMARK_VERSION",
    "BenchmarkDoc",
    "FAMILIES",
    "MAX_OPTIONS",
    "MIN_OPTIONS",
    "Option",
    "Question",
    "QuestgenError",
    "build_question",
    "default_catalog_version",
    "generate_questions",
    "load_benchmark",
    "load_templates",
    "option_text",
    "partner_token",
    "render_prompt",
    "render_question_text",
    "save_benchmark",
    "subject_token",
]
