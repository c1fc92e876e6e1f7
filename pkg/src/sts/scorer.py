"""Accuracy scoring and letter-bias analysis for answer files.

Answers arrive as JSON lines of {question_id, raw_text}. Parsing first
looks for a standalone option letter, then falls back to matching the
full option text, so prose answers like "Object 1 is overtaking object
2." still score. Unparsable and missing answers count as incorrect and
are reported separately. The overall number is the unweighted mean of
the per-category accuracies; the per-question mean is emitted alongside
it as ``overall_micro``.
"""
from __future__ import annotations

import json
import re
import string
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Any, Iterable, Mapping, Sequence

from scipy.stats import chisquare

from sts.questgen import MAX_OPTIONS, MIN_OPTIONS, BenchmarkDoc, Question

CATEGORY_ORDER = ("Ego", "EgoToAgent", "Agent", "AgentToAgent")


class ScorerError(ValueError):
    """Malformed answers: duplicates, unknown ids, or bad records."""


@dataclass(frozen=True)
class AnswerRecord:
    """One model answer, parsed or still raw."""

    question_id: str
    raw_text: str
    parsed_letter: str | None = None

    def to_dict(self) -> dict[str, Any]:
        record: dict[str, Any] = {"question_id": self.question_id,
                                  "raw_text": self.raw_text}
        if self.parsed_letter is not None:
            record["parsed_letter"] = self.parsed_letter
        return record


def _normalize(text: str) -> str:
    cleaned = "".join(ch if ch.isalnum() else " " for ch in text.casefold())
    return " ".join(cleaned.split())


def parse_answer(raw_text: str, k: int,
                 option_texts: Sequence[str] = ()) -> str | None:
    """Option letter named by a raw answer, or None.

    The first standalone letter within A..(A+k-1), case-insensitive and
    optionally followed by punctuation, wins. Without one, the answer
    matches an option when their normalized texts are equal.
    """
    if not MIN_OPTIONS <= k <= MAX_OPTIONS:
        raise ScorerError(
            f"option count must be {MIN_OPTIONS}..{MAX_OPTIONS}, got {k}")
    letters = string.ascii_uppercase[:k]
    pattern = re.compile(
        rf"(?<![A-Za-z0-9])([{letters}{letters.lower()}])"
        rf"(?=$|[\s.,:;!?)])")
    found = pattern.search(raw_text)
    if found:
        return found.group(1).upper()
    wanted = _normalize(raw_text)
    if wanted:
        for index, text in enumerate(option_texts[:k]):
            if _normalize(text) == wanted:
                return letters[index]
    return None


@dataclass(frozen=True)
class ScoreReport:
    """Accuracy breakdown for one answer file against one benchmark."""

    per_scenario: Mapping[str, Mapping[str, float]]
    per_category: Mapping[str, float]
    overall: float
    overall_micro: float
    total: int
    correct: int
    unparsable: int
    letter_histogram: Mapping[str, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "per_scenario": {k: dict(v)
                             for k, v in self.per_scenario.items()},
            "per_category": dict(self.per_category),
            "overall": self.overall,
            "overall_micro": self.overall_micro,
            "total": self.total,
            "correct": self.correct,
            "unparsable": self.unparsable,
            "letter_histogram": dict(self.letter_histogram),
        }


def macro_overall(category_accuracies: Iterable[float]) -> float:
    """Unweighted mean across categories, the headline number."""
    values = list(category_accuracies)
    if not values:
        return 0.0
    return fmean(values)


def _answer_map(answers: Iterable[AnswerRecord | Mapping[str, Any]],
                ) -> dict[str, AnswerRecord]:
    by_id: dict[str, AnswerRecord] = {}
    for answer in answers:
        if isinstance(answer, Mapping):
            answer = AnswerRecord(
                question_id=answer["question_id"],
                raw_text=answer.get("raw_text", ""),
                parsed_letter=answer.get("parsed_letter"))
        if answer.question_id in by_id:
            raise ScorerError(
                f"duplicate answer for question '{answer.question_id}'")
        by_id[answer.question_id] = answer
    return by_id


def _resolve_letter(question: Question,
                    answer: AnswerRecord | None) -> str | None:
    if answer is None:
        return None
    letters = {o.letter for o in question.options}
    if answer.parsed_letter is not None:
        if answer.parsed_letter not in letters:
            raise ScorerError(
                f"answer for '{question.question_id}' names letter "
                f"'{answer.parsed_letter}' outside {sorted(letters)}")
        return answer.parsed_letter
    letter = parse_answer(answer.raw_text, len(question.options),
                          [o.text for o in question.options])
    if letter is not None and letter not in letters:
        return None
    return letter


def _sorted_categories(categories: Iterable[str]) -> list[str]:
    known = {name: rank for rank, name in enumerate(CATEGORY_ORDER)}
    return sorted(categories,
                  key=lambda c: (known.get(c, len(known)), c))


def score(benchmark: BenchmarkDoc,
          answers: Iterable[AnswerRecord | Mapping[str, Any]]) -> ScoreReport:
    """Accuracy report; answer order never matters.

    Every answer must name a benchmark question; questions without an
    answer count as unparsable and incorrect.
    """
    by_id = _answer_map(answers)
    known = {q.question_id for q in benchmark.questions}
    for question_id in by_id:
        if question_id not in known:
            raise ScorerError(f"unknown question '{question_id}'")
    scenario_n: dict[str, int] = {}
    scenario_correct: dict[str, int] = {}
    category_n: dict[str, int] = {}
    category_correct: dict[str, int] = {}
    histogram = {letter: 0 for letter in
                 string.ascii_uppercase[:max((len(q.options) for q in
                                              benchmark.questions),
                                             default=0)]}
    unparsable = 0
    correct_total = 0
    for question in benchmark.questions:
        letter = _resolve_letter(question, by_id.get(question.question_id))
        if letter is None:
            unparsable += 1
        else:
            histogram[letter] += 1
        hit = letter == question.correct_letter
        correct_total += hit
        scenario_n[question.type] = scenario_n.get(question.type, 0) + 1
        scenario_correct[question.type] = \
            scenario_correct.get(question.type, 0) + hit
        category_n[question.category] = \
            category_n.get(question.category, 0) + 1
        category_correct[question.category] = \
            category_correct.get(question.category, 0) + hit
    per_scenario = {
        name: {"n": scenario_n[name],
               "correct": scenario_correct[name],
               "accuracy": scenario_correct[name] / scenario_n[name]}
        for name in sorted(scenario_n)}
    per_category = {
        name: category_correct[name] / category_n[name]
        for name in _sorted_categories(category_n)}
    total = len(benchmark.questions)
    return ScoreReport(
        per_scenario=per_scenario,
        per_category=per_category,
        overall=macro_overall(per_category.values()),
        overall_micro=(correct_total / total) if total else 0.0,
        total=total,
        correct=correct_total,
        unparsable=unparsable,
        letter_histogram=histogram,
    )


def bias_report(benchmark: BenchmarkDoc,
                answers: Iterable[AnswerRecord | Mapping[str, Any]],
                ) -> dict[str, Any]:
    """Predicted-letter counts against the benchmark's own letters.

    The chi-square statistic compares the predicted histogram with the
    ground-truth letter distribution scaled to the same total; both are
    None when nothing parsed.
    """
    by_id = _answer_map(answers)
    width = max((len(q.options) for q in benchmark.questions), default=0)
    letters = list(string.ascii_uppercase[:width])
    predicted = {letter: 0 for letter in letters}
    truth = {letter: 0 for letter in letters}
    unparsable = 0
    for question in benchmark.questions:
        truth[question.correct_letter] += 1
        letter = _resolve_letter(question, by_id.get(question.question_id))
        if letter is None:
            unparsable += 1
        else:
            predicted[letter] += 1
    parsed_total = sum(predicted.values())
    truth_total = sum(truth.values())
    chi2 = p_value = None
    if parsed_total and truth_total:
        scale = parsed_total / truth_total
        observed, expected = [], []
        broken = False
        for letter in letters:
            want = truth[letter] * scale
            if want == 0.0:
                if predicted[letter]:
                    broken = True
                continue
            observed.append(predicted[letter])
            expected.append(want)
        if broken:
            chi2, p_value = float("inf"), 0.0
        elif observed:
            stat, p = chisquare(observed, f_exp=expected)
            chi2, p_value = float(stat), float(p)
    return {
        "predicted": predicted,
        "ground_truth": truth,
        "unparsable": unparsable,
        "chi2": chi2,
        "p_value": p_value,
    }


def load_answers(path: str | Path) -> list[AnswerRecord]:
    """Read a JSON-lines answer file."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScorerError(f"line {number}: invalid JSON") from exc
            if not isinstance(record, dict) or "question_id" not in record:
                raise ScorerError(f"line {number}: expected an object "
                                  f"with a question_id")
            records.append(AnswerRecord(
                question_id=record["question_id"],
                raw_text=record.get("raw_text", ""),
                parsed_letter=record.get("parsed_letter")))
    return records


def dump_answers(answers: Iterable[AnswerRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for answer in answers:
            handle.write(json.dumps(answer.to_dict(), sort_keys=True))
            handle.write("\n")


def format_report(report: ScoreReport) -> str:
    """Plain-text accuracy table, categories as columns, in percent."""
    columns = list(report.per_category) + ["Overall", "Overall (micro)"]
    values = [100.0 * report.per_category[c]
              for c in report.per_category]
    values += [100.0 * report.overall, 100.0 * report.overall_micro]
    widths = [max(len(c), 6) for c in columns]
    head = "  ".join(c.ljust(w) for c, w in zip(columns, widths))
    body = "  ".join(f"{v:.2f}".rjust(w) for v, w in zip(values, widths))
    tail = (f"questions: {report.total}  correct: {report.correct}  "
            f"unparsable: {report.unparsable}")
    return "\n".join((head, body, tail))
