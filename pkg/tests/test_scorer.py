"""Answer parsing, accuracy bookkeeping, and letter-bias checks."""

import json
import random
import string
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from sts.questgen import BenchmarkDoc, Option, Question
from sts.scorer import (
    AnswerRecord,
    ScorerError,
    bias_report,
    dump_answers,
    format_report,
    load_answers,
    macro_overall,
    parse_answer,
    score,
)

# Realized letter histogram of the 971-question reference benchmark.
REFERENCE_LETTER_COUNTS = {"A": 201, "B": 182, "C": 180, "D": 201, "E": 207}


def make_question(qid, correct="A", k=5, category="Ego",
                  type_name="ego_stop"):
    options = []
    for index, letter in enumerate(string.ascii_uppercase[:k]):
        stype = type_name if letter == correct else f"{type_name}.alt{index}"
        options.append(Option(letter, f"{qid} choice {letter}", stype))
    return Question(
        question_id=qid,
        scenario_id=qid,
        scene_id="scene-0",
        category=category,
        frame_start=0,
        frame_end=0,
        agents=(),
        question_text="Which of the following options best describes "
                      "ego driving maneuver?",
        options=tuple(options),
        correct_letter=correct,
        seed=0,
        ego_trajectory=((0.0, 0.0, 0.0, 0.0),),
        duration_s=0.0,
        views_available=False,
    )


def make_benchmark(questions, seed=0):
    counts = Counter(q.correct_letter for q in questions)
    return BenchmarkDoc(version="1", catalog_version="stsnu.v1", seed=seed,
                        questions=tuple(questions),
                        letter_counts=dict(counts))


def gt_answers(benchmark):
    return [AnswerRecord(q.question_id, q.correct_letter)
            for q in benchmark.questions]


@pytest.fixture(scope="module")
def small_benchmark():
    questions = [
        make_question("q-00", correct="A", category="Ego",
                      type_name="ego_stop"),
        make_question("q-01", correct="B", category="Ego",
                      type_name="ego_accelerate"),
        make_question("q-02", correct="C", category="Agent",
                      type_name="agent_cross"),
        make_question("q-03", correct="D", category="EgoToAgent",
                      type_name="ego_follow_agent"),
        make_question("q-04", correct="E", category="AgentToAgent",
                      type_name="agent_follow_agent"),
        make_question("q-05", correct="A", category="AgentToAgent",
                      type_name="agent_pass_agent"),
    ]
    return make_benchmark(questions)


@pytest.fixture(scope="module")
def big_benchmark():
    letters = string.ascii_uppercase[:5]
    questions = [make_question(f"q-{i:05d}", correct=letters[i % 5])
                 for i in range(10_000)]
    return make_benchmark(questions)


@pytest.fixture(scope="module")
def reference_benchmark():
    letters = [letter
               for letter, count in REFERENCE_LETTER_COUNTS.items()
               for _ in range(count)]
    questions = [make_question(f"q-{i:04d}", correct=letter)
                 for i, letter in enumerate(letters)]
    return make_benchmark(questions)


class TestParseAnswer:
    def test_bare_letter(self):
        assert parse_answer("B", 5) == "B"

    def test_letter_with_trailing_period_and_text(self):
        assert parse_answer("A. Decelerating", 5) == "A"

    def test_lower_case(self):
        assert parse_answer("b", 5) == "B"

    def test_closing_parenthesis(self):
        assert parse_answer("C)", 5) == "C"

    def test_letter_inside_sentence(self):
        assert parse_answer("The answer is D.", 5) == "D"

    def test_first_standalone_letter_wins(self):
        assert parse_answer("A or B", 5) == "A"

    def test_letter_outside_range_is_ignored(self):
        assert parse_answer("F", 5) is None
        assert parse_answer("F", 8) == "F"

    def test_embedded_letters_do_not_count(self):
        assert parse_answer("Decelerating", 5) is None
        assert parse_answer("Cab", 5) is None

    def test_option_text_fallback(self):
        options = ("Ego is stopping.",
                   "Object 1 is overtaking object 2.",
                   "Object 1 is following object 2.")
        raw = "Object 1 is overtaking Object 2."
        assert parse_answer(raw, 3, options) == "B"

    def test_text_fallback_normalizes_spacing_and_case(self):
        options = ("Ego is stopping.", "Object 1 is overtaking object 2.")
        assert parse_answer("  object 1 IS overtaking object 2 ",
                            2, options) == "B"

    def test_unmatchable_text_is_none(self):
        assert parse_answer("I cannot tell from this input.", 5) is None

    def test_empty_text_is_none(self):
        assert parse_answer("", 5) is None

    def test_option_count_bounds(self):
        with pytest.raises(ScorerError):
            parse_answer("A", 1)
        with pytest.raises(ScorerError):
            parse_answer("A", 9)


class TestMacroOverall:
    def test_matches_reported_means(self):
        # Per-category accuracies for two scored models; each overall
        # column is their unweighted mean.
        strong = (63.63, 75.75, 45.59, 43.38)
        weak = (16.63, 19.73, 13.87, 21.84)
        assert abs(macro_overall(strong) - 57.08) < 0.01
        assert abs(macro_overall(weak) - 18.01) < 0.01

    def test_empty_is_zero(self):
        assert macro_overall(()) == 0.0


class TestScore:
    def test_ground_truth_scores_one(self, small_benchmark):
        report = score(small_benchmark, gt_answers(small_benchmark))
        assert report.overall == 1.0
        assert report.overall_micro == 1.0
        assert report.unparsable == 0
        assert all(v == 1.0 for v in report.per_category.values())
        assert all(row["accuracy"] == 1.0
                   for row in report.per_scenario.values())

    def test_all_wrong_scores_zero(self, small_benchmark):
        answers = [AnswerRecord(q.question_id,
                                "B" if q.correct_letter != "B" else "C")
                   for q in small_benchmark.questions]
        report = score(small_benchmark, answers)
        assert report.overall == 0.0
        assert report.correct == 0

    def test_missing_answers_are_unparsable_and_wrong(self, small_benchmark):
        answered = gt_answers(small_benchmark)[:2]
        report = score(small_benchmark, answered)
        assert report.unparsable == len(small_benchmark.questions) - 2
        assert report.correct == 2

    def test_gibberish_counts_as_unparsable(self, small_benchmark):
        answers = [AnswerRecord(q.question_id, "no idea")
                   for q in small_benchmark.questions]
        report = score(small_benchmark, answers)
        assert report.unparsable == report.total
        assert report.overall == 0.0

    def test_duplicate_question_id_rejected(self, small_benchmark):
        answers = gt_answers(small_benchmark)
        with pytest.raises(ScorerError, match="duplicate"):
            score(small_benchmark, answers + [answers[0]])

    def test_unknown_question_id_rejected(self, small_benchmark):
        with pytest.raises(ScorerError, match="unknown question"):
            score(small_benchmark, [AnswerRecord("q-99", "A")])

    def test_preset_letter_skips_parsing(self, small_benchmark):
        question = small_benchmark.questions[0]
        answers = [AnswerRecord(question.question_id, "gibberish",
                                parsed_letter=question.correct_letter)]
        report = score(small_benchmark, answers)
        assert report.correct == 1

    def test_preset_letter_outside_range_rejected(self, small_benchmark):
        answers = [AnswerRecord("q-00", "F", parsed_letter="F")]
        with pytest.raises(ScorerError, match="outside"):
            score(small_benchmark, answers)

    def test_answer_order_never_matters(self, small_benchmark):
        answers = gt_answers(small_benchmark)[:4]
        forward = score(small_benchmark, answers)
        backward = score(small_benchmark, list(reversed(answers)))
        assert forward.to_dict() == backward.to_dict()

    def test_mappings_are_accepted(self, small_benchmark):
        answers = [{"question_id": q.question_id, "raw_text": q.correct_letter}
                   for q in small_benchmark.questions]
        assert score(small_benchmark, answers).overall == 1.0

    def test_macro_and_micro_disagree_on_unbalanced_categories(self):
        questions = [
            make_question("q-0", correct="A", category="Ego",
                          type_name="ego_stop"),
            make_question("q-1", correct="A", category="Agent",
                          type_name="agent_cross"),
            make_question("q-2", correct="A", category="Agent",
                          type_name="agent_walk"),
            make_question("q-3", correct="A", category="Agent",
                          type_name="agent_run"),
        ]
        benchmark = make_benchmark(questions)
        answers = [AnswerRecord("q-0", "A"), AnswerRecord("q-1", "A"),
                   AnswerRecord("q-2", "B"), AnswerRecord("q-3", "B")]
        report = score(benchmark, answers)
        assert report.per_category == {"Ego": 1.0, "Agent": pytest.approx(1 / 3)}
        assert report.overall == pytest.approx((1.0 + 1 / 3) / 2)
        assert report.overall_micro == pytest.approx(0.5)

    def test_overall_stays_between_category_extremes(self, small_benchmark):
        answers = gt_answers(small_benchmark)[:3]
        report = score(small_benchmark, answers)
        accuracies = list(report.per_category.values())
        assert min(accuracies) <= report.overall <= max(accuracies)

    def test_scenario_counts_sum_to_total(self, small_benchmark):
        report = score(small_benchmark, gt_answers(small_benchmark)[:3])
        assert sum(row["n"] for row in report.per_scenario.values()) \
            == report.total

    def test_histogram_counts_predictions_and_zero_fills(self,
                                                         small_benchmark):
        answers = [AnswerRecord("q-00", "A"), AnswerRecord("q-01", "A"),
                   AnswerRecord("q-02", "B")]
        report = score(small_benchmark, answers)
        assert report.letter_histogram == {"A": 2, "B": 1, "C": 0,
                                           "D": 0, "E": 0}
        assert sum(report.letter_histogram.values()) + report.unparsable \
            == report.total

    def test_category_order_is_stable(self, small_benchmark):
        report = score(small_benchmark, gt_answers(small_benchmark))
        assert list(report.per_category) == ["Ego", "EgoToAgent", "Agent",
                                             "AgentToAgent"]

    def test_report_round_trips_through_json(self, small_benchmark):
        report = score(small_benchmark, gt_answers(small_benchmark))
        assert json.loads(json.dumps(report.to_dict())) == report.to_dict()

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_correct_count_matches_manual_tally(self, small_benchmark, data):
        letters = list(string.ascii_uppercase[:5]) + [None]
        picks = [data.draw(st.sampled_from(letters), label=q.question_id)
                 for q in small_benchmark.questions]
        answers = [AnswerRecord(q.question_id, letter)
                   for q, letter in zip(small_benchmark.questions, picks)
                   if letter is not None]
        report = score(small_benchmark, answers)
        expected = sum(letter == q.correct_letter
                       for q, letter in zip(small_benchmark.questions, picks))
        assert report.correct == expected
        assert 0.0 <= report.overall <= 1.0
        assert sum(report.letter_histogram.values()) + report.unparsable \
            == report.total


class TestRandomBaseline:
    def test_uniform_guessing_lands_in_binomial_interval(self,
                                                         big_benchmark):
        rng = random.Random(20260814)
        answers = [AnswerRecord(q.question_id, rng.choice("ABCDE"))
                   for q in big_benchmark.questions]
        report = score(big_benchmark, answers)
        n = report.total
        low = binom.ppf(0.005, n, 0.2) / n
        high = binom.ppf(0.995, n, 0.2) / n
        assert low <= report.overall_micro <= high
        assert low <= report.overall <= high

    def test_uniform_guessing_shows_no_letter_bias(self, big_benchmark):
        rng = random.Random(20260814)
        answers = [AnswerRecord(q.question_id, rng.choice("ABCDE"))
                   for q in big_benchmark.questions]
        bias = bias_report(big_benchmark, answers)
        assert bias["unparsable"] == 0
        assert bias["p_value"] > 0.01


class TestBiasReport:
    def test_echoed_truth_reproduces_reference_histogram(
            self, reference_benchmark):
        bias = bias_report(reference_benchmark,
                           gt_answers(reference_benchmark))
        assert bias["predicted"] == REFERENCE_LETTER_COUNTS
        assert bias["ground_truth"] == REFERENCE_LETTER_COUNTS
        assert bias["chi2"] == pytest.approx(0.0)
        assert bias["p_value"] == pytest.approx(1.0)

    def test_constant_answer_concentrates_the_histogram(
            self, reference_benchmark):
        answers = [AnswerRecord(q.question_id, "A")
                   for q in reference_benchmark.questions]
        bias = bias_report(reference_benchmark, answers)
        assert bias["predicted"] == {"A": 971, "B": 0, "C": 0,
                                     "D": 0, "E": 0}
        assert bias["p_value"] < 0.01

    def test_nothing_parsed_yields_no_statistic(self, small_benchmark):
        bias = bias_report(small_benchmark, [])
        assert bias["unparsable"] == len(small_benchmark.questions)
        assert bias["chi2"] is None
        assert bias["p_value"] is None

    def test_prediction_in_never_correct_letter_breaks_fit(self):
        questions = [make_question(f"q-{i}", correct="A")
                     for i in range(10)]
        benchmark = make_benchmark(questions)
        answers = [AnswerRecord(q.question_id, "B")
                   for q in benchmark.questions]
        bias = bias_report(benchmark, answers)
        assert bias["chi2"] == float("inf")
        assert bias["p_value"] == 0.0


class TestAnswersIO:
    def test_round_trip(self, tmp_path):
        answers = [AnswerRecord("q-00", "A. Decelerating"),
                   AnswerRecord("q-01", "no idea", parsed_letter="B")]
        path = tmp_path / "answers.jsonl"
        dump_answers(answers, path)
        assert load_answers(path) == answers

    def test_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / "answers.jsonl"
        path.write_text('{"question_id": "q-00", "raw_text": "A"}\n\n',
                        encoding="utf-8")
        assert len(load_answers(path)) == 1

    def test_invalid_json_names_the_line(self, tmp_path):
        path = tmp_path / "answers.jsonl"
        path.write_text('{"question_id": "q-00", "raw_text": "A"}\n{oops\n',
                        encoding="utf-8")
        with pytest.raises(ScorerError, match="line 2"):
            load_answers(path)

    def test_non_object_line_rejected(self, tmp_path):
        path = tmp_path / "answers.jsonl"
        path.write_text("[1, 2]\n", encoding="utf-8")
        with pytest.raises(ScorerError, match="line 1"):
            load_answers(path)

    def test_missing_raw_text_defaults_to_empty(self, tmp_path):
        path = tmp_path / "answers.jsonl"
        path.write_text('{"question_id": "q-00"}\n', encoding="utf-8")
        assert load_answers(path) == [AnswerRecord("q-00", "")]


class TestFormatReport:
    def test_table_shows_categories_and_percentages(self, small_benchmark):
        report = score(small_benchmark, gt_answers(small_benchmark))
        table = format_report(report)
        for name in ("Ego", "EgoToAgent", "Agent", "AgentToAgent",
                     "Overall"):
            assert name in table
        assert "100.00" in table
        assert "unparsable: 0" in table

    def test_table_rounds_to_two_decimals(self):
        questions = [make_question(f"q-{i}", correct="A", category="Agent",
                                   type_name=f"agent_{i}") for i in range(3)]
        benchmark = make_benchmark(questions)
        answers = [AnswerRecord("q-0", "A"), AnswerRecord("q-1", "A"),
                   AnswerRecord("q-2", "B")]
        table = format_report(score(benchmark, answers))
        assert "66.67" in table
