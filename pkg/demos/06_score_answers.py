"""Score free-text model answers against a benchmark.

Model output is messy: letters arrive wrapped in prose, punctuation,
or the option text itself. The parser extracts a verdict without ever
guessing; whatever stays unparsable counts as wrong. Accuracy is
reported per scenario type, per category, and overall (mean of the
four category accuracies), plus a letter histogram to expose position
bias.
"""

import random

from sts.mining import mine_scene
from sts.questgen import generate_questions
from sts.scorer import (
    AnswerRecord,
    bias_report,
    format_report,
    parse_answer,
    score,
)
from sts.synth import synth_suite


def main():
    # Messy strings the parser must handle: the letter may be dressed
    # up, embedded, or replaced by the full option text.
    option_texts = ("the agent stops", "the agent turns left",
                    "the agent reverses")
    for raw in ("B", "(b)", "Answer: B.", "I think B is right",
                "the agent turns left", "maybe", "F"):
        letter = parse_answer(raw, 3, option_texts)
        print(f"  parse({raw!r:28}) -> {letter}")

    suite = synth_suite(seed=0)
    scenes = {scene.scene_id: scene for scene, _ in suite}
    instances = [inst for scene, _ in suite
                 for inst in mine_scene(scene)]
    doc = generate_questions(instances, scenes, k=5, seed=7)

    # Simulate a model that knows 70% of the answers and guesses the
    # rest, answering in free text either way.
    rng = random.Random(11)
    answers = []
    for q in doc.questions:
        letter = (q.correct_letter if rng.random() < 0.7
                  else rng.choice("ABCDE"))
        answers.append(AnswerRecord(q.question_id,
                                    f"The answer is {letter}."))

    report = score(doc, answers)
    print()
    print(format_report(report))

    bias = bias_report(doc, answers)
    print(f"\nletter bias: chi2={bias['chi2']:.2f} "
          f"p={bias['p_value']:.3f}")
    print(f"predicted letters: {bias['predicted']}")

    # Blind guessing lands at 1/K; a model below that is worse than
    # chance, usually a sign its answers are not being parsed.
    guesses = [AnswerRecord(q.question_id, rng.choice("ABCDE"))
               for q in doc.questions]
    print(f"\nrandom baseline overall: "
          f"{100 * score(doc, guesses).overall_micro:.2f} "
          f"(chance is 20.00)")


if __name__ == "__main__":
    main()
