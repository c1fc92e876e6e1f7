"""Per-model-family prompt rendering for generated questions.

Three families share one question but differ in how agents are named
and what evidence is embedded. ``llm_trajectory`` writes coordinate
blocks, ``vlm_images`` names the camera of every frame and gives pixel
regions, ``expert_multiview`` uses inline referral tags that carry the
camera and a percent-of-image center. Templates are plain text with
replaceable fields; anything else, including literal {IMAGE_TOKEN} and
<image> markers, passes through untouched.
"""
from __future__ import annotations

from importlib import resources
from typing import Mapping

from sts.catalog import Catalog, default_catalog

from .generate import EGO_TOKEN, partner_token
from .types import FAMILIES, AgentRef, Option, Question, QuestgenError

TEMPLATE_ROOT = "data/templates"

EXPERT_CAMERA_COUNT = 6


def load_templates() -> dict[str, str]:
    """Packaged default template per family."""
    root = resources.files("sts").joinpath(TEMPLATE_ROOT)
    return {family: root.joinpath(f"{family}.txt").read_text(encoding="utf-8")
            for family in FAMILIES}


def _ego_word(family: str) -> str:
    return "you" if family == "vlm_images" else "ego"


def _referral(agent: AgentRef, family: str, short: bool = False) -> str:
    """How an agent is named; expert tags shorten to "cN" after first use."""
    if family == "expert_multiview":
        if short:
            return f"c{agent.role}"
        tag = agent.referrals.get("expert_multiview")
        if tag is None:
            raise QuestgenError("views unavailable")
        return tag
    return agent.referrals[family]


def _agent_for_token(question: Question, token: str) -> AgentRef:
    index = 0 if token == "{AGENT1}" else 1
    if index >= len(question.agents):
        raise QuestgenError(
            f"question '{question.question_id}' has no agent for {token}")
    return question.agents[index]


def _question_sentence(question: Question, family: str) -> str:
    text = question.question_text
    if family == "vlm_images":
        text = text.replace("the ego driving", "your driving")
        text = text.replace("ego driving", "your driving")
    for token in ("{AGENT1}", "{AGENT2}"):
        if token in text:
            text = text.replace(
                token, _referral(_agent_for_token(question, token), family))
    return text


def _option_sentence(option: Option, question: Question, family: str,
                     catalog: Catalog) -> str:
    entry = catalog.entry(option.scenario_type)
    if entry.category in ("Ego", "EgoToAgent"):
        subject = _ego_word(family)
    else:
        subject = _referral(question.agents[0], family, short=True)
    label = entry.option_label
    if "{PARTNER}" in label:
        token = partner_token(entry)
        if token == EGO_TOKEN:
            partner = _ego_word(family)
        else:
            partner = _referral(_agent_for_token(question, token), family,
                                short=True)
        label = label.replace("{PARTNER}", partner)
    if family == "llm_trajectory":
        sentence = f"{subject} {label}"
    else:
        copula = "are" if subject == "you" else "is"
        sentence = f"{subject} {copula} {label}"
    if family == "expert_multiview":
        return sentence
    return sentence[0].upper() + sentence[1:]


def _options_block(question: Question, family: str, catalog: Catalog) -> str:
    return "\n".join(
        f"{o.letter}. {_option_sentence(o, question, family, catalog)}"
        for o in question.options)


def _definitions_block(question: Question, family: str,
                       catalog: Catalog) -> str:
    lines = []
    for option in question.options:
        entry = catalog.entry(option.scenario_type)
        sentence = _option_sentence(option, question, family, catalog)
        lines.append(f"{sentence}: {entry.definition_text}")
    return "\n".join(lines)


def _trajectory_block(question: Question) -> str:
    lines = ["Ego:"]
    for i, (x, y, yaw, _speed) in enumerate(question.ego_trajectory):
        lines += [f"  Frame number: {i}",
                  f"  x: {x:.2f}",
                  f"  y: {y:.2f}",
                  f"  rotation: {yaw:.2f}"]
    for agent in question.agents:
        lines.append(f"Agent {agent.role}:")
        lines.append(f"  Class: {agent.agent_class}")
        for i, (x, y, yaw, _speed) in enumerate(agent.trajectory):
            lines += [f"  Frame number: {i}",
                      f"  LiDAR x: {x:.2f}",
                      f"  LiDAR y: {y:.2f}",
                      f"  LiDAR rotation: {yaw:.2f}"]
            if agent.views is not None and agent.views[i] is not None:
                u, v = agent.centers_px[i]
                lines += [f"  CAM x: {u:.2f}",
                          f"  CAM y: {v:.2f}",
                          f"  CAM: {agent.views[i]}"]
    return "\n".join(lines)


def _filled_views(agent: AgentRef) -> list[str]:
    """Per-frame view names with gaps carried over from neighbors."""
    if agent.views is None or all(name is None for name in agent.views):
        raise QuestgenError("views unavailable")
    filled: list[str | None] = list(agent.views)
    last = None
    for i, name in enumerate(filled):
        if name is None:
            filled[i] = last
        else:
            last = name
    first = next(name for name in filled if name is not None)
    return [name if name is not None else first for name in filled]


def _first_box(agent: AgentRef) -> tuple[int, tuple[int, int, int, int]]:
    if agent.boxes_px is not None:
        for i, box in enumerate(agent.boxes_px):
            if box is not None:
                return i, box
    raise QuestgenError("views unavailable")


def _views_block(question: Question) -> str:
    if question.agents:
        names = _filled_views(question.agents[0])
    else:
        names = ["CAM_FRONT"] * question.window_length
    clauses = ", ".join(f"Frame-{i + 1} is captured with {name}"
                        for i, name in enumerate(names))
    sentence = f"Consider that the {clauses}."
    regions = []
    for agent in question.agents:
        index, box = _first_box(agent)
        regions.append(
            f"{agent.referrals['vlm_images']}, which is "
            f"{agent.agent_class} inside region "
            f"[{box[0]}, {box[1]}, {box[2]}, {box[3]}] in Frame-{index + 1}")
    if regions:
        sentence += " Also, consider " + " and ".join(regions) + "."
    return sentence


def _images_block(question: Question, family: str) -> str:
    if family == "vlm_images":
        return "\n".join(f"Frame-{i + 1}: {{IMAGE_TOKEN}}"
                         for i in range(question.window_length))
    tokens = " ".join(f"{i + 1}: <image>"
                      for i in range(EXPERT_CAMERA_COUNT))
    return f"{tokens}."


def render_prompt(question: Question, family: str,
                  templates: Mapping[str, str] | None = None,
                  catalog: Catalog | None = None) -> str:
    """Complete prompt text for one question and one model family."""
    if family not in FAMILIES:
        raise QuestgenError(
            f"unknown family '{family}', expected one of "
            f"{', '.join(FAMILIES)}")
    if family != "llm_trajectory" and not question.views_available:
        raise QuestgenError("views unavailable")
    templates = templates if templates is not None else load_templates()
    template = templates.get(family)
    if template is None:
        raise QuestgenError(f"no template for family '{family}'")
    catalog = catalog if catalog is not None else default_catalog()
    fields = {
        "{QUESTION}": lambda: _question_sentence(question, family),
        "{OPTIONS}": lambda: _options_block(question, family, catalog),
        "{DEFINITIONS}": lambda: _definitions_block(question, family,
                                                    catalog),
        "{TRAJ}": lambda: _trajectory_block(question),
        "{VIEWS}": lambda: _views_block(question),
        "{IMAGES}": lambda: _images_block(question, family),
        "{FRAMES}": lambda: str(question.window_length),
        "{SECONDS}": lambda: f"{question.duration_s:g}",
    }
    text = template
    for token, build in fields.items():
        if token in text:
            text = text.replace(token, build())
    return text.rstrip("\n")
