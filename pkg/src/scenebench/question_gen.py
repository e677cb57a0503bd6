"""Prompt-grounded questions and answer scoring.

The structured description a scene was generated from serves as ground truth
for two question families: *measurements* (object counts) and *relations*
(support, proximity, containment and arrangement between categories).
Templates, predicate phrases and plural forms live in
``data/question_templates.json`` so they can be swapped without code changes.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import jsonio
from ._data import load_table
from .errors import AmbiguityError, InputError, SpecReferenceError, SpecValidationError, VocabularyError
from .scene_adapter.lighting import CONDITIONS
from .scene_adapter.semantics import normalize_label

log = logging.getLogger(__name__)

SUBSETS = ("furniture", "manipuland")
CATEGORIES = ("measurements", "relations")
SOURCES = ("prompt_gt", "standard")


def _tables() -> dict:
    return load_table("question_templates.json")


PREDICATES = tuple(_tables()["predicates"])


@dataclass(frozen=True)
class ObjectEntry:
    category: str
    count: int


@dataclass(frozen=True)
class Relation:
    subject: str
    predicate: str
    object: str

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class SceneSpec:
    scene_id: str
    subset: str
    objects: tuple[ObjectEntry, ...]
    relations: tuple[Relation, ...] = ()
    source_prompt: str = ""

    @property
    def categories(self) -> list[str]:
        return [o.category for o in self.objects]

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "subset": self.subset,
            "objects": [{"category": o.category, "count": o.count} for o in self.objects],
            "relations": [
                {"subject": r.subject, "predicate": r.predicate, "object": r.object}
                for r in self.relations
            ],
            "source_prompt": self.source_prompt,
        }


def _require(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise SpecValidationError(path, msg)


def _string(doc: Mapping, key: str, path: str) -> str:
    value = doc.get(key)
    _require(isinstance(value, str) and value.strip() != "", f"{path}.{key}", "must be a non-empty string")
    return value.strip()


def load_scene_spec(document: Mapping | str | bytes) -> SceneSpec:
    """Validate a scene specification document.

    Raises:
        SpecValidationError: structural problem, with the failing path.
        VocabularyError: unknown relation predicate.
        SpecReferenceError: relation mentions a category not among the objects.
    """
    if isinstance(document, (str, bytes)):
        import json

        document = json.loads(document)
    _require(isinstance(document, Mapping), "$", "must be an object")
    scene_id = _string(document, "scene_id", "$")
    subset = _string(document, "subset", "$")
    _require(subset in SUBSETS, "$.subset", f"must be one of {SUBSETS}")

    raw_objects = document.get("objects")
    _require(isinstance(raw_objects, list) and raw_objects, "$.objects", "must be a non-empty list")
    objects = []
    seen = set()
    for i, o in enumerate(raw_objects):
        path = f"$.objects[{i}]"
        _require(isinstance(o, Mapping), path, "must be an object")
        cat = _string(o, "category", path)
        count = o.get("count")
        _require(
            isinstance(count, int) and not isinstance(count, bool) and count >= 1,
            f"{path}.count",
            "must be an integer >= 1",
        )
        _require(cat not in seen, f"{path}.category", f"duplicate category {cat!r}")
        seen.add(cat)
        objects.append(ObjectEntry(cat, count))

    raw_rel = document.get("relations", [])
    _require(isinstance(raw_rel, list), "$.relations", "must be a list")
    relations = []
    triples = set()
    for i, r in enumerate(raw_rel):
        path = f"$.relations[{i}]"
        _require(isinstance(r, Mapping), path, "must be an object")
        rel = Relation(_string(r, "subject", path), _string(r, "predicate", path), _string(r, "object", path))
        if rel.predicate not in PREDICATES:
            raise VocabularyError(f"{path}.predicate", f"unknown predicate {rel.predicate!r}")
        for role in ("subject", "object"):
            if getattr(rel, role) not in seen:
                raise SpecReferenceError(
                    f"{path}.{role}", f"category {getattr(rel, role)!r} is not among the objects"
                )
        _require(rel.as_tuple() not in triples, path, "duplicate relation triple")
        triples.add(rel.as_tuple())
        relations.append(rel)

    prompt = document.get("source_prompt", "")
    _require(isinstance(prompt, str), "$.source_prompt", "must be a string")
    return SceneSpec(scene_id, subset, tuple(objects), tuple(relations), prompt)


# -- questions --------------------------------------------------------------


@dataclass(frozen=True)
class QuestionItem:
    qid: str
    scene_id: str
    subset: str
    category: str
    kind: str
    text: str
    ground_truth: int | bool | str
    answer_type: str
    source: str = "prompt_gt"
    template_version: str = ""
    accepted: tuple[str, ...] = field(default=())

    def __post_init__(self):
        ok = {
            "integer": isinstance(self.ground_truth, int) and not isinstance(self.ground_truth, bool),
            "boolean": isinstance(self.ground_truth, bool),
            "category": isinstance(self.ground_truth, str),
        }.get(self.answer_type)
        if not ok:
            raise InputError(f"{self.qid}: ground truth {self.ground_truth!r} is not {self.answer_type}")
        if self.category not in CATEGORIES or self.source not in SOURCES:
            raise InputError(f"{self.qid}: bad category/source")

    def to_dict(self) -> dict:
        return {
            "qid": self.qid,
            "scene_id": self.scene_id,
            "subset": self.subset,
            "category": self.category,
            "kind": self.kind,
            "text": self.text,
            "ground_truth": self.ground_truth,
            "answer_type": self.answer_type,
            "source": self.source,
            "template_version": self.template_version,
            "accepted": list(self.accepted),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "QuestionItem":
        return cls(
            qid=d["qid"],
            scene_id=d["scene_id"],
            subset=d["subset"],
            category=d["category"],
            kind=d.get("kind", ""),
            text=d["text"],
            ground_truth=d["ground_truth"],
            answer_type=d["answer_type"],
            source=d.get("source", "prompt_gt"),
            template_version=d.get("template_version", ""),
            accepted=tuple(d.get("accepted", ())),
        )


def pluralize(noun: str) -> str:
    exceptions = _tables()["plural_exceptions"]
    if noun in exceptions:
        return exceptions[noun]
    head, _, last = noun.rpartition(" ")
    last = exceptions.get(last, last + "s")
    return f"{head} {last}" if head else last


def gen_measurement_questions(spec: SceneSpec, seed: int = 0) -> list[QuestionItem]:
    """One count question per category (sorted) plus a total-count question."""
    t = _tables()
    tpl = t["templates"]
    out = []
    for i, obj in enumerate(sorted(spec.objects, key=lambda o: o.category)):
        out.append(
            QuestionItem(
                qid=f"{spec.scene_id}/M{i}",
                scene_id=spec.scene_id,
                subset=spec.subset,
                category="measurements",
                kind="count",
                text=tpl["count"]["text"].format(plural=pluralize(obj.category)),
                ground_truth=obj.count,
                answer_type=tpl["count"]["answer_type"],
                template_version=t["template_version"],
            )
        )
    out.append(
        QuestionItem(
            qid=f"{spec.scene_id}/M{len(out)}",
            scene_id=spec.scene_id,
            subset=spec.subset,
            category="measurements",
            kind="total",
            text=tpl["total"]["text"],
            ground_truth=sum(o.count for o in spec.objects),
            answer_type=tpl["total"]["answer_type"],
            template_version=t["template_version"],
        )
    )
    return out


def gen_relation_questions(spec: SceneSpec, seed: int = 0) -> list[QuestionItem]:
    """Verification, open and negative questions for every relation triple.

    Negatives swap in another in-scene category as subject such that the
    resulting triple is absent from the spec; the swap is drawn from a seeded
    RNG. A triple without any valid substitute gets no negative.
    """
    t = _tables()
    tpl = t["templates"]
    phrases = t["predicates"]
    version = t["template_version"]
    triples = {r.as_tuple() for r in spec.relations}
    cats = sorted(spec.categories)
    out: list[QuestionItem] = []

    def add(kind: str, gt, accepted=(), **fmt):
        out.append(
            QuestionItem(
                qid=f"{spec.scene_id}/R{len(out)}",
                scene_id=spec.scene_id,
                subset=spec.subset,
                category="relations",
                kind=kind,
                text=tpl[kind]["text"].format(**fmt),
                ground_truth=gt,
                answer_type=tpl[kind]["answer_type"],
                template_version=version,
                accepted=tuple(accepted),
            )
        )

    for idx, rel in enumerate(sorted(spec.relations, key=Relation.as_tuple)):
        phrase = phrases[rel.predicate]
        add("verify", True, subject=rel.subject, phrase=phrase, object=rel.object)
        subjects = sorted(s for s, p, o in triples if p == rel.predicate and o == rel.object)
        add("open", rel.subject, subjects, phrase=phrase, object=rel.object)
        if not t.get("negatives_enabled", True):
            continue
        pool = [
            c
            for c in cats
            if c not in (rel.subject, rel.object) and (c, rel.predicate, rel.object) not in triples
        ]
        if not pool:
            log.info("%s: no negative substitute for %s", spec.scene_id, rel.as_tuple())
            continue
        rng = random.Random(f"{spec.scene_id}:{seed}:{idx}")
        sub = rng.choice(pool)
        add("negative", False, subject=sub, phrase=phrase, object=rel.object)
    return out


def generate_questions(spec: SceneSpec, seed: int = 0) -> list[QuestionItem]:
    return gen_measurement_questions(spec, seed) + gen_relation_questions(spec, seed)


# -- answers and scoring ----------------------------------------------------


@dataclass(frozen=True)
class AnswerRecord:
    qid: str
    method: str
    condition: str
    answer_text: str

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise InputError(f"answer for {self.qid}: unknown condition {self.condition!r}")

    @classmethod
    def from_dict(cls, d: Mapping) -> "AnswerRecord":
        return cls(d["qid"], d["method"], d["condition"], str(d.get("answer_text", "")))

    def to_dict(self) -> dict:
        return {
            "qid": self.qid,
            "method": self.method,
            "condition": self.condition,
            "answer_text": self.answer_text,
        }


@dataclass(frozen=True)
class Verdict:
    qid: str
    scene_id: str
    subset: str
    category: str
    source: str
    method: str
    condition: str
    correct: bool
    answered: bool

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Verdict":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})


_TERMINAL_PUNCT = ".!?,;:"


def normalize_answer(text: str) -> str:
    return text.strip().lower().rstrip(_TERMINAL_PUNCT).strip()


def parse_integer(text: str) -> int | None:
    s = normalize_answer(text)
    if re.fullmatch(r"\d+", s):
        return int(s)
    words = _tables()["number_words"]
    return words.index(s) if s in words else None


def parse_boolean(text: str) -> bool | None:
    return _tables()["boolean_words"].get(normalize_answer(text))


def is_correct(question: QuestionItem, answer_text: str) -> bool:
    if question.answer_type == "integer":
        return parse_integer(answer_text) == question.ground_truth
    if question.answer_type == "boolean":
        return parse_boolean(answer_text) is question.ground_truth
    given = normalize_label(normalize_answer(answer_text))
    if given == "unknown":
        return False
    targets = {normalize_label(question.ground_truth)}
    targets.update(normalize_label(a) for a in question.accepted)
    return given in targets


def score_answers(
    questions: Sequence[QuestionItem], answers: Iterable[AnswerRecord]
) -> list[Verdict]:
    """Score every question for every (method, condition) seen in ``answers``.

    Unanswered questions count as incorrect. Verdicts are ordered by method,
    condition, then question order.

    Raises:
        InputError: an answer references an unknown qid.
        AmbiguityError: two answers for the same (qid, method, condition).
    """
    by_qid = {q.qid: q for q in questions}
    if len(by_qid) != len(questions):
        raise InputError("duplicate qids among questions")
    table: dict[tuple[str, str, str], str] = {}
    methods, conditions = set(), set()
    for a in answers:
        if a.qid not in by_qid:
            raise InputError(f"answer references unknown question {a.qid!r}")
        key = (a.qid, a.method, a.condition)
        if key in table:
            raise AmbiguityError(f"duplicate answers for {key}")
        table[key] = a.answer_text
        methods.add(a.method)
        conditions.add(a.condition)

    verdicts = []
    for method in sorted(methods):
        for cond in sorted(conditions, key=CONDITIONS.index):
            for q in questions:
                text = table.get((q.qid, method, cond))
                verdicts.append(
                    Verdict(
                        qid=q.qid,
                        scene_id=q.scene_id,
                        subset=q.subset,
                        category=q.category,
                        source=q.source,
                        method=method,
                        condition=cond,
                        correct=text is not None and is_correct(q, text),
                        answered=text is not None,
                    )
                )
    return verdicts


def accuracy(verdicts: Sequence[Verdict]) -> float:
    if not verdicts:
        raise InputError("accuracy of an empty verdict set is undefined")
    return sum(v.correct for v in verdicts) / len(verdicts)


def write_questions(path: Path, questions: Iterable[QuestionItem]) -> None:
    jsonio.write_jsonl(path, (q.to_dict() for q in questions))


def read_questions(path: Path) -> list[QuestionItem]:
    return [QuestionItem.from_dict(d) for d in jsonio.read_jsonl(path)]


def read_answers(path: Path) -> list[AnswerRecord]:
    return [AnswerRecord.from_dict(d) for d in jsonio.read_jsonl(path)]
