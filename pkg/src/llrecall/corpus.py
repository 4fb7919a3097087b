"""Lessons, query artifacts and relevance judgments, plus their file formats.

On disk a corpus is three UTF-8 files:

* ``lessons.jsonl``  - one object per line: id, project_id, context, problem,
  recommended_actions
* ``artifacts.jsonl`` - one object per line: id, kind ("issue" | "risk"),
  title, description
* ``judgments.tsv``  - ``artifact_id<TAB>lesson_id`` pairs, one per line
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping

LESSONS_FILE = "lessons.jsonl"
ARTIFACTS_FILE = "artifacts.jsonl"
JUDGMENTS_FILE = "judgments.tsv"

ARTIFACT_KINDS = ("issue", "risk")


class CorpusError(ValueError):
    """Invalid corpus content: parse failure, duplicate id or dangling reference."""


@dataclass(frozen=True)
class LessonRecord:
    id: str
    project_id: str = ""
    context: str = ""
    problem: str = ""
    recommended_actions: str = ""


@dataclass(frozen=True)
class QueryArtifact:
    id: str
    kind: str
    title: str = ""
    description: str = ""


@dataclass(frozen=True, eq=True)
class Corpus:
    lessons: tuple[LessonRecord, ...]
    artifacts: tuple[QueryArtifact, ...]
    # artifact id -> relevant lesson ids; every artifact has an entry
    judgments: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lessons", tuple(self.lessons))
        object.__setattr__(self, "artifacts", tuple(self.artifacts))
        judgments = {a.id: frozenset() for a in self.artifacts}
        for aid, lids in self.judgments.items():
            judgments[aid] = frozenset(lids)
        object.__setattr__(self, "judgments", judgments)
        validate(self)

    def __hash__(self):
        return hash(self.content_hash)

    @property
    def lesson_ids(self) -> list[str]:
        return [lesson.id for lesson in self.lessons]

    def artifact(self, artifact_id: str) -> QueryArtifact:
        for a in self.artifacts:
            if a.id == artifact_id:
                return a
        raise KeyError(artifact_id)

    @cached_property
    def content_hash(self) -> str:
        """Stable hex digest of the corpus content, used as a cache key."""
        h = hashlib.sha256()
        for chunk in _serialize(self):
            h.update(chunk.encode("utf-8"))
        return h.hexdigest()[:16]


def validate(corpus: Corpus) -> None:
    lesson_ids = set()
    for lesson in corpus.lessons:
        if not lesson.id:
            raise CorpusError("lesson with empty id")
        if lesson.id in lesson_ids:
            raise CorpusError(f"duplicate lesson id {lesson.id!r}")
        if not (lesson.context or lesson.problem or lesson.recommended_actions):
            raise CorpusError(f"lesson {lesson.id!r} has no text")
        lesson_ids.add(lesson.id)
    artifact_ids = set()
    for a in corpus.artifacts:
        if not a.id:
            raise CorpusError("artifact with empty id")
        if a.id in artifact_ids:
            raise CorpusError(f"duplicate artifact id {a.id!r}")
        if a.kind not in ARTIFACT_KINDS:
            raise CorpusError(f"artifact {a.id!r} has kind {a.kind!r}, expected issue or risk")
        artifact_ids.add(a.id)
    for aid, lids in corpus.judgments.items():
        if aid not in artifact_ids:
            raise CorpusError(f"judgment references unknown artifact {aid!r}")
        missing = sorted(set(lids) - lesson_ids)
        if missing:
            raise CorpusError(f"judgment for {aid!r} references unknown lesson {missing[0]!r}")


def artifact_query_string(artifact: QueryArtifact) -> str:
    return _join(artifact.title, artifact.description)


def lesson_document_text(lesson: LessonRecord) -> str:
    return _join(lesson.context, lesson.problem, lesson.recommended_actions)


def _join(*parts: str) -> str:
    return " ".join(p for p in parts if p)


def _read_jsonl(path: Path, keys: tuple[str, ...]) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}:{lineno}: expected a JSON object")
            if "id" not in obj:
                raise CorpusError(f"{path}:{lineno}: missing key 'id'")
            row = {}
            for key in keys:
                value = obj.get(key, "")
                if not isinstance(value, str):
                    raise CorpusError(f"{path}:{lineno}: key {key!r} must be a string")
                row[key] = value
            rows.append(row)
    return rows


def _read_judgments(path: Path) -> dict[str, set[str]]:
    judgments: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0] or not cols[1]:
                raise CorpusError(f"{path}:{lineno}: expected 'artifact_id<TAB>lesson_id'")
            judgments.setdefault(cols[0], set()).add(cols[1])
    return judgments


def load_corpus(lessons_path, artifacts_path, judgments_path) -> Corpus:
    lessons = [
        LessonRecord(**row)
        for row in _read_jsonl(
            Path(lessons_path), ("id", "project_id", "context", "problem", "recommended_actions")
        )
    ]
    artifacts = [
        QueryArtifact(**row)
        for row in _read_jsonl(Path(artifacts_path), ("id", "kind", "title", "description"))
    ]
    judgments = _read_judgments(Path(judgments_path))
    return Corpus(lessons, artifacts, judgments)


def load_corpus_dir(directory) -> Corpus:
    d = Path(directory)
    return load_corpus(d / LESSONS_FILE, d / ARTIFACTS_FILE, d / JUDGMENTS_FILE)


def _serialize(corpus: Corpus):
    for lesson in corpus.lessons:
        yield json.dumps(lesson.__dict__, ensure_ascii=False) + "\n"
    yield "\x00"
    for a in corpus.artifacts:
        yield json.dumps(a.__dict__, ensure_ascii=False) + "\n"
    yield "\x00"
    for aid in sorted(corpus.judgments):
        for lid in sorted(corpus.judgments[aid]):
            yield f"{aid}\t{lid}\n"


def save_corpus(corpus: Corpus, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / LESSONS_FILE, "w", encoding="utf-8") as fh:
        for lesson in corpus.lessons:
            fh.write(json.dumps(lesson.__dict__, ensure_ascii=False) + "\n")
    with open(d / ARTIFACTS_FILE, "w", encoding="utf-8") as fh:
        for a in corpus.artifacts:
            fh.write(json.dumps(a.__dict__, ensure_ascii=False) + "\n")
    with open(d / JUDGMENTS_FILE, "w", encoding="utf-8") as fh:
        for a in corpus.artifacts:
            for lid in sorted(corpus.judgments[a.id]):
                fh.write(f"{a.id}\t{lid}\n")
