"""Closed part-of-speech tag inventories with label/id interning.

A tag-set file defines one tag per non-comment line as ``LABEL<TAB>description``.
Lines starting with ``#`` are comments.  A directive line
``!sentence_delim LABEL`` marks the tags that end a sentence; without the
directive the tag ``$.`` is the delimiter when present.  Tag ids are assigned
in file order so that saved models and bias files stay stable across loads.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from importlib import resources
from typing import Iterator

from .errors import ConfigError

DEFAULT_TAGSET_RESOURCE = "elwis.tags"


@dataclass(frozen=True)
class Tag:
    id: int
    label: str
    description: str = ""


class TagSet:
    """Immutable ordered tag inventory; ids are dense 0..N-1 in load order."""

    def __init__(self, tags, sentence_delimiters=()):
        self.tags: tuple[Tag, ...] = tuple(tags)
        self.label_index: dict[str, int] = {t.label: t.id for t in self.tags}
        self.sentence_delimiters: frozenset[int] = frozenset(sentence_delimiters)
        if len(self.label_index) != len(self.tags):
            raise ConfigError("tag labels are not unique")
        for i, t in enumerate(self.tags):
            if t.id != i:
                raise ConfigError(f"tag ids are not dense: {t.label!r} has id {t.id} at position {i}")
        bad = self.sentence_delimiters - set(range(len(self.tags)))
        if bad:
            raise ConfigError(f"sentence delimiter ids {sorted(bad)} are out of range")

    def __len__(self) -> int:
        return len(self.tags)

    def __iter__(self) -> Iterator[Tag]:
        return iter(self.tags)

    def __eq__(self, other):
        return (
            isinstance(other, TagSet)
            and self.tags == other.tags
            and self.sentence_delimiters == other.sentence_delimiters
        )

    def __repr__(self):
        return f"TagSet({len(self.tags)} tags)"

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(t.label for t in self.tags)

    def label(self, tag_id: int) -> str:
        return self.tags[tag_id].label

    def tag_id(self, label: str):
        """Return the id for ``label`` (case-sensitive), or None if unknown."""
        return self.label_index.get(label)


def tag_id(ts: TagSet, label: str):
    """Case-sensitive label lookup; returns None when the label is unknown."""
    return ts.tag_id(label)


def _read_config_text(source) -> str:
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    with open(os.fspath(source), "r", encoding="utf-8") as f:
        return f.read()


def load_tagset(source) -> TagSet:
    """Load a TagSet from a path or file object.

    Raises ConfigError for duplicate labels, labels containing whitespace,
    unknown directives, a ``!sentence_delim`` naming an unknown label, or an
    empty file.
    """
    text = _read_config_text(source)
    tags: list[Tag] = []
    seen: dict[str, int] = {}
    delim_requests: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("!"):
            fields = line.split()
            if fields[0] != "!sentence_delim" or len(fields) != 2:
                raise ConfigError(f"line {lineno}: unknown directive {line!r}")
            delim_requests.append((lineno, fields[1]))
            continue
        label, _, description = line.partition("\t")
        if not label or any(ch.isspace() for ch in label):
            raise ConfigError(f"line {lineno}: bad tag label {label!r} (expected LABEL<TAB>description)")
        if label in seen:
            raise ConfigError(f"line {lineno}: duplicate tag label {label!r} (first defined on line {seen[label]})")
        seen[label] = lineno
        tags.append(Tag(id=len(tags), label=label, description=description.strip()))
    if not tags:
        raise ConfigError("tag-set file defines no tags")

    label_to_id = {t.label: t.id for t in tags}
    if delim_requests:
        delims = set()
        for lineno, label in delim_requests:
            if label not in label_to_id:
                raise ConfigError(f"line {lineno}: !sentence_delim names unknown tag {label!r}")
            delims.add(label_to_id[label])
    else:
        delims = {label_to_id["$."]} if "$." in label_to_id else set()
    return TagSet(tags, delims)


def default_tagset() -> TagSet:
    """The bundled ELWIS German tag set."""
    data = resources.files("hmmtagger.data").joinpath(DEFAULT_TAGSET_RESOURCE).read_text("utf-8")
    return load_tagset(io.StringIO(data))
