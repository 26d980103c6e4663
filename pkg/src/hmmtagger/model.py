"""HMM parameter tables, starting biases, and model persistence.

The model emits equivalence classes, not word forms: ``emission[t][c]`` is
the probability that tag ``t`` produces a token whose class is ``c``, and is
structurally zero whenever ``t`` is not a member of class ``c``.  Transition
prohibitions requested through a zero-weight bias are recorded in
``transition_zero_mask`` and stay exactly zero through every later operation,
including re-estimation; positive bias weights only shape the starting point
and remain trainable.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

import numpy as np

from .errors import (
    ConfigError,
    ModelChecksumError,
    ModelTagsetMismatchError,
    ModelVersionError,
)
from .lexicon import ClassStore
from .tagset import TagSet

ROW_SUM_TOL = 1e-9

_MAGIC = b"#class-hmm-tagger model v1\n"


class HmmModel:
    """Immutable-by-convention container for HMM probability tables.

    Operations in this package never mutate a model in place; they return
    new instances, so read-only sharing across threads is safe.
    """

    def __init__(self, tag_labels, class_members, initial, transition, emission,
                 transition_zero_mask=None):
        self.tag_labels: tuple[str, ...] = tuple(tag_labels)
        self.class_members: tuple[tuple[int, ...], ...] = tuple(
            tuple(sorted(m)) for m in class_members
        )
        self.initial = np.asarray(initial, dtype=np.float64)
        self.transition = np.asarray(transition, dtype=np.float64)
        self.emission = np.asarray(emission, dtype=np.float64)
        n = len(self.tag_labels)
        if transition_zero_mask is None:
            transition_zero_mask = np.zeros((n, n), dtype=bool)
        self.transition_zero_mask = np.asarray(transition_zero_mask, dtype=bool)
        self._log_cache = None

    @property
    def n_tags(self) -> int:
        return len(self.tag_labels)

    @property
    def n_classes(self) -> int:
        return len(self.class_members)

    def allowed_emission_mask(self) -> np.ndarray:
        """Boolean (n_tags, n_classes): True where the tag belongs to the class."""
        mask = np.zeros((self.n_tags, self.n_classes), dtype=bool)
        for c, members in enumerate(self.class_members):
            mask[list(members), c] = True
        return mask

    def log_tables(self):
        """Cached natural-log views (zeros become -inf) for decoding."""
        if self._log_cache is None:
            self._log_cache = tuple(_safe_log(a) for a in (self.initial, self.transition, self.emission))
        return self._log_cache

    def copy(self) -> "HmmModel":
        return HmmModel(self.tag_labels, self.class_members, self.initial.copy(),
                        self.transition.copy(), self.emission.copy(),
                        self.transition_zero_mask.copy())

    def validate(self) -> None:
        """Check stochasticity, mask, and emission-support invariants."""
        n, m = self.n_tags, self.n_classes
        if self.initial.shape != (n,) or self.transition.shape != (n, n) \
                or self.emission.shape != (n, m) or self.transition_zero_mask.shape != (n, n):
            raise ValueError("model table shapes are inconsistent")
        for name, table in (("initial", self.initial), ("transition", self.transition),
                            ("emission", self.emission)):
            if np.any(table < 0) or np.any(table > 1):
                raise ValueError(f"{name} contains probabilities outside [0, 1]")
        if abs(self.initial.sum() - 1.0) > ROW_SUM_TOL:
            raise ValueError(f"initial sums to {self.initial.sum()!r}, not 1")
        for name, table in (("transition", self.transition), ("emission", self.emission)):
            bad = np.nonzero(np.abs(table.sum(axis=1) - 1.0) > ROW_SUM_TOL)[0]
            if bad.size:
                raise ValueError(f"{name} row {bad[0]} does not sum to 1")
        if np.any(self.transition[self.transition_zero_mask] != 0.0):
            raise ValueError("a masked transition cell is positive")
        if np.any(self.emission[~self.allowed_emission_mask()] != 0.0):
            raise ValueError("a tag emits a class it does not belong to")


def _safe_log(a: np.ndarray) -> np.ndarray:
    out = np.full(a.shape, -np.inf)
    np.log(a, out=out, where=a > 0)
    return out


def _class_members_arg(classes) -> tuple[tuple[int, ...], ...]:
    if isinstance(classes, ClassStore):
        return classes.all_members()
    return tuple(tuple(sorted(m)) for m in classes)


def uniform_model(ts: TagSet, classes) -> HmmModel:
    """Bias-free starting point: uniform initial and transitions, and per tag
    a uniform emission over the classes that contain it.

    ``classes`` is a ClassStore or a sequence of member-id tuples.  A tag
    contained in no class could never emit anything and is rejected.
    """
    members = _class_members_arg(classes)
    if not members:
        raise ConfigError("class inventory is empty")
    n, m = len(ts), len(members)
    for c, mem in enumerate(members):
        for t in mem:
            if not 0 <= t < n:
                raise ConfigError(f"class {c} references tag id {t} outside the tag set")
    emission = np.zeros((n, m))
    for c, mem in enumerate(members):
        emission[list(mem), c] = 1.0
    row_sums = emission.sum(axis=1)
    orphans = np.nonzero(row_sums == 0)[0]
    if orphans.size:
        labels = ", ".join(ts.label(int(t)) for t in orphans)
        raise ConfigError(f"tags belonging to no equivalence class: {labels}")
    emission /= row_sums[:, None]
    return HmmModel(
        ts.labels,
        members,
        np.full(n, 1.0 / n),
        np.full((n, n), 1.0 / n),
        emission,
    )


@dataclass(frozen=True)
class TransitionBias:
    source: int
    target: int
    weight: float  # 0 means prohibition


@dataclass(frozen=True)
class SymbolBias:
    members: tuple[int, ...]  # class signature, sorted tag ids
    preferred: int
    weight: float


class BiasSet:
    """Starting preferences: multiplicative weights on transition and
    emission cells, applied before renormalization.  Weight 1 is a no-op;
    transition weight 0 is a permanent prohibition."""

    def __init__(self, transition_biases=(), symbol_biases=()):
        self.transition_biases: tuple[TransitionBias, ...] = tuple(transition_biases)
        self.symbol_biases: tuple[SymbolBias, ...] = tuple(symbol_biases)
        for b in self.symbol_biases:
            if b.preferred not in b.members:
                raise ConfigError(
                    f"symbol bias prefers tag {b.preferred} outside its class signature {b.members}"
                )
            if b.weight <= 0:
                raise ConfigError("symbol bias weights must be positive")
        for b in self.transition_biases:
            if b.weight < 0:
                raise ConfigError("transition bias weights must be >= 0")

    def __len__(self) -> int:
        return len(self.transition_biases) + len(self.symbol_biases)

    @classmethod
    def empty(cls) -> "BiasSet":
        return cls()


def load_biases(source, ts: TagSet) -> BiasSet:
    """Parse a bias file.

    Lines are ``TRANS <FROM> <TO> <weight>`` or
    ``SYM <TAG1+TAG2+...> <PREFERRED> <weight>``; ``#`` starts a comment.
    """
    from .lexicon import _iter_config_lines  # shared line scanner

    trans: list[TransitionBias] = []
    syms: list[SymbolBias] = []
    for lineno, line in _iter_config_lines(source):
        fields = line.split()
        if fields[0] == "TRANS":
            if len(fields) != 4:
                raise ConfigError(f"line {lineno}: expected TRANS <FROM> <TO> <weight>")
            src, dst = ts.tag_id(fields[1]), ts.tag_id(fields[2])
            if src is None or dst is None:
                raise ConfigError(f"line {lineno}: unknown tag in bias {line!r}")
            weight = _parse_weight(fields[3], lineno)
            if weight < 0:
                raise ConfigError(f"line {lineno}: negative transition weight")
            trans.append(TransitionBias(src, dst, weight))
        elif fields[0] == "SYM":
            if len(fields) != 4:
                raise ConfigError(f"line {lineno}: expected SYM <TAG1+TAG2+...> <PREFERRED> <weight>")
            member_ids = []
            for label in fields[1].split("+"):
                t = ts.tag_id(label)
                if t is None:
                    raise ConfigError(f"line {lineno}: unknown tag {label!r} in class signature")
                member_ids.append(t)
            preferred = ts.tag_id(fields[2])
            if preferred is None:
                raise ConfigError(f"line {lineno}: unknown preferred tag {fields[2]!r}")
            weight = _parse_weight(fields[3], lineno)
            if weight <= 0:
                raise ConfigError(f"line {lineno}: symbol bias weight must be positive")
            if preferred not in member_ids:
                raise ConfigError(
                    f"line {lineno}: preferred tag {fields[2]!r} is not in the class signature"
                )
            syms.append(SymbolBias(tuple(sorted(set(member_ids))), preferred, weight))
        else:
            raise ConfigError(f"line {lineno}: unknown bias kind {fields[0]!r}")
    return BiasSet(trans, syms)


def _parse_weight(text: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: bad weight {text!r}") from None


def apply_biases(model: HmmModel, biases: BiasSet) -> HmmModel:
    """Return a new model with bias weights multiplied in and rows
    renormalized.

    Zero-weight transition biases set the cell to exactly 0 and extend the
    permanent zero mask; they win over any positive weight on the same cell.
    Symbol biases scale ``emission[preferred][class]`` for the class whose
    member signature matches exactly.
    """
    n = model.n_tags
    transition = model.transition.copy()
    emission = model.emission.copy()
    mask = model.transition_zero_mask.copy()

    for b in biases.transition_biases:
        if not (0 <= b.source < n and 0 <= b.target < n):
            raise ConfigError(f"transition bias {b} references an unknown tag id")
        if b.weight == 0:
            mask[b.source, b.target] = True
        else:
            transition[b.source, b.target] *= b.weight
    transition[mask] = 0.0

    class_index = {members: c for c, members in enumerate(model.class_members)}
    for b in biases.symbol_biases:
        c = class_index.get(b.members)
        if c is None:
            raise ConfigError(
                f"symbol bias class signature {b.members} is not in the model's class inventory"
            )
        emission[b.preferred, c] *= b.weight

    new = HmmModel(model.tag_labels, model.class_members, model.initial.copy(),
                   transition, emission, mask)
    _renormalize_in_place(new)
    return new


def _renormalize_in_place(model: HmmModel) -> None:
    for name, table in (("transition", model.transition), ("emission", model.emission)):
        sums = table.sum(axis=1)
        dead = np.nonzero(sums <= 0)[0]
        if dead.size:
            label = model.tag_labels[int(dead[0])]
            raise ConfigError(f"{name} row for tag {label!r} has no probability mass left")
        table /= sums[:, None]
    s = model.initial.sum()
    if s <= 0:
        raise ConfigError("initial distribution has no probability mass")
    model.initial /= s


def save_model(model: HmmModel, sink) -> None:
    """Serialize to a self-describing binary stream; bit-exact round trip.

    Layout: magic line, 4-byte big-endian header length, JSON header (tag
    labels and class signatures), raw little-endian float64 tables, the zero
    mask as bytes, then a SHA-256 digest of everything before it.
    """
    header = json.dumps({
        "tags": list(model.tag_labels),
        "classes": [list(m) for m in model.class_members],
    }).encode("utf-8")
    payload = b"".join([
        _MAGIC,
        struct.pack(">I", len(header)),
        header,
        model.initial.astype("<f8").tobytes(),
        model.transition.astype("<f8").tobytes(),
        model.emission.astype("<f8").tobytes(),
        model.transition_zero_mask.astype(np.uint8).tobytes(),
    ])
    blob = payload + hashlib.sha256(payload).digest()
    if hasattr(sink, "write"):
        sink.write(blob)
    else:
        with open(os.fspath(sink), "wb") as f:
            f.write(blob)


def load_model(source, ts: TagSet) -> HmmModel:
    """Read a model saved by save_model and bind it to ``ts``.

    Raises ModelVersionError on a bad magic line, ModelChecksumError on
    truncation or corruption, and ModelTagsetMismatchError when the stored
    tag labels differ from ``ts``.
    """
    if hasattr(source, "read"):
        blob = source.read()
    else:
        with open(os.fspath(source), "rb") as f:
            blob = f.read()
    if not blob.startswith(_MAGIC):
        raise ModelVersionError("not a model file, or unsupported format version")
    digest_size = hashlib.sha256().digest_size
    if len(blob) <= len(_MAGIC) + 4 + digest_size:
        raise ModelChecksumError("model file is truncated")
    payload, digest = blob[:-digest_size], blob[-digest_size:]
    if hashlib.sha256(payload).digest() != digest:
        raise ModelChecksumError("model file checksum does not match")

    offset = len(_MAGIC)
    (header_len,) = struct.unpack(">I", payload[offset:offset + 4])
    offset += 4
    try:
        header = json.loads(payload[offset:offset + header_len].decode("utf-8"))
        labels = tuple(header["tags"])
        class_members = tuple(tuple(m) for m in header["classes"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ModelChecksumError(f"model header is unreadable: {exc}") from None
    offset += header_len

    if labels != ts.labels:
        raise ModelTagsetMismatchError(
            "model was saved under a different tag set "
            f"({len(labels)} tags vs {len(ts)} in the current set)"
        )
    n, m = len(labels), len(class_members)
    sizes = [n * 8, n * n * 8, n * m * 8, n * n]
    if len(payload) - offset != sum(sizes):
        raise ModelChecksumError("model file has the wrong table sizes")
    arrays = []
    for count, shape, dtype in (
        (sizes[0], (n,), "<f8"),
        (sizes[1], (n, n), "<f8"),
        (sizes[2], (n, m), "<f8"),
        (sizes[3], (n, n), np.uint8),
    ):
        arrays.append(np.frombuffer(payload[offset:offset + count], dtype=dtype).reshape(shape))
        offset += count
    initial, transition, emission, mask = arrays
    return HmmModel(labels, class_members, initial.copy(), transition.copy(),
                    emission.copy(), mask.astype(bool))


def default_biases(ts: TagSet) -> BiasSet:
    """The bundled illustrative German bias file."""
    import io

    text = resources.files("hmmtagger.data").joinpath("biases_de.txt").read_text("utf-8")
    return load_biases(io.StringIO(text), ts)
