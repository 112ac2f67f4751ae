"""English command interpretation.

A free-text command ("I want to perform a clustering using 3 clusters on
the iris dataset.") is interrogated with the questions stored in a slot
registry (parameters.csv).  Yes/No questions map a positive answer to a
fixed return value; standard questions extract a text span from the
command.  For every key the answer with the best confidence wins, and the
result is collected into a CommandFrame.

The default question-answering backend is deterministic and lexical so
the whole pipeline is reproducible offline.  A different backend (e.g. a
remote model service) can be plugged in by implementing ``answer_span``
and ``answer_boolean`` with the same signatures.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

PROBLEM_VOCABULARY = {
    "CLUSTERING",
    "DIMENSIONALITY",
    "CLASSIFICATION",
    "PREDICTION",
    "FEAT_IMP",
}

REGISTRY_HEADER = ["Key", "Type", "Return value", "Questions"]


class RegistryError(ValueError):
    """Raised for malformed registry files or unknown keys."""


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlotRule:
    """One registry row: a question used to fill `key` from a command."""

    key: str
    kind: str                 # "boolean" (Y/N) or "span" (Std.)
    return_value: str         # used only when kind == "boolean"
    question: str

    def __post_init__(self):
        if not self.question:
            raise RegistryError(f"rule for key {self.key} has an empty question")
        if self.kind == "boolean" and not self.return_value:
            raise RegistryError(
                f"boolean rule {self.question!r} needs a return value")
        if self.kind == "span" and self.return_value:
            raise RegistryError(
                f"span rule {self.question!r} must not carry a return value")
        if self.kind not in ("boolean", "span"):
            raise RegistryError(f"unknown rule kind {self.kind!r}")


class SlotRegistry:
    """Ordered collection of SlotRules; file order is the tie-break order."""

    def __init__(self, rules: Iterable[SlotRule]):
        self.rules = list(rules)
        if not self.rules:
            raise RegistryError("registry has no rules")

    def keys(self) -> set:
        return {r.key for r in self.rules}

    def rules_for(self, key: str) -> list:
        return [r for r in self.rules if r.key == key]

    def __len__(self):
        return len(self.rules)


_KIND_BY_TOKEN = {"Y/N": "boolean", "Std.": "span"}


def load_registry(source) -> SlotRegistry:
    """Parse a registry CSV (header `Key,Type,Return value,Questions`).

    `source` is an open text stream or a path.  Raises RegistryError on a
    malformed row, an unknown Type token or an empty file.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return load_registry(fh)

    reader = csv.reader(source)
    rows = list(reader)
    if not rows:
        raise RegistryError("registry has no rules")
    if [c.strip() for c in rows[0]] != REGISTRY_HEADER:
        raise RegistryError(
            f"line 1: expected header {','.join(REGISTRY_HEADER)!r}")

    rules = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise RegistryError(
                f"line {lineno}: expected 4 columns, got {len(row)}")
        key, kind_token, return_value, question = (c.strip() for c in row)
        if kind_token not in _KIND_BY_TOKEN:
            raise RegistryError(
                f"line {lineno}: unknown Type token {kind_token!r}")
        rules.append(SlotRule(key, _KIND_BY_TOKEN[kind_token],
                              return_value, question))
    if not rules:
        raise RegistryError("registry has no rules")
    return SlotRegistry(rules)


def default_registry() -> SlotRegistry:
    """The registry shipped with the package (assets/parameters.csv)."""
    text = resources.files("mlworkbench.assets").joinpath("parameters.csv")
    with text.open("r", encoding="utf-8") as fh:
        return load_registry(fh)


# ---------------------------------------------------------------------------
# Deterministic QA backend
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Answer:
    text: str
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0,1]")


def _tokens(text: str) -> list:
    return re.findall(r"[a-z0-9_]+", text.lower())


def _squash(score: float) -> float:
    # Exponential (softmax-style) normalisation of a raw match score
    # against an empty-match baseline: exp(s) / (exp(s) + exp(0)).
    return 1.0 / (1.0 + math.exp(-score))


# Topic lexicons for Yes/No questions.  `triggers` identify the topic in
# the question text; `tokens` are the command-side synonyms that count as
# a match; `support` tokens only add weight when a primary token matched.
_BOOLEAN_TOPICS = [
    ("reproducible",
     {"reproductible", "reproducible"},
     {"reproducible", "reproductible", "repeatable"},
     set()),
    ("random",
     {"random"},
     {"random", "randomly", "randomized", "randomised"},
     set()),
    ("clustering",
     {"clustering", "cluster", "regrouping", "regroup"},
     {"cluster", "clusters", "clustering", "clustered",
      "regroup", "regrouping", "group", "groups", "grouping"},
     set()),
    ("classification",
     {"classification", "classify"},
     {"classification", "classify", "classifier", "classifying",
      "classified"},
     set()),
    ("dimensionality",
     {"dimensionality"},
     {"dimensionality", "dimension", "dimensions",
      "component", "components"},
     set()),
    ("prediction",
     {"prediction", "predict"},
     {"predict", "prediction", "predictions", "predicting"},
     set()),
    ("importance",
     {"importance"},
     {"importance"},
     {"feature", "features"}),
]


def _question_topic(question: str):
    q_tokens = set(_tokens(question))
    for name, triggers, tokens, support in _BOOLEAN_TOPICS:
        if q_tokens & triggers:
            return name, tokens, support
    return None


def answer_boolean(question: str, command: str) -> Answer:
    """Answer a Y/N registry question against the command.

    Yes iff the command contains a synonym of the question's topic term.
    Raw score = matched primary tokens (+ support tokens when a primary
    matched); confidence = exp-normalised score.  A "no" carries
    confidence 0 and never binds a key.
    """
    topic = _question_topic(question)
    if topic is None:
        return Answer("no", 0.0)
    _, lexicon, support = topic
    cmd_tokens = _tokens(command)
    primary = sum(1 for t in cmd_tokens if t in lexicon)
    if primary == 0:
        return Answer("no", 0.0)
    score = primary + sum(1 for t in cmd_tokens if t in support)
    return Answer("yes", _squash(score))


# Span extraction patterns.  Raw scores are fixed specificity weights:
# dataset cue+keyword = 2, count number+noun = 2, bracketed literal = 3.
_DATASET_RE = re.compile(
    r"\b(?:using|with|on|of|from|in)?\s*(?:the\s+)?([A-Za-z0-9_]+)\s+dataset\b",
    re.IGNORECASE)
_VECTOR_RE = re.compile(
    r"\[\s*[-+]?\d+(?:\.\d+)?(?:\s*,\s*[-+]?\d+(?:\.\d+)?)*\s*\]")
_HOW_MANY_RE = re.compile(r"\bhow\s+many\s+([a-z]+)", re.IGNORECASE)
_INT_RE = re.compile(r"^\d+$")

_DATASET_SCORE = 2.0
_COUNT_SCORE = 2.0
_VECTOR_SCORE = 3.0


def _noun_variants(noun: str) -> set:
    variants = {noun}
    if noun.endswith("s"):
        variants.add(noun[:-1])
    else:
        variants.add(noun + "s")
    return variants


def answer_span(question: str, command: str) -> Optional[Answer]:
    """Answer a standard (open) registry question against the command.

    Recognises three question families: counts ("How many X?"), test
    values, and dataset names.  Returns None when no pattern fires in the
    command; that is a normal outcome, not an error.
    """
    if not question or not command:
        return None

    how_many = _HOW_MANY_RE.search(question)
    if how_many:
        wanted = _noun_variants(how_many.group(1).lower())
        toks = _tokens(command)
        for i, tok in enumerate(toks):
            if tok in wanted:
                if i > 0 and _INT_RE.match(toks[i - 1]):
                    return Answer(toks[i - 1], _squash(_COUNT_SCORE))
                if i + 1 < len(toks) and _INT_RE.match(toks[i + 1]):
                    return Answer(toks[i + 1], _squash(_COUNT_SCORE))
        return None

    q_tokens = set(_tokens(question))
    if q_tokens & {"test", "tested"}:
        m = _VECTOR_RE.search(command)
        if m:
            return Answer(m.group(0), _squash(_VECTOR_SCORE))
        return None

    if q_tokens & {"dataset", "data"}:
        m = _DATASET_RE.search(command)
        if m:
            return Answer(m.group(1), _squash(_DATASET_SCORE))
        return None

    return None


# ---------------------------------------------------------------------------
# Key resolution and frames
# ---------------------------------------------------------------------------

@dataclass
class CommandFrame:
    """Typed result of interpreting one command."""

    raw_command: str
    bindings: dict = field(default_factory=dict)   # key -> (value, confidence)
    unresolved: set = field(default_factory=set)

    def bind(self, key: str, value: str, confidence: float):
        if key == "PROBLEM" and value not in PROBLEM_VOCABULARY:
            raise ValueError(f"unknown problem value {value!r}")
        self.bindings[key] = (value, confidence)
        self.unresolved.discard(key)

    def value(self, key: str, default=None):
        if key in self.bindings:
            return self.bindings[key][0]
        return default

    def __contains__(self, key: str) -> bool:
        return key in self.bindings

    def values(self) -> dict:
        return {k: v for k, (v, _c) in self.bindings.items()}

    def to_json(self) -> dict:
        return {
            "command": self.raw_command,
            "bindings": {
                k: {"value": v, "confidence": round(c, 6)}
                for k, (v, c) in self.bindings.items()
            },
            "unresolved": sorted(self.unresolved),
        }


def resolve_key_trace(key: str, command: str, registry: SlotRegistry):
    """Evaluate every rule for `key` in file order.

    Returns (resolution, trace) where resolution is (value, confidence)
    or None and trace is a list of (rule, answer-or-None) pairs, one per
    rule, mirroring the question sequence applied to the command.
    """
    rules = registry.rules_for(key)
    if not rules:
        raise RegistryError(f"key not in registry: {key}")

    trace = []
    best = None
    for rule in rules:
        if rule.kind == "boolean":
            ans = answer_boolean(rule.question, command)
            trace.append((rule, ans))
            if ans.text != "yes":
                continue
            candidate = (rule.return_value, ans.confidence)
        else:
            ans = answer_span(rule.question, command)
            trace.append((rule, ans))
            if ans is None:
                continue
            candidate = (ans.text, ans.confidence)
        # Strict comparison keeps the first rule on ties (file order wins).
        if best is None or candidate[1] > best[1]:
            best = candidate
    return best, trace


def resolve_key(key: str, command: str, registry: SlotRegistry):
    """Best-confidence resolution of one key, or None."""
    best, _trace = resolve_key_trace(key, command, registry)
    return best


def interpret(command: str, registry: SlotRegistry,
              required_keys: list, optional_keys: Iterable[str] = ()) -> CommandFrame:
    """Resolve the given keys against the command.

    Required keys that cannot be resolved end up in `frame.unresolved`
    for the session layer to ask back; optional keys are simply skipped
    when the command does not mention them (their defaults are applied at
    dispatch time, not bound into the frame).
    """
    if required_keys and required_keys[0] != "PROBLEM":
        raise ValueError("required_keys must start with PROBLEM")
    frame = CommandFrame(raw_command=command)
    for key in required_keys:
        resolution = resolve_key(key, command, registry)
        if resolution is None:
            frame.unresolved.add(key)
        else:
            frame.bind(key, *resolution)
    for key in optional_keys:
        if key in frame.bindings:
            continue
        resolution = resolve_key(key, command, registry)
        if resolution is not None:
            frame.bind(key, *resolution)
    return frame
