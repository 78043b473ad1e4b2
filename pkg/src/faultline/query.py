"""Entity-query construction and feedback-driven reformulation.

Category-specific prompt strategies: PE and ST reports get a reduction
prompt (shrink the report to its key entities), NL reports get an
expansion prompt (infer plausible entities), and expansion output is
pruned against the corpus so non-existent entities never reach ranking.
A QuerySession carries the conversation across reformulation cycles and
hard-excludes every class the user gave feedback on.
"""

import re
from dataclasses import dataclass, replace
from enum import Enum

from .corpus import CorpusBundle
from .errors import (EmptyQueryAfterValidation, FaultlineError, ProviderError,
                     ReplyUnparseable, SessionExhausted)
from .llm import LlmProvider, ProviderContext
from .reports import BugReport, Category, classify, detect_program_entities
from .tokens import STOPWORDS, token_stream

DEFAULT_MAX_CYCLES = 1
MAX_CYCLES_CAP = 5
_RETRIES = 2  # extra attempts after the first failed provider call


class ShotMode(str, Enum):
    ZERO_SHOT = "zero_shot"
    ONE_SHOT = "one_shot"


class Provenance(str, Enum):
    REDUCTION = "reduction"
    EXPANSION = "expansion"
    REFORMULATION = "reformulation"


@dataclass(frozen=True)
class Query:
    entities: tuple
    category: Category
    cycle: int = 0
    provenance: Provenance = Provenance.REDUCTION
    fallback: bool = False  # set when the LLM path failed and we degraded


@dataclass(frozen=True)
class Feedback:
    kind: str  # "non_existing_class" | "non_buggy_class"
    class_name: str

    KINDS = ("non_existing_class", "non_buggy_class")

    def message(self) -> str:
        if self.kind == "non_existing_class":
            return (f"I couldn't find any class named {self.class_name} "
                    "in the source code.")
        if self.kind == "non_buggy_class":
            return f"{self.class_name} doesn't seem to have the issue."
        raise FaultlineError(f"unknown feedback kind: {self.kind!r}")


@dataclass(frozen=True)
class PromptTemplate:
    category: Category
    system_text: str
    user_text_pattern: str  # exactly one {report} slot
    exemplar: tuple | None = None  # (report text, query text)


_REDUCTION_PE = ("Analyze the bug report and construct a query by identifying "
                 "programming entities (e.g., classes, methods) that may be "
                 "relevant to the bug's root cause.")
_REDUCTION_ST = ("Analyze the provided stack traces and construct a query, "
                 "identifying programming entities (e.g., classes, methods) "
                 "relevant to the bug's root cause.")
_EXPANSION_NL = ("Analyze the bug report and construct a query by identifying "
                 "potential programming entities (e.g., classes, methods) "
                 "relevant to the bug's root cause based on your knowledge.")
_USER_PATTERN = ("Bug report:\n{report}\n\n"
                 "Reply with the query entities only, separated by spaces.")

# Bundled one-shot exemplars; synthetic, shaped like the category they teach.
_EXEMPLARS = {
    Category.PE: (
        "Title: CsvWriter drops quoting for embedded separators\n"
        "Description: CsvWriter.writeRow() forgets to quote a cell when the "
        "cell contains the separator character.",
        "CsvWriter writeRow quote",
    ),
    Category.ST: (
        "Title: NPE when flushing an empty buffer\n"
        "Description: java.lang.NullPointerException\n"
        "at com.example.io.BufferedSink.flush(BufferedSink.java:88)\n"
        "at com.example.io.StreamCopier.copy(StreamCopier.java:41)",
        "BufferedSink StreamCopier flush",
    ),
    Category.NL: (
        "Title: Saving a form loses the selected options\n"
        "Description: After pressing save the previously selected options "
        "are gone when the page reloads.",
        "FormState OptionSelector saveState",
    ),
}

TEMPLATES = {
    Category.PE: PromptTemplate(Category.PE, _REDUCTION_PE, _USER_PATTERN,
                                _EXEMPLARS[Category.PE]),
    Category.ST: PromptTemplate(Category.ST, _REDUCTION_ST, _USER_PATTERN,
                                _EXEMPLARS[Category.ST]),
    Category.NL: PromptTemplate(Category.NL, _EXPANSION_NL, _USER_PATTERN,
                                _EXEMPLARS[Category.NL]),
}


def build_prompt(report: BugReport, category: Category,
                 shot_mode: ShotMode = ShotMode.ONE_SHOT) -> list[dict]:
    """Instantiate the category's template into a chat message list."""
    tpl = TEMPLATES[category]
    messages = [{"role": "system", "content": tpl.system_text}]
    if shot_mode == ShotMode.ONE_SHOT and tpl.exemplar is not None:
        ex_report, ex_query = tpl.exemplar
        messages.append({"role": "user",
                         "content": tpl.user_text_pattern.format(report=ex_report)})
        messages.append({"role": "assistant", "content": ex_query})
    messages.append({"role": "user",
                     "content": tpl.user_text_pattern.format(report=report.text)})
    return messages


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_CAMEL_RE = re.compile(r"[a-z0-9][A-Z]")

# Prose words an LLM reply mixes around entity lists; anything here is
# dropped unless it is camelCase, snake_case, or rescued by the corpus
# vocabulary. Deliberately omits identifier-ish verbs (finish, close, ...).
_REPLY_NOISE = STOPWORDS | frozenset("""
analyze analysis appears based bug cannot can cause caused class classes
code construct could determine entities entity error errors file files
following identify issue issues knowledge likely may method methods might
need none please possible potential problem programming provided query
related relevant report root seems sorry source suggest suggested suggests
trace traces unable unsure
""".split())


def parse_llm_reply(text: str, vocabulary=None) -> list[str]:
    """Extract entity tokens from a reply, in order, deduplicated.

    Keeps identifier-shaped tokens; plain lowercase words survive only if
    they are not common reply prose or they occur in the corpus vocabulary.
    """
    entities = []
    seen = set()
    for raw in re.split(r"[\s,;]+", text):
        tok = raw.strip("\"'`.()[]{}<>:!?*")
        if tok.endswith("()"):
            tok = tok[:-2]
        if not tok or not _IDENT_RE.match(tok):
            continue
        lowered = tok.lower()
        structured = "_" in tok or _CAMEL_RE.search(tok) is not None
        in_vocab = vocabulary is not None and lowered in vocabulary
        if not structured and not in_vocab and (lowered in _REPLY_NOISE or len(tok) < 2):
            continue
        if tok not in seen:
            seen.add(tok)
            entities.append(tok)
    if not entities:
        raise ReplyUnparseable(f"no entities in reply: {text!r}")
    return entities


def validate_entities(query: Query, bundle: CorpusBundle) -> Query:
    """Drop entities that exist nowhere in the corpus.

    Applies to expansion and reformulation queries; reduction queries pass
    through unchanged. Raises EmptyQueryAfterValidation when nothing
    survives (callers fall back to report-derived tokens).
    """
    if query.provenance == Provenance.REDUCTION:
        return query
    index = bundle.index
    kept = tuple(
        e for e in query.entities
        if e in index.class_lookup
        or e in bundle.method_name_set
        or e.lower() in index.vocabulary
    )
    if not kept:
        raise EmptyQueryAfterValidation(
            f"all entities pruned from {list(query.entities)}")
    return replace(query, entities=kept)


def _identifier_entities(tokens) -> tuple:
    out, seen = [], set()
    for tok in tokens:
        if _IDENT_RE.match(tok) and len(tok) > 1 and tok not in seen:
            seen.add(tok)
            out.append(tok)
    return tuple(out)


def _fallback_entities(report: BugReport, category: Category) -> tuple:
    if category in (Category.PE, Category.ST):
        detected = _identifier_entities(sorted(detect_program_entities(report.text)))
        if detected:
            return detected
    return _identifier_entities(token_stream(report.title))


def construct_query(report: BugReport, provider: LlmProvider,
                    bundle: CorpusBundle,
                    shot_mode: ShotMode = ShotMode.ONE_SHOT) -> Query:
    """Classify, prompt, parse, validate; degrade to report-derived tokens
    when the provider or its reply is unusable."""
    session = QuerySession(report, provider, bundle, shot_mode=shot_mode)
    return session.initial_query()


class QuerySession:
    """One report's conversation: initial query plus bounded reformulation.

    The transcript grows monotonically (prompt, replies, feedback turns);
    every class named in any feedback is excluded from all later queries.
    """

    def __init__(self, report: BugReport, provider: LlmProvider,
                 bundle: CorpusBundle, shot_mode: ShotMode = ShotMode.ONE_SHOT,
                 max_cycles: int = DEFAULT_MAX_CYCLES):
        if not 0 <= max_cycles <= MAX_CYCLES_CAP:
            raise FaultlineError(
                f"max_cycles must be between 0 and {MAX_CYCLES_CAP}")
        self.report = report
        self.provider = provider
        self.bundle = bundle
        self.shot_mode = shot_mode
        self.max_cycles = max_cycles
        self.category = classify(report)
        self.provenance = (Provenance.EXPANSION if self.category == Category.NL
                           else Provenance.REDUCTION)
        self.conversation = build_prompt(report, self.category, shot_mode)
        self.excluded: set[str] = set()
        self.query: Query | None = None

    def _complete(self, context: ProviderContext) -> list[str] | None:
        """Call the provider with retries; None when every attempt failed."""
        for _ in range(1 + _RETRIES):
            try:
                reply = self.provider.complete(self.conversation, context)
            except ProviderError:
                continue
            try:
                entities = parse_llm_reply(reply, self.bundle.index.vocabulary)
            except ReplyUnparseable:
                continue
            self.conversation.append({"role": "assistant", "content": reply})
            return entities
        return None

    def initial_query(self) -> Query:
        context = ProviderContext(self.report.report_id, cycle=0)
        entities = self._complete(context)
        if entities is None:
            query = Query(_fallback_entities(self.report, self.category),
                          self.category, 0, self.provenance, fallback=True)
        else:
            query = Query(tuple(entities), self.category, 0, self.provenance)
            try:
                query = validate_entities(query, self.bundle)
            except EmptyQueryAfterValidation:
                query = Query(_identifier_entities(token_stream(self.report.title)),
                              self.category, 0, self.provenance, fallback=True)
        self.query = query
        return query

    def reformulate(self, feedback_list) -> Query:
        """Append feedback turns, ask again, exclude the named classes."""
        if self.query is None:
            raise FaultlineError("session has no initial query yet")
        if self.query.cycle >= self.max_cycles:
            raise SessionExhausted(
                f"cycle budget of {self.max_cycles} is spent")
        if not feedback_list:
            raise FaultlineError("reformulation requires at least one feedback")
        for fb in feedback_list:
            if fb.kind not in Feedback.KINDS:
                raise FaultlineError(f"unknown feedback kind: {fb.kind!r}")
            if not _IDENT_RE.match(fb.class_name or ""):
                raise FaultlineError(f"bad feedback class: {fb.class_name!r}")

        for fb in feedback_list:
            self.conversation.append({"role": "user", "content": fb.message()})
            self.excluded.add(fb.class_name)

        cycle = self.query.cycle + 1
        context = ProviderContext(self.report.report_id, cycle=cycle,
                                  feedback_classes=tuple(sorted(self.excluded)))
        entities = self._complete(context)
        fallback = entities is None
        if fallback:
            entities = list(self.query.entities)
        query = Query(tuple(e for e in entities if e not in self.excluded),
                      self.category, cycle, Provenance.REFORMULATION, fallback)
        if not fallback:
            try:
                query = validate_entities(query, self.bundle)
            except EmptyQueryAfterValidation:
                query = replace(
                    query,
                    entities=tuple(e for e in self.query.entities
                                   if e not in self.excluded),
                    fallback=True)
        self.query = query
        return query
