"""Bug reports: parsing, stack-trace/entity detection, PE/ST/NL category.

Categories are mutually exclusive with precedence ST > PE > NL: any report
with at least one stack-trace line is ST no matter what else it contains.
"""

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .errors import FaultlineError


class Category(str, Enum):
    PE = "PE"
    ST = "ST"
    NL = "NL"


@dataclass(frozen=True)
class StackFrame:
    qualified_class: str
    method: str
    file: str | None = None
    line: int | None = None


@dataclass
class BugReport:
    report_id: str
    project: str
    version: str
    title: str
    description: str
    created_at: datetime
    fixed_files: tuple = ()  # ground truth; may be empty in live sessions

    @property
    def text(self) -> str:
        return f"{self.title}\n{self.description}"


def parse_timestamp(value: str) -> datetime:
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (ValueError, AttributeError) as exc:
        raise FaultlineError(f"invalid timestamp: {value!r}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def month_index(ts: datetime) -> int:
    """Monotone month counter: year*12 + (month-1)."""
    return ts.year * 12 + (ts.month - 1)


# "at org.apache.camel.model.ResequencerType.createProcessor(ResequencerType.java:163)"
_AT_FRAME_RE = re.compile(
    r"\bat\s+((?:[A-Za-z_$][\w$]*\.)+[A-Za-z_$][\w$]*)\.([A-Za-z_$<][\w$>]*)"
    r"\s*\(([^():]*)(?::(\d+))?\)"
)
# "java.lang.NullPointerException" header lines (optionally "Caused by: ...")
_EXC_HEADER_RE = re.compile(
    r"^\s*(?:caused by:\s*)?((?:[A-Za-z_$][\w$]*\.)+[A-Za-z_$][\w$]*"
    r"(?:Exception|Error))\b",
    re.IGNORECASE,
)


def detect_stack_traces(text: str) -> list[StackFrame]:
    """Find stack frames ("at pkg.Class.method(File:line)") and exception
    header lines, in textual order.

    Header lines carry no method, so the frame's method field repeats the
    exception's simple name.
    """
    frames = []
    for line in text.splitlines():
        m = _AT_FRAME_RE.search(line)
        if m:
            fname = m.group(3).strip() or None
            if fname and "." not in fname:
                fname = None  # "Native Method", "Unknown Source"
            frames.append(StackFrame(
                qualified_class=m.group(1),
                method=m.group(2),
                file=fname,
                line=int(m.group(4)) if m.group(4) else None,
            ))
            continue
        h = _EXC_HEADER_RE.match(line)
        if h:
            qualified = h.group(1)
            frames.append(StackFrame(
                qualified_class=qualified,
                method=qualified.rsplit(".", 1)[-1],
            ))
    return frames


_CAMEL_ENTITY_RE = re.compile(r"\b[A-Za-z][A-Za-z0-9]*\b")
_CAMEL_SPLIT_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_CALL_RE = re.compile(r"\b([A-Za-z_][\w$]*)\s*\(\s*\)")
_JAVA_FILE_RE = re.compile(r"\b([A-Za-z_][\w$]*)\.java\b")
# Package-like: >= 2 dot-separated lowercase segments of >= 2 chars each
# (the length floor keeps "e.g." and "i.e." out).
_PACKAGE_RE = re.compile(r"\b[a-z][a-z0-9_]+(?:\.[a-z][a-z0-9_]+)+\b")


def detect_program_entities(text: str) -> set[str]:
    """Entity mentions: camelCase identifiers (>= 2 humps), call-style
    "name()" identifiers, *.java basenames, and dotted package paths."""
    entities = set()
    for tok in _CAMEL_ENTITY_RE.findall(text):
        if any(c.isupper() for c in tok) and len(_CAMEL_SPLIT_RE.split(tok)) >= 2:
            entities.add(tok)
    entities.update(_CALL_RE.findall(text))
    entities.update(_JAVA_FILE_RE.findall(text))
    entities.update(_PACKAGE_RE.findall(text))
    return entities


def classify(report: BugReport) -> Category:
    """ST if any stack frame is present, else PE on any entity, else NL."""
    text = report.text
    if detect_stack_traces(text):
        return Category.ST
    if detect_program_entities(text):
        return Category.PE
    return Category.NL


def report_from_dict(obj: dict) -> BugReport:
    fixed = tuple(obj.get("fixed_files") or ())
    return BugReport(
        report_id=str(obj["report_id"]),
        project=str(obj["project"]),
        version=str(obj["version"]),
        title=obj.get("title", ""),
        description=obj.get("description", ""),
        created_at=parse_timestamp(obj["created_at"]),
        fixed_files=fixed,
    )


def load_reports(path, require_ground_truth: bool = True) -> list[BugReport]:
    """Read a JSON Lines dataset, one BugReport per line."""
    reports = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FaultlineError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        report = report_from_dict(obj)
        if require_ground_truth and not report.fixed_files:
            raise FaultlineError(
                f"{path}:{lineno}: report {report.report_id} has no fixed_files")
        reports.append(report)
    return reports
