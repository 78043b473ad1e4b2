"""Source-tree ingestion: entity extraction, tf-idf index, call graph.

A corpus is one (project, version) snapshot. Ingest scans the tree once,
extracts declared class/method names and API text per file, tokenizes
contents, and derives two shared immutable structures: a CorpusIndex
(vocabulary, idf, sparse tf-idf file vectors, class lookup) and a CallGraph
(file-level identifier-reference edges).
"""

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path, PurePosixPath

import numpy as np

from .errors import CorpusError
from .tokens import tokenize

FORMAT_VERSION = 1
DEFAULT_EXTENSIONS = (".java",)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CLASS_RE = re.compile(r"\b(?:class|interface|enum)\s+([A-Za-z_][A-Za-z0-9_]*)")
_DOC_COMMENT_RE = re.compile(r"/\*\*.*?\*/", re.DOTALL)
_MODIFIERS = ("public", "protected", "private", "static", "final", "abstract",
              "synchronized", "native", "default", "strictfp")
# "<type> <name>(" with optional leading modifiers; the required type token is
# what separates a declaration from a call site.
_METHOD_RE = re.compile(
    r"(?:^|[;{}\s])"
    r"((?:(?:%s)\s+)*)" % "|".join(_MODIFIERS) +
    r"([A-Za-z_$][\w$]*(?:\s*<[^<>;]*>)?(?:\s*\[\s*\])*)\s+"
    r"([A-Za-z_][A-Za-z0-9_]*)\s*\("
)
_NOT_TYPES = frozenset({"if", "while", "for", "switch", "catch", "return",
                        "new", "else", "do", "try", "throw", "case", "assert"})


@dataclass
class SourceFileRecord:
    """One source file with its extracted entities and token multiset."""

    file_id: str
    path: str
    project: str
    version: str
    raw_text: str
    class_names: frozenset
    method_names: frozenset
    api_text: str
    method_api: tuple  # ((method_name, doc + signature text), ...)
    tokens: Counter


@dataclass
class Extraction:
    class_names: frozenset
    method_names: frozenset
    api_text: str
    method_api: tuple


@dataclass
class IngestReport:
    scanned: int = 0
    skipped: list = field(default_factory=list)  # (path, reason)


def _blank_region(chars: list, start: int, end: int) -> None:
    for i in range(start, end):
        if chars[i] != "\n":
            chars[i] = " "


def _strip_comments_and_strings(raw_text: str) -> str:
    """Blank out comments and string/char literals, preserving line layout."""
    chars = list(raw_text)
    i, n = 0, len(raw_text)
    while i < n:
        c = raw_text[i]
        if c == "/" and i + 1 < n and raw_text[i + 1] == "/":
            j = raw_text.find("\n", i)
            j = n if j == -1 else j
            _blank_region(chars, i, j)
            i = j
        elif c == "/" and i + 1 < n and raw_text[i + 1] == "*":
            j = raw_text.find("*/", i + 2)
            j = n if j == -1 else j + 2
            _blank_region(chars, i, j)
            i = j
        elif c == '"' or c == "'":
            j = i + 1
            while j < n and raw_text[j] != c:
                j = j + 2 if raw_text[j] == "\\" else j + 1
            j = min(j + 1, n)
            _blank_region(chars, i, j)
            i = j
        else:
            i += 1
    return "".join(chars)


def _clean_doc(comment: str) -> str:
    body = comment
    if body.startswith("/**"):
        body = body[3:]
    if body.endswith("*/"):
        body = body[:-2]
    lines = [ln.strip().lstrip("*").strip() for ln in body.splitlines()]
    return " ".join(ln for ln in lines if ln)


def extract_entities(raw_text: str) -> Extraction:
    """Pull declared class/method names and API (doc + signature) text.

    Heuristic, line-based Java-style parsing: class/interface/enum names
    from declaration keywords, method names from "<type> <name>(" lines
    (so bare call sites don't count), API text from /** doc comments plus
    public method signature lines.
    """
    code = _strip_comments_and_strings(raw_text)
    class_names = frozenset(_CLASS_RE.findall(code))

    # Doc comment ending line -> cleaned body, for method-level attachment.
    doc_by_end_line = {}
    doc_bodies = []
    for m in _DOC_COMMENT_RE.finditer(raw_text):
        body = _clean_doc(m.group(0))
        if body:
            doc_bodies.append(body)
            doc_by_end_line[raw_text.count("\n", 0, m.end())] = body

    method_names = set()
    method_api = []
    public_sigs = []
    for lineno, line in enumerate(code.splitlines()):
        for m in _METHOD_RE.finditer(line):
            type_token = m.group(2).split("<")[0].strip()
            name = m.group(3)
            if type_token in _NOT_TYPES or name in _NOT_TYPES:
                continue
            method_names.add(name)
            sig = line.strip()
            if "{" in sig:
                sig = sig[:sig.index("{")].strip()
            doc = ""
            for back in (lineno - 1, lineno - 2):
                if back in doc_by_end_line:
                    doc = doc_by_end_line[back]
                    break
            method_api.append((name, (doc + " " + sig).strip()))
            if "public" in m.group(1):
                public_sigs.append(sig)

    api_text = " ".join(doc_bodies + public_sigs)
    return Extraction(class_names, frozenset(method_names), api_text,
                      tuple(method_api))


def scan_source_tree(root, project: str, version: str,
                     extensions=DEFAULT_EXTENSIONS):
    """Scan a directory tree into SourceFileRecords, lexicographic by path.

    Returns (records, IngestReport). Unreadable individual files are
    skipped and noted in the report; an unreadable root is fatal.
    """
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"source root not readable: {root}")
    report = IngestReport()
    paths = sorted(
        p for p in root.rglob("*")
        if p.is_file() and p.suffix in extensions
    )
    records = []
    for p in paths:
        rel = str(PurePosixPath(*p.relative_to(root).parts))
        report.scanned += 1
        try:
            raw_text = p.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            report.skipped.append((rel, str(exc)))
            continue
        ext = extract_entities(raw_text)
        records.append(SourceFileRecord(
            file_id=rel,
            path=rel,
            project=project,
            version=version,
            raw_text=raw_text,
            class_names=ext.class_names,
            method_names=ext.method_names,
            api_text=ext.api_text,
            method_api=ext.method_api,
            tokens=tokenize(raw_text),
        ))
    records.sort(key=lambda r: r.path)
    return records, report


class CallGraph:
    """Directed file-level reference graph; immutable after construction."""

    def __init__(self, nodes, edges):
        self.nodes = frozenset(nodes)
        self.edges = frozenset(edges)
        self._callers = {n: set() for n in self.nodes}
        self._callees = {n: set() for n in self.nodes}
        for a, b in self.edges:
            self._callees[a].add(b)
            self._callers[b].add(a)

    def callers(self, file_id):
        return frozenset(self._callers.get(file_id, ()))

    def callees(self, file_id):
        return frozenset(self._callees.get(file_id, ()))


def build_call_graph(records) -> CallGraph:
    """Edge (A, B) when A's text mentions, as a whole word, a class B declares."""
    declared = {}
    for rec in records:
        for cname in rec.class_names:
            declared.setdefault(cname, set()).add(rec.file_id)
    edges = set()
    for rec in records:
        words = set(_IDENT_RE.findall(rec.raw_text))
        for cname in words:
            for target in declared.get(cname, ()):
                if target != rec.file_id:
                    edges.add((rec.file_id, target))
    return CallGraph((r.file_id for r in records), edges)


class CorpusIndex:
    """tf-idf index over one corpus: vocabulary, idf, sparse file vectors.

    Vectors are raw tf * idf, unnormalized; cosine normalizes at query
    time. Row order follows the (path-sorted) record order.
    """

    def __init__(self, records):
        if not records:
            raise CorpusError("cannot index an empty corpus")
        vocab_tokens = sorted(set().union(*(r.tokens.keys() for r in records)))
        self.vocabulary = {tok: i for i, tok in enumerate(vocab_tokens)}
        n_files = len(records)
        df = np.zeros(len(vocab_tokens), dtype=np.int64)
        for rec in records:
            for tok in rec.tokens:
                df[self.vocabulary[tok]] += 1
        # df >= 1 by construction: every vocabulary token occurs in a file.
        self.idf = np.log(n_files / df.astype(np.float64))

        self.file_ids = [r.file_id for r in records]
        self._row_of = {fid: i for i, fid in enumerate(self.file_ids)}
        indptr = [0]
        indices = []
        data = []
        for rec in records:
            ids = sorted(self.vocabulary[t] for t in rec.tokens)
            indices.extend(ids)
            data.extend(rec.tokens[vocab_tokens[i]] * self.idf[i] for i in ids)
            indptr.append(len(indices))
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.float64)
        self.row_norms = np.array([
            math.sqrt(float(np.dot(self.data[s:e], self.data[s:e])))
            for s, e in zip(self.indptr[:-1], self.indptr[1:])
        ], dtype=np.float64)

        self.class_lookup = {}
        for rec in records:
            for cname in sorted(rec.class_names):
                self.class_lookup.setdefault(cname, set()).add(rec.file_id)

    @property
    def n_files(self):
        return len(self.file_ids)

    def row(self, file_id: str) -> int:
        return self._row_of[file_id]

    def file_vector(self, file_id: str) -> dict:
        """Sparse tf-idf vector of one file as {token_id: weight}."""
        r = self._row_of[file_id]
        s, e = self.indptr[r], self.indptr[r + 1]
        return {int(i): float(v) for i, v in zip(self.indices[s:e], self.data[s:e])}

    def vectorize(self, counts: Counter):
        """Project a token multiset into (ids, tf-idf weights) arrays.

        Tokens outside the corpus vocabulary are dropped: they have no idf.
        """
        ids = sorted(self.vocabulary[t] for t in counts if t in self.vocabulary)
        vocab_inv = self._inverse_vocabulary()
        weights = np.array([counts[vocab_inv[i]] * self.idf[i] for i in ids],
                           dtype=np.float64)
        return np.asarray(ids, dtype=np.int64), weights

    def _inverse_vocabulary(self):
        if not hasattr(self, "_inv_vocab"):
            self._inv_vocab = {i: t for t, i in self.vocabulary.items()}
        return self._inv_vocab


def build_index(records) -> CorpusIndex:
    return CorpusIndex(records)


@dataclass
class CorpusBundle:
    """Everything downstream stages need for one (project, version)."""

    project: str
    version: str
    records: dict  # file_id -> SourceFileRecord
    index: CorpusIndex
    graph: CallGraph

    @property
    def file_ids(self):
        return self.index.file_ids

    @cached_property
    def method_name_set(self) -> frozenset:
        return frozenset().union(*(r.method_names for r in self.records.values()))


def ingest(root, project: str, version: str, extensions=DEFAULT_EXTENSIONS):
    """Scan + index + call graph in one step; returns (bundle, report)."""
    records, report = scan_source_tree(root, project, version, extensions)
    if not records:
        raise CorpusError(f"no source files under {root}")
    bundle = CorpusBundle(
        project=project,
        version=version,
        records={r.file_id: r for r in records},
        index=build_index(records),
        graph=build_call_graph(records),
    )
    return bundle, report


def save_index(bundle: CorpusBundle, path) -> None:
    """Write the versioned corpus.idx.json document (stable ordering)."""
    files = []
    for fid in bundle.index.file_ids:
        rec = bundle.records[fid]
        files.append({
            "file_id": rec.file_id,
            "path": rec.path,
            "class_names": sorted(rec.class_names),
            "method_names": sorted(rec.method_names),
            "api_text": rec.api_text,
            "method_api": [[n, t] for n, t in rec.method_api],
            "token_counts": {t: rec.tokens[t] for t in sorted(rec.tokens)},
        })
    doc = {
        "format_version": FORMAT_VERSION,
        "project": bundle.project,
        "version": bundle.version,
        "files": files,
        "edges": sorted([a, b] for a, b in bundle.graph.edges),
        "vocabulary": dict(sorted(bundle.index.vocabulary.items())),
        "idf": {str(i): float(bundle.index.idf[i])
                for i in range(len(bundle.index.idf))},
    }
    Path(path).write_text(
        json.dumps(doc, ensure_ascii=False, indent=1), encoding="utf-8")


def load_index(path) -> CorpusBundle:
    """Rebuild a CorpusBundle from corpus.idx.json (raw_text not retained)."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"cannot load index {path}: {exc}") from exc
    if doc.get("format_version") != FORMAT_VERSION:
        raise CorpusError(f"unsupported index format in {path}")
    records = []
    for f in doc["files"]:
        records.append(SourceFileRecord(
            file_id=f["file_id"],
            path=f["path"],
            project=doc["project"],
            version=doc["version"],
            raw_text="",
            class_names=frozenset(f["class_names"]),
            method_names=frozenset(f["method_names"]),
            api_text=f["api_text"],
            method_api=tuple((n, t) for n, t in f["method_api"]),
            tokens=Counter(f["token_counts"]),
        ))
    records.sort(key=lambda r: r.path)
    index = build_index(records)
    graph = CallGraph((r.file_id for r in records),
                      ((a, b) for a, b in doc["edges"]))
    return CorpusBundle(
        project=doc["project"],
        version=doc["version"],
        records={r.file_id: r for r in records},
        index=index,
        graph=graph,
    )
