"""Source/report text tokenization.

One tokenizer is used everywhere a tf-idf vector is built (file contents,
API text, bug report text) so that query-side and corpus-side vectors live
in the same space.

Rules: split on non-alphanumerics (keeping `_` inside tokens), then split
camelCase / snake_case compounds while keeping the original compound,
lowercase, drop English stopwords and Java keywords, drop single-character
tokens. No stemming.
"""

import re
from collections import Counter

# Classic English stopword list (function words only; deliberately excludes
# contentful verbs so identifier-like words such as "finish" survive).
STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because
been before being below between both but by could did do does doing down
during each few for from further had has have having he her here hers
herself him himself his how i if in into is it its itself just me more
most my myself no nor not now of off on once only or other our ours
ourselves out over own same she should so some such than that the their
theirs them themselves then there these they this those through to too
under until up very was we were what when where which while who whom why
will with would you your yours yourself yourselves
""".split())

JAVA_KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue
default do double else enum extends final finally float for goto if
implements import instanceof int interface long native new package private
protected public return short static strictfp super switch synchronized
this throw throws transient try void volatile while true false null var
""".split())

_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
# Split before an uppercase letter that follows a lowercase letter or digit.
# "BZip2CompressorOutputStream" -> BZip2 | Compressor | Output | Stream
_CAMEL_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")


def split_compound(token: str) -> list[str]:
    """Split a camelCase/snake_case identifier into its parts.

    Returns the parts only; callers decide whether to keep the compound.
    A token with no internal boundary comes back as a single-element list.
    """
    parts = []
    for piece in token.split("_"):
        if piece:
            parts.extend(_CAMEL_RE.split(piece))
    return parts


def _keep(token: str) -> bool:
    return len(token) > 1 and token not in STOPWORDS and token not in JAVA_KEYWORDS


def tokenize(text: str) -> Counter:
    """Tokenize text into a multiset (token -> count) of normalized tokens."""
    counts: Counter = Counter()
    for raw in _WORD_RE.findall(text):
        parts = split_compound(raw)
        lowered = raw.lower()
        if _keep(lowered):
            counts[lowered] += 1
        if len(parts) > 1:
            for part in parts:
                part = part.lower()
                if _keep(part):
                    counts[part] += 1
    return counts


def token_stream(text: str) -> list[str]:
    """Like tokenize() but preserves first-occurrence order with repeats."""
    out = []
    for raw in _WORD_RE.findall(text):
        parts = split_compound(raw)
        lowered = raw.lower()
        if _keep(lowered):
            out.append(lowered)
        if len(parts) > 1:
            out.extend(p.lower() for p in parts if _keep(p.lower()))
    return out
