"""Independent brute-force oracles used to freeze and check expected values.

Everything here is written against the documented rules, not against the
package internals: the tokenizer is a character state machine instead of
regexes, tf-idf and cosine work on plain dicts, metrics rescan prefixes
quadratically. Only the stopword/keyword data tables are shared, since
those are part of the rules themselves.
"""

import math
from collections import Counter

from faultline.tokens import JAVA_KEYWORDS, STOPWORDS


def reference_tokenize(text: str) -> Counter:
    """Char-walk tokenizer: same rules as the package, different mechanics."""
    words = []
    current = []
    for ch in text:
        if (ch.isascii() and ch.isalnum()) or ch == "_":
            current.append(ch)
        elif current:
            words.append("".join(current))
            current = []
    if current:
        words.append("".join(current))

    def camel_underscore_parts(word):
        parts = []
        part = []
        prev = ""
        for ch in word:
            if ch == "_":
                if part:
                    parts.append("".join(part))
                part = []
                prev = ch
                continue
            if part and ch.isupper() and (prev.islower() or prev.isdigit()):
                parts.append("".join(part))
                part = []
            part.append(ch)
            prev = ch
        if part:
            parts.append("".join(part))
        return parts

    def keep(tok):
        return (len(tok) > 1 and tok not in STOPWORDS
                and tok not in JAVA_KEYWORDS)

    counts = Counter()
    for word in words:
        lowered = word.lower()
        if keep(lowered):
            counts[lowered] += 1
        parts = camel_underscore_parts(word)
        if len(parts) > 1:
            for part in parts:
                part = part.lower()
                if keep(part):
                    counts[part] += 1
    return counts


def reference_tfidf(token_counts_by_file: dict) -> dict:
    """{file: Counter} -> {file: {token: tf * ln(N/df)}}."""
    n = len(token_counts_by_file)
    df = Counter()
    for counts in token_counts_by_file.values():
        for token in counts:
            df[token] += 1
    out = {}
    for fid, counts in token_counts_by_file.items():
        out[fid] = {t: c * math.log(n / df[t]) for t, c in counts.items()}
    return out


def reference_cosine(vec_a: dict, vec_b: dict) -> float:
    dot = sum(v * vec_b.get(k, 0.0) for k, v in vec_a.items())
    na = math.sqrt(sum(v * v for v in vec_a.values()))
    nb = math.sqrt(sum(v * v for v in vec_b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def reference_top_k(ranked_lists, relevant_sets, k: int) -> float:
    hits = 0
    for ranked, relevant in zip(ranked_lists, relevant_sets):
        found = False
        for i in range(min(k, len(ranked))):
            if ranked[i] in relevant:
                found = True
        if found:
            hits += 1
    return hits / len(ranked_lists)


def reference_mrr(ranked_lists, relevant_sets) -> float:
    total = 0.0
    for ranked, relevant in zip(ranked_lists, relevant_sets):
        for i, fid in enumerate(ranked):
            if fid in relevant:
                total += 1.0 / (i + 1)
                break
    return total / len(ranked_lists)


def reference_map(ranked_lists, relevant_sets) -> float:
    """Quadratic AvgP: Prec@k recomputed from scratch at every hit."""
    total = 0.0
    for ranked, relevant in zip(ranked_lists, relevant_sets):
        if not relevant:
            continue
        prec_sum = 0.0
        for k in range(1, len(ranked) + 1):
            if ranked[k - 1] in relevant:
                in_prefix = sum(1 for f in ranked[:k] if f in relevant)
                prec_sum += in_prefix / k
        total += prec_sum / len(relevant)
    return total / len(ranked_lists)


def reference_pair_order_agreement(w, pairs) -> float:
    """Fraction of (better, worse) vector pairs the weights order correctly."""
    correct = 0
    for better, worse in pairs:
        score_b = sum(wi * xi for wi, xi in zip(w, better))
        score_w = sum(wi * xi for wi, xi in zip(w, worse))
        if score_b > score_w:
            correct += 1
    return correct / len(pairs)
