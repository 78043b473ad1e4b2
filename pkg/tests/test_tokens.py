from collections import Counter

from hypothesis import given, strategies as st

from faultline.tokens import split_compound, token_stream, tokenize

from reference_impl import reference_tokenize

COMPRESS_357 = (
    "BZip2CompressorOutputStream can affect output stream incorrectly. "
    "BZip2CompressorOutputStream has an unsynchronized finished() method, "
    "and an unsynchronized finalize method. Finish checks to see if the "
    "output stream is null, and if it is not, it calls various methods, "
    "some of which write to the output stream. Now, consider something "
    "like this sequence. BZip2OutputStream s = ... s.close(); s = null; "
    "After the s = null, the stream is garbage. At some point the garbage "
    "collector call finalize(), which calls finish()."
)


def test_compound_split_keeps_original():
    assert tokenize("BZip2CompressorOutputStream") == Counter({
        "bzip2compressoroutputstream": 1,
        "bzip2": 1,
        "compressor": 1,
        "output": 1,
        "stream": 1,
    })


def test_all_stopwords_vanish():
    assert tokenize("the a an") == Counter()


def test_snake_case_keeps_compound_and_parts():
    counts = tokenize("max_retry_count")
    assert counts["max_retry_count"] == 1
    assert counts["max"] == 1 and counts["retry"] == 1 and counts["count"] == 1


def test_java_keywords_and_short_tokens_dropped():
    assert tokenize("public class X interface enum y z9") == Counter({"z9": 1})


def test_split_compound_boundaries():
    assert split_compound("BZip2CompressorOutputStream") == [
        "BZip2", "Compressor", "Output", "Stream"]
    assert split_compound("snake_case_name") == ["snake", "case", "name"]
    assert split_compound("plain") == ["plain"]


def test_matches_reference_on_paper_motivation_text():
    assert tokenize(COMPRESS_357) == reference_tokenize(COMPRESS_357)


@given(st.text(max_size=300))
def test_matches_reference_tokenizer(text):
    assert tokenize(text) == reference_tokenize(text)


@given(st.text(max_size=200))
def test_concatenation_doubles_multiplicities(text):
    doubled = Counter()
    for tok, n in tokenize(text).items():
        doubled[tok] = 2 * n
    assert tokenize(text + " " + text) == doubled


def test_token_stream_preserves_order():
    assert token_stream("StreamCopier copies. StreamCopier") == [
        "streamcopier", "stream", "copier", "copies",
        "streamcopier", "stream", "copier"]
