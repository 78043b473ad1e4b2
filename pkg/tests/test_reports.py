from datetime import datetime, timezone

import pytest
from hypothesis import given, strategies as st

from faultline.errors import FaultlineError
from faultline.reports import (Category, classify, detect_program_entities,
                               detect_stack_traces, month_index,
                               parse_timestamp)

from sample_reports import CAMEL_620, CAMEL_2320, COMPRESS_357, make_report, synthetic_cases


def test_paper_frame_parsed_exactly():
    frames = detect_stack_traces(
        "at org.apache.camel.model.ResequencerType.createProcessor(ResequencerType.java:163)")
    assert len(frames) == 1
    frame = frames[0]
    assert frame.qualified_class == "org.apache.camel.model.ResequencerType"
    assert frame.method == "createProcessor"
    assert frame.file == "ResequencerType.java"
    assert frame.line == 163


def test_camel_620_has_at_least_three_frames():
    frames = detect_stack_traces(CAMEL_620.text)
    assert len(frames) >= 3
    assert frames[-1].line == 93


def test_plain_prose_has_no_frames():
    assert detect_stack_traces("The report page stays blank after noon.") == []


def test_compress_357_entities_include_class():
    entities = detect_program_entities(COMPRESS_357.text)
    assert "BZip2CompressorOutputStream" in entities


def test_prose_has_no_entities():
    assert detect_program_entities("the server crashes on startup") == set()


def test_table1_categories():
    assert classify(COMPRESS_357) == Category.PE
    assert classify(CAMEL_620) == Category.ST
    assert classify(CAMEL_2320) == Category.NL


def test_synthetic_cases_classify_correctly():
    for report, expected in synthetic_cases():
        assert classify(report) == expected, report.report_id


def test_stack_trace_takes_precedence_over_entities():
    report = make_report(
        "MIX-1", "FrameGrabber drops frames",
        "FrameGrabber.grab() loses frames.\n"
        "at com.acme.video.FrameGrabber.grab(FrameGrabber.java:203)")
    assert detect_program_entities(report.text)
    assert classify(report) == Category.ST


def test_month_index_values():
    jan_2020 = datetime(2020, 1, 15, tzinfo=timezone.utc)
    mar_2020 = datetime(2020, 3, 1, tzinfo=timezone.utc)
    assert month_index(jan_2020) == 24240
    assert month_index(mar_2020) - month_index(jan_2020) == 2
    assert month_index(datetime(2020, 1, 31, tzinfo=timezone.utc)) - \
        month_index(jan_2020) == 0


def test_invalid_timestamp_errors():
    with pytest.raises(FaultlineError):
        parse_timestamp("not-a-date")


@given(st.text(max_size=400))
def test_classify_is_total_and_pure(text):
    report = make_report("HYP-1", text[:50], text)
    first = classify(report)
    assert first in (Category.PE, Category.ST, Category.NL)
    assert classify(report) == first


def test_detectors_are_pure():
    text = CAMEL_620.text
    assert detect_stack_traces(text) == detect_stack_traces(text)
    assert detect_program_entities(text) == detect_program_entities(text)
