import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaitdrift.events import (
    EventLog,
    EventLogError,
    SensorEvent,
    day_index,
    load_event_log,
    parse_event_record,
    write_event_log,
)


class TestParseEventRecord:
    def test_basic_record(self):
        e = parse_event_record("12.5,pir_kitchen,ON")
        assert e == SensorEvent("pir_kitchen", 12.5, "ON")

    def test_zero_timestamp(self):
        e = parse_event_record("0,door_front,OFF")
        assert e.timestamp == 0.0
        assert e.status == "OFF"

    def test_status_case_insensitive(self):
        assert parse_event_record("1,s,on").status == "ON"
        assert parse_event_record("1,s,Off").status == "OFF"

    def test_unknown_status(self):
        with pytest.raises(EventLogError) as exc:
            parse_event_record("5,pir_hall,maybe", line_number=3)
        assert exc.value.line_number == 3
        assert "maybe" in str(exc.value)

    def test_field_count(self):
        with pytest.raises(EventLogError):
            parse_event_record("5,pir_hall")
        with pytest.raises(EventLogError):
            parse_event_record("5,a,ON,extra")

    def test_bad_timestamp(self):
        with pytest.raises(EventLogError):
            parse_event_record("abc,s,ON")
        with pytest.raises(EventLogError):
            parse_event_record("-1,s,ON")
        with pytest.raises(EventLogError):
            parse_event_record("nan,s,ON")


class TestLoadEventLog:
    def test_empty_source(self):
        log = load_event_log(io.StringIO(""))
        assert len(log) == 0

    def test_sorts_by_timestamp(self):
        log = load_event_log(io.StringIO("10,a,ON\n5,b,OFF\n"))
        assert [e.timestamp for e in log.events] == [5.0, 10.0]

    def test_stable_among_equal_timestamps(self):
        log = load_event_log(io.StringIO("7,x,ON\n7,y,ON\n7,z,ON\n"))
        assert [e.sensor_id for e in log.events] == ["x", "y", "z"]

    def test_header_skipped_when_requested(self):
        src = "timestamp,sensor_id,status\n1,a,ON\n"
        assert len(load_event_log(io.StringIO(src), header=True)) == 1
        with pytest.raises(EventLogError) as exc:
            load_event_log(io.StringIO(src))
        assert exc.value.line_number == 1

    def test_error_carries_first_offending_line(self):
        src = "1,a,ON\n2,b,bogus\n3,c,also-bogus\n"
        with pytest.raises(EventLogError) as exc:
            load_event_log(io.StringIO(src))
        assert exc.value.line_number == 2

    def test_bytes_stream(self):
        log = load_event_log(io.BytesIO(b"1,a,ON\n"))
        assert len(log) == 1

    @given(st.lists(st.integers(0, 10**6), min_size=1, max_size=30, unique=True))
    def test_permutation_invariance(self, stamps):
        lines = [f"{t},s{t},ON" for t in stamps]
        fwd = load_event_log(io.StringIO("\n".join(lines)))
        rev = load_event_log(io.StringIO("\n".join(reversed(lines))))
        assert fwd.events == rev.events

    def test_round_trip(self):
        events = [SensorEvent("a", 0.0, "ON"), SensorEvent("b", 1.5, "OFF")]
        buf = io.StringIO()
        write_event_log(events, buf)
        log = load_event_log(io.StringIO(buf.getvalue()))
        assert log.events == events


class TestDayIndex:
    def test_boundaries(self):
        assert day_index(0) == 1
        assert day_index(86400) == 2
        assert day_index(172799.9) == 2

    def test_custom_day_length(self):
        log = EventLog(day_length=10.0)
        assert log.day_index(9.99) == 1
        assert log.day_index(10.0) == 2

    @given(st.floats(0, 10**7, allow_nan=False))
    def test_shift_by_one_day(self, t):
        assert day_index(t + 86400.0) == day_index(t) + 1

    @given(st.floats(0, 10**7), st.floats(0, 10**7))
    def test_non_decreasing(self, t1, t2):
        lo, hi = sorted([t1, t2])
        assert day_index(lo) <= day_index(hi)


class TestInvariants:
    def test_event_validation(self):
        with pytest.raises(ValueError):
            SensorEvent("", 1.0, "ON")
        with pytest.raises(ValueError):
            SensorEvent("s", math.inf, "ON")
        with pytest.raises(ValueError):
            SensorEvent("s", 1.0, "on")

    def test_log_last_day(self):
        assert EventLog().last_day() == 0
        log = EventLog(events=[SensorEvent("a", 90000.0, "ON")])
        assert log.last_day() == 2
