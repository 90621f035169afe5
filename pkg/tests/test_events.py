import json

import pytest

from gsplab.events import (CorruptLogError, Event, EventLog, parse_log_text,
                           read_log)


class TestEventLine:
    def test_round_trip(self):
        ev = Event(1, 12.5, "ResponseRecorded",
                   {"trial_id": "t9", "chosen_index": 4})
        assert Event.from_line(ev.to_line(), expect_seq=1) == ev

    def test_crc_detects_tampering(self):
        line = Event(1, 0.0, "ChainCompleted", {"chain_id": 3}).to_line()
        tampered = line.replace('"chain_id":3', '"chain_id":4')
        with pytest.raises(CorruptLogError, match="CRC"):
            Event.from_line(tampered, expect_seq=1)

    def test_gap_detected(self):
        line = Event(5, 0.0, "ChainCompleted", {"chain_id": 0}).to_line()
        with pytest.raises(CorruptLogError, match="gap"):
            Event.from_line(line, expect_seq=4)

    def test_unknown_type_rejected(self):
        body = {"seq": 1, "t": 0.0, "type": "Nonsense", "payload": {}}
        import zlib
        enc = json.dumps(body, sort_keys=True, separators=(",", ":"))
        line = json.dumps({**body, "crc": zlib.crc32(enc.encode())},
                          sort_keys=True, separators=(",", ":"))
        with pytest.raises(CorruptLogError, match="unknown type"):
            Event.from_line(line, expect_seq=1)

    def test_unparsable_line(self):
        with pytest.raises(CorruptLogError, match="unparsable"):
            Event.from_line("{not json", expect_seq=1)

    def test_error_names_first_bad_seq(self):
        with pytest.raises(CorruptLogError) as exc:
            Event.from_line("oops", expect_seq=17)
        assert exc.value.seq == 17


class TestEventLog:
    def test_append_assigns_gapless_seq(self):
        log = EventLog()
        for i in range(3):
            ev = log.append(float(i), "ChainCompleted", {"chain_id": i})
            assert ev.seq == i + 1
        assert log.next_seq == 4

    def test_file_persistence_and_reload(self, tmp_path):
        path = tmp_path / "events.jsonl"
        log = EventLog(path)
        log.append(0.0, "ChainCompleted", {"chain_id": 1})
        log.append(1.0, "ChainCompleted", {"chain_id": 2})
        log.close()
        events = read_log(path)
        assert [e.seq for e in events] == [1, 2]
        # reopening resumes the sequence
        log2 = EventLog(path)
        assert log2.next_seq == 3
        log2.close()

    def test_read_log_rejects_corruption(self, tmp_path):
        path = tmp_path / "events.jsonl"
        log = EventLog(path)
        log.append(0.0, "ChainCompleted", {"chain_id": 1})
        log.close()
        raw = path.read_text().replace('"chain_id":1', '"chain_id":9')
        path.write_text(raw)
        with pytest.raises(CorruptLogError):
            read_log(path)

    def test_dump_parses_back(self):
        log = EventLog()
        log.append(0.0, "ChainCompleted", {"chain_id": 1})
        log.append(1.0, "ChainCompleted", {"chain_id": 2})
        assert parse_log_text(log.dump()) == log.events
