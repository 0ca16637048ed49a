"""Tests for result records."""

import json

from chainlens.backend import Transcript, TranscriptEntry
from chainlens.harness import RecordLog, ResultRecord, transcript_digest


def entry(response="yes", latency=0.5, cached=False):
    return TranscriptEntry(
        query_digest="q1",
        template="presence.v1",
        prompt="Is it there?",
        response=response,
        model_id="m",
        input_tokens=10,
        output_tokens=1,
        latency_s=latency,
        cached=cached,
    )


def transcript(*entries):
    t = Transcript()
    for e in entries:
        t.append(e)
    return t


class TestResultRecord:
    """Tests for ResultRecord."""

    def test_json_sorted_and_compact(self):
        """Test the on-disk form."""
        text = ResultRecord("a", payload={"class": "sky"}, cost="0.5").to_json()
        assert text.startswith('{"cost":"0.5","error":null,"image_id":"a"')
        assert " " not in text

    def test_round_trip(self):
        """Test reading a record back."""
        record = ResultRecord("a", metrics={"top1": 1.0}, queries=3, unit="a")
        assert ResultRecord.from_dict(json.loads(record.to_json())) == record


class TestRecordLog:
    """Tests for RecordLog."""

    def test_append_and_load(self, tmp_path):
        """Test file order is kept."""
        log = RecordLog(tmp_path / "records.jsonl")
        log.append([ResultRecord("a"), ResultRecord("b")])
        log.append([ResultRecord("c")])
        assert [r.image_id for r in log.load()] == ["a", "b", "c"]

    def test_missing_file(self, tmp_path):
        """Test an empty run."""
        assert RecordLog(tmp_path / "none.jsonl").load() == []

    def test_retry_supersedes_failure(self, tmp_path):
        """Test that the last record of an image wins."""
        log = RecordLog(tmp_path / "records.jsonl")
        log.append([ResultRecord("a", status="error", error="boom"), ResultRecord("b")])
        assert log.completed() == {"b"}
        log.append([ResultRecord("a")])
        assert log.completed() == {"a", "b"}
        assert log.latest()["a"].ok

    def test_torn_tail(self, tmp_path):
        """Test that a half-written last line is ignored and then cut."""
        path = tmp_path / "records.jsonl"
        log = RecordLog(path)
        log.append([ResultRecord("a")])
        with open(path, "a", encoding="utf-8") as stream:
            stream.write('{"image_id": "b", "sta')
        assert [r.image_id for r in log.load()] == ["a"]
        log.repair()
        log.append([ResultRecord("b")])
        assert [r.image_id for r in log.load()] == ["a", "b"]
        assert path.read_text(encoding="utf-8").count("\n") == 2


class TestTranscriptDigest:
    """Tests for transcript_digest."""

    def test_ignores_timing_and_cache(self):
        """Test that a cached replay digests like the live run."""
        live = transcript(entry(latency=1.2, cached=False))
        replay = transcript(entry(latency=0.0, cached=True))
        assert transcript_digest(live) == transcript_digest(replay)

    def test_content_sensitive(self):
        """Test that a different answer changes the digest."""
        assert transcript_digest(transcript(entry("yes"))) != transcript_digest(
            transcript(entry("no"))
        )
