import io
import random
import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resselect import QueueWaitRecord, QueueWaitStore, SimilarityBuckets
from resselect.queuewait import (
    DEFAULT_BUCKETS,
    DEFAULT_WINDOW_S,
    NoQueueHistoryError,
    _parse_iso8601,
)

from oracles import queue_filter_oracle

NOW = 1_700_000_000.0
DAY = 86400.0


def rec(wait, machine="m", queue="q", age_s=DAY, walltime=7200.0, cores=1):
    return QueueWaitRecord(machine, queue, NOW - age_s, wait, walltime, cores)


def store_of(*records):
    return QueueWaitStore(records)


class TestRecordsAndBuckets:
    def test_negative_wait_rejected(self):
        with pytest.raises(ValueError):
            rec(-1.0)

    def test_bucket_edges_must_ascend(self):
        with pytest.raises(ValueError):
            SimilarityBuckets((10.0, 10.0), (1,))

    def test_half_open_buckets(self):
        b = DEFAULT_BUCKETS
        # edge value starts the next bucket: [lo, hi)
        assert b.walltime_bucket(3599.9) != b.walltime_bucket(3600.0)
        assert b.walltime_bucket(3600.0) == b.walltime_bucket(14399.9)
        assert b.cores_bucket(1) == b.cores_bucket(1)
        assert b.cores_bucket(1) != b.cores_bucket(2)
        assert b.cores_bucket(4096) != b.cores_bucket(4095)

    def test_iso8601_parsing(self):
        assert _parse_iso8601("1970-01-01T00:00:00+00:00") == 0.0
        assert _parse_iso8601("1970-01-01T00:00:00Z") == 0.0
        assert _parse_iso8601("1970-01-02T00:00:00") == DAY  # naive = UTC


class TestEstimate:
    def test_hand_statistics(self):
        store = store_of(rec(100), rec(200), rec(300))
        est = store.estimate_tq("m", "q", 7200.0, 1, now=NOW)
        assert est.mean_wait_s == 200.0
        assert est.sample_stddev_s == pytest.approx(100.0)
        assert est.n_samples == 3
        assert not est.fallback_used

    def test_single_sample_has_no_stddev(self):
        store = store_of(rec(100))
        est = store.estimate_tq("m", "q", 7200.0, 1, now=NOW)
        assert est.sample_stddev_s is None

    def test_fallback_drops_size_constraints_only(self):
        store = store_of(rec(500, cores=512), rec(700, cores=512))
        est = store.estimate_tq("m", "q", 7200.0, 1, now=NOW)
        assert est.fallback_used
        assert est.mean_wait_s == 600.0

    def test_window_excludes_old_records(self):
        store = store_of(rec(100, age_s=8 * DAY), rec(900, age_s=DAY))
        est = store.estimate_tq("m", "q", 7200.0, 1, now=NOW)
        assert est.mean_wait_s == 900.0
        assert est.n_samples == 1

    def test_record_at_exact_window_boundary_included(self):
        store = store_of(rec(123, age_s=DEFAULT_WINDOW_S))
        est = store.estimate_tq("m", "q", 7200.0, 1, now=NOW)
        assert est.n_samples == 1

    def test_future_records_excluded_at_query(self):
        store = store_of(rec(100, age_s=-3600), rec(200, age_s=DAY))
        est = store.estimate_tq("m", "q", 7200.0, 1, now=NOW)
        assert est.mean_wait_s == 200.0

    def test_no_history_is_typed_error(self):
        store = store_of(rec(100, machine="other"))
        with pytest.raises(NoQueueHistoryError, match="no queue history"):
            store.estimate_tq("m", "q", 7200.0, 1, now=NOW)

    def test_fallback_never_crosses_machine_or_queue(self):
        store = store_of(rec(100, queue="other", cores=1))
        with pytest.raises(NoQueueHistoryError):
            store.estimate_tq("m", "q", 7200.0, 1, now=NOW)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**9))
    def test_matches_brute_force_oracle(self, seed):
        rng = random.Random(seed)
        records = [
            QueueWaitRecord(
                machine=rng.choice(["m1", "m2"]),
                queue=rng.choice(["q1", "q2"]),
                submit_time=NOW - rng.uniform(0, 10 * DAY),
                wait_s=rng.uniform(0, 5000),
                walltime_req_s=rng.choice([600, 7200, 20000, 100000]),
                cores_req=rng.choice([1, 2, 16, 100, 2000]),
            )
            for _ in range(rng.randint(1, 200))
        ]
        store = QueueWaitStore(records)
        machine, queue = rng.choice(["m1", "m2"]), rng.choice(["q1", "q2"])
        walltime = rng.choice([600, 7200, 20000, 100000])
        cores = rng.choice([1, 2, 16, 100, 2000])
        in_window, same_bucket = queue_filter_oracle(
            records, machine, queue, walltime, cores, NOW, DEFAULT_WINDOW_S,
            DEFAULT_BUCKETS,
        )
        if not in_window:
            with pytest.raises(NoQueueHistoryError):
                store.estimate_tq(machine, queue, walltime, cores, now=NOW)
            return
        est = store.estimate_tq(machine, queue, walltime, cores, now=NOW)
        expected = same_bucket or in_window
        assert est.fallback_used == (not same_bucket)
        assert est.n_samples == len(expected)
        assert est.mean_wait_s == statistics.mean(r.wait_s for r in expected)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**9))
    def test_window_monotonicity_and_ingest_order_determinism(self, seed):
        rng = random.Random(seed)
        records = [rec(rng.uniform(0, 1000), age_s=rng.uniform(0, 10 * DAY))
                   for _ in range(30)]
        store = QueueWaitStore(records)
        small = store.estimate_tq("m", "q", 7200.0, 1, now=NOW, window_s=3 * DAY)
        large = store.estimate_tq("m", "q", 7200.0, 1, now=NOW, window_s=9 * DAY)
        assert large.n_samples >= small.n_samples

        shuffled = records[:]
        rng.shuffle(shuffled)
        est1 = store.estimate_tq("m", "q", 7200.0, 1, now=NOW)
        est2 = QueueWaitStore(shuffled).estimate_tq("m", "q", 7200.0, 1, now=NOW)
        assert est1 == est2


class TestIngestCsv:
    HEADER = "machine,queue,submit_time_iso8601,wait_s,walltime_req_s,cores_req\n"

    def test_valid_rows_counted(self):
        csv_text = self.HEADER + (
            "m,q,2023-11-10T00:00:00Z,100,7200,1\n"
            "m,q,2023-11-11T00:00:00Z,200,7200,1\n"
            "m,q,2023-11-12T00:00:00Z,300,7200,1\n"
        )
        store = QueueWaitStore()
        count, warnings = store.ingest_csv(io.StringIO(csv_text))
        assert count == 3 and not warnings

    def test_bad_row_is_warning_not_fatal(self):
        csv_text = self.HEADER + (
            "m,q,2023-11-10T00:00:00Z,100,7200,1\n"
            "m,q,2023-11-11T00:00:00Z,-5,7200,1\n"
            "m,q,2023-11-12T00:00:00Z,300,7200,1\n"
            "m,q,2023-11-13T00:00:00Z,400,7200,1\n"
        )
        store = QueueWaitStore()
        count, warnings = store.ingest_csv(io.StringIO(csv_text))
        assert count == 3
        assert len(warnings) == 1 and "line 3" in warnings[0]

    def test_empty_file_with_header(self):
        store = QueueWaitStore()
        count, warnings = store.ingest_csv(io.StringIO(self.HEADER))
        assert count == 0 and not warnings

    def test_missing_columns_fatal(self):
        with pytest.raises(ValueError, match="missing columns"):
            QueueWaitStore().ingest_csv(io.StringIO("machine,queue\nm,q\n"))
