import json

import pytest

from glwb.monitor import CampaignMonitor, MetricCollector


class TestMetricCollector:
    def test_counters_and_gauges(self):
        collector = MetricCollector()
        collector.increment("tasks")
        collector.increment("tasks", 2)
        collector.set_gauge("in_flight", 3)
        snapshot = collector.snapshot()
        assert snapshot["counters"] == {"tasks": 3}
        assert snapshot["gauges"] == {"in_flight": 3}

    def test_histogram_window(self):
        collector = MetricCollector(window_size=3)
        for value in (5, 1, 2, 3):
            collector.record_histogram("duration", value)
        stats = collector.get_histogram_stats("duration")
        assert stats["count"] == 3
        assert (stats["min"], stats["max"]) == (1, 3)
        assert stats["median"] == 2

    def test_single_value_percentile(self):
        collector = MetricCollector()
        collector.record_histogram("duration", 0.5)
        assert collector.get_histogram_stats("duration")["p95"] == 0.5

    def test_unknown_histogram(self):
        assert MetricCollector().get_histogram_stats("nothing") == {}


class TestCampaignMonitor:
    def test_task_metrics(self):
        monitor = CampaignMonitor()
        monitor.start()
        monitor.record_task("duality", True, 0.01)
        monitor.record_task("duality", False, 0.02)
        monitor.record_error("duality", "CapExceeded")
        metrics = monitor.get_metrics()
        assert metrics["counters"]["duality.tasks"] == 2
        assert metrics["counters"]["duality.failed"] == 1
        assert metrics["counters"]["duality.errors.CapExceeded"] == 1
        assert metrics["histograms"]["duality.duration"]["count"] == 2
        assert metrics["elapsed"] >= 0

    def test_elapsed_before_start(self):
        assert CampaignMonitor().elapsed() == 0.0

    def test_resource_snapshot(self):
        snapshot = CampaignMonitor().resource_snapshot()
        assert snapshot["rss_bytes"] > 0
        assert snapshot["threads"] >= 1

    @pytest.mark.asyncio
    async def test_export_report(self, tmp_path):
        path = tmp_path / "reports" / "duality.json"
        await CampaignMonitor().export_report({"prop": "duality", "passed": 3}, path)
        assert json.loads(path.read_text(encoding="utf-8")) == {"passed": 3, "prop": "duality"}
