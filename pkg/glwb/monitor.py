"""
Campaign Monitor
Metrics collection, resource snapshots and report export for campaigns
"""

import json
import logging
import os
import statistics
import time
from collections import Counter, deque
from datetime import datetime
from pathlib import Path
from typing import Any, Deque, Dict, Optional, Union

import aiofiles
import psutil


class MetricCollector:
    """Named counters, gauges and bounded sample windows"""

    def __init__(self, window_size: int = 10000):
        self.window_size = window_size
        self.counters: Counter = Counter()
        self.gauges: Dict[str, float] = {}
        self.histograms: Dict[str, Deque[float]] = {}

    def increment(self, metric: str, value: float = 1):
        self.counters[metric] += value

    def set_gauge(self, metric: str, value: float):
        self.gauges[metric] = value

    def record_histogram(self, metric: str, value: float):
        """Keep the latest `window_size` samples of a metric"""
        window = self.histograms.setdefault(metric, deque(maxlen=self.window_size))
        window.append(value)

    def get_histogram_stats(self, metric: str) -> Dict[str, float]:
        samples = list(self.histograms.get(metric, ()))
        if not samples:
            return {}
        p95 = statistics.quantiles(samples, n=20)[18] if len(samples) > 1 else samples[0]
        return {
            "count": len(samples),
            "min": min(samples),
            "max": max(samples),
            "avg": statistics.mean(samples),
            "median": statistics.median(samples),
            "p95": p95,
        }

    def snapshot(self) -> Dict[str, Any]:
        return {
            "counters": dict(sorted(self.counters.items())),
            "gauges": dict(sorted(self.gauges.items())),
            "histograms": {m: self.get_histogram_stats(m) for m in sorted(self.histograms)},
        }


class CampaignMonitor:
    """
    Campaign monitor with:
    - per-task timing and outcome metrics
    - a psutil snapshot of the running process
    - JSON report export through aiofiles
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.metric_collector = MetricCollector()
        self.start_time: Optional[float] = None
        self._process = psutil.Process(os.getpid())

    def start(self, prop: Optional[str] = None, workers: int = 0, in_flight: int = 0):
        self.start_time = time.perf_counter()
        self._process.cpu_percent(None)
        if prop:
            self.metric_collector.set_gauge(f"{prop}.workers", workers)
            self.metric_collector.set_gauge(f"{prop}.max_in_flight", in_flight)

    def record_task(self, prop: str, passed: bool, duration: float):
        self.metric_collector.increment(f"{prop}.tasks")
        self.metric_collector.increment(f"{prop}.{'passed' if passed else 'failed'}")
        self.metric_collector.record_histogram(f"{prop}.duration", duration)

    def record_error(self, prop: str, error: str):
        self.metric_collector.increment(f"{prop}.errors.{error}")

    def elapsed(self) -> float:
        return 0.0 if self.start_time is None else time.perf_counter() - self.start_time

    def resource_snapshot(self) -> Dict[str, Any]:
        """Resident memory and CPU use of this process"""
        try:
            with self._process.oneshot():
                snapshot = {
                    "timestamp": datetime.utcnow().isoformat(),
                    "rss_bytes": self._process.memory_info().rss,
                    "cpu_percent": self._process.cpu_percent(None),
                    "threads": self._process.num_threads(),
                }
        except psutil.Error as e:
            self.logger.warning(f"Resource snapshot failed: {e}")
            return {}
        return snapshot

    def get_metrics(self) -> Dict[str, Any]:
        metrics = self.metric_collector.snapshot()
        metrics["elapsed"] = self.elapsed()
        return metrics

    async def export_report(self, report: Dict[str, Any], path: Union[str, Path]):
        """Write a report as indented JSON"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        async with aiofiles.open(path, "w", encoding="utf-8") as f:
            await f.write(json.dumps(report, indent=2, sort_keys=True, default=str))
        self.logger.info(f"Report written to {path}")
