from abc import ABC, abstractmethod
import asyncio
import time
import logging

from core.errors import LabError


class Experiment(ABC):
    """
    Base class for sweep experiments; every experiment kind inherits from this

    An experiment expands a SweepConfig into independent points, measures
    each point into report rows, then fits and flags the collected rows.
    """
    kind = None

    def __init__(self, sweep_config):
        """
        Initialize the experiment

        Args:
            sweep_config (SweepConfig): Validated configuration
        """
        self.config = sweep_config
        self.logger = logging.getLogger(f"{self.kind}_experiment")
        self.start_time = None

    @abstractmethod
    def points(self):
        """
        List the independent sweep points in deterministic order
        """

    @abstractmethod
    def run_point(self, point):
        """
        Measure one point

        Returns:
            list: Row dicts for the report
        """

    @abstractmethod
    def evaluate(self, rows):
        """
        Fit exponents and compute pass/fail flags from the collected rows

        Returns:
            tuple: (fits dict, flags dict)
        """

    def failed_rows(self, point, error):
        """
        Rows recorded for a point whose measurement raised a LabError
        """
        return []

    def _measure(self, point):
        started = time.time()
        try:
            rows = self.run_point(point)
        except LabError as e:
            self.logger.warning(f"Point {point} failed: {e}")
            rows = self.failed_rows(point, e)
        self.logger.info(f"Point {point} done in {time.time() - started:.2f}s ({len(rows)} rows)")
        return rows

    async def run(self, jobs=1):
        """
        Measure all points on a bounded worker pool

        Results are gathered in submission order, so the row list does not
        depend on scheduling.

        Args:
            jobs (int): Maximum number of points measured concurrently

        Returns:
            list: All rows in point order
        """
        self.start_time = time.time()
        semaphore = asyncio.Semaphore(max(1, int(jobs)))
        points = self.points()
        self.logger.info(f"Running {len(points)} points with {jobs} worker(s)")

        async def measure(point):
            async with semaphore:
                return await asyncio.to_thread(self._measure, point)

        results = await asyncio.gather(*(measure(point) for point in points))
        rows = [row for point_rows in results for row in point_rows]
        self.logger.info(f"{self.kind} finished in {time.time() - self.start_time:.2f}s")
        return rows
