from contextlib import contextmanager
import functools
import logging
import threading
import time


@contextmanager
def all_logging_disabled(highest_level=logging.CRITICAL):
    """
    A context manager that will prevent any logging messages
    triggered during the body from being processed.
    :param highest_level: the maximum logging level in use.
      This would only need to be changed if a custom level greater than CRITICAL
      is defined.
    """
    previous_level = logging.root.manager.disable

    logging.disable(highest_level)

    try:
        yield
    finally:
        logging.disable(previous_level)


class SimpleProfiler:
    """
    Wall-clock time and call counts per label. Safe to share between threads.
    """

    def __init__(self):
        self.data = {}  # label -> {'time': float, 'count': int}
        self._lock = threading.Lock()

    def _record(self, label, elapsed):
        with self._lock:
            d = self.data.setdefault(label, {"time": 0.0, "count": 0})
            d["time"] += elapsed
            d["count"] += 1

    def profile(self, label):
        def decorator(fn):
            @functools.wraps(fn)
            def wrapper(*args, **kwargs):
                t0 = time.perf_counter()
                try:
                    return fn(*args, **kwargs)
                finally:
                    self._record(label, time.perf_counter() - t0)

            return wrapper

        return decorator

    def count(self, label) -> int:
        with self._lock:
            return self.data.get(label, {"count": 0})["count"]

    def reset(self):
        with self._lock:
            self.data.clear()

    def report(self, top=10):
        with self._lock:
            items = sorted(self.data.items(), key=lambda kv: kv[1]["time"], reverse=True)[:top]
        out = ["Profiler report (label, total_time_s, calls, avg_s):"]
        for label, v in items:
            avg = v["time"] / v["count"] if v["count"] else 0.0
            out.append(f"{label:30} {v['time']:.6f}s  {v['count']:6d}  avg={avg:.6f}s")
        return "\n".join(out)


PROFILER = SimpleProfiler()
