"""Scalar summaries of engine runs for TensorBoard."""

import time

from .event_file_writer import EventFileWriter
from .proto import Event
from .summary import scalar


class SummaryWriter(object):
    """Writes scalar summaries of transports and scans to an event file.

    The event file is written asynchronously; call :meth:`close` (or use the
    writer as a context manager) to make sure everything reaches the disk.

    Args:
        logdir (str): Directory of the event file; created when missing.
        max_queue (int): Pending events before ``add_*`` calls block.
        flush_secs (int): How often the background thread flushes.
    """

    def __init__(self, logdir, max_queue=10, flush_secs=120):
        self.event_writer = EventFileWriter(logdir, max_queue, flush_secs)

    def get_logdir(self):
        return self.event_writer.get_logdir()

    def add_summary(self, summary, global_step=None):
        event = Event(summary=summary, wall_time=time.time())
        if global_step is not None:
            event.step = int(global_step)
        self.event_writer.add_event(event)

    def add_scalar(self, name, scalar_value, global_step=None):
        self.add_summary(scalar(name, scalar_value), global_step)

    def add_trace(self, tag, result):
        """One step per trace row: ``F`` and each fiber component, then the drift."""
        for step, (_, _, v, F) in enumerate(result.trace):
            self.add_scalar('%s/F' % tag, F, step)
            for a, component in enumerate(v, 1):
                self.add_scalar('%s/v%d' % (tag, a), component, step)
        self.add_scalar('%s/F_drift' % tag, result.F_drift, len(result.trace) - 1)

    def add_scan(self, tag, report):
        """Per-sample curvature sizes of a flatness scan, then its maxima."""
        for step, (hor, mixed) in enumerate(report.per_sample or ()):
            self.add_scalar('%s/R_hor' % tag, hor, step)
            self.add_scalar('%s/R_mixed' % tag, mixed, step)
        self.add_scalar('%s/max_R_hor' % tag, report.max_R_hor, report.count)
        self.add_scalar('%s/max_R_mixed' % tag, report.max_R_mixed, report.count)

    def flush(self):
        self.event_writer.flush()

    def close(self):
        self.event_writer.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
