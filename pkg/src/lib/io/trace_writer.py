import csv
import os
from typing import Optional

TRACE_FIELDS = ["restart", "iteration", "stress", "ar_proxy"]


class TraceWriter:
    def __init__(self, file: os.PathLike, encoding: str = "utf-8"):
        """
        A CSV writer for stress-majorization traces that starts a new file for every restart.

        The writer is the trace callback: calling it with
        (restart, iteration, stress, ar_proxy) appends one row.

        Args:
            file (os.PathLike): The file path with the "{restart}" placeholder
        """
        self.file = str(file)
        if "{restart}" not in self.file:
            raise ValueError("File must have the '{restart}' placeholder")

        self.restart: Optional[int] = None
        self.files_written = 0
        self._is_closed = False
        self._encoding = encoding
        self.output_file = None
        self._writer = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.close()

    def __call__(self, restart: int, iteration: int, stress: float, ar_proxy: float):
        if restart != self.restart:
            self._open(restart)
        self._writer.writerow({"restart": restart, "iteration": iteration, "stress": stress, "ar_proxy": ar_proxy})

    def _open(self, restart: int):
        if self._is_closed:
            raise ValueError("Trace writer is closed")
        if self.output_file is not None:
            self.output_file.close()
        self.restart = restart
        self.output_file = open(self.file.format(restart=restart), "w", encoding=self._encoding, newline="")
        self.files_written += 1
        self._writer = csv.DictWriter(self.output_file, fieldnames=TRACE_FIELDS)
        self._writer.writeheader()

    def close(self):
        if self._is_closed:
            return
        self._is_closed = True
        if self.output_file is not None:
            self.output_file.close()
