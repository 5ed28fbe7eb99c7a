"""Run reports: human-readable text and fixed-header CSV payloads."""
import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def fmt(v):
    """Deterministic cell formatting (``%.12g`` for reals)."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.12g" % float(v)
    return str(v)


@dataclass
class Section:
    index: int
    command: str
    header: list
    rows: list = field(default_factory=list)
    lines: list = field(default_factory=list)
    error: str = None
    seconds: float = 0.0

    @property
    def filename(self):
        return f"{self.index:02d}_{self.command}.csv"

    def csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([fmt(c) for c in row])
        return buf.getvalue()


@dataclass
class RunReport:
    sections: list = field(default_factory=list)
    seed: int = 0

    @property
    def failed(self):
        return any(s.error for s in self.sections)

    @property
    def exit_code(self):
        return 3 if self.failed else 0

    def text(self):
        out = [f"seed: {self.seed}"]
        for s in self.sections:
            out.append(f"[{s.index}] {s.command} ({s.seconds:.2f} s)")
            if s.error:
                out.append(f"    ERROR: {s.error}")
            out.extend("    " + line for line in s.lines)
        return "\n".join(out) + "\n"

    def write_csv(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for s in self.sections:
            if s.error:
                continue
            p = out / s.filename
            p.write_text(s.csv_text(), encoding="utf-8")
            paths.append(p)
        return paths
