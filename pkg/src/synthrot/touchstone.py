"""Touchstone v1 four-port file writer (and a reader for round-trips).

Real/imaginary pairs in Hz on a 50 ohm reference unless told otherwise;
each frequency block spans four lines, one matrix row per line, the
frequency only on the first.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError


def write_s4p(path, freq_hz: np.ndarray, s: np.ndarray, r_ref: float = 50.0,
              comments: Optional[Sequence[str]] = None) -> None:
    freq_hz = np.asarray(freq_hz, dtype=float)
    s = np.asarray(s, dtype=complex)
    if freq_hz.ndim != 1 or s.shape != (freq_hz.size, 4, 4):
        raise ValidationError("need freq (n,) and scattering (n, 4, 4)")
    if np.any(np.diff(freq_hz) <= 0.0):
        raise ValidationError("frequencies must be strictly increasing")
    if not np.all(np.isfinite(s.view(float))):
        raise ValidationError("scattering data holds non-finite entries")
    lines = []
    for text in comments or ():
        for piece in str(text).splitlines():
            lines.append(f"! {piece}")
    lines.append(f"# HZ S RI R {r_ref:g}")
    for f, mat in zip(freq_hz, s):
        for i in range(4):
            cells = " ".join(
                f"{mat[i, j].real: .12e} {mat[i, j].imag: .12e}" for j in range(4)
            )
            head = f"{f:.12e} " if i == 0 else " " * 19
            lines.append(head + cells)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_s4p(path):
    """Parse a four-port Touchstone v1 file written by write_s4p.

    Returns (freq_hz, s, r_ref). Only the HZ/S/RI option line variant is
    accepted; that is all the writer produces.
    """
    rows = []
    r_ref = 50.0
    saw_header = False
    with open(path) as fh:
        for raw in fh:
            line = raw.split("!", 1)[0].strip()
            if not line:
                continue
            if line.startswith("#"):
                fields = line[1:].split()
                if [f.upper() for f in fields[:3]] != ["HZ", "S", "RI"]:
                    raise ValidationError(f"unsupported option line: {line}")
                if len(fields) >= 5 and fields[3].upper() == "R":
                    r_ref = float(fields[4])
                saw_header = True
                continue
            rows.extend(float(tok) for tok in line.split())
    if not saw_header:
        raise ValidationError("missing option line")
    per_block = 1 + 32  # frequency plus 16 complex entries
    if not rows or len(rows) % per_block != 0:
        raise ValidationError("malformed data block")
    data = np.array(rows).reshape(-1, per_block)
    freq_hz = data[:, 0]
    cplx = data[:, 1::2][:, :16] + 1j * data[:, 2::2][:, :16]
    return freq_hz, cplx.reshape(-1, 4, 4), r_ref
