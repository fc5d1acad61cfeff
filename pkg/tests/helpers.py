"""Shared test utilities: CSV parsing and curve interpolation."""

import numpy as np


def parse_csv(text):
    """Parse a sweep CSV into {column: list}; '#' comment lines are skipped."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    columns = lines[0].split(",")
    table = {c: [] for c in columns}
    for line in lines[1:]:
        for col, cell in zip(columns, line.split(",")):
            table[col].append(cell)
    return table


def scheme_curve(table, label, x_col, y_col):
    """(x, y) arrays for one scheme, in row order."""
    rows = [i for i, s in enumerate(table["scheme"]) if s == label]
    x = np.array([float(table[x_col][i]) for i in rows])
    y = np.array([float(table[y_col][i]) for i in rows])
    return x, y


def snr_at_rate(snr_db, rate, target):
    """SNR (dB) where a monotone-increasing rate curve crosses `target`, by linear interpolation."""
    rate = np.asarray(rate)
    above = np.nonzero(rate >= target)[0]
    if len(above) == 0 or above[0] == 0:
        raise ValueError(f"rate curve does not bracket {target}")
    j = above[0]
    x0, x1 = snr_db[j - 1], snr_db[j]
    y0, y1 = rate[j - 1], rate[j]
    return x0 + (target - y0) * (x1 - x0) / (y1 - y0)


def snr_at_ber(snr_db, ber, target):
    """SNR (dB) where a decreasing BER curve crosses `target`, interpolating log10(BER)."""
    snr_db = np.asarray(snr_db, dtype=float)
    ber = np.asarray(ber, dtype=float)
    keep = ber > 0
    snr_db, ber = snr_db[keep], np.log10(ber[keep])
    t = np.log10(target)
    below = np.nonzero(ber <= t)[0]
    if len(below) == 0 or below[0] == 0:
        raise ValueError(f"BER curve does not bracket {target}")
    j = below[0]
    x0, x1 = snr_db[j - 1], snr_db[j]
    y0, y1 = ber[j - 1], ber[j]
    return x0 + (t - y0) * (x1 - x0) / (y1 - y0)
