# Copyright 2026 The QTFT Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes data/axisbank_2000_sample.csv, a 27-row stand-in for the first
trading days of 2000 in the NIFTY-50 AXIS BANK dump.

Closes for rows 2-19 are the published closing prices of that period as read
off a plot; rows 0-1 repeat row 2 and rows 20-26 continue with a seeded
random walk (2% daily volatility). Open is the previous close, High/Low sit
1% beyond the day's extremes, Last is Close plus a small seeded offset.
Prices are rounded to the 0.05 tick. Trades and deliverable columns are left
blank, as in the original file for that year.
"""

import argparse
import csv

import numpy as np

SEED = 2000
READ_CLOSES = [26.30, 25.95, 24.80, 25.00, 23.20, 24.00, 23.60, 23.25, 25.15,
               24.90, 25.60, 24.45, 25.10, 24.80, 25.05, 27.05, 29.25, 31.60]
HEADER = ["Date", "Symbol", "Series", "Prev Close", "Open", "High", "Low", "Last",
          "Close", "VWAP", "Volume", "Turnover", "Trades", "Deliverable Volume",
          "%Deliverble"]


def tick(x):
    return round(round(x / 0.05) * 0.05, 2)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/axisbank_2000_sample.csv")
    args = ap.parse_args()

    rng = np.random.default_rng(SEED)
    closes = [READ_CLOSES[0]] * 2 + READ_CLOSES
    for _ in range(7):
        closes.append(tick(closes[-1] * np.exp(rng.normal(0.0, 0.02))))

    dates = np.busday_offset("2000-01-03", np.arange(len(closes)), roll="forward")
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        prev = closes[0]
        for date, close in zip(dates, closes):
            open_ = prev
            high = tick(max(open_, close) * 1.01)
            low = tick(min(open_, close) * 0.99)
            last = tick(close + rng.choice([-0.1, -0.05, 0.0, 0.05, 0.1]))
            last = min(max(last, low), high)
            vwap = round((high + low + close) / 3.0, 2)
            volume = int(rng.integers(20_000, 400_000))
            turnover = f"{vwap * volume * 1e5:.4e}"
            w.writerow([str(date), "UTIBANK", "EQ", f"{prev:.2f}", f"{open_:.2f}",
                        f"{high:.2f}", f"{low:.2f}", f"{last:.2f}", f"{close:.2f}",
                        f"{vwap:.2f}", volume, turnover, "", "", ""])
            prev = close


if __name__ == "__main__":
    main()
