# Copyright 2026 The Advisor Authors
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

"""Checks an `advisor bench` CSV: header, row shape and monotone medians."""

import csv
import statistics
import sys

HEADER = ["N", "K", "elapsed_seconds", "explored_nodes", "pruned_nodes", "best_score"]
LIMIT_SECONDS = 10.0


def main(path, sizes, reps):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != HEADER:
        print("bad header: %r" % (rows[0] if rows else None))
        return 1
    times = {}
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(HEADER):
            print("line %d: %d fields" % (line_no, len(row)))
            return 1
        n, k, elapsed, explored, pruned, score = row
        if int(k) != 3 or float(elapsed) <= 0 or int(explored) < 1 or int(pruned) < 0:
            print("line %d: out of range: %r" % (line_no, row))
            return 1
        if score:
            float(score)
        times.setdefault(int(n), []).append(float(elapsed))
    if sorted(times) != sizes or any(len(v) != reps for v in times.values()):
        print("expected %d repetitions of %s, got %r" % (reps, sizes, {n: len(v) for n, v in times.items()}))
        return 1
    medians = [statistics.median(times[n]) for n in sizes]
    print("medians: " + ", ".join("N=%d %.5f s" % (n, m) for n, m in zip(sizes, medians)))
    if any(b < a for a, b in zip(medians, medians[1:])):
        print("medians are not monotone")
        return 1
    if max(times[sizes[-1]]) >= LIMIT_SECONDS:
        print("N=%d took %.2f s" % (sizes[-1], max(times[sizes[-1]])))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], [50, 100, 150, 200, 250], 5))
