#!/usr/bin/env python3
"""Independent reference for the values frozen in the C++ tests.

Plain-Python re-derivation: run scan + pair fold on lists, brute-force run
tables, zlib for CRC-32. Prints JSON; nothing here imports the C++ code.
"""
import json
import sys
import zlib


def runs(bits):  # bits lsb-first
    out, i, n = [], 0, len(bits)
    while i < n:
        if bits[i] == 0:
            i += 1
            continue
        k = 0
        while i < n and bits[i] == 1:
            k += 1
            i += 1
        out.append((i - k, k))
    return out


def enc(bits):
    n = len(bits)
    d = [0] * (n + 1)
    for i, k in runs(bits):
        if k == 1:
            d[i] = 1
        else:
            d[i] = -1
            d[i + k] = 1
    for p in range(n):
        if d[p + 1] == -1 and d[p] == 1:
            d[p + 1], d[p] = 0, -1
    return d


def text(d):
    return "".join({0: "0", 1: "1", -1: "T"}[x] for x in reversed(d))


def from_text(s):
    return [int(c) for c in reversed(s)]


def bits_of(x, n):
    return [(x >> i) & 1 for i in range(n)]


def table(n):
    rows = {}
    for x in range(1 << n):
        for _, k in runs(bits_of(x, n)):
            rows[k] = rows.get(k, 0) + 1
    return rows


def occurrence(n, k, ik):
    strings = sum(1 for x in range(1 << n) if sum(1 for _, kk in runs(bits_of(x, n)) if kk == k) == ik)
    return {"strings": strings, "count": strings * ik}


def measured_total(n):
    return sum(sum(1 for v in enc(bits_of(x, n)) if v) for x in range(1 << n))


def main():
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 16
    examples = ["110111", "111", "11011011", "100010110", "1011", "11111111"]
    out = {
        "encode": {s: {"rbn": text(enc(from_text(s))), "weight": sum(1 for v in enc(from_text(s)) if v)}
                   for s in examples},
        "table": {n: table(n) for n in (1, 3, 8)},
        "occurrence_8_2": {i: occurrence(8, 2, i) for i in (1, 2, 3)},
        "measured_total": {n: measured_total(n) for n in range(0, n_max + 1)},
        "crc32": {"123456789": zlib.crc32(b"123456789"), "": zlib.crc32(b""), "AB": zlib.crc32(b"\xab")},
    }
    json.dump(out, sys.stdout, indent=1)
    print()


if __name__ == "__main__":
    main()
