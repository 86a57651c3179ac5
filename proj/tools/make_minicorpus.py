#!/usr/bin/env python3
"""Regenerates data/minicorpus/generated/sensor_log.bin.

A fake sensor log: 4096 records of (u32 timestamp, i16 temperature in
centi-degrees, u16 humidity, u8 flags, 3 pad bytes), little-endian. Seeded,
so the output is byte-identical on every run.
"""
import math
import pathlib
import random
import struct

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "minicorpus" / "generated" / "sensor_log.bin"


def main():
    rng = random.Random(20070611)
    out = bytearray()
    t = 1_180_000_000
    for i in range(4096):
        t += 30 + rng.randrange(3)
        temp = int(2150 + 400 * math.sin(i / 300.0) + rng.gauss(0, 15))
        hum = int(5200 + 900 * math.cos(i / 450.0) + rng.gauss(0, 40))
        flags = 1 if rng.random() < 0.02 else 0
        out += struct.pack("<IhHB3x", t, temp, hum, flags)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_bytes(bytes(out))
    print(f"{OUT}: {len(out)} bytes")


if __name__ == "__main__":
    main()
