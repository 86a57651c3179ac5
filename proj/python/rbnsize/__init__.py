"""Redundant-binary silent-zero encoding, energy pricing, frames and MAC simulation."""

from fractions import Fraction
import json
from pathlib import Path

from ._rbnsize import (
    RbnError,
    ScenarioError,
    analyze_bytes,
    analyze_corpus,
    build_control_frame,
    build_data_frame,
    crc32,
    decode,
    deviation_csv,
    encode,
    encode_digits,
    frame_energy,
    gamma_dev,
    gamma_size,
    measured_total_nonzeros,
    occurrence_count,
    parse_frame,
    profiles,
    run_count_table,
    simulate,
    weight,
    _formula_total_nonzeros,
)


def formula_total_nonzeros(n):
    """Closed-form non-zero total over all n-bit strings, as an exact Fraction."""
    return Fraction(*_formula_total_nonzeros(n))


def simulate_file(path, seed=None, trace=False):
    return simulate(Path(path).read_text(), seed=seed, trace=trace)


def simulate_dict(scenario, seed=None, trace=False):
    return simulate(json.dumps(scenario), seed=seed, trace=trace)


__all__ = [
    "RbnError", "ScenarioError", "analyze_bytes", "analyze_corpus", "build_control_frame", "build_data_frame",
    "crc32", "decode", "deviation_csv", "encode", "encode_digits", "formula_total_nonzeros", "frame_energy",
    "gamma_dev", "gamma_size", "measured_total_nonzeros", "occurrence_count", "parse_frame", "profiles",
    "run_count_table", "simulate", "simulate_dict", "simulate_file", "weight",
]
