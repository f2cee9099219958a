"""Switch-point (cue-point) detection for electronic dance music."""

import json

import numpy as np

from . import _core
from ._core import CuepointError, SAMPLE_RATE, SCHEMA_VERSION, match, ssm

__all__ = [
    "CuepointError",
    "SAMPLE_RATE",
    "SCHEMA_VERSION",
    "analyze_file",
    "analyze_samples",
    "estimate_beats",
    "evaluate",
    "match",
    "novelty",
    "ssm",
    "synth",
]


def analyze_file(path, beats=None, rules="novelty,period,salience", config=None):
    """Analyze a WAV file. Returns the output document as a dict."""
    cfg = json.dumps(config) if isinstance(config, dict) else config
    return json.loads(_core.analyze_file(str(path), beats and str(beats), rules, cfg))


def analyze_samples(samples, sample_rate, beats=None, downbeat_offset=0,
                    rules="novelty,period,salience", config=None, track_id="track"):
    cfg = json.dumps(config) if isinstance(config, dict) else config
    samples = np.ascontiguousarray(samples, dtype=np.float32)
    return json.loads(_core.analyze_samples(samples, sample_rate, beats, downbeat_offset,
                                            rules, cfg, track_id))


def estimate_beats(samples, sample_rate):
    beats, downbeat_offset, tempo = _core.estimate_beats(
        np.ascontiguousarray(samples, dtype=np.float32), sample_rate)
    return {"beats_s": beats, "downbeat_offset": downbeat_offset, "tempo_bpm": tempo}


def novelty(rows, half_size=8, zero_padding=False):
    values, start, stop = _core.novelty(np.asarray(rows, dtype=np.float64), half_size,
                                        zero_padding)
    return np.asarray(values), (start, stop)


def evaluate(candidates, annotations, window=0.5, method="candidates"):
    """candidates and annotations are lists of annotation-shaped dicts."""
    return json.loads(_core.evaluate(json.dumps(candidates), json.dumps(annotations),
                                     window, method))


def synth(script):
    """Render a track script (dict). Returns (samples, truth dict)."""
    samples, truth = _core.synth(json.dumps(script))
    return samples, json.loads(truth)
