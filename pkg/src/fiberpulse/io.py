"""CSV recordings, JSON configs, reports and ground-truth sidecars.

Recording CSV: header ``time_s,<site>[,<site>...]``, one row per sample,
UTF-8 with LF line endings. Times must be uniformly spaced to within
1e-6 s. Samples are written with 12 significant digits.

Config JSON sections (all optional except where a command needs them)::

    {"scenario": {...ScenarioConfig, "seed" required...},
     "transfer": {...SensorTransfer...},
     "filter":   {...FilterSpec...},
     "detector": {...DetectorConfig...},
     "spectrum": {"segment_seconds": 30.0, "overlap_frac": 0.5}}

Unknown keys at any level are rejected.
"""

import csv
from dataclasses import MISSING, asdict, dataclass, field, fields, is_dataclass
import hashlib
import json
import math

import numpy as np

from .core import Recording, Site, make_trace
from .dsp import FilterSpec
from .errors import EmptySamples, NonFiniteSample, SchemaError
from .pulse import DetectorConfig
from .synth import Occlusion, ScenarioConfig, SensorTransfer

TIME_COLUMN = "time_s"
TIME_TOLERANCE = 1e-6


# -- recordings --------------------------------------------------------------

def write_recording(recording, path):
    sites = [ch.site.value for ch in recording.channels]
    data = np.column_stack([ch.samples for ch in recording.channels])
    times = recording.channels[0].times
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join([TIME_COLUMN, *sites]) + "\n")
        for t, row in zip(times, data):
            fh.write(f"{t:.9f}," + ",".join(f"{v:.12g}" for v in row) + "\n")


def _parse_float(text, row, column):
    try:
        v = float(text)
    except ValueError:
        raise SchemaError(f"not a number: {text!r}", row, column) from None
    if not math.isfinite(v):
        raise SchemaError(f"non-finite value {text!r}", row, column)
    return v


def read_recording(path, label=None):
    """Parse a recording CSV into an aligned :class:`Recording`.

    Raises :class:`SchemaError` (with row/column where applicable) for an
    empty file, a bad header, unparsable cells, ragged rows or a
    non-uniform time column.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise SchemaError("empty recording file")
    header = [h.strip() for h in rows[0]]
    if header[0] != TIME_COLUMN:
        raise SchemaError(f"first column must be {TIME_COLUMN!r}", 1, header[0])
    if len(header) < 2:
        raise SchemaError("recording needs at least one site column", 1)
    sites = []
    for name in header[1:]:
        try:
            site = Site(name)
        except ValueError:
            raise SchemaError(f"unknown site {name!r}", 1, name) from None
        if site in sites:
            raise SchemaError(f"duplicate site column {name!r}", 1, name)
        sites.append(site)

    body = [r for r in rows[1:] if r]
    if len(body) < 2:
        raise SchemaError("recording needs at least two samples to fix its rate")
    values = np.empty((len(body), len(header)))
    for i, r in enumerate(body):
        if len(r) != len(header):
            raise SchemaError(f"expected {len(header)} fields, got {len(r)}", i + 2)
        for j, cell in enumerate(r):
            values[i, j] = _parse_float(cell, i + 2, header[j])

    t = values[:, 0]
    dt = (t[-1] - t[0]) / (t.size - 1)
    if not dt > 0:
        raise SchemaError("time column must be strictly increasing", 2, TIME_COLUMN)
    if np.any(np.diff(t) <= 0):
        i = int(np.flatnonzero(np.diff(t) <= 0)[0]) + 1
        raise SchemaError("time column must be strictly increasing", i + 2, TIME_COLUMN)
    off = np.abs(t - (t[0] + np.arange(t.size) * dt))
    if off.max() > TIME_TOLERANCE:
        i = int(np.argmax(off > TIME_TOLERANCE))
        raise SchemaError("time column is not uniformly spaced", i + 2, TIME_COLUMN)

    rate = 1.0 / dt
    # snap rates written with 9-decimal times back to their exact value
    if abs(rate - round(rate)) < 1e-6 * rate:
        rate = float(round(rate))
    try:
        channels = tuple(
            make_trace(rate, t[0], values[:, j + 1], site) for j, site in enumerate(sites)
        )
    except (EmptySamples, NonFiniteSample) as exc:
        raise SchemaError(str(exc)) from None
    return Recording(channels, label=label if label is not None else str(path))


# -- JSON helpers ------------------------------------------------------------

def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(getattr(k, "value", k)): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        if hasattr(obj, "_asdict"):
            return _jsonable(obj._asdict())
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError(f"refusing to serialize non-finite number {v}")
        return v
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def dumps(obj):
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- ground truth ------------------------------------------------------------

def truth_path(recording_path):
    return f"{recording_path}.truth.json"


def truth_to_dict(truth, seed):
    occ = truth.occlusion
    return {
        "seed": seed,
        "beat_foot_times": truth.beat_foot_times,
        "respiration_rate": truth.respiration_rate,
        "cadence": truth.cadence,
        "inter_site_delay": truth.inter_site_delay,
        "breath_hold_windows": truth.breath_hold_windows,
        "occlusion": None if occ is None else {f.name: getattr(occ, f.name) for f in fields(occ)},
        "beat_states": {
            site: [s._asdict() for s in states] for site, states in truth.beat_states.items()
        },
    }


def write_truth(truth, seed, path):
    _write_text(path, dumps(truth_to_dict(truth, seed)))


# -- reports -----------------------------------------------------------------

REPORT_SCHEMA = {
    "type": "object",
    "required": ["warnings", "metadata"],
    "additionalProperties": False,
    "properties": {
        "heart_rate": {"type": "number", "minimum": 0},
        "prv": {
            "type": "object",
            "required": ["n_beats", "mean_ibi", "sdnn", "histogram", "gaussian_fit",
                         "long_term_flag_caveat"],
            "properties": {
                "n_beats": {"type": "integer", "minimum": 2},
                "mean_ibi": {"type": "number", "minimum": 0},
                "sdnn": {"type": "number", "minimum": 0},
                "histogram": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["bin_center", "count"],
                        "properties": {
                            "bin_center": {"type": "number"},
                            "count": {"type": "integer", "minimum": 0},
                        },
                    },
                },
                "gaussian_fit": {
                    "type": "object",
                    "required": ["mu", "sigma"],
                    "properties": {"mu": {"type": "number"}, "sigma": {"type": "number"}},
                },
                "long_term_flag_caveat": {"type": "boolean"},
                "sdnn_below_long_term_threshold": {"type": "boolean"},
            },
        },
        "respiration_rate": {"type": "number", "minimum": 0},
        "respiration_confidence": {"type": "number", "minimum": 0, "maximum": 1},
        "cadence": {"type": "number", "minimum": 0},
        "step_length": {"type": "number", "minimum": 0},
        "pulse_time_difference": {"type": "number"},
        "pwv": {"type": "number", "minimum": 0},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "metadata": {
            "type": "object",
            "required": ["config_digest", "seed", "tool_version"],
            "properties": {
                "config_digest": {"type": "string"},
                "seed": {"type": ["integer", "null"]},
                "tool_version": {"type": "string"},
            },
        },
    },
}


def report_to_dict(report, metadata):
    """Report fields that were computed, plus run ``metadata``.

    Quantities whose inputs were absent are left out rather than written
    as null.
    """
    fields_ = {k: v for k, v in report.to_dict().items() if v is not None}
    return {**fields_, "metadata": dict(metadata)}


def write_report(report, path, metadata):
    _write_text(path, dumps(report_to_dict(report, metadata)))


# -- configs -----------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumDefaults:
    segment_seconds: float = 30.0
    overlap_frac: float = 0.5


@dataclass
class RunConfig:
    scenario: dict = None
    transfer: SensorTransfer = field(default_factory=SensorTransfer)
    filter: FilterSpec = field(default_factory=FilterSpec)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    spectrum: SpectrumDefaults = field(default_factory=SpectrumDefaults)

    def scenario_config(self, seed=None):
        """Build the :class:`ScenarioConfig`; ``seed`` overrides the file."""
        params = dict(self.scenario or {})
        if seed is not None:
            params["seed"] = seed
        if "seed" not in params:
            raise SchemaError("scenario.seed is required for simulation", column="scenario.seed")
        cfg = ScenarioConfig(**params)
        try:
            cfg.check()
        except ValueError as exc:
            raise SchemaError(f"invalid scenario: {exc}") from None
        return cfg

    def analysis_dict(self):
        return {
            "filter": self.filter, "detector": self.detector, "spectrum": self.spectrum,
        }


def _type_ok(default, value):
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, (int, float)):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, str):
        return isinstance(value, str)
    if isinstance(default, tuple):
        return isinstance(value, list)
    return True


def _section(cls, data, where):
    if not isinstance(data, dict):
        raise SchemaError(f"{where} must be an object", column=where)
    known = {f.name: f for f in fields(cls)}
    for key in data:
        if key not in known:
            raise SchemaError(f"unknown key {where}.{key}", column=f"{where}.{key}")
    out = {}
    for key, value in data.items():
        f = known[key]
        default = f.default if f.default is not MISSING else None
        if key == "occlusion":
            out[key] = None if value is None else Occlusion(**_section(Occlusion, value, f"{where}.occlusion"))
            continue
        if key == "seed":
            if not isinstance(value, int) or isinstance(value, bool):
                raise SchemaError(f"{where}.seed must be an integer", column=f"{where}.seed")
        elif default is not None and not _type_ok(default, value):
            raise SchemaError(f"wrong type for {where}.{key}: {value!r}", column=f"{where}.{key}")
        if key == "breath_hold_windows":
            if not all(isinstance(w, list) and len(w) == 2 for w in value):
                raise SchemaError(f"{where}.{key} must be a list of [t0, t1] pairs",
                                  column=f"{where}.{key}")
        out[key] = value
    return out


_SECTIONS = {
    "scenario": ScenarioConfig,
    "transfer": SensorTransfer,
    "filter": FilterSpec,
    "detector": DetectorConfig,
    "spectrum": SpectrumDefaults,
}


def parse_config(data):
    """Validate a config mapping and build a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise SchemaError("config must be a JSON object")
    for key in data:
        if key not in _SECTIONS:
            raise SchemaError(f"unknown key {key}", column=key)
    run = RunConfig()
    for key, cls in _SECTIONS.items():
        if key not in data:
            continue
        params = _section(cls, data[key], key)
        if key == "scenario":
            run.scenario = params
        else:
            try:
                setattr(run, key, cls(**params))
            except ValueError as exc:
                raise SchemaError(f"invalid {key}: {exc}", column=key) from None
    return run


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc.msg}", exc.lineno) from None
    return parse_config(data)


def digest(obj):
    """SHA-256 of the canonical JSON form of ``obj``."""
    return hashlib.sha256(dumps(obj).encode("utf-8")).hexdigest()
