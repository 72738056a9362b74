"""Trace file format and seeded synthetic scenario generation.

A ``.pptrace`` file is line-delimited JSON: one header line, then one record
per frame with the 25x25 thumbnail base64-encoded. All fields are named and
unknown fields are ignored, so the format can grow without breaking readers.
"""
from __future__ import annotations

import base64
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    MOVING_CLASSES,
    THUMBNAIL_SIZE,
    BBox,
    Detection,
    FrameRecord,
    ObjectClass,
    clip,
)

FORMAT_VERSION = 1

_CLASS_INTENSITY = {
    ObjectClass.VEHICLE: 210.0,
    ObjectClass.PEDESTRIAN: 240.0,
    ObjectClass.BICYCLE: 225.0,
    ObjectClass.TRAFFIC_SIGN: 40.0,
    ObjectClass.TRAFFIC_LIGHT: 25.0,
    ObjectClass.OTHER: 160.0,
}


class TraceFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TraceHeader:
    fps: float
    width: int
    height: int
    frame_count: int
    scenario_tag: str = ""
    format_version: int = FORMAT_VERSION

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")


@dataclass(frozen=True)
class ObjectScript:
    """One scripted object: constant-velocity box plus seeded jitter."""

    class_id: ObjectClass
    spawn_s: float
    despawn_s: float
    x: float
    y: float
    w: float
    h: float
    vx: float = 0.0  # px per frame
    vy: float = 0.0
    vw: float = 0.0
    vh: float = 0.0
    jitter_px: float = 0.0


@dataclass(frozen=True)
class ScenarioScript:
    tag: str
    duration_s: float
    fps: float = 30.0
    width: int = 1280
    height: int = 720
    objects: tuple[ObjectScript, ...] = ()
    drivable_band: tuple[float, float] = (0.60, 1.0)  # y extent as frame fractions
    background_contrast: float = 60.0


def frame_timestamp_us(seq: int, fps: float) -> int:
    """Capture time of frame ``seq`` on the integer-microsecond grid."""
    return round(seq * 1_000_000 / fps)


def _box_to_list(box: BBox) -> list[float]:
    return [box.x, box.y, box.w, box.h]


def _box_from_list(values) -> BBox:
    x, y, w, h = values
    return BBox(float(x), float(y), float(w), float(h))


def _frame_to_json(frame: FrameRecord) -> str:
    record = {
        "seq": frame.seq,
        "timestamp_us": round(frame.timestamp_ms * 1000),
        "width": frame.width,
        "height": frame.height,
        "thumbnail": base64.b64encode(frame.thumbnail).decode("ascii"),
        "truths": [
            {"class": d.class_id.value, "box": _box_to_list(d.box), "score": d.score}
            for d in frame.truths
        ],
        "seg_boxes": [
            {"class": c.value, "box": _box_to_list(b)} for c, b in frame.seg_boxes
        ],
    }
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_trace(path, header: TraceHeader, frames) -> None:
    with open(path, "w", encoding="ascii") as fh:
        head = {
            "format_version": header.format_version,
            "fps": header.fps,
            "width": header.width,
            "height": header.height,
            "frame_count": header.frame_count,
            "scenario_tag": header.scenario_tag,
        }
        fh.write(json.dumps(head, sort_keys=True, separators=(",", ":")) + "\n")
        for frame in frames:
            fh.write(_frame_to_json(frame) + "\n")


def read_trace(path) -> tuple[TraceHeader, list[FrameRecord]]:
    """Parse and validate a trace; raises :class:`TraceFormatError` with the
    offending line number on any malformed or inconsistent record."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TraceFormatError("empty file", 1)

    def parse(line_no: int, text: str) -> dict:
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"malformed record: {exc.msg}", line_no) from exc

    head = parse(1, lines[0])
    try:
        version = int(head["format_version"])
        if version != FORMAT_VERSION:
            raise TraceFormatError(f"unsupported format_version {version}", 1)
        header = TraceHeader(
            fps=float(head["fps"]),
            width=int(head["width"]),
            height=int(head["height"]),
            frame_count=int(head["frame_count"]),
            scenario_tag=str(head.get("scenario_tag", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TraceFormatError):
            raise
        raise TraceFormatError(f"bad header: {exc}", 1) from exc

    frames: list[FrameRecord] = []
    prev_seq, prev_us = -1, -1
    for line_no, text in enumerate(lines[1:], start=2):
        rec = parse(line_no, text)
        try:
            seq = int(rec["seq"])
            ts_us = int(rec["timestamp_us"])
            thumbnail = base64.b64decode(rec["thumbnail"], validate=True)
            truths = tuple(
                Detection(ObjectClass(d["class"]), _box_from_list(d["box"]), float(d["score"]))
                for d in rec["truths"]
            )
            seg_boxes = tuple(
                (ObjectClass(s["class"]), _box_from_list(s["box"]))
                for s in rec["seg_boxes"]
            )
            frame = FrameRecord(
                seq=seq,
                timestamp_ms=ts_us / 1000.0,
                width=int(rec["width"]),
                height=int(rec["height"]),
                thumbnail=thumbnail,
                truths=truths,
                seg_boxes=seg_boxes,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceFormatError(f"bad frame record: {exc}", line_no) from exc
        if frame.width != header.width or frame.height != header.height:
            raise TraceFormatError("frame size disagrees with header", line_no)
        if seq <= prev_seq:
            raise TraceFormatError(f"seq regression: {seq} after {prev_seq}", line_no)
        if ts_us <= prev_us:
            raise TraceFormatError(f"timestamp regression: {ts_us} after {prev_us}", line_no)
        prev_seq, prev_us = seq, ts_us
        frames.append(frame)

    if len(frames) != header.frame_count:
        raise TraceFormatError(
            f"truncated trace: header promises {header.frame_count} frames, "
            f"got {len(frames)}",
            len(lines),
        )
    return header, frames


def trace_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _background(rng: np.random.Generator, contrast: float) -> np.ndarray:
    """Static low-frequency noise field so empty scenes keep SSIM variance."""
    coarse = rng.random((5, 5)) * 2.0 - 1.0
    # bilinear upsample to the thumbnail grid
    xs = np.linspace(0, 4, THUMBNAIL_SIZE)
    xi = np.minimum(xs.astype(int), 3)
    frac = xs - xi
    rows = coarse[xi] * (1 - frac)[:, None] + coarse[np.minimum(xi + 1, 4)] * frac[:, None]
    field = rows[:, xi] * (1 - frac)[None, :] + rows[:, np.minimum(xi + 1, 4)] * frac[None, :]
    return np.clip(110.0 + contrast * field, 0.0, 255.0)


def _render_thumbnail(background: np.ndarray, frame_w: int, frame_h: int, truths) -> bytes:
    thumb = background.copy()
    n = THUMBNAIL_SIZE
    for det in truths:
        b = det.box
        x0 = min(n - 1, max(0, math.floor(b.x * n / frame_w)))
        y0 = min(n - 1, max(0, math.floor(b.y * n / frame_h)))
        x1 = max(x0 + 1, min(n, math.ceil(b.x2 * n / frame_w)))
        y1 = max(y0 + 1, min(n, math.ceil(b.y2 * n / frame_h)))
        thumb[y0:y1, x0:x1] = _CLASS_INTENSITY[det.class_id]
    return np.clip(np.round(thumb), 0, 255).astype(np.uint8).tobytes()


def _quantize(value: float) -> float:
    return round(float(value), 2)


def generate(script: ScenarioScript, seed: int = 0) -> tuple[TraceHeader, list[FrameRecord]]:
    """Deterministic trace from a scenario script.

    Object boxes follow their constant-velocity model plus seeded jitter;
    thumbnails are rasterized box silhouettes over a static seeded noise
    field; segmentation extents are the drivable band plus moving-object
    footprints.
    """
    rng = np.random.default_rng(seed)
    background = _background(rng, script.background_contrast)
    frame_count = round(script.duration_s * script.fps)
    width, height = script.width, script.height

    band_y0 = script.drivable_band[0] * height
    band_h = (script.drivable_band[1] - script.drivable_band[0]) * height
    band_box = BBox(0.0, _quantize(band_y0), float(width), _quantize(band_h))

    frames: list[FrameRecord] = []
    for i in range(frame_count):
        t_s = i / script.fps
        truths: list[Detection] = []
        for obj in script.objects:
            if not (obj.spawn_s <= t_s < obj.despawn_s):
                continue
            steps = i - round(obj.spawn_s * script.fps)
            jx = jy = 0.0
            if obj.jitter_px > 0:
                jx, jy = (rng.random(2) * 2.0 - 1.0) * obj.jitter_px
            x = obj.x + obj.vx * steps + jx
            y = obj.y + obj.vy * steps + jy
            w = max(4.0, obj.w + obj.vw * steps)
            h = max(4.0, obj.h + obj.vh * steps)
            x, y, w, h = (_quantize(v) for v in (max(0.0, x), max(0.0, y), w, h))
            try:
                box = clip(BBox(x, y, w, h), width, height)
            except ValueError:
                continue  # drifted out of frame
            if box.w < 2 or box.h < 2:
                continue
            truths.append(Detection(obj.class_id, box, 1.0))

        seg_boxes: list[tuple[ObjectClass, BBox]] = [(ObjectClass.OTHER, band_box)]
        seg_boxes.extend(
            (d.class_id, d.box) for d in truths if d.class_id in MOVING_CLASSES
        )

        frames.append(
            FrameRecord(
                seq=i,
                timestamp_ms=frame_timestamp_us(i, script.fps) / 1000.0,
                width=width,
                height=height,
                thumbnail=_render_thumbnail(background, width, height, truths),
                truths=tuple(truths),
                seg_boxes=tuple(seg_boxes),
            )
        )

    header = TraceHeader(
        fps=script.fps,
        width=width,
        height=height,
        frame_count=frame_count,
        scenario_tag=script.tag,
    )
    return header, frames


def builtin_script(
    name: str,
    fps: float = 30.0,
    duration_s: float | None = None,
    width: int = 1280,
    height: int = 720,
) -> ScenarioScript:
    """Built-in scenarios: highway, downtown, crossing, signal_stop."""
    if name == "highway":
        duration = duration_s if duration_s is not None else 30.0
        objects = [
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 560, 300, 170, 130,
                         vx=0.15, jitter_px=0.4),
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 180, 340, 200, 140,
                         vx=0.45, vy=0.05, jitter_px=0.4),
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 900, 330, 190, 135,
                         vx=-0.3, jitter_px=0.4),
        ]
        # a fast overtaking vehicle every 10 s forces visible pixel change
        t = 4.0
        while t + 4.0 < duration:
            objects.append(
                ObjectScript(ObjectClass.VEHICLE, t, t + 4.0, 20, 380, 220, 150,
                             vx=9.0, vy=-0.4, jitter_px=0.4)
            )
            t += 10.0
        return ScenarioScript("highway", duration, fps, width, height, tuple(objects))

    if name == "downtown":
        duration = duration_s if duration_s is not None else 70.0
        objects = [
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 500, 320, 180, 130,
                         vx=0.2, jitter_px=0.5),
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 150, 360, 170, 120,
                         vx=0.6, jitter_px=0.5),
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 950, 340, 185, 125,
                         vx=-0.5, jitter_px=0.5),
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 760, 350, 150, 110,
                         jitter_px=0.3),  # parked
            ObjectScript(ObjectClass.PEDESTRIAN, 0.0, duration, 1080, 380, 55, 150,
                         vx=-0.9, jitter_px=0.6),
            ObjectScript(ObjectClass.PEDESTRIAN, 0.0, duration, 60, 390, 55, 150,
                         vx=1.1, jitter_px=0.6),
            ObjectScript(ObjectClass.TRAFFIC_LIGHT, 0.0, duration, 640, 90, 45, 95),
            ObjectScript(ObjectClass.TRAFFIC_SIGN, 0.0, duration, 1120, 160, 65, 65),
        ]
        # periodic cross traffic keeps the stream from settling
        t = 6.0
        while t + 5.0 < duration:
            objects.append(
                ObjectScript(ObjectClass.VEHICLE, t, t + 5.0, 10, 400, 210, 140,
                             vx=8.0, jitter_px=0.5)
            )
            t += 8.0
        # mid-trace pedestrian burst
        if duration > 35.0:
            objects.extend(
                ObjectScript(ObjectClass.PEDESTRIAN, 30.0, min(45.0, duration),
                             300 + 140 * k, 400, 55, 150, vx=1.6, jitter_px=0.6)
                for k in range(2)
            )
        return ScenarioScript("downtown", duration, fps, width, height, tuple(objects))

    if name == "crossing":
        duration = duration_s if duration_s is not None else 20.0
        objects = [
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 420, 330, 180, 130,
                         vx=0.25, jitter_px=0.4),
            ObjectScript(ObjectClass.VEHICLE, 0.0, duration, 820, 340, 175, 125,
                         vx=-0.25, jitter_px=0.4),
            ObjectScript(ObjectClass.PEDESTRIAN, 0.0, duration, 1150, 390, 55, 150,
                         vx=-0.5, jitter_px=0.5),
        ]
        objects.extend(
            ObjectScript(ObjectClass.PEDESTRIAN, 5.0, duration,
                         80 + 130 * k, 380 + 15 * k, 55, 150, vx=1.5, jitter_px=0.6)
            for k in range(3)
        )
        return ScenarioScript("crossing", duration, fps, width, height, tuple(objects))

    if name == "signal_stop":
        duration = duration_s if duration_s is not None else 20.0
        stop_s = duration / 2.0
        objects = [
            ObjectScript(ObjectClass.TRAFFIC_LIGHT, 0.0, duration, 600, 80, 45, 100),
            ObjectScript(ObjectClass.TRAFFIC_LIGHT, 0.0, duration, 760, 85, 45, 100),
            ObjectScript(ObjectClass.TRAFFIC_SIGN, 0.0, duration, 1060, 170, 65, 65),
            ObjectScript(ObjectClass.TRAFFIC_SIGN, 0.0, duration, 140, 180, 65, 65),
            # approach, then hold position after the stop
            ObjectScript(ObjectClass.VEHICLE, 0.0, stop_s, 460, 320, 170, 125,
                         vx=1.2, jitter_px=0.4),
            ObjectScript(ObjectClass.VEHICLE, stop_s, duration,
                         460 + 1.2 * stop_s * fps, 320, 170, 125, jitter_px=0.3),
            ObjectScript(ObjectClass.VEHICLE, 0.0, stop_s, 840, 335, 165, 120,
                         vx=-0.8, jitter_px=0.4),
            ObjectScript(ObjectClass.VEHICLE, stop_s, duration,
                         840 - 0.8 * stop_s * fps, 335, 165, 120, jitter_px=0.3),
        ]
        return ScenarioScript("signal_stop", duration, fps, width, height, tuple(objects))

    raise ValueError(
        f"unknown scenario {name!r}; valid names: highway, downtown, crossing, signal_stop"
    )


BUILTIN_SCENARIOS = ("highway", "downtown", "crossing", "signal_stop")
