"""Binary wire protocol.

Frame: u32 little-endian body length, u8 message type, body. The length
counts the body only. All integers little-endian; vectors are f64.

Message bodies:

    ENROLL      u32 subject id, u16 name length, name (UTF-8), descriptor
    IDENTIFY    u32 k, descriptor
    PARSE_TAGS  u32 k, descriptor, u8 has_image,
                [u32 width, u32 height, rgb u8*3HW, mask u8*HW, pose 40 f64]
    OK          request-specific result payload
    ERROR       u16 code, UTF-8 message

    descriptor = u32 dim, dim f64
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from reidkit.errors import ProtocolError

MSG_ENROLL = 1
MSG_IDENTIFY = 2
MSG_PARSE_TAGS = 3
MSG_OK = 4
MSG_ERROR = 5

ERR_GENERIC = 1
ERR_DIMENSION = 2
ERR_EMPTY_GALLERY = 3
ERR_NO_FASHION = 4
ERR_MALFORMED = 5

MAX_BODY = 64 * 1024 * 1024

_N_POSE_VALUES = 40  # 20 joints x (u, v)


def pack_frame(msg_type: int, body: bytes) -> bytes:
    return struct.pack("<IB", len(body), msg_type) + body


def read_exact(sock, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            raise ConnectionError("peer closed mid-frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock) -> tuple[int, bytes]:
    header = read_exact(sock, 5)
    length, msg_type = struct.unpack("<IB", header)
    if length > MAX_BODY:
        raise ProtocolError(f"frame body of {length} bytes exceeds limit")
    return msg_type, read_exact(sock, length)


class _Reader:
    """Cursor over a message body; short reads raise ProtocolError."""

    def __init__(self, body: bytes):
        self.body = body
        self.off = 0

    def unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.off + size > len(self.body):
            raise ProtocolError("truncated message body")
        vals = struct.unpack_from(fmt, self.body, self.off)
        self.off += size
        return vals

    def raw(self, n: int) -> bytes:
        if self.off + n > len(self.body):
            raise ProtocolError("truncated message body")
        out = self.body[self.off:self.off + n]
        self.off += n
        return out

    def finish(self) -> None:
        if self.off != len(self.body):
            raise ProtocolError(f"{len(self.body) - self.off} trailing bytes in body")


def encode_vector(vec: np.ndarray) -> bytes:
    v = np.ascontiguousarray(vec, dtype="<f8")
    return struct.pack("<I", v.shape[0]) + v.tobytes()


def _decode_vector(r: _Reader) -> np.ndarray:
    (dim,) = r.unpack("<I")
    return np.frombuffer(r.raw(8 * dim), dtype="<f8").astype(np.float64)


def encode_enroll(subject_id: int, name: str, descriptor: np.ndarray) -> bytes:
    raw = name.encode("utf-8")
    body = struct.pack("<IH", subject_id, len(raw)) + raw + encode_vector(descriptor)
    return pack_frame(MSG_ENROLL, body)


def decode_enroll(body: bytes) -> tuple[int, str, np.ndarray]:
    r = _Reader(body)
    subject_id, name_len = r.unpack("<IH")
    name = r.raw(name_len).decode("utf-8")
    vec = _decode_vector(r)
    r.finish()
    return subject_id, name, vec


def encode_identify(descriptor: np.ndarray, k: int) -> bytes:
    return pack_frame(MSG_IDENTIFY, struct.pack("<I", k) + encode_vector(descriptor))


def decode_identify(body: bytes) -> tuple[int, np.ndarray]:
    r = _Reader(body)
    (k,) = r.unpack("<I")
    vec = _decode_vector(r)
    r.finish()
    return k, vec


@dataclass
class ImagePayload:
    rgb: np.ndarray
    mask: np.ndarray
    pose2d: np.ndarray


def encode_image(img: ImagePayload) -> bytes:
    h, w = img.mask.shape
    rgb = np.ascontiguousarray(img.rgb, dtype=np.uint8)
    mask = np.ascontiguousarray(img.mask.astype(np.uint8))
    pose = np.ascontiguousarray(img.pose2d, dtype="<f8")
    if rgb.shape != (h, w, 3) or pose.shape != (20, 2):
        raise ProtocolError("image payload shapes disagree")
    return struct.pack("<II", w, h) + rgb.tobytes() + mask.tobytes() + pose.tobytes()


def decode_image(r: _Reader) -> ImagePayload:
    w, h = r.unpack("<II")
    if h == 0 or w == 0 or h * w > MAX_BODY // 4:
        raise ProtocolError(f"implausible image size {w}x{h}")
    rgb = np.frombuffer(r.raw(3 * h * w), dtype=np.uint8).reshape(h, w, 3).copy()
    mask = np.frombuffer(r.raw(h * w), dtype=np.uint8).reshape(h, w).astype(bool)
    pose = np.frombuffer(r.raw(8 * _N_POSE_VALUES), dtype="<f8").reshape(20, 2).copy()
    return ImagePayload(rgb=rgb, mask=mask, pose2d=pose)


def encode_parse_tags(descriptor: np.ndarray, k: int,
                      image: ImagePayload | None = None) -> bytes:
    body = struct.pack("<I", k) + encode_vector(descriptor)
    if image is None:
        body += struct.pack("<B", 0)
    else:
        body += struct.pack("<B", 1) + encode_image(image)
    return pack_frame(MSG_PARSE_TAGS, body)


def decode_parse_tags(body: bytes) -> tuple[int, np.ndarray, ImagePayload | None]:
    r = _Reader(body)
    (k,) = r.unpack("<I")
    vec = _decode_vector(r)
    (has_image,) = r.unpack("<B")
    image = decode_image(r) if has_image else None
    r.finish()
    return k, vec, image


def encode_error(code: int, message: str) -> bytes:
    return pack_frame(MSG_ERROR, struct.pack("<H", code) + message.encode("utf-8"))


def decode_error(body: bytes) -> tuple[int, str]:
    r = _Reader(body)
    (code,) = r.unpack("<H")
    return code, r.body[r.off:].decode("utf-8")


def encode_ok(body: bytes = b"") -> bytes:
    return pack_frame(MSG_OK, body)


def encode_identify_result(results: list[tuple[int, str, float]]) -> bytes:
    body = struct.pack("<I", len(results))
    for subject_id, name, dist in results:
        raw = name.encode("utf-8")
        body += struct.pack("<IH", subject_id, len(raw)) + raw + struct.pack("<d", dist)
    return body


def decode_identify_result(body: bytes) -> list[tuple[int, str, float]]:
    r = _Reader(body)
    (count,) = r.unpack("<I")
    out = []
    for _ in range(count):
        subject_id, name_len = r.unpack("<IH")
        name = r.raw(name_len).decode("utf-8")
        (dist,) = r.unpack("<d")
        out.append((subject_id, name, dist))
    r.finish()
    return out


def _encode_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def _decode_str(r: _Reader) -> str:
    (n,) = r.unpack("<H")
    return r.raw(n).decode("utf-8")


def encode_tags_result(tags: list[str], colors: dict[str, str] | None) -> bytes:
    body = struct.pack("<I", len(tags))
    for t in tags:
        body += _encode_str(t)
    if colors is None:
        body += struct.pack("<B", 0)
    else:
        body += struct.pack("<BI", 1, len(colors))
        for item in sorted(colors):
            body += _encode_str(item) + _encode_str(colors[item])
    return body


def decode_tags_result(body: bytes) -> tuple[list[str], dict[str, str] | None]:
    r = _Reader(body)
    (count,) = r.unpack("<I")
    tags = [_decode_str(r) for _ in range(count)]
    (has_colors,) = r.unpack("<B")
    colors = None
    if has_colors:
        (n,) = r.unpack("<I")
        colors = {}
        for _ in range(n):
            item = _decode_str(r)
            colors[item] = _decode_str(r)
    r.finish()
    return tags, colors
