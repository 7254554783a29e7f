"""TCP server around the gallery: enrollment, identification, parse queries.

Enrollment takes an exclusive lock, persists the gallery, rebuilds the
index, and only then swaps the snapshot and acknowledges, so a client that
saw OK will find its entry after a crash. Queries read whatever snapshot is
current when they start; they never see a half-built index.
"""

from __future__ import annotations

import os
import socketserver
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from reidkit.config import Config
from reidkit.errors import DimensionError, ProtocolError
from reidkit.parsing.pipeline import ParseModels, parse_query
from reidkit.retrieval.gallery import (
    Gallery,
    GalleryEntry,
    identify,
    load_gallery,
    save_gallery,
    vote_tags,
)
from reidkit.service import protocol as proto


@dataclass
class ServerState:
    gallery_path: Path
    entries: list[GalleryEntry]
    gallery: Gallery | None  # None until the first enrollment
    parse_models: ParseModels | None
    config: Config
    write_lock: threading.Lock

    @classmethod
    def create(cls, gallery_path: str | Path, parse_models: ParseModels | None = None,
               config: Config | None = None) -> "ServerState":
        gallery_path = Path(gallery_path)
        entries = load_gallery(gallery_path) if gallery_path.exists() else []
        gallery = Gallery.from_entries(entries) if entries else None
        return cls(gallery_path=gallery_path, entries=entries, gallery=gallery,
                   parse_models=parse_models, config=config or Config(),
                   write_lock=threading.Lock())

    def enroll(self, subject_id: int, name: str, descriptor: np.ndarray) -> None:
        with self.write_lock:
            if self.entries and descriptor.shape[0] != self.entries[0].descriptor.shape[0]:
                raise DimensionError(
                    f"descriptor dim {descriptor.shape[0]} does not match gallery "
                    f"dim {self.entries[0].descriptor.shape[0]}")
            new_entries = self.entries + [GalleryEntry(subject_id, name, descriptor)]
            tmp = self.gallery_path.with_suffix(".tmp")
            save_gallery(new_entries, tmp)
            os.replace(tmp, self.gallery_path)
            new_gallery = Gallery.from_entries(new_entries)
            self.entries = new_entries
            self.gallery = new_gallery


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        state: ServerState = self.server.state
        while True:
            try:
                msg_type, body = proto.read_frame(self.request)
            except ConnectionError:
                return
            except ProtocolError as exc:
                self._send_error(proto.ERR_MALFORMED, str(exc))
                return
            try:
                reply = self._dispatch(state, msg_type, body)
            except ProtocolError as exc:
                reply = proto.encode_error(proto.ERR_MALFORMED, str(exc))
            except DimensionError as exc:
                reply = proto.encode_error(proto.ERR_DIMENSION, str(exc))
            except Exception as exc:  # noqa: BLE001 - connection must survive
                reply = proto.encode_error(proto.ERR_GENERIC, str(exc))
            try:
                self.request.sendall(reply)
            except OSError:
                return

    def _send_error(self, code: int, message: str) -> None:
        try:
            self.request.sendall(proto.encode_error(code, message))
        except OSError:
            pass

    def _dispatch(self, state: ServerState, msg_type: int, body: bytes) -> bytes:
        if msg_type == proto.MSG_ENROLL:
            subject_id, name, vec = proto.decode_enroll(body)
            state.enroll(subject_id, name, vec)
            return proto.encode_ok()
        if msg_type == proto.MSG_IDENTIFY:
            k, vec = proto.decode_identify(body)
            gallery = state.gallery
            if gallery is None:
                return proto.encode_error(proto.ERR_EMPTY_GALLERY, "gallery is empty")
            results = identify(gallery, vec, max(k, 1))
            return proto.encode_ok(proto.encode_identify_result(results))
        if msg_type == proto.MSG_PARSE_TAGS:
            k, vec, image = proto.decode_parse_tags(body)
            models = state.parse_models
            if models is None:
                return proto.encode_error(proto.ERR_NO_FASHION,
                                          "no fashion gallery loaded")
            if image is None:
                ids, _ = models.fashion.index.knn(
                    vec, min(max(k, 1), models.fashion.index.size))
                tau = vote_tags([models.fashion.entries[i].tags for i in ids],
                                state.config.vote_min)
                tags = sorted(tau - {"skin", "hair", "null"})
                return proto.encode_ok(proto.encode_tags_result(tags, None))
            result, colors = parse_query(image.rgb, image.pose2d, image.mask, vec,
                                         models, state.config)
            tags = sorted(result.tau - {"skin", "hair", "null"})
            return proto.encode_ok(proto.encode_tags_result(tags, colors))
        return proto.encode_error(proto.ERR_GENERIC, f"unknown message type {msg_type}")


class ReidServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], state: ServerState):
        super().__init__(address, _Handler)
        self.state = state


def serve(gallery_path: str | Path, host: str = "127.0.0.1", port: int = 7643,
          parse_models: ParseModels | None = None,
          config: Config | None = None) -> ReidServer:
    """Build a server bound to (host, port); caller runs serve_forever()."""
    state = ServerState.create(gallery_path, parse_models, config)
    return ReidServer((host, port), state)
