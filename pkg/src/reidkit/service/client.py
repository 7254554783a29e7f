"""Blocking client for the re-identification service."""

from __future__ import annotations

import socket
from contextlib import contextmanager

import numpy as np

from reidkit.errors import ProtocolError
from reidkit.service import protocol as proto


class ServerError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(f"server error {code}: {message}")
        self.code = code
        self.message = message


@contextmanager
def connect(host: str, port: int, timeout: float = 30.0):
    sock = socket.create_connection((host, port), timeout=timeout)
    try:
        yield sock
    finally:
        sock.close()


def _roundtrip(sock, frame: bytes) -> bytes:
    sock.sendall(frame)
    msg_type, body = proto.read_frame(sock)
    if msg_type == proto.MSG_ERROR:
        code, message = proto.decode_error(body)
        raise ServerError(code, message)
    if msg_type != proto.MSG_OK:
        raise ProtocolError(f"unexpected reply type {msg_type}")
    return body


def enroll(host: str, port: int, subject_id: int, name: str,
           descriptor: np.ndarray) -> None:
    with connect(host, port) as sock:
        _roundtrip(sock, proto.encode_enroll(subject_id, name, descriptor))


def identify(host: str, port: int, descriptor: np.ndarray,
             k: int = 5) -> list[tuple[int, str, float]]:
    with connect(host, port) as sock:
        body = _roundtrip(sock, proto.encode_identify(descriptor, k))
    return proto.decode_identify_result(body)


def parse_tags(host: str, port: int, descriptor: np.ndarray, k: int = 25,
               image: proto.ImagePayload | None = None,
               ) -> tuple[list[str], dict[str, str] | None]:
    with connect(host, port) as sock:
        body = _roundtrip(sock, proto.encode_parse_tags(descriptor, k, image))
    return proto.decode_tags_result(body)
