"""IPv4 addresses, record files, and record streams.

An address is four octets; its canonical integer form is the 32-bit value
a*2**24 + b*2**16 + c*2**8 + d, which is also the order used everywhere for
tie-breaking. Bulk work happens on numpy uint32 arrays; the IPv4Address
tuple appears only at API edges (parsing, results).

Two record file formats are supported:

* text: UTF-8 lines, LF or CRLF, one record per line, blank lines skipped.
  The dotted quad must come first; anything after it on the line
  (whitespace-separated attributes) is ignored.
* binary: 8-byte header = magic "IPR1" plus a 4-byte little-endian record
  count, then that many 4-byte little-endian address words.

Text files that contain nothing but plain ``a.b.c.d`` lines are decoded on
a vectorized path; any other content falls back to a per-line parser with
exact error positions. Both paths produce identical addresses.
"""

from __future__ import annotations

import io
from typing import BinaryIO, Iterator, NamedTuple

import numpy as np

from .errors import (
    BinaryFormatError,
    MalformedAddress,
    OctetOutOfRange,
    SourceNotReplayable,
)

BINARY_MAGIC = b"IPR1"

# Tuning knobs, not contracts: how much text is decoded per read and how
# many records a binary/array batch carries.
TEXT_CHUNK_BYTES = 8 << 20
BATCH_RECORDS = 1 << 20

_LF = 0x0A
_CR = 0x0D
_DOT = 0x2E
_DIGIT0 = 0x30


class IPv4Address(NamedTuple):
    """One dotted-quad address, octet per field."""

    a: int
    b: int
    c: int
    d: int

    def __str__(self) -> str:
        return f"{self.a}.{self.b}.{self.c}.{self.d}"


class Prefix24(NamedTuple):
    """The first three octets of an address (one /24 network)."""

    a: int
    b: int
    c: int


def to_u32(addr: IPv4Address) -> int:
    """Canonical 32-bit integer form; monotone in octet order."""
    return (addr.a << 24) | (addr.b << 16) | (addr.c << 8) | addr.d


def from_u32(value: int) -> IPv4Address:
    return IPv4Address((value >> 24) & 0xFF, (value >> 16) & 0xFF, (value >> 8) & 0xFF, value & 0xFF)


def format_dotted(addr: IPv4Address) -> str:
    """Canonical text form, no zero padding."""
    return str(addr)


def prefix24(addr: IPv4Address) -> Prefix24:
    return Prefix24(addr.a, addr.b, addr.c)


def parse_dotted(text: str) -> IPv4Address:
    """Parse the leading dotted quad of a record line.

    Whitespace-separated content after the fourth part is ignored, so full
    flow-record lines parse their address. Leading zeros in a part are
    accepted; values above 255 raise OctetOutOfRange.
    """
    fields = text.split(None, 1)
    if not fields:
        raise MalformedAddress("empty record")
    parts = fields[0].split(".")
    if len(parts) != 4:
        raise MalformedAddress(f"expected 4 dot-separated parts, got {len(parts)!r} in {fields[0]!r}")
    octets = []
    for part in parts:
        if not part or not part.isascii() or not part.isdigit():
            raise MalformedAddress(f"non-numeric part {part!r} in {fields[0]!r}")
        value = int(part)
        if value > 255:
            raise OctetOutOfRange(f"part {part!r} exceeds 255 in {fields[0]!r}")
        octets.append(value)
    return IPv4Address(*octets)


class RecordStream:
    """Single-consumer stream of addresses from one pass over a source.

    ``batches()`` yields uint32 arrays in file order; ``addresses()`` is the
    per-record view built on top of it. ``records_read`` counts yielded
    records, ``malformed_skipped`` counts records dropped in lenient mode.
    """

    def __init__(self, batches: Iterator[np.ndarray]):
        self._batches = batches
        self.records_read = 0
        self.malformed_skipped = 0
        self._consumed = False

    def batches(self) -> Iterator[np.ndarray]:
        if self._consumed:
            raise RuntimeError("RecordStream is single-consumer and was already read")
        self._consumed = True
        for batch in self._batches:
            self.records_read += batch.size
            yield batch

    def addresses(self) -> Iterator[IPv4Address]:
        for batch in self.batches():
            for value in batch.tolist():
                yield from_u32(value)

    def read_all(self) -> np.ndarray:
        """Drain the stream into one uint32 array."""
        parts = list(self.batches())
        if not parts:
            return np.empty(0, dtype=np.uint32)
        return np.concatenate(parts)


def open_stream(
    path,
    fmt: str = "auto",
    lenient: bool = False,
    batch_records: int = BATCH_RECORDS,
) -> RecordStream:
    """Open a record file as a stream of addresses.

    fmt is "text", "binary", or "auto" (sniff the binary magic). In strict
    mode (default) the first malformed entry raises with its line number;
    in lenient mode malformed lines are counted and skipped.
    """
    if fmt not in ("auto", "text", "binary"):
        raise ValueError(f"unknown format {fmt!r}")
    handle = open(path, "rb")
    try:
        head = handle.read(4)
        handle.seek(0)
        if fmt == "auto":
            fmt = "binary" if head == BINARY_MAGIC else "text"
    except Exception:
        handle.close()
        raise
    stream = RecordStream(iter(()))
    if fmt == "binary":
        stream._batches = _binary_batches(handle, lenient, batch_records)
    else:
        stream._batches = _text_batches(handle, stream, lenient)
    return stream


def stream_from_array(values: np.ndarray, batch_records: int = BATCH_RECORDS) -> RecordStream:
    arr = np.asarray(values, dtype=np.uint32)
    return RecordStream(arr[i : i + batch_records] for i in range(0, max(arr.size, 1), batch_records))


def _binary_batches(handle: BinaryIO, lenient: bool, batch_records: int) -> Iterator[np.ndarray]:
    with handle:
        header = handle.read(8)
        if len(header) < 8 or header[:4] != BINARY_MAGIC:
            raise BinaryFormatError("missing IPR1 magic header")
        remaining = int.from_bytes(header[4:8], "little")
        while remaining:
            take = min(batch_records, remaining)
            data = handle.read(4 * take)
            if len(data) < 4 * take:
                raise BinaryFormatError(f"truncated body: {remaining} of the declared records missing")
            remaining -= take
            yield np.frombuffer(data, dtype="<u4").astype(np.uint32, copy=False)
        if not lenient and handle.read(1):
            raise BinaryFormatError("trailing bytes after the declared record count")


def write_binary(path, addresses: np.ndarray) -> None:
    """Write addresses in the binary record format."""
    arr = np.asarray(addresses, dtype=np.uint32)
    if arr.size > 0xFFFFFFFF:
        raise ValueError("binary format caps the record count at 2**32 - 1")
    with open(path, "wb") as handle:
        handle.write(BINARY_MAGIC)
        handle.write(int(arr.size).to_bytes(4, "little"))
        handle.write(arr.astype("<u4", copy=False).tobytes())


def _text_batches(handle: BinaryIO, stream: RecordStream, lenient: bool) -> Iterator[np.ndarray]:
    with handle:
        line_base = 0
        carry = b""
        while True:
            chunk = handle.read(TEXT_CHUNK_BYTES)
            if not chunk:
                break
            chunk = carry + chunk
            cut = chunk.rfind(b"\n")
            if cut < 0:
                carry = chunk
                continue
            carry = chunk[cut + 1 :]
            arr, lines = _parse_text_block(chunk[: cut + 1], line_base, lenient, stream)
            line_base += lines
            if arr.size:
                yield arr
        if carry:
            # final record without a trailing newline
            arr, _ = _parse_text_block(carry + b"\n", line_base, lenient, stream)
            if arr.size:
                yield arr


def _parse_text_block(block: bytes, line_base: int, lenient: bool, stream: RecordStream):
    """Parse whole lines; returns (uint32 array, line count)."""
    raw = np.frombuffer(block, dtype=np.uint8)
    hist = np.bincount(raw, minlength=256)
    lines = int(hist[_LF])
    if hist[_CR]:
        raw = raw[raw != _CR]
        hist[_CR] = 0
    allowed = int(hist[_LF] + hist[_DOT] + hist[_DIGIT0 : _DIGIT0 + 10].sum())
    if allowed == int(hist.sum()):
        arr = _parse_pure_block(raw, line_base, lenient, stream)
        if arr is not None:
            return arr, lines
    return _parse_lines(block, line_base, lenient, stream), lines


def _parse_pure_block(raw: np.ndarray, line_base: int, lenient: bool, stream: RecordStream):
    """Vectorized decode of blocks holding only plain dotted-quad lines.

    Returns None when the separator structure is not exactly four parts per
    line of one to three digits each; the caller then re-parses the block
    line by line (which also produces the precise diagnostics).
    """
    seps = np.flatnonzero((raw == _DOT) | (raw == _LF))
    if seps.size == 0 or seps.size % 4:
        return None
    shape = seps.reshape(-1, 4)
    kinds = raw[shape]
    if (kinds[:, :3] != _DOT).any() or (kinds[:, 3] != _LF).any():
        return None
    starts = np.empty_like(seps)
    starts[0] = 0
    starts[1:] = seps[:-1] + 1
    width = seps - starts
    if width.min() < 1 or width.max() > 3:
        return None
    values = (raw[starts] - _DIGIT0).astype(np.uint32)
    two = width >= 2
    if two.any():
        values[two] = values[two] * 10 + (raw[starts[two] + 1] - _DIGIT0)
    three = width == 3
    if three.any():
        values[three] = values[three] * 10 + (raw[starts[three] + 2] - _DIGIT0)
    if (values > 255).any():
        if not lenient:
            bad = int(np.argmax(values > 255)) // 4
            raise OctetOutOfRange("dotted-quad part exceeds 255", line_number=line_base + bad + 1)
        good = (values <= 255).reshape(-1, 4).all(axis=1)
        stream.malformed_skipped += int((~good).sum())
        values = values.reshape(-1, 4)[good].ravel()
    return (values[0::4] << 24) | (values[1::4] << 16) | (values[2::4] << 8) | values[3::4]


def _parse_lines(block: bytes, line_base: int, lenient: bool, stream: RecordStream) -> np.ndarray:
    out = []
    text = block.decode("utf-8", errors="replace")
    for offset, line in enumerate(text.split("\n")):
        line = line.strip()
        if not line:
            continue
        try:
            out.append(to_u32(parse_dotted(line)))
        except MalformedAddress as exc:
            if lenient:
                stream.malformed_skipped += 1
                continue
            raise type(exc)(exc.args[0], line_number=line_base + offset + 1) from None
    return np.array(out, dtype=np.uint32)


class FileSource:
    """Replayable record source backed by a file path.

    ``open()`` starts a fresh pass and bumps ``replays``; multi-pass
    counters call it once per subset.
    """

    replayable = True

    def __init__(self, path, fmt: str = "auto", lenient: bool = False, batch_records: int = BATCH_RECORDS):
        self.path = path
        self.fmt = fmt
        self.lenient = lenient
        self.batch_records = batch_records
        self.replays = 0

    def open(self) -> RecordStream:
        self.replays += 1
        return open_stream(self.path, self.fmt, self.lenient, self.batch_records)


class ArraySource:
    """Replayable record source over an in-memory uint32 array."""

    replayable = True

    def __init__(self, addresses: np.ndarray, batch_records: int = BATCH_RECORDS):
        self._values = np.ascontiguousarray(addresses, dtype=np.uint32)
        self.batch_records = batch_records
        self.replays = 0

    def open(self) -> RecordStream:
        self.replays += 1
        return stream_from_array(self._values, self.batch_records)


class SingleUseSource:
    """Adapter around one open RecordStream; cannot be replayed."""

    replayable = False

    def __init__(self, stream: RecordStream):
        self._stream = stream

    def open(self) -> RecordStream:
        if self._stream is None:
            raise SourceNotReplayable("this source has already been consumed")
        stream, self._stream = self._stream, None
        return stream


def read_source(source) -> np.ndarray:
    """Drain one pass of a source into a single uint32 array."""
    return source.open().read_all()
