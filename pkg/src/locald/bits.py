"""Bitstring helpers and the self-delimiting field codec.

Every value that travels as a node input or certificate is a Python ``str``
over the alphabet ``{'0', '1'}``; the empty string is the empty input.

Field lists are encoded as a sequence of ``gamma(len(field) + 1) + field``
chunks, where ``gamma`` is the Elias gamma code.  Records start with a tag
field so decoders can refuse a payload of the wrong kind.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .errors import CodecError

EMPTY = ""


def is_bitstring(s: object) -> bool:
    return isinstance(s, str) and all(c in "01" for c in s)


def check_bitstring(s: object, what: str = "value") -> str:
    if not is_bitstring(s):
        raise CodecError(f"{what} is not a bitstring: {s!r}")
    return s  # type: ignore[return-value]


def int_to_bits(n: int) -> str:
    """Minimal binary representation; ``0`` encodes as ``'0'``."""
    if n < 0:
        raise CodecError(f"negative integer {n}")
    return format(n, "b")


def bits_to_int(s: str) -> int:
    """Parse a canonical minimal-binary integer (no leading zeros)."""
    if not s or any(c not in "01" for c in s) or (len(s) > 1 and s[0] == "0"):
        raise CodecError(f"not a canonical binary integer: {s!r}")
    return int(s, 2)


def id_length(ident: int) -> int:
    """Bit length of an identity in minimal binary."""
    if ident < 1:
        raise CodecError(f"identities are positive integers, got {ident}")
    return ident.bit_length()


def gamma_encode(n: int) -> str:
    if n < 1:
        raise CodecError("Elias gamma encodes positive integers only")
    b = format(n, "b")
    return "0" * (len(b) - 1) + b


def gamma_decode(s: str, pos: int) -> tuple[int, int]:
    zeros = 0
    while pos + zeros < len(s) and s[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    if end > len(s):
        raise CodecError("truncated length prefix")
    return int(s[pos + zeros : end], 2), end


def encode_fields(fields: Iterable[str]) -> str:
    out = []
    for f in fields:
        check_bitstring(f, "field")
        out.append(gamma_encode(len(f) + 1))
        out.append(f)
    return "".join(out)


def decode_fields(s: str) -> list[str]:
    check_bitstring(s, "payload")
    fields = []
    pos = 0
    while pos < len(s):
        length, pos = gamma_decode(s, pos)
        length -= 1
        if pos + length > len(s):
            raise CodecError("truncated field")
        fields.append(s[pos : pos + length])
        pos += length
    return fields


def encode_ints(values: Iterable[int]) -> str:
    return encode_fields(int_to_bits(v) for v in values)


def decode_ints(s: str) -> list[int]:
    return [bits_to_int(f) for f in decode_fields(s)]


def encode_record(tag: int, fields: Sequence[str]) -> str:
    return encode_fields([int_to_bits(tag), *fields])


def decode_record(s: str, tag: int, arity: int | None = None) -> list[str]:
    fields = decode_fields(s)
    if not fields or fields[0] != int_to_bits(tag):
        raise CodecError(f"expected record tag {tag}")
    body = fields[1:]
    if arity is not None and len(body) != arity:
        raise CodecError(f"record tag {tag} expects {arity} fields, got {len(body)}")
    return body


# Record tags.  Stable: they are part of the wire format.
TAG_VIEW = 1
TAG_MAP_CERT = 2
TAG_CONTAINMENT_CERT = 3
TAG_COVER_INPUT = 4
TAG_FAMILY_EXPLICIT = 5
TAG_FAMILY_GENERATED = 6
TAG_PAIR = 7
TAG_CONFIG = 8
TAG_INPEQSIZE_CERT = 9


def encode_pair(a: str, b: str) -> str:
    return encode_record(TAG_PAIR, [a, b])


def decode_pair(s: str) -> tuple[str, str]:
    a, b = decode_record(s, TAG_PAIR, 2)
    return a, b


def all_bitstrings(max_len: int) -> list[str]:
    """All bitstrings of length ``0..max_len`` in length-then-lexicographic order."""
    out = [EMPTY]
    layer = [EMPTY]
    for _ in range(max_len):
        layer = [s + c for s in layer for c in "01"]
        out.extend(layer)
    return out
