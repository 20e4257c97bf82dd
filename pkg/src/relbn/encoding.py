"""Fixed-width binary index of a tuple, rendered in hexadecimal.

Each attribute contributes ``ceil(log2(|domain|))`` bits holding the value's
position in the declared domain order; fields are concatenated in scheme
order and the result is zero-padded to whole hex digits.
"""
from __future__ import annotations

from typing import Sequence

from .exceptions import SchemaError


def bit_width(domain_size: int) -> int:
    return (domain_size - 1).bit_length()


def encode_index(values: Sequence, domains: Sequence[Sequence]) -> str:
    """
    >>> encode_index((1, -1, 1), [(-1, 1)] * 3)
    '5'
    >>> encode_index((1, -1, 0, -1), [(-1, 0, 1), (-1, 1), (-1, 0, 1), (-1, 1)])
    '22'
    """
    values = tuple(values)
    if len(values) != len(domains):
        raise SchemaError(f"tuple has {len(values)} values for {len(domains)} attributes")
    code = 0
    nbits = 0
    for v, dom in zip(values, domains):
        dom = tuple(dom)
        try:
            pos = dom.index(v)
        except ValueError:
            raise SchemaError(f"value {v!r} is not in domain {list(dom)}") from None
        w = bit_width(len(dom))
        code = (code << w) | pos
        nbits += w
    digits = max(1, -(-nbits // 4))
    return format(code, f"0{digits}x")


def decode_index(index: str, domains: Sequence[Sequence]) -> tuple:
    """Inverse of :func:`encode_index`."""
    widths = [bit_width(len(d)) for d in domains]
    nbits = sum(widths)
    digits = max(1, -(-nbits // 4))
    if len(index) != digits:
        raise SchemaError(f"index {index!r} should have {digits} hex digits")
    code = int(index, 16)
    if code >> nbits:
        raise SchemaError(f"index {index!r} has bits beyond the encoded width")
    out = []
    shift = nbits
    for w, dom in zip(widths, domains):
        shift -= w
        pos = (code >> shift) & ((1 << w) - 1)
        if pos >= len(dom):
            raise SchemaError(f"index {index!r} encodes an out-of-domain position")
        out.append(tuple(dom)[pos])
    return tuple(out)
