"""
Constellation file format: JSON header fields plus [re, im] matrix entries
"""

import json
from pathlib import Path
from typing import Any, Dict

import numpy as np

from ..utils.exceptions import ConstellationFormatError, ValidationError
from .constellation import Constellation, ConstellationForm


class ConstellationSerializer:
    """Reads and writes the structured-text constellation format"""

    @staticmethod
    def serialize(c: Constellation) -> bytes:
        """
        Encode a constellation.

        Floats are written with repr precision (17 significant digits), so
        deserialize(serialize(c)) reproduces every entry bit for bit.
        """
        elements = [
            [[[float(z.real), float(z.imag)] for z in row] for row in mat]
            for mat in c.elements
        ]
        document = {
            "format": c.form.value,
            "T": c.T,
            "M": c.M,
            "L": c.L,
            "elements": elements,
        }
        return json.dumps(document).encode("utf-8")

    @staticmethod
    def deserialize(data: bytes) -> Constellation:
        """Decode a constellation; errors name the offending field"""
        try:
            document = json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ConstellationFormatError(f"document: not valid JSON ({e})") from e
        if not isinstance(document, dict):
            raise ConstellationFormatError("document: top level must be an object")

        form = ConstellationSerializer._field(document, "format")
        if form not in (ConstellationForm.SPECIAL.value, ConstellationForm.GENERAL.value):
            raise ConstellationFormatError(f"format: expected 'special' or 'general', got {form!r}")
        T = ConstellationSerializer._positive_int(document, "T")
        M = ConstellationSerializer._positive_int(document, "M")
        L = ConstellationSerializer._positive_int(document, "L", allow_zero=True)
        raw = ConstellationSerializer._field(document, "elements")
        if not isinstance(raw, list) or not raw:
            raise ConstellationFormatError("elements: empty element list")
        if len(raw) != L:
            raise ConstellationFormatError(f"L: header says {L} but {len(raw)} elements follow")

        rows = T if form == ConstellationForm.GENERAL.value else M
        elements = np.empty((L, rows, M), dtype=complex)
        for k, mat in enumerate(raw):
            try:
                arr = np.asarray(mat, dtype=float)
            except (TypeError, ValueError) as e:
                raise ConstellationFormatError(f"elements[{k}]: entries must be [re, im] pairs") from e
            if arr.shape != (rows, M, 2):
                raise ConstellationFormatError(
                    f"elements[{k}]: expected {rows}x{M} [re, im] pairs, got shape {arr.shape}"
                )
            elements[k] = arr[..., 0] + 1j * arr[..., 1]
        if not np.all(np.isfinite(elements)):
            raise ConstellationFormatError("elements: entries must be finite")

        try:
            return Constellation(ConstellationForm(form), T, M, elements)
        except ValidationError as e:
            raise ConstellationFormatError(str(e)) from e

    @staticmethod
    def _field(document: Dict[str, Any], name: str) -> Any:
        if name not in document:
            raise ConstellationFormatError(f"{name}: missing field")
        return document[name]

    @staticmethod
    def _positive_int(document: Dict[str, Any], name: str, allow_zero: bool = False) -> int:
        value = ConstellationSerializer._field(document, name)
        if isinstance(value, bool) or not isinstance(value, int) or value < (0 if allow_zero else 1):
            raise ConstellationFormatError(f"{name}: expected a positive integer, got {value!r}")
        return value

    @staticmethod
    def save(c: Constellation, path: str):
        """Write a constellation file"""
        Path(path).write_bytes(ConstellationSerializer.serialize(c))

    @staticmethod
    def load(path: str) -> Constellation:
        """Read a constellation file"""
        try:
            data = Path(path).read_bytes()
        except OSError as e:
            raise ValidationError(f"in: cannot read {path} ({e})") from e
        return ConstellationSerializer.deserialize(data)


def serialize(c: Constellation) -> bytes:
    """Encode a constellation to bytes"""
    return ConstellationSerializer.serialize(c)


def deserialize(data: bytes) -> Constellation:
    """Decode a constellation from bytes"""
    return ConstellationSerializer.deserialize(data)


# Global serializer instance
constellation_serializer = ConstellationSerializer()
