"""Sweep, table, and trace files."""

import csv
import enum
import gzip
import io
import json
import math
import pathlib

import numpy

from . import _compatibility
from .response import FrequencySweep

if _compatibility.pyzstd_version is not None:
    import pyzstd


def _compression_from_suffix(suffix):
    if suffix == ".gz":
        return gzip
    elif suffix == ".zst":
        if _compatibility.pyzstd_version is None:
            raise ModuleNotFoundError("pyzstd needed for zstd compression")
        return pyzstd
    else:
        return None


def _write_text(filename, text):
    """Write text, compressing by suffix."""
    compression = _compression_from_suffix(pathlib.Path(filename).suffix)
    data = text.encode("utf-8")
    if compression is gzip:
        # no name and a fixed mtime in the header
        with open(filename, "wb") as raw, gzip.GzipFile(
            filename="", mode="wb", fileobj=raw, mtime=0
        ) as f:
            f.write(data)
    elif compression is not None:
        with compression.open(filename, "wb") as f:
            f.write(data)
    else:
        with open(filename, "wb") as f:
            f.write(data)


def _open_text(filename):
    """Open a file for reading text, decompressing by suffix."""
    compression = _compression_from_suffix(pathlib.Path(filename).suffix)
    if compression:
        return io.TextIOWrapper(compression.open(filename, "rb"), encoding="utf-8")
    else:
        return open(filename, encoding="utf-8")


def _jsonable(value):
    """Convert a value to something JSON can write without extensions."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, numpy.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, numpy.bool_)):
        return bool(value)
    if isinstance(value, (int, numpy.integer)):
        return int(value)
    if isinstance(value, (float, numpy.floating)):
        v = float(value)
        if math.isfinite(v):
            return v
        return repr(v)
    return value


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, (list, tuple)):
        return ";".join(_format_cell(v) for v in value)
    if isinstance(value, (bool, numpy.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, numpy.floating)):
        return repr(float(value))
    return str(value)


def _parse_cell(text):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def format_json(record):
    """Format a record as indented JSON text with non-finite values as strings."""
    return json.dumps(_jsonable(record), indent=2)


def write_json(filename, record):
    """Write a record as JSON.

    Infinite values are written as the string ``"inf"`` so the file stays
    standard JSON.

    Parameters
    ----------
    filename : str
        Path to the file.
    record : dict or list
        Record to write. Field order is preserved.

    """
    _write_text(filename, format_json(record) + "\n")


class SweepFile:
    """Frequency sweep stored as two-column CSV.

    The file starts with ``#``-prefixed metadata lines of the form
    ``# key: value`` (values encoded as JSON), then the header
    ``frequency_hz,amplitude``, then one row per point. Files ending in
    ``.gz`` or ``.zst`` are compressed.

    Parameters
    ----------
    filename : str
        Path to the file.

    """

    header = ("frequency_hz", "amplitude")

    def __init__(self, filename):
        self.filename = filename

    @classmethod
    def create(cls, filename, sweep):
        """Create a sweep file.

        Parameters
        ----------
        filename : str
            Path to the file.
        sweep : :class:`~cantileverq.FrequencySweep`
            Sweep to write.

        Returns
        -------
        :class:`SweepFile`
            The object representing the new file.

        """
        lines = []
        for key, value in sweep.metadata.items():
            lines.append(f"# {key}: {json.dumps(_jsonable(value))}")
        lines.append(",".join(cls.header))
        for f, a in sweep.points:
            lines.append(f"{f!r},{a!r}")
        _write_text(filename, "\n".join(lines) + "\n")
        return SweepFile(filename)

    @property
    def filename(self):
        """str: Path to the file."""
        return self._filename

    @filename.setter
    def filename(self, value):
        _compression_from_suffix(pathlib.Path(value).suffix)
        self._filename = value

    def read(self):
        """Read the sweep.

        Returns
        -------
        :class:`~cantileverq.FrequencySweep`
            The sweep.

        Raises
        ------
        OSError
            If the header line is missing or a row is malformed.

        """
        metadata = {}
        frequency = []
        amplitude = []
        seen_header = False
        with _open_text(self.filename) as f:
            for line_num, line in enumerate(f, start=1):
                line = line.strip()
                if len(line) == 0:
                    continue
                if line.startswith("#"):
                    key, sep, value = line[1:].partition(":")
                    if not sep:
                        continue
                    value = value.strip()
                    try:
                        metadata[key.strip()] = json.loads(value)
                    except json.JSONDecodeError:
                        metadata[key.strip()] = value
                    continue
                if not seen_header:
                    if tuple(c.strip() for c in line.split(",")) != self.header:
                        raise OSError(
                            f"Line {line_num}: expected header "
                            f"{','.join(self.header)!r}"
                        )
                    seen_header = True
                    continue
                row = line.split(",")
                if len(row) != 2:
                    raise OSError(f"Line {line_num}: expected 2 columns")
                try:
                    frequency.append(float(row[0]))
                    amplitude.append(float(row[1]))
                except ValueError:
                    raise OSError(f"Line {line_num}: could not parse numbers")
        if not seen_header:
            raise OSError("Sweep file has no header")
        return FrequencySweep(frequency, amplitude, metadata=metadata)


class TableFile:
    """Table of records stored as CSV or as a JSON array.

    The format is chosen by the suffix: ``.json`` for JSON, anything else
    for CSV. Columns keep the order of the fields in the first record.

    Parameters
    ----------
    filename : str
        Path to the file.

    """

    def __init__(self, filename):
        self.filename = filename

    @staticmethod
    def _is_json(filename):
        return pathlib.Path(filename).suffix == ".json"

    @classmethod
    def create(cls, filename, records):
        """Create a table file.

        Parameters
        ----------
        filename : str
            Path to the file.
        records : list
            Records as dicts, or objects with a ``to_dict`` method.

        Returns
        -------
        :class:`TableFile`
            The object representing the new file.

        """
        records = [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in records]
        if cls._is_json(filename):
            write_json(filename, records)
            return TableFile(filename)

        fields = []
        for r in records:
            for key in r:
                if key not in fields:
                    fields.append(key)
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow({key: _format_cell(r.get(key)) for key in fields})
        _write_text(filename, buffer.getvalue())
        return TableFile(filename)

    def read(self):
        """Read the records.

        Numbers are parsed from CSV cells where possible, and empty cells
        become ``None``.

        Returns
        -------
        list of dict
            The records.

        """
        with _open_text(self.filename) as f:
            if self._is_json(self.filename):
                return json.load(f)
            reader = csv.DictReader(f)
            return [
                {key: _parse_cell(value) for key, value in row.items()}
                for row in reader
            ]


class TraceFile:
    """Optimizer trace stored as JSON lines.

    Parameters
    ----------
    filename : str
        Path to the file.

    """

    def __init__(self, filename):
        self.filename = filename

    @classmethod
    def create(cls, filename, entries):
        """Create a trace file with one JSON object per line."""
        lines = []
        for e in entries:
            record = e.to_dict() if hasattr(e, "to_dict") else dict(e)
            lines.append(json.dumps(_jsonable(record)))
        _write_text(filename, "".join(line + "\n" for line in lines))
        return TraceFile(filename)

    def __iter__(self):
        with _open_text(self.filename) as f:
            for line in f:
                if len(line.strip()) > 0:
                    yield json.loads(line)

    def read(self):
        """list of dict: All trace entries."""
        return list(self)
