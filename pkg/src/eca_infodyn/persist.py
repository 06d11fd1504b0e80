"""Reading and writing fields, classification tables, edge lists and manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import struct
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifier import ClassificationRecord, ExperimentConfig
from .coarse import TransitionGraph, Violation
from .rules import SpacetimeField, unpack_rows

FIELD_MAGIC = b"ECAF"
# magic, width, steps, flags (low byte = rule)
_HEADER = struct.Struct("<4sIII")

CLASSIFICATION_COLUMNS = (
    "representative", "wolfram_class", "te1_bits", "te_r_min", "te_r_max",
    "max_norm_change", "info_class", "chosen_symmetries",
)


def field_to_text(field: SpacetimeField) -> str:
    rows = field.to_array()
    return "".join("".join("01"[b] for b in row) + "\n" for row in rows)


def field_to_bytes(field: SpacetimeField) -> bytes:
    """16-byte header then each row packed little-endian, ``ceil(W/8)`` bytes."""
    nbytes = (field.width + 7) // 8
    header = _HEADER.pack(FIELD_MAGIC, field.width, field.n_steps, field.rule & 0xFF)
    return header + b"".join(w.to_bytes(nbytes, "little") for w in field.rows)


def field_from_bytes(data: bytes) -> np.ndarray:
    magic, width, steps, _flags = _HEADER.unpack_from(data)
    if magic != FIELD_MAGIC:
        raise ValueError("not a packed field file")
    nbytes = (width + 7) // 8
    body = data[_HEADER.size:]
    if len(body) != nbytes * (steps + 1):
        raise ValueError("truncated field file")
    words = [int.from_bytes(body[i:i + nbytes], "little") for i in range(0, len(body), nbytes)]
    return unpack_rows(words, width)


def _symmetry_cell(record: ClassificationRecord) -> str:
    return record.symmetry_single.name.lower() + "|" + ";".join(s.name.lower() for s in record.symmetries)


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def classification_csv(records: Sequence[ClassificationRecord]) -> str:
    # repr() gives the shortest round-tripping float text on every platform
    rows = [
        (r.representative, r.wolfram_class, repr(r.te1), repr(r.te_r_min), repr(r.te_r_max),
         repr(r.max_change), r.info_class, _symmetry_cell(r))
        for r in sorted(records, key=lambda r: r.representative)
    ]
    return _csv_text(CLASSIFICATION_COLUMNS, rows)


def single_cell_points_csv(records: Sequence[ClassificationRecord]) -> str:
    return _csv_text(("rule", "te_bits"), [(r.representative, repr(r.te1)) for r in records])


def random_points_csv(records: Sequence[ClassificationRecord]) -> str:
    """``<TE>`` on the first ensemble input of each rule."""
    return _csv_text(("rule", "te_bits"), [(r.representative, repr(r.te_r[0])) for r in records])


def change_points_csv(records: Sequence[ClassificationRecord]) -> str:
    return _csv_text(
        ("rule", "te1_bits", "max_norm_change"),
        [(r.representative, repr(r.te1), repr(r.max_change)) for r in records],
    )


def read_classification(path) -> dict[int, str]:
    with open(path, newline="") as fh:
        return {int(row["representative"]): row["info_class"] for row in csv.DictReader(fh)}


def edge_list_text(graph: TransitionGraph, show_zero: bool = False) -> str:
    lines = ["rep_a,rep_b,N,projection_bits"]
    lines += [m.as_row() for m in graph.witnesses(show_zero)]
    return "\n".join(lines) + "\n"


def read_edge_list(path) -> list[tuple[int, int, int, str]]:
    with open(path, newline="") as fh:
        return [
            (int(r["rep_a"]), int(r["rep_b"]), int(r["N"]), r["projection_bits"])
            for r in csv.DictReader(fh)
        ]


def hierarchy_report(graph: TransitionGraph, violations: Sequence[Violation],
                     classification: dict[int, str]) -> str:
    edges = graph.edge_list(show_zero=True, self_loops=False)
    same = sum(classification[a] == classification[b] for a, b in edges)
    lines = [
        f"edges (excluding self-loops): {len(edges)}",
        f"within one class: {same}",
        f"down the hierarchy: {len(edges) - same - len(violations)}",
        f"{len(violations)} violations",
    ]
    lines += [f"  {v.source} ({v.source_class}) -> {v.target} ({v.target_class})" for v in violations]
    return "\n".join(lines) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)


def config_from_dict(data: dict) -> ExperimentConfig:
    from .classifier import ClassificationThresholds
    from .entropy import TEConfig

    data = dict(data)
    data["te_config"] = TEConfig(**data["te_config"])
    data["thresholds"] = ClassificationThresholds(**data["thresholds"])
    return ExperimentConfig(**data)


def write_text(path: Path, text: str) -> str:
    path.write_text(text)
    return sha256_text(text)


def write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text())
