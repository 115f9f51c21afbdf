"""JSON input documents and report rendering.

Exact scalars are strings "p/q" or "p/q+r/s i"; floats are written with 17
significant digits, so both backends round-trip losslessly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cohomology import LocalSystem, SkyscraperDatum
from .config import DEFAULT, Config
from .errors import GroupError, InputError, L2Error
from .groups import AbelianRank, FiniteGroup, cyclic_group, dihedral_group, symmetric_group, trivial_group
from .numeric import GaussianRational, Matrix, format_float, format_scalar, parse_scalar
from .surface import CoveringDatum, SurfaceData, validate_covering

CONFIG_KEYS = {
    "backend": "backend",
    "tolerance": "tol",
    "order_cap": "order_cap",
    "cluster_tol": "cluster_tol",
    "seed": "seed",
    "samples": "samples",
    "n_max": "n_max",
    "series_terms": "series_terms",
}


def _fail(path: str, msg: str, cls=InputError):
    raise cls(f"{path}: {msg}")


# ---------------------------------------------------------------- groups

def _square_table(raw):
    """Nested rows or a flat row-major list of n*n indices."""
    if not isinstance(raw, list) or not raw:
        raise GroupError("cayley table must be a non-empty list")
    if all(isinstance(r, list) for r in raw):
        return tuple(tuple(int(x) for x in r) for r in raw)
    n = round(len(raw) ** 0.5)
    if n * n != len(raw):
        raise GroupError(f"flat cayley table has {len(raw)} entries, not a square")
    return tuple(tuple(int(x) for x in raw[i * n:(i + 1) * n]) for i in range(n))


def build_group(spec: dict, path: str = "$.cover.group"):
    if isinstance(spec, dict) and "type" not in spec:
        # bare {"cayley": [...]} or {"perms": [...]}
        for key in ("cayley", "perms"):
            if key in spec:
                spec = {**spec, "type": key}
    if not isinstance(spec, dict) or "type" not in spec:
        _fail(path, "group needs a 'type'")
    kind = spec["type"]
    try:
        if kind == "trivial":
            return trivial_group()
        if kind == "cyclic":
            return cyclic_group(int(spec["order"]))
        if kind == "dihedral":
            return dihedral_group(int(spec["n"]))
        if kind == "symmetric":
            return symmetric_group(int(spec["n"]))
        if kind in ("perms", "permutations"):
            gens = spec["perms"] if "perms" in spec else spec["generators"]
            return FiniteGroup.from_permutations(gens, spec.get("name", ""))
        if kind in ("cayley", "table"):
            return FiniteGroup(_square_table(spec["cayley"] if "cayley" in spec else spec["table"]),
                               spec.get("name", ""))
        if kind == "free_abelian":
            return AbelianRank(int(spec["rank"]))
    except KeyError as exc:
        _fail(path, f"missing field {exc.args[0]!r}")
    except GroupError as exc:
        _fail(path, f"bad group table: {exc}", GroupError)
    _fail(path, f"unknown group type {kind!r}")


def _element(group, value, path: str):
    if isinstance(group, AbelianRank):
        if not isinstance(value, list):
            _fail(path, "free abelian images are integer vectors")
        return tuple(int(v) for v in value)
    if isinstance(value, list):
        perms = getattr(group, "perms", None)
        if perms is None or tuple(value) not in perms:
            _fail(path, f"permutation {value} is not an element of the group")
        return perms.index(tuple(value))
    if not isinstance(value, int) or not 0 <= value < group.order:
        _fail(path, f"element index {value!r} out of range")
    return value


# ---------------------------------------------------------------- document

@dataclass(eq=False)
class InputDocument:
    surface: SurfaceData
    matrices: Optional[tuple] = None  # in generator order
    rank: int = 1
    group_spec: Optional[dict] = None
    images: Optional[tuple] = None
    skyscraper: Optional[dict] = None
    experiments: tuple = ()
    config: Config = DEFAULT
    system: Optional[LocalSystem] = field(default=None, repr=False)
    cover: Optional[CoveringDatum] = field(default=None, repr=False)

    def __eq__(self, other):
        if not isinstance(other, InputDocument):
            return NotImplemented
        same_mats = (self.matrices is None) == (other.matrices is None) and (
            self.matrices is None or (len(self.matrices) == len(other.matrices)
                                      and all(a.equals(b) for a, b in zip(self.matrices, other.matrices))))
        return (same_mats and self.surface == other.surface and self.rank == other.rank
                and self.group_spec == other.group_spec and self.images == other.images
                and self.skyscraper == other.skyscraper and self.experiments == other.experiments
                and self.config == other.config)


def _parse_config(block, path="$.config") -> Config:
    if block is None:
        return DEFAULT
    if not isinstance(block, dict):
        _fail(path, "config must be an object")
    kw = {}
    for key, value in block.items():
        if key not in CONFIG_KEYS:
            _fail(f"{path}.{key}", "unknown config key")
        kw[CONFIG_KEYS[key]] = value
    try:
        return DEFAULT.with_(**kw)
    except (ValueError, TypeError) as exc:
        _fail(path, str(exc))


def _parse_surface(block, path="$.surface") -> SurfaceData:
    if not isinstance(block, dict) or "genus" not in block:
        _fail(path, "surface needs 'genus' and 'punctures'")
    genus = block["genus"]
    punctures = block.get("punctures", 0)
    if not isinstance(genus, int) or genus < 0:
        _fail(f"{path}.genus", "genus must be a non-negative integer")
    if not isinstance(punctures, (int, list)):
        _fail(f"{path}.punctures", "punctures must be a count or a list of labels")
    return SurfaceData.make(genus, punctures)


def _parse_matrix(rows, exact: bool, tol: float, path: str) -> Matrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        _fail(path, "matrix must be a non-empty list of rows")
    try:
        return Matrix.from_rows(rows, exact, tol)
    except InputError as exc:
        _fail(path, str(exc))


def _parse_system(block, surface: SurfaceData, config: Config, path="$.local_system"):
    if not isinstance(block, dict):
        _fail(path, "local_system must be an object")
    names = surface.generator_names
    if block.get("trivial"):
        rank = block.get("rank", 1)
        if not isinstance(rank, int) or rank < 1:
            _fail(f"{path}.rank", "rank must be a positive integer")
        return tuple(Matrix.identity(rank, config.exact, config.tol) for _ in names), rank
    mats_block = block.get("matrices", {})
    if isinstance(mats_block, list):
        if len(mats_block) != len(names):
            _fail(f"{path}.matrices", f"expected {len(names)} matrices, got {len(mats_block)}")
        raw = dict(zip(names, mats_block))
    elif isinstance(mats_block, dict):
        extra = set(mats_block) - set(names)
        if extra:
            _fail(f"{path}.matrices", f"unknown generators {sorted(extra)}")
        missing = [n for n in names if n not in mats_block]
        if missing:
            _fail(f"{path}.matrices", f"missing matrices for {missing}")
        raw = mats_block
    else:
        _fail(f"{path}.matrices", "matrices must be a list or an object keyed by generator")
    mats = tuple(_parse_matrix(raw[n], config.exact, config.tol, f"{path}.matrices.{n}") for n in names)
    rank = int(block.get("rank", mats[0].rows if mats else 1))
    return mats, rank


def _parse_cover(block, surface: SurfaceData, path="$.cover"):
    if not isinstance(block, dict):
        _fail(path, "cover must be an object")
    spec = block.get("group")
    group = build_group(spec, f"{path}.group")
    images_block = block.get("images", {})
    names = surface.generator_names
    if isinstance(images_block, list):
        if len(images_block) != len(names):
            _fail(f"{path}.images", f"expected {len(names)} images, got {len(images_block)}")
        raw = dict(zip(names, images_block))
    elif isinstance(images_block, dict):
        missing = [n for n in names if n not in images_block]
        if missing:
            _fail(f"{path}.images", f"missing images for {missing}")
        raw = images_block
    else:
        _fail(f"{path}.images", "images must be a list or an object keyed by generator")
    images = tuple(_element(group, raw[n], f"{path}.images.{n}") for n in names)
    return dict(spec), images, group


def parse_document(data: dict) -> InputDocument:
    """Validate a decoded JSON object; every error names the offending path."""
    if not isinstance(data, dict):
        _fail("$", "document must be an object")
    known = {"surface", "local_system", "cover", "skyscraper", "experiments", "config"}
    for key in data:
        if key not in known:
            _fail(f"$.{key}", "unknown top-level key")
    if "surface" not in data:
        _fail("$", "missing 'surface' block")
    config = _parse_config(data.get("config"))
    surface = _parse_surface(data["surface"])
    doc = InputDocument(surface=surface, config=config)
    if "local_system" in data:
        doc.matrices, doc.rank = _parse_system(data["local_system"], surface, config)
        try:
            doc.system = LocalSystem.build(surface, doc.matrices, rank_if_empty=doc.rank, config=config)
        except L2Error as exc:
            raise type(exc)(f"$.local_system: {exc}") from exc
    if "cover" in data:
        doc.group_spec, doc.images, group = _parse_cover(data["cover"], surface)
        doc.cover = CoveringDatum(surface, group, doc.images)
        try:
            validate_covering(doc.cover)
        except L2Error as exc:
            raise type(exc)(f"$.cover: {exc}") from exc
    if "skyscraper" in data:
        block = data["skyscraper"]
        if not isinstance(block, dict) or not all(isinstance(v, int) for v in block.values()):
            _fail("$.skyscraper", "skyscraper must map point labels to integer dimensions")
        doc.skyscraper = dict(block)
        SkyscraperDatum(doc.skyscraper)
    experiments = data.get("experiments", [])
    if not isinstance(experiments, list) or not all(isinstance(e, dict) and "kind" in e for e in experiments):
        _fail("$.experiments", "experiments must be a list of objects with a 'kind'")
    doc.experiments = tuple(json.loads(json.dumps(e, sort_keys=True)) for e in experiments)
    return doc


def parse_input(text: str) -> InputDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_document(data)


def _render_matrix(m: Matrix) -> list:
    out = []
    for i in range(m.rows):
        row = []
        for j in range(m.cols):
            v = m[i, j]
            row.append(format_scalar(v))
        out.append(row)
    return out


def document_to_data(doc: InputDocument) -> dict:
    data = {"surface": {"genus": doc.surface.genus, "punctures": list(doc.surface.punctures)}}
    if doc.matrices is not None:
        names = doc.surface.generator_names
        data["local_system"] = {"rank": doc.rank,
                                "matrices": {n: _render_matrix(m) for n, m in zip(names, doc.matrices)}}
    if doc.group_spec is not None:
        names = doc.surface.generator_names
        data["cover"] = {"group": doc.group_spec,
                         "images": {n: (list(x) if isinstance(x, tuple) else x) for n, x in zip(names, doc.images)}}
    if doc.skyscraper is not None:
        data["skyscraper"] = dict(doc.skyscraper)
    if doc.experiments:
        data["experiments"] = list(doc.experiments)
    cfg = {}
    for key, attr in CONFIG_KEYS.items():
        cfg[key] = getattr(doc.config, attr)
    data["config"] = cfg
    return data


def render_document(doc: InputDocument) -> str:
    return json.dumps(document_to_data(doc), indent=2, sort_keys=False)


# ---------------------------------------------------------------- reports

def to_payload(value):
    """JSON-compatible payload with the lossless scalar conventions."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else int(value)
    if isinstance(value, GaussianRational):
        return format_scalar(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return format_float(value)
    if isinstance(value, complex):
        return format_scalar(value)
    if isinstance(value, dict):
        return {str(k): to_payload(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_payload(v) for v in value]
    if hasattr(value, "__dataclass_fields__"):
        return {k: to_payload(getattr(value, k)) for k in value.__dataclass_fields__ if not k.startswith("_")}
    if isinstance(value, Matrix):
        return _render_matrix(value)
    return str(value)


@dataclass
class Report:
    command: str
    config: dict
    results: dict
    verdicts: dict
    timing: Optional[float] = None  # seconds; rendered only on request

    def payload(self, with_timing: bool = False) -> dict:
        out = {"command": self.command, "config": to_payload(self.config),
               "results": to_payload(self.results), "verdicts": to_payload(self.verdicts)}
        if with_timing and self.timing is not None:
            out["timing"] = format_float(self.timing)
        return out

    def render_machine(self, with_timing: bool = False) -> str:
        return json.dumps(self.payload(with_timing), indent=2)

    def render_text(self, with_timing: bool = False) -> str:
        lines = []
        for key, value in _flatten(self.payload(with_timing)):
            lines.append(f"{key} = {value}")
        return "\n".join(lines)


def _flatten(value, prefix=""):
    if isinstance(value, dict):
        for k, v in value.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(value, list):
        if not value:
            yield prefix, "[]"
        for i, v in enumerate(value):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, "null" if value is None else str(value).lower() if isinstance(value, bool) else value


def parse_text_report(text: str) -> dict:
    """Flat key -> value map of a text report (for consistency checks)."""
    out = {}
    for line in text.splitlines():
        key, _, value = line.partition(" = ")
        out[key] = value
    return out


def flatten_payload(payload: dict) -> dict:
    return {k: str(v) for k, v in _flatten(payload)}
