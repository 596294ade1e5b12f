"""Dataset pipeline: seeded generation, A* labeling, swap corruption and
JSON-lines persistence.

Files come in pairs: ``<name>.jsonl`` holds one record object per line and
``<name>.jsonl.manifest.json`` records the inputs (seeds, generator, grammar
version) plus a SHA-256 digest of the record bytes, so every artifact can be
regenerated bit-for-bit. Per-record seeds are derived from the master seed
and the record index, which keeps parallel and serial builds identical.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from hashlib import sha256
from pathlib import Path
from typing import Iterable, Optional, Union

from . import grammar
from .errors import DomainError, GenerationError, InputError, TracelabError
from .grid import Coord, GridMaze
from .mazegen import GeneratorConfig, GeneratorKind, generate
from .search import astar_maze, astar_sokoban
from .seeds import derive_seed
from .sokoban import SokobanInstance, gen_sokoban

MAZE_GENERATORS = tuple(kind.value for kind in GeneratorKind)
SOKOBAN_GENERATOR = "sokoban"
GENERATORS = MAZE_GENERATORS + (SOKOBAN_GENERATOR,)

SOLUTION_ONLY = "solution_only"
WITH_TRACE = "with_trace"
EMIT_MODES = (SOLUTION_ONLY, WITH_TRACE)


@dataclass(frozen=True)
class DatasetRecord:
    id: int
    domain: str
    generator: str
    width: int
    height: int
    walls: tuple[Coord, ...]
    trace_text: str
    plan_text: str
    trace_source_id: int
    start: Optional[Coord] = None
    goal: Optional[Coord] = None
    docks: Optional[tuple[Coord, Coord]] = None
    boxes_start: Optional[tuple[Coord, Coord]] = None
    worker_start: Optional[Coord] = None

    def problem(self) -> Union[GridMaze, SokobanInstance]:
        if self.domain == grammar.SOKOBAN_DOMAIN:
            return SokobanInstance(
                walls=frozenset(self.walls),
                docks=self.docks,
                boxes_start=self.boxes_start,
                worker_start=self.worker_start,
                width=self.width,
                height=self.height,
            )
        return GridMaze(
            self.width, self.height, frozenset(self.walls), self.start, self.goal
        )

    def problem_tokens(self) -> list[str]:
        problem = self.problem()
        if isinstance(problem, SokobanInstance):
            return grammar.encode_sokoban_problem(problem)
        return grammar.encode_problem(problem)

    def to_obj(self) -> dict:
        obj = {
            "id": self.id,
            "domain": self.domain,
            "generator": self.generator,
            "width": self.width,
            "height": self.height,
            "walls": [list(w) for w in self.walls],
            "trace_text": self.trace_text,
            "plan_text": self.plan_text,
            "trace_source_id": self.trace_source_id,
        }
        if self.domain == grammar.SOKOBAN_DOMAIN:
            obj["docks"] = [list(c) for c in self.docks]
            obj["boxes_start"] = [list(c) for c in self.boxes_start]
            obj["worker_start"] = list(self.worker_start)
        else:
            obj["start"] = list(self.start)
            obj["goal"] = list(self.goal)
        return obj

    @classmethod
    def from_obj(cls, obj: dict) -> "DatasetRecord":
        def coord(pair) -> Coord:
            return Coord(int(pair[0]), int(pair[1]))

        common = dict(
            id=int(obj["id"]),
            domain=obj["domain"],
            generator=obj["generator"],
            width=int(obj["width"]),
            height=int(obj["height"]),
            walls=tuple(coord(w) for w in obj["walls"]),
            trace_text=obj["trace_text"],
            plan_text=obj["plan_text"],
            trace_source_id=int(obj["trace_source_id"]),
        )
        if obj["domain"] == grammar.SOKOBAN_DOMAIN:
            return cls(
                docks=tuple(coord(c) for c in obj["docks"]),
                boxes_start=tuple(coord(c) for c in obj["boxes_start"]),
                worker_start=coord(obj["worker_start"]),
                **common,
            )
        return cls(start=coord(obj["start"]), goal=coord(obj["goal"]), **common)


@dataclass(frozen=True)
class DatasetManifest:
    master_seed: int
    generator: dict
    record_count: int
    grammar_version: str
    content_digest: str
    swap_seed: Optional[int] = None

    def to_obj(self) -> dict:
        return asdict(self)

    @classmethod
    def from_obj(cls, obj: dict) -> "DatasetManifest":
        return cls(
            master_seed=obj["master_seed"],
            generator=obj["generator"],
            record_count=obj["record_count"],
            grammar_version=obj["grammar_version"],
            content_digest=obj["content_digest"],
            swap_seed=obj.get("swap_seed"),
        )


def manifest_path(dataset_path: Union[str, Path]) -> Path:
    return Path(f"{dataset_path}.manifest.json")


def _record_line(record: DatasetRecord) -> str:
    return json.dumps(record.to_obj(), sort_keys=True, separators=(",", ":"))


def write_records(
    path: Path, records: Iterable[DatasetRecord]
) -> tuple[int, str]:
    """Write records as JSON lines; returns (count, content digest)."""
    digest = sha256()
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            line = _record_line(record) + "\n"
            fh.write(line)
            digest.update(line.encode("utf-8"))
            count += 1
    return count, digest.hexdigest()


def load_records(path: Union[str, Path]) -> list[DatasetRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(DatasetRecord.from_obj(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise InputError(f"{path}:{lineno}: bad record ({exc})") from exc
    return records


def load_manifest(dataset_path: Union[str, Path]) -> DatasetManifest:
    path = manifest_path(dataset_path)
    try:
        with open(path, encoding="utf-8") as fh:
            return DatasetManifest.from_obj(json.load(fh))
    except FileNotFoundError as exc:
        raise InputError(f"missing manifest {path}") from exc
    except (json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"bad manifest {path}: {exc}") from exc


def _write_manifest(dataset_path: Path, manifest: DatasetManifest) -> None:
    with open(manifest_path(dataset_path), "w", encoding="utf-8") as fh:
        json.dump(manifest.to_obj(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _generator_settings(generator: str, cfg: GeneratorConfig) -> dict:
    settings = {"kind": generator, "width": cfg.width, "height": cfg.height}
    if generator == GeneratorKind.DRUNKARD.value:
        settings["drunkard_floor_fraction"] = cfg.drunkard_floor_fraction
    if generator == GeneratorKind.SEARCHFORMER_STYLE.value:
        settings["sf_min_wall_fraction"] = cfg.sf_min_wall_fraction
        settings["sf_max_wall_fraction"] = cfg.sf_max_wall_fraction
        settings["sf_min_plan_length"] = cfg.sf_min_plan_length
    return settings


def _build_maze_record(args: tuple) -> DatasetRecord:
    index, generator, master_seed, cfg_fields = args
    seed = derive_seed(master_seed, "record", index)
    cfg = GeneratorConfig(
        kind=GeneratorKind(generator), seed=seed, **cfg_fields
    )
    try:
        maze = generate(cfg)
        result = astar_maze(maze)
    except TracelabError as exc:
        raise GenerationError(f"record {index}: {exc}") from exc
    return DatasetRecord(
        id=index,
        domain=grammar.MAZE_DOMAIN,
        generator=generator,
        width=maze.width,
        height=maze.height,
        walls=tuple(sorted(maze.walls, key=lambda c: (c.y, c.x))),
        start=maze.start,
        goal=maze.goal,
        trace_text=grammar.to_line(grammar.encode_trace(result.trace)),
        plan_text=grammar.to_line(grammar.encode_plan(result.plan)),
        trace_source_id=index,
    )


def _build_sokoban_record(args: tuple) -> DatasetRecord:
    index, master_seed = args
    seed = derive_seed(master_seed, "record", index)
    try:
        instance = gen_sokoban(seed)
        result = astar_sokoban(instance)
    except TracelabError as exc:
        raise GenerationError(f"record {index}: {exc}") from exc
    return DatasetRecord(
        id=index,
        domain=grammar.SOKOBAN_DOMAIN,
        generator=SOKOBAN_GENERATOR,
        width=instance.width,
        height=instance.height,
        walls=tuple(sorted(instance.walls, key=lambda c: (c.y, c.x))),
        docks=instance.docks,
        boxes_start=instance.boxes_start,
        worker_start=instance.worker_start,
        trace_text=grammar.to_line(grammar.encode_trace(result.trace)),
        plan_text=grammar.to_line(grammar.encode_plan(result.plan)),
        trace_source_id=index,
    )


def _build_searchformer_records(
    count: int, master_seed: int, cfg_fields: dict
) -> list[DatasetRecord]:
    # Session-level dedup makes records depend on their predecessors, so
    # this generator always runs serially.
    session: set[str] = set()
    records = []
    for index in range(count):
        seed = derive_seed(master_seed, "record", index)
        cfg = GeneratorConfig(
            kind=GeneratorKind.SEARCHFORMER_STYLE, seed=seed, **cfg_fields
        )
        try:
            maze = generate(cfg, session=session)
            result = astar_maze(maze)
        except TracelabError as exc:
            raise GenerationError(f"record {index}: {exc}") from exc
        records.append(
            DatasetRecord(
                id=index,
                domain=grammar.MAZE_DOMAIN,
                generator=GeneratorKind.SEARCHFORMER_STYLE.value,
                width=maze.width,
                height=maze.height,
                walls=tuple(sorted(maze.walls, key=lambda c: (c.y, c.x))),
                start=maze.start,
                goal=maze.goal,
                trace_text=grammar.to_line(grammar.encode_trace(result.trace)),
                plan_text=grammar.to_line(grammar.encode_plan(result.plan)),
                trace_source_id=index,
            )
        )
    return records


def build_dataset(
    generator: str,
    count: int,
    master_seed: int,
    out_path: Union[str, Path],
    *,
    width: int = 30,
    height: int = 30,
    drunkard_floor_fraction: float = 0.4,
    sf_min_plan_length: int = 8,
    jobs: int = 1,
) -> DatasetManifest:
    """Generate ``count`` labeled records and persist them with a manifest."""
    if generator not in GENERATORS:
        raise InputError(f"unknown generator {generator!r}; pick one of {GENERATORS}")
    if count < 1:
        raise InputError("count must be at least 1")
    out_path = Path(out_path)

    if generator == SOKOBAN_GENERATOR:
        tasks = [(i, master_seed) for i in range(count)]
        records = _run_jobs(_build_sokoban_record, tasks, jobs)
        settings = {"kind": SOKOBAN_GENERATOR, "width": 7, "height": 7}
    else:
        cfg_fields = dict(width=width, height=height)
        if generator == GeneratorKind.DRUNKARD.value:
            cfg_fields["drunkard_floor_fraction"] = drunkard_floor_fraction
        if generator == GeneratorKind.SEARCHFORMER_STYLE.value:
            cfg_fields["sf_min_plan_length"] = sf_min_plan_length
        settings = _generator_settings(
            generator, GeneratorConfig(kind=GeneratorKind(generator), **cfg_fields)
        )
        if generator == GeneratorKind.SEARCHFORMER_STYLE.value:
            records = _build_searchformer_records(count, master_seed, cfg_fields)
        else:
            tasks = [(i, generator, master_seed, cfg_fields) for i in range(count)]
            records = _run_jobs(_build_maze_record, tasks, jobs)

    record_count, digest = write_records(out_path, records)
    manifest = DatasetManifest(
        master_seed=master_seed,
        generator=settings,
        record_count=record_count,
        grammar_version=grammar.GRAMMAR_VERSION,
        content_digest=digest,
    )
    _write_manifest(out_path, manifest)
    return manifest


def _run_jobs(fn, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) < 2:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (jobs * 8))))


def derangement(n: int, seed: int) -> list[int]:
    """A seeded fixed-point-free permutation of range(n)."""
    if n < 2:
        raise DomainError("a derangement needs at least two elements")
    rng = random.Random(seed)
    perm = list(range(n))
    while True:
        rng.shuffle(perm)
        if all(perm[i] != i for i in range(n)):
            return perm


def swap_traces(
    dataset_path: Union[str, Path],
    swap_seed: int,
    out_path: Union[str, Path],
) -> DatasetManifest:
    """Permute trace_text between records by a seeded derangement.

    Plans are untouched, the trace multiset is preserved, and no record
    keeps its own trace; trace_source_id records where each trace came from.
    """
    records = load_records(dataset_path)
    source_manifest = load_manifest(dataset_path)
    perm = derangement(len(records), swap_seed)
    swapped = [
        replace(
            record,
            trace_text=records[perm[i]].trace_text,
            trace_source_id=records[perm[i]].id,
        )
        for i, record in enumerate(records)
    ]
    out_path = Path(out_path)
    record_count, digest = write_records(out_path, swapped)
    manifest = DatasetManifest(
        master_seed=source_manifest.master_seed,
        generator=source_manifest.generator,
        record_count=record_count,
        grammar_version=source_manifest.grammar_version,
        content_digest=digest,
        swap_seed=swap_seed,
    )
    _write_manifest(out_path, manifest)
    return manifest


def training_line(record: DatasetRecord, mode: str) -> str:
    """One training sample: problem tokens, optional trace section, plan."""
    problem = record.problem_tokens()
    if mode == SOLUTION_ONLY:
        problem = problem[:-1]  # drop the trailing `trace` delimiter
        return grammar.to_line(problem) + " " + record.plan_text
    return " ".join([grammar.to_line(problem), record.trace_text, record.plan_text])


def emit_training_text(
    dataset_path: Union[str, Path],
    mode: str,
    out_path: Union[str, Path],
) -> dict:
    """Flatten a dataset into one token line per record for model training."""
    if mode not in EMIT_MODES:
        raise InputError(f"unknown mode {mode!r}; pick one of {EMIT_MODES}")
    manifest = load_manifest(dataset_path)
    if manifest.grammar_version != grammar.GRAMMAR_VERSION:
        raise InputError(
            f"dataset grammar {manifest.grammar_version!r} does not match "
            f"this library's {grammar.GRAMMAR_VERSION!r}"
        )
    records = load_records(dataset_path)
    out_path = Path(out_path)
    digest = sha256()
    domain = records[0].domain if records else grammar.MAZE_DOMAIN
    with open(out_path, "w", encoding="utf-8") as fh:
        for record in records:
            line = training_line(record, mode) + "\n"
            fh.write(line)
            digest.update(line.encode("utf-8"))
    text_manifest = {
        "grammar_version": manifest.grammar_version,
        "mode": mode,
        "domain": domain,
        "record_count": len(records),
        "content_digest": digest.hexdigest(),
        "source_digest": manifest.content_digest,
    }
    with open(manifest_path(out_path), "w", encoding="utf-8") as fh:
        json.dump(text_manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return text_manifest


def build_test_suite(
    master_seed: int,
    out_dir: Union[str, Path],
    *,
    count: int = 1000,
    width: int = 30,
    height: int = 30,
    jobs: int = 1,
) -> dict[str, DatasetManifest]:
    """One ``count``-record test file per maze generator, with seeds disjoint
    from any training build on the same master seed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifests = {}
    for kind in GeneratorKind:
        suite_seed = derive_seed(master_seed, "test-suite", kind.value)
        manifests[kind.value] = build_dataset(
            kind.value,
            count,
            suite_seed,
            out_dir / f"test_{kind.value}.jsonl",
            width=width,
            height=height,
            jobs=jobs,
        )
    return manifests
