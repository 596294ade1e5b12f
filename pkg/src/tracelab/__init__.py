"""tracelab: verifiable A* search-trace datasets and their formal validation.

Generate maze and Sokoban instances, label them with linearized A* traces
and optimal plans, corrupt datasets by swapping traces between problems,
and validate model responses event-by-event against exact search semantics.
"""

from .errors import (
    ConfigError,
    DomainError,
    EncodingError,
    GenerationError,
    InputError,
    SearchFailure,
    TracelabError,
)
from .grid import (
    Action,
    Coord,
    GridMaze,
    PlanVerdict,
    execute_plan,
    manhattan,
    neighbors,
)
from .mazegen import GeneratorConfig, GeneratorKind, generate, sample_start_goal
from .search import SearchResult, TraceEvent, astar_maze, astar_sokoban, bfs_shortest_path
from .sokoban import SokobanInstance, SokobanState, SokobanVerdict, gen_sokoban
from .grammar import (
    GRAMMAR_VERSION,
    ParsedResponse,
    Vocabulary,
    encode_plan,
    encode_problem,
    encode_sokoban_problem,
    encode_trace,
    parse_problem,
    parse_response,
)
from .validate import (
    ResponseClassification,
    TraceErrorClass,
    TraceVerdict,
    classify_response,
    validate_sokoban_trace,
    validate_trace,
)
from .dataset import (
    DatasetManifest,
    DatasetRecord,
    build_dataset,
    build_test_suite,
    emit_training_text,
    swap_traces,
)
from .evaluate import EvalReport, SetReport, report_render, score

__version__ = "0.1.0"
