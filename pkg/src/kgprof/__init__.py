"""Knowledge-graph profiling and overlap estimation."""

from .class_detail import ClassDetail, ClassMapping, class_members, class_stats
from .hierarchy import ClassHierarchy, build_hierarchy
from .index import DatasetIndex, TermPartition, build_index, degree, partition_terms
from .linker import CandidateLinkSet, HeuristicConfig, LabelLinker, default_grid, extract_labels, match
from .ntriples import ParseError, ParseReport, Term, TripleRecord, parse_ntriples
from .overlap import (
    GoldLinkSet,
    OverlapEstimate,
    OverlapEstimator,
    estimate_overlap,
    evaluate_heuristic,
    load_gold_links,
    pair_statistics,
)
from .profiler import KGProfiler, ProfileReport, detect_expressivity, general_metrics, schema_metrics
from .similarity import similarity
from .viz import PairMatrix, SunburstNode, build_sunburst, render_heatmap

__version__ = "0.1.0"
