"""Relative-error property testing of juntas and subclasses of juntas."""

from .boolfn import (
    BooleanFunction,
    DecisionTree,
    JuntaFunction,
    Leaf,
    Node,
    TruthTable,
    apply_permutation,
    compose_partial,
    count_satisfying,
    evaluate,
    flip_block,
)
from .blocks import BlockPartition, binary_search_block, random_partition
from .junta_tester import JuntaTesterParams, junta_test
from .oracle import EmptyFunction, QueryOracle, QueryStats
from .reldist import RelDist, rel_dist, rel_dist_to_class, rel_dist_to_juntas
from .subclass_catalog import ApproxSet, SubclassSpec, build_approx
from .subclass_tester import SubclassTesterParams, find_var_value, map_back, subclass_test
from .uniform_junta import UniformJuntaParams, uniform_junta_test
from .verdict import TesterVerdict

__all__ = [
    "ApproxSet",
    "BlockPartition",
    "BooleanFunction",
    "DecisionTree",
    "EmptyFunction",
    "JuntaFunction",
    "JuntaTesterParams",
    "Leaf",
    "Node",
    "QueryOracle",
    "QueryStats",
    "RelDist",
    "SubclassSpec",
    "SubclassTesterParams",
    "TesterVerdict",
    "TruthTable",
    "UniformJuntaParams",
    "apply_permutation",
    "binary_search_block",
    "build_approx",
    "compose_partial",
    "count_satisfying",
    "evaluate",
    "find_var_value",
    "flip_block",
    "junta_test",
    "map_back",
    "random_partition",
    "rel_dist",
    "rel_dist_to_class",
    "rel_dist_to_juntas",
    "subclass_test",
    "uniform_junta_test",
]

__version__ = "0.1.0"
