from .exploration import Explorer, Lts, explore
from .oracle import OracleVerdicts, PathOracle, iter_maximal_paths, oracle_verdicts
from .properties import PropertyChecker, check, shortest_counterexample

__all__ = [
    'Explorer', 'Lts', 'explore',
    'OracleVerdicts', 'PathOracle', 'iter_maximal_paths', 'oracle_verdicts',
    'PropertyChecker', 'check', 'shortest_counterexample',
]
