"""
Sequential Forward Selection and Sequential Backward Selection.

Both searches run the full greedy path (up to ``max_steps``) and report the
best-scoring state. Candidates within a step are independent and may be
scored in parallel; the winner is always the first best candidate in
ascending group order.
"""

from typing import Dict, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

from indicator_selection.core.windowing import WindowedDataset
from indicator_selection.evaluation.metrics import is_better
from indicator_selection.exceptions import SchemaError
from indicator_selection.indicators.registry import NATIVE_REGISTRY, IndicatorRegistry, infer_groups
from indicator_selection.selection.cross_validation import FitCounter, cross_val_score
from indicator_selection.selection.results import SelectionConfig, SelectionResult, SelectionStep, best_state
from indicator_selection.utils.logger import get_logger

logger = get_logger(__name__)


class _Search:
    """Shared state of one greedy run."""

    def __init__(self, dataset: WindowedDataset, config: SelectionConfig):
        if not config.group_by_indicator:
            dataset = dataset.by_column()
        self.dataset = dataset
        self.config = config
        self.columns: Dict[str, List[int]] = dataset.group_columns()
        self.groups: List[str] = list(self.columns)
        if not self.groups:
            raise SchemaError("dataset has no feature groups to select from")
        self.counter = FitCounter()

    def _score_one(self, members: Sequence[int]) -> float:
        columns = sorted(c for g in members for c in self.columns[self.groups[g]])
        return cross_val_score(
            self.dataset,
            self.config.regressor,
            self.config.metric,
            folds=self.config.cv_folds,
            seed=self.config.seed,
            shuffle=self.config.cv_shuffle,
            columns=columns,
        )

    def score(self, members: Sequence[int]) -> float:
        value = self._score_one(members)
        self.counter.add(self.config.cv_folds)
        return value

    def score_all(self, states: List[List[int]]) -> List[float]:
        if self.config.n_jobs == 1 or len(states) == 1:
            scores = [self._score_one(s) for s in states]
        else:
            scores = Parallel(n_jobs=self.config.n_jobs, prefer="threads")(
                delayed(self._score_one)(s) for s in states
            )
        self.counter.add(self.config.cv_folds * len(states))
        return list(scores)

    def pick(self, candidates: List[int], scores: List[float]) -> Tuple[int, float]:
        best_at = 0
        for k in range(1, len(candidates)):
            if is_better(scores[k], scores[best_at], self.config.metric):
                best_at = k
        return candidates[best_at], scores[best_at]

    def names(self, members: Sequence[int]) -> Tuple[str, ...]:
        return tuple(self.groups[g] for g in members)

    def result(self, selected, trace, initial_score: Optional[float],
               registry: Optional[IndicatorRegistry]) -> SelectionResult:
        initial = (tuple(self.groups), initial_score) if initial_score is not None else None
        best_subset, best_score = best_state(trace, self.config.metric, initial)
        registry = registry or NATIVE_REGISTRY
        owners = infer_groups(self.groups, registry)
        numbers = {g: registry.get(owners[g]).catalogue_number if g in owners else None for g in self.groups}
        result = SelectionResult(
            method=self.config.method,
            metric=self.config.metric,
            family=self.config.regressor.family,
            selected=self.names(selected),
            trace=tuple(trace),
            best_score=best_score,
            best_subset=tuple(best_subset),
            n_fits=self.counter.count,
            groups=tuple(self.groups),
            initial_score=initial_score,
            catalogue_numbers=numbers,
            cv_folds=self.config.cv_folds,
            seed=self.config.seed,
        )
        logger.info(
            "selection finished",
            run=self.config.label,
            best_size=len(result.best_subset),
            best_score=best_score,
            fits=result.n_fits,
        )
        return result


def sfs(dataset: WindowedDataset, config: SelectionConfig,
        registry: Optional[IndicatorRegistry] = None) -> SelectionResult:
    """
    Sequential Forward Selection.

    Starts from the empty set; each step adds the group whose addition
    scores best. The best prefix of the path is reported.
    """
    search = _Search(dataset, config)
    n_groups = len(search.groups)
    max_steps = min(config.max_steps or n_groups, n_groups)

    current: List[int] = []
    remaining = list(range(n_groups))
    trace: List[SelectionStep] = []
    for step in range(1, max_steps + 1):
        scores = search.score_all([current + [g] for g in remaining])
        chosen, chosen_score = search.pick(remaining, scores)
        current.append(chosen)
        remaining.remove(chosen)
        trace.append(SelectionStep(step, len(current), search.groups[chosen], chosen_score, search.names(current)))
        logger.debug("sfs step", run=config.label, step=step, added=search.groups[chosen], score=chosen_score)

    return search.result(current, trace, None, registry)


def sbs(dataset: WindowedDataset, config: SelectionConfig,
        registry: Optional[IndicatorRegistry] = None) -> SelectionResult:
    """
    Sequential Backward Selection.

    Starts from all groups; each step removes the group whose removal
    scores best. The full set's score is kept as ``initial_score`` and
    competes for the best state. ``selected`` lists the survivors followed
    by the removed groups in reverse removal order, so every visited state
    is a prefix of it.
    """
    search = _Search(dataset, config)
    n_groups = len(search.groups)
    max_steps = min(config.max_steps or n_groups - 1, n_groups - 1)

    current = list(range(n_groups))
    initial_score = search.score(current)
    removed: List[int] = []
    trace: List[SelectionStep] = []
    for step in range(1, max_steps + 1):
        states = [[g for g in current if g != drop] for drop in current]
        scores = search.score_all(states)
        dropped, dropped_score = search.pick(list(current), scores)
        current.remove(dropped)
        removed.append(dropped)
        trace.append(SelectionStep(step, len(current), search.groups[dropped], dropped_score, search.names(current)))
        logger.debug("sbs step", run=config.label, step=step, removed=search.groups[dropped], score=dropped_score)

    return search.result(current + removed[::-1], trace, initial_score, registry)


def run_selection(dataset: WindowedDataset, config: SelectionConfig,
                  registry: Optional[IndicatorRegistry] = None) -> SelectionResult:
    """Dispatch on ``config.method``."""
    return (sfs if config.method == "SFS" else sbs)(dataset, config, registry)
