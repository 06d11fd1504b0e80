"""Information classes of elementary rules from input sensitivity of <TE>.

Each rule is run on the single-cell input and on an ensemble of richer
inputs.  The patch-averaged transfer entropy on the single-cell input
(``te1``) and the largest relative change across the ensemble decide the
class:

* ``I3`` - ``te1`` above the threshold (high and input-insensitive),
* ``I2`` - ``te1`` low but changing by at least an order of magnitude,
* ``I1`` - low throughout.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Mapping, Sequence

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .entropy import TEConfig, mean_te, te_matrix
from .rules import (
    ALL_SYMMETRIES,
    Symmetry,
    evolve,
    representative,
    representatives,
    transform_config,
)
from .seeding import derive_seed, random_bits, random_positions
from .validation import check_rule, check_width

INFO_CLASSES = ("I1", "I2", "I3")
CLASS_RANK = {c: i for i, c in enumerate(INFO_CLASSES)}
WOLFRAM_CLASSES = ("I", "II", "III", "IV")
ENSEMBLES = ("random", "density")
SINGLE_CELL_SYMMETRIES = (Symmetry.IDENTITY, Symmetry.CONJUGATE)

DEFAULT_SEED = 20170101


@dataclass(frozen=True)
class ClassificationThresholds:
    """``te_threshold=None`` means: compute it from the Wolfram I/II rules."""

    te_threshold: float | None = None
    change_threshold: float = 10.0
    zero_floor: float = 1e-6

    def __post_init__(self):
        if self.te_threshold is not None and self.te_threshold <= 0:
            raise ValueError("te_threshold must be positive")
        if self.change_threshold <= 1:
            raise ValueError("change_threshold must exceed 1")
        if self.zero_floor <= 0:
            raise ValueError("zero_floor must be positive")


@dataclass(frozen=True)
class ExperimentConfig:
    width: int = 101
    steps: int = 250
    burn_in: int = 50
    n_inputs: int = 20
    ensemble: str = "random"
    te_config: TEConfig = field(default_factory=TEConfig)
    master_seed: int = DEFAULT_SEED
    thresholds: ClassificationThresholds = field(default_factory=ClassificationThresholds)

    def __post_init__(self):
        check_width(self.width, odd=True)
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not 0 <= self.burn_in < self.steps:
            raise ValueError("burn_in must lie in [0, steps)")
        if self.steps + 1 - self.burn_in <= self.te_config.lag:
            raise ValueError("analysis window shorter than the TE history")
        if self.n_inputs < 1:
            raise ValueError("n_inputs must be >= 1")
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"ensemble must be one of {ENSEMBLES}, got {self.ensemble!r}")


@dataclass(frozen=True)
class EnsembleInput:
    cells: np.ndarray
    kind: str
    seed: int
    n_black: int


@dataclass(frozen=True)
class ClassificationRecord:
    representative: int
    te1: float
    te_r: tuple[float, ...]
    max_change: float
    info_class: str
    wolfram_class: str
    symmetry_single: Symmetry
    symmetries: tuple[Symmetry, ...]
    seeds: tuple[int, ...] = ()

    @property
    def te_r_min(self) -> float:
        return min(self.te_r)

    @property
    def te_r_max(self) -> float:
        return max(self.te_r)


# --- inputs --------------------------------------------------------------------

def single_cell_input(width: int) -> np.ndarray:
    width = check_width(width, odd=True)
    cfg = np.zeros(width, dtype=np.uint8)
    cfg[width // 2] = 1
    return cfg


def random_input(width: int, seed: int) -> np.ndarray:
    return random_bits(check_width(width), seed)


def structured_input(width: int, n_black: int, seed: int) -> np.ndarray:
    """Exactly ``n_black`` black cells at random distinct positions."""
    width = check_width(width)
    if not 0 <= n_black <= width:
        raise ValueError(f"n_black must lie in [0, {width}], got {n_black}")
    cfg = np.zeros(width, dtype=np.uint8)
    cfg[random_positions(width, n_black, seed)] = 1
    return cfg


def density_counts(width: int, n_inputs: int) -> list[int]:
    """Black-cell counts rising evenly from 2 to ``width // 2``.

    For ``width=101, n_inputs=20`` this is 2, 5, 7, 10, 12, ..., 47, 50.
    """
    if n_inputs == 1:
        return [2]
    return [int(v) for v in np.rint(np.linspace(2, width // 2, n_inputs))]


def ensemble_inputs(cfg: ExperimentConfig, rule: int) -> list[EnsembleInput]:
    """The ensemble used for ``rule``; seeds are keyed by its representative."""
    rep = representative(rule)
    seeds = [derive_seed(cfg.master_seed, rep, i) for i in range(cfg.n_inputs)]
    if cfg.ensemble == "random":
        out = []
        for s in seeds:
            cells = random_input(cfg.width, s)
            out.append(EnsembleInput(cells, "random", s, int(cells.sum())))
        return out
    counts = density_counts(cfg.width, cfg.n_inputs)
    return [
        EnsembleInput(structured_input(cfg.width, n, s), "density", s, n)
        for n, s in zip(counts, seeds)
    ]


# --- measurement -----------------------------------------------------------------

def patch_mean_te(rule: int, cells, cfg: ExperimentConfig) -> float:
    field_ = evolve(cells, rule, cfg.steps, cfg.burn_in)
    return mean_te(te_matrix(field_, cfg.te_config))


def symmetry_max_te(rule: int, cells, cfg: ExperimentConfig,
                    allowed: Sequence[Symmetry] = ALL_SYMMETRIES) -> tuple[float, Symmetry]:
    """Largest ``<TE>`` over symmetry-transformed copies of the input.

    Ties go to the earliest variant in identity, conjugate, reflect,
    composite order.
    """
    allowed = sorted({Symmetry(s) for s in allowed})
    if not allowed:
        raise ValueError("allowed symmetries must be non-empty")
    best, best_s = -1.0, allowed[0]
    for s in allowed:
        value = patch_mean_te(rule, transform_config(cells, s), cfg)
        if value > best:
            best, best_s = value, s
    return best, best_s


def max_normalized_change(te1: float, te_r: Sequence[float], zero_floor: float = 1e-6) -> float:
    if len(te_r) == 0:
        raise ValueError("te_r must be non-empty")
    denom = max(te1, zero_floor)
    return max(abs(v - te1) for v in te_r) / denom


def assign_class(te1: float, max_change: float, thresholds: ClassificationThresholds) -> str:
    # te1 == 0 with any appreciable te_r lands in I2 through the zero floor
    if thresholds.te_threshold is None:
        raise ValueError("te_threshold must be resolved before assigning classes")
    if te1 > thresholds.te_threshold:
        return "I3"
    if max_change >= thresholds.change_threshold:
        return "I2"
    return "I1"


def _load_table(name: str, column: str) -> dict[int, str]:
    text = resources.files("eca_infodyn.data").joinpath(name).read_text()
    rows = csv.DictReader(line for line in text.splitlines() if not line.startswith("#"))
    return {int(row["rule"]): row[column] for row in rows}


def load_wolfram_classes() -> dict[int, str]:
    """Bundled Wolfram class label for each of the 88 representatives."""
    return _load_table("wolfram_classes.csv", "wolfram_class")


def load_reference_classes() -> dict[int, str]:
    """Bundled reference information classes (54 / 24 / 10 members)."""
    return _load_table("reference_classes.csv", "info_class")


def compute_te_threshold(te1_by_rule: Mapping[int, float],
                         wolfram_labels: Mapping[int, str] | None = None) -> float:
    """Largest single-cell ``<TE>`` among Wolfram class I and II representatives."""
    labels = load_wolfram_classes() if wolfram_labels is None else wolfram_labels
    missing = sorted(set(te1_by_rule) - set(labels))
    if missing:
        raise KeyError(f"no Wolfram label for rules {missing}")
    low = [v for r, v in te1_by_rule.items() if labels[r] in ("I", "II")]
    if not low:
        raise ValueError("no Wolfram class I/II rules among the measurements")
    return max(low)


def measure_single_cell(rule: int, cfg: ExperimentConfig) -> tuple[float, Symmetry]:
    return symmetry_max_te(rule, single_cell_input(cfg.width), cfg, SINGLE_CELL_SYMMETRIES)


def measure_ensemble(rule: int, cfg: ExperimentConfig):
    """Per-input ``(<TE>_r, symmetry)`` plus the seeds used."""
    inputs = ensemble_inputs(cfg, rule)
    results = [symmetry_max_te(rule, x.cells, cfg) for x in inputs]
    return results, tuple(x.seed for x in inputs)


def _measure_rule(rule: int, cfg: ExperimentConfig):
    te1, s1 = measure_single_cell(rule, cfg)
    results, seeds = measure_ensemble(rule, cfg)
    return te1, s1, results, seeds


def _parallel(n_jobs: int | None):
    return Parallel(n_jobs=n_jobs or 1, backend="loky" if (n_jobs or 1) != 1 else "sequential")


def single_cell_pass(cfg: ExperimentConfig, n_jobs: int | None = 1) -> dict[int, tuple[float, Symmetry]]:
    reps = representatives()
    out = _parallel(n_jobs)(delayed(measure_single_cell)(r, cfg) for r in reps)
    return dict(zip(reps, out))


def run_classification(cfg: ExperimentConfig = ExperimentConfig(), n_jobs: int | None = 1,
                       rules: Sequence[int] | None = None,
                       wolfram_labels: Mapping[int, str] | None = None) -> list[ClassificationRecord]:
    """Classify ``rules`` (default: all 88 representatives).

    The single-cell pass always covers every representative so that the TE
    threshold can be derived when ``cfg.thresholds.te_threshold`` is None.
    Records come back in ascending rule order.
    """
    return classify(cfg, n_jobs, rules, wolfram_labels)[0]


def classify(cfg: ExperimentConfig = ExperimentConfig(), n_jobs: int | None = 1,
             rules: Sequence[int] | None = None,
             wolfram_labels: Mapping[int, str] | None = None) -> tuple[list[ClassificationRecord], float]:
    """Like :func:`run_classification` but also returns the TE threshold used."""
    labels = load_wolfram_classes() if wolfram_labels is None else wolfram_labels
    targets = representatives() if rules is None else sorted({check_rule(r) for r in rules})

    thresholds = cfg.thresholds
    if thresholds.te_threshold is None:
        singles = single_cell_pass(cfg, n_jobs)
        theta = compute_te_threshold({r: v for r, (v, _) in singles.items()}, labels)
        thresholds = replace(thresholds, te_threshold=theta)
    else:
        singles = {}

    measured = _parallel(n_jobs)(
        delayed(measure_ensemble if r in singles else _measure_rule)(r, cfg) for r in targets
    )

    records = []
    for r, m in zip(targets, measured):
        if r in singles:
            (te1, s1), (results, seeds) = singles[r], m
        else:
            te1, s1, results, seeds = m
        te_r = tuple(v for v, _ in results)
        change = max_normalized_change(te1, te_r, thresholds.zero_floor)
        records.append(ClassificationRecord(
            representative=r,
            te1=te1,
            te_r=te_r,
            max_change=change,
            info_class=assign_class(te1, change, thresholds),
            wolfram_class=labels.get(representative(r), "?"),
            symmetry_single=s1,
            symmetries=tuple(s for _, s in results),
            seeds=seeds,
        ))
    return records, thresholds.te_threshold


def empty_region_violations(records: Sequence[ClassificationRecord], te_threshold: float,
                            change_threshold: float = 10.0) -> list[ClassificationRecord]:
    """Records that are both high on the single cell and strongly input-sensitive."""
    return [r for r in records if r.te1 > te_threshold and r.max_change >= change_threshold]


def reference_mismatches(records: Sequence[ClassificationRecord],
                         reference: Mapping[int, str] | None = None) -> list[ClassificationRecord]:
    ref = load_reference_classes() if reference is None else reference
    return [r for r in records if ref.get(r.representative) != r.info_class]


class InformationClassifier(ClassifierMixin, BaseEstimator):
    """Estimator wrapper around :func:`run_classification`.

    ``fit`` measures the single-cell and ensemble ``<TE>`` of the rules in
    ``X`` (default: all 88 representatives); ``predict`` maps any rule code
    to the information class of its equivalence representative.

    Parameters mirror :class:`ExperimentConfig`; ``te_threshold=None``
    derives the threshold from the Wolfram class I/II rules.
    """

    def __init__(self, width=101, steps=250, burn_in=50, n_inputs=20, ensemble="random",
                 k=5, l=2, bias_correction=False, seed=DEFAULT_SEED, te_threshold=None,
                 change_threshold=10.0, zero_floor=1e-6, n_jobs=1):
        self.width = width
        self.steps = steps
        self.burn_in = burn_in
        self.n_inputs = n_inputs
        self.ensemble = ensemble
        self.k = k
        self.l = l
        self.bias_correction = bias_correction
        self.seed = seed
        self.te_threshold = te_threshold
        self.change_threshold = change_threshold
        self.zero_floor = zero_floor
        self.n_jobs = n_jobs

    def experiment_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            width=self.width,
            steps=self.steps,
            burn_in=self.burn_in,
            n_inputs=self.n_inputs,
            ensemble=self.ensemble,
            te_config=TEConfig(self.k, self.l, self.bias_correction),
            master_seed=self.seed,
            thresholds=ClassificationThresholds(
                self.te_threshold, self.change_threshold, self.zero_floor
            ),
        )

    def fit(self, X=None, y=None):
        cfg = self.experiment_config()
        rules = None if X is None else sorted({representative(check_rule(r)) for r in np.ravel(X)})
        records, theta = classify(cfg, self.n_jobs, rules)
        self.te_threshold_ = theta
        self.records_ = records
        self.classes_ = np.array(INFO_CLASSES)
        self._by_rep = {r.representative: r for r in records}
        return self

    def _record(self, rule) -> ClassificationRecord:
        check_is_fitted(self, "records_")
        rep = representative(check_rule(rule))
        try:
            return self._by_rep[rep]
        except KeyError:
            raise ValueError(f"rule {rule} (representative {rep}) was not part of the fit") from None

    def predict(self, X) -> np.ndarray:
        return np.array([self._record(r).info_class for r in np.ravel(X)])

    def transform(self, X) -> np.ndarray:
        """``(te1, max_change)`` coordinates for each rule."""
        return np.array([[self._record(r).te1, self._record(r).max_change] for r in np.ravel(X)])
