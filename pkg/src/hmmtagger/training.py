"""Parameter estimation over untagged class sequences and tagged corpora.

Three regimes produce models:

* ``bias``          -- seed a uniform model with starting biases, then run
                       expectation-maximization over untagged text;
* ``counted``       -- initialize from relative frequencies counted in a
                       tagged corpus, then smooth with (by default) a single
                       re-estimation iteration over untagged text;
* ``counted-only``  -- the counted initialization alone, no re-estimation.

The forward-backward recursions use per-position scaling, so arbitrarily
long sentences neither underflow nor overflow; the corpus log-likelihood is
recovered from the scaling factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError, ImpossibleSequenceError
from .model import HmmModel, _class_members_arg
from .tagset import TagSet

REGIME_BIAS = "bias"
REGIME_COUNTED = "counted"
REGIME_COUNTED_ONLY = "counted-only"
REGIMES = (REGIME_BIAS, REGIME_COUNTED, REGIME_COUNTED_ONLY)


@dataclass
class TrainingConfig:
    """Knobs for re-estimation.

    ``smoothing_floor`` is added to every structurally allowed cell of the
    expected-count tables before renormalization, so events unseen in the
    data do not become permanently impossible; deliberate prohibitions live
    in the transition zero mask and are unaffected.  ``convergence_tol`` of 0
    runs exactly ``iterations`` iterations; a positive value stops early once
    the relative log-likelihood improvement falls below it.
    """

    iterations: int = 20
    smoothing_floor: float = 1e-6
    convergence_tol: float = 0.0

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.smoothing_floor < 0:
            raise ValueError("smoothing_floor must be >= 0")
        if self.convergence_tol < 0:
            raise ValueError("convergence_tol must be >= 0")


class SufficientStats:
    """Expected counts from forward-backward, plus the log-likelihood.

    Stats from distinct sentences add; ``merge`` is commutative and
    associative up to floating-point reassociation, which is what makes
    per-sentence parallelism safe.
    """

    def __init__(self, initial_counts, transition_counts, emission_counts, log_likelihood=0.0):
        self.initial_counts = initial_counts
        self.transition_counts = transition_counts
        self.emission_counts = emission_counts
        self.log_likelihood = log_likelihood

    @classmethod
    def zeros(cls, n_tags: int, n_classes: int) -> "SufficientStats":
        return cls(np.zeros(n_tags), np.zeros((n_tags, n_tags)), np.zeros((n_tags, n_classes)))

    def merge(self, other: "SufficientStats") -> "SufficientStats":
        self.initial_counts += other.initial_counts
        self.transition_counts += other.transition_counts
        self.emission_counts += other.emission_counts
        self.log_likelihood += other.log_likelihood
        return self


def _check_sentence(model: HmmModel, sentence) -> np.ndarray:
    seq = np.asarray(sentence, dtype=np.intp)
    if seq.ndim != 1 or seq.size == 0:
        raise DataError("sentence must be a non-empty sequence of class ids")
    if seq.size and (seq.min() < 0 or seq.max() >= model.n_classes):
        bad = int(np.nonzero((seq < 0) | (seq >= model.n_classes))[0][0])
        raise DataError(f"unknown class id {int(seq[bad])} at position {bad}")
    return seq


def forward_backward(model: HmmModel, sentence: Sequence[int],
                     into: Optional[SufficientStats] = None) -> SufficientStats:
    """Expected initial/transition/emission counts for one sentence.

    Uses the scaled alpha/beta recursions; ``log_likelihood`` is the exact
    (up to rounding) natural log of the sentence probability under ``model``.
    Counts accumulate into ``into`` when given, which lets callers reduce
    over a corpus without intermediate allocations.

    Raises ImpossibleSequenceError, naming the first dead position, when no
    tag path has positive probability.
    """
    seq = _check_sentence(model, sentence)
    T, n = seq.size, model.n_tags
    obs = model.emission[:, seq].T  # (T, n): emission prob of each tag at each position

    alpha = np.empty((T, n))
    scale = np.empty(T)
    a = model.initial * obs[0]
    s = a.sum()
    if s <= 0.0:
        raise ImpossibleSequenceError("no tag can start this sentence", position=0)
    alpha[0] = a / s
    scale[0] = s
    for t in range(1, T):
        a = (alpha[t - 1] @ model.transition) * obs[t]
        s = a.sum()
        if s <= 0.0:
            raise ImpossibleSequenceError(f"all tag states die at position {t}", position=t)
        alpha[t] = a / s
        scale[t] = s

    beta = np.empty((T, n))
    beta[T - 1] = 1.0
    for t in range(T - 2, -1, -1):
        beta[t] = (model.transition @ (obs[t + 1] * beta[t + 1])) / scale[t + 1]

    gamma = alpha * beta  # (T, n), rows sum to 1

    if into is None:
        into = SufficientStats.zeros(n, model.n_classes)
    into.initial_counts += gamma[0]
    if T > 1:
        weighted = (obs[1:] * beta[1:]) / scale[1:, None]
        into.transition_counts += model.transition * (alpha[:-1].T @ weighted)
    np.add.at(into.emission_counts.T, seq, gamma)
    into.log_likelihood += float(np.log(scale).sum())
    return into


def _normalize_rows(counts: np.ndarray, allowed: np.ndarray, floor: float,
                    fallback: np.ndarray) -> np.ndarray:
    """Counts -> row-stochastic matrix.  ``floor`` is added to allowed cells;
    rows with no mass fall back to the corresponding ``fallback`` rows."""
    work = np.where(allowed, counts + floor, 0.0)
    sums = work.sum(axis=1)
    dead = sums <= 0.0
    sums[dead] = 1.0
    work /= sums[:, None]
    if dead.any():
        work[dead] = fallback[dead]
    return work


def _reestimate(model: HmmModel, stats: SufficientStats, floor: float) -> HmmModel:
    allowed_trans = ~model.transition_zero_mask
    transition = _normalize_rows(stats.transition_counts, allowed_trans, floor, model.transition)
    transition[model.transition_zero_mask] = 0.0
    emission = _normalize_rows(stats.emission_counts, model.allowed_emission_mask(),
                               floor, model.emission)
    initial = stats.initial_counts + floor
    total = initial.sum()
    initial = initial / total if total > 0 else model.initial.copy()
    return HmmModel(model.tag_labels, model.class_members, initial, transition, emission,
                    model.transition_zero_mask.copy())


def baum_welch(model: HmmModel, corpus: Iterable[Sequence[int]], config: TrainingConfig,
               on_iteration: Optional[Callable[[int, HmmModel, float], None]] = None,
               skip_impossible: bool = False):
    """Expectation-maximization over a corpus of class sequences.

    ``corpus`` must be re-iterable (a list, or a reader that restarts per
    pass).  Returns ``(final_model, trajectory)`` where ``trajectory[i]`` is
    the corpus log-likelihood under the model entering iteration ``i``; with
    a smoothing floor of 0 the trajectory is non-decreasing.

    Sentence-level errors are re-raised with the sentence index attached;
    with ``skip_impossible`` zero-probability sentences are dropped from the
    iteration's counts instead (the count of skips is reported on the final
    model as ``skipped_sentences``).
    """
    trajectory: list[float] = []
    skipped_total = 0
    for iteration in range(config.iterations):
        stats = SufficientStats.zeros(model.n_tags, model.n_classes)
        n_sentences = 0
        skipped = 0
        for index, sentence in enumerate(corpus):
            try:
                forward_backward(model, sentence, into=stats)
            except ImpossibleSequenceError as exc:
                if skip_impossible:
                    skipped += 1
                    continue
                raise ImpossibleSequenceError(
                    f"sentence {index}: {exc}", position=exc.position, sentence_index=index
                ) from None
            except DataError as exc:
                raise DataError(f"sentence {index}: {exc}") from None
            n_sentences += 1
        if n_sentences == 0:
            raise DataError("training corpus is empty"
                            if skipped == 0 else "every training sentence was impossible")
        skipped_total += skipped
        trajectory.append(stats.log_likelihood)
        model = _reestimate(model, stats, config.smoothing_floor)
        if on_iteration is not None:
            on_iteration(iteration, model, stats.log_likelihood)
        if config.convergence_tol > 0 and len(trajectory) >= 2:
            prev, cur = trajectory[-2], trajectory[-1]
            if abs(cur - prev) <= config.convergence_tol * abs(prev):
                break
    model.skipped_sentences = skipped_total
    return model, trajectory


def counted_init(tagged: Iterable[Sequence[tuple[int, int]]], ts: TagSet, classes,
                 smoothing_floor: float = 1e-6) -> HmmModel:
    """Relative-frequency model from a tagged corpus.

    ``tagged`` yields sentences of ``(tag_id, class_id)`` pairs; each token's
    gold tag must be a member of its class, otherwise the lexicon and the
    annotation disagree and a DataError names the offending token.  The
    smoothing floor is added to every structurally allowed cell before
    normalization so later re-estimation can move off observed zeros; cells
    where the tag is not a class member stay exactly 0.  Tags never observed
    get uniform rows over their allowed cells.
    """
    members = _class_members_arg(classes)
    n, m = len(ts), len(members)
    member_sets = [frozenset(mem) for mem in members]
    initial_counts = np.zeros(n)
    transition_counts = np.zeros((n, n))
    emission_counts = np.zeros((n, m))
    n_sentences = 0
    for s_index, sentence in enumerate(tagged):
        prev = None
        for t_index, (tag, class_id) in enumerate(sentence):
            if not 0 <= tag < n:
                raise DataError(f"sentence {s_index} token {t_index}: bad tag id {tag}")
            if not 0 <= class_id < m:
                raise DataError(f"sentence {s_index} token {t_index}: unknown class id {class_id}")
            if tag not in member_sets[class_id]:
                labels = "+".join(ts.label(t) for t in members[class_id])
                raise DataError(
                    f"sentence {s_index} token {t_index}: gold tag {ts.label(tag)!r} "
                    f"is not a member of the token's class {{{labels}}}"
                )
            if prev is None:
                initial_counts[tag] += 1
            else:
                transition_counts[prev, tag] += 1
            emission_counts[tag, class_id] += 1
            prev = tag
        if prev is not None:
            n_sentences += 1
    if n_sentences == 0:
        raise DataError("tagged corpus is empty")

    allowed_trans = np.ones((n, n), dtype=bool)
    uniform_trans = np.full((n, n), 1.0 / n)
    transition = _normalize_rows(transition_counts, allowed_trans, smoothing_floor, uniform_trans)

    allowed_emis = np.zeros((n, m), dtype=bool)
    for c, mem in enumerate(members):
        allowed_emis[list(mem), c] = True
    if np.any(~allowed_emis.any(axis=1)):
        orphan = int(np.nonzero(~allowed_emis.any(axis=1))[0][0])
        raise ConfigError(f"tag {ts.label(orphan)!r} belongs to no equivalence class")
    uniform_emis = allowed_emis / allowed_emis.sum(axis=1, keepdims=True)
    emission = _normalize_rows(emission_counts, allowed_emis, smoothing_floor, uniform_emis)

    initial = initial_counts + smoothing_floor
    initial /= initial.sum()
    return HmmModel(ts.labels, members, initial, transition, emission)


def train_regime(regime: str, ts: TagSet, classes, *, corpus=None, tagged=None,
                 biases=None, config: Optional[TrainingConfig] = None,
                 skip_impossible: bool = False, on_iteration=None):
    """Run one of the three training regimes; returns (model, trajectory).

    * ``bias``: needs ``corpus``; ``biases`` defaults to none (an empty bias
      set reproduces fully unbiased training); 20 iterations by default.
    * ``counted``: needs ``tagged`` and ``corpus``; 1 iteration by default.
    * ``counted-only``: needs ``tagged``; passing a config is rejected since
      no re-estimation takes place.
    """
    from .model import BiasSet, apply_biases, uniform_model

    if regime == REGIME_BIAS:
        if corpus is None:
            raise ValueError("regime 'bias' needs an untagged corpus")
        cfg = config or TrainingConfig(iterations=20)
        start = apply_biases(uniform_model(ts, classes), biases or BiasSet.empty())
        return baum_welch(start, corpus, cfg, on_iteration=on_iteration,
                          skip_impossible=skip_impossible)
    if regime == REGIME_COUNTED:
        if tagged is None or corpus is None:
            raise ValueError("regime 'counted' needs a tagged corpus and an untagged corpus")
        cfg = config or TrainingConfig(iterations=1)
        start = counted_init(tagged, ts, classes, cfg.smoothing_floor)
        return baum_welch(start, corpus, cfg, on_iteration=on_iteration,
                          skip_impossible=skip_impossible)
    if regime == REGIME_COUNTED_ONLY:
        if tagged is None:
            raise ValueError("regime 'counted-only' needs a tagged corpus")
        if config is not None:
            raise ValueError("regime 'counted-only' does no re-estimation; drop the config")
        return counted_init(tagged, ts, classes), []
    raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
