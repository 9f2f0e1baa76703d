"""Enumeration of the small-step models and their taxonomy.

Of the 2^8 step sets, those whose walks are trivial or reduce to a
half-plane problem are discarded:

* a set with no step of some x-direction or y-direction (no i = 1, no
  i = -1, no j = 1 or no j = -1) gives an essentially one-dimensional or
  trivially confined model;
* a set lying in the closed half-plane ``j >= i`` or ``j <= i`` makes one
  quadrant constraint redundant;
* a set with ``i + j <= 0`` for every step gives finitely many walks.

Identifying a set with its diagonal reflection leaves 79 classes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import StepSet, is_singular, kernel_data, stepset_from_mask


def is_excluded(S: StepSet) -> str | None:
    """Reason for discarding S, or None for a genuine quadrant model."""
    st = S.steps
    for axis, sgn in ((0, 1), (0, -1), (1, 1), (1, -1)):
        if not any(s[axis] == sgn for s in st):
            return "missing-direction"
    if all(j >= i for i, j in st) or all(j <= i for i, j in st):
        return "half-plane"
    if all(i + j <= 0 for i, j in st):
        return "finite"
    return None


def all_models() -> list:
    """Every non-excluded step set, as StepSets ordered by mask."""
    out = []
    for m in range(1, 256):
        S = stepset_from_mask(m)
        if is_excluded(S) is None:
            out.append(S)
    return out


def model_classes() -> list:
    """One representative (smaller mask) per pair ``{S, S^T}``."""
    seen = set()
    reps = []
    for S in all_models():
        if S.mask in seen:
            continue
        T = S.transpose()
        seen.update({S.mask, T.mask})
        reps.append(S if S.mask <= T.mask else T)
    return reps


@dataclass(frozen=True)
class Taxon:
    S: StepSet
    singular: bool
    order: object  # int, "Infinite" or None for singular sets


def classify_model(S: StepSet, z: float | None = None) -> Taxon:
    """Singularity and group order of one model."""
    from .group import group_order_on_curve

    if is_singular(S):
        return Taxon(S, True, None)
    z = 1.0 / (2 * S.size) if z is None else z
    return Taxon(S, False, group_order_on_curve(kernel_data(S, z)))


def taxonomy(models=None, jobs: int = 1) -> list:
    """Classify each model (defaults to the 79 classes)."""
    models = model_classes() if models is None else models
    if jobs == 1:
        return [classify_model(S) for S in models]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(classify_model, models))


def infinite_group_models() -> list:
    """The non-singular classes with infinite group."""
    return [t.S for t in taxonomy() if not t.singular and t.order == "Infinite"]
