from quadwalks.kernel import parse_stepset
from quadwalks.models import all_models, is_excluded, model_classes, taxonomy


def test_raw_and_class_counts():
    assert len(all_models()) == 138
    assert len(model_classes()) == 79


def test_classes_are_closed_under_transpose():
    masks = {S.mask for S in all_models()}
    for S in all_models():
        assert S.transpose().mask in masks


def test_exclusion_reasons():
    assert is_excluded(parse_stepset("1,0;0,1")) == "missing-direction"
    assert is_excluded(parse_stepset("-1,0;0,-1;1,1")) is None
    assert is_excluded(parse_stepset("-1,-1;1,1;-1,0;0,1")) == "half-plane"
    assert is_excluded(parse_stepset("-1,1;1,-1;-1,-1;0,-1;-1,0")) == "finite"


def test_taxonomy_on_raw_sets():
    taxa = taxonomy(all_models(), jobs=2)
    assert sum(t.singular for t in taxa) == 7
    assert sum(not t.singular and t.order != "Infinite" for t in taxa) == 39
    assert sum(t.order == "Infinite" for t in taxa) == 92
