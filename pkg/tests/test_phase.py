"""Coupling-plane classification."""

import numpy as np
import pytest

from dicke.model import SystemParams
from dicke.phase import (
    classify_point,
    collapse_sequence,
    reflected_label,
)


def test_census_labels_fast_points():
    assert classify_point(SystemParams(1.0, 1.0, 1.0, 0.4, 0.4)).label == \
        "N_down"
    assert classify_point(SystemParams(1.0, 1.0, 1.0, 1.0, 1.0)).label == "SR"
    assert classify_point(SystemParams(1.0, 1.0, 1.0, 2.0, 0.9)).label == \
        "SR+N_down"
    # above the pole-flip line the upper pole is the stable normal state
    assert classify_point(SystemParams(1.0, 1.0, 1.0, 2.0, 4.5)).label == \
        "SR+N_up"


def test_reflected_label_swaps_poles():
    assert reflected_label("N_down") == "N_up"
    assert reflected_label("SR+N_up") == "SR+N_down"
    assert reflected_label(reflected_label("SR+N_down")) == "SR+N_down"
    assert reflected_label("Osc") == "Osc"


def test_collapse_sequence():
    labels = ["N_down", "N_down", "SR", "Chaos_localized", "Chaos_merged",
              "SR", "SR"]
    assert collapse_sequence(labels) == ["N_down", "SR", "Chaos", "SR"]
    assert collapse_sequence(labels, merge_chaos=False) == \
        ["N_down", "SR", "Chaos_localized", "Chaos_merged", "SR"]


@pytest.mark.slow
def test_oscillatory_point_label():
    pt = classify_point(SystemParams(1.0, 1.0, 1.0, 1.0, 1.45), T_lyap=500.0)
    assert pt.label == "Osc"
    # the finite-time estimate carries a positive bias of order 1/T along
    # the neutral direction; it only needs to stay clearly below chaos scale
    assert abs(pt.lyapunov_max) < 1e-2


@pytest.mark.slow
def test_chaotic_point_label():
    pt = classify_point(SystemParams(1.0, 1.0, 1.0, 1.5, 2.225), T_lyap=800.0)
    assert pt.label.startswith("Chaos")
    assert pt.lyapunov_max > 1e-3
