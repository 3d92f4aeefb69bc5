import numpy as np
import pytest

from pfkex.phantom import BACKGROUND, CSF, GM, WM, brain_phantom


def test_tissue_values_match_table():
    tis = brain_phantom(64)
    wm = tis.labels == WM
    gm = tis.labels == GM
    csf = tis.labels == CSF
    assert wm.any() and gm.any() and csf.any()
    assert np.all(tis.rho[wm] == 0.65)
    assert np.all(tis.t1_ms[wm] == 650.0)
    assert np.all(tis.t2_ms[wm] == 80.0)
    assert np.all(tis.rho[gm] == 0.80)
    assert np.all(tis.t1_ms[gm] == 950.0)
    assert np.all(tis.t2_ms[gm] == 100.0)
    assert np.all(tis.rho[csf] == 0.90)
    assert np.all(tis.t1_ms[csf] == 4000.0)
    assert np.all(tis.t2_ms[csf] == 2000.0)


def test_background_is_empty():
    tis = brain_phantom(64)
    bg = tis.labels == BACKGROUND
    assert bg.any()
    assert np.all(tis.rho[bg] == 0.0)
    # corners are background
    assert tis.labels[0, 0] == BACKGROUND


def test_concentric_layout():
    tis = brain_phantom(128)
    c = 64
    assert tis.labels[c, c] == CSF
    assert tis.labels[c, c + 20] == GM
    assert tis.labels[c, c + 38] == WM
    # t1 >= t2 wherever tissue is present
    tissue = tis.labels != BACKGROUND
    assert np.all(tis.t1_ms[tissue] >= tis.t2_ms[tissue])


def test_rejects_small_grids():
    with pytest.raises(ValueError):
        brain_phantom(16)
