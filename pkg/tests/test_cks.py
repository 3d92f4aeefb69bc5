import numpy as np
import pytest

from pfkex.cks import read_grid, write_grid
from pfkex.grids import ComplexGrid


def test_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.normal(size=(9, 7)) + 1j * rng.normal(size=(9, 7))
    g = ComplexGrid(data, 4, 3)
    path = tmp_path / "grid.cks"
    write_grid(path, g)
    back = read_grid(path)
    assert back.ny == 9 and back.nx == 7
    assert back.center_k == 4 and back.center_n == 3
    assert np.array_equal(back.data, g.data)

    # byte-for-byte determinism of the writer
    path2 = tmp_path / "grid2.cks"
    write_grid(path2, g)
    assert path.read_bytes() == path2.read_bytes()


def test_header_layout(tmp_path):
    g = ComplexGrid.zeros(2, 3)
    path = tmp_path / "grid.cks"
    write_grid(path, g)
    raw = path.read_bytes()
    assert raw[:4] == b"CKS1"
    assert int.from_bytes(raw[4:8], "little") == 2
    assert int.from_bytes(raw[8:12], "little") == 3
    assert int.from_bytes(raw[12:16], "little") == 1
    assert int.from_bytes(raw[16:20], "little") == 1
    assert len(raw) == 20 + 2 * 3 * 16


def test_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.cks"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ValueError, match="not a CKS1 file"):
        read_grid(path)


def test_rejects_truncated(tmp_path):
    g = ComplexGrid.zeros(4, 4)
    path = tmp_path / "trunc.cks"
    write_grid(path, g)
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(ValueError, match="expected"):
        read_grid(path)
