"""Grid field checks.  Norms are cell sums on a periodic box, which for
Gaussians well inside the box converge spectrally, so closed-form norms are
matched essentially to machine precision."""

import math

import numpy as np
import pytest

from fujitalab.field import (
    BlowupSignal,
    BoxGeometry,
    GridField,
    coordinates,
    lq_norm,
    nonlinearity,
    nonlocal_factor,
    read_binary,
    sample,
    write_binary,
    write_csv,
)
from fujitalab.problem import ProfileSpec, evaluate_profile


def test_coordinates_layout():
    L, M = 16.0, 64
    ax = coordinates(L, M)
    assert len(ax) == M
    assert ax[0] == -L
    h = 2 * L / M
    assert np.allclose(np.diff(ax), h)
    assert ax[-1] == pytest.approx(L - h)  # right endpoint omitted


def test_sample_matches_pointwise_evaluation():
    prof = ProfileSpec.gaussian_sum([(1.0, 1.0, (0.3, -0.2)), (-0.4, 2.5, (0.0, 1.0))])
    f = sample(prof, 2, 8.0, 32)
    ax = f.axis
    pts = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1)
    assert np.allclose(f.values, evaluate_profile(prof, pts), atol=1e-14)


def test_sample_zero_profile():
    f = sample(ProfileSpec.zero(), 3, 4.0, 8)
    assert f.values.shape == (8, 8, 8)
    assert not f.values.any()


def test_lq_norm_gaussian_closed_form():
    # ||c e^{-r|x|^2}||_q = |c| (pi/(q r))^{N/(2q)}.  Spacing must stay below
    # ~0.3 for the cell sum of e^{-3.5 x^2} to reach 1e-12; the dim-3 box is
    # shrunk to keep the cell count down at that spacing.
    for dim, M, L in ((1, 256, 16.0), (2, 128, 16.0), (3, 64, 8.0)):
        f = sample(ProfileSpec.gaussian(0.7, 1.0, (0.0,) * dim), dim, L, M)
        for q in (1.0, 2.0, 3.5):
            exact = 0.7 * (math.pi / q) ** (dim / (2 * q))
            assert lq_norm(f, q) == pytest.approx(exact, rel=1e-12)
        assert lq_norm(f, math.inf) == pytest.approx(0.7, rel=1e-12)


def test_lq_norm_rejects_small_q():
    f = sample(ProfileSpec.gaussian(1.0, 1.0, (0.0,)), 1, 8.0, 16)
    with pytest.raises(ValueError):
        lq_norm(f, 0.5)


def test_nonlocal_factor_conventions():
    f = sample(ProfileSpec.gaussian(2.0, 1.0, (0.0,)), 1, 16.0, 64)
    assert nonlocal_factor(f, 2.0, 0.0) == 1.0  # 0^0 convention, never evaluates the norm
    n2 = lq_norm(f, 2.0)
    assert nonlocal_factor(f, 2.0, 3.0) == pytest.approx(n2**3, rel=1e-13)


def test_nonlinearity_is_nonnegative_power():
    prof = ProfileSpec.gaussian_sum([(1.0, 1.0, (0.0,)), (-2.0, 1.0, (3.0,))])
    f = sample(prof, 1, 16.0, 128)
    load = nonlinearity(f, 3.0, 2.0, 1.0)
    expected = lq_norm(f, 2.0) * np.abs(f.values) ** 3.0
    assert np.allclose(load.values, expected, rtol=1e-13)
    assert load.values.min() >= 0.0  # |u|^p, not sign-carrying


def test_overflow_surfaces_as_blowup_signal():
    f = GridField(1, 8.0, np.full(16, 1e300))
    with pytest.raises(BlowupSignal):
        lq_norm(f, 2.0)
    with pytest.raises(BlowupSignal):
        nonlocal_factor(f, 1.0, 2.0)
    with pytest.raises(BlowupSignal):
        nonlinearity(f, 2.0, 2.0, 0.0)
    with pytest.raises(BlowupSignal):
        GridField(1, 8.0, np.array([0.0, math.inf] + [0.0] * 14))


def test_geometry_validation():
    with pytest.raises(ValueError):
        GridField(1, 8.0, np.zeros(17))  # not a power of two
    with pytest.raises(ValueError):
        GridField(2, 8.0, np.zeros((8, 16)))  # ragged
    with pytest.raises(ValueError):
        GridField(1, -1.0, np.zeros(16))
    with pytest.raises(ValueError):
        sample(ProfileSpec.zero(), 4, 8.0, 8)  # dim cap
    with pytest.raises(ValueError):
        sample(ProfileSpec.zero(), 3, 8.0, 512)  # cell cap
    assert BoxGeometry(12.0, None).resolve(3) == (12.0, 64)


def test_field_arithmetic_checks_geometry():
    f = sample(ProfileSpec.gaussian(1.0, 1.0, (0.0,)), 1, 8.0, 16)
    g = sample(ProfileSpec.gaussian(1.0, 1.0, (0.0,)), 1, 8.0, 32)
    with pytest.raises(ValueError):
        f + g
    h = 2.0 * f - f
    assert np.allclose(h.values, f.values)
    assert abs(-1.0 * f).values.min() >= 0


def test_binary_round_trip(tmp_path):
    prof = ProfileSpec.gaussian_sum([(1.0, 1.0, (0.3, 0.1)), (0.2, 4.0, (-2.0, 0.0))])
    f = sample(prof, 2, 8.0, 32)
    path = tmp_path / "field.bin"
    write_binary(f, path)
    g = read_binary(path)
    assert g.dim == f.dim and g.half_width == f.half_width
    assert np.array_equal(g.values, f.values)  # bit-exact


def test_binary_rejects_garbage(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOTAGRID" + b"\x00" * 32)
    with pytest.raises(ValueError):
        read_binary(path)
    f = sample(ProfileSpec.gaussian(1.0, 1.0, (0.0,)), 1, 8.0, 16)
    write_binary(f, path)
    data = path.read_bytes()
    path.write_bytes(data[:-8])  # drop one value
    with pytest.raises(ValueError):
        read_binary(path)


def test_csv_export(tmp_path):
    f1 = sample(ProfileSpec.gaussian(1.0, 1.0, (0.0,)), 1, 8.0, 16)
    p1 = tmp_path / "f1.csv"
    write_csv(f1, p1)
    lines = p1.read_text().splitlines()
    assert lines[0] == "x,value"
    assert len(lines) == 17
    x0, v0 = lines[1].split(",")
    assert float(x0) == -8.0 and float(v0) == f1.values[0]

    f2 = sample(ProfileSpec.gaussian(1.0, 1.0, (0.0, 0.0)), 2, 8.0, 8)
    p2 = tmp_path / "f2.csv"
    write_csv(f2, p2)
    assert p2.read_text().splitlines()[0] == "x,y,value"

    f3 = sample(ProfileSpec.zero(), 3, 8.0, 8)
    with pytest.raises(ValueError):
        write_csv(f3, tmp_path / "f3.csv")
