import numpy as np
import pytest

from kiimht.common import Direction, InputError
from kiimht.datagen import (
    Mechanism,
    MechanismSpec,
    Noise,
    PairDataset,
    SettingKind,
    apply_mechanism,
    derive_seed,
    enumerate_settings,
    export_dataset,
    generate_2d,
    generate_scalar,
    parse_columns_header,
)


def test_mechanism_substitution():
    assert apply_mechanism(Mechanism.ANM1, 1.0, 0.0) == 2.0
    assert apply_mechanism(Mechanism.ANM2, 1.5, 0.25) == 1.75
    assert apply_mechanism(Mechanism.MNM1, 1.0, 0.0) == 2.0
    assert apply_mechanism(Mechanism.MNM2, 0.0, 0.0) == 1.0
    assert apply_mechanism(Mechanism.CNM, 0.0, 0.0) == pytest.approx(np.log(5.0), rel=1e-15)
    assert apply_mechanism(Mechanism.CNM, 0.0, 0.0) == pytest.approx(1.609438, abs=1e-6)


def test_generate_scalar_shapes_and_determinism():
    spec = MechanismSpec(Mechanism.CNM, Noise.StdUniform, 50, 9)
    a, b = generate_scalar(spec), generate_scalar(spec)
    assert a.x.shape == a.y.shape == (50, 1)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)
    assert a.truth is Direction.XtoY
    c = generate_scalar(MechanismSpec(Mechanism.CNM, Noise.StdUniform, 50, 10))
    assert not np.array_equal(a.x, c.x)


def test_generate_scalar_follows_mechanism():
    spec = MechanismSpec(Mechanism.ANM1, Noise.StdUniform, 500, 1)
    ds = generate_scalar(spec)
    eps = ds.y[:, 0] - (ds.x[:, 0] ** 3 + ds.x[:, 0])
    assert eps.min() >= 0.0 and eps.max() < 1.0


def test_generate_2d():
    a = MechanismSpec(Mechanism.ANM1, Noise.StdNormal)
    b = MechanismSpec(Mechanism.ANM2, Noise.StdNormal)
    ds = generate_2d(a, b, 5, 3)
    assert ds.x.shape == ds.y.shape == (5, 2)
    ds2 = generate_2d(a, b, 5, 3)
    np.testing.assert_array_equal(ds.y, ds2.y)
    # per-dimension substitution at x-row (1, 1), eps-row (0, 0)
    row = [apply_mechanism(Mechanism.ANM1, 1.0, 0.0), apply_mechanism(Mechanism.ANM2, 1.0, 0.0)]
    assert row == [2.0, 1.0]
    with pytest.raises(InputError):
        generate_2d(a, a, 5, 0)
    with pytest.raises(InputError):
        generate_2d(a, MechanismSpec(Mechanism.CNM, Noise.StdUniform), 5, 0)


def test_enumerate_settings():
    scalar = enumerate_settings(SettingKind.Scalar)
    two = enumerate_settings(SettingKind.TwoDim)
    assert len(scalar) == 10 and len(two) == 20
    assert scalar[0].key == "ANM1-N" and scalar[1].key == "ANM1-U"
    assert two[0].mechanisms == (Mechanism.ANM1, Mechanism.ANM2)
    assert two[0].label == "ANM-1 ANM-2"
    assert len({s.key for s in two}) == 20
    assert two[5].generate(5, 0).x.shape == (5, 2)


def test_spec_validation():
    with pytest.raises(InputError):
        MechanismSpec(Mechanism.ANM1, Noise.StdNormal, n=1)
    with pytest.raises(ValueError):
        MechanismSpec("XYZ", Noise.StdNormal)


def test_swapped():
    ds = PairDataset(np.arange(3.0), np.arange(3.0) * 2, Direction.XtoY)
    sw = ds.swapped()
    np.testing.assert_array_equal(sw.x, ds.y)
    assert sw.truth is Direction.YtoX
    with pytest.raises(InputError):
        PairDataset(np.arange(3.0), np.arange(4.0))


def test_derive_seed():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert derive_seed(1, 2, 3) != derive_seed(1, 2, 4)
    assert 0 <= derive_seed(0) < 2**63


def test_export_roundtrip(tmp_path):
    ds = generate_2d(MechanismSpec(Mechanism.MNM1, Noise.StdNormal),
                     MechanismSpec(Mechanism.CNM, Noise.StdNormal), 6, 2)
    path = tmp_path / "d.txt"
    export_dataset(ds, path)
    lines = path.read_text().splitlines()
    assert parse_columns_header(lines[:3]) == (2, 2)
    data = np.loadtxt(path)
    np.testing.assert_array_equal(data, np.hstack([ds.x, ds.y]))
    assert parse_columns_header(["# nothing"]) is None
