import numpy as np
import pytest
from numpy.testing import assert_almost_equal, assert_array_equal, assert_equal

from ...exceptions import DroException
from ..dataset import Dataset, GeneratorConfig, MixtureGenerator, read_csv, write_csv


def test_class_probs():
    data = Dataset([[0.0], [1.0], [2.0], [3.0]], [1, 1, 1, -1])
    assert_equal(data.class_probs, {-1.0: 0.25, 1.0: 0.75})
    assert_equal(data.min_class_prob, 0.25)
    assert_equal(data.n, 4)
    assert_equal(data.dim, 1)


def test_rejects_malformed():
    with pytest.raises(DroException):
        Dataset(np.zeros((3, 2)), [1, -1])
    with pytest.raises(DroException):
        Dataset(np.zeros((0, 2)), [])
    with pytest.raises(DroException):
        Dataset([[np.nan, 0.0]], [1])


def test_csv_columns(tmp_path):
    data = Dataset([[0.1, -0.2], [0.3, 0.4]], [1, -1])
    path = tmp_path / "data.csv"
    write_csv(data, path)
    assert_equal(path.read_text().splitlines()[0], "x_1,x_2,y")
    loaded = read_csv(path)
    assert_array_equal(loaded.x, data.x)
    assert_array_equal(loaded.y, data.y)

    rng = np.random.default_rng(3)
    data = Dataset(rng.uniform(-1, 1, (50, 3)) / 3.0, rng.choice([-1.0, 1.0], 50))
    write_csv(data, path)
    assert_array_equal(read_csv(path).x, data.x)


def test_csv_rejects_bad_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(DroException):
        read_csv(path)
    path.write_text("x_1,y\nfoo,1\n")
    with pytest.raises(DroException):
        read_csv(path)


def test_generator_reproducible_and_boxed():
    generator = MixtureGenerator(GeneratorConfig(box=0.6, sigma=0.5))
    a = generator.sample(500, np.random.default_rng(5))
    b = generator.sample(500, np.random.default_rng(5))
    assert_array_equal(a.x, b.x)
    assert np.all(np.abs(a.x) <= 0.6)
    assert_almost_equal(a.class_probs[1.0], 0.5, decimal=1)


def test_generator_config_validation():
    with pytest.raises(DroException):
        GeneratorConfig(p_plus=1.0)
    with pytest.raises(DroException):
        GeneratorConfig(dim=3)
    with pytest.raises(DroException):
        GeneratorConfig(component_weights=(0.7, 0.7))


if __name__ == "__main__":
    pytest.main([__file__])
