import numpy as np
import pytest

from tensorcomp.io import FormatError, read_dataset, read_tensor, write_dataset, write_tensor
from tensorcomp.obs_model import Dataset, sample_dataset


def test_tensor_round_trip_bitwise(tmp_path, rng):
    t = rng.standard_normal((3, 4, 5))
    t[0, 0, 0] = -0.0
    t[1, 1, 1] = 5e-324
    path = tmp_path / "t.tnsr"
    write_tensor(path, t)
    back = read_tensor(path)
    assert back.shape == t.shape
    assert back.tobytes() == t.tobytes()
    blob = path.read_bytes()
    assert blob.startswith(b"TNSR1\n3 3 4 5\n")
    assert len(blob) == len(b"TNSR1\n3 3 4 5\n") + 8 * 60


def test_tensor_payload_is_little_endian(tmp_path):
    path = tmp_path / "t.tnsr"
    write_tensor(path, np.array([[1.0, 2.0]]))
    assert path.read_bytes().endswith(np.array([1.0, 2.0], dtype="<f8").tobytes())


@pytest.mark.parametrize("blob", [
    b"TNSR2\n2 1 1\n" + bytes(8),
    b"TNSR1\n2 2 2\n" + bytes(8 * 3),
    b"TNSR1\n3 2 2\n" + bytes(8 * 4),
    b"TNSR1\n2 0 2\n",
    b"TNSR1\n2 a b\n",
    b"TNSR1\n2 100000 100000\n",
])
def test_tensor_corrupt_files(tmp_path, blob):
    path = tmp_path / "bad.tnsr"
    path.write_bytes(blob)
    with pytest.raises(FormatError):
        read_tensor(path)


def test_dataset_round_trip(tmp_path, rng):
    data = sample_dataset(rng.standard_normal((3, 4, 2)), 50, 0.7, rng)
    path = tmp_path / "obs.csv"
    write_dataset(path, data)
    assert path.read_text().splitlines()[0] == "i_0,i_1,i_2,y"
    back = read_dataset(path, (3, 4, 2))
    assert back == data
    assert back.values.tobytes() == data.values.tobytes()


def test_dataset_single_row(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text("i_0,i_1,y\n1,0,0.1\n")
    data = read_dataset(path, (2, 2))
    assert data.n == 1 and data.values[0] == 0.1


def test_dataset_out_of_range(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text("i_0,i_1,y\n2,0,1.0\n")
    with pytest.raises(FormatError):
        read_dataset(path, (2, 2))


def test_dataset_bad_header(tmp_path):
    path = tmp_path / "obs.csv"
    write_dataset(path, Dataset((2, 2), [[0, 0]], [1.0]))
    with pytest.raises(FormatError):
        read_dataset(path, (2, 2, 2))
