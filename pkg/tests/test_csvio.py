import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from twomode.csvio import quantize, read_csv, write_csv


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_round_trip_is_exact_after_quantization(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("csv") / "out.csv"
    write_csv(path, {"a": values, "b": values[::-1]}, {"note": "x"})
    header, cols = read_csv(path)
    assert header == {"note": "x"}
    assert np.array_equal(cols["a"], quantize(values))
    assert np.array_equal(cols["b"], quantize(values[::-1]))


def test_multiline_header(tmp_path):
    text = "[state]\nkind = fock\n\n[system]\ngamma_r = 0.5"
    path = write_csv(tmp_path / "x.csv", {"t_gamma0": [0.0, 0.1], "p": [0.0, 1 / 3]},
                     {"config": text, "run": 1})
    raw = path.read_text()
    assert raw.startswith("# config:\n#   [state]\n")
    header, cols = read_csv(path)
    assert header["config"] == text.replace("\n\n", "\n")
    assert header["run"] == "1"
    assert cols["p"][1] == float("0.333333333333")
