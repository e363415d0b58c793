import os
import subprocess
import sys

import numpy as np
import pytest

from smoothnp import _backend, _pycore
from smoothnp.kernels import get_kernel

compiled = pytest.importorskip("smoothnp._core")


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(1)
    return np.ascontiguousarray(rng.standard_normal((50, 300)))


@pytest.mark.parametrize("name", ["epanechnikov", "a11zero", "epanechnikov4"])
def test_parity(data, name):
    b, c = get_kernel(name).cdf_table()
    h = 0.07
    for theta in (0.0, 0.3):
        assert np.allclose(compiled.sign_sum_rows(data, theta, h, b, c),
                           _pycore.sign_sum_rows(data, theta, h, b, c), atol=1e-10)
        assert np.allclose(compiled.walsh_sum_rows(data, theta, h, b, c),
                           _pycore.walsh_sum_rows(data, theta, h, b, c), atol=1e-9)
    row = np.ascontiguousarray(data[0])
    direct = compiled.walsh_sum_direct(row, 0.1, h, b, c)
    assert direct == pytest.approx(compiled.walsh_sum_rows(data[:1], 0.1, h, b, c)[0], abs=1e-9)
    assert direct == pytest.approx(_pycore.walsh_sum_direct(row, 0.1, h, b, c), abs=1e-9)
    t = np.linspace(-2, 2, 101)
    assert np.allclose(compiled.kernel_cdf(t, b, c), _pycore.kernel_cdf(t, b, c), atol=1e-15)


def test_count_parity(data):
    assert np.array_equal(compiled.walsh_count_rows(data), _pycore.walsh_count_rows(data))


def test_selected_backend_is_compiled():
    assert _backend.BACKEND == "compiled"


def test_env_var_forces_fallback():
    code = ("import smoothnp, numpy as np; print(smoothnp.BACKEND); "
            "from smoothnp.oracle import enumerate_pvalue_comparison as e; "
            "print([(l.s_wins, l.w_wins) for l in e(10).levels])")
    env = {**os.environ, "SMOOTHNP_BACKEND": "python"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split("\n")
    assert out[0] == "python"
    assert out[1] == "[(25, 82), (25, 48), (5, 21)]"
