import pytest

from weylchow.ahss import run_ahss
from weylchow.builtin import f4_chart, spin7_chart
from weylchow.restriction import build_spin7_model


@pytest.fixture(scope="session")
def spin7_builtin():
    return spin7_chart(window=44)


@pytest.fixture(scope="session")
def spin7_ahss(spin7_builtin):
    return run_ahss(spin7_builtin.chart, v_max=3, max_total=28)


@pytest.fixture(scope="session")
def spin7_model():
    return build_spin7_model(window=28)


@pytest.fixture(scope="session")
def f4_builtin():
    return f4_chart(window=66)


@pytest.fixture(scope="session")
def f4_ahss(f4_builtin):
    return run_ahss(f4_builtin.chart, v_max=2, max_total=48)
