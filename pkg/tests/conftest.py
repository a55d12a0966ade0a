import pytest
from hypothesis import HealthCheck, settings

from lacunary.oracles import (
    AbelianOracle,
    FreeOracle,
    FreeProductOracle,
    Presentation,
    cyclic_oracle,
    parse_presentation,
)

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GENUS2_TEXT = "[generators] a b c d\n[relator] abABcdCD\n"


@pytest.fixture(scope="session")
def genus2() -> Presentation:
    return parse_presentation(GENUS2_TEXT)


@pytest.fixture(scope="session")
def f2() -> FreeOracle:
    return FreeOracle("ab")


@pytest.fixture(scope="session")
def z2() -> AbelianOracle:
    return AbelianOracle("ab")


@pytest.fixture(scope="session")
def z4_z6() -> FreeProductOracle:
    return FreeProductOracle([cyclic_oracle(4, "a"), cyclic_oracle(6, "b")])
