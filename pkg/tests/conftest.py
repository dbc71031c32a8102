import pytest

from sesqui import (
    PrimeField,
    Rationals,
    extension_algebra,
    field_algebra,
)


@pytest.fixture(scope="session")
def F3():
    return PrimeField(3)


@pytest.fixture(scope="session")
def F5():
    return PrimeField(5)


@pytest.fixture(scope="session")
def A3(F3):
    """GF(3) as a 1-dimensional algebra with trivial involution."""
    return field_algebra(F3)


@pytest.fixture(scope="session")
def A5(F5):
    return field_algebra(F5)


@pytest.fixture(scope="session")
def A9(F3):
    """GF(9) = GF(3)[t]/(t^2+1) with the Frobenius involution t -> t^3."""
    return extension_algebra(F3, [1, 0, 1], "conjugation")


@pytest.fixture(scope="session")
def A9_trivial(F3):
    """GF(9) as an algebra over GF(3) with the identity involution."""
    return extension_algebra(F3, [1, 0, 1], "identity")


@pytest.fixture(scope="session")
def AQ():
    """Q as a 1-dimensional algebra."""
    return field_algebra(Rationals())


@pytest.fixture(scope="session")
def AQS2():
    """Q(sqrt 2) with conjugation, as a 2-dimensional algebra over Q."""
    from fractions import Fraction

    return extension_algebra(
        Rationals(), [Fraction(-2), Fraction(0), Fraction(1)], "conjugation"
    )
