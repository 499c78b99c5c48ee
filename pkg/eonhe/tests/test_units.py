import numpy as np
import pytest

from eonhe.errors import InvalidMaterialError, UnitError
from eonhe.units import (
    CONSTANTS,
    Quantity,
    as_internal,
    convert,
    derive_constants,
    dipole_energy_ghz,
    ghz_to_rad_per_ns,
    rad_per_ns_to_ghz,
)


def test_helium_constants_from_dielectric_constant():
    assert CONSTANTS.lambda_image == pytest.approx(0.057 / (4 * 2.057), rel=1e-12)
    assert CONSTANTS.lambda_image == pytest.approx(6.928e-3, rel=1e-3)
    assert CONSTANTS.rydberg_kelvin == pytest.approx(8.0, rel=0.1)
    assert CONSTANTS.rydberg_kelvin == pytest.approx(7.58, rel=2e-3)
    assert Quantity(CONSTANTS.bohr_nm, "nm").to("A").value == pytest.approx(76, rel=0.02)


def test_rydberg_scales_with_lambda_squared():
    other = derive_constants(1.1)
    ratio = (other.lambda_image / CONSTANTS.lambda_image) ** 2
    assert other.rydberg_R / CONSTANTS.rydberg_R == pytest.approx(ratio, rel=1e-12)
    assert other.bohr_rB * other.lambda_image == pytest.approx(
        CONSTANTS.bohr_rB * CONSTANTS.lambda_image, rel=1e-12
    )


@pytest.mark.parametrize("epsilon", [1.0, 0.5, -2.0, np.nan, np.inf])
def test_invalid_material(epsilon):
    with pytest.raises(InvalidMaterialError):
        derive_constants(epsilon)


@pytest.mark.parametrize(
    "kelvin,ghz", [(1.0, 20.837), (8.0, 166.70)]
)
def test_temperature_to_frequency(kelvin, ghz):
    assert Quantity(kelvin, "K").to("GHz").value == pytest.approx(ghz, rel=1e-4)


@pytest.mark.parametrize(
    "value,unit,target",
    [
        (8.0, "K", "GHz"),
        (76.0, "A", "um"),
        (1.5, "T", "G"),
        (1e8, "cm^-2", "um^-2"),
        (3.0, "rad/ns", "MHz"),
    ],
)
def test_conversion_round_trip(value, unit, target):
    back = Quantity(value, unit).to(target).to(unit)
    assert back.value == pytest.approx(value, rel=1e-12)


def test_aliases_and_internal_values():
    assert Quantity(1, "µm").unit == "um"
    assert Quantity(2, "µm").to_internal() == pytest.approx(2000)
    assert Quantity(1, "s^-1").unit == "1/s"
    assert Quantity(1, "rad/s").to_internal() == Quantity(1, "1/s").to_internal()
    assert Quantity(2 * np.pi, "rad/ns").to("GHz").value == pytest.approx(1.0)
    assert Quantity.from_internal(3.0, "field") == Quantity(3.0, "V/cm")


def test_unit_errors():
    with pytest.raises(UnitError):
        Quantity(1, "furlong")
    with pytest.raises(UnitError):
        convert(Quantity(1, "nm"), "GHz")
    with pytest.raises(UnitError):
        as_internal(Quantity(1, "nm"), "energy")
    assert as_internal(2.5, "energy") == 2.5


def test_frequency_helpers():
    assert ghz_to_rad_per_ns(1.0) == pytest.approx(2 * np.pi)
    assert rad_per_ns_to_ghz(ghz_to_rad_per_ns(3.7)) == pytest.approx(3.7, rel=1e-14)
    # 1 V/cm across 1 cm is 1 eV
    assert dipole_energy_ghz(1.0, 1e7) == pytest.approx(241798.9, rel=1e-6)


@pytest.mark.parametrize(
    "unit,target",
    [("K", "rad/s"), ("erg", "meV"), ("nm", "cm"), ("V/cm", "statV/cm"), ("ns", "s"), ("mV", "uV"), ("cm^-1", "nm^-1")],
)
def test_round_trip_over_magnitudes(unit, target):
    rng = np.random.default_rng(3)
    values = rng.choice([-1.0, 1.0], 50) * 10 ** rng.uniform(-12, 12, 50)
    for value in values:
        back = Quantity(value, unit).to(target).to(unit)
        assert back.value == pytest.approx(value, rel=1e-12)
