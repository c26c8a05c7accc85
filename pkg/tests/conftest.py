"""Shared fixtures: expensive orbits, pipeline runs, and their wall-clock times.

Everything here is deterministic, so session scope is safe and keeps the
suite from re-enumerating the same orbits in every module.
"""

from __future__ import annotations

import time

import pytest

from kleindim import (
    choose_basepoint,
    cyclic_loxodromic,
    enumerate_orbit,
    find_loxodromic,
    fuchsian_lattice,
    origin,
    sample_limit_set,
    schottky_f2,
    series_chain_report,
    verify_inequality,
)


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - t0


@pytest.fixture(scope="session")
def schottky():
    return schottky_f2()


@pytest.fixture(scope="session")
def cyclic():
    return cyclic_loxodromic()


@pytest.fixture(scope="session")
def lattice():
    return fuchsian_lattice()


@pytest.fixture(scope="session")
def schottky_orbit8(schottky):
    return enumerate_orbit(schottky, origin(2), 8)


@pytest.fixture(scope="session")
def schottky_orbit10(schottky):
    return enumerate_orbit(schottky, origin(2), 10)


@pytest.fixture(scope="session")
def schottky_h(schottky):
    return find_loxodromic(schottky, 6)


@pytest.fixture(scope="session")
def schottky_sample10(schottky_orbit10, schottky_h):
    return sample_limit_set(schottky_orbit10, schottky_h)


@pytest.fixture(scope="session")
def cyclic_orbit10(cyclic):
    return enumerate_orbit(cyclic, origin(2), 10)


@pytest.fixture(scope="session")
def cyclic_h(cyclic):
    return find_loxodromic(cyclic, 6)


@pytest.fixture(scope="session")
def lattice_basepoint(lattice):
    h = find_loxodromic(lattice, 6)
    return choose_basepoint(h, lattice, 6)


@pytest.fixture(scope="session")
def verify_cyclic10(cyclic):
    return _timed(verify_inequality, cyclic, 10)


@pytest.fixture(scope="session")
def verify_schottky10(schottky):
    return _timed(verify_inequality, schottky, 10)


@pytest.fixture(scope="session")
def verify_lattice10(lattice):
    return _timed(verify_inequality, lattice, 10)


@pytest.fixture(scope="session")
def chain_schottky10(schottky, verify_schottky10):
    report, _ = verify_schottky10
    dim = report.dim_est
    return series_chain_report(schottky, 10, dim + 0.4, dim + 0.2)
