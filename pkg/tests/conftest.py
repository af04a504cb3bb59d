import pytest

from platoonctrl.synthesis import (band_grid, candidate_controller,
                                   certify_controller, search_parameters)


@pytest.fixture(scope="session")
def certified_m4():
    """The m=4, eps=0.1 certified design; the scan is the expensive part."""
    ga, gb = search_parameters(4, 0.1)
    c = candidate_controller(4, ga, gb)
    cert = certify_controller(c, 4, 0.1, band_grid(gb)).with_gammas(ga, gb)
    return c, cert
