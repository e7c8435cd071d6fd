import pytest

from vanetconn import channel
from vanetconn.scenario import ScenarioParams

# the reference operating point: 33 dBm transmit power, 0.01 mW noise,
# beta = 10, path-loss exponent 2, a 10 km segment
REF_KW = dict(
    road_length=10_000.0,
    tx_power=channel.dbm_to_mw(33.0),
    noise_power=0.01,
    beta=10.0,
    ple=2,
)


def _make(rho=0.019, psi_db=15.0, **overrides):
    kw = {**REF_KW, **overrides}
    return ScenarioParams(rho=rho, psi=channel.db_to_linear(psi_db), **kw)


@pytest.fixture
def make_params():
    return _make
