"""Shared golden datasets and specs used across the test suite."""

import pytest

import seqstop as sq

# Nine normal observations accruing against a null mean of 3 (sigma 1.5).
ONE_Z_DATA = [
    4.060319, 5.275465, 3.746557, 7.392921, 5.494262,
    3.769297, 5.731144, 6.107487, 5.863672,
]

# Twelve observations for the unknown-variance one-sample test, null mean 3.
ONE_T_DATA = [
    1.738717, 5.076539, 1.116762, 3.105214, 5.567161, 2.095638,
    2.291750, 2.046943, 2.571340, 3.207162, 4.841446, 1.797331,
]

# Thirty binary outcomes against a null success rate of 0.2.
ONE_PROP_DATA = [
    0, 0, 0, 0, 1, 0, 1, 1, 1, 0, 1, 0, 0, 1, 0,
    0, 1, 0, 1, 1, 1, 1, 0, 0, 0, 1, 0, 1, 0, 0,
]

# Nine paired observations for the known-variance two-sample test (sigma 1.5).
TWO_Z_DATA = list(zip(
    [0.6546282, 2.2772738, 4.3817680, 0.3044365, 1.8796224,
     2.1986304, 3.0619321, 1.6404530, 4.9767109],
    [0.5570999, 1.5612114, 2.3881823, 0.2718022, 2.2936742,
     2.0451859, 2.1281266, 3.6749153, 0.1717139],
))

# Nineteen pairs for the unknown-variance two-sample test.
TWO_T_DATA = list(zip(
    [-0.93968072, 0.27546499, -1.25344292, 2.39292120, 0.49426166,
     -1.23070258, 0.73114358, 1.10748706, 0.86367203, -0.45808258,
     2.26767175, 0.58476485, -0.93186087, -3.32204983, 1.68739638,
     -0.06740041, -0.02428539, 1.41575432, 1.23183179],
    [0.6546282, 2.2772738, 4.3817680, 0.3044365, 1.8796224,
     2.1986304, 3.0619321, 1.6404530, 4.9767109, 1.7918195,
     2.6264761, 3.4726292, 1.4109570, 0.4404965, 4.6733434,
     -1.4666036, 3.3179069, 2.0537101, 3.5192430],
))

# Forty-six water-quality assessments (1 = site fails the quality objective),
# tested against a 3% allowable exceedance rate.
WATER_DATA = [
    1, 0, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 1, 0,
    0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0,
]


@pytest.fixture
def one_z_spec():
    return sq.TestSpec(family="one_z", null_value=3.0, sigma0=1.5,
                       alpha=0.005, beta=0.2, n_max=30)


@pytest.fixture
def one_t_spec():
    return sq.TestSpec(family="one_t", null_value=3.0,
                       alpha=0.005, beta=0.2, n_max=30)


@pytest.fixture
def one_prop_spec():
    return sq.TestSpec(family="one_prop", null_value=0.2,
                       alpha=0.005, beta=0.2, n_max=30)


@pytest.fixture
def two_z_spec():
    return sq.TestSpec(family="two_z", sigma0=1.5,
                       alpha=0.005, beta=0.2, n1_max=30, n2_max=30)


@pytest.fixture
def two_t_spec():
    return sq.TestSpec(family="two_t",
                       alpha=0.005, beta=0.2, n1_max=30, n2_max=30)


@pytest.fixture
def water_spec():
    return sq.TestSpec(family="one_prop", null_value=0.03,
                       alpha=0.005, beta=0.2, n_max=46)
