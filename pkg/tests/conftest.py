"""Shared fixtures and small dataset builders."""

import numpy as np
import pytest

from pusurvive.model_core import Dataset, SubjectRecord


def labeled(t, c=None, x=(1.0, 0.0)):
    return SubjectRecord(t, c, 1, x)


def unlabeled(c, x=(1.0, 0.0)):
    return SubjectRecord(None, c, 0, x)


def make_dataset(records, c_observed=True, p=2):
    return Dataset(tuple(records), p, c_observed_for_labeled=c_observed)


def random_dataset(rng, n=50, p=2, c_observed=True):
    """Random well-formed PU dataset with a mix of labeled and unlabeled rows."""
    recs = []
    for _ in range(n):
        x = tuple(rng.normal(0.5, 0.5, size=p))
        if rng.random() < 0.5:
            t = float(rng.exponential(1.0)) + 1e-3
            c = float(t + rng.exponential(1.0)) + 1e-3
            recs.append(SubjectRecord(t, c if c_observed else None, 1, x))
        else:
            recs.append(SubjectRecord(None, float(rng.exponential(1.0)) + 1e-3, 0, x))
    return Dataset(tuple(recs), p, c_observed_for_labeled=c_observed)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
