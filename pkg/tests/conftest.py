# -*- coding: utf-8 -*-
#
# This file is part of the entropy-lpp package.
#
# entropy-lpp is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Pytest configuration for entropy-lpp.

Statistical acceptance checks at full replica counts are marked ``slow``
and skipped by ``run-tests.sh`` unless it is called with ``--slow``.
"""

from hypothesis import HealthCheck, settings
import pytest

from entropy_lpp.config import current_config

pytest_plugins = [
    "tests.fixtures.environments",
]

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture()
def config_override(monkeypatch):
    """Temporarily set attributes of the shared configuration object."""

    def override(**values):
        for key, value in values.items():
            monkeypatch.setattr(current_config, key, value)

    return override
