import logging

import pytest
from pydantic import BaseModel, ValidationError

from infra.error_handler import (
    EXIT_FAILURE,
    EXIT_INVALID_CONFIG,
    EXIT_OK,
    ConfigError,
    ErrorHandler,
    ModelError,
    StncError,
    field_of,
)


class _Sample(BaseModel):
    count: int


handler = ErrorHandler(logging.getLogger("test_error_handler"))


def test_config_error_names_field():
    error = ConfigError("snr_db", "must be strictly increasing")
    assert error.field == "snr_db"
    assert "'snr_db'" in str(error)
    assert isinstance(error, StncError)


def test_model_error_is_also_a_value_error():
    assert issubclass(ModelError, ValueError)


def test_field_of_validation_error():
    with pytest.raises(ValidationError) as info:
        _Sample(count="many")
    assert field_of(info.value) == "count"


def test_success_maps_to_ok():
    @handler.with_exit_status()
    def ok() -> None:
        return None

    assert ok() == EXIT_OK


def test_config_problems_map_to_invalid_config(caplog):
    @handler.with_exit_status()
    def bad_config() -> None:
        raise ConfigError("relays", "must not be empty")

    @handler.with_exit_status()
    def bad_model() -> None:
        _Sample(count="many")

    with caplog.at_level(logging.ERROR):
        assert bad_config() == EXIT_INVALID_CONFIG
        assert bad_model() == EXIT_INVALID_CONFIG
    assert "'relays'" in caplog.text
    assert "'count'" in caplog.text


def test_toolkit_failure_maps_to_failure():
    @handler.with_exit_status()
    def broken() -> None:
        raise ModelError("rate must be positive")

    assert broken() == EXIT_FAILURE


def test_unexpected_errors_propagate():
    @handler.with_exit_status()
    def crash() -> None:
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        crash()


def test_wrapper_keeps_function_name():
    @handler.with_exit_status()
    def named() -> None:
        return None

    assert named.__name__ == "named"
