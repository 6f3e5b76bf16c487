"""Unit tests for logging utilities."""

import json
import sys
from unittest.mock import patch, MagicMock
from src.utils.logging_utils import (
    setup_logging,
    generate_run_id,
    log_command,
    log_computation,
    log_check_result,
    get_logger
)


def test_generate_run_id():
    """Test run ID generation format and uniqueness."""
    run_id1 = generate_run_id()
    run_id2 = generate_run_id()

    assert run_id1.startswith("run_")
    assert run_id1 != run_id2

    # run_timestamp_hash
    parts = run_id1.split("_")
    assert len(parts) == 3
    assert parts[0] == "run"
    assert parts[1].isdigit()
    assert len(parts[2]) == 8


def test_setup_logging():
    """Test logging setup functionality."""
    with patch('src.utils.logging_utils.os.makedirs') as mock_makedirs:
        with patch('src.utils.logging_utils.logging.FileHandler') as mock_handler:
            mock_handler.return_value.level = 0
            logger = setup_logging()

            assert logger is not None
            assert logger.name == "src.utils.logging_utils"
            mock_makedirs.assert_called_once_with('logs', exist_ok=True)


def test_setup_logging_without_directory():
    """Test that no directory is created when file logging is off."""
    with patch('src.utils.logging_utils.os.makedirs') as mock_makedirs:
        logger = setup_logging(log_dir=None)

        assert logger is not None
        mock_makedirs.assert_not_called()


def test_setup_logging_with_directory_creation_failure():
    """Test logging setup when directory creation fails."""
    with patch('src.utils.logging_utils.os.makedirs', side_effect=OSError("Permission denied")):
        with patch('builtins.print') as mock_print:
            logger = setup_logging()

            assert logger is not None
            mock_print.assert_any_call(
                "Warning: Could not create log file handler: Permission denied", file=sys.stderr
            )
            mock_print.assert_any_call("Logging to console only.", file=sys.stderr)


def test_log_command():
    """Test command logging."""
    mock_logger = MagicMock()

    with patch('src.utils.logging_utils.logger', mock_logger):
        log_command(
            command="phase",
            params={"abar": 4.0, "theta": 1.5707963267948966},
            run_id="run_test_123"
        )

        mock_logger.info.assert_called_once()
        call_args = mock_logger.info.call_args[0][0]
        assert "▶️ COMMAND:" in call_args

        json_str = call_args.split("▶️ COMMAND: ")[1]
        log_data = json.loads(json_str)

        assert log_data["command"] == "phase"
        assert log_data["run_id"] == "run_test_123"
        assert log_data["params"]["abar"] == 4.0
        assert "timestamp" in log_data


def test_log_command_auto_run_id():
    """Test command logging with auto-generated run ID."""
    mock_logger = MagicMock()

    with patch('src.utils.logging_utils.logger', mock_logger):
        log_command(command="check")

        call_args = mock_logger.info.call_args[0][0]
        log_data = json.loads(call_args.split("▶️ COMMAND: ")[1])

        assert log_data["run_id"].startswith("run_")
        assert log_data["params"] == {}


def test_log_computation_success():
    """Test computation logging for successful steps."""
    mock_logger = MagicMock()

    with patch('src.utils.logging_utils.logger', mock_logger):
        log_computation(
            step="phase_quadrature",
            run_id="run_test_123",
            params={"abar": 4.0},
            duration=0.25,
            success=True
        )

        mock_logger.info.assert_called_once()
        call_args = mock_logger.info.call_args[0][0]
        assert "🧮 COMPUTATION:" in call_args

        log_data = json.loads(call_args.split("🧮 COMPUTATION: ")[1])

        assert log_data["step"] == "phase_quadrature"
        assert log_data["success"] is True
        assert log_data["duration_seconds"] == 0.25
        assert log_data["error"] is None


def test_log_computation_failure():
    """Test computation logging for failed steps."""
    mock_logger = MagicMock()

    with patch('src.utils.logging_utils.logger', mock_logger):
        log_computation(
            step="phase_kinematic",
            run_id="run_test_123",
            success=False,
            error="trajectory is undersampled"
        )

        mock_logger.error.assert_called_once()
        mock_logger.info.assert_not_called()
        call_args = mock_logger.error.call_args[0][0]
        assert "🧮 COMPUTATION_FAILURE:" in call_args

        log_data = json.loads(call_args.split("🧮 COMPUTATION_FAILURE: ")[1])

        assert log_data["success"] is False
        assert log_data["error"] == "trajectory is undersampled"


def test_log_check_result_pass():
    """Test check logging for a passing check."""
    mock_logger = MagicMock()

    with patch('src.utils.logging_utils.logger', mock_logger):
        log_check_result(
            name="kms_ratio",
            passed=True,
            value=3e-15,
            tolerance=1e-12,
            run_id="run_test_123",
            details={"points": 20}
        )

        mock_logger.info.assert_called_once()
        call_args = mock_logger.info.call_args[0][0]
        assert "✅ CHECK_PASS:" in call_args

        log_data = json.loads(call_args.split("✅ CHECK_PASS: ")[1])

        assert log_data["check"] == "kms_ratio"
        assert log_data["value"] == 3e-15
        assert log_data["tolerance"] == 1e-12
        assert log_data["details"] == {"points": 20}


def test_log_check_result_fail():
    """Test check logging for a failing check."""
    mock_logger = MagicMock()

    with patch('src.utils.logging_utils.logger', mock_logger):
        log_check_result(name="rk4_vs_closed_form", passed=False, value=1e-7, tolerance=1e-10)

        mock_logger.error.assert_called_once()
        call_args = mock_logger.error.call_args[0][0]
        assert "❌ CHECK_FAIL:" in call_args

        log_data = json.loads(call_args.split("❌ CHECK_FAIL: ")[1])
        assert log_data["check"] == "rk4_vs_closed_form"
        assert log_data["details"] == {}


def test_get_logger():
    """Test getting logger instance."""
    with patch('src.utils.logging_utils.logger', None):
        with patch('src.utils.logging_utils.setup_logging') as mock_setup:
            mock_logger = MagicMock()
            mock_setup.return_value = mock_logger

            logger = get_logger()

            mock_setup.assert_called_once()
            assert logger == mock_logger


def test_get_logger_existing():
    """Test getting existing logger instance."""
    existing_logger = MagicMock()

    with patch('src.utils.logging_utils.logger', existing_logger):
        with patch('src.utils.logging_utils.setup_logging') as mock_setup:
            logger = get_logger()

            mock_setup.assert_not_called()
            assert logger == existing_logger
