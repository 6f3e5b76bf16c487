"""Logging utilities for the phase calculator - standalone helper functions."""

import os
import sys
import json
import time
import uuid
import logging
from typing import Dict, Any, Optional
from datetime import datetime

# Global logger - will be set by setup_logging()
logger = None

LOG_FILE_NAME = "unruh_phase.log"


def setup_logging(level: int = logging.INFO, log_dir: Optional[str] = "logs"):
    """Setup logging on stderr plus a file handler that creates its directory if needed."""
    global logger

    # stdout carries reports and CSV-free summaries; keep log lines off it
    handlers = [logging.StreamHandler(sys.stderr)]

    if log_dir:
        try:
            os.makedirs(log_dir, exist_ok=True)
            handlers.append(logging.FileHandler(os.path.join(log_dir, LOG_FILE_NAME)))
        except Exception as e:
            print(f"Warning: Could not create log file handler: {e}", file=sys.stderr)
            print("Logging to console only.", file=sys.stderr)

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - [%(funcName)s:%(lineno)d] - %(message)s',
        handlers=handlers
    )
    logging.getLogger().setLevel(level)

    logger = logging.getLogger(__name__)
    return logger


def generate_run_id() -> str:
    """Generate unique run ID for tracing one command invocation."""
    return f"run_{int(time.time())}_{uuid.uuid4().hex[:8]}"


def log_command(command: str, params: Dict[str, Any] = None, run_id: str = None):
    """Log a CLI command with its resolved parameters."""
    current_logger = get_logger()

    log_data = {
        "command": command,
        "run_id": run_id or generate_run_id(),
        "timestamp": datetime.now().isoformat(),
        "params": params or {}
    }
    current_logger.info(f"▶️ COMMAND: {json.dumps(log_data)}")


def log_computation(step: str, run_id: str, params: Dict[str, Any] = None,
                    duration: float = None, success: bool = True, error: str = None):
    """Log one numerical computation with timing and result information."""
    current_logger = get_logger()

    log_data = {
        "step": step,
        "run_id": run_id,
        "timestamp": datetime.now().isoformat(),
        "params": params or {},
        "duration_seconds": duration,
        "success": success,
        "error": error
    }
    if success:
        current_logger.info(f"🧮 COMPUTATION: {json.dumps(log_data)}")
    else:
        current_logger.error(f"🧮 COMPUTATION_FAILURE: {json.dumps(log_data)}")


def log_check_result(name: str, passed: bool, value: float, tolerance: float,
                     run_id: str = None, details: Dict[str, Any] = None):
    """Log the outcome of one oracle check."""
    current_logger = get_logger()

    log_data = {
        "check": name,
        "run_id": run_id,
        "timestamp": datetime.now().isoformat(),
        "value": value,
        "tolerance": tolerance,
        "details": details or {}
    }
    if passed:
        current_logger.info(f"✅ CHECK_PASS: {json.dumps(log_data)}")
    else:
        current_logger.error(f"❌ CHECK_FAIL: {json.dumps(log_data)}")


def get_logger():
    """Get the global logger, initializing if needed."""
    global logger
    if logger is None:
        logger = setup_logging()
    return logger
