"""
Shared run utilities for the scenario prioritizer.
Provides logging configuration, structured log helpers, environment variable
lookup, error categorisation for CLI exit codes and performance monitoring.
"""

import os
import json
import logging
import sys
import time
import traceback
import uuid
from datetime import datetime
from functools import wraps
from typing import Any, Callable, Dict, Optional, Tuple

from .errors import PrioritizerError

LOGGER_NAME = "scenario_prioritizer"


class _StderrHandler(logging.StreamHandler):
    """Stream handler bound to the current sys.stderr at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


class RunLogger:
    """Standardized logging configuration for pipeline stages."""

    @staticmethod
    def setup_logger(name: str = LOGGER_NAME, level: str = "INFO") -> logging.Logger:
        """
        Set up standardized logging.

        Log records go to stderr; stdout is reserved for reports.

        Args:
            name: Logger name (defaults to the package logger)
            level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)

        Returns:
            Configured logger instance
        """
        logger = logging.getLogger(name)

        # Only configure if no handlers exist to avoid duplicate logs
        if not logger.handlers:
            handler = _StderrHandler()
            formatter = logging.Formatter(
                "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
            )
            handler.setFormatter(formatter)
            logger.addHandler(handler)

        log_level = getattr(logging, level.upper(), logging.INFO)
        logger.setLevel(log_level)

        return logger

    @staticmethod
    def log_performance_metrics(
        logger: logging.Logger,
        operation: str,
        duration_ms: float,
        success: bool,
        **additional_metrics,
    ) -> None:
        """
        Log performance metrics in a structured format.

        Args:
            logger: Logger instance
            operation: Name of the operation being measured
            duration_ms: Duration in milliseconds
            success: Whether the operation succeeded
            **additional_metrics: Additional metrics to log
        """
        metrics = {
            "metric_type": "performance",
            "operation": operation,
            "duration_ms": round(duration_ms, 2),
            "success": success,
            "timestamp": datetime.utcnow().isoformat() + "Z",
        }
        metrics.update(additional_metrics)

        logger.info(f"PERFORMANCE_METRICS: {json.dumps(metrics, default=str)}")

    @staticmethod
    def log_structured_error(
        logger: logging.Logger,
        error: Exception,
        operation: str,
        error_category: str = "unknown",
        **context,
    ) -> None:
        """
        Log errors in a structured format with full context.

        Args:
            logger: Logger instance
            error: The exception that occurred
            operation: Name of the operation that failed
            error_category: Category of error (model_error, degenerate, ...)
            **context: Additional context information
        """
        error_data = {
            "error_type": "structured_error",
            "operation": operation,
            "error_category": error_category,
            "exception_type": type(error).__name__,
            "exception_message": str(error),
            "stack_trace": traceback.format_exc(),
            "timestamp": datetime.utcnow().isoformat() + "Z",
        }
        error_data.update(context)

        logger.error(f"STRUCTURED_ERROR: {json.dumps(error_data, default=str)}")

    @staticmethod
    def log_operation_start(
        logger: logging.Logger, operation: str, **parameters
    ) -> str:
        """
        Log the start of an operation with parameters.

        Returns:
            Operation ID for correlation
        """
        operation_id = str(uuid.uuid4())[:8]

        log_data = {
            "log_type": "operation_start",
            "operation": operation,
            "operation_id": operation_id,
            "parameters": parameters,
            "timestamp": datetime.utcnow().isoformat() + "Z",
        }

        logger.debug(f"OPERATION_START: {json.dumps(log_data, default=str)}")
        return operation_id

    @staticmethod
    def log_operation_end(
        logger: logging.Logger,
        operation: str,
        operation_id: str,
        success: bool,
        duration_ms: float,
        **results,
    ) -> None:
        log_data = {
            "log_type": "operation_end",
            "operation": operation,
            "operation_id": operation_id,
            "success": success,
            "duration_ms": round(duration_ms, 2),
            "results": results,
            "timestamp": datetime.utcnow().isoformat() + "Z",
        }

        logger.debug(f"OPERATION_END: {json.dumps(log_data, default=str)}")


class EnvironmentValidator:
    """Environment variable lookup with defaults."""

    @staticmethod
    def get_optional_vars(optional_vars: Dict[str, str]) -> Dict[str, str]:
        return {var: os.environ.get(var, default) for var, default in optional_vars.items()}


class ResponseFormatter:
    """Error documents written by the CLI when a command fails."""

    @staticmethod
    def create_error_document(
        exit_code: int,
        error_type: str,
        message: str,
        details: Optional[Any] = None,
    ) -> Dict[str, Any]:
        """
        Create a standardized error document.

        Args:
            exit_code: Process exit code the failure maps to
            error_type: Error category/type
            message: Human-readable error message
            details: Optional structured details (validation findings, ...)

        Returns:
            Error document dictionary
        """
        document = {"error": error_type, "exit_code": exit_code, "message": message}
        if details:
            document["details"] = details
        return document

    @staticmethod
    def render_error(document: Dict[str, Any], as_json: bool = False) -> str:
        if as_json:
            return json.dumps(document, indent=2, sort_keys=True, default=str)
        lines = [f"error: {document['message']}"]
        for detail in document.get("details") or []:
            lines.append(f"  - {detail}")
        return "\n".join(lines)


class StandardErrorHandler:
    """Maps exceptions onto CLI exit codes."""

    @staticmethod
    def categorize_error(error: Exception) -> Tuple[int, str, str]:
        """
        Categorize an exception into an exit code.

        Args:
            error: The raised exception

        Returns:
            Tuple of (exit_code, error_type, category)
        """
        if isinstance(error, PrioritizerError):
            return error.exit_code, type(error).__name__, error.category
        if isinstance(error, (FileNotFoundError, IsADirectoryError, PermissionError)):
            return 2, "Model File Error", "io_error"
        if isinstance(error, ValueError):
            return 2, "Validation Error", "validation"
        return 1, "Internal Error", "unexpected_error"

    @staticmethod
    def handle_common_exceptions(func: Callable[..., int]) -> Callable[..., int]:
        """
        Decorator for CLI command functions.

        The wrapped command returns an exit code; any exception is logged as a
        structured error, rendered to stderr and converted to its exit code.
        """

        @wraps(func)
        def wrapper(args, *rest, **kwargs) -> int:
            logger = logging.getLogger(LOGGER_NAME)

            try:
                return func(args, *rest, **kwargs)

            except Exception as e:
                exit_code, error_type, category = StandardErrorHandler.categorize_error(e)
                RunLogger.log_structured_error(
                    logger,
                    e,
                    getattr(func, "__name__", "command"),
                    category,
                    exit_code=exit_code,
                )
                details = [str(f) for f in getattr(e, "findings", [])]
                document = ResponseFormatter.create_error_document(
                    exit_code, error_type, str(e), details
                )
                as_json = getattr(args, "format", "text") == "json"
                print(ResponseFormatter.render_error(document, as_json), file=sys.stderr)
                return exit_code

        return wrapper


class PerformanceMonitor:
    """Performance monitoring for pipeline stages."""

    @staticmethod
    def monitor_operation(operation_name: str, log_parameters: bool = True):
        """
        Decorator to monitor operation performance and log metrics.

        Args:
            operation_name: Name of the operation being monitored
            log_parameters: Whether to log argument counts

        Returns:
            Decorated function with performance monitoring
        """

        def decorator(func):
            @wraps(func)
            def wrapper(*args, **kwargs):
                logger = logging.getLogger(LOGGER_NAME)

                parameters = {}
                if log_parameters:
                    parameters = {
                        "args_count": len(args),
                        "kwargs_keys": sorted(kwargs.keys()),
                    }

                operation_id = RunLogger.log_operation_start(
                    logger, operation_name, **parameters
                )

                start_time = time.perf_counter()
                success = False
                result = None
                error = None

                try:
                    result = func(*args, **kwargs)
                    success = True
                    return result

                except Exception as e:
                    error = e
                    raise

                finally:
                    duration_ms = (time.perf_counter() - start_time) * 1000

                    additional_metrics = {}
                    if hasattr(result, "__len__"):
                        try:
                            additional_metrics["result_size"] = len(result)
                        except Exception:
                            pass

                    RunLogger.log_performance_metrics(
                        logger, operation_name, duration_ms, success, **additional_metrics
                    )

                    end_results = {}
                    if error:
                        end_results["error_type"] = type(error).__name__

                    RunLogger.log_operation_end(
                        logger,
                        operation_name,
                        operation_id,
                        success,
                        duration_ms,
                        **end_results,
                    )

            return wrapper

        return decorator


def setup_run_environment(
    optional_env_vars: Optional[Dict[str, str]] = None,
    logger_name: str = LOGGER_NAME,
    log_level: Optional[str] = None,
) -> Tuple[Dict[str, Any], logging.Logger]:
    """
    Complete environment setup with configuration validation and logging.

    Args:
        optional_env_vars: Extra {var_name: default_value} pairs to read
        logger_name: Logger name
        log_level: Explicit level; falls back to PRIORITIZER_LOG_LEVEL

    Returns:
        Tuple of (config_dict, logger)

    Raises:
        ConfigurationError: If a configured value is malformed or out of range
    """
    from .run_config import RunConfigManager

    config = RunConfigManager.load_config(optional_env_vars or {})
    logger = RunLogger.setup_logger(
        logger_name, log_level or config["PRIORITIZER_LOG_LEVEL"]
    )
    logger.debug(
        f"Run environment ready: {json.dumps(RunConfigManager.summarize(config), sort_keys=True)}"
    )
    return config, logger
