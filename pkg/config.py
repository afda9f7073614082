"""
Configuration settings for the WFSM repertoire engine.
"""

import os
import string
from typing import Dict, Any

from dotenv import load_dotenv

load_dotenv()

# Output configuration
RESULTS_DIR = os.getenv("RESULTS_DIR", "results")
LOGS_DIR = os.getenv("LOGS_DIR", "logs")
DATA_DIR = os.getenv("DATA_DIR", "data")

# Logging configuration
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE_MAX_SIZE = int(os.getenv("LOG_FILE_MAX_SIZE", "10485760"))  # 10MB
LOG_BACKUP_COUNT = int(os.getenv("LOG_BACKUP_COUNT", "5"))
ENABLE_FILE_LOGGING = os.getenv("ENABLE_FILE_LOGGING", "false").lower() == "true"

# Experiment defaults
DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "20240601"))
DEFAULT_RUNS = int(os.getenv("DEFAULT_RUNS", "20"))
DEFAULT_TEST_SIZE = int(os.getenv("DEFAULT_TEST_SIZE", "100"))
DEFAULT_JOBS = int(os.getenv("DEFAULT_JOBS", "1"))

# Machine inspection
ENUMERATE_LIMIT = int(os.getenv("ENUMERATE_LIMIT", "10000"))

# Matching configuration
WILDCARD_SYMBOL = os.getenv("WILDCARD_SYMBOL", "#")
LANGUAGE_ALPHABET = os.getenv("LANGUAGE_ALPHABET", string.ascii_lowercase)

# Number rendering (display only; computation stays exact)
DECIMAL_DIGITS = int(os.getenv("DECIMAL_DIGITS", "12"))

# Telemetry thresholds
RATIONAL_DIGITS_WARNING = int(os.getenv("RATIONAL_DIGITS_WARNING", "200"))
INTERMEDIATE_GROWTH_WARNING = float(os.getenv("INTERMEDIATE_GROWTH_WARNING", "4"))

VALID_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


# Create directories if they don't exist
def create_directories():
    """Create necessary directories."""
    directories = [RESULTS_DIR]
    if ENABLE_FILE_LOGGING:
        directories.append(LOGS_DIR)

    for directory in directories:
        os.makedirs(directory, exist_ok=True)


# Configuration validation
def validate_config() -> Dict[str, Any]:
    """
    Validate configuration settings.

    Returns:
        Dictionary of validation results
    """
    validation_results = {
        "valid": True,
        "errors": [],
        "warnings": []
    }

    # Check required directories
    try:
        create_directories()
    except OSError as e:
        validation_results["errors"].append(f"Failed to create directories: {str(e)}")
        validation_results["valid"] = False

    if LOG_LEVEL.upper() not in VALID_LOG_LEVELS:
        validation_results["errors"].append(f"LOG_LEVEL must be one of {', '.join(sorted(VALID_LOG_LEVELS))}")
        validation_results["valid"] = False

    # Check experiment defaults
    if DEFAULT_SEED < 0:
        validation_results["errors"].append("DEFAULT_SEED must be non-negative")
        validation_results["valid"] = False
    if DEFAULT_RUNS < 1 or DEFAULT_TEST_SIZE < 1 or DEFAULT_JOBS < 1:
        validation_results["errors"].append("DEFAULT_RUNS, DEFAULT_TEST_SIZE and DEFAULT_JOBS must be at least 1")
        validation_results["valid"] = False
    if DEFAULT_RUNS < 2:
        validation_results["warnings"].append("DEFAULT_RUNS below 2 reports a standard error of 0")

    # Check matching configuration
    if len(WILDCARD_SYMBOL) != 1 or WILDCARD_SYMBOL in LANGUAGE_ALPHABET:
        validation_results["errors"].append("WILDCARD_SYMBOL must be one character outside LANGUAGE_ALPHABET")
        validation_results["valid"] = False
    if len(set(LANGUAGE_ALPHABET)) != len(LANGUAGE_ALPHABET) or len(LANGUAGE_ALPHABET) < 2:
        validation_results["errors"].append("LANGUAGE_ALPHABET needs at least two distinct characters")
        validation_results["valid"] = False

    if DECIMAL_DIGITS < 1:
        validation_results["errors"].append("DECIMAL_DIGITS must be at least 1")
        validation_results["valid"] = False
    if ENUMERATE_LIMIT < 1:
        validation_results["errors"].append("ENUMERATE_LIMIT must be at least 1")
        validation_results["valid"] = False
    if INTERMEDIATE_GROWTH_WARNING < 1:
        validation_results["warnings"].append("INTERMEDIATE_GROWTH_WARNING below 1 warns on every merge")

    return validation_results


# Get configuration as dictionary
def get_config_dict() -> Dict[str, Any]:
    """
    Get all configuration as a dictionary.

    Returns:
        Configuration dictionary
    """
    return {
        "results_dir": RESULTS_DIR,
        "logs_dir": LOGS_DIR,
        "data_dir": DATA_DIR,
        "log_level": LOG_LEVEL,
        "enable_file_logging": ENABLE_FILE_LOGGING,
        "default_seed": DEFAULT_SEED,
        "default_runs": DEFAULT_RUNS,
        "default_test_size": DEFAULT_TEST_SIZE,
        "default_jobs": DEFAULT_JOBS,
        "enumerate_limit": ENUMERATE_LIMIT,
        "wildcard_symbol": WILDCARD_SYMBOL,
        "language_alphabet": LANGUAGE_ALPHABET,
        "decimal_digits": DECIMAL_DIGITS,
        "rational_digits_warning": RATIONAL_DIGITS_WARNING,
        "intermediate_growth_warning": INTERMEDIATE_GROWTH_WARNING,
    }
