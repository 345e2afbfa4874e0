"""
hypersym Utility Module
File, YAML and JSON helpers shared by the hypersym modules
"""

import os
import sys
import json
import logging
from typing import Dict, Any, List, Optional, TextIO
from pathlib import Path
import yaml

logger = logging.getLogger(__name__)

def ensure_directory_exists(directory_path: str) -> None:
    """
    Ensure a directory exists, creating it if necessary

    Args:
        directory_path: Path to the directory
    """
    if directory_path:
        Path(directory_path).mkdir(parents=True, exist_ok=True)

def load_yaml_config(config_path: str) -> Optional[Dict[str, Any]]:
    """
    Load configuration from YAML file

    Args:
        config_path: Path to the YAML configuration file

    Returns:
        Configuration dictionary or None if failed
    """
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f)
        logger.info(f"Configuration loaded from {config_path}")
        return config
    except FileNotFoundError:
        logger.warning(f"Configuration file not found: {config_path}")
        return None
    except yaml.YAMLError as e:
        logger.error(f"Error parsing YAML configuration: {e}")
        return None
    except Exception as e:
        logger.error(f"Unexpected error loading configuration: {e}")
        return None

def validate_file_path(file_path: str) -> bool:
    """
    Validate if a file path exists and is accessible

    Args:
        file_path: Path to validate

    Returns:
        True if file exists and is accessible, False otherwise
    """
    try:
        return os.path.isfile(file_path) and os.access(file_path, os.R_OK)
    except Exception:
        return False

def format_duration(seconds: float) -> str:
    """Elapsed seconds for log lines: "45.5s", "2m 5.3s" or "2h 2m 5.7s"."""
    if seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        minutes = int(seconds // 60)
        remaining_seconds = seconds % 60
        return f"{minutes}m {remaining_seconds:.1f}s"
    else:
        hours = int(seconds // 3600)
        remaining_minutes = int((seconds % 3600) // 60)
        remaining_seconds = seconds % 60
        return f"{hours}h {remaining_minutes}m {remaining_seconds:.1f}s"

def merge_dictionaries(dict1: Dict[str, Any], dict2: Dict[str, Any], overwrite: bool = True) -> Dict[str, Any]:
    """
    Merge two dictionaries, with option to overwrite existing keys

    Args:
        dict1: First dictionary
        dict2: Second dictionary
        overwrite: Whether to overwrite existing keys in dict1

    Returns:
        Merged dictionary
    """
    result = dict1.copy()

    for key, value in dict2.items():
        if isinstance(result.get(key), dict) and isinstance(value, dict):
            result[key] = merge_dictionaries(result[key], value, overwrite)
        elif key not in result or overwrite:
            result[key] = value

    return result

def chunk_sizes(total: int, chunk_size: int) -> List[int]:
    """
    Split a count into consecutive chunk sizes

    Args:
        total: Number of items
        chunk_size: Size of each full chunk

    Returns:
        List of chunk sizes summing to total
    """
    if chunk_size <= 0:
        raise ValueError(f"chunk_size must be positive, got {chunk_size}")
    sizes = [chunk_size] * (total // chunk_size)
    if total % chunk_size:
        sizes.append(total % chunk_size)
    return sizes

def to_builtin(value: Any) -> Any:
    """
    Convert numpy scalars/arrays and tuples/sets into JSON-ready builtins

    Args:
        value: Arbitrary nested structure

    Returns:
        The same structure made of dict, list, int, float, str, bool, None
    """
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_builtin(v) for v in value)
    if hasattr(value, "tolist"):
        return to_builtin(value.tolist())
    if isinstance(value, float):
        # 17 significant digits round-trips every double exactly
        return float(format(value, ".17g"))
    return value

def dumps_json(data: Any) -> str:
    """
    Serialize data as deterministic JSON (sorted keys, fixed separators)

    Args:
        data: Structure to serialize

    Returns:
        JSON text without trailing newline
    """
    return json.dumps(to_builtin(data), sort_keys=True, indent=2, separators=(",", ": "))

def write_output(text: str, output_path: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """
    Write text to a file or to a stream (stdout when neither is given)

    Args:
        text: Text to write
        output_path: Destination file, created with parent directories
        stream: Destination stream used when no path is given
    """
    if output_path:
        ensure_directory_exists(os.path.dirname(output_path))
        with open(output_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
            if not text.endswith("\n"):
                f.write("\n")
        logger.info(f"Output written to {output_path}")
        return
    if stream is None:
        stream = sys.stdout
    stream.write(text)
    if not text.endswith("\n"):
        stream.write("\n")
