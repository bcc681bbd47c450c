"""
Utility modules for the indicator selection pipeline.
"""

from .logger import get_logger, setup_logging

__all__ = ["get_logger", "setup_logging"]
