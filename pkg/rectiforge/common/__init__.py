"""
Imports all common modules and extra imports
"""

# Logging
import logging

logger = logging.getLogger("RECTIFORGE")

# Other utils
from .utils import format_number, timer

from .units import quant
