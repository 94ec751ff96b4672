"""
Argument helpers for the command-line interface.
"""

import re
from typing import List, Optional

_BITS = re.compile(r"^[01]+$")


def is_valid_chromosome(text: str) -> tuple[bool, str]:
    """
    Check that ``text`` is a non-empty bit string.

    Returns:
        tuple: (is_valid, error_message); the message is empty when valid
    """
    if not text or text.strip() == "":
        return False, "Chromosomes must not be empty."
    if not _BITS.match(text.strip()):
        return False, f"'{text.strip()}' is not a bit string; use only 0 and 1."
    return True, ""


def parse_initial_population(text: Optional[str]) -> Optional[List[str]]:
    """
    Split a comma-separated ``--initial`` value into chromosomes.

    Raises:
        ValueError: on an empty list, a non-bit entry or mixed lengths
    """
    if text is None:
        return None

    chromosomes = [part.strip() for part in text.split(",") if part.strip()]
    if not chromosomes:
        raise ValueError("--initial needs at least one chromosome")

    for chromosome in chromosomes:
        ok, message = is_valid_chromosome(chromosome)
        if not ok:
            raise ValueError(message)

    if len({len(c) for c in chromosomes}) > 1:
        raise ValueError("--initial chromosomes must all have the same length")
    return chromosomes


def report_stem(model_name: str, command: str) -> str:
    """File stem for saved reports, e.g. ``ShippingOrder_prioritize``."""
    safe = re.sub(r"[^A-Za-z0-9_.-]+", "_", model_name)
    return f"{safe}_{command}"
