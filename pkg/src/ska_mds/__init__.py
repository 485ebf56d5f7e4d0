"""Multiterminal secret key agreement from MDS (Reed-Solomon) codes."""

__version__ = "0.1.0"

from .analysis import capacity, helper_bound, mcgill_mmi_closed, min_partition_mmi  # noqa: E402
from .field import FieldElement, FieldSpec, Polynomial  # noqa: E402
from .protocol import ScenarioConfig, Transcript, refresh_key, run_protocol  # noqa: E402
from .rs import KeyBlock, RsParams, decode, encode  # noqa: E402
