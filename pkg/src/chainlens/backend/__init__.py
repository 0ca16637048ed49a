"""Sub-task queries and the backends that answer them."""

from .queries import (
    Answer,
    CoordinateQuery,
    MultiChoiceQuery,
    MultiLabelQuery,
    NormalizedBox,
    PairOrderQuery,
    PresenceQuery,
    Query,
    QueryItem,
    Region,
    SameObjectQuery,
)
from .base import Backend, Completion, GroundTruthBackend, TextBackend
from .oracle import OracleBackend, SpecialistBackend, majority_class, region_mean
from .scripted import ScriptedBackend
from .providers import (
    PROFILE_NAMES,
    PROFILES,
    ProviderProfile,
    build_request,
    encode_png,
    get_profile,
    parse_response,
)
from .http import HttpTextBackend
from .cache import CacheKey, ResponseCache
from .cost import CostLedger, ModelPrice, UsageEntry, load_price_table, record_cost
from .templates import PromptTemplate, TemplateRegistry
from .parsing import ParseFailure, find_option, parse_boxes, parse_numbered
from .session import Session, Transcript, TranscriptEntry

__all__ = [
    "Answer",
    "CoordinateQuery",
    "MultiChoiceQuery",
    "MultiLabelQuery",
    "NormalizedBox",
    "PairOrderQuery",
    "PresenceQuery",
    "Query",
    "QueryItem",
    "Region",
    "SameObjectQuery",
    "Backend",
    "Completion",
    "GroundTruthBackend",
    "TextBackend",
    "OracleBackend",
    "SpecialistBackend",
    "majority_class",
    "region_mean",
    "ScriptedBackend",
    "PROFILE_NAMES",
    "PROFILES",
    "ProviderProfile",
    "build_request",
    "encode_png",
    "get_profile",
    "parse_response",
    "HttpTextBackend",
    "CacheKey",
    "ResponseCache",
    "CostLedger",
    "ModelPrice",
    "UsageEntry",
    "load_price_table",
    "record_cost",
    "PromptTemplate",
    "TemplateRegistry",
    "ParseFailure",
    "find_option",
    "parse_boxes",
    "parse_numbered",
    "Session",
    "Transcript",
    "TranscriptEntry",
]
