"""Guide documents: data model, YAML/Markdown files, and XCCDF import."""

from .codec import value_from_data, value_to_data
from .model import (
    AuditAutomation,
    AuditSetting,
    AuditValue,
    Choice,
    Composite,
    ExtractionStatus,
    Guide,
    GuideSource,
    Implementation,
    LowLevelAutomation,
    Number,
    OpaqueAutomation,
    PolicyValue,
    Principals,
    RegistryAutomation,
    Rule,
    SeceditAutomation,
    SeceditSection,
    Status,
    Text,
    Toggle,
    WinGpoAutomation,
)
from .scapolite import parse_scapolite, serialize_scapolite
from .xccdf import import_xccdf

__all__ = [
    "AuditAutomation", "AuditSetting", "AuditValue", "Choice", "Composite", "ExtractionStatus",
    "Guide", "GuideSource", "Implementation", "LowLevelAutomation", "Number", "OpaqueAutomation",
    "PolicyValue", "Principals", "RegistryAutomation", "Rule", "SeceditAutomation", "SeceditSection",
    "Status", "Text", "Toggle", "WinGpoAutomation", "import_xccdf", "parse_scapolite",
    "serialize_scapolite", "value_from_data", "value_to_data",
]
