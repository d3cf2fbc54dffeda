"""Turn SQLite queries into hard and soft templates, profile their structure,
and compute corpus-level frequency and complexity statistics."""

from .complexity import PROXIES, ComplexityProfile, profile
from .corpus import (
    QueryRecord,
    TemplateInventory,
    ingest,
    ingest_records,
    load_inventory,
    match,
    merge_inventories,
    save_inventory,
)
from .errors import SqlTemplateError
from .lexer import Token, TokenKind, lex
from .schema import SchemaCatalog, load_catalog_ddl, load_catalogs
from .stats import coverage_table, fit_loglog, moving_average, spearman, spectrum, summary_stats
from .templatizer import Level, Template, hard_template, soft_template, templatize

__version__ = "0.1.0"

__all__ = [
    "PROXIES",
    "ComplexityProfile",
    "Level",
    "QueryRecord",
    "SchemaCatalog",
    "SqlTemplateError",
    "Template",
    "TemplateInventory",
    "Token",
    "TokenKind",
    "coverage_table",
    "fit_loglog",
    "hard_template",
    "ingest",
    "ingest_records",
    "lex",
    "load_catalog_ddl",
    "load_catalogs",
    "load_inventory",
    "match",
    "merge_inventories",
    "moving_average",
    "profile",
    "save_inventory",
    "soft_template",
    "spearman",
    "spectrum",
    "summary_stats",
    "templatize",
]
