"""Keyword and function-name tables for the SQLite dialect.

``RESERVED`` is the documented keyword set: a bare word whose uppercase form
is in it always lexes as KEYWORD. It is SQLite's keyword list minus the words
SQLite lets you use as ordinary names (its "fallback" keywords such as KEY,
ACTION, FIRST, ROW) which show up as real column names in benchmark schemas.
Those live in ``SOFT_KEYWORDS``: they lex as IDENTIFIER and are only rendered
as keywords when they do not resolve against the schema.

``FUNCTIONS`` are built-in function names. A word in this set lexes as
KEYWORD only when it is immediately followed by ``(`` so that columns named
``date`` or ``count`` stay identifiers.
"""

from __future__ import annotations

RESERVED = frozenset(
    """
    ALL ALTER AND AS ASC ATTACH AUTOINCREMENT BEGIN BETWEEN BY CASE CAST CHECK
    COLLATE COMMIT CONSTRAINT CREATE CROSS CURRENT_DATE CURRENT_TIME
    CURRENT_TIMESTAMP DEFAULT DEFERRABLE DELETE DESC DETACH DISTINCT DROP ELSE
    END ESCAPE EXCEPT EXCLUSIVE EXISTS EXPLAIN FALSE FILTER FOLLOWING FOREIGN
    FROM FULL GLOB GROUP HAVING IF IN INDEX INDEXED INNER INSERT INTERSECT INTO
    IS ISNULL JOIN LEFT LIKE LIMIT MATERIALIZED NATURAL NOT NOTNULL NULL NULLS
    OFFSET ON OR ORDER OUTER OVER PARTITION PRAGMA PRECEDING PRIMARY RANGE
    RECURSIVE REFERENCES REGEXP RETURNING RIGHT ROLLBACK ROWS SELECT SET TABLE
    THEN TRANSACTION TRIGGER TRUE UNBOUNDED UNION UNIQUE UPDATE USING VACUUM
    VALUES VIEW WHEN WHERE WINDOW WITH
    """.split()
)

SOFT_KEYWORDS = frozenset(
    """
    ABORT ACTION ADD AFTER ALWAYS ANALYZE BEFORE CASCADE COLUMN CONFLICT CURRENT
    DATABASE DEFERRED DO EACH EXCLUDE FAIL FIRST FOR GENERATED GROUPS IGNORE
    IMMEDIATE INITIALLY INSTEAD KEY LAST MATCH NO NOTHING OF OTHERS PLAN QUERY
    RAISE REINDEX RELEASE RENAME REPLACE RESTRICT ROW SAVEPOINT TEMP TEMPORARY
    TIES TO VIRTUAL WITHOUT
    """.split()
)

AGGREGATES = frozenset(
    "COUNT SUM AVG MIN MAX TOTAL GROUP_CONCAT".split()
)

PERCENTILE_FUNCTIONS = frozenset(
    "PERCENT_RANK CUME_DIST NTILE MEDIAN PERCENTILE PERCENTILE_CONT PERCENTILE_DISC".split()
)

FUNCTIONS = AGGREGATES | PERCENTILE_FUNCTIONS | frozenset(
    """
    STRING_AGG ABS CHANGES CHAR COALESCE CONCAT CONCAT_WS FORMAT GLOB HEX IFNULL
    IIF INSTR LAST_INSERT_ROWID LENGTH LIKE LIKELIHOOD LIKELY LOWER LTRIM
    NULLIF OCTET_LENGTH PRINTF QUOTE RANDOM RANDOMBLOB REPLACE ROUND RTRIM SIGN
    SOUNDEX SUBSTR SUBSTRING TOTAL_CHANGES TRIM TYPEOF UNHEX UNICODE UNLIKELY
    UPPER ZEROBLOB DATE TIME DATETIME JULIANDAY UNIXEPOCH STRFTIME TIMEDIFF
    ROW_NUMBER RANK DENSE_RANK LAG LEAD FIRST_VALUE LAST_VALUE NTH_VALUE ACOS
    ACOSH ASIN ASINH ATAN ATAN2 ATANH CEIL CEILING COS COSH DEGREES EXP FLOOR LN
    LOG LOG10 LOG2 MOD PI POW POWER RADIANS SIN SINH SQRT TAN TANH TRUNC JSON
    JSON_ARRAY JSON_ARRAY_LENGTH JSON_EXTRACT JSON_INSERT JSON_OBJECT JSON_PATCH
    JSON_REMOVE JSON_REPLACE JSON_SET JSON_TYPE JSON_VALID JSON_QUOTE
    JSON_GROUP_ARRAY JSON_GROUP_OBJECT JSON_EACH JSON_TREE
    """.split()
)

SET_OPERATORS = frozenset({"UNION", "INTERSECT", "EXCEPT"})

JOIN_MODIFIERS = frozenset({"LEFT", "RIGHT", "FULL", "INNER", "OUTER", "CROSS", "NATURAL"})


def is_reserved(word: str) -> bool:
    return word.upper() in RESERVED
