"""Query fixture sets shared by parser, server, and acceptance tests."""

BLANK_QUERIES = ["", "   ", "\t\t", "\n \n", " \t \n "]

# (sql, expected 1-based position) -- all must raise SyntaxError, stably.
MALFORMED_QUERIES = [
    ("SELEKT x", 1),
    ("SELECT count(* FROM tMsg", 16),
    ("SELECT FROM tMsg", 8),
    ("SELECT * FROM", 14),
    ("SELECT * FORM tMsg", 10),
    ("SELECT * FROM tMsg WHERE", 25),
    ("SELECT * FROM tMsg WHERE MsgType", 33),
    ("SELECT * FROM tMsg WHERE MsgType = ", 36),
    ('SELECT * FROM tMsg WHERE MsgType == "x"', 35),
    ("SELECT * FROM tMsg GROUP MsgType", 26),
    ("SELECT * FROM tMsg ORDER MsgType", 26),
    ("SELECT * FROM tMsg LIMIT", 25),
    ("SELECT * FROM tMsg LIMIT 0", 26),
    ("SELECT * FROM tMsg LIMIT -3", 26),
    ("SELECT MsgType count(*) FROM tMsg", 16),
    ("SELECT 'lit' FROM tMsg", 8),
    ("SELECT * FROM tMsg tFile", 20),
    ("SELECT * FROM tMsg WHERE MsgType = 'x", 36),
    ("SELECT * FROM tMsg WHERE MsgType = x", 36),
    ("SELECT * FROM tMsg; SELECT", 21),
    ("SELECT * FROM tMsg WHERE @", 26),
]

# (sql, fragment expected in the UnsupportedFeature message)
UNSUPPORTED_QUERIES = [
    ("SELECT * FROM tMsg WHERE MsgType = 'a' OR MsgType = 'b'", "OR"),
    ("SELECT * FROM (SELECT * FROM tMsg)", "subqueries"),
    ("SELECT DISTINCT MsgType FROM tMsg", "DISTINCT"),
    ("SELECT MsgType AS t FROM tMsg", "AS"),
    ("SELECT SUM(LineNo) FROM tMsg", "SUM"),
    ("SELECT count(LineNo) FROM tMsg", "count over an expression"),
    ("SELECT * FROM tMsg WHERE LineNo + 1 = 2", "arithmetic"),
    ("INSERT INTO tMsg", "INSERT"),
    ("SELECT * FROM tMsg WHERE MsgType LIKE 'a'", "LIKE"),
    ("SELECT * FROM tMsg LEFT JOIN tFile ON tMsg.Filepath = tFile.Filepath", "join qualifiers"),
]

QUERY_1 = "SELECT MsgType, count(*) FROM tMsg\nGROUP BY MsgType;"
QUERY_2 = (
    'SELECT count(*) FROM tMsg\nON tMsg.Filepath = tFile.Filepath\n'
    'WHERE tFile.Carrier = "T-Mobile"\nAND tMsg.MsgType = "4G_LTE_RRC";'
)
QUERY_3 = 'SELECT * FROM tMsg\nWHERE tMsg.MsgType = "4G_LTE_RRC";'
