"""Seeded synthetic text-to-SQL corpus over the fixture catalogs."""

import random

PATTERNS = [
    "SELECT {col} FROM employees WHERE salary > {num}",
    "SELECT name FROM employees WHERE department = '{word}'",
    "SELECT COUNT(*) FROM {table}",
    "SELECT department, COUNT(*) FROM employees GROUP BY department ORDER BY COUNT(*) DESC LIMIT {num}",
    "SELECT e.name FROM employees AS e JOIN departments AS d ON e.dept_id = d.id WHERE d.location = '{word}'",
    "SELECT c.name FROM customers c JOIN orders o ON c.id = o.customer_id WHERE o.amount > {num}",
    "SELECT name FROM employees WHERE salary > (SELECT AVG(salary) FROM employees WHERE dept_id = {num})",
    "WITH t AS (SELECT dept_id, AVG(salary) AS s FROM employees GROUP BY dept_id) SELECT * FROM t WHERE s > {num}",
    "SELECT {col}, RANK() OVER (ORDER BY salary DESC) FROM employees",
    "SELECT COUNT(*) FROM subscribers WHERE verified_at > '2021-0{d}-1{d}'",
    "SELECT class_name, COUNT(*) FROM actions GROUP BY class_name HAVING COUNT(*) > {num}",
    "SELECT a.username FROM actions a LEFT JOIN components b ON a.taggable_id = b.id WHERE b.id IS NULL",
    "SELECT name FROM components WHERE status = {num} UNION SELECT email FROM subscribers",
]
BAD = ["SELECT 'unterminated", "SELECT 1; SELECT 2", "SELECT name FROM employees /*"]
WORDS = ["NY", "Paris", "hr", "ops", "x"]
DB_OF = {"subscribers": "cachet", "actions": "cachet", "components": "cachet"}


def make_corpus(n=1000, seed=7, bad_rate=0.0):
    """``n`` (db_id, sql) pairs with a skewed pattern distribution."""
    rng = random.Random(seed)
    weights = [1.0 / (i + 1) ** 1.2 for i in range(len(PATTERNS))]
    out = []
    for _ in range(n):
        if bad_rate and rng.random() < bad_rate:
            out.append(("hr", rng.choice(BAD)))
            continue
        pat = rng.choices(PATTERNS, weights)[0]
        # a few rare one-off shapes so the spectrum has a tail
        if rng.random() < 0.05:
            k = rng.randint(1, 40)
            pat = "SELECT name FROM employees WHERE " + " AND ".join(["salary > {num}"] * k)
        sql = pat.format(
            col=rng.choice(["name", "salary", "department", "id"]),
            num=rng.randint(0, 10**5),
            word=rng.choice(WORDS),
            table=rng.choice(["employees", "orders", "subscribers", "actions"]),
            d=rng.randint(1, 9),
        )
        first_table = next((t for t in DB_OF if t in sql), None)
        out.append((DB_OF.get(first_table, "hr"), sql))
    return out


def write_jsonl(pairs, path):
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for i, (db, sql) in enumerate(pairs):
            fh.write(json.dumps({"db_id": db, "sql": sql, "id": f"r{i}"}) + "\n")
    return path
