"""Counts docstrings and `#` comments per file with the standard library.

A docstring here is any expression statement whose value is a string literal
(implicit concatenation included) or an f-string, wherever it appears. The
`#` comment count comes from the tokenize module. Writes one JSON object
mapping relative file paths to {"docstrings": [lines], "comments": [lines]}.

    python3 tools/oracles/docstring_oracle.py DIR OUT.json
"""

import ast
import io
import json
import os
import sys
import tokenize


def docstring_lines(source):
    lines = []
    for node in ast.walk(ast.parse(source)):
        if isinstance(node, ast.Expr):
            v = node.value
            if (isinstance(v, ast.Constant) and isinstance(v.value, str)) or isinstance(v, ast.JoinedStr):
                lines.append(v.lineno)
    return sorted(lines)


def comment_lines(source):
    return [
        tok.start[0]
        for tok in tokenize.generate_tokens(io.StringIO(source).readline)
        if tok.type == tokenize.COMMENT
    ]


def main(root, out):
    result = {}
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            if not name.endswith(".py"):
                continue
            path = os.path.join(dirpath, name)
            with open(path, encoding="utf-8") as fh:
                source = fh.read()
            rel = os.path.relpath(path, root).replace(os.sep, "/")
            result[rel] = {"docstrings": docstring_lines(source), "comments": comment_lines(source)}
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
