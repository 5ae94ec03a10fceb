"""Writes the 50-file labeled mini-corpus used by the acceptance tests.

Every comment below carries the category set a reader assigns to it. The
script only lays the comments out into Python files and records where each
one lands; it never runs the classifier. Output is deterministic.

    python3 tools/make_minicorpus.py crates/cli/tests/data/mini
"""

import os
import random
import shutil
import sys

# (text, categories, kind) with kind "line" or "doc"; multi-line text becomes
# one merged block of `#` lines or one multi-line docstring.
ENGLISH_DOCS = [
    "Return the number of rows that were written to the output file.",
    "Open the configuration file and return its parsed contents.",
    "Remove every entry from the cache that is older than the given age.",
    "Build a new session for the current user and store it.",
    "Convert the list of names into a single comma separated string.",
    "Check whether the given path points to a readable directory.",
    "Send the request again when the server reports a temporary failure.",
    "Read the whole file and return its lines as a list.",
    "Close every open connection before the worker shuts down.",
    "Return a copy of the settings with the defaults filled in.",
    "Write the report to disk and return the path of the new file.",
    "Find the first item in the queue that has not been processed.",
    "Raise an error when the input does not have the expected shape.",
    "Load the saved model from disk and prepare it for prediction.",
    "Split the text into words and drop the empty ones.",
    "Keep track of how many times each event has been seen.",
    "Return true when the user has permission to edit the page.",
    "Compute the average time spent on each request in the batch.",
    "Create the output directory if it does not already exist.",
    "Sort the records by date so that the newest one comes first.",
    "Return the value stored under the key, or the default when it is missing.",
    "Wait until the background job has finished and return its result.",
    "Parse the command line arguments and return them as a dictionary.",
    "Print a short summary of the results for the user.",
    "Update the progress bar after each file has been copied.",
    "Return the largest value found in the current window.",
    "Make sure the database schema matches the latest version.",
    "Collect all the messages that arrived while the client was offline.",
    "Reset the counters at the start of every new day.",
    "Return the list of files that changed since the last build.",
    "Handle the case where the remote server closes the connection early.",
    "Save the current state so that the program can resume later.",
    "Return the name of the module that defines this class.",
    "Add the new item to the end of the list and return its index.",
    "Skip lines that start with a hash because they are comments.",
    "Merge the two dictionaries, giving priority to the second one.",
    "Return the total size of all files in the folder.",
    "Tell the scheduler that this task is ready to run again.",
    "Fetch the latest price from the remote service and cache it.",
    "Return an empty result when there is nothing to search.",
]

ENGLISH_LINES = [
    "make sure the file is closed even when an error is raised",
    "the list is sorted so we can stop at the first match",
    "this loop runs until the queue is empty",
    "we only need the first three columns here",
    "keep the old value around in case the update fails",
    "the server sends the length before the message body",
    "ignore blank lines and lines that only contain spaces",
    "this is slow for large inputs but it is simple and correct",
    "try again with a longer timeout before giving up",
    "the user may have changed the settings since the last run",
    "store the result so we do not have to compute it again",
    "move on to the next page when this one is full",
    "the order of these checks matters because the first one is cheap",
    "remove the temporary files once the upload has finished",
    "we assume that the input has already been cleaned",
    "use the default name when the user did not give one",
    "every worker reads from the same shared queue",
    "this branch should never be reached in normal use",
    "wait a little before asking the server again",
    "count the words in each line and add them up",
    "the first row of the table holds the column names",
    "keep reading until we reach the end of the stream",
    "drop the connection if the client stops answering",
    "the cache is cleared whenever the settings change",
    "log a warning but keep going with the remaining files",
    "return early when there is nothing left to do",
    "the last item is special because it has no successor",
    "only the owner of the file is allowed to delete it",
    "check the size first so we can fail fast",
    "this value was chosen after measuring a few real runs",
]

MULTI_LINE = [
    "walk the tree from the root down to the leaves\nand collect every node that has no children",
    "the parser is not thread safe, so each worker\ngets its own copy of it",
    "we read the whole file into memory here because\nthe files are small and this keeps the code simple",
    "send the data in small pieces so that the\nreceiver never has to hold too much at once",
]

# Repeated verbatim in several files: planted duplicates.
DUPLICATED = [
    ("Return the value unchanged when the cache is empty.", "doc"),
    ("make sure the lock is released before returning", "line"),
    ("Return a new list that holds only the unique items.", "doc"),
    ("this should be moved to a helper function later on", "line"),
]

COPYRIGHT = [
    "Copyright 2019 The Example Authors. All rights reserved.",
    "Copyright 2021 Example Corporation. Licensed under the Apache License.",
    "Copyright 2015-2020 the project contributors, see the list of authors",
]

ENCODING = [
    "-*- coding: utf-8 -*-",
    "-*- coding: latin-1 -*-",
]

NON_LINGUISTIC = [
    "------------------------------------------------------------",
    "============================================",
    "#############################",
    "+--------+--------+--------+",
    "*** *** *** *** *** ***",
]

CODE_CALLSITE = [
    "result = parser.parse(tokens)",
    "conn = db.connect(host, port)",
    "data = json.loads(text)",
    "self.client.send_message(payload)",
    "items.append(value)",
    "os.makedirs(path, exist_ok=True)",
]

CODE_ASSIGNMENT = [
    "max_retries = 3",
    "timeout = 30",
    "count == 0",
    "batch_size = 128",
]

HASH = [
    "the expected checksum of the sample file is d41d8cd98f00b204e9800998ecf8427e",
    "this digest 9e107d9d372bb6826bd81d3542a419d6 comes from the sample input",
    "the digest of an empty input is e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
]

LATEX = [
    r"Compute the update with learning rate \alpha for each step.",
    r"The weights are stored in \mathbf{W} as rows.",
    r"The loss is written as \begin{equation} for the full batch.",
]

SAGE = [
    "sage: x = polygen(QQ)",
    "sage: G = graphs.PetersenGraph()",
    "sage: M = matrix(ZZ, 2, 2)",
]

HTML = [
    "See the <b>notes</b> in the project readme for more details.",
    "Return the page wrapped in a <div> block so the layout stays fixed.",
    "<p>Parse the options</p> and return them to the caller",
]

NON_ENGLISH = [
    "Renvoie la liste des fichiers qui ont été modifiés depuis hier.",
    "Devuelve el número total de filas que se han escrito en el archivo.",
    "Gibt die Anzahl der Zeilen zurück, die geschrieben wurden.",
    "Restituisce il valore salvato nella cache se esiste ancora.",
    "Retorna a lista de usuários que estão conectados agora.",
    "Ouvre le fichier de configuration et lit toutes les options.",
    "Comprueba si el directorio existe antes de crear los archivos.",
    "Überprüft, ob die Verbindung noch offen ist, bevor gesendet wird.",
    "Возвращает список всех пользователей системы.",
    "读取配置文件并返回所有的设置项。",
]

SHORT = [
    "see below",
    "fix this",
    "see above",
    "not used",
    "helper",
    "thread safe",
    "old code",
]

ANTLR_HEADER = "This file was generated by $ANTLR from the expression grammar."
ANTLR_BODY = "type: the token type returned by the lexer for this rule"

NAMES = [
    "cache", "config", "report", "queue", "session", "parser", "worker",
    "upload", "index", "loader", "scheduler", "storage", "client", "server",
    "metrics", "tokens", "paths", "records", "events", "users", "pages",
    "stream", "window", "table", "graph",
]


def entries():
    """Every labeled comment, as (text, labels, kind)."""
    out = []
    for t in ENGLISH_DOCS:
        out.append((t, [], "doc"))
    for t in ENGLISH_LINES:
        out.append((t, [], "line"))
    for t in MULTI_LINE:
        out.append((t, [], "line"))
    for t in COPYRIGHT:
        out.append((t, ["Copyright"], "line"))
    for t in NON_LINGUISTIC:
        out.append((t, ["NonLinguistic"], "line"))
    for t in CODE_CALLSITE:
        out.append((t, ["CodeCallsite"], "line"))
    for t in CODE_ASSIGNMENT:
        out.append((t, ["CodeAssignment"], "line"))
    for t in HASH:
        out.append((t, ["HashValue"], "line"))
    for t in LATEX:
        out.append((t, ["Latex"], "doc"))
    for t in HTML:
        out.append((t, ["Html"], "doc"))
    for t in NON_ENGLISH:
        out.append((t, ["NonEnglish"], "doc"))
    for t in SHORT:
        out.append((t, ["Short"], "line"))
    return out


# Labels that need more than one rule, fixed by hand.
OVERRIDES = {
    # the call-site pattern also covers these sage lines
    "sage: x = polygen(QQ)": ["SageMath", "CodeCallsite"],
    "sage: G = graphs.PetersenGraph()": ["SageMath", "CodeCallsite"],
    "sage: M = matrix(ZZ, 2, 2)": ["SageMath", "CodeCallsite"],
}


def is_short(text):
    """Fewer than 10 characters or fewer than 4 whitespace-separated words."""
    return len(text.strip()) < 10 or len(text.split()) < 4


def with_short(text, labels):
    labels = list(labels)
    if is_short(text) and "Short" not in labels:
        labels.append("Short")
    if not is_short(text) and "Short" in labels:
        labels.remove("Short")
    return labels


def emit_line_comment(lines, text, indent=""):
    start = len(lines) + 1
    for part in text.split("\n"):
        lines.append(f"{indent}# {part}")
    return start


def emit_docstring(lines, text, indent):
    start = len(lines) + 1
    prefix = "r" if "\\" in text else ""
    body = text.replace("\n", "\n" + indent)
    lines.append(f'{indent}{prefix}"""{body}"""')
    return start


def build(outdir):
    rng = random.Random(20240501)
    pool = entries()
    for sage in SAGE:
        pool.append((sage, [], "line"))
    pool = [(t, with_short(t, OVERRIDES.get(t, labels)), kind) for t, labels, kind in pool]
    rng.shuffle(pool)

    nfiles = 50
    per_file = [[] for _ in range(nfiles)]
    for i, e in enumerate(pool):
        per_file[i % nfiles].append(e)
    for i, (text, kind) in enumerate(DUPLICATED):
        for f in range(i, nfiles, 9):
            per_file[f].append((text, [], kind))
    for f in range(0, nfiles, 12):
        per_file[f].insert(0, (COPYRIGHT[0], ["Copyright"], "line"))

    if os.path.isdir(outdir):
        shutil.rmtree(outdir)
    os.makedirs(outdir)
    label_rows = []
    for f in range(nfiles):
        sub = ["core", "util", "io", "net", "model"][f % 5]
        name = f"{sub}/{NAMES[f % len(NAMES)]}_{f:02d}.py"
        lines = []
        comments = list(per_file[f])
        encoding = ENCODING[f % 2] if f % 10 == 3 else None
        antlr = f == 17
        if encoding:
            start = emit_line_comment(lines, encoding)
            label_rows.append((name, start, "line", ["EncodingDirective"]))
        if antlr:
            start = emit_line_comment(lines, ANTLR_HEADER)
            label_rows.append((name, start, "line", ["Antlr"]))
        # leading line comments become the file header
        while comments and comments[0][2] == "line" and "Copyright" in comments[0][1]:
            text, labels, kind = comments.pop(0)
            start = emit_line_comment(lines, text)
            label_rows.append((name, start, "line", labels))
        lines.append("import os")
        lines.append("")
        if antlr:
            lines.append("")
            lines.append("class ExprLexer:")
            start = emit_line_comment(lines, ANTLR_BODY, "    ")
            label_rows.append((name, start, "line", ["Antlr"]))
            lines.append("    token_type = 4")
            lines.append("")
        for k, (text, labels, kind) in enumerate(comments):
            lines.append("")
            fn = f"step_{k}"
            if kind == "doc":
                lines.append(f"def {fn}(value):")
                start = emit_docstring(lines, text, "    ")
                lines.append("    return value")
                label_rows.append((name, start, "docstring", labels))
            else:
                lines.append(f"def {fn}(value):")
                start = emit_line_comment(lines, text, "    ")
                lines.append("    return value")
                label_rows.append((name, start, "line", labels))
            lines.append("")
        path = os.path.join(outdir, name)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    label_rows.sort()
    with open(os.path.join(outdir, "..", "mini_labels.tsv"), "w", encoding="utf-8") as fh:
        fh.write("file\tstart_line\tkind\tcategories\n")
        for name, start, kind, labels in label_rows:
            fh.write(f"{name}\t{start}\t{kind}\t{','.join(sorted(labels)) or '-'}\n")


if __name__ == "__main__":
    build(sys.argv[1] if len(sys.argv) > 1 else "crates/cli/tests/data/mini")
