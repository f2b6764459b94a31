#!/usr/bin/env python3
"""Build a line-delimited English text corpus from Debian package changelogs.

Each changelog entry (header line through the maintainer sign-off) becomes one
line of output. Used as the bundled stand-in corpus when the Enron mail
corpus is not available locally.

    python3 scripts/extract_changelog_corpus.py /usr/share/doc data/changelog_corpus.txt
"""
import gzip
import hashlib
import os
import sys

MAX_BYTES = 4_000_000


def read_changelog(path):
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as fh:
        return fh.read()


def entries(text):
    current = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        current.append(stripped)
        if stripped.startswith("-- "):
            yield " ".join(current)
            current = []
    if current:
        yield " ".join(current)


def main(root, out):
    seen = set()
    written = 0
    paths = []
    for dirpath, _, files in os.walk(root):
        for name in files:
            if name.startswith("changelog"):
                paths.append(os.path.join(dirpath, name))
    paths.sort()
    with open(out, "w", encoding="utf-8") as sink:
        for path in paths:
            try:
                raw = read_changelog(path)
            except OSError:
                continue
            digest = hashlib.sha256(raw).hexdigest()
            if digest in seen:
                continue
            seen.add(digest)
            text = raw.decode("utf-8", "replace")
            for entry in entries(text):
                sink.write(entry + "\n")
                written += len(entry) + 1
                if written >= MAX_BYTES:
                    return


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
