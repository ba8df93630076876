#!/usr/bin/env python3
"""Convert the XTAG ``en-verbs.txt`` conjugation table into transition lines.

Each output line has the shape ``token0_token1:tag0_tag1`` and describes a
one-way transition between two forms of the same verb.

    $ pip download --no-deps word_forms   # ships en-verbs.txt
    $ python scripts/build_verb_dictionary.py en-verbs.txt \
        | gzip -n > src/gectag/data/verb-form-vocab.txt.gz
"""

import argparse
import itertools
import sys

# en-verbs.txt column positions
COLUMNS = {"VB": 0, "VBZ": 3, "VBG": 5, "VBD": 10, "VBN": 11}
PAST_FALLBACK = 8  # third person past, used when the generic past is empty
FORMS = ("VB", "VBZ", "VBN", "VBD", "VBG")


def verb_forms(fields):
    forms = {}
    for form, col in COLUMNS.items():
        value = fields[col].strip() if col < len(fields) else ""
        if not value and form == "VBD" and PAST_FALLBACK < len(fields):
            value = fields[PAST_FALLBACK].strip()
        if value and " " not in value and "_" not in value:
            forms[form] = value
    return forms


def transitions(lines):
    seen = set()
    for line in lines:
        if line.startswith(";;;") or not line.strip():
            continue
        forms = verb_forms(line.rstrip("\n").split(","))
        for src, dst in itertools.permutations(FORMS, 2):
            if src not in forms or dst not in forms:
                continue
            w0, w1 = forms[src], forms[dst]
            if w0 == w1 or (w0, src, dst) in seen:
                continue
            seen.add((w0, src, dst))
            yield f"{w0}_{w1}:{src}_{dst}"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("source", type=argparse.FileType("r", encoding="utf-8"))
    args = parser.parse_args()
    for entry in transitions(args.source):
        sys.stdout.write(entry + "\n")


if __name__ == "__main__":
    main()
