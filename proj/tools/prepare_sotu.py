#!/usr/bin/env python3
"""Turn the State of the Union addresses (public domain; packaged as the
npm module @stdlib/datasets-sotu) into one-sentence-per-line text with
punctuation split off as separate tokens.

    npm pack @stdlib/datasets-sotu && tar xzf stdlib-datasets-sotu-*.tgz
    python3 tools/prepare_sotu.py package/data data/sotu

Every 100th sentence goes to heldout.txt, the rest to train.txt.
"""
import argparse
import pathlib
import re
import unicodedata

QUOTES = {
    "‘": "'", "’": "'", "“": '"', "”": '"',
    "–": " - ", "—": " -- ", "…": " ... ", " ": " ",
}

SENT_END = re.compile(r'(?<=[.!?])["\')]*\s+(?=["\'(]*[A-Z0-9])')
PUNCT = re.compile(r'([.,;:!?"()\[\]$%&*/])')
ABBREV = re.compile(r"\b(Mr|Mrs|Ms|Dr|St|Jr|Sr|Gen|Gov|Hon|No|Nos|U\.S|vs|etc|i\.e|e\.g)\.$")


def sentences(paragraph):
    pieces = SENT_END.split(paragraph)
    merged = []
    for piece in pieces:
        if merged and ABBREV.search(merged[-1]):
            merged[-1] = merged[-1] + " " + piece
        else:
            merged.append(piece)
    return merged


def tokenize(sentence):
    for src, dst in QUOTES.items():
        sentence = sentence.replace(src, dst)
    sentence = unicodedata.normalize("NFKD", sentence)
    sentence = sentence.encode("ascii", "ignore").decode("ascii")
    # Keep "u.s." and decimal numbers intact; split the remaining punctuation.
    sentence = PUNCT.sub(r" \1 ", sentence)
    sentence = re.sub(r"(\d) \. (\d)", r"\1.\2", sentence)
    sentence = re.sub(r"\b([A-Za-z]) \. ([A-Za-z]) \.", r"\1.\2.", sentence)
    return " ".join(sentence.split())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("src", type=pathlib.Path)
    ap.add_argument("dst", type=pathlib.Path)
    ap.add_argument("--heldout-every", type=int, default=100)
    args = ap.parse_args()

    args.dst.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(args.dst / "train.txt", "w") as train, open(args.dst / "heldout.txt", "w") as heldout:
        for path in sorted(args.src.glob("*.txt")):
            text = path.read_text(encoding="utf-8", errors="replace")
            for paragraph in text.splitlines():
                for sent in sentences(paragraph.strip()):
                    line = tokenize(sent)
                    if len(line.split()) < 2:
                        continue
                    n += 1
                    out = heldout if n % args.heldout_every == 0 else train
                    out.write(line + "\n")


if __name__ == "__main__":
    main()
