"""Regenerate src/tweetinfo/resources/emoji_names.tsv.

Walks the major emoji blocks, takes each scalar's Unicode character name,
and sanitizes it to lowercase ASCII letters and spaces.  For every base
scalar an entry with a trailing U+FE0F presentation selector is emitted too,
so emoji written in explicit emoji-presentation form match as one sequence.

Run from the repo root:  python scripts/gen_emoji_lexicon.py
"""

import re
import unicodedata
from pathlib import Path

BLOCKS = [
    (0x2600, 0x26FF),    # miscellaneous symbols
    (0x2700, 0x27BF),    # dingbats
    (0x1F300, 0x1F5FF),  # misc symbols and pictographs
    (0x1F600, 0x1F64F),  # emoticons
    (0x1F680, 0x1F6FF),  # transport and map symbols
    (0x1F900, 0x1F9FF),  # supplemental symbols and pictographs
    (0x1FA70, 0x1FAFF),  # symbols and pictographs extended-A
    (0x2B00, 0x2BFF),    # misc symbols and arrows (stars, heavy arrows)
    (0x1F000, 0x1F0FF),  # mahjong/domino/playing cards
    (0x1F1E6, 0x1F1FF),  # regional indicators
]
EXTRAS = [0x203C, 0x2049, 0x2122, 0x2139, 0x21A9, 0x21AA, 0x231A, 0x231B, 0x2328, 0x23CF,
          0x24C2, 0x25AA, 0x25AB, 0x25B6, 0x25C0, 0x25FB, 0x25FC, 0x25FD, 0x25FE, 0x2934,
          0x2935, 0x3030, 0x303D, 0x3297, 0x3299]


def sanitize(name: str) -> str:
    words = re.sub(r"[^A-Za-z]+", " ", name).split()
    return " ".join(w.lower() for w in words)


def main() -> None:
    entries = []
    codepoints = [cp for lo, hi in BLOCKS for cp in range(lo, hi + 1)] + EXTRAS
    for cp in codepoints:
        name = unicodedata.name(chr(cp), "")
        if not name:
            continue
        words = sanitize(name)
        if not words:
            continue
        entries.append((f"{cp:04X}", words))
        entries.append((f"{cp:04X} FE0F", words))
    entries.sort()
    out = Path(__file__).resolve().parent.parent / "src" / "tweetinfo" / "resources" / "emoji_names.tsv"
    out.write_text("".join(f"{seq}\t{words}\n" for seq, words in entries), encoding="utf-8")
    print(f"wrote {len(entries)} entries to {out}")


if __name__ == "__main__":
    main()
