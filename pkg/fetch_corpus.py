"""
Download a plain-text corpus and normalize it to one word per line.

The default source is the King James Bible from Project Gutenberg. The bundled
fixtures in data/ are enough for the tests; this tool is for full-size runs.

    python fetch_corpus.py --out data/kjv_words.txt
"""

import argparse
import logging
import re
import sys
from pathlib import Path
from typing import Iterable, List, Optional

import requests

import config

logger = logging.getLogger("wfsm_ais.fetch")

DEFAULT_URL = "https://www.gutenberg.org/cache/epub/10/pg10.txt"
START_MARKER = "*** START OF"
END_MARKER = "*** END OF"


def strip_gutenberg(text: str) -> str:
    """Drop the Project Gutenberg header and license, if present."""
    start, end = text.find(START_MARKER), text.find(END_MARKER)
    if start != -1:
        start = text.find("\n", start) + 1
    else:
        start = 0
    return text[start:end if end != -1 else len(text)]


def words(text: str, alphabet: str = config.LANGUAGE_ALPHABET) -> List[str]:
    """Lower-cased maximal runs of alphabet characters."""
    return [w for w in re.split(f"[^{re.escape(alphabet)}]+", text.lower()) if w]


def fetch(url: str, timeout: float = 60.0) -> str:
    response = requests.get(url, timeout=timeout)
    response.raise_for_status()
    response.encoding = response.encoding or "utf-8"
    return response.text


def write_words(items: Iterable[str], path: Path) -> int:
    items = list(items)
    path.write_text("".join(f"{w}\n" for w in items), encoding="utf-8")
    return len(items)


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Fetch a plain-text corpus, one word per line")
    parser.add_argument("--url", default=DEFAULT_URL, help="Plain-text source")
    parser.add_argument("--out", type=Path, default=Path(config.DATA_DIR) / "kjv_words.txt", help="Word list to write")
    args = parser.parse_args(argv)
    logging.basicConfig(level=config.LOG_LEVEL.upper(), format=config.LOG_FORMAT)

    try:
        text = fetch(args.url)
    except requests.RequestException as e:
        print(f"❌ Download failed: {e}", file=sys.stderr)
        return 1
    try:
        count = write_words(words(strip_gutenberg(text)), args.out)
    except OSError as e:
        print(f"❌ Could not write {args.out}: {e}", file=sys.stderr)
        return 1
    print(f"✅ {count} words written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
