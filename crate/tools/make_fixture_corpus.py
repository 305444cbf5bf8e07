#!/usr/bin/env python3
"""Writes the offline archive used by the pipeline fixture tests.

The archive mimics the search and OCR endpoints: search result pages under
search/pages/results/ and page text under lccn/<lccn>/<date>/ed-<n>/seq-<n>/.
Output is a pure function of SEED, so rerunning reproduces the same files.

Usage: make_fixture_corpus.py <output dir>
"""

import json
import random
import shutil
import sys
from pathlib import Path

SEED = 1882
KEYWORD = "coolie"
ROWS = 50

STOP = "the of and a to in was is for on that by with from at as it be are this which his their".split()
TOPICS = {
    "labor": "labor wage cheap pay work workingmen strike factory mill competition employer shoemaker laundry hands".split(),
    "immigration": "chinese mongolian immigration exclusion steamer landed arrived passenger emigrant treaty".split(),
    "sugar": "sugar plantation planter cane field harvest island japanese contract overseer".split(),
    "shipping": "ship cargo vessel port merchant captain crew voyage harbor coast".split(),
    "politics": "congress senate bill committee vote minister commission law legislature party".split(),
    "local": "city street council mayor church school meeting market price house court".split(),
    "country": "rain river farm land weather crop cattle road bridge county".split(),
}
# Topics that keyword sentences draw on.
KEYWORD_TOPICS = ["labor", "immigration", "sugar", "shipping"]
THEMES = {
    "union": ["labor", "immigration", "politics", "local", "country"],
    "confederate": ["sugar", "shipping", "local", "country"],
    "pacific": ["sugar", "immigration", "shipping", "local"],
    "capital": ["politics", "immigration", "labor", "local"],
}

# state -> (theme, pages)
STATES = {
    "New York": ("union", 26),
    "California": ("union", 24),
    "Massachusetts": ("union", 14),
    "Pennsylvania": ("union", 10),
    "Ohio": ("union", 8),
    "Illinois": ("union", 8),
    "Louisiana": ("confederate", 14),
    "Virginia": ("confederate", 10),
    "Georgia": ("confederate", 8),
    "Texas": ("confederate", 8),
    "South Carolina": ("confederate", 7),
    "Hawaii": ("pacific", 22),
    "District of Columbia": ("capital", 26),
    "Puerto Rico": ("confederate", 6),
}

STORIES = [
    "chinese laborers landed yesterday steamer city brought contract agents promise wages "
    "planters railroad builders southern states demand cheap {kw} hands every season until congress "
    "passes exclusion bill protecting american workingmen against unfair competition",
    "letter from havana reports cargo ship carrying hundreds of {kw} emigrants wrecked near coast "
    "captain crew survivors reached port merchants plantation owners mourn heavy losses sugar crop",
    "senate committee heard testimony regarding traffic in {kw} labor between macao and peru "
    "minister declared whole system slavery under another name demanded treaty forbidding american "
    "vessels engaging trade",
    "san francisco mill owners employ {kw} workers paying half ordinary wages while white "
    "shoemakers laundrymen march through streets protesting idleness hunger families winter approaching",
]


def lccn(rng, used):
    while True:
        s = "sn%08d" % rng.randrange(82000000, 87000000)
        if s not in used:
            used.add(s)
            return s


def words(rng, topic, n):
    """Mostly words of one topic, with stopwords mixed in."""
    out = []
    for _ in range(n):
        r = rng.random()
        if r < 0.35:
            out.append(rng.choice(STOP))
        else:
            out.append(rng.choice(TOPICS[topic]))
    return out


def sentence(rng, theme):
    w = words(rng, rng.choice(THEMES[theme]), rng.randint(7, 14))
    w[0] = w[0].capitalize()
    return " ".join(w) + "."


def keyword_sentence(rng, theme, kw=KEYWORD, variant=None):
    topics = [t for t in THEMES[theme] if t in KEYWORD_TOPICS]
    topic = rng.choice(topics)
    left = words(rng, topic, rng.randint(4, 8))
    right = words(rng, topic, rng.randint(4, 8))
    form = rng.choice([kw, kw, kw, kw.capitalize(), kw.upper() + ","])
    mid = [form]
    if variant:
        mid += words(rng, topic, rng.randint(1, 3)) + [variant]
    s = left + mid + right
    s[0] = s[0].capitalize()
    return " ".join(s) + "."


def corrupt(rng, tokens, k):
    tokens = list(tokens)
    spots = [i for i, t in enumerate(tokens) if t != KEYWORD]
    for i in rng.sample(spots, k):
        t = tokens[i]
        j = rng.randrange(len(t))
        tokens[i] = t[:j] + rng.choice("eco1il") + t[j + 1:]
    return tokens


def page_text(rng, theme, parts):
    """Filler paragraphs with each item of `parts` placed far apart."""
    out = []
    for p in parts:
        for _ in range(rng.randint(3, 6)):
            out.append(sentence(rng, theme))
        out.append(p)
    for _ in range(rng.randint(3, 6)):
        out.append(sentence(rng, theme))
    lines, line = [], []
    for s in out:
        line.append(s)
        if len(line) == 3:
            lines.append(" ".join(line))
            line = []
    if line:
        lines.append(" ".join(line))
    return "\n".join(lines) + "\n"


def main(out_dir):
    rng = random.Random(SEED)
    root = Path(out_dir)
    if root.exists():
        shutil.rmtree(root)
    used = set()
    papers = {}
    for state in STATES:
        papers[state] = [(lccn(rng, used), "The %s %s." % (state, t)) for t in rng.sample(
            ["daily herald", "weekly gazette", "evening star", "republican", "democrat", "advertiser"], 2)]

    pages = []  # (state, lccn, title, date, seq, text or None)
    seen = set()

    def add(state, text, date=None):
        theme = STATES[state][0]
        while True:
            lc, title = rng.choice(papers[state])
            d = date or "%04d%02d%02d" % (rng.randint(1852, 1915), rng.randint(1, 12), rng.randint(1, 28))
            seq = rng.randint(1, 8)
            if (lc, d, seq) not in seen:
                seen.add((lc, d, seq))
                break
        pages.append((state, lc, title, d, seq, text))
        return theme

    # Ordinary pages with one to three keyword sentences.
    for state, (theme, n) in STATES.items():
        for _ in range(n):
            parts = [keyword_sentence(rng, theme) for _ in range(rng.choice([1, 1, 2, 3]))]
            add(state, page_text(rng, theme, parts))

    # Reprinted stories, each carried by papers in several states.
    for i, story in enumerate(STORIES):
        tokens = story.format(kw=KEYWORD).split()
        states = rng.sample(sorted(STATES), 3 + i)
        for j, state in enumerate(states):
            k = 0 if j == 0 else rng.randint(0, 2)
            text = " ".join(corrupt(rng, tokens, k)).capitalize() + "."
            add(state, page_text(rng, STATES[state][0], [text]))

    # OCR variant "cooIie" beside a single exact match, seven times.
    for state in ["New York", "California", "Hawaii", "Louisiana", "District of Columbia", "Ohio", "Texas"]:
        theme = STATES[state][0]
        add(state, page_text(rng, theme, [keyword_sentence(rng, theme, variant="cooIie")]))

    # Near miss: no exact keyword on the page.
    add("Massachusetts", page_text(rng, "union", ["Chinese cooli laborers arrived by steamer yesterday."]))
    # Implausible date, kept and flagged downstream.
    add("Virginia", page_text(rng, "confederate", [keyword_sentence(rng, "confederate")]), date="16860304")
    # A hit whose OCR text is absent from the archive.
    add("Ohio", None)

    rng.shuffle(pages)
    results = root / "search" / "pages" / "results"
    results.mkdir(parents=True)
    total = len(pages)
    # The client stops at the first short page, so a final short one always exists.
    for p in range(total // ROWS + 1):
        chunk = pages[p * ROWS:(p + 1) * ROWS]
        items = []
        for state, lc, title, d, seq, _ in chunk:
            iso = "%s-%s-%s" % (d[:4], d[4:6], d[6:])
            items.append({
                "id": "/lccn/%s/%s/ed-1/seq-%d/" % (lc, iso, seq),
                "lccn": lc,
                "date": d,
                "edition": 1,
                "sequence": seq,
                "state": [state],
                "title": title,
                "type": "page",
            })
        body = {
            "totalItems": total,
            "endIndex": p * ROWS + len(chunk),
            "startIndex": p * ROWS + 1,
            "itemsPerPage": ROWS,
            "items": items,
        }
        name = "andtext=%s&format=json&page=%d&rows=%d" % (KEYWORD, p + 1, ROWS)
        (results / name).write_text(json.dumps(body, indent=1) + "\n")
    for state, lc, title, d, seq, text in pages:
        if text is None:
            continue
        iso = "%s-%s-%s" % (d[:4], d[4:6], d[6:])
        path = root / "lccn" / lc / iso / "ed-1" / ("seq-%d" % seq) / "ocr.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    print("%d pages written to %s" % (total, root))


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    main(sys.argv[1])
