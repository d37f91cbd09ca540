"""Shared fixture builders: export-dump XML and a synthetic end-to-end corpus."""

from __future__ import annotations

import json
from xml.sax.saxutils import escape

import numpy as np
import pytest

from wikitox.util import DAY_SECONDS, format_timestamp

T0 = 1_420_070_400  # 2015-01-01T00:00:00Z


def revision_xml(rev_id, timestamp, author, text, omit_text=False):
    if isinstance(author, tuple) and author[0] == "ip":
        contributor = f"<ip>{escape(author[1])}</ip>"
    else:
        contributor = f"<username>{escape(author)}</username><id>7</id>"
    if isinstance(timestamp, int):
        timestamp = format_timestamp(timestamp)
    text_xml = "" if omit_text else f"<text>{escape(text)}</text>"
    return (f"<revision><id>{rev_id}</id><timestamp>{timestamp}</timestamp>"
            f"<contributor>{contributor}</contributor>{text_xml}</revision>")


def page_xml(title, ns, page_id, revisions):
    revs = "".join(revision_xml(*rev) for rev in revisions)
    return (f"<page><title>{escape(title)}</title><ns>{ns}</ns>"
            f"<id>{page_id}</id>{revs}</page>")


def dump_xml(pages_xml, version="0.10", user_talk_name="User talk"):
    site = (
        "<siteinfo><sitename>Testwiki</sitename><namespaces>"
        '<namespace key="0"/>'
        '<namespace key="1">Talk</namespace>'
        '<namespace key="2">User</namespace>'
        f'<namespace key="3">{escape(user_talk_name)}</namespace>'
        "</namespaces></siteinfo>"
    )
    return (f'<mediawiki xmlns="http://www.mediawiki.org/xml/export-{version}/" '
            f'version="{version}" xml:lang="en">{site}{"".join(pages_xml)}</mediawiki>')


def talk_page(owner, page_id, revisions, user_talk_name="User talk", subpage=""):
    title = f"{user_talk_name}:{owner}{subpage}"
    return page_xml(title, 3, page_id, revisions)


def build_corpus(root, n_users=60, seed=7):
    """Deterministic synthetic corpus: a dump of talk pages, per-user
    contribution logs, and a bot list, sized so every pipeline stage has
    something to chew on (toxic and non-toxic recipients, leavers, stayers).
    """
    rng = np.random.default_rng(seed)
    toxic_words = ("stupid", "idiot", "awful", "trash", "vile", "pathetic")
    polite = ("thanks for the note", "nice rewrite of the article",
              "could you look at the sourcing question", "welcome to the project",
              "agreed, the merge makes sense")

    users = [f"Editor{i:02d}" for i in range(n_users)]
    logs = {}
    pages = []
    contrib_records = []
    for idx, user in enumerate(users):
        start = T0 + int(rng.integers(0, 200)) * DAY_SECONDS
        career_days = int(rng.integers(60, 400))
        rate = float(rng.uniform(0.25, 0.85))
        active = np.flatnonzero(rng.random(career_days) < rate)
        if active.size == 0:
            active = np.array([0])
        timestamps = start + active * DAY_SECONDS + rng.integers(
            0, DAY_SECONDS, size=active.size)
        timestamps = np.unique(timestamps)
        logs[user] = timestamps
        contrib_records.append({"user": user, "timestamps": [int(t) for t in timestamps]})

        # talk page: first revision by the owner, then visitor comments,
        # each appended a bit after one of the owner's contributions
        revisions = [(1000 * idx + 1, int(timestamps[0]), user,
                      f"== {user} ==\nWelcome note by the owner.")]
        text = f"== {user} ==\nWelcome note by the owner."
        n_comments = int(rng.integers(2, 5))
        comment_times = np.sort(rng.choice(timestamps, size=n_comments, replace=False))
        gets_toxic = idx % 4 == 0
        for k, base in enumerate(comment_times):
            visitor = f"Visitor{int(rng.integers(0, 25)):02d}"
            if gets_toxic and k == n_comments - 1:
                body = " ".join(rng.choice(toxic_words, size=6))
            else:
                body = str(rng.choice(polite)) + f" ({idx}-{k})"
            text = text + f"\n{body} -- {visitor}"
            revisions.append((1000 * idx + 2 + k, int(base) + 3600, visitor, text))
        pages.append(talk_page(user, 100 + idx, revisions))

    dump_path = root / "dump.xml"
    dump_path.write_text(dump_xml(pages), encoding="utf-8")
    contribs_path = root / "contribs.ndjson"
    with open(contribs_path, "w", encoding="utf-8") as out:
        for record in contrib_records:
            out.write(json.dumps(record, sort_keys=True) + "\n")
    bots_path = root / "bots.txt"
    bots_path.write_text("MaintenanceDrone\n", encoding="utf-8")
    return {"dump": dump_path, "contribs": contribs_path, "bots": bots_path,
            "users": users, "logs": logs}


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    return build_corpus(tmp_path_factory.mktemp("corpus"))
