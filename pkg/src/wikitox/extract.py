"""Recover comments as text added between consecutive talk-page revisions.

A comment is one maximal contiguous block of lines inserted by a revision,
found with a line-level longest-common-subsequence alignment. Moved text
shows up as delete+insert under LCS, so a pure rearrangement can re-emit an
existing line as a spurious comment; reverts likewise re-emit the restored
text. Both are accepted as documented noise.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass

from .dump import Contributor, PageHistory
from .util import utf8_len


@dataclass(frozen=True)
class Comment:
    recipient: str            # talk-page owner
    author: Contributor
    timestamp: int            # of the revision that added the block
    raw_text: str
    clean_text: str
    byte_len: int             # UTF-8 bytes of clean_text
    page_id: int
    revision_id: int


@dataclass(frozen=True)
class ExclusionConfig:
    """Which authors never count as commenters.

    ``bot_usernames`` is the explicit list; the suffix heuristic additionally
    drops names ending in a "bot" token (see is_bot_name for the exact rule).
    """

    bot_usernames: frozenset = frozenset()
    bot_suffix_heuristic: bool = True
    exclude_anonymous: bool = True
    exclude_self: bool = True

    def __post_init__(self):
        if any(not name for name in self.bot_usernames):
            raise ValueError("bot_usernames entries must be non-empty")


def diff_added_blocks(old_text: str, new_text: str) -> list:
    """Maximal contiguous runs of lines present in new_text but not matched
    in old_text, in document order. Pure insertions only: deletions and
    moved-away text contribute nothing.
    """
    old_lines = old_text.splitlines()
    new_lines = new_text.splitlines()
    matcher = difflib.SequenceMatcher(None, old_lines, new_lines, autojunk=False)
    ranges = []
    for tag, _i1, _i2, j1, j2 in matcher.get_opcodes():
        if tag in ("insert", "replace") and j2 > j1:
            if ranges and ranges[-1][1] == j1:
                ranges[-1] = (ranges[-1][0], j2)
            else:
                ranges.append((j1, j2))
    return ["\n".join(new_lines[j1:j2]) for j1, j2 in ranges]


_HTML_COMMENT = re.compile(r"<!--.*?-->", re.S)
_HTML_COMMENT_OPEN = re.compile(r"<!--.*\Z", re.S)
_HTML_TAG = re.compile(r"</?\??[A-Za-z][^<>]*>")
_WIKILINK = re.compile(r"\[\[([^\[\]]*)\]\]")
_EXTLINK = re.compile(r"\[(?:https?|ftp)://[^\s\]]*(?:\s+([^\]]*))?\]", re.I)
_BARE_URL = re.compile(r"(?:https?|ftp)://\S+", re.I)
_SIG_TIMESTAMP = re.compile(r"\d{1,2}:\d{2}, \d{1,2}\.? \S+ \d{4} \(UTC\)")
_TILDES = re.compile(r"~{3,}")
_HEADING = re.compile(r"={2,6}[ \t]*([^=\n]*?)[ \t]*={2,6}")
_LIST_MARKUP = re.compile(r"^[*#:;]+[ \t]*", re.M)
_WS = re.compile(r"\s+")


def _strip_templates(s: str) -> str:
    """Remove matched {{...}} transclusions (nesting-aware); any leftover
    unbalanced brace pairs are stripped literally, keeping their content."""
    spans = []
    stack = []
    i = 0
    end = len(s) - 1
    while i < end:
        two = s[i:i + 2]
        if two == "{{":
            stack.append(i)
            i += 2
        elif two == "}}":
            if stack:
                start = stack.pop()
                if not stack:
                    spans.append((start, i + 2))
            i += 2
        else:
            i += 1
    if spans:
        parts = []
        cursor = 0
        for start, stop in spans:
            parts.append(s[cursor:start])
            cursor = stop
        parts.append(s[cursor:])
        s = "".join(parts)
    return s.replace("{{", "").replace("}}", "")


def _delink(s: str) -> str:
    while True:
        replaced = _WIKILINK.sub(
            lambda m: m.group(1).rsplit("|", 1)[-1] if "|" in m.group(1) else m.group(1),
            s,
        )
        if replaced == s:
            break
        s = replaced
    return s.replace("[[", "").replace("]]", "")


def _clean_pass(s: str) -> str:
    s = _HTML_COMMENT.sub("", s)
    s = _HTML_COMMENT_OPEN.sub("", s)
    s = _HTML_TAG.sub("", s)
    s = _strip_templates(s)
    s = _delink(s)
    s = _EXTLINK.sub(lambda m: m.group(1) or "", s)
    s = _BARE_URL.sub("", s)
    s = _SIG_TIMESTAMP.sub("", s)
    s = _TILDES.sub("", s)
    s = _HEADING.sub(r"\1", s)
    s = _LIST_MARKUP.sub("", s)
    s = s.replace("'''''", "").replace("'''", "").replace("''", "")
    return _WS.sub(" ", s).strip()


def clean_markup(raw: str) -> str:
    """Strip wiki and HTML markup down to plain text.

    Passes run in a fixed order (comments, tags, templates, wiki links,
    external links, bare URLs, signature remnants, headings, list markup,
    quote markup, whitespace collapse) and repeat until the text is stable,
    so removals that uncover new markup still get cleaned and the function
    is idempotent. Cleaning is total: any input yields a plain string.
    """
    for _ in range(8):
        cleaned = _clean_pass(raw)
        if cleaned == raw:
            return cleaned
        raw = cleaned
    return raw


def is_bot_name(username: str) -> bool:
    """Suffix heuristic for bot accounts.

    Matches when the name ends in "bot" (any case) and the tail is a token
    of its own: the whole name is "bot", the character before the tail is a
    non-letter ("sigma bot", "x-bot", "r2bot"), or the tail starts a
    CamelCase boundary ("ExampleBot", "FooBOT"). Plain words that merely end
    in the letters b-o-t ("Cabot", "Robot") do not match.
    """
    if len(username) < 3 or username[-3:].lower() != "bot":
        return False
    if len(username) == 3:
        return True
    before = username[-4]
    return (not before.isalpha()) or (before.islower() and username[-3] == "B")


def is_excluded_author(contributor: Contributor, owner: str, cfg: ExclusionConfig) -> bool:
    if contributor.is_anonymous:
        return cfg.exclude_anonymous
    name = contributor.username
    if cfg.exclude_self and name == owner:
        return True
    if name in cfg.bot_usernames:
        return True
    if cfg.bot_suffix_heuristic and is_bot_name(name):
        return True
    return False


def extract_comments(page: PageHistory, cfg: ExclusionConfig = ExclusionConfig()) -> list:
    """Extract comments from a sorted user-talk page history.

    Each consecutive revision pair is diffed (the first revision against the
    empty page); every added block with non-empty cleaned text becomes one
    Comment authored by the newer revision's contributor. Blocks by excluded
    authors (anonymous, bots, the page owner) are dropped.
    """
    owner = page.owner_username
    comments = []
    previous = ""
    for rev in page.revisions:
        if not is_excluded_author(rev.contributor, owner, cfg):
            for block in diff_added_blocks(previous, rev.text):
                cleaned = clean_markup(block)
                if not cleaned:
                    continue
                comments.append(Comment(
                    recipient=owner,
                    author=rev.contributor,
                    timestamp=rev.timestamp,
                    raw_text=block,
                    clean_text=cleaned,
                    byte_len=utf8_len(cleaned),
                    page_id=page.page_id,
                    revision_id=rev.revision_id,
                ))
        previous = rev.text
    return comments
