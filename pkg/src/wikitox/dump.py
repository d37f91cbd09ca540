"""Streaming reader for MediaWiki XML export dumps (schema 0.10 / 0.11).

Pages are parsed one ``<page>`` element at a time with ``iterparse`` and
cleared immediately after being yielded, so a full-dump scan holds at most
one page history in memory regardless of dump size.
"""

from __future__ import annotations

import bz2
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace

from .errors import DumpParseError
from .util import parse_timestamp

SUPPORTED_SCHEMA_VERSIONS = ("0.10", "0.11")

# MediaWiki allocates fixed numeric keys to the built-in namespaces in every
# language edition; 3 is the user-talk namespace. The localized namespace
# *name* still comes from the dump's <siteinfo> block.
USER_TALK_NAMESPACE = 3


@dataclass(frozen=True)
class Contributor:
    """Author of one revision: a registered username or an anonymous IP."""

    username: str | None = None
    ip: str | None = None
    is_bot_flagged: bool = False

    def __post_init__(self):
        if (self.username is None) == (self.ip is None):
            raise ValueError("exactly one of username/ip must be set")
        if self.username is not None and not self.username:
            raise ValueError("registered contributor needs a non-empty username")

    @property
    def is_anonymous(self) -> bool:
        return self.username is None

    @property
    def label(self) -> str:
        return self.username if self.username is not None else self.ip


@dataclass(frozen=True)
class Revision:
    revision_id: int
    timestamp: int  # epoch seconds, UTC
    contributor: Contributor
    text: str = ""


@dataclass
class PageHistory:
    page_id: int
    title: str
    namespace: int
    owner_username: str
    revisions: list


def sort_history(page: PageHistory) -> PageHistory:
    """Return the page with revisions sorted ascending by (timestamp, id).

    The sort is stable and idempotent; already-sorted input comes back
    unchanged in content.
    """
    ordered = sorted(page.revisions, key=lambda r: (r.timestamp, r.revision_id))
    return replace(page, revisions=ordered)


def is_user_talk(page: PageHistory, user_talk_ns: int = USER_TALK_NAMESPACE,
                 include_subpages: bool = True) -> bool:
    """True when the page lives in the user-talk namespace.

    Archives live on subpages ("User talk:Alice/Archive 1"); they are kept
    by default so comments posted directly to an archive are not lost, and
    dropped when ``include_subpages`` is off.
    """
    if page.namespace != user_talk_ns:
        return False
    if not include_subpages and "/" in page.title:
        return False
    return True


class _CountingReader:
    """Binary file wrapper that tracks how many bytes were consumed."""

    def __init__(self, raw):
        self._raw = raw
        self.bytes_read = 0

    def read(self, size=-1):
        chunk = self._raw.read(size)
        self.bytes_read += len(chunk)
        return chunk


def _localname(tag: str) -> str:
    return tag.rpartition("}")[2]


def _child_map(elem):
    out = {}
    for child in elem:
        out.setdefault(_localname(child.tag), child)
    return out


def _parse_contributor(elem) -> Contributor:
    if elem is None:
        # suppressed contributor: treat as anonymous with an empty address
        return Contributor(ip="")
    fields = _child_map(elem)
    username = fields.get("username")
    if username is not None and (username.text or ""):
        return Contributor(username=username.text)
    ip = fields.get("ip")
    return Contributor(ip=(ip.text or "") if ip is not None else "")


class DumpReader:
    """Forward-only, single-consumer iterator of PageHistory values.

    Attributes populated while reading the ``<siteinfo>`` header:

    - ``schema_version``: the export schema version string
    - ``namespaces``: mapping of namespace key -> localized name
    - ``user_talk_namespace``: key of the user-talk namespace (3)
    """

    def __init__(self, path, compression="auto"):
        self.path = str(path)
        if compression == "auto":
            compression = "bzip2" if self.path.endswith(".bz2") else "none"
        if compression not in ("none", "bzip2"):
            raise ValueError(f"unknown compression {compression!r}")
        self.compression = compression
        self.schema_version = None
        self.namespaces: dict[int, str] = {}
        self.user_talk_namespace = USER_TALK_NAMESPACE
        self._consumed = False

    def _open_stream(self):
        if self.compression == "bzip2":
            return bz2.open(self.path, "rb")
        return open(self.path, "rb")

    def _owner_from_title(self, title: str, namespace: int) -> str:
        if namespace != self.user_talk_namespace:
            return ""
        prefix = self.namespaces.get(self.user_talk_namespace)
        if prefix and title.startswith(prefix + ":"):
            rest = title[len(prefix) + 1:]
        elif ":" in title:
            rest = title.split(":", 1)[1]
        else:
            rest = title
        return rest.split("/", 1)[0]

    def _parse_page(self, elem) -> PageHistory:
        title = ""
        namespace = 0
        page_id = 0
        revisions = []
        for child in elem:
            tag = _localname(child.tag)
            if tag == "title":
                title = child.text or ""
            elif tag == "ns":
                namespace = int(child.text or 0)
            elif tag == "id":
                page_id = int(child.text or 0)
            elif tag == "revision":
                fields = _child_map(child)
                rev_id = int(fields["id"].text or 0) if "id" in fields else 0
                ts = parse_timestamp(fields["timestamp"].text) if "timestamp" in fields else 0
                text_elem = fields.get("text")
                # deleted/suppressed text elements are treated as empty pages
                text = (text_elem.text or "") if text_elem is not None else ""
                revisions.append(Revision(
                    revision_id=rev_id,
                    timestamp=ts,
                    contributor=_parse_contributor(fields.get("contributor")),
                    text=text,
                ))
        page = PageHistory(page_id=page_id, title=title, namespace=namespace,
                           owner_username=self._owner_from_title(title, namespace),
                           revisions=revisions)
        return sort_history(page)

    def _handle_siteinfo(self, elem):
        for child in elem.iter():
            if _localname(child.tag) == "namespace":
                key = child.attrib.get("key")
                if key is not None:
                    self.namespaces[int(key)] = child.text or ""

    def __iter__(self):
        if self._consumed:
            raise RuntimeError("dump stream is single-consumer; reopen to rescan")
        self._consumed = True
        counter = _CountingReader(self._open_stream())
        current_title = None
        root = None
        try:
            parser = ET.iterparse(counter, events=("start", "end"))
            for event, elem in parser:
                tag = _localname(elem.tag)
                if event == "start":
                    if root is None:
                        root = elem
                        self.schema_version = elem.attrib.get("version")
                        if self.schema_version not in SUPPORTED_SCHEMA_VERSIONS:
                            warnings.warn(
                                f"unknown export schema version "
                                f"{self.schema_version!r}; parsing best-effort",
                                stacklevel=2,
                            )
                    continue
                if tag == "title":
                    current_title = elem.text
                elif tag == "siteinfo":
                    self._handle_siteinfo(elem)
                    elem.clear()
                elif tag == "page":
                    yield self._parse_page(elem)
                    current_title = None
                    elem.clear()
                    if root is not None:
                        try:
                            root.remove(elem)
                        except ValueError:
                            pass
        except ET.ParseError as exc:
            raise DumpParseError(
                f"malformed dump XML: {exc}",
                byte_offset=counter.bytes_read,
                page_title=current_title,
            ) from exc
        finally:
            counter._raw.close()


def open_dump(path, compression="auto") -> DumpReader:
    """Open a plain or bzip2-compressed export dump for streaming.

    Raises OSError for unreadable files; iteration raises DumpParseError
    (carrying a byte offset and the in-flight page title) on malformed XML.
    """
    reader = DumpReader(path, compression=compression)
    # fail fast on unreadable input instead of at first iteration
    reader._open_stream().close()
    return reader


def page_record(page: PageHistory) -> dict:
    """JSON-ready summary of one page for ``scan --out pages.ndjson``.

    Revision text is summarized by its UTF-8 byte length; the dump itself
    remains the source of truth for full text.
    """
    return {
        "page_id": page.page_id,
        "title": page.title,
        "namespace": page.namespace,
        "owner": page.owner_username,
        "revisions": [
            {
                "id": rev.revision_id,
                "timestamp": rev.timestamp,
                "author": rev.contributor.label,
                "anonymous": rev.contributor.is_anonymous,
                "text_bytes": len(rev.text.encode("utf-8")),
            }
            for rev in page.revisions
        ],
    }
