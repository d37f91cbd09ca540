import bz2
import json
import tracemalloc
import xml.etree.ElementTree as ET

import pytest

from conftest import dump_xml, page_xml, revision_xml, talk_page
from wikitox.dump import (Contributor, DumpParseError, PageHistory, Revision,
                          is_user_talk, open_dump, page_record, sort_history)

T = 1_500_000_000


def write_dump(tmp_path, content, name="dump.xml"):
    path = tmp_path / name
    path.write_text(content, encoding="utf-8")
    return path


def three_page_dump():
    return dump_xml([
        talk_page("Alice", 1, [(11, T, "Bob", "hi")]),
        talk_page("Carol", 2, [(21, T, "Dave", "yo"), (22, T + 60, "Erin", "yo\nmore")]),
        page_xml("Physics", 0, 3, [(31, T, "Frank", "article text")]),
    ])


def test_three_page_fixture_yields_three_histories(tmp_path):
    pages = list(open_dump(write_dump(tmp_path, three_page_dump())))
    assert len(pages) == 3
    assert [p.page_id for p in pages] == [1, 2, 3]
    assert pages[1].revisions[1].text == "yo\nmore"


def test_empty_document_yields_nothing(tmp_path):
    path = write_dump(tmp_path, dump_xml([]))
    assert list(open_dump(path)) == []


def test_truncated_file_names_incomplete_page(tmp_path):
    content = three_page_dump()
    cut = content.index("Carol") + 40
    path = write_dump(tmp_path, content[:cut])
    with pytest.raises(DumpParseError) as err:
        list(open_dump(path))
    assert "User talk:Carol" in str(err.value)
    assert err.value.byte_offset is not None and err.value.byte_offset > 0


def test_unreadable_file_is_io_error(tmp_path):
    with pytest.raises(OSError):
        open_dump(tmp_path / "missing.xml")


def test_unknown_schema_version_warns_and_parses(tmp_path):
    path = write_dump(tmp_path, dump_xml(
        [talk_page("Alice", 1, [(11, T, "Bob", "hi")])], version="0.99"))
    with pytest.warns(UserWarning, match="0.99"):
        pages = list(open_dump(path))
    assert len(pages) == 1


def test_bzip2_dump_roundtrip(tmp_path):
    raw = three_page_dump().encode("utf-8")
    path = tmp_path / "dump.xml.bz2"
    path.write_bytes(bz2.compress(raw))
    assert len(list(open_dump(path))) == 3
    assert len(list(open_dump(path, compression="bzip2"))) == 3


def test_deleted_text_element_is_empty_string(tmp_path):
    page = talk_page("Alice", 1, [(11, T, "Bob", "", True)])
    pages = list(open_dump(write_dump(tmp_path, dump_xml([page]))))
    assert pages[0].revisions[0].text == ""


def test_suppressed_contributor_parses_as_anonymous(tmp_path):
    xml = dump_xml([
        "<page><title>User talk:Alice</title><ns>3</ns><id>1</id>"
        f"<revision><id>5</id><timestamp>2017-07-14T02:40:00Z</timestamp>"
        '<contributor deleted="deleted"/><text>x</text></revision></page>'
    ])
    pages = list(open_dump(write_dump(tmp_path, xml)))
    assert pages[0].revisions[0].contributor.is_anonymous


def test_owner_parsing_localized_namespace_and_subpage(tmp_path):
    xml = dump_xml([
        talk_page("Anna Müller", 1, [(1, T, "Bob", "hi")],
                  user_talk_name="Benutzer Diskussion"),
        talk_page("Karl", 2, [(2, T, "Bob", "hi")],
                  user_talk_name="Benutzer Diskussion", subpage="/Archiv 1"),
    ], user_talk_name="Benutzer Diskussion")
    pages = list(open_dump(write_dump(tmp_path, xml)))
    assert pages[0].owner_username == "Anna Müller"
    assert pages[1].owner_username == "Karl"


def test_is_user_talk_rules():
    alice = PageHistory(1, "User talk:Alice", 3, "Alice", [])
    article = PageHistory(2, "Physics", 0, "", [])
    archive = PageHistory(3, "User talk:Alice/Archive 1", 3, "Alice", [])
    assert is_user_talk(alice)
    assert not is_user_talk(article)
    assert is_user_talk(archive, include_subpages=True)
    assert not is_user_talk(archive, include_subpages=False)


def _rev(rev_id, ts):
    return Revision(rev_id, ts, Contributor(username="U"), "")


def test_sort_history_orders_and_breaks_ties_by_id():
    page = PageHistory(1, "User talk:A", 3, "A",
                       [_rev(1, 5), _rev(2, 2), _rev(3, 9)])
    assert [r.timestamp for r in sort_history(page).revisions] == [2, 5, 9]
    tie = PageHistory(1, "User talk:A", 3, "A", [_rev(7, 4), _rev(4, 4)])
    assert [r.revision_id for r in sort_history(tie).revisions] == [4, 7]
    sorted_once = sort_history(page)
    assert sort_history(sorted_once).revisions == sorted_once.revisions


def _naive_pairs(path):
    """Independent whole-file DOM scan: the completeness oracle."""
    tree = ET.parse(path)
    pairs = []
    for page in tree.getroot():
        if not page.tag.endswith("page"):
            continue
        page_id = None
        for child in page:
            if child.tag.endswith("id") and page_id is None:
                page_id = int(child.text)
        for child in page:
            if child.tag.endswith("revision"):
                for sub in child:
                    if sub.tag.endswith("id"):
                        pairs.append((page_id, int(sub.text)))
                        break
    return sorted(pairs)


def test_completeness_matches_naive_scan(tmp_path):
    import numpy as np
    rng = np.random.default_rng(3)
    pages = []
    for i in range(20):
        revisions = [(int(rng.integers(1, 10_000_000)), T + int(rng.integers(0, 10**6)),
                      f"U{j}", f"text {j}") for j in range(int(rng.integers(1, 8)))]
        pages.append(talk_page(f"User{i}", i + 1, revisions))
    path = write_dump(tmp_path, dump_xml(pages))
    streamed = sorted((p.page_id, r.revision_id)
                      for p in open_dump(path) for r in p.revisions)
    assert streamed == _naive_pairs(path)


def test_two_scans_are_byte_identical(tmp_path):
    path = write_dump(tmp_path, three_page_dump())

    def serialize():
        return "\n".join(json.dumps(page_record(p), sort_keys=True)
                         for p in open_dump(path))

    assert serialize() == serialize()


def test_streaming_memory_bounded_by_largest_page(tmp_path):
    small = "line of filler text\n" * 500          # ~10 KB
    big = "line of filler text\n" * 50_000         # ~1 MB, 100x the rest
    pages = [talk_page(f"U{i}", i + 1, [(i + 1, T, "Bob", small)]) for i in range(1500)]
    pages.append(talk_page("Big", 9999, [(99999, T, "Bob", big)]))
    path = write_dump(tmp_path, dump_xml(pages))
    total_size = path.stat().st_size

    tracemalloc.start()
    count = sum(1 for _ in open_dump(path))
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert count == 1501
    # peak must track the largest page, not the whole dump
    assert peak < 8 * len(big)
    assert total_size > 12 * len(big)


def test_reader_is_single_consumer(tmp_path):
    reader = open_dump(write_dump(tmp_path, three_page_dump()))
    list(reader)
    with pytest.raises(RuntimeError):
        list(reader)
