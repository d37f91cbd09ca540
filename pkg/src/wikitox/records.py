"""Shared file formats: newline-delimited JSON with schema validation and
run manifests pairing every output with its provenance.

Records are serialized with sorted keys and compact separators so identical
data always produces identical bytes; manifests carry wall-clock instants
and are therefore the one artifact excluded from byte-reproducibility
comparisons.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .activity import ContributionLog
from .dump import Contributor
from .errors import SchemaError
from .extract import Comment
from .toxicity import ATTRIBUTES, AttributeScores, ScoredComment
from .util import parse_timestamp, sha256_file


def _require(record, field, kinds, path, lineno):
    if field not in record:
        raise SchemaError(f"{path}:{lineno}: missing required field {field!r}")
    value = record[field]
    if not isinstance(value, kinds):
        raise SchemaError(
            f"{path}:{lineno}: field {field!r} has type {type(value).__name__}")
    return value


def _validate_page(record, path, lineno):
    _require(record, "page_id", int, path, lineno)
    _require(record, "title", str, path, lineno)
    _require(record, "namespace", int, path, lineno)
    _require(record, "owner", str, path, lineno)
    revisions = _require(record, "revisions", list, path, lineno)
    for rev in revisions:
        if not isinstance(rev, dict) or "id" not in rev or "timestamp" not in rev:
            raise SchemaError(f"{path}:{lineno}: malformed revision entry")


def _validate_comment(record, path, lineno):
    _require(record, "recipient", str, path, lineno)
    _require(record, "timestamp", int, path, lineno)
    _require(record, "raw_text", str, path, lineno)
    _require(record, "clean_text", str, path, lineno)
    _require(record, "byte_len", int, path, lineno)
    _require(record, "page_id", int, path, lineno)
    _require(record, "revision_id", int, path, lineno)
    username = record.get("author_username")
    ip = record.get("author_ip")
    if (username is None) == (ip is None):
        raise SchemaError(
            f"{path}:{lineno}: exactly one of author_username/author_ip required")


def _validate_scored(record, path, lineno):
    _validate_comment(record, path, lineno)
    _require(record, "scorer", str, path, lineno)
    scores = _require(record, "scores", dict, path, lineno)
    for name in ATTRIBUTES:
        if name not in scores:
            raise SchemaError(f"{path}:{lineno}: missing score {name!r}")
        value = scores[name]
        if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
            raise SchemaError(f"{path}:{lineno}: score {name!r} = {value!r}")


def _validate_contrib(record, path, lineno):
    _require(record, "user", str, path, lineno)
    timestamps = _require(record, "timestamps", list, path, lineno)
    for value in timestamps:
        if not isinstance(value, (int, str)):
            raise SchemaError(f"{path}:{lineno}: bad timestamp {value!r}")


SCHEMAS = {
    "page.v1": _validate_page,
    "comment.v1": _validate_comment,
    "scored.v1": _validate_scored,
    "contrib.v1": _validate_contrib,
}


def read_ndjson(path, schema_id: str):
    """Stream validated records; errors cite the offending line number."""
    validate = SCHEMAS[schema_id]
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            validate(record, path, lineno)
            yield record


def dump_json_line(record) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))


def write_ndjson(path, records, schema_id: str, *, stage: str, inputs=(),
                 config=None, seed=None) -> dict:
    """Write records and the paired manifest; returns the manifest."""
    validate = SCHEMAS[schema_id]
    started = _now()
    count = 0
    with open(path, "w", encoding="utf-8") as out:
        for record in records:
            validate(record, str(path), count + 1)
            out.write(dump_json_line(record) + "\n")
            count += 1
    return write_manifest(path, stage=stage, schema=schema_id, inputs=inputs,
                          config=config, seed=seed, started=started,
                          records=count)


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def manifest_path(output_path) -> str:
    return str(output_path) + ".manifest.json"


def write_manifest(output_path, *, stage: str, inputs=(), config=None,
                   seed=None, schema=None, started=None, records=None) -> dict:
    manifest = {
        "stage": stage,
        "schema": schema,
        "tool_version": __version__,
        "seed": seed,
        "config": config or {},
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "output": {
            "path": str(output_path),
            "sha256": sha256_file(output_path),
            "records": records,
        },
        "started": started or _now(),
        "finished": _now(),
    }
    with open(manifest_path(output_path), "w", encoding="utf-8") as out:
        json.dump(manifest, out, indent=2, sort_keys=True)
        out.write("\n")
    return manifest


def verify_manifest(path) -> dict:
    """Re-hash the referenced output (and any inputs still present);
    raises SchemaError on a mismatch."""
    with open(path, "r", encoding="utf-8") as handle:
        manifest = json.load(handle)
    out = manifest["output"]
    actual = sha256_file(out["path"])
    if actual != out["sha256"]:
        raise SchemaError(
            f"{path}: output hash mismatch for {out['path']}: "
            f"{actual} != {out['sha256']}")
    return manifest


# --- converters between domain objects and records ---------------------------

def comment_to_record(comment: Comment) -> dict:
    return {
        "recipient": comment.recipient,
        "author_username": comment.author.username,
        "author_ip": comment.author.ip,
        "timestamp": comment.timestamp,
        "raw_text": comment.raw_text,
        "clean_text": comment.clean_text,
        "byte_len": comment.byte_len,
        "page_id": comment.page_id,
        "revision_id": comment.revision_id,
    }


def record_to_comment(record) -> Comment:
    author = (Contributor(username=record["author_username"])
              if record.get("author_username") is not None
              else Contributor(ip=record.get("author_ip") or ""))
    return Comment(
        recipient=record["recipient"], author=author,
        timestamp=record["timestamp"], raw_text=record["raw_text"],
        clean_text=record["clean_text"], byte_len=record["byte_len"],
        page_id=record["page_id"], revision_id=record["revision_id"])


def scored_to_record(scored: ScoredComment) -> dict:
    record = comment_to_record(scored.comment)
    record["scores"] = dict(zip(ATTRIBUTES, scored.scores.as_tuple()))
    record["scorer"] = scored.scorer_id
    return record


def record_to_scored(record) -> ScoredComment:
    scores = AttributeScores(**{name: record["scores"][name] for name in ATTRIBUTES})
    return ScoredComment(comment=record_to_comment(record), scores=scores,
                         scorer_id=record["scorer"])


def contrib_to_record(log: ContributionLog) -> dict:
    return {"user": log.user, "timestamps": [int(t) for t in log.timestamps]}


def record_to_contrib(record) -> ContributionLog:
    return ContributionLog.from_timestamps(
        record["user"], (parse_timestamp(t) for t in record["timestamps"]))


def read_contribution_logs(path) -> dict:
    """contribs.ndjson -> {user: ContributionLog}."""
    logs = {}
    for record in read_ndjson(path, "contrib.v1"):
        log = record_to_contrib(record)
        logs[log.user] = log
    return logs
