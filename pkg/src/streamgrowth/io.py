"""Dataset loading, validation and serialization.

File layout for a dataset directory::

    streamers.jsonl   one record per streamer: id, account timestamps,
                      snapshot array
    broadcasts.jsonl  one record per broadcast
    posts.jsonl       one record per social post (absent fields -> 0/false)
    games.csv         month_index,game_id,total_views

Counts are base-10 integers, timestamps ISO-8601 UTC with a ``Z`` suffix.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from pathlib import Path

from .data import (
    AccountInfo,
    Broadcast,
    Dataset,
    DatasetError,
    GamePopularityTable,
    PLATFORMS,
    PopularitySnapshot,
    SocialPost,
    StreamerRecord,
    validate_dataset,
)

REQUIRED_FILES = ("streamers.jsonl", "broadcasts.jsonl", "posts.jsonl", "games.csv")


def parse_timestamp(text: str) -> float:
    """ISO-8601 ``...Z`` string to epoch seconds."""
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise DatasetError(f"bad timestamp {text!r}: {exc}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def format_timestamp(ts: float) -> str:
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    if ts == int(ts):
        return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
    return dt.isoformat().replace("+00:00", "Z")


def _jsonl_records(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(
                    f"{path.name}:{lineno}: malformed JSON record: {exc}"
                ) from None


def _field(rec: dict, key: str, path: Path, lineno: int):
    try:
        return rec[key]
    except KeyError:
        raise DatasetError(f"{path.name}:{lineno}: missing field {key!r}") from None


def _opt_timestamp(rec: dict, key: str) -> float | None:
    value = rec.get(key)
    return None if value is None else parse_timestamp(value)


def load_dataset(path: str | Path) -> Dataset:
    """Load and validate a dataset directory.

    Raises DatasetError naming the offending file and line for malformed
    records, or the streamer and field for invariant violations.
    """
    root = Path(path)
    for name in REQUIRED_FILES:
        if not (root / name).exists():
            raise DatasetError(f"missing required file {name} in {root}")

    streamers: dict[str, StreamerRecord] = {}
    spath = root / "streamers.jsonl"
    for lineno, rec in _jsonl_records(spath):
        sid = str(_field(rec, "id", spath, lineno))
        if sid in streamers:
            raise DatasetError(f"{spath.name}:{lineno}: duplicate streamer id {sid!r}")
        account = AccountInfo(
            twitch_created=parse_timestamp(_field(rec, "twitch_created", spath, lineno)),
            twitter_created=_opt_timestamp(rec, "twitter_created"),
            youtube_created=_opt_timestamp(rec, "youtube_created"),
            instagram_created=_opt_timestamp(rec, "instagram_created"),
        )
        snapshots = [
            PopularitySnapshot(
                month_index=int(_field(s, "month_index", spath, lineno)),
                followers=float(_field(s, "followers", spath, lineno)),
                avg_concurrent_viewers=float(
                    _field(s, "avg_concurrent_viewers", spath, lineno)
                ),
                cumulative_views=float(_field(s, "cumulative_views", spath, lineno)),
                cheers=float(_field(s, "cheers", spath, lineno)),
            )
            for s in _field(rec, "snapshots", spath, lineno)
        ]
        streamers[sid] = StreamerRecord(
            streamer_id=sid,
            account=account,
            broadcasts=[],
            posts=[],
            snapshots=snapshots,
        )

    bpath = root / "broadcasts.jsonl"
    for lineno, rec in _jsonl_records(bpath):
        sid = str(_field(rec, "streamer", bpath, lineno))
        if sid not in streamers:
            raise DatasetError(f"{bpath.name}:{lineno}: unknown streamer {sid!r}")
        streamers[sid].broadcasts.append(
            Broadcast(
                start=parse_timestamp(_field(rec, "start", bpath, lineno)),
                duration_min=float(_field(rec, "duration_min", bpath, lineno)),
                games=tuple(str(g) for g in rec.get("games", [])),
                avg_ccv=float(rec.get("avg_ccv", 0.0)),
                had_zero_viewers=bool(rec.get("zero_viewers", False)),
            )
        )

    ppath = root / "posts.jsonl"
    for lineno, rec in _jsonl_records(ppath):
        sid = str(_field(rec, "streamer", ppath, lineno))
        if sid not in streamers:
            raise DatasetError(f"{ppath.name}:{lineno}: unknown streamer {sid!r}")
        platform = str(_field(rec, "platform", ppath, lineno))
        if platform not in PLATFORMS:
            raise DatasetError(f"{ppath.name}:{lineno}: unknown platform {platform!r}")
        streamers[sid].posts.append(
            SocialPost(
                platform=platform,
                time=parse_timestamp(_field(rec, "time", ppath, lineno)),
                text_length=int(rec.get("text_length", 0)),
                has_twitch_url=bool(rec.get("has_twitch_url", False)),
                contains_live_keyword=bool(rec.get("contains_live_keyword", False)),
                is_reply=bool(rec.get("is_reply", False)),
                tag_count=int(rec.get("tag_count", 0)),
                video_length_min=float(rec.get("video_length", 0.0)),
                title_length=int(rec.get("title_length", 0)),
                description_length=int(rec.get("description_length", 0)),
            )
        )

    game_table = GamePopularityTable()
    gpath = root / "games.csv"
    with open(gpath, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                month = int(row["month_index"])
                game = row["game_id"]
                views = float(row["total_views"])
            except (KeyError, TypeError, ValueError) as exc:
                raise DatasetError(f"{gpath.name}:{lineno}: bad row: {exc}") from None
            game_table.views[(month, game)] = views

    dataset = Dataset(streamers=streamers, game_table=game_table)
    validate_dataset(dataset)
    return dataset


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset directory in the schema ``load_dataset`` reads."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)

    with open(root / "streamers.jsonl", "w", encoding="utf-8") as fh:
        for sid in sorted(dataset.streamers):
            record = dataset.streamers[sid]
            acct = record.account
            fh.write(
                json.dumps(
                    {
                        "id": sid,
                        "twitch_created": format_timestamp(acct.twitch_created),
                        "twitter_created": _fmt_opt(acct.twitter_created),
                        "youtube_created": _fmt_opt(acct.youtube_created),
                        "instagram_created": _fmt_opt(acct.instagram_created),
                        "snapshots": [
                            {
                                "month_index": s.month_index,
                                "followers": _num(s.followers),
                                "avg_concurrent_viewers": s.avg_concurrent_viewers,
                                "cumulative_views": _num(s.cumulative_views),
                                "cheers": _num(s.cheers),
                            }
                            for s in record.snapshots
                        ],
                    }
                )
                + "\n"
            )

    with open(root / "broadcasts.jsonl", "w", encoding="utf-8") as fh:
        for sid in sorted(dataset.streamers):
            for b in sorted(dataset.streamers[sid].broadcasts, key=lambda b: b.start):
                fh.write(
                    json.dumps(
                        {
                            "streamer": sid,
                            "start": format_timestamp(b.start),
                            "duration_min": b.duration_min,
                            "games": list(b.games),
                            "avg_ccv": b.avg_ccv,
                            "zero_viewers": b.had_zero_viewers,
                        }
                    )
                    + "\n"
                )

    with open(root / "posts.jsonl", "w", encoding="utf-8") as fh:
        for sid in sorted(dataset.streamers):
            for p in sorted(dataset.streamers[sid].posts, key=lambda p: p.time):
                fh.write(
                    json.dumps(
                        {
                            "streamer": sid,
                            "platform": p.platform,
                            "time": format_timestamp(p.time),
                            "text_length": p.text_length,
                            "has_twitch_url": p.has_twitch_url,
                            "contains_live_keyword": p.contains_live_keyword,
                            "is_reply": p.is_reply,
                            "tag_count": p.tag_count,
                            "video_length": p.video_length_min,
                            "title_length": p.title_length,
                            "description_length": p.description_length,
                        }
                    )
                    + "\n"
                )

    with open(root / "games.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month_index", "game_id", "total_views"])
        for (month, game) in sorted(dataset.game_table.views):
            writer.writerow([month, game, _num(dataset.game_table.views[(month, game)])])


def write_labels_csv(label_sets, path: str | Path) -> None:
    """Dump outcome labels: ``streamer,task,measure,t,delta,label``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["streamer", "task", "measure", "t", "delta", "label"])
        for labels in label_sets:
            spec = labels.spec
            for sid in sorted(labels.bits):
                writer.writerow(
                    [sid, spec.task, spec.measure, spec.t, spec.delta, labels.bits[sid]]
                )


def _fmt_opt(ts: float | None) -> str | None:
    return None if ts is None else format_timestamp(ts)


def _num(x: float):
    # counts serialize as base-10 integers when integral
    return int(x) if x == int(x) else x
