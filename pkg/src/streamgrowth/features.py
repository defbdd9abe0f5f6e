"""Windowed behavioral features for one streamer.

All features are computed over the half-open age window ``[t, t+delta)``
months and are pure functions of the events inside it:

* broadcasting: gap between broadcasts, count, games per broadcast, average
  length, popular games, broadcast days per week, schedule regularity,
  unique games
* twitter: tweet count, "live" posts, gap to the tweet before/after a
  broadcast, twitch-link posts, average length, replies
* youtube / instagram: post counts, metadata lengths, twitch-link posts

Features for a platform the streamer has no account on are 0.  Time features
are in hours except ``youtube_video_len`` (minutes, the source granularity).
"""

from __future__ import annotations

import bisect
from collections import defaultdict

from .data import (
    Broadcast,
    DAY_SECONDS,
    GamePopularityTable,
    MONTH_SECONDS,
    SocialPost,
    StreamerRecord,
    window_bounds,
    window_events,
)

FEATURE_NAMES = (
    "broadcast_gap",
    "n_broadcast",
    "n_games",
    "broadcast_len",
    "n_popular_game",
    "n_days",
    "sched_regularity",
    "unique_games",
    "n_tweet",
    "twitter_live",
    "tweet_before_gap",
    "tweet_after_gap",
    "twitter_adv",
    "tweet_len",
    "n_twitter_replies",
    "n_youtube",
    "youtube_desc_len",
    "youtube_title_len",
    "youtube_video_len",
    "youtube_adv",
    "n_instagram",
    "n_tags_per_post",
    "instagram_adv",
    "instagram_post_len",
)

HOUR = 3600.0


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def sched_regularity(broadcasts: list[Broadcast], window_start: float) -> float:
    """How consistently the streamer broadcasts on the same weekday.

    Days are counted relative to the window start (day ``i`` covers
    ``[start + i days, start + (i+1) days)``); week = ``day // 7`` and
    weekday = ``day % 7``.  For each weekday ``d``, ``n_d`` is the number of
    distinct weeks containing a broadcast on ``d``; the score is
    ``sum(max(n_d - 1, 0))``, i.e. 0 for one-off patterns and large when the
    same weekdays recur week after week.
    """
    weeks_by_weekday: dict[int, set[int]] = defaultdict(set)
    for b in broadcasts:
        day = int((b.start - window_start) // DAY_SECONDS)
        weeks_by_weekday[day % 7].add(day // 7)
    return float(sum(max(len(weeks) - 1, 0) for weeks in weeks_by_weekday.values()))


def popular_game_count(
    broadcasts: list[Broadcast],
    game_table: GamePopularityTable,
    twitch_created: float,
) -> float:
    """Average number of top-10%-viewed games played per broadcast."""
    if not broadcasts:
        return 0.0
    total = 0
    for b in broadcasts:
        month = int((b.start - twitch_created) // MONTH_SECONDS)
        popular = game_table.popular_games(month)
        if popular:
            total += sum(1 for g in b.games if g in popular)
    return total / len(broadcasts)


def tweet_gap_features(
    broadcasts: list[Broadcast], tweets: list[SocialPost]
) -> tuple[float, float]:
    """Mean hours from the nearest tweet before a broadcast, and to the
    nearest tweet after it.

    Broadcasts without a qualifying tweet on a given side are excluded from
    that side's mean; no qualifying pairs at all gives 0.
    """
    times = [p.time for p in tweets]
    before_gaps = []
    after_gaps = []
    for b in broadcasts:
        i = bisect.bisect_left(times, b.start)
        if i > 0:
            before_gaps.append((b.start - times[i - 1]) / HOUR)
        j = bisect.bisect_right(times, b.end)
        if j < len(times):
            after_gaps.append((times[j] - b.end) / HOUR)
    return _mean(before_gaps), _mean(after_gaps)


def compute_features(
    record: StreamerRecord,
    t: int,
    delta: int,
    game_table: GamePopularityTable | None = None,
) -> dict[str, float]:
    """All 24 behavioral features of ``record`` over ``[t, t+delta)``."""
    broadcasts, posts = window_events(record, t, delta)
    window_start, _ = window_bounds(record, t, delta)
    window_hours = delta * MONTH_SECONDS / HOUR
    n_weeks = -(-delta * 30 // 7)  # fractional final week counts as a week

    out = dict.fromkeys(FEATURE_NAMES, 0.0)

    # Broadcasting behavior
    out["n_broadcast"] = float(len(broadcasts))
    if len(broadcasts) >= 2:
        out["broadcast_gap"] = _mean(
            (b.start - a.start) / HOUR for a, b in zip(broadcasts, broadcasts[1:])
        )
    else:
        # fewer than two broadcasts means maximal inactivity
        out["broadcast_gap"] = window_hours
    out["n_games"] = _mean(len(b.games) for b in broadcasts)
    out["broadcast_len"] = _mean(b.duration_min / 60.0 for b in broadcasts)
    if game_table is not None:
        out["n_popular_game"] = popular_game_count(
            broadcasts, game_table, record.account.twitch_created
        )
    days = {int((b.start - window_start) // DAY_SECONDS) for b in broadcasts}
    out["n_days"] = min(len(days) / n_weeks, 7.0)
    out["sched_regularity"] = sched_regularity(broadcasts, window_start)
    out["unique_games"] = float(len({g for b in broadcasts for g in b.games}))

    # Twitter
    if record.account.has_platform("twitter"):
        tweets = [p for p in posts if p.platform == "twitter"]
        out["n_tweet"] = float(len(tweets))
        out["twitter_live"] = float(sum(1 for p in tweets if p.contains_live_keyword))
        before, after = tweet_gap_features(broadcasts, tweets)
        out["tweet_before_gap"] = before
        out["tweet_after_gap"] = after
        out["twitter_adv"] = float(sum(1 for p in tweets if p.has_twitch_url))
        out["tweet_len"] = _mean(p.text_length for p in tweets)
        out["n_twitter_replies"] = float(sum(1 for p in tweets if p.is_reply))

    # YouTube
    if record.account.has_platform("youtube"):
        videos = [p for p in posts if p.platform == "youtube"]
        out["n_youtube"] = float(len(videos))
        out["youtube_desc_len"] = _mean(p.description_length for p in videos)
        out["youtube_title_len"] = _mean(p.title_length for p in videos)
        out["youtube_video_len"] = _mean(p.video_length_min for p in videos)
        out["youtube_adv"] = float(sum(1 for p in videos if p.has_twitch_url))

    # Instagram
    if record.account.has_platform("instagram"):
        grams = [p for p in posts if p.platform == "instagram"]
        out["n_instagram"] = float(len(grams))
        out["n_tags_per_post"] = _mean(p.tag_count for p in grams)
        out["instagram_adv"] = float(sum(1 for p in grams if p.has_twitch_url))
        out["instagram_post_len"] = _mean(p.text_length for p in grams)

    return out
