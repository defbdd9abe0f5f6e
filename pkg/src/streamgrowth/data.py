"""Canonical data model for streamer activity logs and popularity snapshots.

Time convention: everything is indexed by account age in fixed 30-day months,
counted from the moment the streaming account was created.  Month ``m`` spans
ages ``[m, m+1)`` months; ``PopularitySnapshot`` with ``month_index == m``
records the state at the *end* of month ``m``.  The popularity value "at age
``a``" (for ``a >= 1``) is therefore ``snapshots[a - 1]``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

MONTH_SECONDS = 30 * 86400
DAY_SECONDS = 86400

MEASURES = ("followers", "concurrent_viewers", "cumulative_views", "cheers")
PLATFORMS = ("twitter", "youtube", "instagram")

# Cumulative measures must never decrease between snapshots.
_CUMULATIVE_MEASURES = ("followers", "cumulative_views", "cheers")

_SNAPSHOT_ATTR = {
    "followers": "followers",
    "concurrent_viewers": "avg_concurrent_viewers",
    "cumulative_views": "cumulative_views",
    "cheers": "cheers",
}


class DatasetError(Exception):
    """Malformed record or violated dataset invariant."""


@dataclass(frozen=True, slots=True)
class Broadcast:
    start: float
    duration_min: float
    games: tuple[str, ...]
    avg_ccv: float
    had_zero_viewers: bool

    @property
    def end(self) -> float:
        return self.start + self.duration_min * 60.0


@dataclass(frozen=True, slots=True)
class SocialPost:
    platform: str
    time: float
    text_length: int = 0
    has_twitch_url: bool = False
    contains_live_keyword: bool = False
    is_reply: bool = False
    tag_count: int = 0
    video_length_min: float = 0.0
    title_length: int = 0
    description_length: int = 0


@dataclass(frozen=True)
class AccountInfo:
    twitch_created: float
    twitter_created: float | None = None
    youtube_created: float | None = None
    instagram_created: float | None = None

    def platform_created(self, platform: str) -> float | None:
        if platform not in PLATFORMS:
            raise ValueError(f"unknown platform {platform!r}")
        return getattr(self, f"{platform}_created")

    def has_platform(self, platform: str) -> bool:
        return self.platform_created(platform) is not None


@dataclass(frozen=True, slots=True)
class PopularitySnapshot:
    month_index: int
    followers: float
    avg_concurrent_viewers: float
    cumulative_views: float
    cheers: float


@dataclass
class StreamerRecord:
    streamer_id: str
    account: AccountInfo
    broadcasts: list[Broadcast]
    posts: list[SocialPost]
    snapshots: list[PopularitySnapshot]
    # lazily built sort keys for window slicing
    _bcast_starts: list[float] = field(default=None, repr=False, compare=False)
    _post_times: list[float] = field(default=None, repr=False, compare=False)

    @property
    def n_months(self) -> int:
        return len(self.snapshots)

    def _ensure_sorted(self) -> None:
        # idempotent and safe under concurrent readers: build locally, assign
        # the guard attribute (_post_times) last
        if self._post_times is None:
            broadcasts = sorted(self.broadcasts, key=lambda b: b.start)
            posts = sorted(self.posts, key=lambda p: p.time)
            self.broadcasts = broadcasts
            self.posts = posts
            self._bcast_starts = [b.start for b in broadcasts]
            self._post_times = [p.time for p in posts]


@dataclass
class GamePopularityTable:
    """Total views per (account-age month, game).

    A game is *popular* in month ``m`` when it ranks among the top 10% most
    viewed games with nonzero views that month (at least one game qualifies
    whenever any game has views).  Ties break by views descending then game
    id ascending so the popular set is deterministic.
    """

    views: dict[tuple[int, str], float] = field(default_factory=dict)
    _popular_cache: dict[int, frozenset[str]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def popular_games(self, month: int) -> frozenset[str]:
        cached = self._popular_cache.get(month)
        if cached is not None:
            return cached
        scored = sorted(
            ((-v, g) for (m, g), v in self.views.items() if m == month and v > 0)
        )
        if not scored:
            popular = frozenset()
        else:
            k = max(1, -(-len(scored) // 10))  # ceil(0.1 * n)
            popular = frozenset(g for _, g in scored[:k])
        self._popular_cache[month] = popular
        return popular


@dataclass
class Dataset:
    streamers: dict[str, StreamerRecord]
    game_table: GamePopularityTable = field(default_factory=GamePopularityTable)

    def record(self, streamer_id: str) -> StreamerRecord:
        try:
            return self.streamers[streamer_id]
        except KeyError:
            raise DatasetError(f"unknown streamer {streamer_id!r}") from None

    def streamer_ids(self) -> list[str]:
        return sorted(self.streamers)


def measure_value(record: StreamerRecord, measure: str, age: int) -> float:
    """Popularity value at account age ``age`` months (``age >= 1``)."""
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    if age < 1 or age > record.n_months:
        raise DatasetError(
            f"streamer {record.streamer_id}: no snapshot for age {age} months"
        )
    return getattr(record.snapshots[age - 1], _SNAPSHOT_ATTR[measure])


def account_age_months(record: StreamerRecord, at: float) -> int:
    """Whole 30-day months elapsed since account creation at timestamp ``at``."""
    created = record.account.twitch_created
    if at < created:
        raise DatasetError(
            f"streamer {record.streamer_id}: timestamp precedes account creation"
        )
    return int((at - created) // MONTH_SECONDS)


def window_bounds(record: StreamerRecord, t: int, delta: int) -> tuple[float, float]:
    created = record.account.twitch_created
    return created + t * MONTH_SECONDS, created + (t + delta) * MONTH_SECONDS


def window_events(
    record: StreamerRecord, t: int, delta: int
) -> tuple[list[Broadcast], list[SocialPost]]:
    """Broadcasts and posts with timestamps in ``[t, t+delta)`` months of age.

    Half-open on the right: an event at exactly age ``t+delta`` belongs to the
    next window, so fixed-size windows partition a streamer's events.
    """
    if t < 0 or delta < 1:
        raise ValueError(f"invalid window t={t} delta={delta}")
    if t + delta > record.n_months:
        raise DatasetError(
            f"streamer {record.streamer_id}: window [{t}, {t + delta}) outside "
            f"recorded lifespan of {record.n_months} months"
        )
    record._ensure_sorted()
    lo, hi = window_bounds(record, t, delta)
    b0 = bisect.bisect_left(record._bcast_starts, lo)
    b1 = bisect.bisect_left(record._bcast_starts, hi)
    p0 = bisect.bisect_left(record._post_times, lo)
    p1 = bisect.bisect_left(record._post_times, hi)
    return record.broadcasts[b0:b1], record.posts[p0:p1]


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise DatasetError(msg)


def validate_record(record: StreamerRecord) -> None:
    sid = record.streamer_id
    _check(bool(sid), "empty streamer id")
    acct = record.account
    _check(_finite(acct.twitch_created), f"{sid}: non-finite twitch_created")
    for platform in PLATFORMS:
        created = acct.platform_created(platform)
        if created is not None:
            _check(_finite(created), f"{sid}: non-finite {platform}_created")
    _check(len(record.snapshots) >= 1, f"{sid}: no snapshots")
    for i, snap in enumerate(record.snapshots):
        _check(
            snap.month_index == i,
            f"{sid}: snapshot month_index {snap.month_index} at position {i} "
            "(must be contiguous from 0)",
        )
        for measure in MEASURES:
            v = getattr(snap, _SNAPSHOT_ATTR[measure])
            _check(_finite(v) and v >= 0, f"{sid}: month {i}: bad {measure} value {v}")
        if i > 0:
            prev = record.snapshots[i - 1]
            for measure in _CUMULATIVE_MEASURES:
                attr = _SNAPSHOT_ATTR[measure]
                _check(
                    getattr(snap, attr) >= getattr(prev, attr),
                    f"{sid}: {measure} decreases between months {i - 1} and {i}",
                )
    for b in record.broadcasts:
        _check(_finite(b.start), f"{sid}: non-finite broadcast start")
        _check(b.duration_min > 0, f"{sid}: broadcast duration must be > 0")
        _check(b.avg_ccv >= 0, f"{sid}: negative broadcast avg_ccv")
        _check(
            b.start >= acct.twitch_created,
            f"{sid}: broadcast precedes account creation",
        )
    for p in record.posts:
        _check(p.platform in PLATFORMS, f"{sid}: unknown post platform {p.platform!r}")
        _check(_finite(p.time), f"{sid}: non-finite post time")
        _check(
            p.time >= acct.twitch_created,
            f"{sid}: post precedes account creation",
        )
        _check(
            acct.has_platform(p.platform),
            f"{sid}: post on {p.platform} but no {p.platform} account recorded",
        )
        _check(p.text_length >= 0, f"{sid}: negative post text_length")
        _check(p.tag_count >= 0, f"{sid}: negative post tag_count")
        _check(p.video_length_min >= 0, f"{sid}: negative post video_length")


def validate_dataset(dataset: Dataset) -> None:
    _check(bool(dataset.streamers), "no streamers")
    for record in dataset.streamers.values():
        validate_record(record)
    for (month, game), views in dataset.game_table.views.items():
        _check(
            views >= 0, f"game table: negative views for game {game!r} month {month}"
        )


def _finite(x: float) -> bool:
    return x == x and abs(x) != float("inf")
