from __future__ import annotations

from streamgrowth.data import (
    AccountInfo,
    Broadcast,
    Dataset,
    GamePopularityTable,
    MONTH_SECONDS,
    PopularitySnapshot,
    SocialPost,
    StreamerRecord,
)

# 2016-01-01T00:00:00Z
T0 = 1451606400.0


def months(m: float, created: float = T0) -> float:
    """Timestamp at account age m (fractional) months."""
    return created + m * MONTH_SECONDS


def snap(m: int, followers=0.0, ccv=0.0, views=0.0, cheers=0.0) -> PopularitySnapshot:
    return PopularitySnapshot(
        month_index=m,
        followers=followers,
        avg_concurrent_viewers=ccv,
        cumulative_views=views,
        cheers=cheers,
    )


def bcast(
    at_months: float,
    duration_min: float = 60.0,
    games: tuple[str, ...] = ("g1",),
    avg_ccv: float = 2.0,
    zero: bool = False,
    created: float = T0,
) -> Broadcast:
    return Broadcast(
        start=months(at_months, created),
        duration_min=duration_min,
        games=games,
        avg_ccv=avg_ccv,
        had_zero_viewers=zero,
    )


def post(platform: str, at_months: float, created: float = T0, **kw) -> SocialPost:
    return SocialPost(platform=platform, time=months(at_months, created), **kw)


def make_record(
    sid: str = "s1",
    n_months: int = 12,
    created: float = T0,
    broadcasts=(),
    posts=(),
    snapshots=None,
    twitter: float | None = None,
    youtube: float | None = None,
    instagram: float | None = None,
) -> StreamerRecord:
    posts = list(posts)
    platforms_used = {p.platform for p in posts}
    if snapshots is None:
        snapshots = [snap(m, followers=float(m)) for m in range(n_months)]
    return StreamerRecord(
        streamer_id=sid,
        account=AccountInfo(
            twitch_created=created,
            twitter_created=created if (twitter is None and "twitter" in platforms_used) else twitter,
            youtube_created=created if (youtube is None and "youtube" in platforms_used) else youtube,
            instagram_created=created if (instagram is None and "instagram" in platforms_used) else instagram,
        ),
        broadcasts=list(broadcasts),
        posts=posts,
        snapshots=list(snapshots),
    )


def make_dataset(records, game_views=None) -> Dataset:
    table = GamePopularityTable(views=dict(game_views or {}))
    return Dataset(streamers={r.streamer_id: r for r in records}, game_table=table)
