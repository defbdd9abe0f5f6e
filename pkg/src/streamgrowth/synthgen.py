"""Seeded synthetic streamer population with a tunable behavior->growth link.

The generator exists to validate the analysis pipeline: it plants a known
coupling between within-window behavior and popularity growth, so planted
effects (and planted nulls) have a ground truth the experiment suite can be
checked against.

Per streamer, a heavy-tailed latent quality fixes the popularity scale, and
base behavior traits (mildly quality-coupled) fix typical activity.  Each
month the traits get fresh multiplicative noise; the realized month behavior
is squashed into a score in [0, 1) and monthly popularity growth is

    base(quality) * (1 + behavior_effect * score) * lognormal noise.

Only three realized quantities feed the score, listed in DRIVING_FEATURES;
everything else (broadcast counts, flagged-tweet streams, video metadata,
...) is generated independently of it so that coefficient-recovery tests
have a clean positive/negative split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .data import (
    AccountInfo,
    Broadcast,
    DAY_SECONDS,
    Dataset,
    GamePopularityTable,
    MONTH_SECONDS,
    PopularitySnapshot,
    SocialPost,
    StreamerRecord,
    validate_dataset,
)
from .features import sched_regularity

# Feature names whose realized values drive planted popularity growth.
DRIVING_FEATURES = ("broadcast_len", "sched_regularity", "n_tweet")

# 2016-01-01T00:00:00Z; streamer creation times spread over ~6 months after.
_EPOCH_START = 1451606400

# Fixed process constants (not exposed in the config: they define the
# generator's identity, and tests rely on the planted geometry).
_QUALITY_COUPLING = 0.08  # how strongly traits scale with latent quality
_LEN_BASE_SIGMA = 0.1  # persistent spread of broadcast length between streamers
_TWEET_BASE_SIGMA = 0.12  # persistent spread of tweet volume between streamers
# behavior drifts as an AR(1) walk: sticky month to month, but accumulating
# genuinely new (history-unpredictable) change the further ahead one looks
_TRAIT_AR_RHO = 0.8
_LEN_DRIFT_SIGMA = 0.8  # stationary sd of the broadcast-length walk
_TWEET_DRIFT_SIGMA = 1.0  # stationary sd of the tweet-volume walk
_ADHERENCE_DRIFT_SD = 0.45  # stationary sd of the adherence walk (logit scale)
# one permanent regime shift per streamer at a random month (life changes):
# a window that contains the shift sees a level change no history predicts
_SHIFT_LEN_SD = 0.9
_SHIFT_TWEET_SD = 1.1
_SHIFT_ADHERENCE_SD = 0.7
_COUNT_MONTH_SIGMA = 0.25  # month-to-month noise of broadcast count
_GROWTH_NOISE_SIGMA = 0.05  # multiplicative growth noise per month
# views get their own, larger noise so the followers/views histories stay
# strongly but not degenerately correlated (a near-1 correlation makes the
# non-regularized baseline design numerically singular)
_VIEWS_NOISE_SIGMA = 0.35
_SCORE_SPREAD = 1.4  # widens the squashed score around 0.5 (clipped to [0,1])
_FOLLOWER_SCALE = 18.0
_VIEWS_SCALE = 120.0
_CCV_SCALE = 2.2
_CHEER_SCALE = 0.35
_CHEER_FLOOR = 0.6  # cheers/month floor for non-zero-inflated streamers
_IMPORTED_SCALE = 400.0  # initial followers for imported-audience streamers
_ZERO_VIEWER_CCV = 0.7  # a broadcast below this drawn ccv counts as empty
_N_GAMES = 20


@dataclass
class SynthConfig:
    n_streamers: int = 400
    n_months: int = 14
    seed: int = 0
    behavior_effect: float = 0.5  # beta in [0, 1]
    # Pareto tail of latent quality; 0.95 calibrates the top-decile follower
    # share into the 70-90% band at both small and large population sizes
    tail_exponent: float = 0.95
    imported_audience_fraction: float = 0.08
    broadcast_rate: float = 7.0  # mean broadcasts per month
    broadcast_len_hours: float = 2.0  # mean broadcast duration
    tweet_rate: float = 8.0  # mean plain tweets per month
    schedule_adherence: float = 0.6  # mean weekday-plan adherence
    twitter_adoption: float = 0.7
    youtube_adoption: float = 0.45
    instagram_adoption: float = 0.4
    adoption_month_mean: float = 2.0  # platform creation offset, months
    adoption_month_sd: float = 4.0
    cheer_zero_inflation: float = 0.45

    def validate(self) -> None:
        if self.n_streamers < 10:
            raise ValueError("n_streamers must be >= 10")
        if self.n_months < 3:
            raise ValueError("n_months must be >= 3")
        for name in (
            "behavior_effect",
            "imported_audience_fraction",
            "schedule_adherence",
            "twitter_adoption",
            "youtube_adoption",
            "instagram_adoption",
            "cheer_zero_inflation",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.tail_exponent <= 0.05:
            raise ValueError("tail_exponent must be > 0.05")
        for name in ("broadcast_rate", "broadcast_len_hours", "tweet_rate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def parse_config_text(text: str) -> SynthConfig:
    """Parse ``key = value`` lines (# comments allowed) into a SynthConfig."""
    types = {f.name: f.type for f in fields(SynthConfig)}
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in types:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        caster = int if types[key] in ("int", int) else float
        try:
            kwargs[key] = caster(value.strip())
        except ValueError:
            raise ValueError(f"config line {lineno}: bad value for {key!r}") from None
    config = SynthConfig(**kwargs)
    config.validate()
    return config


def load_config(path: str | Path) -> SynthConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def _squash(value: float, scale: float) -> float:
    """Monotone map of a non-negative quantity into [0, 1], with the spread
    around the midpoint widened so realistic month-to-month swings move the
    score through most of its range."""
    raw = 1.0 - math.exp(-value / scale)
    return min(max(_SCORE_SPREAD * (raw - 0.5) + 0.5, 0.0), 1.0)


def _behavior_score(
    mean_len_hours: float, regularity: float, n_tweets: int, config: SynthConfig
) -> float:
    # regularity weighted up: its feature is the noisiest measurement of its
    # trait, so this keeps the three planted effects comparable in strength
    return (
        _squash(mean_len_hours, config.broadcast_len_hours)
        + 1.3 * _squash(regularity, 4.0)
        + _squash(float(n_tweets), 1.5 * config.tweet_rate)
    ) / 3.3


def _month_times(rng, created: float, month: int, n: int) -> np.ndarray:
    start = created + month * MONTH_SECONDS
    return start + rng.random(n) * MONTH_SECONDS


def _generate_streamer(config: SynthConfig, index: int, rank: int) -> StreamerRecord:
    rng = np.random.default_rng([config.seed, index])
    sid = f"s{index:05d}"
    created = float(_EPOCH_START + int(rng.integers(0, 180 * DAY_SECONDS)))

    # stratified Pareto quantile: rank spreads streamers evenly through the
    # tail so the population skew reproduces the configured exponent instead
    # of being dominated by extreme-order-statistic luck
    p = (rank + rng.uniform(0.05, 0.95)) / config.n_streamers
    quality = (1.0 - p) ** (-1.0 / config.tail_exponent)
    qz = math.log(quality)

    # base traits, mildly quality-coupled; persistent spread is kept well
    # below the month-to-month noise so windowed behavior stays genuinely
    # unpredictable from history
    len_base = config.broadcast_len_hours * math.exp(
        _QUALITY_COUPLING * qz + rng.normal(0.0, _LEN_BASE_SIGMA)
    )
    count_base = config.broadcast_rate * math.exp(
        0.1 * qz + rng.normal(0.0, 0.2)
    )
    tweet_base = config.tweet_rate * math.exp(
        _QUALITY_COUPLING * qz + rng.normal(0.0, _TWEET_BASE_SIGMA)
    )
    adherence_logit_base = (
        math.log(config.schedule_adherence / (1.0 - config.schedule_adherence + 1e-9))
        + 0.1 * qz
        + rng.normal(0.0, 0.25)
    )
    preferred_weekdays = rng.choice(7, size=int(rng.integers(2, 4)), replace=False)
    game_pool = [f"game{int(g):02d}" for g in rng.integers(0, _N_GAMES, size=3)]

    # third-party accounts
    platform_created: dict[str, float | None] = {}
    platform_start_month: dict[str, int] = {}
    for platform, adopt_p in (
        ("twitter", config.twitter_adoption),
        ("youtube", config.youtube_adoption),
        ("instagram", config.instagram_adoption),
    ):
        if rng.random() < adopt_p:
            offset = float(
                rng.normal(config.adoption_month_mean, config.adoption_month_sd)
            )
            platform_created[platform] = float(
                int(created + offset * MONTH_SECONDS)
            )
            platform_start_month[platform] = max(0, math.ceil(offset))
        else:
            platform_created[platform] = None

    live_rate = 0.4 * math.exp(rng.normal(0.0, 0.3))
    adv_rate = 0.5 * math.exp(rng.normal(0.0, 0.3))
    reply_rate = 0.6 * math.exp(rng.normal(0.0, 0.3))
    tweet_len_mean = float(rng.uniform(40.0, 140.0))
    yt_rate = 0.8 * math.exp(rng.normal(0.0, 0.6))
    insta_rate = 1.2 * math.exp(rng.normal(0.0, 0.6))

    never_cheers = rng.random() < config.cheer_zero_inflation
    imported = rng.random() < config.imported_audience_fraction

    followers = (
        float(round(_IMPORTED_SCALE * quality * rng.lognormal(0.0, 0.5)))
        if imported
        else float(rng.integers(0, 5))
    )
    cum_views = (
        float(round(2.0 * _IMPORTED_SCALE * quality * rng.lognormal(0.0, 0.5)))
        if imported
        else float(rng.integers(0, 10))
    )
    cheers_total = 0.0
    beta = config.behavior_effect

    broadcasts: list[Broadcast] = []
    posts: list[SocialPost] = []
    snapshots: list[PopularitySnapshot] = []

    # struggling streamers (quality near the Pareto floor) get genuinely tiny
    # audiences, so empty broadcasts concentrate at the bottom of the tail
    ccv_quality = max(quality - 0.7, 0.3) ** 0.8

    rho = _TRAIT_AR_RHO
    innov = math.sqrt(1.0 - rho * rho)
    walk_len = rng.normal(0.0, _LEN_DRIFT_SIGMA)
    walk_tweet = rng.normal(0.0, _TWEET_DRIFT_SIGMA)
    walk_adh = rng.normal(0.0, _ADHERENCE_DRIFT_SD)
    # regime shift: lands outside the recorded span for about half the
    # population (month drawn over twice the horizon)
    shift_month = int(rng.integers(1, 2 * config.n_months))
    shift_len = rng.normal(0.0, _SHIFT_LEN_SD)
    shift_tweet = rng.normal(0.0, _SHIFT_TWEET_SD)
    shift_adh = rng.normal(0.0, _SHIFT_ADHERENCE_SD)

    for month in range(config.n_months):
        month_start = created + month * MONTH_SECONDS
        month_end = month_start + MONTH_SECONDS
        if month > 0:
            walk_len = rho * walk_len + rng.normal(0.0, innov * _LEN_DRIFT_SIGMA)
            walk_tweet = rho * walk_tweet + rng.normal(0.0, innov * _TWEET_DRIFT_SIGMA)
            walk_adh = rho * walk_adh + rng.normal(0.0, innov * _ADHERENCE_DRIFT_SD)
        shifted = month >= shift_month
        eps_len = math.exp(walk_len + (shift_len if shifted else 0.0))
        eps_count = math.exp(rng.normal(0.0, _COUNT_MONTH_SIGMA))
        eps_tweet = math.exp(walk_tweet + (shift_tweet if shifted else 0.0))
        adherence = 1.0 / (
            1.0
            + math.exp(
                -(adherence_logit_base + walk_adh + (shift_adh if shifted else 0.0))
            )
        )

        ccv_base = _CCV_SCALE * ccv_quality * (1.0 + beta * 0.5) * math.exp(
            rng.normal(0.0, 0.25)
        )

        # broadcasts (batched draws); adherent ones cycle through the
        # (week x preferred weekday) grid without collisions, so the count of
        # distinct broadcast days stays insensitive to adherence
        n_bcast = int(rng.poisson(count_base * eps_count))
        adherent = rng.random(n_bcast) < adherence
        slots = np.arange(n_bcast)
        n_pref = len(preferred_weekdays)
        planned = ((slots // n_pref) % 4) * 7 + preferred_weekdays[slots % n_pref]
        # random days drawn without replacement, so the distinct-day count
        # tracks the broadcast count in both placement modes alike
        scattered = rng.permutation(30)[: min(n_bcast, 30)]
        if n_bcast > 30:
            scattered = np.concatenate([scattered, rng.integers(0, 30, n_bcast - 30)])
        days = np.where(adherent, planned, scattered)
        starts = month_start + days * DAY_SECONDS + rng.uniform(0, 0.9, n_bcast) * DAY_SECONDS
        durations = np.maximum(
            5.0, 60.0 * len_base * eps_len * np.exp(rng.normal(0.0, 0.25, n_bcast))
        )
        second_game = rng.random(n_bcast) < 0.3
        game_picks = rng.integers(0, len(game_pool), size=(n_bcast, 2))
        ccv_draws = ccv_base * np.exp(rng.normal(0.0, 0.5, n_bcast))
        month_broadcasts = sorted(
            (
                Broadcast(
                    start=float(starts[i]),
                    duration_min=float(durations[i]),
                    games=(
                        (game_pool[game_picks[i, 0]], game_pool[game_picks[i, 1]])
                        if second_game[i]
                        else (game_pool[game_picks[i, 0]],)
                    ),
                    avg_ccv=round(float(ccv_draws[i]), 3),
                    had_zero_viewers=bool(ccv_draws[i] < _ZERO_VIEWER_CCV),
                )
                for i in range(n_bcast)
            ),
            key=lambda b: b.start,
        )
        broadcasts.extend(month_broadcasts)
        bcast_starts = np.array([b.start for b in month_broadcasts])
        bcast_ends = np.array([b.end for b in month_broadcasts])

        def _near_broadcast_times(n: int, before: bool) -> np.ndarray:
            if len(bcast_starts) == 0:
                return _month_times(rng, created, month, n)
            anchor = bcast_starts if before else bcast_ends
            picks = anchor[rng.integers(0, len(anchor), size=n)]
            gaps = rng.exponential(2.0 * 3600.0, size=n)
            ts = picks - gaps if before else picks + gaps
            return np.clip(ts, month_start, month_end - 1.0)

        # tweets: only the plain stream is planted into growth; the sparse
        # live/adv/reply streams are independent noise on top of the total
        n_plain = 0
        if platform_created["twitter"] is not None and month >= platform_start_month["twitter"]:
            n_plain = int(rng.poisson(tweet_base * eps_tweet))
            n_live = int(rng.poisson(live_rate))
            n_adv = int(rng.poisson(adv_rate))
            n_reply = int(rng.poisson(reply_rate))

            # plain tweets arrive in bursts at volume-independent times, so
            # broadcast-to-tweet gap features do not become proxies for the
            # (planted) tweet volume
            n_bursts = 1 + int(rng.poisson(2.0))
            burst_centers = _month_times(rng, created, month, n_bursts)
            plain_times = np.clip(
                burst_centers[rng.integers(0, n_bursts, size=n_plain)]
                + rng.normal(0.0, 2400.0, size=n_plain),
                month_start,
                month_end - 1.0,
            )
            streams = (
                (n_plain, plain_times, 1.0, False, False),
                (n_live, _near_broadcast_times(n_live, before=True), 1.0, True, False),
                (n_adv, _near_broadcast_times(n_adv, before=False), 1.0, False, True),
                (n_reply, _month_times(rng, created, month, n_reply), 0.6, False, False),
            )
            for n, times, len_scale, is_live, is_adv in streams:
                lengths = rng.normal(tweet_len_mean * len_scale, 30.0, size=n)
                posts.extend(
                    SocialPost(
                        platform="twitter",
                        time=float(times[i]),
                        text_length=max(1, int(lengths[i])),
                        has_twitch_url=is_adv,
                        contains_live_keyword=is_live,
                        is_reply=len_scale < 1.0,
                    )
                    for i in range(n)
                )

        if platform_created["youtube"] is not None and month >= platform_start_month["youtube"]:
            n_yt = int(rng.poisson(yt_rate))
            times = _month_times(rng, created, month, n_yt)
            adv = rng.random(n_yt) < 0.5
            vlen = np.round(rng.lognormal(2.5, 0.6, n_yt), 2)
            titles = rng.integers(15, 70, size=n_yt)
            descs = rng.integers(50, 400, size=n_yt)
            posts.extend(
                SocialPost(
                    platform="youtube",
                    time=float(times[i]),
                    has_twitch_url=bool(adv[i]),
                    video_length_min=float(vlen[i]),
                    title_length=int(titles[i]),
                    description_length=int(descs[i]),
                )
                for i in range(n_yt)
            )

        if platform_created["instagram"] is not None and month >= platform_start_month["instagram"]:
            n_ig = int(rng.poisson(insta_rate))
            times = _month_times(rng, created, month, n_ig)
            lens = rng.integers(5, 250, size=n_ig)
            adv = rng.random(n_ig) < 0.3
            tags = rng.poisson(3.0, size=n_ig)
            posts.extend(
                SocialPost(
                    platform="instagram",
                    time=float(times[i]),
                    text_length=int(lens[i]),
                    has_twitch_url=bool(adv[i]),
                    tag_count=int(tags[i]),
                )
                for i in range(n_ig)
            )

        # planted growth: quality base scaled by realized behavior score
        mean_len_hours = (
            sum(b.duration_min for b in month_broadcasts) / 60.0 / len(month_broadcasts)
            if month_broadcasts
            else 0.0
        )
        regularity = sched_regularity(month_broadcasts, month_start)
        score = _behavior_score(mean_len_hours, regularity, n_plain, config)
        lift = 1.0 + beta * score

        growth_noise = math.exp(rng.normal(0.0, _GROWTH_NOISE_SIGMA))
        followers += float(round(_FOLLOWER_SCALE * quality * lift * growth_noise))
        cum_views += float(
            round(_VIEWS_SCALE * quality * lift * math.exp(rng.normal(0.0, _VIEWS_NOISE_SIGMA)))
        )
        avg_ccv = round(ccv_base * (lift / (1.0 + beta * 0.5)), 3)
        if not never_cheers:
            cheer_rate = max(_CHEER_FLOOR, _CHEER_SCALE * quality) * lift
            cheers_total += float(rng.poisson(cheer_rate))

        snapshots.append(
            PopularitySnapshot(
                month_index=month,
                followers=followers,
                avg_concurrent_viewers=avg_ccv,
                cumulative_views=cum_views,
                cheers=cheers_total,
            )
        )

    return StreamerRecord(
        streamer_id=sid,
        account=AccountInfo(
            twitch_created=created,
            twitter_created=platform_created["twitter"],
            youtube_created=platform_created["youtube"],
            instagram_created=platform_created["instagram"],
        ),
        broadcasts=broadcasts,
        posts=sorted(posts, key=lambda p: p.time),
        snapshots=snapshots,
    )


def _game_table(config: SynthConfig) -> GamePopularityTable:
    # fixed Zipf-like ranking, so the popular set is stable across months
    views = {}
    for month in range(config.n_months):
        for rank in range(_N_GAMES):
            views[(month, f"game{rank:02d}")] = float(
                round(1_000_000 / (rank + 1) ** 1.3)
            )
    return GamePopularityTable(views=views)


def generate(config: SynthConfig) -> Dataset:
    """Deterministic synthetic dataset; per-streamer sub-seeds make the output
    independent of generation order."""
    config.validate()
    ranks = np.random.default_rng([config.seed, 0xDEC0DE]).permutation(
        config.n_streamers
    )
    records = [
        _generate_streamer(config, i, int(ranks[i])) for i in range(config.n_streamers)
    ]
    dataset = Dataset(
        streamers={r.streamer_id: r for r in records},
        game_table=_game_table(config),
    )
    validate_dataset(dataset)
    return dataset
