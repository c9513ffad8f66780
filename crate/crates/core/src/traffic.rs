//! Weekly traffic profiles and the traffic-share windows consumed by the
//! pacing controllers.
//!
//! A profile stores 168 hourly shares indexed by `(dow - 1) * 24 + hour`,
//! where `dow = 1` is Sunday. Shares are treated as a piecewise-constant
//! density over the week, so a window covering part of an hour receives a
//! linearly interpolated part of that hour's share.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HOUR: i64 = 3600;
pub const DAY: i64 = 24 * HOUR;
pub const WEEK: i64 = 7 * DAY;
pub const SLOTS_PER_WEEK: usize = 168;

/// Maps absolute timestamps onto week slots.
///
/// Slot 0 is `(dow = 1, hour = 0)`; a timestamp `t` falls into slot
/// `((t + epoch_offset) mod 604800) / 3600`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeekClock {
    pub epoch_offset: i64,
}

impl WeekClock {
    pub fn new(epoch_offset: i64) -> Self {
        WeekClock { epoch_offset }
    }

    fn shifted(&self, t: i64) -> i64 {
        t + self.epoch_offset
    }

    /// Hour-of-week slot in `0..168`.
    pub fn slot(&self, t: i64) -> usize {
        (self.shifted(t).rem_euclid(WEEK) / HOUR) as usize
    }

    /// `(dow, hour)` with `dow` in `1..=7`.
    pub fn dow_hour(&self, t: i64) -> (u8, u8) {
        let slot = self.slot(t);
        ((slot / 24 + 1) as u8, (slot % 24) as u8)
    }
}

pub fn slot_index(dow: u8, hour: u8) -> Result<usize> {
    if !(1..=7).contains(&dow) {
        return Err(Error::InvalidArgument(format!("dow {dow} outside 1..=7")));
    }
    if hour > 23 {
        return Err(Error::InvalidArgument(format!("hour {hour} outside 0..=23")));
    }
    Ok((dow as usize - 1) * 24 + hour as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficProfile {
    pub region_id: u64,
    shares: Vec<f64>,
    /// `prefix[i]` is the mass of slots `0..i`; `prefix[168]` is the weekly total.
    #[serde(skip)]
    prefix: Vec<f64>,
}

impl TrafficProfile {
    pub fn new(region_id: u64, shares: Vec<f64>) -> Result<Self> {
        if shares.len() != SLOTS_PER_WEEK {
            return Err(Error::InvalidArgument(format!(
                "traffic profile for region {region_id} has {} slots, expected {SLOTS_PER_WEEK}",
                shares.len()
            )));
        }
        let mut prefix = Vec::with_capacity(SLOTS_PER_WEEK + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for s in &shares {
            acc += s;
            prefix.push(acc);
        }
        Ok(TrafficProfile {
            region_id,
            shares,
            prefix,
        })
    }

    pub fn uniform(region_id: u64) -> Self {
        Self::new(region_id, vec![1.0 / SLOTS_PER_WEEK as f64; SLOTS_PER_WEEK])
            .expect("168 slots")
    }

    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    pub fn weekly_total(&self) -> f64 {
        self.prefix[SLOTS_PER_WEEK]
    }

    pub fn share_at(&self, dow: u8, hour: u8) -> Result<f64> {
        Ok(self.shares[slot_index(dow, hour)?])
    }

    /// Mass from the start of the week containing `t` up to `t`, plus the
    /// index of that week.
    fn position(&self, clock: &WeekClock, t: i64) -> (i64, f64) {
        let shifted = clock.shifted(t);
        let week = shifted.div_euclid(WEEK);
        let within = shifted.rem_euclid(WEEK);
        let slot = (within / HOUR) as usize;
        let frac = (within % HOUR) as f64 / HOUR as f64;
        (week, self.prefix[slot] + frac * self.shares[slot])
    }

    /// Traffic mass in `[t_from, t_to)`.
    pub fn window_share(&self, clock: &WeekClock, t_from: i64, t_to: i64) -> f64 {
        if t_to <= t_from {
            return 0.0;
        }
        let (wa, ma) = self.position(clock, t_from);
        let (wb, mb) = self.position(clock, t_to);
        (wb - wa) as f64 * self.weekly_total() + (mb - ma)
    }

    pub fn max_min_ratio(&self) -> f64 {
        let max = self.shares.iter().copied().fold(f64::MIN, f64::max);
        let min = self.shares.iter().copied().fold(f64::MAX, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

/// Traffic quantities around one decision time of a campaign.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TrafficWindow {
    /// Mass of the step starting now.
    pub t_cur: f64,
    /// Mass from campaign start to now.
    pub t_prev: f64,
    /// Mass from now to campaign end.
    pub t_left: f64,
    pub t_all: f64,
}

pub fn window_for_campaign(
    profile: &TrafficProfile,
    clock: &WeekClock,
    start: i64,
    end: i64,
    now: i64,
    step: i64,
) -> Result<TrafficWindow> {
    if now < start || now > end {
        return Err(Error::OutsideCampaign { now, start, end });
    }
    let t_prev = profile.window_share(clock, start, now);
    let t_left = profile.window_share(clock, now, end);
    let t_cur = profile.window_share(clock, now, (now + step).min(end));
    Ok(TrafficWindow {
        t_cur,
        t_prev,
        t_left,
        t_all: t_prev + t_left,
    })
}
