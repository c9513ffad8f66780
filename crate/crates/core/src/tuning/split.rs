use serde::{Deserialize, Serialize};

use crate::data::Campaign;
use crate::error::{Error, Result};

/// Train/validation partition in which every training campaign ends before
/// any validation campaign starts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub cut: i64,
    pub train: Vec<u64>,
    pub test: Vec<u64>,
    /// Campaigns running across the cut, or with an empty window.
    pub dropped: Vec<u64>,
}

/// Picks the cut that maximizes the smaller side; ties go to fewer dropped
/// campaigns, then to the earlier cut.
pub fn split_time_disjoint<'a>(campaigns: impl IntoIterator<Item = &'a Campaign>) -> Result<Split> {
    let mut live: Vec<&Campaign> = Vec::new();
    let mut degenerate = Vec::new();
    for c in campaigns {
        if c.campaign_end > c.campaign_start {
            live.push(c);
        } else {
            degenerate.push(c.campaign_id);
        }
    }
    if live.len() < 2 {
        return Err(Error::InfeasibleSplit);
    }
    let mut ends: Vec<i64> = live.iter().map(|c| c.campaign_end).collect();
    let mut starts: Vec<i64> = live.iter().map(|c| c.campaign_start).collect();
    ends.sort_unstable();
    starts.sort_unstable();
    let mut cuts: Vec<i64> = ends.iter().chain(&starts).copied().collect();
    cuts.sort_unstable();
    cuts.dedup();

    let n = live.len();
    let mut best: Option<(usize, usize, i64)> = None;
    for &t in &cuts {
        let n_train = ends.partition_point(|&e| e <= t);
        let n_test = n - starts.partition_point(|&s| s < t);
        let small = n_train.min(n_test);
        if small == 0 {
            continue;
        }
        let dropped = n - n_train - n_test;
        let better = match best {
            None => true,
            Some((s, d, _)) => small > s || (small == s && dropped < d),
        };
        if better {
            best = Some((small, dropped, t));
        }
    }
    let (_, _, cut) = best.ok_or(Error::InfeasibleSplit)?;
    let mut split = Split {
        cut,
        train: Vec::new(),
        test: Vec::new(),
        dropped: degenerate,
    };
    for c in live {
        if c.campaign_end <= cut {
            split.train.push(c.campaign_id);
        } else if c.campaign_start >= cut {
            split.test.push(c.campaign_id);
        } else {
            split.dropped.push(c.campaign_id);
        }
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    split.dropped.sort_unstable();
    Ok(split)
}
