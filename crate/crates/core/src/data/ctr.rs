use std::collections::{BTreeMap, HashMap};

use super::{Campaign, CampaignStats};
use crate::traffic::WeekClock;

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    ctr: f64,
    cvr: f64,
    n: u64,
}

impl Acc {
    fn add(&mut self, ctr: f64, cvr: f64) {
        self.ctr += ctr;
        self.cvr += cvr;
        self.n += 1;
    }

    fn merge(&mut self, other: &Acc) {
        self.ctr += other.ctr;
        self.cvr += other.cvr;
        self.n += other.n;
    }

    fn mean(&self) -> Option<(f64, f64)> {
        (self.n > 0).then(|| (self.ctr / self.n as f64, self.cvr / self.n as f64))
    }
}

/// CTR/CVR prediction means keyed by category, hour of week and bin.
#[derive(Debug, Clone, Default)]
pub struct CtrIndex {
    groups: HashMap<(String, u16), BTreeMap<i32, Acc>>,
    categories: HashMap<String, Acc>,
    global: Acc,
}

impl CtrIndex {
    pub(super) fn build(
        campaigns: &BTreeMap<u64, Campaign>,
        stats: &BTreeMap<u64, CampaignStats>,
        clock: &WeekClock,
    ) -> Self {
        let mut idx = CtrIndex::default();
        for (id, periods) in stats {
            let Some(c) = campaigns.get(id) else { continue };
            for (&period, recs) in periods {
                let how = clock.slot(period) as u16;
                let bins = idx
                    .groups
                    .entry((c.logical_category.clone(), how))
                    .or_default();
                let cat = idx.categories.entry(c.logical_category.clone()).or_default();
                for r in recs {
                    bins.entry(r.contact_price_bin)
                        .or_default()
                        .add(r.ctr_predict, r.cr_predict);
                    cat.add(r.ctr_predict, r.cr_predict);
                    idx.global.add(r.ctr_predict, r.cr_predict);
                }
            }
        }
        idx
    }

    pub fn estimate(&self, category: &str, hour_of_week: usize, (lo, hi): (i32, i32)) -> (f64, f64) {
        if lo <= hi {
            if let Some(bins) = self.groups.get(&(category.to_string(), hour_of_week as u16)) {
                let mut acc = Acc::default();
                for a in bins.range(lo..=hi).map(|(_, a)| a) {
                    acc.merge(a);
                }
                if let Some(m) = acc.mean() {
                    return m;
                }
            }
        }
        self.categories
            .get(category)
            .and_then(Acc::mean)
            .or_else(|| self.global.mean())
            .unwrap_or((0.0, 0.0))
    }
}
