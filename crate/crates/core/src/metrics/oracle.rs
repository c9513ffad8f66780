use crate::data::{AuctionType, Campaign, Dataset};

/// A divisible unit of traffic: raising the bid one bin in one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item {
    pub cost: f64,
    pub value: f64,
}

/// Incremental items of a campaign, one per (step, bin) with stats.
///
/// VCG increments cost their win-bid surplus. First-price increments cost
/// the difference in `gamma^k * cumulative contacts` between consecutive
/// bins, i.e. the cheapest bid that lands in each bin.
pub fn oracle_items(c: &Campaign, d: &Dataset, step: i64) -> Vec<Item> {
    let mut items = Vec::new();
    if step <= 0 || c.campaign_end <= c.campaign_start {
        return items;
    }
    let mut now = c.campaign_start;
    while now < c.campaign_end {
        let slice = d.period_slice(c.campaign_id, now, step);
        let mut cum_contacts = 0.0;
        let mut paid = 0.0;
        let mut i = 0;
        while i < slice.len() {
            let bin = slice[i].contact_price_bin;
            let (mut cost, mut value) = (0.0, 0.0);
            while i < slice.len() && slice[i].contact_price_bin == bin {
                cost += slice[i].win_bid_surplus;
                value += slice[i].clicks_surplus;
                cum_contacts += slice[i].contacts_surplus;
                i += 1;
            }
            if d.auction_type == AuctionType::Fp {
                let total = d.gamma.powi(bin) * cum_contacts;
                cost = (total - paid).max(0.0);
                paid = total;
            }
            items.push(Item { cost, value });
        }
        now += step;
    }
    items
}


/// Fractional knapsack maximizing `score` under `sum(cost) <= budget`.
/// Returns the optimal score and the value collected.
fn knapsack(items: &[Item], budget: f64, score: impl Fn(&Item) -> f64) -> (f64, f64) {
    let (mut total, mut value) = (0.0, 0.0);
    let mut paid: Vec<(f64, f64, f64)> = Vec::with_capacity(items.len());
    for it in items {
        let s = score(it);
        if !(s > 0.0) {
            continue;
        }
        if it.cost <= 0.0 {
            total += s;
            value += it.value;
        } else {
            paid.push((s, it.cost, it.value));
        }
    }
    // higher score per unit cost first
    paid.sort_by(|a, b| (b.0 / b.1).total_cmp(&(a.0 / a.1)));
    let mut left = budget.max(0.0);
    for (s, c, v) in paid {
        if left <= 0.0 {
            break;
        }
        if c <= left {
            total += s;
            value += v;
            left -= c;
        } else {
            let f = left / c;
            total += s * f;
            value += v * f;
            left = 0.0;
        }
    }
    (total, value)
}

/// Maximum clicks over fractional selections of `items` with total cost at
/// most `budget` and, when `cpc_limit` is given, total cost at most
/// `cpc_limit` times total clicks.
///
/// Without a CPC cap this is the greedy fractional knapsack and exact. With
/// one, the CPC constraint is dualized and the dual is minimized by ternary
/// search, which yields a valid upper bound that converges to the optimum.
pub fn oracle_clicks(items: &[Item], budget: f64, cpc_limit: Option<f64>) -> f64 {
    let c = match cpc_limit {
        Some(c) if c.is_finite() && c > 0.0 => c,
        Some(_) => return free_clicks(items),
        None => return knapsack(items, budget, |it| it.value).1,
    };
    let dual = |nu: f64| knapsack(items, budget, |it| (1.0 + nu) * it.value - nu * it.cost / c).0;
    let mut hi = 1.0;
    let mut g_hi = dual(hi);
    while hi < 1e12 {
        let g = dual(2.0 * hi);
        if g >= g_hi {
            break;
        }
        hi *= 2.0;
        g_hi = g;
    }
    let (mut lo, mut hi) = (0.0, 2.0 * hi);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if dual(m1) < dual(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    dual(0.0).min(dual(lo)).min(dual(hi))
}

/// Clicks from zero-cost items only, the answer under a zero CPC cap.
fn free_clicks(items: &[Item]) -> f64 {
    items.iter().filter(|it| it.cost <= 0.0).map(|it| it.value).sum()
}

/// Upper bound on the clicks any bidder can collect on a campaign with
/// budget `budget` (minor units) and an optional CPC cap.
pub fn hindsight_oracle(c: &Campaign, d: &Dataset, budget: f64, cpc_limit: Option<f64>, step: i64) -> f64 {
    oracle_clicks(&oracle_items(c, d, step), budget, cpc_limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn items(v: &[(f64, f64)]) -> Vec<Item> {
        v.iter().map(|&(cost, value)| Item { cost, value }).collect()
    }

    /// Best value over every vertex with at most `fractional` items taken
    /// partially, feasible under both constraints.
    fn brute(items: &[Item], budget: f64, cpc: Option<f64>, fractional: usize) -> f64 {
        let n = items.len();
        let mut best: f64 = 0.0;
        let mut state = vec![0usize; n];
        loop {
            let frac: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
            if frac.len() <= fractional {
                let (mut c0, mut v0) = (0.0, 0.0);
                for i in 0..n {
                    if state[i] == 1 {
                        c0 += items[i].cost;
                        v0 += items[i].value;
                    }
                }
                for x in vertex_fractions(items, &frac, budget - c0, cpc.map(|c| c * v0 - c0), cpc) {
                    let cost: f64 = c0 + frac.iter().zip(&x).map(|(&i, f)| items[i].cost * f).sum::<f64>();
                    let value: f64 = v0 + frac.iter().zip(&x).map(|(&i, f)| items[i].value * f).sum::<f64>();
                    let ok = cost <= budget + 1e-9 && cpc.is_none_or(|c| cost <= c * value + 1e-9);
                    if ok {
                        best = best.max(value);
                    }
                }
            }
            let mut k = 0;
            while k < n && state[k] == 2 {
                state[k] = 0;
                k += 1;
            }
            if k == n {
                return best;
            }
            state[k] += 1;
        }
    }

    /// Candidate fractions for the partially taken items: each tight
    /// constraint pins one of them.
    fn vertex_fractions(items: &[Item], frac: &[usize], budget_left: f64, slack: Option<f64>, cpc: Option<f64>) -> Vec<Vec<f64>> {
        match frac {
            [] => vec![vec![]],
            [i] => {
                let it = items[*i];
                let mut out = Vec::new();
                if it.cost > 0.0 {
                    out.push(vec![(budget_left / it.cost).clamp(0.0, 1.0)]);
                }
                if let (Some(s), Some(c)) = (slack, cpc) {
                    let a = it.cost - c * it.value;
                    if a != 0.0 {
                        out.push(vec![(s / a).clamp(0.0, 1.0)]);
                    }
                }
                out
            }
            [i, j] => {
                let (a, b) = (items[*i], items[*j]);
                let (Some(s), Some(c)) = (slack, cpc) else { return vec![] };
                // a.cost x + b.cost y = budget_left
                // (a.cost - c a.value) x + (b.cost - c b.value) y = s
                let (p, q) = (a.cost - c * a.value, b.cost - c * b.value);
                let det = a.cost * q - b.cost * p;
                if det == 0.0 {
                    return vec![];
                }
                let x = (budget_left * q - b.cost * s) / det;
                let y = (a.cost * s - budget_left * p) / det;
                if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
                    vec![vec![x, y]]
                } else {
                    vec![]
                }
            }
            _ => vec![],
        }
    }

    #[test]
    fn unconstrained_takes_everything() {
        let it = items(&[(1.0, 0.5), (2.0, 0.25), (0.0, 0.125)]);
        assert_eq!(oracle_clicks(&it, 100.0, None), 0.875);
    }

    #[test]
    fn zero_budget_takes_only_free_items() {
        let it = items(&[(1.0, 0.5), (2.0, 0.25)]);
        assert_eq!(oracle_clicks(&it, 0.0, None), 0.0);
    }

    #[test]
    fn greedy_takes_one_fractional_item() {
        let it = items(&[(4.0, 1.0), (2.0, 1.0), (2.0, 0.25)]);
        // ratios 0.25, 0.5, 0.125: take item 1, then half of item 0
        assert_eq!(oracle_clicks(&it, 4.0, None), 1.5);
    }

    #[test]
    fn cpc_cap_binds() {
        // cheap: cost 1 value 1, pricey: cost 10 value 2; cap 2 per click
        let it = items(&[(1.0, 1.0), (10.0, 2.0)]);
        let unconstrained = oracle_clicks(&it, 11.0, None);
        assert_eq!(unconstrained, 3.0);
        // 1 + 10x <= 2 (1 + 2x)  =>  x <= 1/6
        let v = oracle_clicks(&it, 11.0, Some(2.0));
        assert!((v - (1.0 + 2.0 / 6.0)).abs() < 1e-9, "{v}");
    }

    fn dyadic_items() -> impl Strategy<Value = Vec<Item>> {
        prop::collection::vec((0u32..4, 0u32..16), 1..8).prop_map(|v| {
            v.into_iter()
                .map(|(c, k)| Item {
                    cost: (1u32 << c) as f64 / 4.0,
                    value: k as f64 / 8.0,
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn greedy_matches_vertex_enumeration(it in dyadic_items(), b in 0u32..40) {
            let budget = b as f64 / 4.0;
            prop_assert_eq!(oracle_clicks(&it, budget, None), brute(&it, budget, None, 1));
        }

        #[test]
        fn dual_matches_vertex_enumeration(it in dyadic_items(), b in 0u32..40, c in 1u32..16) {
            let budget = b as f64 / 4.0;
            let cap = c as f64 / 2.0;
            let exact = brute(&it, budget, Some(cap), 2);
            let bound = oracle_clicks(&it, budget, Some(cap));
            prop_assert!(bound >= exact - 1e-9, "{} < {}", bound, exact);
            prop_assert!(bound <= exact + 1e-6 * exact.max(1.0), "{} > {}", bound, exact);
        }
    }
}
