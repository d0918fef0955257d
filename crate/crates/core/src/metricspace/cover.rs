//! ε-nets by farthest-point sampling and minimum covers by branch and bound.
//!
//! `𝒩_ε` counts balls of radius `ε/2`. Nets use closed balls; the open
//! variant is available for callers that need the strict definition.

use serde::Serialize;

use super::FiniteMetricSpace;
use crate::error::{input_err, Error, Result};

pub const DEFAULT_EXACT_BUDGET: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    Greedy,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ball {
    Closed,
    Open,
}

impl Ball {
    #[inline]
    pub fn contains(self, d: f64, radius: f64) -> bool {
        match self {
            Ball::Closed => d <= radius,
            Ball::Open => d < radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringProfile {
    pub epsilon: f64,
    pub net: Vec<usize>,
    pub method: CoverMethod,
    pub count: usize,
}

/// Farthest-point ordering: `radii[m]` is the covering radius of the first `m + 1` centres.
#[derive(Clone, Debug, PartialEq)]
pub struct FarthestPointOrder {
    pub order: Vec<usize>,
    pub radii: Vec<f64>,
}

impl FarthestPointOrder {
    /// Size of the greedy net covering with closed balls of radius `ε/2`.
    pub fn count_for(&self, epsilon: f64) -> usize {
        let r = epsilon / 2.0;
        self.radii.partition_point(|&x| x > r) + 1
    }

    pub fn net_for(&self, epsilon: f64) -> CoveringProfile {
        let count = self.count_for(epsilon).min(self.order.len());
        CoveringProfile { epsilon, net: self.order[..count].to_vec(), method: CoverMethod::Greedy, count }
    }
}

/// Adds centres one at a time, always the point farthest from those chosen
/// (lowest index on ties), starting from point 0, until `stop_radius` is reached.
fn fps(space: &FiniteMetricSpace, stop_radius: f64) -> FarthestPointOrder {
    let n = space.len();
    let mut nearest: Vec<f64> = (0..n).map(|j| space.distance(0, j)).collect();
    let mut order = vec![0];
    let mut radii = Vec::new();
    loop {
        let (far, r) = nearest.iter().enumerate().fold((0, 0.0f64), |b, (j, &d)| if d > b.1 { (j, d) } else { b });
        radii.push(r);
        if r <= stop_radius || order.len() == n {
            break;
        }
        order.push(far);
        for (j, d) in nearest.iter_mut().enumerate() {
            *d = d.min(space.distance(far, j));
        }
    }
    FarthestPointOrder { order, radii }
}

pub fn farthest_point_order(space: &FiniteMetricSpace) -> Result<FarthestPointOrder> {
    space.require_nonempty()?;
    Ok(fps(space, 0.0))
}

/// Greedy net: every point lies within `ε/2` of a centre. The centres are
/// pairwise more than `ε/2` apart, so the count never exceeds `𝒩_{ε/2}`.
pub fn greedy_net(space: &FiniteMetricSpace, epsilon: f64) -> Result<CoveringProfile> {
    space.require_nonempty()?;
    if !(epsilon > 0.0) {
        return Err(input_err!("ε = {epsilon} must be positive"));
    }
    let f = fps(space, epsilon / 2.0);
    let count = f.order.len();
    Ok(CoveringProfile { epsilon, net: f.order, method: CoverMethod::Greedy, count })
}

/// Outcome of [`min_set_cover`]; `exact` is false when the node budget ran out
/// and `chosen` is only the best cover found.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetCover {
    pub count: usize,
    pub chosen: Vec<usize>,
    pub exact: bool,
    pub nodes: u64,
}

type Bits = Vec<u64>;

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn popcount_and_not(a: &[u64], covered: &[u64]) -> u32 {
    a.iter().zip(covered).map(|(x, c)| (x & !c).count_ones()).sum()
}

struct Search<'a> {
    sets: &'a [Bits],
    containing: Vec<Vec<usize>>,
    universe: usize,
    best: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn dfs(&mut self, covered: &mut Bits, chosen: &mut Vec<usize>, covered_count: usize) {
        if self.nodes >= self.max_nodes {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if covered_count == self.universe {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        let uncovered = self.universe - covered_count;
        let widest = self.sets.iter().map(|s| popcount_and_not(s, covered)).max().unwrap_or(0) as usize;
        if widest == 0 || chosen.len() + uncovered.div_ceil(widest) >= self.best.len() {
            return;
        }
        // branch on the uncovered element with the fewest covering sets
        let e = (0..self.universe)
            .filter(|&e| covered[e / 64] >> (e % 64) & 1 == 0)
            .min_by_key(|&e| self.containing[e].len())
            .expect("something is uncovered");
        let mut options: Vec<(u32, usize)> =
            self.containing[e].iter().map(|&s| (popcount_and_not(&self.sets[s], covered), s)).collect();
        options.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (gain, s) in options {
            let saved = covered.clone();
            for (c, x) in covered.iter_mut().zip(&self.sets[s]) {
                *c |= x;
            }
            chosen.push(s);
            self.dfs(covered, chosen, covered_count + gain as usize);
            chosen.pop();
            *covered = saved;
            if self.exhausted {
                return;
            }
        }
    }
}

/// Minimum number of `sets` (bitsets over `0..universe`) whose union is everything.
pub fn min_set_cover(sets: &[Bits], universe: usize, max_nodes: u64) -> Result<SetCover> {
    let w = words(universe);
    let mut containing = vec![Vec::new(); universe];
    for (i, s) in sets.iter().enumerate() {
        if s.len() != w {
            return Err(input_err!("set {i} has {} words, expected {w}", s.len()));
        }
        for (e, list) in containing.iter_mut().enumerate() {
            if s[e / 64] >> (e % 64) & 1 == 1 {
                list.push(i);
            }
        }
    }
    if let Some(e) = containing.iter().position(Vec::is_empty) {
        return Err(input_err!("element {e} belongs to no set"));
    }
    // greedy start
    let mut covered = vec![0u64; w];
    let mut greedy = Vec::new();
    let mut count = 0;
    while count < universe {
        let (s, gain) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, popcount_and_not(s, &covered)))
            .fold((0, 0), |b, x| if x.1 > b.1 { x } else { b });
        greedy.push(s);
        count += gain as usize;
        for (c, x) in covered.iter_mut().zip(&sets[s]) {
            *c |= x;
        }
    }
    let mut search =
        Search { sets, containing, universe, best: greedy, nodes: 0, max_nodes, exhausted: false };
    search.dfs(&mut vec![0u64; w], &mut Vec::new(), 0);
    let mut chosen = search.best;
    chosen.sort_unstable();
    Ok(SetCover { count: chosen.len(), chosen, exact: !search.exhausted, nodes: search.nodes })
}

/// Ball memberships `B(i, radius)` as bitsets.
pub(crate) fn ball_sets(space: &FiniteMetricSpace, radius: f64, ball: Ball) -> Vec<Bits> {
    let n = space.len();
    (0..n)
        .map(|i| {
            let mut b = vec![0u64; words(n)];
            for j in 0..n {
                if ball.contains(space.distance(i, j), radius) {
                    b[j / 64] |= 1 << (j % 64);
                }
            }
            b
        })
        .collect()
}

/// `𝒩_ε` with closed balls of radius `ε/2` centred at points of the space.
pub fn exact_covering_number(space: &FiniteMetricSpace, epsilon: f64, budget: usize) -> Result<usize> {
    space.require_nonempty()?;
    if space.len() > budget {
        return Err(Error::Resource(format!("exact cover limited to {budget} points, space has {}", space.len())));
    }
    let sets = ball_sets(space, epsilon / 2.0, Ball::Closed);
    Ok(min_set_cover(&sets, space.len(), u64::MAX)?.count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_examples() {
        let s = FiniteMetricSpace::on_line(&[0.0, 1.0]).unwrap();
        assert_eq!(exact_covering_number(&s, 3.0, 20).unwrap(), 1);
        assert_eq!(exact_covering_number(&s, 0.5, 20).unwrap(), 2);
    }

    #[test]
    fn five_on_a_line() {
        let s = FiniteMetricSpace::on_line(&[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(exact_covering_number(&s, 2.0, 20).unwrap(), 2);
    }

    #[test]
    fn budget_and_empty() {
        let s = FiniteMetricSpace::on_line(&(0..25).map(f64::from).collect::<Vec<_>>()).unwrap();
        assert!(matches!(exact_covering_number(&s, 1.0, 20), Err(Error::Resource(_))));
        let e = FiniteMetricSpace::on_line(&[]).unwrap();
        assert!(greedy_net(&e, 1.0).is_err());
    }

    #[test]
    fn greedy_trivial_cases() {
        let one = FiniteMetricSpace::on_line(&[3.0]).unwrap();
        assert_eq!(greedy_net(&one, 1e-9).unwrap().count, 1);
        let s = FiniteMetricSpace::on_line(&[0.0, 0.3, 2.0, 5.0]).unwrap();
        assert_eq!(greedy_net(&s, 2.0 * s.diameter()).unwrap().count, 1);
        let net = greedy_net(&s, 1.0).unwrap();
        for j in 0..s.len() {
            assert!(net.net.iter().any(|&c| s.distance(c, j) <= 0.5));
        }
    }

    #[test]
    fn order_agrees_with_direct_net() {
        let xs: Vec<f64> = (0..200).map(|i| ((i * 37) % 200) as f64 / 199.0).collect();
        let s = FiniteMetricSpace::on_line(&xs).unwrap();
        let order = farthest_point_order(&s).unwrap();
        for eps in [0.01, 0.05, 0.2, 0.7] {
            assert_eq!(order.count_for(eps), greedy_net(&s, eps).unwrap().count);
            assert_eq!(order.net_for(eps).net, greedy_net(&s, eps).unwrap().net);
        }
    }

    #[test]
    fn set_cover_beats_greedy_and_reports_budget() {
        // greedy takes the big set first and needs three; two suffice
        let sets = vec![vec![0b001111u64], vec![0b010011], vec![0b101100]];
        let full = min_set_cover(&sets, 6, u64::MAX).unwrap();
        assert!(full.exact);
        assert_eq!(full.chosen, vec![1, 2]);
        let cut = min_set_cover(&sets, 6, 1).unwrap();
        assert!(!cut.exact);
        assert_eq!(cut.count, 3);
    }
}
